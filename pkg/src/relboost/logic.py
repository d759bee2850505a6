"""First-order substrate: terms, atoms, clauses, fact storage, satisfaction.

Constants are normalized lowercase strings; variables start with an
upper-case letter. Conjunctions are satisfied by left-to-right backtracking
over facts in insertion order, so witnesses and enumeration order are
deterministic for a given fact base.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import SchemaError

# Canonical argument-type tags and the spellings accepted in schema/mode files.
TYPE_TAGS = (
    "publication-id",
    "author-id",
    "name-string",
    "affiliation-string",
    "venue-string",
    "title-string",
)

TYPE_ALIASES: dict[str, frozenset[str]] = {
    "publication-id": frozenset(
        {"pub", "paper", "pubid", "publication", "publication_id", "publication-id"}
    ),
    "author-id": frozenset({"author", "authorid", "author_id", "author-id"}),
    "name-string": frozenset(
        {"name", "namestr", "namestring", "name_string", "name-string"}
    ),
    "affiliation-string": frozenset(
        {"aff", "affstr", "affiliation", "affiliation_string", "affiliation-string"}
    ),
    "venue-string": frozenset(
        {"v", "venue", "venuestr", "venue_string", "venue-string"}
    ),
    "title-string": frozenset(
        {"t", "title", "titlestr", "title_string", "title-string"}
    ),
}

_TAG_LOOKUP = {
    alias: tag for tag, aliases in TYPE_ALIASES.items() for alias in aliases
}

_WS_RUN = re.compile(r"\s+")
_BAD_CHARS = re.compile(r"[(),.%'\"]+")
_UNDERSCORE_RUN = re.compile(r"_+")


def resolve_type_tag(token: str) -> str:
    """Map a schema/mode type token onto its canonical tag."""
    tag = _TAG_LOOKUP.get(token.strip().lower())
    if tag is None:
        raise SchemaError(f"unknown type tag {token!r}")
    return tag


def normalize_constant(text: str) -> str:
    """Canonical form for constants: lowercase, trimmed, separators collapsed.

    Whitespace runs and characters that would break the fact syntax become a
    single underscore.
    """
    out = text.strip().lower()
    out = _WS_RUN.sub("_", out)
    out = _BAD_CHARS.sub("_", out)
    out = _UNDERSCORE_RUN.sub("_", out).strip("_")
    return out


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Constant:
    symbol: str

    def __str__(self) -> str:
        return self.symbol


Term = Variable | Constant


def is_variable_token(token: str) -> bool:
    """Terms whose first character is upper-case parse as variables."""
    return bool(token) and token[0].isupper()


@dataclass(frozen=True, slots=True)
class PredicateSignature:
    """A predicate with typed argument positions and an optional short alias."""

    name: str
    arg_types: tuple[str, ...]
    alias: str | None = None

    @property
    def arity(self) -> int:
        return len(self.arg_types)

    @property
    def key(self) -> tuple[str, int]:
        return (self.name, self.arity)

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


class Schema:
    """Ordered collection of predicate signatures, unique per (name, arity)."""

    def __init__(self, signatures: Iterable[PredicateSignature] = ()):
        self._by_key: dict[tuple[str, int], PredicateSignature] = {}
        self._alias_to_name: dict[str, str] = {}
        for sig in signatures:
            self.add(sig)

    def add(self, sig: PredicateSignature) -> None:
        if sig.key in self._by_key:
            raise SchemaError(f"duplicate predicate declaration {sig}")
        for tag in sig.arg_types:
            if tag not in TYPE_TAGS:
                raise SchemaError(f"unknown type tag {tag!r} in {sig}")
        if sig.alias and sig.alias != sig.name:
            existing = self._alias_to_name.get(sig.alias)
            if existing not in (None, sig.name):
                raise SchemaError(f"alias {sig.alias!r} already bound to {existing}")
            self._alias_to_name[sig.alias] = sig.name
        self._by_key[sig.key] = sig

    @property
    def signatures(self) -> tuple[PredicateSignature, ...]:
        return tuple(self._by_key.values())

    def canonical_name(self, name: str) -> str:
        return self._alias_to_name.get(name, name)

    def resolve(self, name: str, arity: int) -> PredicateSignature:
        """Look up a signature by canonical name or alias, plus arity."""
        sig = self._by_key.get((self.canonical_name(name), arity))
        if sig is None:
            raise SchemaError(f"unknown predicate {name}/{arity}")
        return sig

    def __contains__(self, key: tuple[str, int]) -> bool:
        return (self.canonical_name(key[0]), key[1]) in self._by_key

    def __len__(self) -> int:
        return len(self._by_key)


@dataclass(frozen=True, slots=True)
class Atom:
    predicate: PredicateSignature
    args: tuple[Term, ...]

    def __post_init__(self) -> None:
        if len(self.args) != self.predicate.arity:
            raise SchemaError(
                f"{self.predicate} applied to {len(self.args)} arguments"
            )

    def is_ground(self) -> bool:
        return all(isinstance(a, Constant) for a in self.args)

    def variables(self) -> tuple[Variable, ...]:
        return tuple(a for a in self.args if isinstance(a, Variable))

    def __str__(self) -> str:
        inner = ", ".join(str(a) for a in self.args)
        return f"{self.predicate.name}({inner})"


@dataclass(frozen=True, slots=True)
class HornClause:
    """`head <= body` with an optional numeric weight (regression value)."""

    head: Atom
    body: tuple[Atom, ...]
    weight: float | None = None

    def __str__(self) -> str:
        body = ", ".join(str(a) for a in self.body)
        text = f"{self.head} <= {body}."
        return text if self.body else f"{self.head} <= ."


class Label(str, Enum):
    POSITIVE = "pos"
    NEGATIVE = "neg"
    UNOBSERVED = "unobserved"


@dataclass(frozen=True, slots=True)
class LabeledExample:
    atom: Atom
    label: Label


# A substitution maps variable names to constant symbols.
Substitution = dict[str, str]


def apply_binding(atom: Atom, binding: Mapping[str, str]) -> Atom:
    """Replace bound variables in `atom` with their constants."""
    args: list[Term] = []
    for term in atom.args:
        if isinstance(term, Variable) and term.name in binding:
            args.append(Constant(binding[term.name]))
        else:
            args.append(term)
    return Atom(atom.predicate, tuple(args))


class FactBase:
    """Indexed store of ground atoms.

    Facts keep insertion order (which fixes witness enumeration order) and are
    deduplicated. Each predicate gets a per-argument-position hash index. The
    store is meant to be immutable once a model starts consuming it; use
    `extended` to derive a new base with extra facts.
    """

    def __init__(self, schema: Schema):
        self.schema = schema
        self._rows: dict[tuple[str, int], list[tuple[str, ...]]] = {}
        self._seen: set[tuple[str, int, tuple[str, ...]]] = set()
        self._index: dict[tuple[tuple[str, int], int, str], list[int]] = {}
        self._size = 0

    def add(self, atom: Atom) -> None:
        if not atom.is_ground():
            raise SchemaError(f"fact {atom} contains a variable")
        if atom.predicate.key not in self.schema:
            raise SchemaError(f"fact {atom} uses undeclared {atom.predicate}")
        row = tuple(term.symbol for term in atom.args)  # type: ignore[union-attr]
        self.add_row(atom.predicate.key, row)

    def add_row(self, key: tuple[str, int], row: tuple[str, ...]) -> None:
        if (key[0], key[1], row) in self._seen:
            return
        self._seen.add((key[0], key[1], row))
        rows = self._rows.setdefault(key, [])
        rows.append(row)
        rid = len(rows) - 1
        for pos, sym in enumerate(row):
            self._index.setdefault((key, pos, sym), []).append(rid)
        self._size += 1

    def add_many(self, atoms: Iterable[Atom]) -> None:
        for atom in atoms:
            self.add(atom)

    def extended(self, atoms: Iterable[Atom]) -> "FactBase":
        """A new fact base containing these facts plus `atoms` (deduplicated)."""
        out = FactBase(self.schema)
        for key, rows in self._rows.items():
            for row in rows:
                out.add_row(key, row)
        out.add_many(atoms)
        return out

    def contains(self, atom: Atom) -> bool:
        if not atom.is_ground():
            return False
        row = tuple(term.symbol for term in atom.args)  # type: ignore[union-attr]
        return (atom.predicate.name, atom.predicate.arity, row) in self._seen

    def facts(self) -> Iterator[Atom]:
        """All stored facts as atoms, grouped by predicate in insertion order."""
        for key, rows in self._rows.items():
            sig = self.schema.resolve(key[0], key[1])
            for row in rows:
                yield Atom(sig, tuple(Constant(s) for s in row))

    def rows(self, key: tuple[str, int]) -> Sequence[tuple[str, ...]]:
        return self._rows.get(key, ())

    def constants(self) -> list[str]:
        """Every constant appearing anywhere, ordered by first appearance."""
        seen: dict[str, None] = {}
        for rows in self._rows.values():
            for row in rows:
                for sym in row:
                    seen.setdefault(sym)
        return list(seen)

    def frequent_constants(self, key: tuple[str, int], pos: int, n: int) -> list[str]:
        """Top-n constants at one argument position, by frequency then first seen."""
        counts: dict[str, int] = {}
        for row in self._rows.get(key, ()):
            sym = row[pos]
            counts[sym] = counts.get(sym, 0) + 1
        ranked = sorted(counts.items(), key=lambda kv: -kv[1])
        # dict order makes the sort stable on first appearance for equal counts
        return [sym for sym, _ in ranked[:n]]

    def candidate_rows(
        self, key: tuple[str, int], probe: Sequence[tuple[int, str]]
    ) -> Sequence[tuple[str, ...]]:
        """Rows of `key` matching all (position, symbol) constraints, in order."""
        rows = self._rows.get(key)
        if not rows:
            return ()
        if not probe:
            return rows
        if len(probe) == key[1]:
            row = tuple(sym for _, sym in sorted(probe))
            return (row,) if (key[0], key[1], row) in self._seen else ()
        best: list[int] | None = None
        for pos, sym in probe:
            posting = self._index.get((key, pos, sym))
            if posting is None:
                return ()
            if best is None or len(posting) < len(best):
                best = posting
        assert best is not None
        if len(probe) == 1:
            return [rows[i] for i in best]
        out = []
        for i in best:
            row = rows[i]
            if all(row[p] == s for p, s in probe):
                out.append(row)
        return out

    def __len__(self) -> int:
        return self._size

    def __repr__(self) -> str:
        return f"FactBase({self._size} facts, {len(self.schema)} predicates)"


# --- satisfaction engine -------------------------------------------------

# Compiled atom: (predicate key, slots) where each slot is
# (position, is_variable, name_or_symbol).
_Compiled = list[tuple[tuple[str, int], tuple[tuple[int, bool, str], ...]]]

# A mask names one ground row that body literals must not match. Queries
# about an atom never get to use that very atom as evidence.
Mask = tuple[tuple[str, int], tuple[str, ...]]

_NO_FORBID: dict[str, frozenset[str]] = {}


def mask_of(atom: Atom) -> Mask:
    """The (predicate key, row) pair that hides `atom` from the solver."""
    if not atom.is_ground():
        raise SchemaError(f"cannot mask non-ground atom {atom}")
    return atom.predicate.key, tuple(t.symbol for t in atom.args)  # type: ignore[union-attr]


def compile_conjunction(conjunction: Sequence[Atom]) -> _Compiled:
    out: _Compiled = []
    for atom in conjunction:
        slots = tuple(
            (pos, isinstance(term, Variable), term.name if isinstance(term, Variable) else term.symbol)
            for pos, term in enumerate(atom.args)
        )
        out.append((atom.predicate.key, slots))
    return out


def _probe_for(slots, binding):
    probe = []
    for pos, is_var, val in slots:
        if is_var:
            sym = binding.get(val)
            if sym is not None:
                probe.append((pos, sym))
        else:
            probe.append((pos, val))
    return probe


def holds(
    compiled: _Compiled,
    i: int,
    binding: Substitution,
    fb: FactBase,
    forbid: Mapping[str, frozenset[str]] = _NO_FORBID,
    mask: Mask | None = None,
) -> bool:
    """True iff atoms i.. are jointly satisfiable. Restores `binding` fully."""
    if i == len(compiled):
        return True
    key, slots = compiled[i]
    masked_row = mask[1] if mask is not None and mask[0] == key else None
    for row in fb.candidate_rows(key, _probe_for(slots, binding)):
        if row == masked_row:
            continue
        trail = []
        ok = True
        for pos, is_var, val in slots:
            cell = row[pos]
            if is_var:
                cur = binding.get(val)
                if cur is None:
                    if forbid and cell in forbid.get(val, ()):
                        ok = False
                        break
                    binding[val] = cell
                    trail.append(val)
                elif cur != cell:
                    ok = False
                    break
            elif cell != val:
                ok = False
                break
        found = ok and holds(compiled, i + 1, binding, fb, forbid, mask)
        for name in trail:
            del binding[name]
        if found:
            return True
    return False


def solutions(
    compiled: _Compiled,
    i: int,
    binding: Substitution,
    fb: FactBase,
    forbid: Mapping[str, frozenset[str]] = _NO_FORBID,
    mask: Mask | None = None,
) -> Iterator[Substitution]:
    """Yield every satisfying extension of `binding` (as copies), in order."""
    if i == len(compiled):
        yield dict(binding)
        return
    key, slots = compiled[i]
    masked_row = mask[1] if mask is not None and mask[0] == key else None
    for row in fb.candidate_rows(key, _probe_for(slots, binding)):
        if row == masked_row:
            continue
        trail = []
        ok = True
        for pos, is_var, val in slots:
            cell = row[pos]
            if is_var:
                cur = binding.get(val)
                if cur is None:
                    if forbid and cell in forbid.get(val, ()):
                        ok = False
                        break
                    binding[val] = cell
                    trail.append(val)
                elif cur != cell:
                    ok = False
                    break
            elif cell != val:
                ok = False
                break
        if ok:
            yield from solutions(compiled, i + 1, binding, fb, forbid, mask)
        for name in trail:
            del binding[name]


def _check_binding(binding: Mapping[str, str], forbid) -> bool:
    if not forbid:
        return True
    return all(
        sym not in forbid.get(name, ()) for name, sym in binding.items()
    )


def satisfy(
    conjunction: Sequence[Atom],
    binding: Mapping[str, str] | None,
    fb: FactBase,
    *,
    forbid: Mapping[str, frozenset[str]] | None = None,
    mask: Atom | None = None,
) -> tuple[bool, Substitution | None]:
    """Existentially satisfy a conjunction under a partial binding.

    Returns (satisfied, witness). The witness is the first satisfying
    extension in deterministic order: atoms are tried left to right and
    facts in insertion order. A `mask` atom is invisible to the search.
    """
    fmap = forbid or _NO_FORBID
    mrow = mask_of(mask) if mask is not None else None
    work: Substitution = dict(binding or {})
    if not _check_binding(work, fmap):
        return False, None
    for sol in solutions(
        compile_conjunction(conjunction), 0, work, fb, fmap, mrow
    ):
        return True, sol
    return False, None


def enumerate_bindings(
    conjunction: Sequence[Atom],
    binding: Mapping[str, str] | None,
    fb: FactBase,
    limit: int | None = None,
    *,
    forbid: Mapping[str, frozenset[str]] | None = None,
    mask: Atom | None = None,
) -> list[Substitution]:
    """Up to `limit` distinct satisfying extensions, in enumeration order."""
    fmap = forbid or _NO_FORBID
    mrow = mask_of(mask) if mask is not None else None
    work: Substitution = dict(binding or {})
    if not _check_binding(work, fmap):
        return []
    out: list[Substitution] = []
    seen: set[tuple[tuple[str, str], ...]] = set()
    for sol in solutions(
        compile_conjunction(conjunction), 0, work, fb, fmap, mrow
    ):
        fp = tuple(sorted(sol.items()))
        if fp in seen:
            continue
        seen.add(fp)
        out.append(sol)
        if limit is not None and len(out) >= limit:
            break
    return out
