"""Text formats for schemas, facts, examples and mode declarations.

All formats are line-oriented UTF-8 with `%` comments and a trailing period
per statement. Parsing reports 1-based line numbers on errors; rendering
emits canonical predicate names, so render(parse(text)) is idempotent after
one normalization pass.
"""

from __future__ import annotations

import re
from typing import Sequence

from .errors import ParseError, SchemaError
from .induction import CONST, INPUT, OUTPUT, ModeDeclaration
from .logic import (
    Atom,
    Constant,
    FactBase,
    Label,
    LabeledExample,
    PredicateSignature,
    Schema,
    Term,
    Variable,
    is_variable_token,
    normalize_constant,
    resolve_type_tag,
)

_ATOM_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*\((.*)\)$")
_SCHEMA_RE = re.compile(
    r"^([A-Za-z_][A-Za-z0-9_]*)(?:\s*/\s*([A-Za-z_][A-Za-z0-9_]*))?\s*\((.*)\)$"
)


def _statements(text: str):
    """Yield (line_no, statement) pairs, comments and blanks removed."""
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        yield line_no, line


def _strip_period(stmt: str, line_no: int) -> str:
    if not stmt.endswith("."):
        raise ParseError("statement must end with '.'", line_no)
    return stmt[:-1].strip()


def _split_args(body: str, line_no: int) -> list[str]:
    parts = [p.strip() for p in body.split(",")]
    if any(not p for p in parts):
        raise ParseError("empty argument", line_no)
    return parts


def parse_atom(
    text: str,
    schema: Schema,
    *,
    line_no: int = 0,
    allow_variables: bool = True,
) -> Atom:
    """Parse `pred(arg, arg)`; upper-case-initial tokens become variables."""
    m = _ATOM_RE.match(text.strip())
    if not m:
        raise ParseError(f"cannot parse atom {text!r}", line_no or None)
    name, arg_body = m.group(1), m.group(2).strip()
    args = _split_args(arg_body, line_no) if arg_body else []
    try:
        sig = schema.resolve(name, len(args))
    except SchemaError as exc:
        raise ParseError(str(exc), line_no or None) from exc
    terms: list[Term] = []
    for token in args:
        if is_variable_token(token):
            if not allow_variables:
                raise ParseError(
                    f"variable {token!r} not allowed here", line_no or None
                )
            terms.append(Variable(token))
        else:
            sym = normalize_constant(token)
            if not sym:
                raise ParseError(f"empty constant in {text!r}", line_no or None)
            terms.append(Constant(sym))
    return Atom(sig, tuple(terms))


def render_atom(atom: Atom) -> str:
    return str(atom)


def parse_schema(text: str) -> Schema:
    """Schema file: one `name(tag, tag).` per line, optional `/alias`.

    Example: `publication/pub(pub, author).` declares the alias `pub`.
    """
    schema = Schema()
    for line_no, stmt in _statements(text):
        stmt = _strip_period(stmt, line_no)
        m = _SCHEMA_RE.match(stmt)
        if not m:
            raise ParseError(f"cannot parse declaration {stmt!r}", line_no)
        name, alias, arg_body = m.group(1), m.group(2), m.group(3).strip()
        tokens = _split_args(arg_body, line_no) if arg_body else []
        try:
            types = tuple(resolve_type_tag(t) for t in tokens)
            schema.add(PredicateSignature(name, types, alias=alias))
        except SchemaError as exc:
            raise ParseError(str(exc), line_no) from exc
    return schema


def render_schema(schema: Schema) -> str:
    lines = []
    for sig in schema.signatures:
        name = f"{sig.name}/{sig.alias}" if sig.alias else sig.name
        lines.append(f"{name}({', '.join(sig.arg_types)}).")
    return "\n".join(lines) + "\n"


def parse_facts(text: str, schema: Schema) -> FactBase:
    """Fact file: one ground atom per line, `pred(c1, c2).`"""
    fb = FactBase(schema)
    for line_no, stmt in _statements(text):
        stmt = _strip_period(stmt, line_no)
        atom = parse_atom(stmt, schema, line_no=line_no, allow_variables=False)
        fb.add(atom)
    return fb


def render_facts(fb: FactBase) -> str:
    return "".join(f"{render_atom(a)}.\n" for a in fb.facts())


_LABEL_PREFIXES = {
    "pos": Label.POSITIVE,
    "neg": Label.NEGATIVE,
    "unobserved": Label.UNOBSERVED,
}


def parse_examples(text: str, schema: Schema) -> list[LabeledExample]:
    """Examples file: `pos: atom.` / `neg: atom.` / `unobserved: atom.`"""
    out: list[LabeledExample] = []
    for line_no, stmt in _statements(text):
        if ":" not in stmt:
            raise ParseError("missing label prefix (pos/neg/unobserved)", line_no)
        prefix, rest = stmt.split(":", 1)
        label = _LABEL_PREFIXES.get(prefix.strip())
        if label is None:
            raise ParseError(f"unknown label prefix {prefix.strip()!r}", line_no)
        stmt = _strip_period(rest.strip(), line_no)
        atom = parse_atom(stmt, schema, line_no=line_no, allow_variables=False)
        out.append(LabeledExample(atom, label))
    return out


def render_examples(examples: Sequence[LabeledExample]) -> str:
    return "".join(
        f"{ex.label.value}: {render_atom(ex.atom)}.\n" for ex in examples
    )


def parse_modes(text: str, schema: Schema) -> list[ModeDeclaration]:
    """Modes file: `mode: venue(+pub, -venuestr).`"""
    out: list[ModeDeclaration] = []
    for line_no, stmt in _statements(text):
        if not stmt.startswith("mode:"):
            raise ParseError("expected 'mode:' prefix", line_no)
        stmt = _strip_period(stmt[len("mode:"):].strip(), line_no)
        m = _ATOM_RE.match(stmt)
        if not m:
            raise ParseError(f"cannot parse mode {stmt!r}", line_no)
        name, arg_body = m.group(1), m.group(2).strip()
        tokens = _split_args(arg_body, line_no) if arg_body else []
        markers: list[str] = []
        types: list[str] = []
        for token in tokens:
            if not token or token[0] not in (INPUT, OUTPUT, CONST):
                raise ParseError(f"mode argument {token!r} needs +/-/#", line_no)
            markers.append(token[0])
            try:
                types.append(resolve_type_tag(token[1:]))
            except SchemaError as exc:
                raise ParseError(str(exc), line_no) from exc
        try:
            sig = schema.resolve(name, len(tokens))
        except SchemaError as exc:
            raise ParseError(str(exc), line_no) from exc
        if tuple(types) != sig.arg_types:
            raise ParseError(
                f"mode types {tuple(types)} do not match {sig} declaration",
                line_no,
            )
        out.append(ModeDeclaration(sig, tuple(markers)))
    return out


_TAG_SHORT = {
    "publication-id": "pub",
    "author-id": "author",
    "name-string": "name",
    "affiliation-string": "affstr",
    "venue-string": "venuestr",
    "title-string": "titlestr",
}


def render_modes(modes: Sequence[ModeDeclaration]) -> str:
    lines = []
    for mode in modes:
        parts = ", ".join(
            f"{m}{_TAG_SHORT[t]}" for m, t in zip(mode.io, mode.predicate.arg_types)
        )
        lines.append(f"mode: {mode.predicate.name}({parts}).")
    return "\n".join(lines) + "\n"


def parse_clause_text(
    text: str, schema: Schema, *, line_no: int = 0
) -> tuple[Atom, tuple[Atom, ...]]:
    """Parse `head <= b1, b2` (no trailing period) into (head, body)."""
    if "<=" not in text:
        raise ParseError("clause needs '<='", line_no or None)
    head_text, body_text = text.split("<=", 1)
    head = parse_atom(head_text.strip(), schema, line_no=line_no)
    body_text = body_text.strip()
    if not body_text:
        return head, ()
    body = tuple(
        parse_atom(p, schema, line_no=line_no)
        for p in _split_top_level(body_text, line_no)
    )
    return head, body


def _split_top_level(text: str, line_no: int) -> list[str]:
    """Split on commas that are not inside parentheses."""
    parts: list[str] = []
    depth = 0
    current: list[str] = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced parentheses", line_no)
        if ch == "," and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    if depth != 0:
        raise ParseError("unbalanced parentheses", line_no)
    parts.append("".join(current).strip())
    if any(not p for p in parts):
        raise ParseError("empty literal in clause body", line_no)
    return parts


def render_clause_text(head: Atom, body: Sequence[Atom]) -> str:
    if not body:
        return f"{render_atom(head)} <= ."
    return f"{render_atom(head)} <= {', '.join(render_atom(a) for a in body)}."
