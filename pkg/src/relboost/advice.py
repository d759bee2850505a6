"""Human advice: preference-labeled Horn rules over the target predicate.

A rule is satisfied by an example when its body is existentially satisfiable
under the head binding, with one carve-out: a body literal of the target
predicate whose first argument is a different variable from the head's may
not bind that variable to the example's own publication. Without that
exclusion every known-positive example would satisfy rules like
`pub(A, B) <= aut(A, Q), aut(R, Q), pub(R, B)` through itself, and coverage
numbers would be meaningless.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterator, Sequence

from .domain import authorship_schema, authorship_target
from .errors import ParseError
from .logic import (
    Atom,
    FactBase,
    Label,
    LabeledExample,
    Schema,
    Variable,
    satisfy,
)
from .parsing import (
    _statements,
    _strip_period,
    parse_clause_text,
    render_clause_text,
)
from .tree import head_binding


@dataclass(frozen=True)
class AdviceConstraint:
    """A Horn clause pattern: target head over variables, plus a body."""

    head: Atom
    body: tuple[Atom, ...]


@dataclass(frozen=True)
class AdviceRule:
    constraint: AdviceConstraint
    preferred: Label  # POSITIVE for advice(+), NEGATIVE for advice(-)
    name: str = ""


@dataclass(frozen=True)
class AdviceSet:
    rules: tuple[AdviceRule, ...] = ()

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self) -> Iterator[AdviceRule]:
        return iter(self.rules)

    def __bool__(self) -> bool:
        return bool(self.rules)


def _forbid_map(rule: AdviceRule, example: Atom) -> dict[str, frozenset[str]]:
    """Forbidden bindings implementing the self-match exclusion."""
    head = rule.constraint.head
    target_key = head.predicate.key
    head_first = head.args[0]
    own = example.args[0].symbol  # type: ignore[union-attr]
    forbid: dict[str, frozenset[str]] = {}
    for atom in rule.constraint.body:
        if atom.predicate.key != target_key:
            continue
        first = atom.args[0]
        if isinstance(first, Variable) and (
            not isinstance(head_first, Variable) or first.name != head_first.name
        ):
            forbid[first.name] = forbid.get(first.name, frozenset()) | {own}
    return forbid


def satisfied(rule: AdviceRule, example: Atom, fb: FactBase) -> bool:
    """Does the example satisfy the rule's body (self-matches excluded)?"""
    binding = head_binding(rule.constraint.head.predicate, example)
    ok, _ = satisfy(
        rule.constraint.body, binding, fb, forbid=_forbid_map(rule, example)
    )
    return ok


def count(advice: AdviceSet, example: Atom, fb: FactBase) -> tuple[int, int]:
    """(satisfied positive-preference rules, satisfied negative-preference)."""
    n_true = n_false = 0
    for rule in advice:
        if satisfied(rule, example, fb):
            if rule.preferred == Label.POSITIVE:
                n_true += 1
            else:
                n_false += 1
    return n_true, n_false


@dataclass(frozen=True)
class RuleCoverage:
    rule: AdviceRule
    positive_pct: float
    negative_pct: float
    non_discriminative: bool


def coverage_report(
    advice: AdviceSet, examples: Sequence[LabeledExample], fb: FactBase
) -> list[RuleCoverage]:
    """Per-rule coverage of positive and negative examples, as percentages.

    A rule is flagged non-discriminative when it covers at least as large a
    share of the negatives as of the positives (and covers something).
    """
    positives = [ex.atom for ex in examples if ex.label == Label.POSITIVE]
    negatives = [ex.atom for ex in examples if ex.label == Label.NEGATIVE]
    report = []
    for rule in advice:
        n_pos = sum(1 for atom in positives if satisfied(rule, atom, fb))
        n_neg = sum(1 for atom in negatives if satisfied(rule, atom, fb))
        pos_pct = 100.0 * n_pos / len(positives) if positives else 0.0
        neg_pct = 100.0 * n_neg / len(negatives) if negatives else 0.0
        report.append(
            RuleCoverage(
                rule,
                pos_pct,
                neg_pct,
                non_discriminative=pos_pct > 0 and neg_pct >= pos_pct,
            )
        )
    return report


_PREFIXES = {"advice(+):": Label.POSITIVE, "advice(-):": Label.NEGATIVE}


def parse_advice(text: str, schema: Schema) -> AdviceSet:
    """Advice file: `advice(+): pub(A, B) <= aut(A, Q), aut(R, Q), pub(R, B).`"""
    rules: list[AdviceRule] = []
    for line_no, stmt in _statements(text):
        label = None
        for prefix, lab in _PREFIXES.items():
            if stmt.startswith(prefix):
                label = lab
                stmt = stmt[len(prefix):].strip()
                break
        if label is None:
            raise ParseError("expected 'advice(+):' or 'advice(-):'", line_no)
        stmt = _strip_period(stmt, line_no)
        head, body = parse_clause_text(stmt, schema, line_no=line_no)
        head_vars = {v.name for v in head.variables()}
        body_vars = {v.name for a in body for v in a.variables()}
        missing = head_vars - body_vars
        if missing:
            warnings.warn(
                f"advice head variable(s) {sorted(missing)} never used in body",
                stacklevel=2,
            )
        rules.append(
            AdviceRule(AdviceConstraint(head, body), label, name=f"rule_{len(rules) + 1}")
        )
    return AdviceSet(tuple(rules))


def render_advice(advice: AdviceSet) -> str:
    lines = []
    for rule in advice:
        prefix = "advice(+):" if rule.preferred == Label.POSITIVE else "advice(-):"
        lines.append(
            f"{prefix} {render_clause_text(rule.constraint.head, rule.constraint.body)}"
        )
    return "\n".join(lines) + "\n"


def default_advice() -> AdviceSet:
    """The eight built-in authorship rules.

    Two publications likely share a first author when they share the author
    name, affiliation or venue, or when they are linked by citations (direct,
    reverse, co-citation, citer-of-citer, or a two-hop citation chain).
    """
    schema = authorship_schema()
    target = authorship_target(schema)
    pub = target
    aut = schema.resolve("author_name", 2)
    aff = schema.resolve("affiliation", 2)
    ven = schema.resolve("venue", 2)
    ref = schema.resolve("reference", 2)

    def v(*names: str) -> tuple[Variable, ...]:
        return tuple(Variable(n) for n in names)

    head = Atom(pub, v("A", "B"))

    def rule(name: str, *body: Atom) -> AdviceRule:
        return AdviceRule(AdviceConstraint(head, tuple(body)), Label.POSITIVE, name)

    A, B = v("A", "B")
    bodies = [
        (
            "same_author_name",
            Atom(aut, (A, Variable("Q"))),
            Atom(aut, (Variable("R"), Variable("Q"))),
            Atom(pub, (Variable("R"), B)),
        ),
        (
            "same_affiliation",
            Atom(aff, (A, Variable("E"))),
            Atom(aff, (Variable("F"), Variable("E"))),
            Atom(pub, (Variable("F"), B)),
        ),
        (
            "same_venue",
            Atom(ven, (A, Variable("C"))),
            Atom(ven, (Variable("D"), Variable("C"))),
            Atom(pub, (Variable("D"), B)),
        ),
        (
            "cites_pub_of_author",
            Atom(ref, (A, Variable("G"))),
            Atom(pub, (Variable("G"), B)),
        ),
        (
            "cited_by_pub_of_author",
            Atom(ref, (Variable("H"), A)),
            Atom(pub, (Variable("H"), B)),
        ),
        (
            "co_cited_with_pub_of_author",
            Atom(ref, (A, Variable("I"))),
            Atom(ref, (Variable("J"), Variable("I"))),
            Atom(pub, (Variable("J"), B)),
        ),
        (
            "citer_cited_by_pub_of_author",
            Atom(ref, (Variable("K"), A)),
            Atom(ref, (Variable("L"), Variable("K"))),
            Atom(pub, (Variable("L"), B)),
        ),
        (
            "two_hop_reference_to_pub_of_author",
            Atom(ref, (A, Variable("M"))),
            Atom(ref, (Variable("M"), Variable("N"))),
            Atom(pub, (Variable("N"), B)),
        ),
    ]
    return AdviceSet(tuple(rule(name, *body) for name, *body in bodies))
