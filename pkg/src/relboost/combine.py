"""Collapse a boosted model into one decision list with provenance.

Every tree in a boosted model fires exactly one decision-list clause per
example, so each example selects a tuple of (tree, clause) indices. Each
tuple observed on the fitting examples becomes one combined clause: its
body is the union of the source clause bodies (variables standardized
apart, shared head variables kept), its value the sum of the source clause
values. Tuples no example fires are dropped, which keeps the combined list
linear in the data instead of exponential in the number of trees.
"""

from __future__ import annotations

from dataclasses import dataclass
from string import ascii_uppercase
from typing import Sequence

from .errors import DataError
from .logic import (
    Atom,
    FactBase,
    Label,
    LabeledExample,
    PredicateSignature,
    Variable,
)
from .model import BoostedModel
from .parsing import render_clause_text
from .tree import (
    DecisionList,
    fired_clause_index,
    head_variables,
    to_decision_list,
)


def _fresh_name(idx: int) -> str:
    return ascii_uppercase[idx] if idx < len(ascii_uppercase) else f"V{idx}"


@dataclass(frozen=True)
class CombinedClause:
    body: tuple[Atom, ...]
    value: float
    sources: tuple[tuple[int, int], ...]
    positive_coverage: float
    negative_coverage: float

    @property
    def length(self) -> int:
        return len(self.body)


@dataclass(frozen=True)
class CombinedModel:
    target: PredicateSignature
    psi0: float
    clauses: tuple[CombinedClause, ...]
    lists: tuple[DecisionList, ...]
    n_positive: int
    n_negative: int

    def __len__(self) -> int:
        return len(self.clauses)


def _standardize_bodies(
    target, bodies: Sequence[Sequence[Atom]]
) -> tuple[Atom, ...]:
    """Union of bodies with per-tree fresh variables, head letters shared."""
    head_names = {v.name for v in head_variables(target)}
    counter = len(head_names)
    merged: list[Atom] = []
    seen: set[str] = set()
    for body in bodies:
        local: dict[str, str] = {}
        for atom in body:
            args = []
            for term in atom.args:
                if isinstance(term, Variable) and term.name not in head_names:
                    if term.name not in local:
                        local[term.name] = _fresh_name(counter)
                        counter += 1
                    args.append(Variable(local[term.name]))
                else:
                    args.append(term)
            renamed = Atom(atom.predicate, tuple(args))
            key = str(renamed)
            if key not in seen:
                seen.add(key)
                merged.append(renamed)
    return tuple(merged)


def combine(
    model: BoostedModel,
    fb: FactBase,
    examples: Sequence[LabeledExample],
) -> CombinedModel:
    """Build the combined decision list from the clauses these examples fire.

    Coverage fractions are within-class (share of positives / negatives
    firing the clause); unobserved examples keep a clause alive but do not
    enter either fraction.
    """
    if not model.trees:
        raise DataError("cannot combine a model with no trees")
    if not examples:
        raise DataError("combining needs at least one example")
    lists = tuple(to_decision_list(tree) for tree in model.trees)

    fired: dict[tuple[int, ...], list[Label]] = {}
    for ex in examples:
        key = tuple(fired_clause_index(dl, ex.atom, fb) for dl in lists)
        fired.setdefault(key, []).append(ex.label)

    n_pos = sum(1 for ex in examples if ex.label == Label.POSITIVE)
    n_neg = sum(1 for ex in examples if ex.label == Label.NEGATIVE)

    clauses = []
    for key in sorted(fired):
        labels = fired[key]
        value = sum(lists[t].clauses[c].weight for t, c in enumerate(key))
        body = _standardize_bodies(
            model.target, [lists[t].clauses[c].body for t, c in enumerate(key)]
        )
        pos_hits = sum(1 for lab in labels if lab == Label.POSITIVE)
        neg_hits = sum(1 for lab in labels if lab == Label.NEGATIVE)
        clauses.append(
            CombinedClause(
                body=body,
                value=float(value),
                sources=tuple(enumerate(key)),
                positive_coverage=pos_hits / n_pos if n_pos else 0.0,
                negative_coverage=neg_hits / n_neg if n_neg else 0.0,
            )
        )
    return CombinedModel(
        target=model.target,
        psi0=model.psi0,
        clauses=tuple(clauses),
        lists=lists,
        n_positive=n_pos,
        n_negative=n_neg,
    )


def fired_combined_clause(
    combined: CombinedModel, example: Atom, fb: FactBase
) -> CombinedClause | None:
    """The combined clause this example fires, or None for an unseen tuple."""
    key = tuple(
        fired_clause_index(dl, example, fb) for dl in combined.lists
    )
    for clause in combined.clauses:
        if tuple(c for _, c in clause.sources) == key:
            return clause
    return None


def evaluate_combined(
    combined: CombinedModel, example: Atom, fb: FactBase
) -> float:
    """Model score: psi0 plus the value of the fired clause.

    Computed by firing each source decision list, so it stays defined for
    examples whose tuple never appeared while combining; on fitted examples
    it equals psi0 plus the stored clause value exactly.
    """
    key = tuple(
        fired_clause_index(dl, example, fb) for dl in combined.lists
    )
    total = sum(combined.lists[t].clauses[c].weight for t, c in enumerate(key))
    return combined.psi0 + float(total)


def clause_stats(combined: CombinedModel) -> tuple[int, float, int]:
    """(clause count, mean body length, max body length)."""
    if not combined.clauses:
        return 0, 0.0, 0
    lengths = [c.length for c in combined.clauses]
    return len(lengths), sum(lengths) / len(lengths), max(lengths)


def top_clauses(
    combined: CombinedModel, k: int, max_neg_to_pos: float = 1.0
) -> list[CombinedClause]:
    """Highest-value clauses after dropping empty bodies and clauses whose
    negative coverage exceeds `max_neg_to_pos` times their positive one."""
    kept = [
        c
        for c in combined.clauses
        if c.body and c.negative_coverage <= max_neg_to_pos * c.positive_coverage
    ]
    kept.sort(key=lambda c: -c.value)
    return kept[:k]


def render_combined(combined: CombinedModel) -> str:
    """Deterministic clausal text for a combined model.

    One clause per line: value, clause, then a comment with within-class
    coverage percentages and the (tree, clause) provenance indices.
    """
    head = Atom(combined.target, head_variables(combined.target))
    count, avg_len, max_len = clause_stats(combined)
    lines = [
        f"% combined decision list: {len(combined.lists)} trees, "
        f"{count} clauses (avg length {avg_len:.2f}, max {max_len})",
        f"% psi0: {combined.psi0!r}",
        f"% fitted on {combined.n_positive} positive / "
        f"{combined.n_negative} negative examples",
    ]
    for clause in combined.clauses:
        srcs = ",".join(f"{t}:{c}" for t, c in clause.sources)
        lines.append(
            f"{clause.value!r} {render_clause_text(head, clause.body)}"
            f" % pos={100.0 * clause.positive_coverage:.2f}%"
            f" neg={100.0 * clause.negative_coverage:.2f}%"
            f" sources={srcs}"
        )
    return "\n".join(lines) + "\n"
