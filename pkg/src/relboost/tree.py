"""Relational regression trees and their decision-list form.

Inner nodes hold small existentially quantified conjunctions; bindings
accumulate down true branches and a false branch discards the failed node's
fresh bindings entirely. Converting a tree to a decision list and evaluating
the list yields exactly the same value as walking the tree.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import SchemaError
from .logic import (
    Atom,
    FactBase,
    HornClause,
    Mask,
    PredicateSignature,
    Substitution,
    Variable,
    compile_conjunction,
    mask_of,
    solutions,
)


@dataclass(frozen=True, slots=True)
class Leaf:
    value: float


@dataclass(frozen=True, slots=True)
class Inner:
    conjunction: tuple[Atom, ...]
    true_child: "TreeNode"
    false_child: "TreeNode"


TreeNode = Leaf | Inner


def head_variables(target: PredicateSignature) -> tuple[Variable, ...]:
    """Positional head variables A, B, C, ... for the target predicate."""
    names = string.ascii_uppercase
    if target.arity > len(names):
        raise SchemaError(f"target arity {target.arity} not supported")
    return tuple(Variable(names[i]) for i in range(target.arity))


def head_binding(target: PredicateSignature, example: Atom) -> Substitution:
    """Bind the positional head variables to a ground example's constants."""
    if example.predicate.key != target.key:
        raise SchemaError(
            f"example {example} does not match target {target}"
        )
    if not example.is_ground():
        raise SchemaError(f"example {example} is not ground")
    return {
        var.name: term.symbol  # type: ignore[union-attr]
        for var, term in zip(head_variables(target), example.args)
    }


@dataclass(frozen=True)
class RelationalRegressionTree:
    target: PredicateSignature
    root: TreeNode

    @property
    def depth(self) -> int:
        return _depth(self.root)

    def leaves(self) -> Iterator[Leaf]:
        yield from _leaves(self.root)


def _depth(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(_depth(node.true_child), _depth(node.false_child))


def _leaves(node: TreeNode) -> Iterator[Leaf]:
    if isinstance(node, Leaf):
        yield node
    else:
        yield from _leaves(node.true_child)
        yield from _leaves(node.false_child)


def _extend_frontier(
    conjunction: Sequence[Atom],
    frontier: list[Substitution],
    fb: FactBase,
    mask: Mask | None = None,
) -> list[Substitution]:
    """All distinct extensions of any frontier binding through `conjunction`."""
    compiled = compile_conjunction(conjunction)
    out: list[Substitution] = []
    seen: set[tuple[tuple[str, str], ...]] = set()
    for binding in frontier:
        for sol in solutions(compiled, 0, binding, fb, mask=mask):
            fp = tuple(sorted(sol.items()))
            if fp not in seen:
                seen.add(fp)
                out.append(sol)
    return out


def evaluate(tree: RelationalRegressionTree, example: Atom, fb: FactBase) -> float:
    """Value of the unique leaf the ground example reaches.

    The walk carries every satisfying binding of the true-branch path so far,
    so a node tests satisfiability of the whole accumulated conjunction; this
    is what makes the tree agree exactly with its decision-list form.

    The example's own ground atom is hidden from body literals: the fact
    being queried is never admissible evidence for itself, which keeps
    training-time behavior identical to prediction on unseen atoms.
    """
    mask = mask_of(example)
    frontier: list[Substitution] = [head_binding(tree.target, example)]
    node = tree.root
    while isinstance(node, Inner):
        extended = _extend_frontier(node.conjunction, frontier, fb, mask)
        if extended:
            frontier = extended
            node = node.true_child
        else:
            node = node.false_child
    return node.value


@dataclass(frozen=True)
class DecisionList:
    """Ordered clauses; the first clause whose body is satisfied fires."""

    target: PredicateSignature
    clauses: tuple[HornClause, ...]


def to_decision_list(tree: RelationalRegressionTree) -> DecisionList:
    """Flatten a tree into clauses in left-to-right (true-first) path order.

    A path's clause body is the concatenation of the conjunctions of the
    nodes it passed on the true branch; failed nodes contribute nothing.
    The final clause has an empty body, so exactly one clause fires for
    every example.
    """
    head = Atom(tree.target, head_variables(tree.target))
    clauses: list[HornClause] = []

    def walk(node: TreeNode, body: tuple[Atom, ...]) -> None:
        if isinstance(node, Leaf):
            clauses.append(HornClause(head, body, node.value))
            return
        walk(node.true_child, body + node.conjunction)
        walk(node.false_child, body)

    walk(tree.root, ())
    return DecisionList(tree.target, tuple(clauses))


def fired_clause_index(dl: DecisionList, example: Atom, fb: FactBase) -> int:
    """Index of the first clause whose body the example satisfies.

    Applies the same own-atom mask as tree evaluation.
    """
    mask = mask_of(example)
    binding = head_binding(dl.target, example)
    for i, clause in enumerate(dl.clauses):
        if not clause.body:
            return i
        compiled = compile_conjunction(clause.body)
        work = dict(binding)
        for _ in solutions(compiled, 0, work, fb, mask=mask):
            return i
    raise SchemaError("decision list has no default clause")  # pragma: no cover


def evaluate_list(dl: DecisionList, example: Atom, fb: FactBase) -> float:
    value = dl.clauses[fired_clause_index(dl, example, fb)].weight
    assert value is not None
    return value


def validate_tree(tree: RelationalRegressionTree) -> None:
    """Structural checks: non-empty conjunctions, finite leaf values."""

    def walk(node: TreeNode) -> None:
        if isinstance(node, Leaf):
            if not math.isfinite(node.value):
                raise SchemaError(f"non-finite leaf value {node.value!r}")
            return
        if not node.conjunction:
            raise SchemaError("inner node with empty conjunction")
        walk(node.true_child)
        walk(node.false_child)

    walk(tree.root)
