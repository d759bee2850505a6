"""Greedy top-down induction of relational regression trees.

Trees are grown on per-example regression targets (the boosting gradients).
Candidate node conjunctions are generated from mode declarations; the best
candidate by squared-error reduction wins, ties going to the earliest
generated candidate, so induction is fully deterministic for a fixed example
order, fact order and parameter set.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, SchemaError, TrainingError
from .logic import (
    Atom,
    Constant,
    FactBase,
    Mask,
    PredicateSignature,
    Schema,
    Substitution,
    Term,
    Variable,
    compile_conjunction,
    holds,
    mask_of,
    solutions,
)
from .tree import (
    Inner,
    Leaf,
    RelationalRegressionTree,
    TreeNode,
    head_binding,
    head_variables,
)

INPUT, OUTPUT, CONST = "+", "-", "#"


@dataclass(frozen=True, slots=True)
class ModeDeclaration:
    """Language bias for one predicate: '+' input, '-' output, '#' constant."""

    predicate: PredicateSignature
    io: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.io) != self.predicate.arity:
            raise SchemaError(f"mode arity mismatch for {self.predicate}")
        for marker in self.io:
            if marker not in (INPUT, OUTPUT, CONST):
                raise SchemaError(f"bad mode marker {marker!r}")

    def __str__(self) -> str:
        parts = ", ".join(
            f"{m}{t}" for m, t in zip(self.io, self.predicate.arg_types)
        )
        return f"{self.predicate.name}({parts})"


def default_modes(
    schema: Schema, target: PredicateSignature
) -> list[ModeDeclaration]:
    """One output-position mode per argument of each predicate; the target
    predicate gets a single all-input mode so learned bodies can consult
    known target facts without inventing unlinked ones."""
    modes: list[ModeDeclaration] = []
    for sig in schema.signatures:
        if sig.key == target.key:
            modes.append(ModeDeclaration(sig, (INPUT,) * sig.arity))
            continue
        for pos in range(sig.arity):
            io = tuple(OUTPUT if p == pos else INPUT for p in range(sig.arity))
            modes.append(ModeDeclaration(sig, io))
    return modes


@dataclass(frozen=True)
class InductionParams:
    max_depth: int = 3
    max_literals_per_node: int = 2
    min_examples_per_leaf: int = 8
    improvement_tolerance: float = 1e-6
    max_candidate_bindings: int = 1000
    constant_top_n: int = 50

    def __post_init__(self) -> None:
        if self.max_depth < 0:
            raise ConfigError("max_depth must be >= 0")
        if self.max_literals_per_node < 1:
            raise ConfigError("max_literals_per_node must be >= 1")
        if self.min_examples_per_leaf < 1:
            raise ConfigError("min_examples_per_leaf must be >= 1")
        if self.max_candidate_bindings < 1:
            raise ConfigError("max_candidate_bindings must be >= 1")


# Placeholder names for output variables while candidates are being scored;
# winners are renamed to path-scoped upper-case letters before insertion.
def _placeholder(i: int) -> str:
    return f"_O{i}"


@dataclass
class Candidate:
    atoms: tuple[Atom, ...]
    # placeholder output variables in order of introduction, with their types
    outputs: tuple[tuple[str, str], ...]
    parent: int | None = None  # index of the length-(n-1) prefix candidate


def _literal_instances(
    mode: ModeDeclaration,
    by_type: dict[str, list[str]],
    fb: FactBase,
    params: InductionParams,
    next_placeholder: int,
    require_vars: frozenset[str] | None,
) -> list[tuple[Atom, tuple[tuple[str, str], ...]]]:
    """All instantiations of one mode against the given bound variables.

    Returns (atom, new outputs) pairs. When `require_vars` is given, at least
    one input slot must consume one of those variables (used for chaining
    later literals to earlier outputs within a node conjunction).
    """
    slot_choices: list[list[Term]] = []
    for marker, type_tag in zip(mode.io, mode.predicate.arg_types):
        if marker == INPUT:
            names = by_type.get(type_tag)
            if not names:
                return []
            slot_choices.append([Variable(n) for n in names])
        elif marker == CONST:
            pos = len(slot_choices)
            syms = fb.frequent_constants(
                mode.predicate.key, pos, params.constant_top_n
            )
            if not syms:
                return []
            slot_choices.append([Constant(s) for s in syms])
        else:
            slot_choices.append([])  # filled with a fresh placeholder below

    out: list[tuple[Atom, tuple[tuple[str, str], ...]]] = []

    def build(pos: int, args: list[Term], outputs: list[tuple[str, str]]) -> None:
        if pos == len(mode.io):
            atom_args = tuple(args)
            if require_vars is not None and not any(
                isinstance(a, Variable) and a.name in require_vars
                for a in atom_args
            ):
                return
            out.append((Atom(mode.predicate, atom_args), tuple(outputs)))
            return
        if mode.io[pos] == OUTPUT:
            name = _placeholder(next_placeholder + len(outputs))
            build(
                pos + 1,
                args + [Variable(name)],
                outputs + [(name, mode.predicate.arg_types[pos])],
            )
        else:
            for term in slot_choices[pos]:
                build(pos + 1, args + [term], outputs)

    build(0, [], [])
    return out


def generate_candidates(
    bound: Sequence[tuple[str, str]],
    modes: Sequence[ModeDeclaration],
    fb: FactBase,
    params: InductionParams,
    head: Atom,
) -> list[Candidate]:
    """Candidate node conjunctions in deterministic generation order.

    Singles come first in mode-declaration order; longer conjunctions extend
    shorter ones with literals chained through their output variables. The
    literal that is syntactically the head atom itself is skipped.
    """
    by_type: dict[str, list[str]] = {}
    for name, type_tag in bound:
        by_type.setdefault(type_tag, []).append(name)

    head_key = (head.predicate.key, tuple(str(a) for a in head.args))

    def is_head(atom: Atom) -> bool:
        return (atom.predicate.key, tuple(str(a) for a in atom.args)) == head_key

    candidates: list[Candidate] = []
    seen: set[tuple] = set()

    def push(cand: Candidate) -> None:
        fp = tuple((a.predicate.key, tuple(str(t) for t in a.args)) for a in cand.atoms)
        if fp not in seen:
            seen.add(fp)
            candidates.append(cand)

    for mode in modes:
        for atom, outputs in _literal_instances(mode, by_type, fb, params, 0, None):
            if is_head(atom):
                continue
            push(Candidate((atom,), outputs))

    tier = list(range(len(candidates)))
    for _ in range(2, params.max_literals_per_node + 1):
        next_tier: list[int] = []
        for ci in tier:
            cand = candidates[ci]
            if not cand.outputs:
                continue
            ext_types = {k: list(v) for k, v in by_type.items()}
            for name, type_tag in cand.outputs:
                ext_types.setdefault(type_tag, []).append(name)
            chain_vars = frozenset(name for name, _ in cand.outputs)
            for mode in modes:
                for atom, outputs in _literal_instances(
                    mode,
                    ext_types,
                    fb,
                    params,
                    len(cand.outputs),
                    chain_vars,
                ):
                    if is_head(atom) or atom in cand.atoms:
                        continue
                    before = len(candidates)
                    push(
                        Candidate(
                            cand.atoms + (atom,),
                            cand.outputs + outputs,
                            parent=ci,
                        )
                    )
                    if len(candidates) > before:
                        next_tier.append(len(candidates) - 1)
        tier = next_tier

    return candidates


def _rename_candidate(
    cand: Candidate, n_bound: int
) -> tuple[tuple[Atom, ...], list[tuple[str, str]]]:
    """Replace placeholder outputs with path-scoped letters (C, D, ...)."""
    letters = string.ascii_uppercase
    mapping: dict[str, str] = {}
    renamed_outputs: list[tuple[str, str]] = []
    for j, (name, type_tag) in enumerate(cand.outputs):
        idx = n_bound + j
        fresh = letters[idx] if idx < len(letters) else f"V{idx}"
        mapping[name] = fresh
        renamed_outputs.append((fresh, type_tag))

    def rename(atom: Atom) -> Atom:
        args = tuple(
            Variable(mapping.get(t.name, t.name)) if isinstance(t, Variable) else t
            for t in atom.args
        )
        return Atom(atom.predicate, args)

    return tuple(rename(a) for a in cand.atoms), renamed_outputs


def split_score(
    gradients: np.ndarray, mask: np.ndarray, min_leaf: int
) -> float | None:
    """Squared-error reduction of splitting `gradients` by `mask`.

    Returns None when either side would fall below the leaf minimum.
    """
    n_true = int(mask.sum())
    n_false = len(gradients) - n_true
    if n_true < min_leaf or n_false < min_leaf:
        return None
    total = _sse(gradients)
    return total - _sse(gradients[mask]) - _sse(gradients[~mask])


def _sse(values: np.ndarray) -> float:
    if len(values) == 0:
        return 0.0
    s = values.sum()
    return float((values * values).sum() - (s * s) / len(values))


def _candidate_mask(
    cand_compiled,
    frontiers: list[list[Substitution]],
    ex_masks: list[Mask],
    fb: FactBase,
    restrict: np.ndarray | None,
) -> np.ndarray:
    mask = np.zeros(len(frontiers), dtype=bool)
    indices = np.nonzero(restrict)[0] if restrict is not None else range(len(frontiers))
    for i in indices:
        for binding in frontiers[i]:
            if holds(cand_compiled, 0, binding, fb, mask=ex_masks[i]):
                mask[i] = True
                break
    return mask


def induce(
    examples: Sequence[tuple[Atom, float]],
    fb: FactBase,
    modes: Sequence[ModeDeclaration],
    params: InductionParams | None = None,
) -> RelationalRegressionTree:
    """Fit one relational regression tree to (ground atom, gradient) pairs."""
    if not examples:
        raise TrainingError("cannot induce a tree from zero examples")
    params = params or InductionParams()
    target = examples[0][0].predicate
    for atom, _ in examples:
        if atom.predicate.key != target.key:
            raise TrainingError(f"mixed target predicates: {atom}")

    head = Atom(target, head_variables(target))
    bound0 = [
        (var.name, type_tag)
        for var, type_tag in zip(head_variables(target), target.arg_types)
    ]
    gradients = np.array([g for _, g in examples], dtype=np.float64)
    frontiers0 = [[head_binding(target, atom)] for atom, _ in examples]
    # each example's own ground atom is invisible while growing its branch
    ex_masks0 = [mask_of(atom) for atom, _ in examples]

    root = _grow(
        gradients,
        frontiers0,
        ex_masks0,
        list(bound0),
        0,
        modes,
        fb,
        params,
        head,
        at_root=True,
    )
    return RelationalRegressionTree(target, root)


def _grow(
    gradients: np.ndarray,
    frontiers: list[list[Substitution]],
    ex_masks: list[Mask],
    bound: list[tuple[str, str]],
    depth: int,
    modes: Sequence[ModeDeclaration],
    fb: FactBase,
    params: InductionParams,
    head: Atom,
    at_root: bool = False,
) -> TreeNode:
    n = len(frontiers)
    leaf_value = float(gradients.mean())
    if depth >= params.max_depth or n < 2 * params.min_examples_per_leaf:
        if at_root and not generate_candidates(bound, modes, fb, params, head):
            raise TrainingError("no candidate literals at root (check modes)")
        return Leaf(leaf_value)

    candidates = generate_candidates(bound, modes, fb, params, head)
    if not candidates:
        if at_root:
            raise TrainingError("no candidate literals at root (check modes)")
        return Leaf(leaf_value)

    masks: list[np.ndarray | None] = [None] * len(candidates)
    best_idx = -1
    best_score = params.improvement_tolerance
    for ci, cand in enumerate(candidates):
        restrict = masks[cand.parent] if cand.parent is not None else None
        compiled = compile_conjunction(cand.atoms)
        mask = _candidate_mask(compiled, frontiers, ex_masks, fb, restrict)
        masks[ci] = mask
        score = split_score(gradients, mask, params.min_examples_per_leaf)
        if score is not None and score > best_score:
            best_score = score
            best_idx = ci

    if best_idx < 0:
        return Leaf(leaf_value)

    winner = candidates[best_idx]
    conjunction, new_bound = _rename_candidate(winner, len(bound))
    mask = masks[best_idx]
    assert mask is not None

    compiled = compile_conjunction(conjunction)
    true_frontiers: list[list[Substitution]] = []
    for i in np.nonzero(mask)[0]:
        extensions: list[Substitution] = []
        seen: set[tuple[tuple[str, str], ...]] = set()
        for binding in frontiers[i]:
            for sol in solutions(compiled, 0, binding, fb, mask=ex_masks[i]):
                fp = tuple(sorted(sol.items()))
                if fp not in seen:
                    seen.add(fp)
                    extensions.append(sol)
                if len(extensions) >= params.max_candidate_bindings:
                    break
            if len(extensions) >= params.max_candidate_bindings:
                break
        true_frontiers.append(extensions)
    false_frontiers = [frontiers[i] for i in np.nonzero(~mask)[0]]
    true_ex_masks = [ex_masks[i] for i in np.nonzero(mask)[0]]
    false_ex_masks = [ex_masks[i] for i in np.nonzero(~mask)[0]]

    true_child = _grow(
        gradients[mask],
        true_frontiers,
        true_ex_masks,
        bound + new_bound,
        depth + 1,
        modes,
        fb,
        params,
        head,
    )
    false_child = _grow(
        gradients[~mask],
        false_frontiers,
        false_ex_masks,
        list(bound),
        depth + 1,
        modes,
        fb,
        params,
        head,
    )
    return Inner(conjunction, true_child, false_child)
