"""Boosted model container and its textual serialization format."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ConfigError, ParseError
from .induction import InductionParams
from .logic import Atom, FactBase, PredicateSignature, Schema
from .parsing import parse_atom, render_atom, _split_top_level
from .tree import Inner, Leaf, RelationalRegressionTree, TreeNode, evaluate

SIMPLIFIED_INDICATOR = "simplified-indicator"
SIGNED_COUNT = "signed-count"
ADVICE_MODES = (SIMPLIFIED_INDICATOR, SIGNED_COUNT)


@dataclass(frozen=True)
class TrainingConfig:
    n_trees: int = 20
    alpha: float = 0.5
    psi0: float = 0.0
    advice_mode: str = SIGNED_COUNT
    seed: int = 0
    tree: InductionParams = field(default_factory=InductionParams)

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise ConfigError("n_trees must be >= 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError("alpha must lie in [0, 1]")
        if not math.isfinite(self.psi0):
            raise ConfigError("psi0 must be finite")
        if self.advice_mode not in ADVICE_MODES:
            raise ConfigError(f"advice_mode must be one of {ADVICE_MODES}")


def sigmoid(z: float) -> float:
    """Numerically stable logistic function."""
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


@dataclass(frozen=True)
class BoostedModel:
    """Additive model: psi(x) = psi0 + sum of tree values."""

    target: PredicateSignature
    psi0: float
    trees: tuple[RelationalRegressionTree, ...]
    config: TrainingConfig
    mean_abs_gradients: tuple[float, ...] = ()

    def psi(self, example: Atom, fb: FactBase) -> float:
        total = self.psi0
        for tree in self.trees:
            total += evaluate(tree, example, fb)
        return total

    def probability(self, example: Atom, fb: FactBase) -> float:
        return sigmoid(self.psi(example, fb))


def predict(
    model: BoostedModel, examples: Sequence[Atom], fb: FactBase
) -> list[tuple[Atom, float]]:
    """Positive-class probability per example, input order preserved."""
    return [(atom, model.probability(atom, fb)) for atom in examples]


# --- serialization ---------------------------------------------------------

_MAGIC = "relational-boosted-model v1"


def render_model(model: BoostedModel) -> str:
    cfg = model.config
    lines = [
        _MAGIC,
        f"target: {model.target.name}/{model.target.arity}",
        f"psi0: {model.psi0!r}",
        f"n_trees: {len(model.trees)}",
        f"alpha: {cfg.alpha!r}",
        f"advice_mode: {cfg.advice_mode}",
        f"seed: {cfg.seed}",
        f"param: max_depth={cfg.tree.max_depth}",
        f"param: max_literals_per_node={cfg.tree.max_literals_per_node}",
        f"param: min_examples_per_leaf={cfg.tree.min_examples_per_leaf}",
        f"param: improvement_tolerance={cfg.tree.improvement_tolerance!r}",
        f"param: max_candidate_bindings={cfg.tree.max_candidate_bindings}",
        f"param: constant_top_n={cfg.tree.constant_top_n}",
    ]
    for k, tree in enumerate(model.trees):
        lines.append(f"tree {k}:")
        _render_node(tree.root, 0, lines)
    return "\n".join(lines) + "\n"


def _render_node(node: TreeNode, indent: int, lines: list[str]) -> None:
    pad = "  " * indent
    if isinstance(node, Leaf):
        lines.append(f"{pad}leaf: {node.value!r}")
        return
    conj = ", ".join(render_atom(a) for a in node.conjunction)
    lines.append(f"{pad}inner: {conj}")
    _render_node(node.true_child, indent + 1, lines)
    _render_node(node.false_child, indent + 1, lines)


def save_model(model: BoostedModel, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_model(model))


def parse_model(text: str, schema: Schema) -> BoostedModel:
    lines = text.splitlines()
    if not lines or lines[0].strip() != _MAGIC:
        raise ParseError("not a relational-boosted-model file", 1)

    header: dict[str, str] = {}
    params: dict[str, str] = {}
    i = 1
    while i < len(lines):
        line = lines[i].strip()
        if line.startswith("tree ") or not line:
            break
        if ":" not in line:
            raise ParseError(f"bad header line {line!r}", i + 1)
        key, value = line.split(":", 1)
        key, value = key.strip(), value.strip()
        if key == "param":
            if "=" not in value:
                raise ParseError(f"bad param line {line!r}", i + 1)
            pk, pv = value.split("=", 1)
            params[pk.strip()] = pv.strip()
        else:
            header[key] = value
        i += 1

    try:
        name, arity = header["target"].rsplit("/", 1)
        target = schema.resolve(name, int(arity))
        psi0 = float(header["psi0"])
        n_trees = int(header["n_trees"])
        config = TrainingConfig(
            n_trees=max(n_trees, 1),
            alpha=float(header["alpha"]),
            psi0=psi0,
            advice_mode=header["advice_mode"],
            seed=int(header["seed"]),
            tree=InductionParams(
                max_depth=int(params["max_depth"]),
                max_literals_per_node=int(params["max_literals_per_node"]),
                min_examples_per_leaf=int(params["min_examples_per_leaf"]),
                improvement_tolerance=float(params["improvement_tolerance"]),
                max_candidate_bindings=int(params["max_candidate_bindings"]),
                constant_top_n=int(params["constant_top_n"]),
            ),
        )
    except (KeyError, ValueError) as exc:
        raise ParseError(f"incomplete model header: {exc}") from exc

    trees: list[RelationalRegressionTree] = []
    while i < len(lines):
        line = lines[i].strip()
        if not line:
            i += 1
            continue
        if not line.startswith("tree ") or not line.endswith(":"):
            raise ParseError(f"expected 'tree k:', got {line!r}", i + 1)
        node, i = _parse_node(lines, i + 1, 0, schema)
        trees.append(RelationalRegressionTree(target, node))
    if len(trees) != n_trees:
        raise ParseError(f"header promises {n_trees} trees, found {len(trees)}")
    return BoostedModel(target, psi0, tuple(trees), config)


def _parse_node(
    lines: list[str], i: int, indent: int, schema: Schema
) -> tuple[TreeNode, int]:
    if i >= len(lines):
        raise ParseError("unexpected end of model file", i)
    raw = lines[i]
    pad = "  " * indent
    if not raw.startswith(pad) or raw[len(pad):].startswith(" "):
        raise ParseError(f"bad indentation in model file: {raw!r}", i + 1)
    body = raw[len(pad):]
    if body.startswith("leaf:"):
        try:
            return Leaf(float(body[len("leaf:"):].strip())), i + 1
        except ValueError as exc:
            raise ParseError(f"bad leaf value {body!r}", i + 1) from exc
    if body.startswith("inner:"):
        conj_text = body[len("inner:"):].strip()
        atoms = tuple(
            parse_atom(part, schema, line_no=i + 1)
            for part in _split_top_level(conj_text, i + 1)
        )
        true_child, j = _parse_node(lines, i + 1, indent + 1, schema)
        false_child, j = _parse_node(lines, j, indent + 1, schema)
        return Inner(atoms, true_child, false_child), j
    raise ParseError(f"expected 'leaf:' or 'inner:', got {body!r}", i + 1)


def load_model(path: str, schema: Schema) -> BoostedModel:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read(), schema)
