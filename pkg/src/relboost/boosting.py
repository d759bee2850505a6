"""Functional gradient boosting over relational regression trees.

Each round fits a tree to the pointwise gradient of the binary logistic
log-likelihood, optionally blended with an advice term: with weight alpha on
the data and (1 - alpha) on the advice, labeled examples contribute
alpha * (I[positive] - P) and the advice contributes a signed satisfied-rule
count (or, in the simplified mode, an any-rule-satisfied indicator).
Unobserved labels drop the data term and keep the advice term.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .advice import AdviceSet, count as advice_count, satisfied
from .errors import ConfigError, DataError, TrainingError
from .induction import InductionParams, ModeDeclaration, default_modes, induce
from .logic import Atom, FactBase, Label, LabeledExample
from .model import (
    ADVICE_MODES,
    SIGNED_COUNT,
    SIMPLIFIED_INDICATOR,
    BoostedModel,
    TrainingConfig,
    predict,
    sigmoid,
)
from .tree import evaluate
from .validation import as_label, check_examples


def probability(model: BoostedModel, example: Atom, fb: FactBase) -> float:
    """P(positive | example) = logistic(psi(example))."""
    return model.probability(example, fb)


def data_gradient(example: LabeledExample, model: BoostedModel, fb: FactBase) -> float:
    """I[label is positive] - P(positive); undefined for unobserved labels."""
    if example.label == Label.UNOBSERVED:
        raise DataError(
            f"data gradient undefined for unobserved label on {example.atom}"
        )
    indicator = 1.0 if example.label == Label.POSITIVE else 0.0
    return indicator - model.probability(example.atom, fb)


def _advice_term(
    example: Atom, fb: FactBase, advice: AdviceSet, advice_mode: str
) -> float:
    if advice_mode == SIMPLIFIED_INDICATOR:
        return 1.0 if any(satisfied(rule, example, fb) for rule in advice) else 0.0
    n_true, n_false = advice_count(advice, example, fb)
    return float(n_true - n_false)


def advice_gradient(
    example: LabeledExample,
    model: BoostedModel,
    fb: FactBase,
    advice: AdviceSet,
    alpha: float,
    advice_mode: str = SIGNED_COUNT,
) -> float:
    """Blend of the data gradient and the advice term.

    alpha = 1 reproduces the pure data gradient exactly; for unobserved
    labels only the advice term remains.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError("alpha must lie in [0, 1]")
    if advice_mode not in ADVICE_MODES:
        raise ConfigError(f"advice_mode must be one of {ADVICE_MODES}")
    if example.label == Label.UNOBSERVED:
        data_term = 0.0
    else:
        data_term = data_gradient(example, model, fb)
    if alpha == 1.0:
        return data_term
    return alpha * data_term + (1.0 - alpha) * _advice_term(
        example.atom, fb, advice, advice_mode
    )


def _training_pool(
    examples: Sequence[LabeledExample], advice: AdviceSet | None, alpha: float
) -> list[LabeledExample]:
    """Unobserved examples only train when an advice term can reach them."""
    if advice and alpha < 1.0:
        return list(examples)
    return [ex for ex in examples if ex.label != Label.UNOBSERVED]


def train(
    examples: Sequence[LabeledExample],
    fb: FactBase,
    modes: Sequence[ModeDeclaration],
    advice: AdviceSet | None,
    config: TrainingConfig | None = None,
) -> BoostedModel:
    """Boost `config.n_trees` relational regression trees.

    Deterministic for fixed example order, fact order and config; the same
    call twice yields an identical serialized model.
    """
    config = config or TrainingConfig()
    pool = _training_pool(examples, advice, config.alpha)
    if not pool:
        raise TrainingError("no trainable examples")
    target = pool[0].atom.predicate

    use_advice = bool(advice) and config.alpha < 1.0
    atoms = [ex.atom for ex in pool]
    labeled = np.array([ex.label != Label.UNOBSERVED for ex in pool])
    y = np.array(
        [1.0 if ex.label == Label.POSITIVE else 0.0 for ex in pool]
    )
    if use_advice:
        assert advice is not None
        advice_term = np.array(
            [_advice_term(a, fb, advice, config.advice_mode) for a in atoms]
        )

    psi = np.full(len(pool), config.psi0, dtype=np.float64)
    trees = []
    history = []
    for _ in range(config.n_trees):
        p = 1.0 / (1.0 + np.exp(-psi))
        data_term = np.where(labeled, y - p, 0.0)
        if use_advice:
            gradients = config.alpha * data_term + (1.0 - config.alpha) * advice_term
        else:
            gradients = data_term
        history.append(float(np.abs(gradients).mean()))
        tree = induce(list(zip(atoms, gradients)), fb, modes, config.tree)
        trees.append(tree)
        for i, atom in enumerate(atoms):
            psi[i] += evaluate(tree, atom, fb)

    return BoostedModel(
        target=target,
        psi0=config.psi0,
        trees=tuple(trees),
        config=config,
        mean_abs_gradients=tuple(history),
    )


class BoostedRelationalClassifier(ClassifierMixin, BaseEstimator):
    """Scikit-learn style front end for the boosted relational model.

    X is a sequence of ground target atoms (or LabeledExample objects) and y
    the matching labels (1/0/None, "pos"/"neg"/"unobserved", or Label). The
    fact base provides the relational context and is passed to fit; predict
    reuses it unless another one is supplied.

    >>> clf = BoostedRelationalClassifier(n_trees=5, alpha=0.5, advice=rules)
    >>> clf.fit(atoms, labels, facts=fb).predict_proba(test_atoms)
    """

    def __init__(
        self,
        n_trees: int = 20,
        alpha: float = 0.5,
        psi0: float = 0.0,
        advice: AdviceSet | None = None,
        advice_mode: str = SIGNED_COUNT,
        modes: Sequence[ModeDeclaration] | None = None,
        max_depth: int = 3,
        max_literals_per_node: int = 2,
        min_examples_per_leaf: int = 8,
        improvement_tolerance: float = 1e-6,
        max_candidate_bindings: int = 1000,
        constant_top_n: int = 50,
        seed: int = 0,
    ):
        self.n_trees = n_trees
        self.alpha = alpha
        self.psi0 = psi0
        self.advice = advice
        self.advice_mode = advice_mode
        self.modes = modes
        self.max_depth = max_depth
        self.max_literals_per_node = max_literals_per_node
        self.min_examples_per_leaf = min_examples_per_leaf
        self.improvement_tolerance = improvement_tolerance
        self.max_candidate_bindings = max_candidate_bindings
        self.constant_top_n = constant_top_n
        self.seed = seed

    def _config(self) -> TrainingConfig:
        return TrainingConfig(
            n_trees=self.n_trees,
            alpha=self.alpha,
            psi0=self.psi0,
            advice_mode=self.advice_mode,
            seed=self.seed,
            tree=InductionParams(
                max_depth=self.max_depth,
                max_literals_per_node=self.max_literals_per_node,
                min_examples_per_leaf=self.min_examples_per_leaf,
                improvement_tolerance=self.improvement_tolerance,
                max_candidate_bindings=self.max_candidate_bindings,
                constant_top_n=self.constant_top_n,
            ),
        )

    def fit(self, X, y=None, *, facts: FactBase):
        examples = check_examples(X, y)
        if not examples:
            raise DataError("cannot fit on an empty example set")
        target = examples[0].atom.predicate
        modes = (
            list(self.modes)
            if self.modes is not None
            else default_modes(facts.schema, target)
        )
        self.model_ = train(examples, facts, modes, self.advice, self._config())
        self.target_ = target
        self.facts_ = facts
        self.classes_ = np.array([0, 1])
        self.history_ = list(self.model_.mean_abs_gradients)
        return self

    def decision_function(self, X, facts: FactBase | None = None) -> np.ndarray:
        check_is_fitted(self, "model_")
        fb = facts if facts is not None else self.facts_
        atoms = [ex.atom if isinstance(ex, LabeledExample) else ex for ex in X]
        return np.array([self.model_.psi(atom, fb) for atom in atoms])

    def predict_proba(self, X, facts: FactBase | None = None) -> np.ndarray:
        psi = self.decision_function(X, facts)
        pos = 1.0 / (1.0 + np.exp(-psi))
        return np.column_stack([1.0 - pos, pos])

    def predict(self, X, facts: FactBase | None = None) -> np.ndarray:
        return (self.predict_proba(X, facts)[:, 1] >= 0.5).astype(int)

    def score(self, X, y, facts: FactBase | None = None) -> float:
        labels = np.array([1 if as_label(v) == Label.POSITIVE else 0 for v in y])
        return float((self.predict(X, facts) == labels).mean())
