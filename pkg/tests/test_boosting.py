import math
import random

import numpy as np
import pytest
from sklearn.base import clone

from relboost import (
    BoostedModel,
    BoostedRelationalClassifier,
    ConfigError,
    DataError,
    FactBase,
    InductionParams,
    Label,
    LabeledExample,
    TrainingConfig,
    advice_gradient,
    data_gradient,
    default_advice,
    make_synthetic_dataset,
    predict,
    sigmoid,
    train,
)
from relboost.model import parse_model, render_model
from relboost.tree import Leaf, RelationalRegressionTree

from conftest import atom


def leaf_model(target, value: float, psi0: float = 0.0) -> BoostedModel:
    tree = RelationalRegressionTree(target, Leaf(value))
    return BoostedModel(target, psi0, (tree,), TrainingConfig())


@pytest.fixture(scope="module")
def tiny():
    return make_synthetic_dataset(n_authors=30, pubs_per_author=6, seed=5)


@pytest.fixture(scope="module")
def tiny_modes(tiny):
    from relboost import authorship_modes

    return authorship_modes(tiny.schema)


class TestSigmoid:
    def test_midpoint(self):
        assert sigmoid(0.0) == 0.5

    def test_symmetry(self):
        for z in (-3.0, -0.5, 0.7, 4.2):
            assert sigmoid(z) + sigmoid(-z) == pytest.approx(1.0, abs=1e-15)

    def test_extremes_do_not_overflow(self):
        assert sigmoid(-800.0) == 0.0 and sigmoid(800.0) == 1.0
        assert 0.0 < sigmoid(-30.0) < sigmoid(30.0) < 1.0


class TestDataGradient:
    def test_values(self, schema, target):
        ex = atom(schema, "pub", "p1", "alice")
        model = leaf_model(target, 0.0)
        fb = FactBase(schema)
        pos = LabeledExample(ex, Label.POSITIVE)
        neg = LabeledExample(ex, Label.NEGATIVE)
        assert data_gradient(pos, model, fb) == 0.5
        assert data_gradient(neg, model, fb) == -0.5

    def test_unobserved_rejected(self, schema, target):
        ex = LabeledExample(atom(schema, "pub", "p1", "alice"), Label.UNOBSERVED)
        with pytest.raises(DataError):
            data_gradient(ex, leaf_model(target, 0.0), FactBase(schema))

    def test_matches_finite_difference(self, schema, target):
        # d/dpsi log-likelihood == indicator - probability
        rng = random.Random(3)
        ex_atom = atom(schema, "pub", "p1", "alice")
        fb = FactBase(schema)
        eps = 1e-4
        for _ in range(400):
            label = rng.choice([Label.POSITIVE, Label.NEGATIVE])
            psi = rng.uniform(-6, 6)
            ex = LabeledExample(ex_atom, label)
            got = data_gradient(ex, leaf_model(target, psi), fb)

            def ll(z: float) -> float:
                p = sigmoid(z)
                return math.log(p) if label == Label.POSITIVE else math.log(1 - p)

            numeric = (ll(psi + eps) - ll(psi - eps)) / (2 * eps)
            assert got == pytest.approx(numeric, abs=1e-6)


class TestAdviceGradient:
    def test_alpha_one_equals_data_gradient_bitwise(self, schema, target):
        advice = default_advice()
        fb = FactBase(schema)
        fb.add(atom(schema, "ref", "p1", "p2"))
        fb.add(atom(schema, "pub", "p2", "alice"))
        for label in (Label.POSITIVE, Label.NEGATIVE):
            ex = LabeledExample(atom(schema, "pub", "p1", "alice"), label)
            model = leaf_model(target, 0.37)
            assert advice_gradient(ex, model, fb, advice, 1.0) == data_gradient(
                ex, model, fb
            )

    def test_blend_adds_rule_count_to_data_term(self, schema, target):
        # exactly one template (direct citation) fires on these facts
        advice = default_advice()
        fb = FactBase(schema)
        fb.add(atom(schema, "ref", "p1", "p2"))
        fb.add(atom(schema, "pub", "p2", "alice"))
        ex = LabeledExample(atom(schema, "pub", "p1", "alice"), Label.POSITIVE)
        model = leaf_model(target, 0.0)
        got = advice_gradient(ex, model, fb, advice, 0.5)
        assert got == 0.5 * 0.5 + 0.5 * 1.0

    def test_no_rule_fires_leaves_scaled_data_term(self, schema, target):
        advice = default_advice()
        fb = FactBase(schema)
        ex = LabeledExample(atom(schema, "pub", "p1", "alice"), Label.POSITIVE)
        got = advice_gradient(ex, leaf_model(target, 0.0), fb, advice, 0.5)
        assert got == 0.25

    def test_unobserved_keeps_only_advice_term(self, schema, target):
        advice = default_advice()
        fb = FactBase(schema)
        fb.add(atom(schema, "ref", "p1", "p2"))
        fb.add(atom(schema, "pub", "p2", "alice"))
        ex = LabeledExample(atom(schema, "pub", "p1", "alice"), Label.UNOBSERVED)
        got = advice_gradient(ex, leaf_model(target, 0.8), fb, advice, 0.25)
        assert got == 0.75

    def test_signed_count_mode(self, schema, target):
        advice = default_advice()
        fb = FactBase(schema)
        fb.add(atom(schema, "ref", "p1", "p2"))
        fb.add(atom(schema, "pub", "p2", "alice"))
        fb.add(atom(schema, "aut", "p1", "alice_n"))
        fb.add(atom(schema, "aut", "p2", "alice_n"))
        ex = LabeledExample(atom(schema, "pub", "p1", "alice"), Label.UNOBSERVED)
        got = advice_gradient(
            ex, leaf_model(target, 0.0), fb, advice, 0.5,
            advice_mode="signed-count",
        )
        # name-corroboration and direct-citation templates both fire here
        assert got == 0.5 * 2.0

    def test_simplified_indicator_caps_at_one(self, schema, target):
        advice = default_advice()
        fb = FactBase(schema)
        fb.add(atom(schema, "ref", "p1", "p2"))
        fb.add(atom(schema, "pub", "p2", "alice"))
        fb.add(atom(schema, "aut", "p1", "alice_n"))
        fb.add(atom(schema, "aut", "p2", "alice_n"))
        ex = LabeledExample(atom(schema, "pub", "p1", "alice"), Label.UNOBSERVED)
        got = advice_gradient(
            ex, leaf_model(target, 0.0), fb, advice, 0.5,
            advice_mode="simplified-indicator",
        )
        assert got == 0.5 * 1.0

    def test_alpha_validated(self, schema, target):
        ex = LabeledExample(atom(schema, "pub", "p1", "alice"), Label.POSITIVE)
        with pytest.raises(ConfigError):
            advice_gradient(
                ex, leaf_model(target, 0.0), FactBase(schema), default_advice(), 1.5
            )


class TestTraining:
    def test_learns_separable_signal(self, tiny, tiny_modes):
        config = TrainingConfig(
            n_trees=4, alpha=1.0, tree=InductionParams(max_depth=2)
        )
        model = train(tiny.train, tiny.facts, tiny_modes, None, config)
        assert len(model.trees) == 4
        probs = [
            model.probability(ex.atom, tiny.facts)
            for ex in tiny.test
            if ex.label == Label.POSITIVE
        ]
        neg_probs = [
            model.probability(ex.atom, tiny.facts)
            for ex in tiny.test
            if ex.label == Label.NEGATIVE
        ]
        assert np.mean(probs) > np.mean(neg_probs) + 0.2

    def test_gradient_history_shrinks_on_clean_data(self, tiny, tiny_modes):
        config = TrainingConfig(
            n_trees=5, alpha=1.0, tree=InductionParams(max_depth=2)
        )
        model = train(tiny.train, tiny.facts, tiny_modes, None, config)
        history = model.mean_abs_gradients
        assert len(history) == 5
        assert history[-1] < history[0]

    def test_deterministic_repeat(self, tiny, tiny_modes):
        config = TrainingConfig(
            n_trees=2, alpha=0.5, tree=InductionParams(max_depth=2)
        )
        advice = default_advice()
        a = train(tiny.train, tiny.facts, tiny_modes, advice, config)
        b = train(tiny.train, tiny.facts, tiny_modes, advice, config)
        assert render_model(a) == render_model(b)

    def test_alpha_one_with_advice_identical_to_no_advice(self, tiny, tiny_modes):
        config = TrainingConfig(
            n_trees=2, alpha=1.0, tree=InductionParams(max_depth=2)
        )
        with_advice = train(
            tiny.train, tiny.facts, tiny_modes, default_advice(), config
        )
        without = train(tiny.train, tiny.facts, tiny_modes, None, config)
        assert render_model(with_advice) == render_model(without)

    def test_unobserved_examples_excluded_without_advice(
        self, schema, tiny, tiny_modes
    ):
        confused = list(tiny.train) + [
            LabeledExample(tiny.train[0].atom, Label.UNOBSERVED)
        ]
        config = TrainingConfig(n_trees=1, tree=InductionParams(max_depth=1))
        a = train(tiny.train, tiny.facts, tiny_modes, None, config)
        b = train(confused, tiny.facts, tiny_modes, None, config)
        assert render_model(a) == render_model(b)

    def test_empty_pool_rejected(self, schema, tiny_modes, tiny):
        only_unobserved = [
            LabeledExample(tiny.train[0].atom, Label.UNOBSERVED)
        ]
        from relboost import TrainingError

        with pytest.raises(TrainingError):
            train(only_unobserved, tiny.facts, tiny_modes, None, TrainingConfig())

    def test_psi_is_additive_over_trees(self, tiny, tiny_modes):
        config = TrainingConfig(
            n_trees=3, alpha=1.0, tree=InductionParams(max_depth=2)
        )
        model = train(tiny.train, tiny.facts, tiny_modes, None, config)
        from relboost.tree import evaluate

        ex = tiny.test[0].atom
        total = model.psi0 + sum(
            evaluate(t, ex, tiny.facts) for t in model.trees
        )
        assert model.psi(ex, tiny.facts) == pytest.approx(total, abs=1e-12)
        assert model.probability(ex, tiny.facts) == sigmoid(
            model.psi(ex, tiny.facts)
        )

    def test_predict_preserves_order(self, tiny, tiny_modes):
        config = TrainingConfig(n_trees=1, tree=InductionParams(max_depth=1))
        model = train(tiny.train, tiny.facts, tiny_modes, None, config)
        atoms = [ex.atom for ex in tiny.test[:5]]
        out = predict(model, atoms, tiny.facts)
        assert [a for a, _ in out] == atoms
        assert all(0.0 < p < 1.0 for _, p in out)


class TestSerialization:
    def test_round_trip(self, tiny, tiny_modes):
        config = TrainingConfig(
            n_trees=2, alpha=0.5, tree=InductionParams(max_depth=2)
        )
        model = train(tiny.train, tiny.facts, tiny_modes, default_advice(), config)
        text = render_model(model)
        back = parse_model(text, tiny.schema)
        assert render_model(back) == text
        ex = tiny.test[0].atom
        assert back.psi(ex, tiny.facts) == model.psi(ex, tiny.facts)

    def test_bad_magic_rejected(self, schema):
        from relboost import ParseError

        with pytest.raises(ParseError):
            parse_model("something else\n", schema)


class TestEstimator:
    def test_fit_predict_shapes(self, tiny):
        clf = BoostedRelationalClassifier(n_trees=2, max_depth=2)
        X = [ex.atom for ex in tiny.train]
        y = [1 if ex.label == Label.POSITIVE else 0 for ex in tiny.train]
        clf.fit(X, y, facts=tiny.facts)
        proba = clf.predict_proba([ex.atom for ex in tiny.test])
        assert proba.shape == (len(tiny.test), 2)
        np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-12)
        preds = clf.predict([ex.atom for ex in tiny.test])
        assert set(preds) <= {0, 1}

    def test_accepts_labeled_examples_directly(self, tiny):
        clf = BoostedRelationalClassifier(n_trees=1, max_depth=1)
        clf.fit(tiny.train, facts=tiny.facts)
        assert hasattr(clf, "model_")

    def test_get_params_round_trip(self):
        clf = BoostedRelationalClassifier(n_trees=7, alpha=0.3)
        params = clf.get_params()
        assert params["n_trees"] == 7 and params["alpha"] == 0.3
        other = BoostedRelationalClassifier(**params)
        assert other.get_params() == params

    def test_clone_preserves_params(self):
        clf = BoostedRelationalClassifier(n_trees=3, alpha=0.25, max_depth=2)
        cloned = clone(clf)
        assert cloned.get_params() == clf.get_params()

    def test_score_is_accuracy(self, tiny):
        clf = BoostedRelationalClassifier(n_trees=2, max_depth=2)
        clf.fit(tiny.train, facts=tiny.facts)
        X = [ex.atom for ex in tiny.test]
        y = [1 if ex.label == Label.POSITIVE else 0 for ex in tiny.test]
        acc = clf.score(X, y)
        assert 0.0 <= acc <= 1.0

    def test_unfitted_predict_raises(self, tiny):
        from sklearn.exceptions import NotFittedError

        clf = BoostedRelationalClassifier()
        with pytest.raises(NotFittedError):
            clf.predict([ex.atom for ex in tiny.test])
