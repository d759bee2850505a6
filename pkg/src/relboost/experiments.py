"""Experiment orchestration: advice-weight sweeps and baseline comparisons."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .advice import AdviceSet
from .boosting import train
from .errors import ConfigError, TrainingError
from .induction import ModeDeclaration
from .logic import FactBase, LabeledExample
from .metrics import auc_pr, auc_roc, score_model
from .model import BoostedModel, TrainingConfig


def derive_seed(master: int, *indices: int) -> int:
    """A stable child seed for the given master seed and index path.

    The path length is folded into the entropy; without it a trailing zero
    index would collide with the shorter path (SeedSequence pads entropy).
    """
    seq = np.random.SeedSequence(
        entropy=[int(master), len(indices), *map(int, indices)]
    )
    return int(seq.generate_state(1)[0])


@dataclass(frozen=True)
class AlphaPoint:
    alpha: float
    auc_roc: float
    auc_pr: float


@dataclass(frozen=True)
class SweepResult:
    points: tuple[AlphaPoint, ...]
    best_alpha: float
    test_auc_roc: float
    test_auc_pr: float
    baseline_auc_roc: float
    baseline_auc_pr: float

    def point(self, alpha: float) -> AlphaPoint:
        for p in self.points:
            if p.alpha == alpha:
                return p
        raise KeyError(alpha)


def _metrics(model: BoostedModel, examples, fb) -> tuple[float, float]:
    scored = score_model(model, examples, fb)
    return auc_roc(scored), auc_pr(scored)


def sweep_alpha(
    train_examples: Sequence[LabeledExample],
    validation: Sequence[LabeledExample],
    test: Sequence[LabeledExample],
    fb: FactBase,
    modes: Sequence[ModeDeclaration],
    advice: AdviceSet,
    base_config: TrainingConfig,
    alphas: Sequence[float],
) -> SweepResult:
    """Train one model per advice weight and select by validation ranking.

    Each weight gets a child seed derived from the base config's seed and
    its grid index. The winner (ties break toward the smaller weight) is
    scored on the test split next to a no-advice baseline.
    """
    grid = list(alphas)
    if not grid:
        raise ConfigError("alpha grid must be non-empty")
    if sorted(set(grid)) != grid:
        raise ConfigError("alpha grid must be strictly increasing")

    points: list[AlphaPoint] = []
    models: list[BoostedModel] = []
    for i, alpha in enumerate(grid):
        config = replace(
            base_config, alpha=alpha, seed=derive_seed(base_config.seed, i)
        )
        try:
            model = train(train_examples, fb, modes, advice, config)
        except TrainingError as exc:
            raise TrainingError(f"alpha={alpha}: {exc}") from exc
        roc, pr = _metrics(model, validation, fb)
        points.append(AlphaPoint(alpha=alpha, auc_roc=roc, auc_pr=pr))
        models.append(model)

    best_idx = max(range(len(points)), key=lambda i: points[i].auc_roc)
    test_roc, test_pr = _metrics(models[best_idx], test, fb)

    baseline_config = replace(
        base_config, alpha=1.0, seed=derive_seed(base_config.seed, len(grid))
    )
    baseline = train(train_examples, fb, modes, None, baseline_config)
    base_roc, base_pr = _metrics(baseline, test, fb)

    return SweepResult(
        points=tuple(points),
        best_alpha=grid[best_idx],
        test_auc_roc=test_roc,
        test_auc_pr=test_pr,
        baseline_auc_roc=base_roc,
        baseline_auc_pr=base_pr,
    )


@dataclass(frozen=True)
class ComparisonResult:
    advice_model: BoostedModel
    baseline_model: BoostedModel
    advice_auc_roc: float
    advice_auc_pr: float
    baseline_auc_roc: float
    baseline_auc_pr: float


def compare_with_baseline(
    train_examples: Sequence[LabeledExample],
    test: Sequence[LabeledExample],
    fb: FactBase,
    modes: Sequence[ModeDeclaration],
    advice: AdviceSet,
    config: TrainingConfig,
) -> ComparisonResult:
    """Train matched advice and no-advice models and score both on test."""
    advice_model = train(train_examples, fb, modes, advice, config)
    baseline_model = train(
        train_examples, fb, modes, None, replace(config, alpha=1.0)
    )
    a_roc, a_pr = _metrics(advice_model, test, fb)
    b_roc, b_pr = _metrics(baseline_model, test, fb)
    return ComparisonResult(
        advice_model=advice_model,
        baseline_model=baseline_model,
        advice_auc_roc=a_roc,
        advice_auc_pr=a_pr,
        baseline_auc_roc=b_roc,
        baseline_auc_pr=b_pr,
    )


def render_sweep(result: SweepResult) -> str:
    """Sweep results as a small aligned text table plus summary lines."""
    lines = ["alpha  auc_roc     auc_pr"]
    for p in result.points:
        lines.append(f"{p.alpha:5.2f}  {p.auc_roc:.6f}  {p.auc_pr:.6f}")
    lines.append(f"best alpha: {result.best_alpha:.2f}")
    lines.append(
        f"test at best alpha: auc_roc={result.test_auc_roc:.6f} "
        f"auc_pr={result.test_auc_pr:.6f}"
    )
    lines.append(
        f"no-advice baseline: auc_roc={result.baseline_auc_roc:.6f} "
        f"auc_pr={result.baseline_auc_pr:.6f}"
    )
    return "\n".join(lines) + "\n"
