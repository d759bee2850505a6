"""Command-line interface.

Every subcommand reads its settings from an optional JSON config file,
lets command-line flags override individual entries, and writes a
manifest.json into the output directory echoing the fully resolved
configuration. Re-running a command from its manifest reproduces the
output files byte for byte.

On failure the process prints a single line `error: <category>: <message>`
to stderr and exits 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .advice import AdviceSet, default_advice, parse_advice
from .boosting import train as train_model
from .combine import clause_stats, combine, render_combined, top_clauses
from .domain import authorship_modes, authorship_schema
from .errors import (
    ConfigError,
    DataError,
    ParseError,
    RelboostError,
    SchemaError,
    TrainingError,
)
from .experiments import render_sweep, sweep_alpha
from .induction import InductionParams
from .logic import Schema
from .metrics import auc_pr, auc_roc, score_model
from .model import TrainingConfig, load_model, predict, save_model
from .parsing import (
    parse_examples,
    parse_facts,
    parse_modes,
    parse_schema,
    render_atom,
    render_examples,
    render_facts,
    render_schema,
)
from .pipeline import (
    author_distribution,
    build_dataset,
    ingest,
    preprocess,
    render_records,
)

_CATEGORIES: list[tuple[type, str]] = [
    (ParseError, "parse"),
    (SchemaError, "schema"),
    (TrainingError, "training"),
    (ConfigError, "config"),
    (DataError, "data"),
]


def _category(exc: Exception) -> str:
    for klass, name in _CATEGORIES:
        if isinstance(exc, klass):
            return name
    if isinstance(exc, (OSError, FileNotFoundError)):
        return "io"
    return "internal"


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(out_dir: Path, name: str, content: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / name, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(content)


def _write_json(out_dir: Path, name: str, obj) -> None:
    _write(out_dir, name, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _load_schema(value: str) -> Schema:
    if value == "default":
        return authorship_schema()
    return parse_schema(_read(value))


def _load_modes(value: str, schema: Schema):
    if value == "default":
        return authorship_modes(schema)
    return parse_modes(_read(value), schema)


def _load_advice(value: str, schema: Schema) -> AdviceSet | None:
    if value in (None, "none", ""):
        return None
    if value == "default":
        return default_advice()
    return parse_advice(_read(value), schema)


def _parse_alpha_grid(text: str) -> list[float]:
    """`start:stop:step` (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            lo_s, hi_s, step_s = text.split(":")
            lo, hi, step = float(lo_s), float(hi_s), float(step_s)
            if step <= 0 or hi < lo:
                raise ValueError
            n = int(round((hi - lo) / step))
            grid = [round(lo + i * step, 10) for i in range(n + 1)]
            return [a for a in grid if a <= hi + 1e-12]
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad alpha grid {text!r}") from exc


def _training_config(cfg: dict) -> TrainingConfig:
    return TrainingConfig(
        n_trees=int(cfg["trees"]),
        alpha=float(cfg["alpha"]),
        psi0=float(cfg["psi0"]),
        advice_mode=str(cfg["advice_mode"]),
        seed=int(cfg["seed"]),
        tree=InductionParams(
            max_depth=int(cfg["max_depth"]),
            max_literals_per_node=int(cfg["max_literals"]),
            min_examples_per_leaf=int(cfg["min_leaf"]),
            improvement_tolerance=float(cfg["tolerance"]),
            max_candidate_bindings=int(cfg["max_bindings"]),
            constant_top_n=int(cfg["constant_top_n"]),
        ),
    )


_TRAINING_DEFAULTS = {
    "schema": "default",
    "modes": "default",
    "alpha": 0.5,
    "trees": 20,
    "advice_mode": "signed-count",
    "psi0": 0.0,
    "seed": 0,
    "max_depth": 3,
    "max_literals": 2,
    "min_leaf": 8,
    "tolerance": 1e-6,
    "max_bindings": 1000,
    "constant_top_n": 50,
}

_DEFAULTS: dict[str, dict] = {
    "ingest": {},
    "preprocess": {
        "sample_fraction": 1.0,
        "min_pubs": 10,
        "negative_ratio": 2.0,
        "split_ratio": 0.8,
        "validation_ratio": 0.0,
        "flip_pos": 0.0,
        "flip_neg": 0.0,
        "hide_pos": 0.0,
        "hide_neg": 0.0,
        "seed": 0,
    },
    "train": {**_TRAINING_DEFAULTS, "advice": "none"},
    "predict": {"schema": "default"},
    "eval": {"schema": "default"},
    "sweep": {
        **_TRAINING_DEFAULTS,
        "advice": "default",
        "alphas": "0.25:0.75:0.05",
    },
    "combine": {"schema": "default", "top": 3, "max_neg_to_pos": 1.0},
    "stats": {},
}

_REQUIRED: dict[str, tuple[str, ...]] = {
    "ingest": ("records", "out"),
    "preprocess": ("records", "out"),
    "train": ("facts", "examples", "out"),
    "predict": ("model", "facts", "examples", "out"),
    "eval": ("model", "facts", "examples", "out"),
    "sweep": ("facts", "train", "validation", "test", "out"),
    "combine": ("model", "facts", "examples", "out"),
    "stats": ("records", "out"),
}


def _resolve(command: str, args: argparse.Namespace) -> dict:
    """Defaults, overlaid by the config file, overlaid by explicit flags."""
    cfg = dict(_DEFAULTS[command])
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            loaded = json.loads(_read(config_path))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {config_path}: {exc.msg}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"config file {config_path}: expected an object")
        unknown = set(loaded) - set(cfg) - set(_REQUIRED[command]) - {"command"}
        if unknown:
            raise ConfigError(
                f"config file {config_path}: unknown keys {sorted(unknown)}"
            )
        cfg.update({k: v for k, v in loaded.items() if k != "command"})
    for key, value in vars(args).items():
        if key in ("config", "func", "command") or value is None:
            continue
        cfg[key] = value
    missing = [k for k in _REQUIRED[command] if not cfg.get(k)]
    if missing:
        raise ConfigError(f"missing required settings: {', '.join(missing)}")
    return cfg


def _manifest(command: str, cfg: dict, out_dir: Path) -> None:
    _write_json(out_dir, "manifest.json", {"command": command, **cfg})


def cmd_ingest(cfg: dict) -> None:
    records = ingest(_read(cfg["records"]))
    out = Path(cfg["out"])
    _write(out, "records.jsonl", render_records(records))
    _manifest("ingest", cfg, out)


def cmd_preprocess(cfg: dict) -> None:
    records = ingest(_read(cfg["records"]))
    records = preprocess(
        records,
        sample_fraction=float(cfg["sample_fraction"]),
        min_pubs=int(cfg["min_pubs"]),
        seed=int(cfg["seed"]),
    )
    flip_rates = (float(cfg["flip_pos"]), float(cfg["flip_neg"]))
    hide_rates = (float(cfg["hide_pos"]), float(cfg["hide_neg"]))
    flip = flip_rates if any(r > 0 for r in flip_rates) else None
    hide = hide_rates if any(r > 0 for r in hide_rates) else None
    dataset = build_dataset(
        records,
        negative_ratio=float(cfg["negative_ratio"]),
        split_ratio=float(cfg["split_ratio"]),
        validation_ratio=float(cfg["validation_ratio"]),
        flip=flip,
        hide=hide,
        seed=int(cfg["seed"]),
    )
    out = Path(cfg["out"])
    _write(out, "records.jsonl", render_records(records))
    _write(out, "schema.pl", render_schema(dataset.schema))
    _write(out, "facts.pl", render_facts(dataset.facts))
    _write(out, "train.pl", render_examples(dataset.train))
    _write(out, "test.pl", render_examples(dataset.test))
    if dataset.validation:
        _write(out, "validation.pl", render_examples(dataset.validation))
    _manifest("preprocess", cfg, out)


def cmd_train(cfg: dict) -> None:
    schema = _load_schema(cfg["schema"])
    fb = parse_facts(_read(cfg["facts"]), schema)
    examples = parse_examples(_read(cfg["examples"]), schema)
    modes = _load_modes(cfg["modes"], schema)
    advice = _load_advice(cfg.get("advice"), schema)
    config = _training_config(cfg)
    model = train_model(examples, fb, modes, advice, config)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    save_model(model, str(out / "model.txt"))
    _write_json(
        out,
        "history.json",
        {"mean_abs_gradient": list(model.mean_abs_gradients)},
    )
    _manifest("train", cfg, out)


def cmd_predict(cfg: dict) -> None:
    schema = _load_schema(cfg["schema"])
    model = load_model(cfg["model"], schema)
    fb = parse_facts(_read(cfg["facts"]), schema)
    examples = parse_examples(_read(cfg["examples"]), schema)
    preds = predict(model, [ex.atom for ex in examples], fb)
    lines = [f"{render_atom(atom)}\t{prob!r}" for atom, prob in preds]
    out = Path(cfg["out"])
    _write(out, "predictions.tsv", "\n".join(lines) + "\n")
    _manifest("predict", cfg, out)


def cmd_eval(cfg: dict) -> None:
    schema = _load_schema(cfg["schema"])
    model = load_model(cfg["model"], schema)
    fb = parse_facts(_read(cfg["facts"]), schema)
    examples = parse_examples(_read(cfg["examples"]), schema)
    scored = score_model(model, examples, fb)
    roc = auc_roc(scored)
    pr = auc_pr(scored)
    n_pos = sum(1 for s in scored if s.label.value == "pos")
    n_neg = len(scored) - n_pos
    out = Path(cfg["out"])
    _write_json(
        out,
        "metrics.json",
        {"auc_roc": roc, "auc_pr": pr, "n_positive": n_pos, "n_negative": n_neg},
    )
    _write(
        out,
        "metrics.txt",
        (
            f"examples: {n_pos} positive / {n_neg} negative\n"
            f"auc_roc: {roc:.6f}\n"
            f"auc_pr: {pr:.6f}\n"
        ),
    )
    _manifest("eval", cfg, out)


def cmd_sweep(cfg: dict) -> None:
    schema = _load_schema(cfg["schema"])
    fb = parse_facts(_read(cfg["facts"]), schema)
    train_ex = parse_examples(_read(cfg["train"]), schema)
    validation = parse_examples(_read(cfg["validation"]), schema)
    test = parse_examples(_read(cfg["test"]), schema)
    modes = _load_modes(cfg["modes"], schema)
    advice = _load_advice(cfg.get("advice"), schema)
    if advice is None:
        raise ConfigError("sweep needs an advice set ('default' or a file)")
    grid = _parse_alpha_grid(str(cfg["alphas"]))
    base = _training_config(cfg)
    result = sweep_alpha(
        train_ex, validation, test, fb, modes, advice, base, grid
    )
    out = Path(cfg["out"])
    _write(out, "sweep.txt", render_sweep(result))
    _write_json(
        out,
        "sweep.json",
        {
            "points": [
                {"alpha": p.alpha, "auc_roc": p.auc_roc, "auc_pr": p.auc_pr}
                for p in result.points
            ],
            "best_alpha": result.best_alpha,
            "test_auc_roc": result.test_auc_roc,
            "test_auc_pr": result.test_auc_pr,
            "baseline_auc_roc": result.baseline_auc_roc,
            "baseline_auc_pr": result.baseline_auc_pr,
        },
    )
    _manifest("sweep", cfg, out)


def cmd_combine(cfg: dict) -> None:
    schema = _load_schema(cfg["schema"])
    model = load_model(cfg["model"], schema)
    fb = parse_facts(_read(cfg["facts"]), schema)
    examples = parse_examples(_read(cfg["examples"]), schema)
    combined = combine(model, fb, examples)
    count, avg_len, max_len = clause_stats(combined)
    best = top_clauses(
        combined, int(cfg["top"]), float(cfg["max_neg_to_pos"])
    )
    out = Path(cfg["out"])
    _write(out, "combined.pl", render_combined(combined))
    _write_json(
        out,
        "combined_stats.json",
        {
            "clauses": count,
            "avg_length": avg_len,
            "max_length": max_len,
            "top_clause_values": [c.value for c in best],
        },
    )
    _manifest("combine", cfg, out)


def cmd_stats(cfg: dict) -> None:
    records = ingest(_read(cfg["records"]))
    hist = author_distribution(records)
    n_authors = sum(hist.values())
    n_records = len(records)
    lines = ["pubs_per_author  authors"]
    for pubs, authors in hist.items():
        lines.append(f"{pubs:15d}  {authors:7d}")
    lines.append(f"total authors: {n_authors}")
    lines.append(f"total records: {n_records}")
    out = Path(cfg["out"])
    _write(out, "stats.txt", "\n".join(lines) + "\n")
    _write_json(
        out,
        "stats.json",
        {
            "histogram": {str(k): v for k, v in hist.items()},
            "n_authors": n_authors,
            "n_records": n_records,
        },
    )
    _manifest("stats", cfg, out)


_HANDLERS = {
    "ingest": cmd_ingest,
    "preprocess": cmd_preprocess,
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "combine": cmd_combine,
    "stats": cmd_stats,
}


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file; flags override it")
    sub.add_argument("--out", help="output directory")


def _add_training_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--schema", help="schema file or 'default'")
    sub.add_argument("--modes", help="mode file or 'default'")
    sub.add_argument("--alpha", type=float, help="data-gradient weight in [0,1]")
    sub.add_argument("--trees", type=int, help="number of boosting rounds")
    sub.add_argument(
        "--advice-mode",
        dest="advice_mode",
        choices=["simplified-indicator", "signed-count"],
        help="how advice enters the gradient",
    )
    sub.add_argument("--psi0", type=float, help="initial score offset")
    sub.add_argument("--seed", type=int, help="master random seed")
    sub.add_argument("--max-depth", dest="max_depth", type=int)
    sub.add_argument("--max-literals", dest="max_literals", type=int)
    sub.add_argument("--min-leaf", dest="min_leaf", type=int)
    sub.add_argument("--tolerance", type=float)
    sub.add_argument("--max-bindings", dest="max_bindings", type=int)
    sub.add_argument("--constant-top-n", dest="constant_top_n", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relboost",
        description=(
            "Boosted relational regression trees for knowledge-graph "
            "refinement with human advice"
        ),
    )
    subs = parser.add_subparsers(dest="command")

    p = subs.add_parser("ingest", help="normalize a JSONL records file")
    _add_common(p)
    p.add_argument("--records", help="input records (JSON Lines)")

    p = subs.add_parser(
        "preprocess", help="filter records and assemble a learning task"
    )
    _add_common(p)
    p.add_argument("--records")
    p.add_argument("--sample-fraction", dest="sample_fraction", type=float)
    p.add_argument("--min-pubs", dest="min_pubs", type=int)
    p.add_argument("--negative-ratio", dest="negative_ratio", type=float)
    p.add_argument("--split-ratio", dest="split_ratio", type=float)
    p.add_argument("--validation-ratio", dest="validation_ratio", type=float)
    p.add_argument("--flip-pos", dest="flip_pos", type=float)
    p.add_argument("--flip-neg", dest="flip_neg", type=float)
    p.add_argument("--hide-pos", dest="hide_pos", type=float)
    p.add_argument("--hide-neg", dest="hide_neg", type=float)
    p.add_argument("--seed", type=int)

    p = subs.add_parser("train", help="train a boosted relational model")
    _add_common(p)
    p.add_argument("--facts")
    p.add_argument("--examples")
    p.add_argument("--advice", help="advice file, 'default', or 'none'")
    _add_training_flags(p)

    p = subs.add_parser("predict", help="score examples with a trained model")
    _add_common(p)
    p.add_argument("--model")
    p.add_argument("--facts")
    p.add_argument("--examples")
    p.add_argument("--schema")

    p = subs.add_parser("eval", help="compute ranking metrics for a model")
    _add_common(p)
    p.add_argument("--model")
    p.add_argument("--facts")
    p.add_argument("--examples")
    p.add_argument("--schema")

    p = subs.add_parser("sweep", help="grid-search the advice weight")
    _add_common(p)
    p.add_argument("--facts")
    p.add_argument("--train", dest="train")
    p.add_argument("--validation")
    p.add_argument("--test")
    p.add_argument("--advice", help="advice file or 'default'")
    p.add_argument("--alphas", help="start:stop:step or comma list")
    _add_training_flags(p)

    p = subs.add_parser(
        "combine", help="collapse a model into one decision list"
    )
    _add_common(p)
    p.add_argument("--model")
    p.add_argument("--facts")
    p.add_argument("--examples")
    p.add_argument("--schema")
    p.add_argument("--top", type=int, help="clauses to keep in the summary")
    p.add_argument(
        "--max-neg-to-pos",
        dest="max_neg_to_pos",
        type=float,
        help="coverage ratio above which a clause is filtered",
    )

    p = subs.add_parser("stats", help="author-distribution table for records")
    _add_common(p)
    p.add_argument("--records")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 2
    try:
        cfg = _resolve(args.command, args)
        _HANDLERS[args.command](cfg)
    except RelboostError as exc:
        print(f"error: {_category(exc)}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
