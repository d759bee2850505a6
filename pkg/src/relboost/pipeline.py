"""Publication-record pipeline: ingest, filter, facts, sampling, splits.

Records arrive as JSON Lines, one object per publication with fields
pub_id, author_id, author_name, affiliation, venue, title, coauthors,
references and first_author_count. All strings are normalized on ingest
(lowercase, trimmed, separators collapsed to underscores).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .domain import authorship_schema, authorship_target
from .errors import ConfigError, DataError
from .logic import (
    Atom,
    Constant,
    FactBase,
    Label,
    LabeledExample,
    Schema,
    normalize_constant,
)


@dataclass(frozen=True)
class PublicationRecord:
    pub_id: str
    author_id: str | None
    author_name: str | None = None
    affiliation: str | None = None
    venue: str | None = None
    title: str | None = None
    coauthors: tuple[str, ...] = ()
    references: tuple[str, ...] = ()
    first_author_count: int = 1


_STRING_FIELDS = ("author_id", "author_name", "affiliation", "venue", "title")


def _norm_opt(value) -> str | None:
    if value is None:
        return None
    sym = normalize_constant(str(value))
    return sym or None


def ingest(text: str) -> list[PublicationRecord]:
    """Parse and normalize a JSON Lines records file.

    Malformed lines, missing/empty pub_id and duplicate pub_id raise
    DataError with the offending record index (1-based). Self-references
    are dropped.
    """
    records: list[PublicationRecord] = []
    seen_pubs: set[str] = set()
    for idx, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"record {idx}: invalid JSON ({exc.msg})") from exc
        if not isinstance(obj, dict):
            raise DataError(f"record {idx}: expected an object")
        pub_id = _norm_opt(obj.get("pub_id"))
        if not pub_id:
            raise DataError(f"record {idx}: missing or empty pub_id")
        if pub_id in seen_pubs:
            raise DataError(f"record {idx}: duplicate pub_id {pub_id!r}")
        seen_pubs.add(pub_id)
        fields = {name: _norm_opt(obj.get(name)) for name in _STRING_FIELDS}
        coauthors = tuple(
            sym for c in obj.get("coauthors", ()) if (sym := _norm_opt(c))
        )
        references = tuple(
            sym
            for r in obj.get("references", ())
            if (sym := _norm_opt(r)) and sym != pub_id
        )
        try:
            fac = int(obj.get("first_author_count", 1))
        except (TypeError, ValueError) as exc:
            raise DataError(f"record {idx}: bad first_author_count") from exc
        records.append(
            PublicationRecord(
                pub_id=pub_id,
                coauthors=coauthors,
                references=references,
                first_author_count=fac,
                **fields,
            )
        )
    return records


def render_records(records: Sequence[PublicationRecord]) -> str:
    lines = []
    for r in records:
        obj = {
            "pub_id": r.pub_id,
            "author_id": r.author_id,
            "author_name": r.author_name,
            "affiliation": r.affiliation,
            "venue": r.venue,
            "title": r.title,
            "coauthors": list(r.coauthors),
            "references": list(r.references),
            "first_author_count": r.first_author_count,
        }
        lines.append(json.dumps(obj, sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")


def preprocess(
    records: Sequence[PublicationRecord],
    sample_fraction: float = 1.0,
    min_pubs: int = 10,
    seed: int = 0,
) -> list[PublicationRecord]:
    """Filter records: drop missing author ids, multi-first-author entries,
    and authors with fewer than `min_pubs` publications; optionally keep a
    seeded sample of the remaining authors (with all their publications).
    """
    if not 0.0 < sample_fraction <= 1.0:
        raise ConfigError("sample_fraction must lie in (0, 1]")
    kept = [
        r
        for r in records
        if r.author_id is not None and r.first_author_count <= 1
    ]
    counts: dict[str, int] = {}
    for r in kept:
        counts[r.author_id] = counts.get(r.author_id, 0) + 1
    kept = [r for r in kept if counts[r.author_id] >= min_pubs]
    if sample_fraction < 1.0:
        authors = list(dict.fromkeys(r.author_id for r in kept))
        n_keep = math.floor(sample_fraction * len(authors))
        rng = np.random.default_rng(seed)
        chosen = set(
            rng.choice(len(authors), size=n_keep, replace=False).tolist()
        )
        keep_ids = {authors[i] for i in chosen}
        kept = [r for r in kept if r.author_id in keep_ids]
    return kept


def to_facts(
    records: Sequence[PublicationRecord], schema: Schema | None = None
) -> tuple[FactBase, list[Atom]]:
    """Attribute facts plus one positive authorship atom per record.

    The positives are returned separately and are NOT inserted as facts;
    callers decide which authorship atoms the fact base may reveal.
    """
    schema = schema or authorship_schema()
    target = authorship_target(schema)
    aut = schema.resolve("author_name", 2)
    aff = schema.resolve("affiliation", 2)
    ven = schema.resolve("venue", 2)
    ref = schema.resolve("reference", 2)
    coa = schema.resolve("coauthor", 2)
    title = schema.resolve("title", 2)

    fb = FactBase(schema)
    positives: list[Atom] = []
    for r in records:
        pub = Constant(r.pub_id)
        if r.author_id is not None:
            positives.append(Atom(target, (pub, Constant(r.author_id))))
        if r.author_name:
            fb.add(Atom(aut, (pub, Constant(r.author_name))))
        if r.affiliation:
            fb.add(Atom(aff, (pub, Constant(r.affiliation))))
        if r.venue:
            fb.add(Atom(ven, (pub, Constant(r.venue))))
        if r.title:
            fb.add(Atom(title, (pub, Constant(r.title))))
        for c in r.coauthors:
            fb.add(Atom(coa, (pub, Constant(c))))
        for cited in r.references:
            fb.add(Atom(ref, (pub, Constant(cited))))
    return fb, positives


def with_target_facts(fb: FactBase, examples: Iterable[LabeledExample]) -> FactBase:
    """A fact base extended with the authorship atoms labeled positive."""
    return fb.extended(
        ex.atom for ex in examples if ex.label == Label.POSITIVE
    )


def sample_negatives(
    positives: Sequence[Atom],
    all_authors: Sequence[str],
    ratio: float = 2.0,
    seed: int = 0,
    exclude: Sequence[Atom] = (),
) -> list[Atom]:
    """Exactly floor(ratio * |positives|) (pub, author) non-pairs, uniform,
    without duplicates or overlap with the positives or `exclude` atoms.

    Publications are drawn from `positives`, authors from `all_authors`.
    """
    if ratio < 0:
        raise ConfigError("negative ratio must be >= 0")
    n_wanted = math.floor(ratio * len(positives))
    if n_wanted == 0:
        return []
    if not positives:
        raise DataError("cannot sample negatives without positives")
    target = positives[0].predicate
    pubs = list(dict.fromkeys(a.args[0].symbol for a in positives))
    authors = list(dict.fromkeys(all_authors))
    taken = {
        (a.args[0].symbol, a.args[1].symbol)
        for group in (positives, exclude)
        for a in group
    }
    pairs = _sample_pairs(pubs, authors, taken, n_wanted, seed)
    return [Atom(target, (Constant(p), Constant(a))) for p, a in pairs]


def _sample_pairs(
    pubs: list[str],
    authors: list[str],
    taken: set[tuple[str, str]],
    n_wanted: int,
    seed: int,
) -> list[tuple[str, str]]:
    free = sum(1 for p in pubs for a in authors if (p, a) not in taken)
    if n_wanted > free:
        raise DataError(
            f"cannot sample {n_wanted} negatives: only {free} candidate pairs"
        )
    rng = np.random.default_rng(seed)
    out: list[tuple[str, str]] = []
    chosen: set[tuple[str, str]] = set()
    attempts = 0
    max_attempts = 50 * n_wanted + 1000
    while len(out) < n_wanted and attempts < max_attempts:
        attempts += 1
        pair = (
            pubs[int(rng.integers(len(pubs)))],
            authors[int(rng.integers(len(authors)))],
        )
        if pair in taken or pair in chosen:
            continue
        chosen.add(pair)
        out.append(pair)
    if len(out) < n_wanted:
        # dense positive region; enumerate the remaining free pairs directly
        remaining = [
            (p, a)
            for p in pubs
            for a in authors
            if (p, a) not in taken and (p, a) not in chosen
        ]
        idx = rng.choice(len(remaining), size=n_wanted - len(out), replace=False)
        out.extend(remaining[i] for i in sorted(idx.tolist()))
    return out


def flip_labels(
    examples: Sequence[LabeledExample],
    pos_rate: float,
    neg_rate: float,
    seed: int = 0,
) -> list[LabeledExample]:
    """Flip exactly floor(pos_rate * n_pos) positives to negative and
    floor(neg_rate * n_neg) negatives to positive, order preserved."""
    return _corrupt(examples, pos_rate, neg_rate, seed, flip=True)


def hide_labels(
    examples: Sequence[LabeledExample],
    pos_rate: float,
    neg_rate: float,
    seed: int = 0,
) -> list[LabeledExample]:
    """Turn exact floor-counts of positives/negatives into unobserved."""
    return _corrupt(examples, pos_rate, neg_rate, seed, flip=False)


def _corrupt(examples, pos_rate, neg_rate, seed, flip: bool):
    for rate in (pos_rate, neg_rate):
        if not 0.0 <= rate <= 1.0:
            raise ConfigError("corruption rates must lie in [0, 1]")
    pos_idx = [i for i, ex in enumerate(examples) if ex.label == Label.POSITIVE]
    neg_idx = [i for i, ex in enumerate(examples) if ex.label == Label.NEGATIVE]
    rng = np.random.default_rng(seed)
    n_pos = math.floor(pos_rate * len(pos_idx))
    n_neg = math.floor(neg_rate * len(neg_idx))
    hit: set[int] = set()
    if n_pos:
        hit.update(
            pos_idx[i]
            for i in rng.choice(len(pos_idx), size=n_pos, replace=False).tolist()
        )
    if n_neg:
        hit.update(
            neg_idx[i]
            for i in rng.choice(len(neg_idx), size=n_neg, replace=False).tolist()
        )
    out = []
    for i, ex in enumerate(examples):
        if i not in hit:
            out.append(ex)
        elif not flip:
            out.append(LabeledExample(ex.atom, Label.UNOBSERVED))
        elif ex.label == Label.POSITIVE:
            out.append(LabeledExample(ex.atom, Label.NEGATIVE))
        else:
            out.append(LabeledExample(ex.atom, Label.POSITIVE))
    return out


def split_examples(
    items: Sequence, ratio: float = 0.8, seed: int = 0
) -> tuple[list, list]:
    """Seeded permutation split into (first `ratio` share, remainder)."""
    if not 0.0 < ratio < 1.0:
        raise ConfigError("split ratio must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(items)).tolist()
    n_train = math.floor(ratio * len(items))
    train = [items[i] for i in order[:n_train]]
    test = [items[i] for i in order[n_train:]]
    return train, test


def author_distribution(records: Sequence[PublicationRecord]) -> dict[int, int]:
    """Histogram: publication count per author -> number of such authors."""
    counts: dict[str, int] = {}
    for r in records:
        if r.author_id is not None:
            counts[r.author_id] = counts.get(r.author_id, 0) + 1
    hist: dict[int, int] = {}
    for c in counts.values():
        hist[c] = hist.get(c, 0) + 1
    return dict(sorted(hist.items()))


def _derived_seed(master: int, *keys: int) -> int:
    return int(
        np.random.SeedSequence(entropy=[master, *keys]).generate_state(1)[0]
    )


@dataclass
class RelationalDataset:
    """A complete learning task: shared facts plus labeled example splits.

    The fact base carries the attribute facts of every record and the
    authorship atoms of the examples labeled positive in the final training
    split; test positives are never revealed as facts.
    """

    schema: Schema
    facts: FactBase
    train: list[LabeledExample]
    test: list[LabeledExample]
    validation: list[LabeledExample] = field(default_factory=list)
    split_ratio: float = 0.8


def build_dataset(
    records: Sequence[PublicationRecord],
    *,
    schema: Schema | None = None,
    negative_ratio: float = 2.0,
    split_ratio: float = 0.8,
    validation_ratio: float = 0.0,
    flip: tuple[float, float] | None = None,
    hide: tuple[float, float] | None = None,
    seed: int = 0,
) -> RelationalDataset:
    """Assemble a train/test task from preprocessed records.

    Positives are split by example; negatives are sampled per split against
    the full positive set; corruption (flip XOR hide) applies to the training
    split only, and the shared fact base reveals exactly the post-corruption
    training positives.
    """
    if flip is not None and hide is not None:
        raise ConfigError("choose label flipping or hiding, not both")
    schema = schema or authorship_schema()
    base_fb, positives = to_facts(records, schema)
    if not positives:
        raise DataError("no positive examples (records lack author ids?)")
    authors = list(dict.fromkeys(r.author_id for r in records if r.author_id))

    train_pos, test_pos = split_examples(
        positives, split_ratio, _derived_seed(seed, 0)
    )
    train_neg = sample_negatives(
        train_pos, authors, negative_ratio, _derived_seed(seed, 1), exclude=test_pos
    )
    test_neg = sample_negatives(
        test_pos, authors, negative_ratio, _derived_seed(seed, 2), exclude=train_pos
    )

    train = [LabeledExample(a, Label.POSITIVE) for a in train_pos] + [
        LabeledExample(a, Label.NEGATIVE) for a in train_neg
    ]
    test = [LabeledExample(a, Label.POSITIVE) for a in test_pos] + [
        LabeledExample(a, Label.NEGATIVE) for a in test_neg
    ]

    if flip is not None:
        train = flip_labels(train, flip[0], flip[1], _derived_seed(seed, 3))
    elif hide is not None:
        train = hide_labels(train, hide[0], hide[1], _derived_seed(seed, 3))

    validation: list[LabeledExample] = []
    if validation_ratio > 0.0:
        train, validation = split_examples(
            train, 1.0 - validation_ratio, _derived_seed(seed, 4)
        )

    facts = with_target_facts(base_fb, train)
    return RelationalDataset(
        schema=schema,
        facts=facts,
        train=train,
        test=test,
        validation=validation,
        split_ratio=split_ratio,
    )
