"""Synthetic publication corpora with planted relational structure.

Each generated author writes under a stable name, from a home affiliation,
in a couple of favorite venues, and tends to cite their own earlier work.
Those regularities are exactly what the authorship rules key on, so models
trained on these corpora have recoverable signal with known provenance.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .pipeline import PublicationRecord, RelationalDataset, build_dataset


def make_synthetic_records(
    n_authors: int = 200,
    pubs_per_author: int | tuple[int, int] = 10,
    *,
    name_collision_rate: float = 0.0,
    n_venues: int = 20,
    n_affiliations: int = 50,
    venues_per_author: int = 2,
    p_same_author_ref: float = 0.7,
    refs_per_pub: int = 3,
    coauthor_circle: int = 3,
    coauthors_per_pub: int = 2,
    seed: int = 0,
) -> list[PublicationRecord]:
    """Generate one record per publication, grouped by author.

    A publication cites `refs_per_pub` earlier publications; each citation
    targets an earlier work of the same author with probability
    `p_same_author_ref`, otherwise a uniformly random earlier one. With
    probability `name_collision_rate` an author reuses the name of an
    earlier author, which blurs name-based matching.
    """
    if n_authors < 1:
        raise ConfigError("n_authors must be >= 1")
    if isinstance(pubs_per_author, tuple):
        lo, hi = pubs_per_author
    else:
        lo = hi = pubs_per_author
    if not 1 <= lo <= hi:
        raise ConfigError("pubs_per_author must be a positive int or (lo, hi)")
    if not 0.0 <= name_collision_rate < 1.0:
        raise ConfigError("name_collision_rate must lie in [0, 1)")
    if not 0.0 <= p_same_author_ref <= 1.0:
        raise ConfigError("p_same_author_ref must lie in [0, 1]")

    rng = np.random.default_rng(seed)
    names: list[str] = []
    for i in range(n_authors):
        if i > 0 and rng.random() < name_collision_rate:
            names.append(names[int(rng.integers(i))])
        else:
            names.append(f"name_{i:04d}")
    affiliations = [
        f"aff_{int(rng.integers(n_affiliations)):03d}" for _ in range(n_authors)
    ]
    venue_pools = [
        [
            f"ven_{int(j):03d}"
            for j in rng.choice(
                n_venues, size=min(venues_per_author, n_venues), replace=False
            )
        ]
        for _ in range(n_authors)
    ]
    circles = []
    for i in range(n_authors):
        others = [names[j] for j in range(n_authors) if j != i]
        if others and coauthor_circle > 0:
            picks = rng.choice(
                len(others), size=min(coauthor_circle, len(others)), replace=False
            )
            circles.append([others[int(j)] for j in picks])
        else:
            circles.append([])

    records: list[PublicationRecord] = []
    all_pub_ids: list[str] = []
    own_pubs: list[list[str]] = [[] for _ in range(n_authors)]
    counter = 0
    for i in range(n_authors):
        n_pubs = int(rng.integers(lo, hi + 1))
        for _ in range(n_pubs):
            pub_id = f"pub_{counter:05d}"
            counter += 1
            refs: list[str] = []
            for _ in range(refs_per_pub):
                if own_pubs[i] and rng.random() < p_same_author_ref:
                    refs.append(own_pubs[i][int(rng.integers(len(own_pubs[i])))])
                elif all_pub_ids:
                    refs.append(all_pub_ids[int(rng.integers(len(all_pub_ids)))])
            refs = [r for r in dict.fromkeys(refs) if r != pub_id]
            circle = circles[i]
            n_co = min(coauthors_per_pub, len(circle))
            coas = (
                [circle[int(j)] for j in rng.choice(len(circle), size=n_co, replace=False)]
                if n_co
                else []
            )
            records.append(
                PublicationRecord(
                    pub_id=pub_id,
                    author_id=f"auth_{i:04d}",
                    author_name=names[i],
                    affiliation=affiliations[i],
                    venue=venue_pools[i][int(rng.integers(len(venue_pools[i])))],
                    title=f"title_{counter - 1:05d}",
                    coauthors=tuple(coas),
                    references=tuple(refs),
                    first_author_count=1,
                )
            )
            own_pubs[i].append(pub_id)
            all_pub_ids.append(pub_id)
    return records


def make_synthetic_dataset(
    n_authors: int = 200,
    pubs_per_author: int | tuple[int, int] = 10,
    *,
    negative_ratio: float = 2.0,
    split_ratio: float = 0.8,
    validation_ratio: float = 0.0,
    flip: tuple[float, float] | None = None,
    hide: tuple[float, float] | None = None,
    seed: int = 0,
    **generator_kwargs,
) -> RelationalDataset:
    """Generate records and assemble them into a learning task in one step."""
    records = make_synthetic_records(
        n_authors, pubs_per_author, seed=seed, **generator_kwargs
    )
    return build_dataset(
        records,
        negative_ratio=negative_ratio,
        split_ratio=split_ratio,
        validation_ratio=validation_ratio,
        flip=flip,
        hide=hide,
        seed=seed,
    )
