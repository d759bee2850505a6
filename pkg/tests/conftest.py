"""Shared fixtures.

The expensive synthetic-graph models are session-scoped so the acceptance
tests can share one training run across several criteria.
"""

from __future__ import annotations

import random

import pytest

from relboost import (
    Atom,
    Constant,
    FactBase,
    Variable,
    authorship_modes,
    authorship_schema,
    authorship_target,
)
from relboost.tree import Inner, Leaf, RelationalRegressionTree


@pytest.fixture(scope="session")
def schema():
    return authorship_schema()


@pytest.fixture(scope="session")
def target(schema):
    return authorship_target(schema)


@pytest.fixture(scope="session")
def modes(schema):
    return authorship_modes(schema)


def atom(schema, name: str, *args: str) -> Atom:
    """Ground-or-variable atom; uppercase-initial tokens become variables."""
    sig = schema.resolve(name, len(args))
    terms = tuple(
        Variable(a) if a[:1].isupper() or a[:1] == "_" else Constant(a)
        for a in args
    )
    return Atom(sig, terms)


@pytest.fixture(scope="session")
def citation_tree(schema, target):
    """Hand-built tree over citation/affiliation patterns; nine-clause list.

    Left-to-right clause values:
    0.856, 0.067, 0.858, 0.060, 0.858, 0.087, 0.182, 0.204, 0.191.
    """
    a = lambda name, *args: atom(schema, name, *args)
    n4 = Inner((a("pub", "F", "B"),), Leaf(0.858), Leaf(0.060))
    n5 = Inner((a("pub", "F", "B"),), Leaf(0.858), Leaf(0.087))
    n3 = Inner((a("ref", "A", "H"), a("aff", "A", "G")), n4, n5)
    n7 = Inner((a("coa", "A", "K"), a("ven", "A", "M")), Leaf(0.204), Leaf(0.191))
    n6 = Inner((a("ref", "A", "I"), a("coa", "A", "J")), Leaf(0.182), n7)
    n2 = Inner((a("ref", "F", "A"), a("aff", "F", "G")), n3, n6)
    n1 = Inner((a("ref", "A", "D"), a("title", "D", "E")), Leaf(0.067), n2)
    n0 = Inner((a("ref", "A", "C"), a("pub", "C", "B")), Leaf(0.856), n1)
    return RelationalRegressionTree(target, n0)


@pytest.fixture()
def citation_facts(schema):
    fb = FactBase(schema)
    fb.add(atom(schema, "ref", "p1", "p2"))
    fb.add(atom(schema, "pub", "p2", "alice"))
    return fb


def random_fact_base(
    schema, rng: random.Random, max_constants: int = 6, max_facts: int = 12
) -> FactBase:
    """Small random fact base over the authorship predicates."""
    constants = [f"c{i}" for i in range(rng.randint(2, max_constants))]
    sigs = list(schema.signatures)
    fb = FactBase(schema)
    for _ in range(rng.randint(0, max_facts)):
        sig = rng.choice(sigs)
        args = tuple(Constant(rng.choice(constants)) for _ in range(sig.arity))
        fb.add(Atom(sig, args))
    return fb


def random_conjunction(
    schema, rng: random.Random, max_literals: int = 4, n_vars: int = 4
) -> list[Atom]:
    """Random conjunction mixing shared variables and constants."""
    names = ["X", "Y", "Z", "W"][:n_vars]
    constants = [f"c{i}" for i in range(6)]
    sigs = list(schema.signatures)
    out = []
    for _ in range(rng.randint(1, max_literals)):
        sig = rng.choice(sigs)
        terms = []
        for _ in range(sig.arity):
            if rng.random() < 0.7:
                terms.append(Variable(rng.choice(names)))
            else:
                terms.append(Constant(rng.choice(constants)))
        out.append(Atom(sig, tuple(terms)))
    return out


def random_tree(
    schema, target, rng: random.Random, depth: int = 3
) -> RelationalRegressionTree:
    """Random tree whose nodes reuse head variables A, B plus fresh ones."""
    fresh = iter(f"V{i}" for i in range(100))

    def node(level: int, bound: list[str]):
        if level >= depth or rng.random() < 0.25:
            return Leaf(round(rng.uniform(-1, 1), 6))
        literals = []
        scope = list(bound)
        for _ in range(rng.randint(1, 2)):
            sig = rng.choice(list(schema.signatures))
            terms = []
            for _ in range(sig.arity):
                roll = rng.random()
                if roll < 0.5 and scope:
                    terms.append(Variable(rng.choice(scope)))
                elif roll < 0.8:
                    new = next(fresh)
                    scope.append(new)
                    terms.append(Variable(new))
                else:
                    terms.append(Constant(f"c{rng.randint(0, 5)}"))
            literals.append(Atom(sig, tuple(terms)))
        return Inner(tuple(literals), node(level + 1, scope), node(level + 1, bound))

    root = node(0, ["A", "B"])
    if isinstance(root, Leaf):
        root = Inner(
            (Atom(schema.resolve("ref", 2), (Variable("A"), Variable("V99"))),),
            Leaf(0.5),
            root,
        )
    return RelationalRegressionTree(target, root)
