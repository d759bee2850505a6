"""Built-in schema for the publication-authorship domain.

Predicates relate a publication id to its attributes; `publication/2` is the
target relation (first-author authorship). Short aliases follow the usual
clausal shorthand so advice and clause files stay compact.
"""

from __future__ import annotations

from .induction import ModeDeclaration, default_modes
from .logic import PredicateSignature, Schema


def authorship_schema() -> Schema:
    return Schema(
        [
            PredicateSignature(
                "publication", ("publication-id", "author-id"), alias="pub"
            ),
            PredicateSignature(
                "author_name", ("publication-id", "name-string"), alias="aut"
            ),
            PredicateSignature(
                "affiliation", ("publication-id", "affiliation-string"), alias="aff"
            ),
            PredicateSignature(
                "venue", ("publication-id", "venue-string"), alias="ven"
            ),
            PredicateSignature(
                "reference", ("publication-id", "publication-id"), alias="ref"
            ),
            PredicateSignature(
                "coauthor", ("publication-id", "name-string"), alias="coa"
            ),
            PredicateSignature(
                "title", ("publication-id", "title-string")
            ),
        ]
    )


def authorship_target(schema: Schema | None = None) -> PredicateSignature:
    return (schema or authorship_schema()).resolve("publication", 2)


def authorship_modes(schema: Schema | None = None) -> list[ModeDeclaration]:
    schema = schema or authorship_schema()
    return default_modes(schema, authorship_target(schema))
