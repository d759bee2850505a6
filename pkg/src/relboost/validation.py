"""Input validation helpers for the estimator-facing API."""

from __future__ import annotations

from typing import Sequence

from .errors import DataError
from .logic import Atom, Label, LabeledExample

_LABEL_VALUES = {
    "pos": Label.POSITIVE,
    "positive": Label.POSITIVE,
    "neg": Label.NEGATIVE,
    "negative": Label.NEGATIVE,
    "unobserved": Label.UNOBSERVED,
    1: Label.POSITIVE,
    0: Label.NEGATIVE,
    True: Label.POSITIVE,
    False: Label.NEGATIVE,
    None: Label.UNOBSERVED,
}


def as_label(value) -> Label:
    """Coerce 1/0/None, pos/neg/unobserved strings or Label to Label."""
    if isinstance(value, Label):
        return value
    try:
        return _LABEL_VALUES[value]
    except (KeyError, TypeError):
        raise DataError(f"cannot interpret label {value!r}") from None


def check_ground_atom(obj) -> Atom:
    if not isinstance(obj, Atom):
        raise DataError(f"expected a ground atom, got {type(obj).__name__}")
    if not obj.is_ground():
        raise DataError(f"example {obj} is not ground")
    return obj


def check_examples(X, y=None) -> list[LabeledExample]:
    """Normalize (X, y) into LabeledExample records.

    X may already be LabeledExample objects (then y must be None), or ground
    atoms paired with labels in y.
    """
    X = list(X)
    if X and isinstance(X[0], LabeledExample):
        if y is not None:
            raise DataError("y must be omitted when X holds labeled examples")
        for ex in X:
            if not isinstance(ex, LabeledExample):
                raise DataError("mixed example types in X")
            check_ground_atom(ex.atom)
        return X
    if y is None:
        raise DataError("y is required when X holds bare atoms")
    y = list(y)
    if len(X) != len(y):
        raise DataError(f"X and y length mismatch: {len(X)} vs {len(y)}")
    return [
        LabeledExample(check_ground_atom(atom), as_label(label))
        for atom, label in zip(X, y)
    ]
