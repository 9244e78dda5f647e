"""Named generator matrices.  Only generators are stored; closures are
always recomputed."""

from __future__ import annotations

from .charmatrix import GenMatrix

EXAMPLES: dict[str, tuple[tuple[int, ...], ...]] = {
    "min.19.1.1.7": (
        (2, 2, 1, 3),
        (1, 0, 2, 2),
    ),
    "min.72.1.1.502": (
        (0, 3, 2, 1, 2),
        (2, 2, 1, 1, 1),
        (1, 1, 0, 2, 2),
    ),
    "deltaP": (
        (1, 3, 2),
        (2, 1, 3),
    ),
    "lower:k2": (
        (1, 2, 2),
        (2, 1, 3),
    ),
    "lower:k3": (
        (0, 3, 2, 1, 2),
        (2, 2, 1, 1, 1),
        (1, 1, 0, 2, 2),
    ),
    "lower:k4": (
        (1, 2, 2, 2, 2, 2, 2, 0, 0, 0),
        (2, 1, 2, 2, 3, 0, 0, 2, 2, 0),
        (2, 2, 1, 2, 0, 3, 0, 3, 0, 2),
        (2, 2, 2, 1, 0, 0, 3, 0, 3, 3),
    ),
    "lower:k5": (
        (1, 2, 2, 2, 2, 2, 2, 0, 0, 0, 0, 0, 0, 2),
        (2, 1, 2, 2, 2, 0, 0, 2, 2, 2, 0, 0, 0, 3),
        (2, 2, 1, 2, 2, 0, 0, 3, 0, 0, 2, 2, 0, 3),
        (2, 2, 2, 1, 2, 3, 0, 0, 3, 0, 3, 0, 2, 0),
        (2, 2, 2, 2, 1, 0, 3, 0, 0, 3, 0, 3, 3, 0),
    ),
}


def example_names() -> list[str]:
    return list(EXAMPLES)


def get_example(name: str) -> GenMatrix:
    try:
        return GenMatrix(EXAMPLES[name])
    except KeyError:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(EXAMPLES)}") from None
