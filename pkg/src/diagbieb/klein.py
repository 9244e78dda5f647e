"""Arithmetic of the Klein four-group on matrix entries.

An entry is a 2-bit code.  The high bit records the sign of the holonomy
action on a lattice coordinate (set means -1), the low bit records the
half-translation (set means 1/2).  So

    0 = (+1, 0)    1 = (+1, 1/2)    2 = (-1, 0)    3 = (-1, 1/2)

Composition of the corresponding circle maps is XOR of the codes, since
-1/2 and 1/2 agree modulo 1.
"""

from __future__ import annotations

from typing import Sequence

ENTRIES = (0, 1, 2, 3)

Row = tuple[int, ...]


def check_entry(a: int) -> int:
    if a not in (0, 1, 2, 3):
        raise ValueError(f"entry must be one of 0,1,2,3, got {a!r}")
    return a


def sign(a: int) -> int:
    """+1 or -1, the action of the entry on its coordinate."""
    return -1 if a & 2 else 1


def half(a: int) -> int:
    """1 if the entry carries a half translation, else 0."""
    return a & 1


def from_parts(sgn: int, frac2: int) -> int:
    """Inverse of (sign, half): `frac2` is the translation doubled, taken mod 2."""
    if sgn not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return (2 if sgn == -1 else 0) | (frac2 & 1)


def star(a: int, b: int) -> int:
    return a ^ b


def star_rows(r1: Sequence[int], r2: Sequence[int]) -> Row:
    if len(r1) != len(r2):
        raise ValueError(f"row lengths differ: {len(r1)} != {len(r2)}")
    return tuple(a ^ b for a, b in zip(r1, r2))


def phi(r: Sequence[int]) -> tuple[str, ...]:
    """Sign classes of a row: 'p' for entries 0,1 and 'q' for 2,3."""
    return tuple("q" if a & 2 else "p" for a in r)


# Packed rows: entry j sits in bits 2j, 2j+1.  star on packed rows is a
# single XOR of the words.

def pack_row(r: Sequence[int]) -> int:
    w = 0
    for j, a in enumerate(r):
        w |= check_entry(a) << (2 * j)
    return w


def unpack_row(w: int, n: int) -> Row:
    return tuple((w >> (2 * j)) & 3 for j in range(n))


def _lane_mask(n: int) -> int:
    return int("01" * n, 2) if n else 0


def packed_ones(w: int, n: int) -> int:
    """Bitmask (bit j) of positions holding entry 1 in a packed row."""
    lo = _lane_mask(n)
    hits = w & ~(w >> 1) & lo
    return _compress(hits, n)


def packed_signs(w: int, n: int) -> int:
    """Bitmask (bit j) of positions holding entry 2 or 3."""
    return _compress((w >> 1) & _lane_mask(n), n)


def _compress(lanes: int, n: int) -> int:
    out = 0
    for j in range(n):
        if lanes >> (2 * j) & 1:
            out |= 1 << j
    return out
