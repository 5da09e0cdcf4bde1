"""Colorings, arithmetic progressions and the certificate check.

Positions are 1-based (the integers 1..N being colored), color indices are
0-based.  A coloring is a certificate for W(r, k) > N when no k-term
arithmetic progression with difference d >= 1 is monochromatic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

from .errors import ColorOutOfRangeError, InvalidParameterError

__all__ = [
    "Coloring",
    "VdwInstance",
    "ApWitness",
    "VerificationReport",
    "enumerate_aps",
    "count_aps",
    "verify",
    "as_coloring",
]


@dataclass(frozen=True)
class Coloring:
    """A coloring of positions 1..N, stored 0-based in ``colors``."""

    colors: tuple[int, ...]

    def __post_init__(self) -> None:
        colors = tuple(int(c) for c in self.colors)
        if not colors:
            raise InvalidParameterError("a coloring needs at least one position")
        if min(colors) < 0:
            raise InvalidParameterError("color indices must be non-negative")
        object.__setattr__(self, "colors", colors)

    @property
    def N(self) -> int:
        return len(self.colors)

    def at(self, position: int) -> int:
        """Color of 1-based ``position``."""
        if not 1 <= position <= len(self.colors):
            raise IndexError(f"position {position} outside 1..{len(self.colors)}")
        return self.colors[position - 1]

    def num_colors_used(self) -> int:
        return len(set(self.colors))

    def __len__(self) -> int:
        return len(self.colors)

    def __iter__(self) -> Iterator[int]:
        return iter(self.colors)

    def __add__(self, other: "Coloring | Sequence[int]") -> "Coloring":
        return Coloring(self.colors + tuple(other))

    def prefix(self, n: int) -> "Coloring":
        return Coloring(self.colors[:n])


ColoringLike = Union[Coloring, Sequence[int]]


def as_coloring(c: ColoringLike) -> Coloring:
    return c if isinstance(c, Coloring) else Coloring(tuple(c))


@dataclass(frozen=True)
class VdwInstance:
    r: int
    k: int
    N: int

    def __post_init__(self) -> None:
        if self.r < 1:
            raise InvalidParameterError(f"r must be >= 1, got {self.r}")
        if self.k < 2:
            raise InvalidParameterError(f"k must be >= 2, got {self.k}")
        if self.N < 1:
            raise InvalidParameterError(f"N must be >= 1, got {self.N}")


@dataclass(frozen=True)
class ApWitness:
    """A monochromatic progression a, a+d, ..., a+(k-1)d of color ``color``."""

    a: int
    d: int
    color: int

    def positions(self, k: int) -> list[int]:
        return [self.a + j * self.d for j in range(k)]


@dataclass
class VerificationReport:
    valid: bool
    witnesses: list[ApWitness]
    ap_count_checked: int
    implied_lower_bound: int
    r_declared: int
    colors_used: int
    N: int
    k: int
    complete: bool = True  # False when fail_fast stopped the scan early

    def bound_text(self) -> str:
        return f"W({self.r_declared},{self.k}) > {self.N}"

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "N": self.N,
            "k": self.k,
            "r_declared": self.r_declared,
            "colors_used": self.colors_used,
            "ap_count_checked": self.ap_count_checked,
            "implied_lower_bound": self.implied_lower_bound,
            "complete": self.complete,
            "witnesses": [
                {"a": w.a, "d": w.d, "color": w.color} for w in self.witnesses
            ],
        }


def _check_k(k: int) -> None:
    if k < 2:
        raise InvalidParameterError(f"AP length k must be >= 2, got {k}")


def count_aps(N: int, k: int) -> int:
    """Closed form for the number of k-term APs inside 1..N."""
    _check_k(k)
    return sum(N - (k - 1) * d for d in range(1, (N - 1) // (k - 1) + 1))


def enumerate_aps(N: int, k: int) -> list[tuple[int, int]]:
    """All (a, d) with a, d >= 1 and a + (k-1)d <= N, ordered by (d, a)."""
    _check_k(k)
    if N < 1:
        raise InvalidParameterError(f"N must be >= 1, got {N}")
    span = k - 1
    return [
        (a, d)
        for d in range(1, (N - 1) // span + 1)
        for a in range(1, N - span * d + 1)
    ]


def _color_masks(colors: Sequence[int], r_declared: int) -> list[int]:
    masks = [0] * r_declared
    for pos, c in enumerate(colors):
        if c >= r_declared:
            raise ColorOutOfRangeError(pos + 1, c, r_declared)
        masks[c] |= 1 << pos
    return masks


def _set_bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def verify(
    coloring: ColoringLike,
    k: int,
    r_declared: int,
    *,
    fail_fast: bool = False,
) -> VerificationReport:
    """Check that no k-term AP of ``coloring`` is monochromatic.

    Each color class is held as an integer bitmask; for a difference d the
    AND of the mask shifted by 0, d, ..., (k-1)d has a bit set exactly at the
    starts of monochromatic progressions.  All witnesses are collected in
    (d, a) order unless ``fail_fast`` is set, in which case the scan stops at
    the first difference that yields one.
    """
    _check_k(k)
    if r_declared < 1:
        raise InvalidParameterError(f"r must be >= 1, got {r_declared}")
    coloring = as_coloring(coloring)
    colors = coloring.colors
    N = len(colors)
    masks = _color_masks(colors, r_declared)
    live = [(c, m) for c, m in enumerate(masks) if m]

    witnesses: list[ApWitness] = []
    checked = 0
    complete = True
    span = k - 1
    for d in range(1, (N - 1) // span + 1):
        checked += N - span * d
        found: list[ApWitness] = []
        for c, m in live:
            acc = m
            for j in range(1, k):
                acc &= m >> (j * d)
                if not acc:
                    break
            for bit in _set_bits(acc):
                found.append(ApWitness(bit + 1, d, c))
        if found:
            found.sort(key=lambda w: w.a)
            if fail_fast:
                witnesses.append(found[0])
                complete = d == (N - 1) // span
                break
            witnesses.extend(found)

    return VerificationReport(
        valid=not witnesses,
        witnesses=witnesses,
        ap_count_checked=checked,
        implied_lower_bound=N + 1,
        r_declared=r_declared,
        colors_used=coloring.num_colors_used(),
        N=N,
        k=k,
        complete=complete,
    )


def naive_witnesses(colors: Iterable[int], k: int) -> list[tuple[int, int, int]]:
    """Reference triple loop over (d, a, j); returns (a, d, color) triples."""
    seq = list(colors)
    N = len(seq)
    out = []
    for d in range(1, N):
        for a in range(1, N + 1):
            if a + (k - 1) * d > N:
                break
            first = seq[a - 1]
            if all(seq[a - 1 + j * d] == first for j in range(1, k)):
                out.append((a, d, first))
    return out
