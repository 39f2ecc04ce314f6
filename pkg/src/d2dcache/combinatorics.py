"""Exact combinatorics: binomials, subset enumeration, compositions and
lower convex envelopes over rationals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

Rational = Fraction

MAX_USERS = 64


def binom(x: int, y: int) -> int:
    """Binomial coefficient with the convention C(x, y) = 0 if x < y or x <= 0.

    Negative ``y`` also yields 0.
    """
    if x <= 0 or x < y or y < 0:
        return 0
    return math.comb(x, y)


def subsets(ground_set: Iterable[int], size: int) -> Iterator[tuple[int, ...]]:
    """All ``size``-subsets of ``ground_set`` as ascending tuples, in lex order."""
    return combinations(sorted(ground_set), size)


def subset_rank(subset: Sequence[int], n: int) -> int:
    """Lexicographic rank of a sorted subset of ``[1..n]`` among subsets of its size."""
    size = len(subset)
    rank = 0
    prev = 0
    for j, v in enumerate(subset, start=1):
        for x in range(prev + 1, v):
            rank += math.comb(n - x, size - j)
        prev = v
    return rank


def compositions_of_demands(N: int, K: int) -> list[tuple[int, ...]]:
    """Partitions of K into at most N parts, zero-padded to length N.

    Returned in reverse lexicographic order, e.g. (4,0), (3,1), (2,2).
    """
    if N < 1 or K < 1:
        raise ValueError("N and K must be positive")
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, cap: int, prefix: list[int]) -> None:
        if len(prefix) == N:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        for part in range(min(remaining, cap), -1, -1):
            # the remaining slots cannot absorb more than part each
            if part * (N - len(prefix)) < remaining:
                break
            prefix.append(part)
            rec(remaining - part, part, prefix)
            prefix.pop()

    rec(K, K, [])
    return out


@dataclass(frozen=True)
class Envelope:
    """Piecewise-linear lower convex envelope given by its retained vertices."""

    vertices: tuple[tuple[Fraction, Fraction], ...]

    @property
    def domain(self) -> tuple[Fraction, Fraction]:
        return self.vertices[0][0], self.vertices[-1][0]

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        lo, hi = self.domain
        if x < lo or x > hi:
            raise ValueError(f"{x} outside envelope domain [{lo}, {hi}]")
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        return self.vertices[0][1]


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_convex_envelope(points: Iterable[tuple]) -> Envelope:
    """Lower convex hull of ``(x, y)`` points, exact in rationals.

    Collinear interior points are dropped.
    """
    pts = sorted((Fraction(x), Fraction(y)) for x, y in points)
    if not pts:
        raise ValueError("envelope of an empty point set")
    for (x0, _), (x1, _) in zip(pts, pts[1:]):
        if x0 == x1:
            raise ValueError(f"duplicate abscissa {x0}")
    hull: list[tuple[Fraction, Fraction]] = []
    for p in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return Envelope(tuple(hull))


def is_convex(points: Sequence[tuple]) -> bool:
    """True when the slopes of the sorted polyline are nondecreasing."""
    pts = sorted((Fraction(x), Fraction(y)) for x, y in points)
    slopes = [(y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(pts, pts[1:])]
    return all(a <= b for a, b in zip(slopes, slopes[1:]))


def is_nonincreasing(values: Sequence) -> bool:
    return all(a >= b for a, b in zip(values, values[1:]))


def frac_str(x: Fraction) -> str:
    """Always ``p/q``, including integers (``0/1``)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def float12(x: Fraction) -> float:
    """Float rounded to 12 significant digits."""
    return float(f"{float(x):.12g}")
