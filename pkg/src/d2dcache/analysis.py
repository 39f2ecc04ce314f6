"""Closed-form loads: per demand, average and worst case, memory sharing,
and the comparator schemes used in the memory-load plots."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .combinatorics import MAX_USERS, binom, float12, frac_str, lower_convex_envelope
from .demand import (
    check_demand,
    n_distinct,
    n_distinct_excluding,
    representative,
    types,
    worst_case_demand,
)

SCHEMES = ("oneshot", "ji_d2d", "shared_link")
DEMAND_MODES = ("average", "worst")
CSV_FIELDS = (
    "scheme", "demand_mode", "N", "K", "M_num", "M_den",
    "t_effective", "load_num", "load_den", "load_float",
)


@dataclass(frozen=True)
class LoadPoint:
    M: Fraction
    t: Fraction
    load: Fraction
    scheme_tag: str


def _check(N: int, K: int, t: int, lo: int = 1) -> None:
    if N < 1 or not 2 <= K <= MAX_USERS:
        raise ValueError(f"invalid system N={N}, K={K}")
    if not lo <= t <= K:
        raise ValueError(f"t={t} outside [{lo}..{K}]")


def per_demand_load(N: int, K: int, t: int, d: Sequence[int]) -> Fraction:
    """One-shot load of the leader-pruned scheme for demand ``d`` under MAN placement."""
    _check(N, K, t)
    d = check_demand(d, N, K)
    pruned = sum(binom(K - 1 - n_distinct_excluding(d, i), t) for i in range(1, K + 1))
    return (binom(K - 1, t) - Fraction(pruned, K)) / binom(K - 1, t - 1)


def average_load(N: int, K: int, t: int) -> Fraction:
    """Expected load for a uniform demand, summed type by type."""
    _check(N, K, t)
    total = sum(size * per_demand_load(N, K, t, representative(s)) for s, size in types(N, K))
    return total / N**K


def worst_case_load(N: int, K: int, t: int) -> Fraction:
    _check(N, K, t)
    top = binom(K - 1, t)
    if K <= N:
        pass
    elif K < 2 * N:
        top -= Fraction(2 * N - K, K) * binom(K - N, t) + Fraction(2 * (K - N), K) * binom(K - 1 - N, t)
    else:
        top -= binom(K - 1 - N, t)
    return Fraction(top) / binom(K - 1, t - 1)


def ji_d2d_load(N: int, K: int, t: int) -> Fraction:
    """D2D load without leader pruning, (K - t) / t."""
    _check(N, K, t)
    return Fraction(K - t, t)


def shared_link_load(N: int, K: int, t: int, n_e: int) -> Fraction:
    """Optimal uncoded-placement shared-link load with ``n_e`` distinct requests."""
    if N < 1 or K < 1 or not 0 <= t <= K:
        raise ValueError(f"invalid shared-link parameters N={N}, K={K}, t={t}")
    if not 1 <= n_e <= min(N, K):
        raise ValueError(f"n_e={n_e} outside [1..{min(N, K)}]")
    return Fraction(binom(K, t + 1) - binom(K - n_e, t + 1), binom(K, t))


def shared_link_decomposition(N: int, K: int, t: int, d: Sequence[int]) -> Fraction:
    """Average over transmitters of the (K-1)-user shared-link load at t-1."""
    d = check_demand(d, N, K)
    return sum(
        (shared_link_load(N, K - 1, t - 1, n_distinct_excluding(d, i)) for i in range(1, K + 1)),
        Fraction(0),
    ) / K


def scheme_load(scheme: str, demand_mode: str, N: int, K: int, t: int) -> Fraction:
    if scheme == "oneshot":
        return average_load(N, K, t) if demand_mode == "average" else worst_case_load(N, K, t)
    if scheme == "ji_d2d":
        return ji_d2d_load(N, K, t)
    if scheme == "shared_link":
        if demand_mode == "worst":
            return shared_link_load(N, K, t, min(N, K))
        total = sum(
            size * shared_link_load(N, K, t, n_distinct(representative(s)))
            for s, size in types(N, K)
        )
        return total / N**K
    raise ValueError(f"unknown scheme {scheme!r}")


def memory_grid(N: int, K: int, points: int | None = None) -> list[Fraction]:
    """Evenly spaced memories on [N/K, N] (4K+1 by default) merged with every t*N/K."""
    points = 4 * K + 1 if points is None else points
    if points < 2:
        raise ValueError("grid needs at least two points")
    lo, hi = Fraction(N, K), Fraction(N)
    grid = {lo + (hi - lo) * j / (points - 1) for j in range(points)}
    grid.update(Fraction(t * N, K) for t in range(1, K + 1))
    return sorted(grid)


def memory_load_curve(
    N: int,
    K: int,
    scheme_tag: str = "oneshot",
    demand_mode: str = "worst",
    grid: Iterable[Fraction] | None = None,
) -> list[LoadPoint]:
    """Lower convex envelope of the integer-t loads, sampled on a memory grid."""
    if scheme_tag not in SCHEMES or demand_mode not in DEMAND_MODES:
        raise ValueError(f"unknown scheme/demand mode {scheme_tag!r}/{demand_mode!r}")
    env = lower_convex_envelope(
        (Fraction(t * N, K), scheme_load(scheme_tag, demand_mode, N, K, t)) for t in range(1, K + 1)
    )
    grid = memory_grid(N, K) if grid is None else [Fraction(m) for m in grid]
    return [LoadPoint(M, M * K / N, env(M), scheme_tag) for M in grid]


def load_at_memory(N: int, K: int, M, scheme_tag: str = "oneshot", demand_mode: str = "worst") -> Fraction:
    """Load at an arbitrary memory in [N/K, N] via memory sharing."""
    return memory_load_curve(N, K, scheme_tag, demand_mode, [Fraction(M)])[0].load


def curve_rows(N: int, K: int, demand_mode: str, curve: Iterable[LoadPoint]) -> list[dict]:
    return [
        {
            "scheme": p.scheme_tag,
            "demand_mode": demand_mode,
            "N": N,
            "K": K,
            "M_num": p.M.numerator,
            "M_den": p.M.denominator,
            "t_effective": frac_str(p.t),
            "load_num": p.load.numerator,
            "load_den": p.load.denominator,
            "load_float": repr(float12(p.load)),
        }
        for p in curve
    ]


def rows_to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def worst_demand_load(N: int, K: int, t: int) -> Fraction:
    return per_demand_load(N, K, t, worst_case_demand(N, K))
