"""Converse side: acyclic index-coding bounds along pruned permutations,
coefficient accumulation over permutations and demands, and the type-wise
convex-envelope lower bound on the average (and worst-case) load.

Entropies of transmissions are represented by exact bit lengths.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from itertools import chain, combinations, permutations
from typing import Iterator, Mapping, Sequence

from .combinatorics import binom, lower_convex_envelope
from .demand import (
    Composition,
    all_demands,
    check_demand,
    composition_of,
    n_distinct_excluding,
    representative,
    type_cardinality,
    types,
    worst_case_demand,
)

MAX_ENUM_USERS = 8

Triple = tuple[int, int, tuple[int, ...]]  # (receiver k, transmitter i, cachers V)
PieceSizeProfile = Mapping[Triple, Fraction]
CoefficientTable = Counter


def prune_permutation(u: Sequence[int], d: Sequence[int]) -> tuple[int, ...]:
    """Keep, for every file, only the earliest user of ``u`` requesting it."""
    d = check_demand(d)
    K = len(d)
    u = tuple(u)
    if len(u) != K - 1 or len(set(u)) != K - 1 or not set(u) <= set(range(1, K + 1)):
        raise ValueError(f"{u} is not a permutation of K-1 users out of {K}")
    seen = set()
    out = []
    for user in u:
        f = d[user - 1]
        if f not in seen:
            seen.add(f)
            out.append(user)
    return tuple(out)


def _supersets_of(i: int, pool: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Every V with i in V and V - {i} a subset of ``pool``, sorted."""
    pool = sorted(pool)
    for S in chain.from_iterable(combinations(pool, r) for r in range(len(pool) + 1)):
        yield tuple(sorted(S + (i,)))


def permutation_terms(i: int, u: Sequence[int], d: Sequence[int]) -> Iterator[Triple]:
    """Index triples summed by the acyclic bound on |X_i| for permutation ``u``."""
    K = len(d)
    f = prune_permutation(u, d)
    removed: set[int] = set()
    for fj in f:
        removed.add(fj)
        pool = [x for x in range(1, K + 1) if x != i and x not in removed]
        for V in _supersets_of(i, pool):
            yield (fj, i, V)


def lemma1_bound(i: int, u: Sequence[int], d: Sequence[int], profile: PieceSizeProfile) -> Fraction:
    return sum((Fraction(profile.get(term, 0)) for term in permutation_terms(i, u, d)), Fraction(0))


def _permutations_without(i: int, K: int):
    return permutations([x for x in range(1, K + 1) if x != i])


def _guard(K: int) -> None:
    if K > MAX_ENUM_USERS:
        raise ValueError(f"permutation enumeration limited to K <= {MAX_ENUM_USERS}, got {K}")


def max_permutation_bound(i: int, d: Sequence[int], profile: PieceSizeProfile) -> Fraction:
    _guard(len(d))
    return max(lemma1_bound(i, u, d, profile) for u in _permutations_without(i, len(d)))


def accumulate_coefficients(d: Sequence[int], K: int | None = None) -> CoefficientTable:
    """Count a(k, i, V): how often |W^{k,i}_{d_k,V}| appears over all transmitters
    and all (K-1)! permutations of the other users."""
    d = check_demand(d, K=K)
    K = len(d)
    _guard(K)
    table: CoefficientTable = Counter()
    for i in range(1, K + 1):
        for u in _permutations_without(i, K):
            table.update(permutation_terms(i, u, d))
    return table


def symmetry_violations(table: CoefficientTable, K: int) -> list[tuple[int, tuple[int, ...], dict]]:
    """(k, V, {i: a}) wherever a(k, i, V) differs across i in V."""
    bad = []
    for k in range(1, K + 1):
        others = [x for x in range(1, K + 1) if x != k]
        for V in chain.from_iterable(combinations(others, r) for r in range(1, K)):
            values = {i: table.get((k, i, V), 0) for i in V}
            if len(set(values.values())) > 1:
                bad.append((k, V, values))
    return bad


def per_demand_coefficients(d: Sequence[int], mode: str = "strict") -> dict[tuple[int, tuple[int, ...]], Fraction]:
    """a^k_V = a(k, i, V) / (K-1)! for each receiver k and V not containing k.

    The accumulated counts need not agree across i in V. ``mode`` picks how
    they are reduced to one value: ``"strict"`` raises on disagreement,
    ``"mean"`` symmetrizes by averaging over i, ``"min"`` keeps the smallest
    (the reduction that remains a valid lower bound).
    """
    if mode not in ("strict", "mean", "min"):
        raise ValueError(f"unknown mode {mode!r}")
    d = check_demand(d)
    K = len(d)
    table = accumulate_coefficients(d)
    scale = math.factorial(K - 1)
    out = {}
    for k in range(1, K + 1):
        others = [x for x in range(1, K + 1) if x != k]
        for V in chain.from_iterable(combinations(others, r) for r in range(1, K)):
            values = [table.get((k, i, V), 0) for i in V]
            if mode == "strict" and len(set(values)) > 1:
                raise ValueError(f"coefficients not symmetric for d={d}, k={k}, V={V}: {values}")
            a = min(values) if mode == "min" else Fraction(sum(values), len(values))
            if a:
                out[(k, V)] = Fraction(a) / scale
    return out


def b_coefficients_bruteforce(
    s: Composition, N: int, K: int, mode: str = "mean"
) -> dict[tuple[int, tuple[int, ...]], Fraction]:
    """Coefficient of |W_{q,V}| after summing per-demand bounds over the type ``s``."""
    b: dict[tuple[int, tuple[int, ...]], Fraction] = {}
    for d in all_demands(N, K):
        if composition_of(d, N) != tuple(s):
            continue
        for (k, V), a in per_demand_coefficients(d, mode).items():
            key = (d[k - 1], V)
            b[key] = b.get(key, Fraction(0)) + a
    return b


def b_t_bruteforce(s: Composition, N: int, K: int, mode: str = "mean") -> dict[int, Fraction]:
    """b_t for t in [1..K]; raises if b_{q,V} is not constant over |V| = t."""
    b = b_coefficients_bruteforce(s, N, K, mode)
    out = {}
    for t in range(1, K + 1):
        values = {b.get((q, V), Fraction(0)) for q in range(1, N + 1) for V in combinations(range(1, K + 1), t)}
        if len(values) != 1:
            raise ValueError(f"b_(q,V) not constant over |V|={t} for s={s}: {sorted(values)}")
        out[t] = values.pop()
    return out


def _pruned_sum(s: Composition, K: int, t: int) -> int:
    d = representative(s)
    return sum(binom(K - n_distinct_excluding(d, i) - 1, t) for i in range(1, K + 1))


def b_t_coefficient(s: Composition, N: int, K: int, t: int) -> Fraction:
    if not 1 <= t <= K:
        raise ValueError(f"t={t} outside [1..{K}]")
    numer = K * binom(K - 1, t) - _pruned_sum(s, K, t)
    return Fraction(type_cardinality(s, N, K) * numer, t * N * math.comb(K, t))


def r_t_s(s: Composition, N: int, K: int, t: int, F: int = 1) -> Fraction:
    """Per-bit weight of x_t in the type-``s`` bound; r * N * F is the load at t.

    Only t >= 1 is meaningful: bits cached by nobody can never be delivered.
    """
    if not 1 <= t <= K:
        raise ValueError(f"t={t} outside [1..{K}]")
    top = binom(K - 1, t) - Fraction(_pruned_sum(s, K, t), K)
    return top / (binom(K - 1, t - 1) * N * F)


def _type_envelope(s: Composition, N: int, K: int):
    return lower_convex_envelope((t, r_t_s(s, N, K, t) * N) for t in range(1, K + 1))


def _t_of(N: int, K: int, M) -> Fraction:
    M = Fraction(M)
    if not Fraction(N, K) <= M <= N:
        raise ValueError(f"M={M} outside [N/K, N]")
    return M * K / N


def average_converse(N: int, K: int, M) -> Fraction:
    """E_s[Conv_t(r_{t,s} N F)] at t = KM/N, with type probabilities |D_s| / N^K."""
    t = _t_of(N, K, M)
    total = sum(size * _type_envelope(s, N, K)(t) for s, size in types(N, K))
    return total / N**K


def worst_case_converse(N: int, K: int, M) -> Fraction:
    """Same chain restricted to the worst-case type."""
    t = _t_of(N, K, M)
    s = composition_of(worst_case_demand(N, K), N)
    return _type_envelope(s, N, K)(t)


def profile_from_traces(traces, subpiece_bits: int) -> dict[Triple, Fraction]:
    """Bits of W_{d_k,V} decoded by user k from X_i, read off decoder traces.

    ``traces[k-1]`` is the recovery list of user k.
    """
    profile: dict[Triple, Fraction] = {}
    for k, trace in enumerate(traces, start=1):
        for rec in trace:
            key = (k, rec.transmitter, rec.piece.cachers)
            profile[key] = profile.get(key, Fraction(0)) + subpiece_bits
    return profile


def placement_stats(caches, N: int, K: int) -> list[int]:
    """x_t: total bits of subfiles held by exactly t users, for t in [0..K]."""
    holders: dict[tuple, set[int]] = {}
    sizes: dict[tuple, int] = {}
    for cache in caches:
        for key, data in cache.pieces.items():
            holders.setdefault(key, set()).add(cache.user)
            sizes[key] = 8 * len(data)
    x = [0] * (K + 1)
    for key, users in holders.items():
        x[len(users)] += sizes[key]
    return x
