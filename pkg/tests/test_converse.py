import math
from fractions import Fraction
from itertools import combinations, permutations, product

import pytest

from d2dcache.analysis import average_load, load_at_memory, worst_case_load
from d2dcache.combinatorics import compositions_of_demands, is_convex, is_nonincreasing
from d2dcache.converse import (
    accumulate_coefficients,
    average_converse,
    b_t_bruteforce,
    b_t_coefficient,
    lemma1_bound,
    permutation_terms,
    max_permutation_bound,
    per_demand_coefficients,
    placement_stats,
    profile_from_traces,
    prune_permutation,
    r_t_s,
    symmetry_violations,
    worst_case_converse,
)
from d2dcache.demand import all_demands
from d2dcache.scheme import SystemParams, man_placement, random_library, simulate


def test_prune_examples():
    assert prune_permutation((2, 3, 5, 4), (1, 2, 2, 3, 3)) == (2, 5)
    assert prune_permutation((3, 1, 2), (1, 2, 3, 4)) == (3, 1, 2)
    assert prune_permutation((4, 2, 1), (5, 5, 5, 5)) == (4,)
    for bad in [(1, 1, 2), (1, 2), (1, 2, 7)]:
        with pytest.raises(ValueError):
            prune_permutation(bad, (1, 1, 1, 1))


def test_permutation_bound_smallest_case():
    assert list(permutation_terms(1, (2,), (1, 1))) == [(2, 1, (1,))]
    assert lemma1_bound(1, (2,), (1, 2), {(2, 1, (1,)): Fraction(5)}) == 5


def test_permutation_bound_zero_profile():
    assert lemma1_bound(1, (2, 3, 4), (1, 2, 1, 1), {}) == 0


def test_permutation_terms_brute():
    # oracle: the acyclic chain from its definition, enumerating every subset of [K]
    d, i, u = (1, 2, 2, 3, 3), 1, (2, 3, 5, 4)
    f = prune_permutation(u, d)
    want = []
    for j, fj in enumerate(f):
        banned = set(f[: j + 1])
        for r in range(1, 6):
            for V in combinations(range(1, 6), r):
                if i in V and not banned & set(V):
                    want.append((fj, i, V))
    assert sorted(permutation_terms(i, u, d)) == sorted(want)


def test_permutation_bound_tight_golden():
    d = (1, 2, 1, 1)
    params = SystemParams.from_subpiece_bytes(2, 4, 2)
    res = simulate(params, d)
    profile = profile_from_traces(res.traces, 8)
    for x in res.transmissions:
        perms = list(permutations([k for k in range(1, 5) if k != x.transmitter]))
        assert len(perms) == 6
        assert max(lemma1_bound(x.transmitter, u, d, profile) for u in perms) == x.bits


def test_scheme_profile_covers_subfiles():
    d = (1, 1, 2, 3)
    params = SystemParams.from_subpiece_bytes(3, 4, 2)
    res = simulate(params, d)
    profile = profile_from_traces(res.traces, 8)
    sub_bits = 8 * params.subfile_bytes
    for k in range(1, 5):
        for V in combinations([x for x in range(1, 5) if x != k], 2):
            assert sum(profile.get((k, i, V), 0) for i in V) >= sub_bits


def test_accumulate_k2():
    table = accumulate_coefficients((1, 1))
    assert table == {(2, 1, (1,)): 1, (1, 2, (2,)): 1}


def test_symmetry_golden_demand():
    assert symmetry_violations(accumulate_coefficients((1, 2, 1, 1)), 4) == []


def test_symmetry_counterexample():
    # hand count: perms of {1,3,4} where 3 is not a leader ahead of 1 (4 of 6),
    # versus perms of {1,2,4} with 1 ahead of 2 (3 of 6)
    table = accumulate_coefficients((1, 1, 2, 2))
    assert table[(1, 2, (2, 3))] == 4
    assert table[(1, 3, (2, 3))] == 3
    with pytest.raises(ValueError):
        per_demand_coefficients((1, 1, 2, 2), "strict")


def test_accumulate_guard():
    with pytest.raises(ValueError):
        accumulate_coefficients(tuple(range(1, 10)))


def test_b_t_examples():
    assert b_t_coefficient((1, 1), 2, 2, 1) == 1
    assert b_t_bruteforce((1, 1), 2, 2)[1] == 1
    assert b_t_coefficient((3, 1), 2, 4, 4) == 0
    with pytest.raises(ValueError):
        b_t_coefficient((3, 1), 2, 4, 0)


@pytest.mark.parametrize("N,K", [(2, 3), (2, 4), (3, 4)])
def test_min_reduction_never_exceeds_mean(N, K):
    for s in compositions_of_demands(N, K):
        lo, mid = b_t_bruteforce(s, N, K, "min"), b_t_bruteforce(s, N, K, "mean")
        assert all(lo[t] <= mid[t] for t in mid)


def test_r_t_s_examples():
    assert r_t_s((3, 1), 2, 4, 2) == Fraction(11, 24)
    assert r_t_s((3, 1), 2, 4, 2) * 2 == Fraction(11, 12)
    assert r_t_s((3, 1), 2, 4, 4) == 0
    with pytest.raises(ValueError):
        r_t_s((3, 1), 2, 4, 0)


@pytest.mark.parametrize("N", range(1, 9))
@pytest.mark.parametrize("K", range(2, 9))
def test_r_convex_nonincreasing(N, K):
    for s in compositions_of_demands(N, K):
        r = [r_t_s(s, N, K, t) for t in range(1, K + 1)]
        assert is_nonincreasing(r)
        assert is_convex(list(enumerate(r, start=1)))


def test_average_converse_examples():
    assert average_converse(2, 2, 1) == 1
    assert average_converse(3, 4, 3) == 0
    with pytest.raises(ValueError):
        average_converse(2, 4, Fraction(1, 4))


@pytest.mark.parametrize("N", range(1, 6))
@pytest.mark.parametrize("K", range(2, 6))
def test_converse_equals_achievability(N, K):
    for t in range(1, K + 1):
        M = Fraction(t * N, K)
        assert average_converse(N, K, M) == average_load(N, K, t)
        assert worst_case_converse(N, K, M) == worst_case_load(N, K, t)


@pytest.mark.parametrize("N,K", [(2, 4), (3, 5), (4, 3)])
def test_converse_matches_memory_sharing(N, K):
    for j in range(4 * K + 1):
        M = Fraction(N, K) + (N - Fraction(N, K)) * j / (4 * K)
        assert average_converse(N, K, M) == load_at_memory(N, K, M, "oneshot", "average")
        assert worst_case_converse(N, K, M) == load_at_memory(N, K, M, "oneshot", "worst")


@pytest.mark.parametrize("N,K", [(2, 4), (3, 5), (1, 3)])
def test_placement_stats(N, K):
    for t in range(1, K + 1):
        params = SystemParams.from_subpiece_bytes(N, K, t)
        x = placement_stats(man_placement(params, random_library(params, 0)), N, K)
        assert sum(x) == N * params.F
        assert x[t] == N * params.F
        assert sum(j * xj for j, xj in enumerate(x)) == K * params.M * params.F
