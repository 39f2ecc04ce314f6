from collections import Counter
from itertools import product

import pytest

from d2dcache.analysis import per_demand_load
from d2dcache.combinatorics import compositions_of_demands
from d2dcache.demand import (
    all_leader_sets,
    composition_of,
    n_distinct,
    n_distinct_excluding,
    parse_demand,
    representative,
    select_leaders,
    type_cardinality,
    worst_case_demand,
)


@pytest.mark.parametrize("d,want", [((1, 2, 1, 1), 2), ((1, 1, 1, 1), 1), ((1, 2, 3), 3)])
def test_n_distinct(d, want):
    assert n_distinct(d) == want


@pytest.mark.parametrize("d,k,want", [((1, 2, 1, 1), 2, 1), ((1, 2, 1, 1), 1, 2), ((1, 1), 1, 1)])
def test_n_distinct_excluding(d, k, want):
    assert n_distinct_excluding(d, k) == want


def test_n_distinct_excluding_range():
    with pytest.raises(ValueError):
        n_distinct_excluding((1, 2), 3)


@pytest.mark.parametrize("d,N,want", [((1, 2, 1, 1), 2, (3, 1)), ((1, 2), 2, (1, 1)), ((2, 2, 2), 3, (3, 0, 0))])
def test_composition_of(d, N, want):
    assert composition_of(d, N) == want


def brute_type_sizes(N, K):
    return Counter(composition_of(d, N) for d in product(range(1, N + 1), repeat=K))


@pytest.mark.parametrize("s,N,K,want", [((1, 1), 2, 2, 2), ((2, 0), 2, 2, 2), ((3, 1), 2, 4, 8)])
def test_type_cardinality_examples(s, N, K, want):
    assert type_cardinality(s, N, K) == want
    assert brute_type_sizes(N, K)[s] == want


@pytest.mark.parametrize("N", range(1, 7))
@pytest.mark.parametrize("K", range(1, 7))
def test_type_cardinalities_sum_to_all_demands(N, K):
    sizes = {s: type_cardinality(s, N, K) for s in compositions_of_demands(N, K)}
    assert sum(sizes.values()) == N**K
    if N**K <= 50_000:
        assert sizes == dict(brute_type_sizes(N, K))


@pytest.mark.parametrize("N,K", [(2, 3), (3, 3), (3, 4), (4, 4)])
def test_excluding_drops_by_one_iff_singleton(N, K):
    for d in product(range(1, N + 1), repeat=K):
        for k in range(1, K + 1):
            ne, nek = n_distinct(d), n_distinct_excluding(d, k)
            assert nek in (ne - 1, ne)
            assert (nek == ne - 1) == (d.count(d[k - 1]) == 1)


@pytest.mark.parametrize("d,i,want", [((1, 2, 1, 1), 2, (1,)), ((1, 2, 1, 1), 1, (2, 3)), ((1, 2, 3), 3, (1, 2))])
def test_select_leaders(d, i, want):
    assert select_leaders(d, i).leaders == want


@pytest.mark.parametrize("N,K", [(2, 4), (3, 4), (3, 5)])
def test_leaders_distinct_and_sized(N, K):
    for d in product(range(1, N + 1), repeat=K):
        for i in range(1, K + 1):
            ls = select_leaders(d, i)
            assert i not in ls.leaders
            assert len(ls.leaders) == n_distinct_excluding(d, i)
            assert len({d[u - 1] for u in ls.leaders}) == len(ls.leaders)
            for alt in all_leader_sets(d, i):
                assert len({d[u - 1] for u in alt.leaders}) == len(ls.leaders)


def test_all_leader_sets_example():
    # U^2 may be user 1, 3 or 4: all request file 1
    assert sorted(ls.leaders for ls in all_leader_sets((1, 2, 1, 1), 2)) == [(1,), (3,), (4,)]


@pytest.mark.parametrize("N,K,want", [(10, 5, (1, 2, 3, 4, 5)), (2, 4, (1, 1, 2, 2)), (3, 4, (1, 1, 2, 3))])
def test_worst_case_demand_examples(N, K, want):
    assert worst_case_demand(N, K) == want


@pytest.mark.parametrize("N", range(1, 6))
@pytest.mark.parametrize("K", range(2, 6))
def test_worst_case_demand_maximizes(N, K):
    wd = worst_case_demand(N, K)
    for t in range(1, K + 1):
        best = max(per_demand_load(N, K, t, d) for d in product(range(1, N + 1), repeat=K))
        assert per_demand_load(N, K, t, wd) == best


@pytest.mark.parametrize("N,K", [(2, 4), (2, 5), (3, 6)])
def test_any_all_repeated_composition_is_worst(N, K):
    # every file requested at least twice => every N_e(d without k) = N
    for s in compositions_of_demands(N, K):
        if min(s) >= 2:
            for t in range(1, K + 1):
                assert per_demand_load(N, K, t, representative(s)) == per_demand_load(N, K, t, worst_case_demand(N, K))


def test_parse_demand():
    assert parse_demand("1,2,1,1") == (1, 2, 1, 1)
    for bad in ("", "1,,2", "0,1", "a"):
        with pytest.raises(ValueError):
            parse_demand(bad)
