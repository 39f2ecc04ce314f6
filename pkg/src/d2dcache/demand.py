"""Demand vectors, compositions (types) and leading-demander selection.

Users are numbered ``1..K`` and files ``1..N``. A demand vector is a plain
tuple ``d`` with ``d[k - 1]`` the file requested by user ``k``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

from .combinatorics import compositions_of_demands

Demand = tuple[int, ...]
Composition = tuple[int, ...]


@dataclass(frozen=True)
class LeaderSet:
    transmitter: int
    leaders: tuple[int, ...]


def check_demand(d: Sequence[int], N: int | None = None, K: int | None = None) -> Demand:
    d = tuple(int(x) for x in d)
    if not d:
        raise ValueError("empty demand vector")
    if K is not None and len(d) != K:
        raise ValueError(f"demand has {len(d)} entries, expected K={K}")
    if min(d) < 1 or (N is not None and max(d) > N):
        raise ValueError(f"demand entries must lie in [1..{N}]: {d}")
    return d


def parse_demand(text: str) -> Demand:
    """Parse a comma-separated list such as ``"1,2,1,1"``."""
    try:
        return check_demand([int(tok) for tok in text.split(",")])
    except ValueError as exc:
        raise ValueError(f"bad demand vector {text!r}: {exc}") from None


def _check_user(d: Demand, k: int) -> None:
    if not 1 <= k <= len(d):
        raise ValueError(f"user {k} out of range [1..{len(d)}]")


def n_distinct(d: Sequence[int]) -> int:
    return len(set(d))


def n_distinct_excluding(d: Sequence[int], k: int) -> int:
    """Number of distinct files requested by every user except ``k``."""
    _check_user(tuple(d), k)
    return len(set(d[: k - 1]) | set(d[k:]))


def composition_of(d: Sequence[int], N: int) -> Composition:
    counts = sorted(Counter(d).values(), reverse=True)
    if len(counts) > N:
        raise ValueError(f"demand uses more than N={N} files")
    return tuple(counts) + (0,) * (N - len(counts))


def type_cardinality(s: Composition, N: int, K: int) -> int:
    """Number of demand vectors in ``[N]^K`` with composition ``s``."""
    if len(s) != N or sum(s) != K:
        raise ValueError(f"{s} is not a composition for N={N}, K={K}")
    file_perms = math.factorial(N)
    for m in Counter(s).values():
        file_perms //= math.factorial(m)
    multinomial = math.factorial(K)
    for part in s:
        multinomial //= math.factorial(part)
    return file_perms * multinomial


def representative(s: Composition) -> Demand:
    """Canonical demand of type ``s``: file n repeated s_n times, in order."""
    return tuple(n for n, count in enumerate(s, start=1) for _ in range(count))


def all_demands(N: int, K: int) -> Iterator[Demand]:
    return product(range(1, N + 1), repeat=K)


def types(N: int, K: int) -> list[tuple[Composition, int]]:
    """Every composition with its type cardinality."""
    return [(s, type_cardinality(s, N, K)) for s in compositions_of_demands(N, K)]


def select_leaders(d: Sequence[int], i: int) -> LeaderSet:
    """Lowest-index user of ``[K] \\ {i}`` for each distinct file they request."""
    d = tuple(d)
    _check_user(d, i)
    first: dict[int, int] = {}
    for k, f in enumerate(d, start=1):
        if k != i and f not in first:
            first[f] = k
    return LeaderSet(i, tuple(sorted(first.values())))


def all_leader_sets(d: Sequence[int], i: int) -> Iterator[LeaderSet]:
    """Every valid leader set of transmitter ``i`` (one user per distinct file)."""
    d = tuple(d)
    _check_user(d, i)
    groups: dict[int, list[int]] = {}
    for k, f in enumerate(d, start=1):
        if k != i:
            groups.setdefault(f, []).append(k)
    for choice in product(*groups.values()):
        yield LeaderSet(i, tuple(sorted(choice)))


def worst_case_demand(N: int, K: int) -> Demand:
    """A demand maximizing the one-shot load.

    Files are assigned round-robin and sorted, so every file appears
    ``floor(K/N)`` or ``ceil(K/N)`` times: all-distinct when K <= N, files
    ``1..K-N`` twice when N < K < 2N, and every multiplicity >= 2 when K >= 2N.
    """
    if N < 1 or K < 2:
        raise ValueError("need N >= 1 and K >= 2")
    return tuple(sorted(k % N + 1 for k in range(K)))
