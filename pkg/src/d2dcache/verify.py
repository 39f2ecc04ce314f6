"""Exhaustive small-instance checks of the scheme, the load formulas and the
converse machinery, collected into a JSON-ready report."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Iterable

from . import analysis, converse
from .combinatorics import compositions_of_demands, frac_str, is_convex, is_nonincreasing
from .demand import all_demands, all_leader_sets, select_leaders, worst_case_demand
from .scheme import (
    DecodeMismatch,
    SystemParams,
    man_placement,
    pruned_codewords_in_span,
    random_library,
    simulate,
    zero_sum_violations,
)

THREADS_ENV = "D2D_CACHE_THREADS"


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _grid(N_cap: int, K_cap: int, K_min: int = 2):
    for N in range(1, N_cap + 1):
        for K in range(K_min, K_cap + 1):
            yield N, K


def _fmt(x):
    if isinstance(x, Fraction):
        return frac_str(x)
    if isinstance(x, tuple):
        return [_fmt(v) for v in x]
    return x


def check_simulation(N_cap, K_cap, corrupt_user=None):
    for N, K in _grid(N_cap, K_cap):
        for t in range(1, K + 1):
            params = SystemParams.from_subpiece_bytes(N, K, t)
            for d in all_demands(N, K):
                try:
                    res = simulate(params, d, seed=N * 1000 + K * 10 + t, corrupt_user=corrupt_user)
                except DecodeMismatch as exc:
                    return {"error": "decode mismatch", **exc.witness}
                want = analysis.per_demand_load(N, K, t, d)
                if res.load != want:
                    return {"N": N, "K": K, "t": t, "demand": list(d),
                            "simulated": frac_str(res.load), "formula": frac_str(want)}
    return None


def check_average(N_cap, K_cap):
    for N, K in _grid(N_cap, K_cap):
        for t in range(1, K + 1):
            brute = sum((analysis.per_demand_load(N, K, t, d) for d in all_demands(N, K)), Fraction(0)) / N**K
            if brute != analysis.average_load(N, K, t):
                return {"N": N, "K": K, "t": t, "bruteforce": frac_str(brute)}
    return None


def check_worst(N_cap, K_cap):
    for N, K in _grid(N_cap, K_cap):
        for t in range(1, K + 1):
            brute = max(analysis.per_demand_load(N, K, t, d) for d in all_demands(N, K))
            if brute != analysis.worst_case_load(N, K, t):
                return {"N": N, "K": K, "t": t, "bruteforce": frac_str(brute)}
            wd = worst_case_demand(N, K)
            if analysis.per_demand_load(N, K, t, wd) != brute:
                return {"N": N, "K": K, "t": t, "worst_demand": list(wd)}
    return None


def check_converse_meets_achievability(N_cap, K_cap):
    for N, K in _grid(N_cap, K_cap):
        for t in range(1, K + 1):
            M = Fraction(t * N, K)
            if converse.average_converse(N, K, M) != analysis.average_load(N, K, t):
                return {"N": N, "K": K, "t": t, "bound": "average"}
            if converse.worst_case_converse(N, K, M) != analysis.worst_case_load(N, K, t):
                return {"N": N, "K": K, "t": t, "bound": "worst"}
    return None


def check_coefficient_symmetry(N_cap, K_cap):
    for N, K in _grid(N_cap, K_cap):
        for d in all_demands(N, K):
            bad = converse.symmetry_violations(converse.accumulate_coefficients(d), K)
            if bad:
                k, V, values = bad[0]
                return {"demand": list(d), "receiver": k, "cachers": list(V),
                        "coefficients": {str(i): a for i, a in values.items()}}
    return None


def check_permutation_bound_tightness(N_cap, K_cap):
    for N, K in _grid(N_cap, K_cap):
        for t in range(1, K + 1):
            params = SystemParams.from_subpiece_bytes(N, K, t)
            for d in all_demands(N, K):
                res = simulate(params, d)
                profile = converse.profile_from_traces(res.traces, 8 * params.subpiece_bytes)
                for x in res.transmissions:
                    bound = converse.max_permutation_bound(x.transmitter, d, profile)
                    if bound != x.bits:
                        return {"demand": list(d), "t": t, "transmitter": x.transmitter,
                                "bound_bits": frac_str(bound), "sent_bits": x.bits}
    return None


def check_b_t(N_cap, K_cap):
    for N, K in _grid(N_cap, K_cap):
        for s in compositions_of_demands(N, K):
            brute = converse.b_t_bruteforce(s, N, K)
            for t in range(1, K + 1):
                closed = converse.b_t_coefficient(s, N, K, t)
                if brute[t] != closed:
                    return {"N": N, "K": K, "composition": list(s), "t": t,
                            "bruteforce": frac_str(brute[t]), "closed_form": frac_str(closed)}
    return None


def check_r_convex(N_cap, K_cap):
    for N, K in _grid(N_cap, K_cap):
        for s in compositions_of_demands(N, K):
            r = [converse.r_t_s(s, N, K, t) for t in range(1, K + 1)]
            if not (is_nonincreasing(r) and is_convex(list(enumerate(r, start=1)))):
                return {"N": N, "K": K, "composition": list(s), "r": [frac_str(x) for x in r]}
    return None


def check_shared_link_split(N_cap, K_cap):
    for N, K in _grid(N_cap, K_cap):
        for t in range(1, K + 1):
            for d in all_demands(N, K):
                if analysis.shared_link_decomposition(N, K, t, d) != analysis.per_demand_load(N, K, t, d):
                    return {"N": N, "K": K, "t": t, "demand": list(d)}
    return None


def check_span(N_cap, K_cap):
    for N, K in _grid(N_cap, K_cap):
        for t in range(1, K + 1):
            for d in all_demands(N, K):
                bad = pruned_codewords_in_span(d, t)
                if bad:
                    return {"demand": list(d), "t": t, "transmitter": bad[0][0], "target_set": list(bad[0][1])}
                bad = zero_sum_violations(d, t)
                if bad:
                    return {"demand": list(d), "t": t, "zero_sum": [bad[0][0], list(bad[0][1])]}
    return None


def check_leader_invariance(N_cap, K_cap):
    for N, K in _grid(min(N_cap, 3), min(K_cap, 4)):
        for t in range(1, K + 1):
            params = SystemParams.from_subpiece_bytes(N, K, t)
            for d in all_demands(N, K):
                want = analysis.per_demand_load(N, K, t, d)
                base = {j: select_leaders(d, j) for j in range(1, K + 1)}
                for i in range(1, K + 1):
                    for ls in all_leader_sets(d, i):
                        try:
                            res = simulate(params, d, leaders={**base, i: ls})
                        except DecodeMismatch as exc:
                            return {"error": "decode mismatch", **exc.witness, "leaders": list(ls.leaders)}
                        if res.load != want:
                            return {"demand": list(d), "t": t, "transmitter": i, "leaders": list(ls.leaders)}
    return None


def check_placement_stats(N_cap, K_cap):
    for N, K in _grid(N_cap, K_cap):
        for t in range(1, K + 1):
            params = SystemParams.from_subpiece_bytes(N, K, t)
            caches = man_placement(params, random_library(params, 0))
            x = converse.placement_stats(caches, N, K)
            expected = [N * params.F if j == t else 0 for j in range(K + 1)]
            weighted = sum(j * xj for j, xj in enumerate(x))
            if x != expected or weighted != K * params.M * params.F:
                return {"N": N, "K": K, "t": t, "x": x}
    return None


CHECKS: dict[str, tuple[Callable, int, int]] = {
    # name: (function, N cap limit, K cap limit)
    "simulation_matches_formula": (check_simulation, 99, 99),
    "average_load_bruteforce": (check_average, 99, 99),
    "worst_case_load_bruteforce": (check_worst, 99, 99),
    "converse_meets_achievability": (check_converse_meets_achievability, 99, 99),
    "coefficient_symmetry": (check_coefficient_symmetry, 4, 4),
    "permutation_bound_tightness": (check_permutation_bound_tightness, 4, 4),
    "b_t_closed_form": (check_b_t, 4, 4),
    "r_convex_nonincreasing": (check_r_convex, 8, 8),
    "shared_link_split": (check_shared_link_split, 99, 99),
    "pruned_codewords_in_span": (check_span, 99, 99),
    "leader_choice_invariance": (check_leader_invariance, 3, 4),
    "placement_stats": (check_placement_stats, 99, 99),
}


def run_checks(
    N_cap: int = 3,
    K_cap: int = 5,
    skip: Iterable[str] = (),
    corrupt_user: int | None = None,
) -> dict:
    """Run every check within the caps; ``corrupt_user`` injects a cache fault into the simulation check."""
    if not 1 <= N_cap <= 8 or not 2 <= K_cap <= converse.MAX_ENUM_USERS:
        raise ValueError(f"caps must satisfy 1 <= N <= 8 and 2 <= K <= {converse.MAX_ENUM_USERS}")
    skip = set(skip)
    unknown = skip - set(CHECKS)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    jobs = []
    for name, (fn, n_lim, k_lim) in CHECKS.items():
        if name in skip:
            continue
        n, k = min(N_cap, n_lim), min(K_cap, k_lim)
        kwargs = {"corrupt_user": corrupt_user} if fn is check_simulation else {}
        jobs.append((name, f"N<={n},K<={k}", fn, n, k, kwargs))
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        witnesses = list(pool.map(lambda j: j[2](j[3], j[4], **j[5]), jobs))
    checks = [
        {"name": name, "scope": scope, "pass": w is None, "witness": w}
        for (name, scope, *_), w in zip(jobs, witnesses)
    ]
    return {"params": {"N_cap": N_cap, "K_cap": K_cap}, "checks": checks}
