"""Lower bound side, on small systems.

Shows that the permutation bound is tight on the scheme's own transmissions,
that the type-wise converse meets the achievable average load, and prints a
demand where the summed coupling coefficients are not symmetric.
"""

from fractions import Fraction

from d2dcache import SystemParams, analysis, converse, simulate

N, K, t = 2, 4, 2
d = (1, 2, 1, 1)
params = SystemParams.from_subpiece_bytes(N, K, t)
res = simulate(params, d)
profile = converse.profile_from_traces(res.traces, 8 * params.subpiece_bytes)
for x in res.transmissions:
    bound = converse.max_permutation_bound(x.transmitter, d, profile)
    print(f"user {x.transmitter}: sent {x.bits} bits, best permutation bound {bound}")

for M in (Fraction(1, 2), Fraction(1), Fraction(3, 2)):
    ach = analysis.load_at_memory(N, K, M, "oneshot", "average")
    print(f"M={M}: average load {ach}, converse {converse.average_converse(N, K, M)}")

table = converse.accumulate_coefficients((1, 1, 2, 2))
bad = converse.symmetry_violations(table, K)
print("asymmetric coefficients for d=(1,1,2,2):", bad[:2])
