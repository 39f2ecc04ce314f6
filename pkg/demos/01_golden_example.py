"""Four users, two files, each user caching half the library.

Walks through placement, the pruned per-user transmissions and decoding for
the demand (1, 2, 1, 1). User 2 is the only one asking for file 2. From its
own point of view the remaining users all want file 1, so it drops the one
codeword aimed at users 3 and 4 alone. 11 of 12 codewords go out.
"""

from d2dcache import SystemParams, simulate
from d2dcache.scheme import random_library
from d2dcache.demand import select_leaders

params = SystemParams.from_subpiece_bytes(N=2, K=4, t=2, subpiece_bytes=4)
d = (1, 2, 1, 1)
print(f"N={params.N} K={params.K} t={params.t} M={params.M} F={params.F} bits")

res = simulate(params, d, seed=42)
library = random_library(params, 42)

for x in res.transmissions:
    leaders = select_leaders(d, x.transmitter).leaders
    print(f"\nuser {x.transmitter} (leaders {sorted(leaders)}) sends {len(x.codewords)} codewords:")
    for c in x.codewords:
        print(f"  Y_{set(c.target_set)}  {c.payload.hex()}")

print(f"\ntotal {sum(len(x.codewords) for x in res.transmissions)} codewords, load {res.load}")
print("every user decoded its file:", all(res.decoded[k] == library[q - 1] for k, q in enumerate(d)))
