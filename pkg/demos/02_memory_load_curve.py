"""Worst-case load against cache size for N=10 files and K=20 users.

Plots the one-shot D2D scheme next to the uncoded-requests D2D baseline and
centralized shared-link delivery. Needs the ``demos`` extra (matplotlib);
without it the series are printed instead.
"""

from d2dcache import analysis

N, K = 10, 20
grid = analysis.memory_grid(N, K)
series = {tag: analysis.memory_load_curve(N, K, tag, "worst", grid) for tag in analysis.SCHEMES}

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is None:
    for tag, pts in series.items():
        print(tag, [(str(p.M), round(float(p.load), 4)) for p in pts[:: max(1, len(pts) // 10)]])
else:
    for tag, pts in series.items():
        plt.plot([float(p.M) for p in pts], [float(p.load) for p in pts], label=tag)
    plt.xlabel("cache size M (files)")
    plt.ylabel("worst-case load (files)")
    plt.legend()
    plt.savefig("memory_load_curve.png", dpi=120)
    print("wrote memory_load_curve.png")
