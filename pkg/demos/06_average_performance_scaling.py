"""Ensemble-average error versus circuit depth, with scaling fits.

Averaged over random unweighted 3-regular instances the fractional error
1 - r decays exponentially in the level p; over weighted instances the decay
is stretched-exponential (individual weighted instances plateau when their
annealing gap is small, and the ensemble average stretches).  The fitting
helper quantifies which model describes each ensemble better.

Saves a figure to demos/output/ when matplotlib is available.
"""

from pathlib import Path

import numpy as np

from qaoa_lab.harness import make_instance
from qaoa_lab.optimizer import CHAIN_B, StrategyConfig, run_fourier_strategy
from qaoa_lab.tts import MODEL_EXPONENTIAL, MODEL_STRETCHED, fit_scaling

P_MAX = 8
COUNT = 10
N = 10

curves = {}
for kind in ("u3R", "w3R"):
    rows = []
    for idx in range(COUNT):
        g = make_instance(kind, N, 3000 + 17 * idx)
        cfg = StrategyConfig(strategy="fourier", r=10, p_max=P_MAX,
                             seed=idx, objective_tol=1e-7)
        best = [lr for lr in run_fourier_strategy(g, cfg) if lr.chain == CHAIN_B]
        rows.append([1.0 - lr.r for lr in best])
    curves[kind] = np.mean(np.array(rows), axis=0)
    print(f"{kind}: mean 1-r per level = "
          + " ".join(f"{v:.2e}" for v in curves[kind]))

print("\nmodel comparison (mean squared residual on the log scale):")
for kind in ("u3R", "w3R"):
    pts = list(zip(range(1, P_MAX + 1), curves[kind]))
    fits = {m: fit_scaling(pts, m) for m in (MODEL_EXPONENTIAL, MODEL_STRETCHED)}
    winner = min(fits, key=lambda m: fits[m].residual)
    print(f"  {kind}: exponential {fits[MODEL_EXPONENTIAL].residual:.3e} "
          f"(p0={fits[MODEL_EXPONENTIAL].p0:.2f}) | "
          f"stretched {fits[MODEL_STRETCHED].residual:.3e} "
          f"(p0={fits[MODEL_STRETCHED].p0:.2f})  -> {winner} wins")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(__file__).parent / "output"
    out.mkdir(exist_ok=True)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ps = np.arange(1, P_MAX + 1)
    for kind, marker in (("u3R", "o"), ("w3R", "s")):
        ax.semilogy(ps, curves[kind], marker + "-", label=kind)
    ax.set(xlabel="level p", ylabel="mean 1 - r", title=f"N={N}, {COUNT} instances each")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "scaling.png", dpi=150)
    print(f"\nfigure -> {out / 'scaling.png'}")
except ImportError:
    print("\n(matplotlib not installed; skipping the figure)")
