"""The optimal-angle pattern that makes level-by-level heuristics work.

Across random instances of one graph class, the optimized cost angles
gamma_i^* increase smoothly with the layer index while the mixing angles
beta_i^* decrease -- an annealing-like sweep that changes only slightly from
level p to p+1.  That smoothness is what the interpolation and
frequency-amplitude strategies exploit.

Saves a figure to demos/output/ when matplotlib is available.
"""

from pathlib import Path

import numpy as np

from qaoa_lab.harness import make_instance
from qaoa_lab.optimizer import CHAIN_B, StrategyConfig, run_fourier_strategy

P_SHOW = 5
N_INSTANCES = 8

curves = []
for idx in range(N_INSTANCES):
    g = make_instance("u3R", 16, 1000 + idx)
    cfg = StrategyConfig(strategy="fourier", r=10, p_max=P_SHOW, seed=idx,
                         objective_tol=1e-7)
    best = {lr.p: lr for lr in run_fourier_strategy(g, cfg) if lr.chain == CHAIN_B}
    curves.append(best[P_SHOW].params)
    print(f"instance {idx}: r(p={P_SHOW}) = {best[P_SHOW].r:.5f}")

print(f"\noptimized angles at p={P_SHOW} (rows = instances):")
print("gamma_i:")
for params in curves:
    print("   " + "  ".join(f"{v:+.3f}" for v in params.gammas))
print("beta_i:")
for params in curves:
    print("   " + "  ".join(f"{v:+.3f}" for v in params.betas))

gammas = np.array([p.gammas for p in curves])
betas = np.array([p.betas for p in curves])
print(f"\nmean gamma curve rises: {np.all(np.diff(gammas.mean(0)) > 0)}")
print(f"mean beta curve falls:  {np.all(np.diff(betas.mean(0)) < 0)}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(__file__).parent / "output"
    out.mkdir(exist_ok=True)
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5), sharex=True)
    idx = np.arange(1, P_SHOW + 1)
    for params in curves:
        axes[0].plot(idx, params.gammas, "o--", alpha=0.6)
        axes[1].plot(idx, params.betas, "o--", alpha=0.6)
    axes[0].set(xlabel="layer i", ylabel=r"$\gamma_i^*$")
    axes[1].set(xlabel="layer i", ylabel=r"$\beta_i^*$")
    fig.suptitle(f"optimized angles, {N_INSTANCES} u3R instances (N=16, p={P_SHOW})")
    fig.tight_layout()
    fig.savefig(out / "parameter_patterns.png", dpi=150)
    print(f"\nfigure -> {out / 'parameter_patterns.png'}")
except ImportError:
    print("\n(matplotlib not installed; skipping the figure)")
