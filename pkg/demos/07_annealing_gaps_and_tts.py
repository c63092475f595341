"""Annealing spectra, minimum gaps, and time-to-solution.

Sweeps the mixing fraction of H(f) = -[f H_C + (1-f) H_B], locates the
minimum gap in the coupled (positive-parity) sector, integrates the
Schrodinger evolution on linear ramps, and compares the optimal
time-to-solution of annealing against the optimized circuit on a small
ensemble.  Easy instances sit on the adiabatic 1/gap^2 line; the two
algorithms' optimal times correlate strongly on the log scale.
"""

import numpy as np

from qaoa_lab.annealer import linear_ramp, lz_fit, min_gap, qaoa_to_schedule, spectrum
from qaoa_lab.graphs import brute_force_maxcut
from qaoa_lab.harness import make_instance
from qaoa_lab.optimizer import CHAIN_B, StrategyConfig, run_fourier_strategy
from qaoa_lab.tts import log_correlation, opt_tts, qa_tts_curve, qaoa_tts_curve

g = make_instance("w3R", 10, 42)
cut = brute_force_maxcut(g)

# --- spectrum along the path ----------------------------------------------
print("lowest coupled levels of H(f):")
print("   f     e0        e1        e2      gap e1-e0")
for f in (0.0, 0.25, 0.5, 0.75, 1.0):
    sp = spectrum(g, f, k=3)
    e = sp.eigenvalues
    print(f"  {f:.2f}  {e[0]:8.4f}  {e[1]:8.4f}  {e[2]:8.4f}   {e[1] - e[0]:.4f}")

gap = min_gap(g, resolution=0.02)
print(f"\nminimum coupled gap: {gap.delta_min:.4f} at s = {gap.s_star:.3f}"
      f"  (adiabatic scale 1/gap^2 = {1 / gap.delta_min**2:.1f})")

# --- TTS curves -------------------------------------------------------------
t_grid = np.geomspace(2, 120, 12).tolist()
qa = qa_tts_curve(g, t_grid)
print("\nlinear-ramp annealing:")
print("    T      p_GS      TTS")
for rec in qa[::3]:
    print(f" {rec.control:6.1f}   {rec.p_gs:.4f}   {rec.tts:8.1f}")

cfg = StrategyConfig(strategy="fourier", r=10, p_max=10, seed=1, objective_tol=1e-7)
levels = [lr for lr in run_fourier_strategy(g, cfg) if lr.chain == CHAIN_B]
circuit = qaoa_tts_curve(levels)
qa_opt = opt_tts(qa)
circ_opt = opt_tts(circuit)
print(f"\noptimal TTS: annealing {qa_opt.tts_opt:.1f} (T = {qa_opt.control_opt:.1f}) "
      f"vs circuit {circ_opt.tts_opt:.1f} (p = {int(circ_opt.control_opt)})")

# --- ensemble correlation ----------------------------------------------------
print("\nsmall ensemble (12 instances, N=10):")
xs, ys = [], []
for idx in range(12):
    gi = make_instance("w3R", 10, 500 + idx)
    ci = opt_tts(qaoa_tts_curve([lr for lr in run_fourier_strategy(
        gi, StrategyConfig(strategy="fourier", r=10, p_max=10, seed=idx,
                           objective_tol=1e-6)) if lr.chain == CHAIN_B]))
    ai = opt_tts(qa_tts_curve(gi, np.geomspace(2, 120, 10).tolist()))
    xs.append(ci.tts_opt)
    ys.append(ai.tts_opt)
    print(f"  instance {idx}: circuit {ci.tts_opt:8.1f} | annealing {ai.tts_opt:8.1f}")
print(f"log-scale correlation: rho = {log_correlation(xs, ys):.3f}")
