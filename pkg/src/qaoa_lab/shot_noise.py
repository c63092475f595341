"""Monte-Carlo simulation of the full optimization loop under measurement
projection noise.

Objective values are estimated by sampling computational-basis measurements
from the exact state until the cumulative standard error of the mean drops to
the precision target xi (with at least 10 samples); every measurement lands
in a ledger that tracks the best cut seen so far, which is the quantity an
experiment actually cares about.  Gradients are forward differences with
increment delta, and the ascent stops when the objective improves by less
than epsilon or the step shrinks below delta.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .annealer import evolve, linear_ramp
from .graphs import Graph, CutResult, brute_force_maxcut
from .optimizer import (
    CHAIN_L,
    FourierParams,
    LevelResult,
    direct_to_fourier,
    fourier_to_direct,
    random_init,
)
from .statevector import (
    FULL,
    DiagonalCost,
    QaoaParams,
    StateVector,
    build_diagonal_cost,
    expectation,
    ground_state_population,
    qaoa_state,
)

# educated-guess amplitudes, transferable starting points for new instances
EDUCATED_UV_P1 = (np.array([1.4849]), np.array([0.5409]))
EDUCATED_UV_P5 = (
    np.array([1.9212, 0.2891, 0.1601, 0.0564, 0.0292]),
    np.array([0.6055, -0.0178, 0.0431, -0.0061, 0.0141]),
)

INIT_EDUCATED = "educated"
INIT_RANDOM = "random"


@dataclass(frozen=True)
class NoiseConfig:
    epsilon: float = 0.1  # objective-change stopping tolerance
    xi: float = 0.05      # standard-error target per estimate
    delta: float = 0.01   # step tolerance and finite-difference increment
    seed: int = 0
    min_measurements: int = 10
    max_iterations: int = 100  # ascent safety cap

    def __post_init__(self):
        if min(self.epsilon, self.xi, self.delta) <= 0:
            raise ValueError("epsilon, xi, delta must all be positive")


@dataclass(frozen=True)
class NoisyEstimate:
    f_bar: float
    m: int
    sem: float


class MeasurementLedger:
    """Append-only record of every measured cut value and the best so far."""

    def __init__(self):
        self.cuts: list[float] = []
        self.best: list[float] = []

    def record(self, cut: float) -> None:
        best = cut if not self.best else max(self.best[-1], cut)
        self.cuts.append(float(cut))
        self.best.append(float(best))

    def __len__(self) -> int:
        return len(self.cuts)

    def best_curve(self) -> np.ndarray:
        return np.asarray(self.best)

    def save_csv(self, path) -> None:
        """Columns: i, cut, best_cut (i starts at 1)."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["i", "cut", "best_cut"])
            for i, (cut, best) in enumerate(zip(self.cuts, self.best), start=1):
                writer.writerow([i, repr(cut), repr(best)])


def load_ledger_csv(path) -> MeasurementLedger:
    ledger = MeasurementLedger()
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            ledger.record(float(row["cut"]))
    return ledger


def estimate_objective(
    state: StateVector,
    cost: DiagonalCost,
    xi: float,
    rng: np.random.Generator,
    ledger: MeasurementLedger,
    min_measurements: int = 10,
) -> NoisyEstimate:
    """Sample measurements until the standard error of the running mean is
    <= xi, with at least ``min_measurements`` samples.  Expected sample count
    is roughly Var(C)/xi^2."""
    if state.basis != FULL or cost.basis != FULL:
        raise ValueError("noisy estimation works in the full basis")
    cdf = np.cumsum(state.probabilities())
    cdf /= cdf[-1]
    values = cost.values
    mean = 0.0
    m2 = 0.0
    m = 0
    while True:
        z = int(np.searchsorted(cdf, rng.random(), side="right"))
        cut = float(values[z])
        ledger.record(cut)
        m += 1
        delta = cut - mean
        mean += delta / m
        m2 += delta * (cut - mean)
        if m >= min_measurements:
            sem = math.sqrt(m2 / (m * (m - 1)))
            if sem <= xi:
                return NoisyEstimate(mean, m, sem)


def _noisy_ascent(estimate, x0: np.ndarray, cfg: NoiseConfig):
    """Quasi-Newton (BFGS-update) maximization of a noisy objective.

    Gradients are forward differences with increment cfg.delta, re-using the
    base estimate; terminates when |F' - F| <= epsilon, when the accepted
    step has |dx|^2 <= delta^2, or after max_iterations."""
    x = np.asarray(x0, dtype=float).copy()
    f = estimate(x)
    dim = x.size
    h_inv = np.eye(dim)
    g_prev = None
    s_prev = None
    for _ in range(cfg.max_iterations):
        grad = np.empty(dim)
        for i in range(dim):
            xi_pt = x.copy()
            xi_pt[i] += cfg.delta
            grad[i] = (estimate(xi_pt) - f) / cfg.delta
        if s_prev is not None:
            y = grad - g_prev
            sy = float(s_prev @ y)
            if sy < -1e-12:  # curvature usable for a maximization update
                rho = 1.0 / sy
                outer = np.outer(s_prev, y)
                h_inv = ((np.eye(dim) - rho * outer) @ h_inv
                         @ (np.eye(dim) - rho * outer.T) - rho * np.outer(s_prev, s_prev))
        g_prev = grad
        direction = h_inv @ grad
        if float(direction @ grad) <= 0.0:  # not an ascent direction; reset
            h_inv = np.eye(dim)
            direction = grad.copy()
        dnorm = float(np.linalg.norm(direction))
        if dnorm == 0.0:
            break
        slope = float(direction @ grad)
        step = min(1.0, 1.0 / dnorm)  # first trial moves at most unit length
        accepted = False
        for _ in range(20):
            x_new = x + step * direction
            f_new = estimate(x_new)
            if f_new >= f + 1e-4 * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        s_prev = x_new - x
        moved2 = float(s_prev @ s_prev)
        gained = abs(f_new - f)
        x, f = x_new, f_new
        if gained <= cfg.epsilon or moved2 <= cfg.delta ** 2:
            break
    return x, f


class _NoisyObjective:
    """Noisy F_p estimates sharing one ledger and one RNG stream."""

    def __init__(self, g: Graph, cfg: NoiseConfig, ledger: MeasurementLedger,
                 rng: np.random.Generator, cut: CutResult | None = None):
        self.graph = g
        self.cost = build_diagonal_cost(g)
        self.cut = cut if cut is not None else brute_force_maxcut(g)
        self.cfg = cfg
        self.ledger = ledger
        self.rng = rng

    def estimate_params(self, params: QaoaParams) -> float:
        state = qaoa_state(self.cost, params)
        est = estimate_objective(state, self.cost, self.cfg.xi, self.rng,
                                 self.ledger, self.cfg.min_measurements)
        return est.f_bar

    def level_result(self, p: int, params: QaoaParams, f_bar: float,
                     n_evals: int, fourier: FourierParams | None = None) -> LevelResult:
        state = qaoa_state(self.cost, params)
        f_exact = expectation(state, self.cost)
        p_gs = ground_state_population(state, self.cut)
        r = min(f_exact / self.cut.c_max, 1.0) if self.cut.c_max > 0 else 1.0
        return LevelResult(p, params, f_exact, r, p_gs, n_evals, CHAIN_L,
                           fourier, f_bar=f_bar)


def noisy_local_optimize(
    g: Graph, params0: QaoaParams, cfg: NoiseConfig, ledger: MeasurementLedger,
    rng: np.random.Generator | None = None,
) -> LevelResult:
    """Optimize (gamma, beta) directly under projection noise."""
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    obj = _NoisyObjective(g, cfg, ledger, rng)
    start = len(ledger)

    def estimate(x):
        return obj.estimate_params(QaoaParams.from_vector(x))

    x, f_bar = _noisy_ascent(estimate, params0.as_vector(), cfg)
    return obj.level_result(params0.p, QaoaParams.from_vector(x), f_bar,
                            len(ledger) - start)


def _initial_uv(g: Graph, start_level: int, init: str,
                rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    if init == INIT_EDUCATED:
        if start_level == 1:
            return EDUCATED_UV_P1
        if start_level == 5:
            return EDUCATED_UV_P5
        raise ValueError("educated starts exist for levels 1 and 5 only")
    if init == INIT_RANDOM:
        direct = random_init(start_level, g.kind, rng)
        fp = direct_to_fourier(direct)
        return fp.u, fp.v
    raise ValueError(f"unknown init {init!r}")


def run_noisy_experiment(
    g: Graph,
    start_level: int = 1,
    init: str = INIT_EDUCATED,
    cfg: NoiseConfig = NoiseConfig(),
    p_max: int = 10,
) -> tuple[MeasurementLedger, list[LevelResult]]:
    """Level-incrementing optimization (basic amplitude-reuse chain, no
    perturbations) with every objective value estimated from measurements.

    Returns the experiment-wide ledger and per-level results; the ledger's
    best-so-far curve against its index is the measurement-cost benchmark.
    """
    rng = np.random.default_rng(cfg.seed)
    ledger = MeasurementLedger()
    obj = _NoisyObjective(g, cfg, ledger, rng)
    u, v = _initial_uv(g, start_level, init, rng)
    results = []
    for p in range(start_level, p_max + 1):
        def estimate(x, _p=p):
            q = x.size // 2
            params = fourier_to_direct(FourierParams(x[:q], x[q:], _p))
            return obj.estimate_params(params)

        start = len(ledger)
        x0 = np.concatenate([u, v])
        x, f_bar = _noisy_ascent(estimate, x0, cfg)
        q = x.size // 2
        u, v = x[:q], x[q:]
        fp = FourierParams(u, v, p)
        results.append(obj.level_result(p, fourier_to_direct(fp), f_bar,
                                        len(ledger) - start, fp))
        u = np.concatenate([u, [0.0]])
        v = np.concatenate([v, [0.0]])
    return ledger, results


def qa_baseline_ledger(
    g: Graph, t_list, shots: int, seed=0, tau: float | None = None,
) -> dict[float, MeasurementLedger]:
    """Anneal once per T on the linear ramp, then measure ``shots`` times."""
    from .statevector import PARITY_POSITIVE, sample_basis_indices

    cost = build_diagonal_cost(g)
    rng = np.random.default_rng(seed)
    ledgers: dict[float, MeasurementLedger] = {}
    for T in t_list:
        state = evolve(cost, linear_ramp(float(T)), tau=tau, basis=PARITY_POSITIVE)
        ledger = MeasurementLedger()
        for z in sample_basis_indices(state, shots, rng):
            ledger.record(float(cost.values[z]))
        ledgers[float(T)] = ledger
    return ledgers
