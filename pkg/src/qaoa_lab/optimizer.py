"""Variational-parameter search for the alternating-operator circuit.

Three strategies are provided:

* RI: repeated local optimization from random starts (the baseline whose
  cost grows exponentially with circuit depth).
* INTERP: optimize level p, linearly interpolate the optimal angle curves to
  seed level p+1.
* FOURIER[q, R]: reparametrize the angles through truncated discrete
  sine/cosine transforms,
      gamma_i = sum_k u_k sin[(k-1/2)(i-1/2)pi/p],
      beta_i  = sum_k v_k cos[(k-1/2)(i-1/2)pi/p],
  and seed level p+1 by zero-padding the level-p amplitudes; with R > 0 the
  strategy also restarts from R perturbed copies of the best amplitudes seen
  so far, keeping an unperturbed chain (L) and a best-of chain (B) in
  parallel.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy import optimize as sciopt

from .graphs import Graph, CutResult, brute_force_maxcut, UNWEIGHTED_REGULAR
from .statevector import (
    FULL,
    PARITY_POSITIVE,
    DiagonalCost,
    QaoaParams,
    build_diagonal_cost,
    expectation,
    gradient,
    ground_state_population,
    parity_reduce_cost,
    qaoa_state,
    value_and_gradient,
)

log = logging.getLogger(__name__)

CHAIN_L = "L"
CHAIN_B = "B"

STRATEGY_RI = "ri"
STRATEGY_INTERP = "interp"
STRATEGY_FOURIER = "fourier"

DEFAULT_OBJECTIVE_TOL = 1e-8
DEFAULT_STEP_TOL = 1e-8
LEVEL1_START = 0.01  # small positive seed; breaks the gamma -> -gamma degeneracy


@dataclass(frozen=True)
class FourierParams:
    """Frequency amplitudes (u for gammas, v for betas) targeting level p."""

    u: np.ndarray
    v: np.ndarray
    p: int

    def __post_init__(self):
        u = np.atleast_1d(np.asarray(self.u, dtype=float))
        v = np.atleast_1d(np.asarray(self.v, dtype=float))
        if u.shape != v.shape or u.ndim != 1 or u.size < 1:
            raise ValueError("u and v must be 1d arrays of equal length >= 1")
        if self.p < 1:
            raise ValueError("target level must be >= 1")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def q(self) -> int:
        return self.u.size


@dataclass
class StrategyConfig:
    """Knobs shared by the level-increment strategies; JSON round-trippable."""

    strategy: str = STRATEGY_FOURIER
    q: int | None = None  # None = unbounded (q grows with p)
    r: int = 10
    alpha: float = 0.6
    p_max: int = 20
    seed: int = 0
    n_seeds: int = 100  # RI only
    objective_tol: float = DEFAULT_OBJECTIVE_TOL
    step_tol: float = DEFAULT_STEP_TOL
    method: str = "bfgs"

    def __post_init__(self):
        if self.strategy not in (STRATEGY_RI, STRATEGY_INTERP, STRATEGY_FOURIER):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.r > 0 and not self.alpha > 0:
            raise ValueError("perturbation strength alpha must be > 0 when R > 0")
        if self.q is not None and self.q < 1:
            raise ValueError("q must be >= 1 (or None for unbounded)")

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "StrategyConfig":
        return StrategyConfig(**json.loads(text))


@dataclass(frozen=True)
class LevelResult:
    """Outcome of optimizing one circuit depth."""

    p: int
    params: QaoaParams
    f_value: float
    r: float
    p_gs: float
    n_evals: int
    chain: str = CHAIN_L
    fourier: FourierParams | None = None
    flags: tuple[str, ...] = ()
    f_bar: float | None = None  # noisy estimate, set by the shot-noise module

    def __post_init__(self):
        if not -1e-9 <= self.r <= 1.0 + 1e-9:
            raise ValueError(f"approximation ratio {self.r} outside [0, 1]")


class OptimizeOutcome(NamedTuple):
    x: np.ndarray
    f: float
    n_evals: int


class RunsToMatch(NamedTuple):
    runs: int
    censored: bool


def local_optimize(
    fun: Callable[[np.ndarray], float],
    x0,
    grad: Callable[[np.ndarray], np.ndarray] | None = None,
    *,
    fused: Callable[[np.ndarray], tuple[float, np.ndarray]] | None = None,
    method: str = "bfgs",
    objective_tol: float = DEFAULT_OBJECTIVE_TOL,
    step_tol: float = DEFAULT_STEP_TOL,
    maximize: bool = True,
) -> OptimizeOutcome:
    """Local ascent (default) of ``fun`` from ``x0``.

    method "bfgs" uses the quasi-Newton BFGS routine (analytic gradient when
    provided, either as a separate callable or as ``fused`` returning
    (value, gradient) in one pass); "nelder-mead" is the derivative-free
    simplex alternative.  Raises RuntimeError on a non-finite objective.
    """
    x0 = np.asarray(x0, dtype=float)
    sign = -1.0 if maximize else 1.0
    n_evals = 0

    def _check(val, x):
        if not np.isfinite(val):
            raise RuntimeError(f"objective returned non-finite value {val} at x={x!r}")
        return sign * val

    def f(x):
        nonlocal n_evals
        n_evals += 1
        return _check(fun(x), x)

    method = method.lower()
    if method == "bfgs":
        options = {"gtol": objective_tol, "xrtol": step_tol, "maxiter": 2000}
        if fused is not None:
            def fg(x):
                nonlocal n_evals
                n_evals += 1
                val, gr = fused(x)
                return _check(val, x), sign * gr

            res = sciopt.minimize(fg, x0, jac=True, method="BFGS", options=options)
        else:
            jac = (lambda x: sign * grad(x)) if grad is not None else None
            res = sciopt.minimize(f, x0, jac=jac, method="BFGS", options=options)
    elif method in ("nelder-mead", "nm"):
        res = sciopt.minimize(
            f, x0, method="Nelder-Mead",
            options={"fatol": objective_tol, "xatol": step_tol,
                     "maxiter": 4000 * x0.size, "maxfev": 4000 * x0.size},
        )
    else:
        raise ValueError(f"unknown optimizer method {method!r}")
    return OptimizeOutcome(np.asarray(res.x, dtype=float), sign * float(res.fun), n_evals)


def random_init(p: int, graph_kind: str, seed) -> QaoaParams:
    """Random starting angles: beta ~ U[-pi/4, pi/4); gamma ~ U[-pi/2, pi/2)
    for unweighted regular graphs, U[-2pi, 2pi) otherwise (weighted graphs
    have no gamma periodicity to exploit)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if graph_kind == UNWEIGHTED_REGULAR:
        gammas = rng.uniform(-np.pi / 2, np.pi / 2, size=p)
    else:
        gammas = rng.uniform(-2 * np.pi, 2 * np.pi, size=p)
    betas = rng.uniform(-np.pi / 4, np.pi / 4, size=p)
    return QaoaParams(gammas, betas)


def interp_step(opt: QaoaParams) -> QaoaParams:
    """Seed level p+1 from a level-p optimum by linear interpolation:
    angle_i^0 = (i-1)/p * angle_{i-1} + (p-i+1)/p * angle_i, with the
    out-of-range boundary angles taken as zero."""
    p = opt.p

    def stretch(a):
        pad = np.concatenate([[0.0], a, [0.0]])
        i = np.arange(1, p + 2)
        return (i - 1) / p * pad[i - 1] + (p - i + 1) / p * pad[i]

    return QaoaParams(stretch(opt.gammas), stretch(opt.betas))


def _dst_dct_matrices(p: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    i = np.arange(1, p + 1)[:, None]
    k = np.arange(1, q + 1)[None, :]
    arg = (k - 0.5) * (i - 0.5) * np.pi / p
    return np.sin(arg), np.cos(arg)


def fourier_to_direct(fp: FourierParams) -> QaoaParams:
    """Evaluate the (truncated) discrete sine/cosine transforms."""
    a_s, a_c = _dst_dct_matrices(fp.p, fp.q)
    return QaoaParams(a_s @ fp.u, a_c @ fp.v)


def direct_to_fourier(params: QaoaParams) -> FourierParams:
    """Invert the q = p transform (exact; the square matrices are invertible)."""
    p = params.p
    a_s, a_c = _dst_dct_matrices(p, p)
    return FourierParams(np.linalg.solve(a_s, params.gammas),
                         np.linalg.solve(a_c, params.betas), p)


def fourier_gradient(g_or_cost, fp: FourierParams, basis: str = FULL) -> np.ndarray:
    """Chain rule through the linear transform: grad_u = A_S^T grad_gamma,
    grad_v = A_C^T grad_beta."""
    direct = fourier_to_direct(fp)
    grad_direct = gradient(g_or_cost, direct, basis)
    p, q = fp.p, fp.q
    a_s, a_c = _dst_dct_matrices(p, q)
    return np.concatenate([a_s.T @ grad_direct[:p], a_c.T @ grad_direct[p:]])


class _Objective:
    """F_p as a function of flat parameter vectors.

    Works in the positive-parity sector internally (identical F, gradient and
    ground-state population at half the simulation size)."""

    def __init__(self, g: Graph, cut: CutResult | None = None,
                 cost: DiagonalCost | None = None, basis: str = PARITY_POSITIVE):
        self.graph = g
        self.basis = basis
        full = cost if cost is not None else build_diagonal_cost(g)
        self.cost = full if basis == FULL else parity_reduce_cost(full)
        self.cut = cut if cut is not None else brute_force_maxcut(g)

    # direct (gamma, beta) space
    def value(self, x: np.ndarray) -> float:
        return expectation(qaoa_state(self.cost, QaoaParams.from_vector(x), self.basis),
                           self.cost)

    def grad(self, x: np.ndarray) -> np.ndarray:
        return gradient(self.cost, QaoaParams.from_vector(x), self.basis)

    def fused(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        return value_and_gradient(self.cost, QaoaParams.from_vector(x), self.basis)

    # fourier (u, v) space at a fixed target level
    def uv_value(self, x: np.ndarray, p: int) -> float:
        direct = fourier_to_direct(_uv_from_vector(x, p))
        return expectation(qaoa_state(self.cost, direct, self.basis), self.cost)

    def uv_fused(self, x: np.ndarray, p: int) -> tuple[float, np.ndarray]:
        fp = _uv_from_vector(x, p)
        f, grad_direct = value_and_gradient(self.cost, fourier_to_direct(fp), self.basis)
        a_s, a_c = _dst_dct_matrices(fp.p, fp.q)
        return f, np.concatenate([a_s.T @ grad_direct[:fp.p], a_c.T @ grad_direct[fp.p:]])

    def level_result(self, p: int, x: np.ndarray | None, f: float, n_evals: int,
                     chain: str = CHAIN_L, fourier: FourierParams | None = None,
                     flags: tuple[str, ...] = ()) -> LevelResult:
        params = QaoaParams.from_vector(x) if fourier is None else fourier_to_direct(fourier)
        state = qaoa_state(self.cost, params, self.basis)
        p_gs = ground_state_population(state, self.cut)
        r = min(f / self.cut.c_max, 1.0) if self.cut.c_max > 0 else 1.0
        return LevelResult(p, params, f, r, p_gs, n_evals, chain, fourier, flags)


def _uv_from_vector(x: np.ndarray, p: int) -> FourierParams:
    q = x.size // 2
    return FourierParams(x[:q], x[q:], p)


def run_ri_strategy(
    g: Graph, p: int, n_seeds: int, tol: float = DEFAULT_OBJECTIVE_TOL,
    seed=0, method: str = "bfgs",
) -> tuple[LevelResult, list[LevelResult]]:
    """Best of ``n_seeds`` random-start local optimizations at fixed level p.

    Returns (best, all) -- the full list feeds the runs-to-match statistic.
    """
    obj = _Objective(g)
    rng = np.random.default_rng(seed)
    results = []
    for _ in range(n_seeds):
        x0 = random_init(p, g.kind, rng).as_vector()
        out = local_optimize(obj.value, x0, fused=obj.fused, method=method,
                             objective_tol=tol)
        results.append(obj.level_result(p, out.x, out.f, out.n_evals))
    best = max(results, key=lambda lr: lr.f_value)
    return best, results


def _level1_start(obj: _Objective, tol: float, rng: np.random.Generator) -> np.ndarray:
    """(gamma_1, beta_1) = (0.01, 0.01), falling back to one random draw if
    that point happens to be (numerically) stationary."""
    x0 = np.array([LEVEL1_START, LEVEL1_START])
    if np.linalg.norm(obj.grad(x0)) < tol:
        return random_init(1, obj.graph.kind, rng).as_vector()
    return x0


def run_interp_strategy(
    g: Graph, p_max: int, tol: float = DEFAULT_OBJECTIVE_TOL,
    step_tol: float = DEFAULT_STEP_TOL, seed=0, method: str = "bfgs",
) -> list[LevelResult]:
    """Iterate levels 1..p_max, seeding each level by interpolation."""
    obj = _Objective(g)
    rng = np.random.default_rng(seed)
    results: list[LevelResult] = []
    x0 = _level1_start(obj, tol, rng)
    for p in range(1, p_max + 1):
        out = local_optimize(obj.value, x0, fused=obj.fused, method=method,
                             objective_tol=tol, step_tol=step_tol)
        results.append(obj.level_result(p, out.x, out.f, out.n_evals))
        if p < p_max:
            x0 = interp_step(QaoaParams.from_vector(out.x)).as_vector()
    return results


def _extend_uv(uv: np.ndarray, q_limit: int | None) -> np.ndarray:
    """Zero-pad both halves for the next level, unless already at the q cap."""
    q = uv.size // 2
    if q_limit is not None and q >= q_limit:
        return uv.copy()
    return np.concatenate([uv[:q], [0.0], uv[q:], [0.0]])


def run_fourier_strategy(g: Graph, cfg: StrategyConfig) -> list[LevelResult]:
    """FOURIER[q, R]: per level, optimize from the zero-padded unperturbed
    chain (L), the zero-padded best chain (B), and R perturbed copies of B
    where each amplitude is jittered by alpha * Normal(0, amplitude^2).
    The new B is the argmax over all starts; the new L follows only its own
    start.  Emits one LevelResult per chain per level (identical when R = 0).
    """
    obj = _Objective(g)
    rng = np.random.default_rng(cfg.seed)
    results: list[LevelResult] = []

    x_l = x_b = None
    for p in range(1, cfg.p_max + 1):
        if p == 1:
            # single start at the base level; the chains fork from level 2 on
            d0 = _level1_start(obj, cfg.objective_tol, rng)
            a_s, a_c = _dst_dct_matrices(1, 1)
            starts = [np.array([d0[0] / a_s[0, 0], d0[1] / a_c[0, 0]])]
        else:
            starts = [_extend_uv(x_l, cfg.q)]
            if cfg.r > 0:
                starts.append(_extend_uv(x_b, cfg.q))
                for _ in range(cfg.r):
                    starts.append(_extend_uv(x_b + _perturbation(x_b, cfg.alpha, rng), cfg.q))

        outs = []
        flags: tuple[str, ...] = ()
        for x0 in starts:
            try:
                outs.append(local_optimize(
                    lambda x: obj.uv_value(x, p), x0,
                    fused=lambda x: obj.uv_fused(x, p),
                    method=cfg.method, objective_tol=cfg.objective_tol,
                    step_tol=cfg.step_tol,
                ))
            except RuntimeError as exc:
                log.warning("level %d start failed: %s", p, exc)
                outs.append(None)

        if outs[0] is not None:
            x_l, f_l, evals_l = outs[0].x, outs[0].f, outs[0].n_evals
        else:  # carry the previous L parameters forward, flagged
            x_l, evals_l = starts[0], 0
            f_l = obj.uv_value(x_l, p)
            flags += ("l_chain_carried",)
        ok = [o for o in outs if o is not None]
        best = max(ok, key=lambda o: o.f) if ok else None
        if best is None or best.f < f_l:
            x_b, f_b = x_l, f_l
        else:
            x_b, f_b = best.x, best.f
        n_evals = sum(o.n_evals for o in ok)

        results.append(obj.level_result(
            p, None, f_l, evals_l, CHAIN_L, _uv_from_vector(x_l, p), flags))
        results.append(obj.level_result(
            p, None, f_b, n_evals, CHAIN_B, _uv_from_vector(x_b, p), flags))
    return results


def _perturbation(uv: np.ndarray, alpha: float, rng: np.random.Generator) -> np.ndarray:
    """alpha-scaled draws from Normal(0, amplitude^2) per component; exact
    zeros stay unperturbed (Normal(0, 0) is the point mass at 0)."""
    return alpha * rng.normal(0.0, np.abs(uv))


def level_result_to_dict(lr: LevelResult) -> dict:
    """JSON-ready view of a LevelResult (used by run records and the CLI)."""
    out = {
        "p": lr.p,
        "gammas": lr.params.gammas.tolist(),
        "betas": lr.params.betas.tolist(),
        "f_value": lr.f_value,
        "r": lr.r,
        "p_gs": lr.p_gs,
        "n_evals": lr.n_evals,
        "chain": lr.chain,
        "total_time": lr.params.total_time,
        "flags": list(lr.flags),
    }
    if lr.fourier is not None:
        out["u"] = lr.fourier.u.tolist()
        out["v"] = lr.fourier.v.tolist()
    if lr.f_bar is not None:
        out["f_bar"] = lr.f_bar
    return out


def run_strategy(g: Graph, cfg: StrategyConfig) -> list[LevelResult]:
    """Dispatch on cfg.strategy; RI returns one result per level p <= p_max."""
    if cfg.strategy == STRATEGY_FOURIER:
        return run_fourier_strategy(g, cfg)
    if cfg.strategy == STRATEGY_INTERP:
        return run_interp_strategy(g, cfg.p_max, cfg.objective_tol, cfg.step_tol,
                                   cfg.seed, cfg.method)
    results = []
    for p in range(1, cfg.p_max + 1):
        best, _ = run_ri_strategy(g, p, cfg.n_seeds, cfg.objective_tol,
                                  np.random.default_rng((cfg.seed, p)), cfg.method)
        results.append(best)
    return results


def runs_to_match(
    g: Graph, p: int, heuristic_value: float, tol: float = 1e-4,
    seed=0, cap: int = 100_000, method: str = "bfgs",
    objective_tol: float = DEFAULT_OBJECTIVE_TOL,
) -> RunsToMatch:
    """Count random-start optimizations until one reaches
    heuristic_value - tol; censored at ``cap`` runs."""
    obj = _Objective(g)
    rng = np.random.default_rng(seed)
    target = heuristic_value - tol
    for run in range(1, cap + 1):
        x0 = random_init(p, g.kind, rng).as_vector()
        out = local_optimize(obj.value, x0, fused=obj.fused, method=method,
                             objective_tol=objective_tol)
        if out.f >= target:
            return RunsToMatch(run, False)
    return RunsToMatch(cap, True)
