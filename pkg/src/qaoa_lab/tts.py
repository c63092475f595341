"""Time-to-solution benchmarking and scaling fits.

TTS(T) = T * ln(1 - p_d) / ln(1 - p_GS): the run time scaled so that
independent repetitions see the ground state at least once with probability
p_d.  For the circuit algorithm the run time of a level-p protocol is
T_p = sum_i |gamma_i| + |beta_i|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .annealer import linear_ramp, evolve
from .graphs import Graph, brute_force_maxcut
from .optimizer import LevelResult
from .statevector import PARITY_POSITIVE, build_diagonal_cost, ground_state_population

DEFAULT_P_D = 0.99

KIND_QA = "QA"
KIND_QAOA = "QAOA"

MODEL_EXPONENTIAL = "exponential"
MODEL_STRETCHED = "stretched"


@dataclass(frozen=True)
class TtsRecord:
    kind: str  # KIND_QA or KIND_QAOA
    control: float  # annealing time T, or circuit level p
    run_time: float
    p_gs: float
    tts: float  # inf = censored (ground state never seen)


@dataclass(frozen=True)
class ScalingFit:
    model: str
    p0: float
    prefactor: float
    residual: float  # mean squared residual on the log scale


def tts(run_time: float, p_gs: float, p_d: float = DEFAULT_P_D) -> float:
    """run_time * ln(1-p_d)/ln(1-p_gs); p_gs = 0 is censored (inf) and
    p_gs ~ 1 clamps to one shot."""
    if not 0.0 <= p_gs <= 1.0:
        raise ValueError(f"p_gs={p_gs} outside [0, 1]")
    if p_gs <= 0.0:
        return math.inf
    if p_gs >= 1.0 - 1e-12:
        return float(run_time)
    return float(run_time * math.log1p(-p_d) / math.log1p(-p_gs))


class OptTts(NamedTuple):
    tts_opt: float
    control_opt: float


def qa_tts_curve(g: Graph, t_grid: Sequence[float], p_d: float = DEFAULT_P_D,
                 tau: float | None = None) -> list[TtsRecord]:
    """Anneal on the linear ramp at every T in the grid and record TTS."""
    cost = build_diagonal_cost(g)
    cut = brute_force_maxcut(g)
    records = []
    for T in t_grid:
        state = evolve(cost, linear_ramp(float(T)), tau=tau, basis=PARITY_POSITIVE)
        p_gs = ground_state_population(state, cut)
        records.append(TtsRecord(KIND_QA, float(T), float(T), p_gs, tts(T, p_gs, p_d)))
    return records


def qaoa_tts_curve(results: Iterable[LevelResult], p_d: float = DEFAULT_P_D) -> list[TtsRecord]:
    """TTS per optimized level; run time is T_p = sum_i |gamma_i| + |beta_i|."""
    records = []
    for lr in results:
        t_p = lr.params.total_time
        records.append(TtsRecord(KIND_QAOA, float(lr.p), t_p, lr.p_gs,
                                 tts(t_p, lr.p_gs, p_d)))
    return records


def opt_tts(records: Iterable[TtsRecord]) -> OptTts:
    """Minimum TTS over the provided controls; censored entries excluded."""
    usable = [r for r in records if math.isfinite(r.tts)]
    if not usable:
        return OptTts(math.inf, math.nan)
    best = min(usable, key=lambda r: r.tts)
    return OptTts(best.tts, best.control)


def opt_tts_qa(g: Graph, t_grid: Sequence[float], p_d: float = DEFAULT_P_D,
               tau: float | None = None) -> OptTts:
    return opt_tts(qa_tts_curve(g, t_grid, p_d, tau))


def opt_tts_qaoa(results: Iterable[LevelResult], p_d: float = DEFAULT_P_D) -> OptTts:
    return opt_tts(qaoa_tts_curve(results, p_d))


def fit_scaling(points: Iterable[tuple[float, float]], model: str) -> ScalingFit:
    """Least squares of ln(1-r) against p (exponential: 1-r ~ e^{-p/p0}) or
    sqrt(p) (stretched: 1-r ~ e^{-sqrt(p/p0)}).

    Points with 1-r <= 1e-12 are dropped (solution found; log undefined).
    """
    pts = [(float(p), float(e)) for p, e in points if e > 1e-12]
    if len(pts) < 2:
        raise ValueError("need at least two usable (p, 1-r) points")
    p = np.array([x for x, _ in pts])
    y = np.log([e for _, e in pts])
    if model == MODEL_EXPONENTIAL:
        x = p
    elif model == MODEL_STRETCHED:
        x = np.sqrt(p)
    else:
        raise ValueError(f"unknown model {model!r}")
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    if slope >= 0:
        p0 = math.inf  # not decaying; degenerate fit
    elif model == MODEL_EXPONENTIAL:
        p0 = -1.0 / slope
    else:
        p0 = 1.0 / slope ** 2
    residual = float(np.mean((design @ np.array([slope, intercept]) - y) ** 2))
    return ScalingFit(model, float(p0), math.exp(intercept), residual)


def log_correlation(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Pearson correlation of (ln x, ln y); censored (non-finite or
    non-positive) pairs are excluded."""
    pairs = [(x, y) for x, y in zip(xs, ys)
             if math.isfinite(x) and math.isfinite(y) and x > 0 and y > 0]
    if len(pairs) < 2:
        raise ValueError("need at least two finite pairs")
    lx = np.log([x for x, _ in pairs])
    ly = np.log([y for _, y in pairs])
    return float(np.corrcoef(lx, ly)[0, 1])
