"""Time-dependent Schrodinger evolution under H(t) = -[f(t) H_C + (1-f(t)) H_B]
and its spectral diagnostics.

The propagator is applied step by step: the mixing function is frozen at each
step midpoint and exp(-i*tau*H) acts matrix-free through a truncated Taylor
series (sub-stepped so the per-substep norm ||H||*dt stays below 1/2), so no
2^N x 2^N matrix is ever formed.  Spectra, instantaneous populations, the
minimum gap, the adiabaticity measure and Landau-Zener fits operate in the
positive-parity sector by default, where the levels that actually couple to
the evolving state live.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import eigh
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from . import _kernels
from .graphs import Graph
from .statevector import (
    FULL,
    PARITY_POSITIVE,
    DiagonalCost,
    QaoaParams,
    StateVector,
    build_diagonal_cost,
    init_plus_state,
    parity_reduce_cost,
)

SPECTRUM_CAP_FULL = 16
SPECTRUM_CAP_PARITY = 17
DENSE_EIG_CUTOFF = 4096


@dataclass(frozen=True)
class AnnealSchedule:
    """Piecewise-linear mixing function f(t) on [0, T] with f(0)=0, f(T)=1."""

    total_time: float
    knots: tuple[tuple[float, float], ...]
    clamped: bool = False  # set when f-values had to be clipped into [0, 1]

    def __post_init__(self):
        if not self.total_time > 0:
            raise ValueError("total_time must be positive")
        k = tuple((float(t), float(f)) for t, f in self.knots)
        ts = [t for t, _ in k]
        if len(k) < 2 or k[0] != (0.0, 0.0) or k[-1][0] != self.total_time or k[-1][1] != 1.0:
            raise ValueError("knots must run from (0, 0) to (T, 1)")
        if any(t1 >= t2 for t1, t2 in zip(ts, ts[1:])):
            raise ValueError("knot times must be strictly increasing")
        if any(not 0.0 <= f <= 1.0 for _, f in k):
            raise ValueError("f values must lie in [0, 1]")
        object.__setattr__(self, "knots", k)

    def value(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        if t >= self.total_time:
            return 1.0
        ts, fs = self._arrays()
        return float(np.interp(t, ts, fs))

    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        cached = self.__dict__.get("_knot_arrays")
        if cached is None:
            cached = (np.array([t for t, _ in self.knots]),
                      np.array([f for _, f in self.knots]))
            object.__setattr__(self, "_knot_arrays", cached)
        return cached

    def save(self, path) -> None:
        with open(path, "w") as fh:
            for t, f in self.knots:
                fh.write(f"{t:.17g} {f:.17g}\n")


def load_schedule(path) -> AnnealSchedule:
    """Schedule file: one ``t f`` pair per line."""
    knots = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            t, f = line.split()
            knots.append((float(t), float(f)))
    if not knots:
        raise ValueError(f"empty schedule file {path}")
    return AnnealSchedule(knots[-1][0], tuple(knots))


def linear_ramp(total_time: float) -> AnnealSchedule:
    """f(t) = t/T."""
    return AnnealSchedule(total_time, ((0.0, 0.0), (float(total_time), 1.0)))


def qaoa_to_schedule(params: QaoaParams) -> AnnealSchedule:
    """Convert optimized angles to a smooth annealing path: the mixing
    fraction gamma_i/(|gamma_i|+|beta_i|) is placed at the midpoint of the
    i-th layer's duration |gamma_i|+|beta_i|, with boundary knots (0,0) and
    (T,1) and linear interpolation in between.

    f-values landing outside [0,1] (possible when gamma_i < 0) are clamped
    and the schedule is flagged.
    """
    durations = np.abs(params.gammas) + np.abs(params.betas)
    total = float(durations.sum())
    if total <= 0:
        raise ValueError("all-zero parameters give a degenerate schedule")
    knots = [(0.0, 0.0)]
    elapsed = 0.0
    clamped = False
    for gamma, dur in zip(params.gammas, durations):
        if dur == 0.0:
            continue
        t_mid = elapsed + dur / 2.0
        f = gamma / dur
        if not 0.0 <= f <= 1.0:
            f = min(max(f, 0.0), 1.0)
            clamped = True
        knots.append((t_mid, float(f)))
        elapsed += dur
    knots.append((total, 1.0))
    return AnnealSchedule(total, tuple(knots), clamped)


def _h_infinity_bound(cost: DiagonalCost, f: float) -> float:
    n = cost.n_qubits
    return f * float(np.max(cost.values)) + (1.0 - f) * n


def evolve(
    g_or_cost,
    schedule: AnnealSchedule,
    tau: float | None = None,
    basis: str = FULL,
    norm_tol: float = 1e-8,
    max_halvings: int = 12,
    _checkpoints=None,
) -> StateVector:
    """Integrate |psi(t)> from |+>^N to t = T under the schedule.

    Piecewise-constant midpoint discretization with step ``tau`` (default
    min(0.01, T/1000)); each step applies exp(-i*tau*H(f_mid)) matrix-free.
    If the final norm drifts by more than ``norm_tol`` the step is halved and
    the run retried, up to ``max_halvings``.
    """
    cost = _as_basis_cost(g_or_cost, basis)
    T = schedule.total_time
    step0 = tau if tau is not None else min(0.01, T / 1000.0)
    for attempt in range(max_halvings + 1):
        step = step0 / (2 ** attempt)
        state = _evolve_fixed_step(cost, schedule, step, basis, _checkpoints)
        drift = abs(state.norm() - 1.0)
        if drift <= norm_tol:
            return state
    raise RuntimeError(
        f"norm drift {drift:.2e} above {norm_tol} even at step {step:.2e}"
    )


def _as_basis_cost(g_or_cost, basis: str) -> DiagonalCost:
    cost = g_or_cost if isinstance(g_or_cost, DiagonalCost) else build_diagonal_cost(g_or_cost)
    if basis == PARITY_POSITIVE and cost.basis == FULL:
        cost = parity_reduce_cost(cost)
    elif cost.basis != basis:
        raise ValueError("cost/basis mismatch")
    return cost


def _evolve_fixed_step(cost, schedule, step, basis, checkpoints):
    parity = basis == PARITY_POSITIVE
    n_bits = cost.n_qubits - 1 if parity else cost.n_qubits
    state = init_plus_state(cost.n_qubits, basis)
    amp = state.amplitudes
    term = np.empty_like(amp)
    hterm = np.empty_like(amp)
    T = schedule.total_time
    n_steps = max(1, int(np.ceil(T / step)))
    stops = sorted(float(c) for c in checkpoints) if checkpoints else []
    events = sorted(set(np.linspace(T / n_steps, T, n_steps).tolist())
                    | {s for s in stops if 0.0 < s <= T})
    collected = []
    si = 0
    while si < len(stops) and stops[si] <= 1e-12:
        collected.append((stops[si], amp.copy()))
        si += 1
    t = 0.0
    for t_next in events:
        h = t_next - t
        if h > 1e-15:
            f_mid = schedule.value(t + h / 2.0)
            _kernels.expm_step_kernel(
                amp, cost.values, f_mid, h, n_bits, parity,
                _h_infinity_bound(cost, f_mid), term, hterm,
            )
        t = t_next
        while si < len(stops) and stops[si] <= t + 1e-12:
            collected.append((stops[si], amp.copy()))
            si += 1
    if checkpoints is not None:
        state.checkpoints = collected  # type: ignore[attr-defined]
    return state


def hamiltonian_matrix(cost: DiagonalCost, f: float, sparse: bool = False):
    """Dense or CSR matrix of H(f) = -[f*diag(C) + (1-f)*B] in the cost's
    basis (real symmetric)."""
    dim = cost.dim
    parity = cost.basis == PARITY_POSITIVE
    n_bits = cost.n_qubits - 1 if parity else cost.n_qubits
    rows = [np.arange(dim, dtype=np.int64)]
    cols = [np.arange(dim, dtype=np.int64)]
    data = [-f * cost.values]
    for j in range(n_bits):
        idx = np.arange(dim, dtype=np.int64)
        rows.append(idx)
        cols.append(idx ^ (1 << j))
        data.append(np.full(dim, -(1.0 - f)))
    if parity:
        idx = np.arange(dim, dtype=np.int64)
        rows.append(idx)
        cols.append(dim - 1 - idx)
        data.append(np.full(dim, -(1.0 - f)))
    mat = coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    return mat.tocsr() if sparse else mat.toarray()


@dataclass(frozen=True)
class SpectrumSlice:
    """Lowest eigenvalues of H(f) at one point of the path."""

    s: float
    eigenvalues: np.ndarray
    parity_restricted: bool


def _lowest_eigs(cost: DiagonalCost, f: float, k: int, vectors: bool):
    dim = cost.dim
    k = min(k, dim)
    # Lanczos wins when only a few levels of a large matrix are needed;
    # deterministic start vector keeps runs bit-reproducible.
    if dim > 256 and k <= max(6, dim // 64):
        h = hamiltonian_matrix(cost, f, sparse=True)
        v0 = np.full(dim, 1.0 / np.sqrt(dim))
        try:
            vals, vecs = eigsh(h, k=k, which="SA", v0=v0,
                               ncv=min(dim, max(6 * k, 40)))
            order = np.argsort(vals)
            return vals[order], (vecs[:, order] if vectors else None)
        except ArpackNoConvergence:
            pass  # fall through to the dense route
    if dim > DENSE_EIG_CUTOFF:
        raise ValueError(f"eigensolve failed and dim={dim} too large for dense")
    h = hamiltonian_matrix(cost, f)
    if vectors:
        vals, vecs = eigh(h, subset_by_index=(0, k - 1))
        return vals, vecs
    return eigh(h, eigvals_only=True, subset_by_index=(0, k - 1)), None


def spectrum(
    g_or_cost, f_value: float, k: int = 6, parity_restricted: bool = True,
) -> SpectrumSlice:
    """Lowest k levels of H(f); parity_restricted works in the sector that
    couples to |+>^N (the odd sector crosses freely and is excluded)."""
    basis = PARITY_POSITIVE if parity_restricted else FULL
    cost = _as_basis_cost(g_or_cost, basis)
    n = cost.n_qubits
    cap = SPECTRUM_CAP_PARITY if parity_restricted else SPECTRUM_CAP_FULL
    if n > cap:
        raise ValueError(f"spectrum capped at N={cap} for basis {basis}, got N={n}")
    vals, _ = _lowest_eigs(cost, float(f_value), k, vectors=False)
    return SpectrumSlice(float(f_value), np.asarray(vals), parity_restricted)


class MinGap(NamedTuple):
    delta_min: float
    s_star: float


def min_gap(g_or_cost, resolution: float = 0.02) -> MinGap:
    """Minimum of the first coupled excitation gap over s in [0, 1-resolution].

    Coarse grid at ``resolution`` spacing, then bounded golden-section
    refinement around the best grid point; the refined value never exceeds
    the coarse minimum.  The endpoint s=1 is excluded: for degenerate final
    ground states the gap trivially closes there without being the
    anti-crossing of interest.
    """
    cost = _as_basis_cost(g_or_cost, PARITY_POSITIVE)

    def gap(s: float) -> float:
        vals, _ = _lowest_eigs(cost, s, 2, vectors=False)
        return float(vals[1] - vals[0])

    s_hi = 1.0 - resolution
    grid = np.arange(0.0, s_hi + 1e-12, resolution)
    gaps = np.array([gap(s) for s in grid])
    i0 = int(np.argmin(gaps))
    best_s, best_gap = float(grid[i0]), float(gaps[i0])

    lo = grid[max(i0 - 1, 0)]
    hi = grid[min(i0 + 1, len(grid) - 1)]
    from scipy.optimize import minimize_scalar

    res = minimize_scalar(gap, bounds=(lo, hi), method="bounded",
                          options={"xatol": max(resolution * 1e-4, 1e-10)})
    if res.fun < best_gap:
        best_s, best_gap = float(res.x), float(res.fun)
    return MinGap(best_gap, best_s)


def instantaneous_populations(
    g_or_cost, schedule: AnnealSchedule, sample_times, k: int = 4,
    parity_restricted: bool = True, tau: float | None = None,
):
    """Evolve under the schedule and project onto the lowest k instantaneous
    eigenstates at each sample time.

    Returns (times, populations) with populations[t_idx, level]; levels are
    ordered by instantaneous energy (they swap identities at anti-crossings,
    matching how such populations are usually plotted).
    """
    basis = PARITY_POSITIVE if parity_restricted else FULL
    cost = _as_basis_cost(g_or_cost, basis)
    times = sorted(float(t) for t in sample_times)
    if times and (times[0] < 0 or times[-1] > schedule.total_time):
        raise ValueError("sample times outside [0, T]")
    state = evolve(cost, schedule, tau=tau, basis=basis, _checkpoints=times)
    pops = np.zeros((len(times), k))
    for idx, (t, amp) in enumerate(state.checkpoints):  # type: ignore[attr-defined]
        _, vecs = _lowest_eigs(cost, schedule.value(t), k, vectors=True)
        pops[idx] = np.abs(vecs.T.conj() @ amp) ** 2
    return np.array(times), pops


def adiabaticity_measure(
    g_or_cost, f_value: float, k: int, total_time: float,
    parity_restricted: bool = True,
) -> np.ndarray:
    """|<e_0| dH/ds |e_i>| / (gap_i^2 * T) for i = 1..k on the linear ramp,
    where dH/ds = -(H_C - H_B); values much below 1 mean level i stays
    unpopulated."""
    basis = PARITY_POSITIVE if parity_restricted else FULL
    cost = _as_basis_cost(g_or_cost, basis)
    parity = basis == PARITY_POSITIVE
    n_bits = cost.n_qubits - 1 if parity else cost.n_qubits
    vals, vecs = _lowest_eigs(cost, float(f_value), k + 1, vectors=True)
    ground = vecs[:, 0].astype(np.complex128)
    # dH/ds |e_0> = (H_B - H_C)|e_0>
    w = np.empty_like(ground)
    _kernels.b_apply_kernel(ground, w, n_bits, parity)
    w -= cost.values * ground
    out = np.empty(k)
    for i in range(1, k + 1):
        gap = vals[i] - vals[0]
        element = abs(np.vdot(vecs[:, i], w))
        out[i - 1] = element / (gap * gap * total_time) if gap > 0 else np.inf
    return out


class LzFit(NamedTuple):
    c: float
    residual: float


def lz_curve(total_time, c: float, delta_min: float):
    """Landau-Zener ground-state population 1 - exp(-c*T*delta_min^2)."""
    return 1.0 - np.exp(-c * np.asarray(total_time, dtype=float) * delta_min ** 2)


def lz_fit(samples, delta_min: float, t_min: float = 0.0) -> LzFit:
    """Fit c in p_GS(T) = 1 - exp(-c*T*delta_min^2) by least squares on
    ln(1 - p_GS) vs T (no intercept), using samples with T >= t_min (the
    adiabatic tail, above any diabatic-bump region)."""
    pts = [(float(t), float(p)) for t, p in samples if t >= t_min and 0.0 < p < 1.0]
    if not pts:
        raise ValueError("no usable (T, p_GS) samples in the fit window")
    t = np.array([x for x, _ in pts])
    y = np.log1p(-np.array([p for _, p in pts]))
    slope = float(t @ y) / float(t @ t)
    c = -slope / delta_min ** 2
    residual = float(np.sqrt(np.mean((y - slope * t) ** 2)))
    return LzFit(c, residual)
