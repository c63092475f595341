"""Exact statevector simulation of the alternating-operator (QAOA) circuit.

The circuit applies p layers of exp(-i*gamma_k*H_C) exp(-i*beta_k*H_B) to
|+>^N, where H_C is the diagonal MaxCut Hamiltonian and H_B = sum_j sigma_x^j.
The phase separator is a single fused pass over the amplitudes; the mixer is N
sequential single-qubit sweeps (exp(-i*beta*H_B) factorizes per qubit).  No
2^N x 2^N matrix is ever formed.

Positive-parity sector: H_C and H_B both commute with P = prod_j sigma_x^j and
|+>^N is P-invariant, so dynamics can be simulated in the +1 eigensector with
dimension 2^(N-1).  Reduced basis index k represents the symmetric pair
{2k, flip(2k)} (vertex 0 fixed to side 0); the vertex-0 spin flip becomes the
index-reversal permutation k -> 2^(N-1)-1-k.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graphs import Graph, CutResult, bitstring_to_index, cut_value

FULL = "full"
PARITY_POSITIVE = "parity_positive"

STATEVECTOR_CAP = 20  # desk-scale guard for 2^N amplitude arrays

_MAGIC = b"QLABSV01"
_BASIS_CODES = {FULL: 0, PARITY_POSITIVE: 1}


@dataclass(frozen=True)
class QaoaParams:
    """Variational angles (gamma_1..gamma_p, beta_1..beta_p)."""

    gammas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.gammas, dtype=float))
        b = np.atleast_1d(np.asarray(self.betas, dtype=float))
        if g.ndim != 1 or g.shape != b.shape or g.size < 1:
            raise ValueError("gammas and betas must be 1d arrays of equal length >= 1")
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(b))):
            raise ValueError("parameters must be finite")
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "betas", b)

    @property
    def p(self) -> int:
        return self.gammas.size

    def as_vector(self) -> np.ndarray:
        """Flat layout (gammas, then betas), matching gradient()."""
        return np.concatenate([self.gammas, self.betas])

    @staticmethod
    def from_vector(x) -> "QaoaParams":
        x = np.asarray(x, dtype=float)
        if x.size % 2:
            raise ValueError("parameter vector length must be even")
        p = x.size // 2
        return QaoaParams(x[:p], x[p:])

    @property
    def total_time(self) -> float:
        """Equivalent annealing duration T_p = sum_i |gamma_i| + |beta_i|."""
        return float(np.sum(np.abs(self.gammas)) + np.sum(np.abs(self.betas)))


@dataclass(frozen=True)
class DiagonalCost:
    """Cut values over the computational basis: values[z] = C(z)."""

    values: np.ndarray
    n_qubits: int
    basis: str = FULL
    total_weight: float = 0.0

    @property
    def dim(self) -> int:
        return self.values.size


@dataclass
class StateVector:
    """Dense complex amplitudes over 2^N (full) or 2^(N-1) (parity) states."""

    amplitudes: np.ndarray
    n_qubits: int
    basis: str = FULL

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.n_qubits, self.basis)


def _expected_dim(n: int, basis: str) -> int:
    return 1 << (n if basis == FULL else n - 1)


def _n_bits(state_or_cost) -> int:
    n = state_or_cost.n_qubits
    return n if state_or_cost.basis == FULL else n - 1


def _check_same_basis(state: StateVector, cost: DiagonalCost) -> None:
    if state.basis != cost.basis or state.n_qubits != cost.n_qubits:
        raise ValueError(
            f"basis mismatch: state is ({state.n_qubits}, {state.basis}), "
            f"cost is ({cost.n_qubits}, {cost.basis})"
        )


def build_diagonal_cost(g: Graph, cap: int = STATEVECTOR_CAP) -> DiagonalCost:
    """Cut value of every basis state, accumulated per edge with bit tricks."""
    n = g.n_vertices
    if n > cap:
        raise ValueError(f"diagonal cost capped at N={cap}, got N={n}")
    z = np.arange(1 << n, dtype=np.int64)
    vals = np.zeros(1 << n)
    for i, j, w in g.edges:
        vals += w * (((z >> i) ^ (z >> j)) & 1)
    return DiagonalCost(vals, n, FULL, g.total_weight)


def parity_reduce_cost(cost: DiagonalCost) -> DiagonalCost:
    """Restrict the diagonal cost to the positive-parity basis (even indices)."""
    if cost.basis != FULL:
        raise ValueError("cost is already parity-reduced")
    return DiagonalCost(
        np.ascontiguousarray(cost.values[0::2]), cost.n_qubits, PARITY_POSITIVE,
        cost.total_weight,
    )


def init_plus_state(n: int, basis: str = FULL) -> StateVector:
    """|+>^N: uniform amplitudes in either basis."""
    dim = _expected_dim(n, basis)
    amp = np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)
    return StateVector(amp, n, basis)


def apply_phase_separator(state: StateVector, cost: DiagonalCost, gamma: float) -> StateVector:
    """amplitude[z] *= exp(-i*gamma*C(z)); in place."""
    _check_same_basis(state, cost)
    _kernels.phase_kernel(state.amplitudes, cost.values, float(gamma))
    return state


def apply_mixer(state: StateVector, beta: float) -> StateVector:
    """exp(-i*beta*H_B) as sequential single-qubit sweeps; in place."""
    _kernels.mixer_kernel(
        state.amplitudes, _n_bits(state), float(beta), state.basis == PARITY_POSITIVE
    )
    return state


def _as_cost(g_or_cost, basis: str) -> DiagonalCost:
    if isinstance(g_or_cost, DiagonalCost):
        cost = g_or_cost
        if cost.basis == FULL and basis == PARITY_POSITIVE:
            cost = parity_reduce_cost(cost)
        elif cost.basis != basis:
            raise ValueError("cannot lift a parity-reduced cost back to the full basis")
        return cost
    cost = build_diagonal_cost(g_or_cost)
    return cost if basis == FULL else parity_reduce_cost(cost)


def qaoa_state(g_or_cost, params: QaoaParams, basis: str = FULL) -> StateVector:
    """Run the p-level circuit from |+>^N.  Accepts a Graph or a prebuilt
    DiagonalCost (full costs are reduced automatically for parity runs)."""
    cost = _as_cost(g_or_cost, basis)
    state = init_plus_state(cost.n_qubits, basis)
    _kernels.qaoa_evolve_kernel(
        state.amplitudes, cost.values, params.gammas, params.betas,
        _n_bits(state), basis == PARITY_POSITIVE,
    )
    return state


def expectation(state: StateVector, cost: DiagonalCost) -> float:
    """F = <psi| H_C |psi> = sum_z |a_z|^2 C(z)."""
    _check_same_basis(state, cost)
    return float(np.real(np.vdot(state.amplitudes, cost.values * state.amplitudes)))


def expectation_and_variance(state: StateVector, cost: DiagonalCost) -> tuple[float, float]:
    """(F, <C^2> - F^2); the variance feeds the projection-noise module."""
    _check_same_basis(state, cost)
    probs = state.probabilities()
    mean = float(probs @ cost.values)
    second = float(probs @ (cost.values ** 2))
    return mean, max(second - mean * mean, 0.0)


def gradient(g_or_cost, params: QaoaParams, basis: str = FULL) -> np.ndarray:
    """Exact dF/d(gamma_1..p, beta_1..p) via one forward and one adjoint sweep.

    Cost is O(p) circuit applications total: the forward state and the
    back-propagated costate (dF/dbeta_k = 2 Im <lam_k|H_B|psi_k>, likewise
    for gamma with H_C after peeling the mixer) are unwound layer by layer,
    which avoids storing p intermediate states or re-simulating per
    parameter.
    """
    return value_and_gradient(g_or_cost, params, basis)[1]


def value_and_gradient(g_or_cost, params: QaoaParams, basis: str = FULL) -> tuple[float, np.ndarray]:
    """F and its exact gradient from a single forward+adjoint pass (the
    forward state is shared, so this is cheaper than two separate calls)."""
    cost = _as_cost(g_or_cost, basis)
    parity = basis == PARITY_POSITIVE
    state = qaoa_state(cost, params, basis)
    a = state.amplitudes
    p = params.p
    dg = np.empty(p)
    db = np.empty(p)
    f = _kernels.qaoa_value_grad_kernel(
        a, np.empty_like(a), np.empty_like(a), cost.values,
        params.gammas, params.betas, _n_bits(state), parity, dg, db,
    )
    return float(f), np.concatenate([dg, db])


def _optimal_pair_indices(cr: CutResult, n: int) -> np.ndarray:
    """Parity-basis indices of the optimal pairs (even member >> 1)."""
    idx = cr.optimal_indices()
    return np.unique(idx[idx % 2 == 0] >> 1)


def ground_state_population(state: StateVector, cr: CutResult) -> float:
    """Total probability on the optimal-cut strings (the ground space of -H_C)."""
    some = next(iter(cr.optimal_strings))
    if len(some) != state.n_qubits:
        raise ValueError("cut result does not match state size")
    probs = state.probabilities()
    if state.basis == FULL:
        return float(np.sum(probs[cr.optimal_indices()]))
    return float(np.sum(probs[_optimal_pair_indices(cr, state.n_qubits)]))


def sample_basis_indices(state: StateVector, count: int, rng: np.random.Generator) -> np.ndarray:
    """Measurement outcomes as full-basis indices (inverse-CDF sampling).

    Parity-reduced states first sample the symmetric pair, then pick either
    member with probability 1/2.
    """
    cdf = np.cumsum(state.probabilities())
    cdf /= cdf[-1]
    draws = np.searchsorted(cdf, rng.random(count), side="right")
    if state.basis == FULL:
        return draws.astype(np.int64)
    n = state.n_qubits
    mask = (1 << n) - 1
    z = (draws.astype(np.int64) << 1)
    flip = rng.random(count) < 0.5
    z[flip] ^= mask
    return z


def sample_measurements(state: StateVector, count: int, seed) -> list[str]:
    """i.i.d. computational-basis measurement strings; deterministic per seed."""
    rng = np.random.default_rng(seed)
    from .graphs import index_to_bitstring

    return [index_to_bitstring(int(z), state.n_qubits) for z in
            sample_basis_indices(state, count, rng)]


def lift_state(state: StateVector) -> StateVector:
    """Embed a positive-parity state back into the full 2^N basis."""
    if state.basis != PARITY_POSITIVE:
        raise ValueError("state is already in the full basis")
    n = state.n_qubits
    mask = (1 << n) - 1
    amp = np.zeros(1 << n, dtype=np.complex128)
    half = state.amplitudes / np.sqrt(2.0)
    even = np.arange(state.dim, dtype=np.int64) << 1
    amp[even] = half
    amp[even ^ mask] = half
    return StateVector(amp, n, FULL)


def reduce_state(state: StateVector) -> StateVector:
    """Project a full-basis state onto the positive-parity sector.

    Exact (norm preserving) when the state is parity symmetric, which holds
    for anything generated from |+>^N by H_C/H_B dynamics.
    """
    if state.basis != FULL:
        raise ValueError("state is already parity-reduced")
    n = state.n_qubits
    mask = (1 << n) - 1
    even = np.arange(1 << (n - 1), dtype=np.int64) << 1
    amp = (state.amplitudes[even] + state.amplitudes[even ^ mask]) / np.sqrt(2.0)
    return StateVector(amp, n, PARITY_POSITIVE)


def dump_state(state: StateVector, path) -> None:
    """Binary dump: 16-byte header (magic, N, basis code) + little-endian
    complex128 amplitudes."""
    header = _MAGIC + struct.pack("<II", state.n_qubits, _BASIS_CODES[state.basis])
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(state.amplitudes.astype("<c16").tobytes())


def load_state(path) -> StateVector:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if header[:8] != _MAGIC:
            raise ValueError(f"{path}: not a state dump")
        n, code = struct.unpack("<II", header[8:])
        basis = {v: k for k, v in _BASIS_CODES.items()}[code]
        amp = np.frombuffer(fh.read(), dtype="<c16").astype(np.complex128)
    if amp.size != _expected_dim(n, basis):
        raise ValueError(f"{path}: amplitude count {amp.size} inconsistent with header")
    return StateVector(amp, n, basis)
