"""Hot inner loops for statevector simulation.

Every kernel exists twice: a pure-numpy implementation (suffix ``_np``) and,
when numba is importable, a jitted scalar-loop version that the public names
bind to.  All kernels operate in place on complex128 amplitude arrays of
length 2^n_bits; ``parity=True`` adds the index-reversal coupling that
represents the vertex-0 spin flip in the positive-parity sector (there
n_bits = N - 1).
"""

from __future__ import annotations

import math

import numpy as np


def phase_kernel_np(amp: np.ndarray, values: np.ndarray, gamma: float) -> None:
    """amp[z] *= exp(-i * gamma * values[z])."""
    amp *= np.exp(values * (-1j * gamma))


def mixer_kernel_np(amp: np.ndarray, n_bits: int, beta: float, parity: bool) -> None:
    """Apply exp(-i*beta*sigma_x) on every qubit: amplitude pairs (z, z^2^j)
    mix as (c*a0 - i*s*a1, c*a1 - i*s*a0).  In the parity sector the vertex-0
    rotation mixes amp with its reversal."""
    c = math.cos(beta)
    s = -1j * math.sin(beta)
    for j in range(n_bits):
        v = amp.reshape(-1, 2, 1 << j)
        a0 = v[:, 0, :].copy()
        v[:, 0, :] *= c
        v[:, 0, :] += s * v[:, 1, :]
        v[:, 1, :] *= c
        v[:, 1, :] += s * a0
    if parity:
        rev = amp[::-1].copy()
        amp *= c
        amp += s * rev


def b_apply_kernel_np(src: np.ndarray, out: np.ndarray, n_bits: int, parity: bool) -> None:
    """out = (sum_j sigma_x^j) src, plus the reversal term in the parity sector."""
    out[:] = 0
    for j in range(n_bits):
        sv = src.reshape(-1, 2, 1 << j)
        ov = out.reshape(-1, 2, 1 << j)
        ov[:, 0, :] += sv[:, 1, :]
        ov[:, 1, :] += sv[:, 0, :]
    if parity:
        np.add(out, src[::-1], out=out)


def qaoa_evolve_kernel_np(amp, values, gammas, betas, n_bits, parity) -> None:
    """Alternate phase separator and mixer for every layer; in place."""
    for k in range(gammas.size):
        phase_kernel_np(amp, values, gammas[k])
        mixer_kernel_np(amp, n_bits, betas[k], parity)


def qaoa_value_grad_kernel_np(amp, lam, scratch, values, gammas, betas,
                              n_bits, parity, dg, db) -> float:
    """Adjoint-sweep gradient.  ``amp`` holds the forward state on entry and
    is unwound in place together with the costate ``lam``; returns F and
    fills dF/dgamma_k, dF/dbeta_k."""
    p = gammas.size
    np.multiply(values, amp, out=lam)
    f = float(np.real(np.vdot(amp, lam)))
    for k in range(p - 1, -1, -1):
        b_apply_kernel_np(amp, scratch, n_bits, parity)
        db[k] = 2.0 * float(np.imag(np.vdot(lam, scratch)))
        mixer_kernel_np(amp, n_bits, -betas[k], parity)
        mixer_kernel_np(lam, n_bits, -betas[k], parity)
        dg[k] = 2.0 * float(np.imag(np.vdot(lam, values * amp)))
        phase_kernel_np(amp, values, -gammas[k])
        phase_kernel_np(lam, values, -gammas[k])
    return f


def expm_step_kernel_np(amp, values, f, tau, n_bits, parity, hbound,
                        term, hterm) -> None:
    """amp <- exp(-i*tau*H(f)) amp with H(f) = -[f*diag(values) + (1-f)*B],
    via truncated Taylor series over ceil(hbound*tau/0.5) substeps."""
    m = max(1, int(math.ceil(hbound * tau / 0.5)))
    dt = tau / m
    for _ in range(m):
        np.copyto(term, amp)
        for k in range(1, 60):
            b_apply_kernel_np(term, hterm, n_bits, parity)
            hterm *= -(1.0 - f)
            hterm += (-f) * values * term
            hterm *= -1j * dt / k
            term, hterm = hterm, term
            amp += term
            if np.max(np.abs(term)) <= 1e-16 * np.max(np.abs(amp)):
                break


try:  # pragma: no cover - exercised indirectly through the public names
    import numba

    @numba.njit(cache=True)
    def phase_kernel(amp, values, gamma):
        for z in range(amp.size):
            arg = gamma * values[z]
            amp[z] *= complex(math.cos(arg), -math.sin(arg))

    @numba.njit(cache=True)
    def mixer_kernel(amp, n_bits, beta, parity):
        c = math.cos(beta)
        s = math.sin(beta)
        for j in range(n_bits):
            step = 1 << j
            for base in range(0, amp.size, step << 1):
                for off in range(base, base + step):
                    a0 = amp[off]
                    a1 = amp[off + step]
                    amp[off] = c * a0 - 1j * s * a1
                    amp[off + step] = c * a1 - 1j * s * a0
        if parity:
            half = amp.size >> 1
            for k in range(half):
                a0 = amp[k]
                a1 = amp[amp.size - 1 - k]
                amp[k] = c * a0 - 1j * s * a1
                amp[amp.size - 1 - k] = c * a1 - 1j * s * a0

    @numba.njit(cache=True)
    def b_apply_kernel(src, out, n_bits, parity):
        for z in range(out.size):
            out[z] = 0.0
        for j in range(n_bits):
            step = 1 << j
            for base in range(0, src.size, step << 1):
                for off in range(base, base + step):
                    out[off] += src[off + step]
                    out[off + step] += src[off]
        if parity:
            for k in range(src.size):
                out[k] += src[src.size - 1 - k]

    @numba.njit(cache=True)
    def qaoa_evolve_kernel(amp, values, gammas, betas, n_bits, parity):
        for k in range(gammas.size):
            phase_kernel(amp, values, gammas[k])
            mixer_kernel(amp, n_bits, betas[k], parity)

    @numba.njit(cache=True)
    def qaoa_value_grad_kernel(amp, lam, scratch, values, gammas, betas,
                               n_bits, parity, dg, db):
        p = gammas.size
        f = 0.0
        for z in range(amp.size):
            lam[z] = values[z] * amp[z]
            f += (amp[z].conjugate() * lam[z]).real
        for k in range(p - 1, -1, -1):
            b_apply_kernel(amp, scratch, n_bits, parity)
            acc = 0.0
            for z in range(amp.size):
                acc += (lam[z].conjugate() * scratch[z]).imag
            db[k] = 2.0 * acc
            mixer_kernel(amp, n_bits, -betas[k], parity)
            mixer_kernel(lam, n_bits, -betas[k], parity)
            acc = 0.0
            for z in range(amp.size):
                acc += (lam[z].conjugate() * (values[z] * amp[z])).imag
            dg[k] = 2.0 * acc
            phase_kernel(amp, values, -gammas[k])
            phase_kernel(lam, values, -gammas[k])
        return f

    @numba.njit(cache=True)
    def expm_step_kernel(amp, values, f, tau, n_bits, parity, hbound, term, hterm):
        m = max(1, int(math.ceil(hbound * tau / 0.5)))
        dt = tau / m
        for _ in range(m):
            for z in range(amp.size):
                term[z] = amp[z]
            for k in range(1, 60):
                b_apply_kernel(term, hterm, n_bits, parity)
                coef = -1j * dt / k
                tmax = 0.0
                amax = 0.0
                for z in range(amp.size):
                    t = coef * (-(1.0 - f) * hterm[z] - f * values[z] * term[z])
                    term[z] = t
                    amp[z] += t
                    tmax = max(tmax, abs(t.real) + abs(t.imag))
                    amax = max(amax, abs(amp[z].real) + abs(amp[z].imag))
                if tmax <= 1e-16 * amax:
                    break

    USING_NUMBA = True
except ImportError:  # pragma: no cover
    phase_kernel = phase_kernel_np
    mixer_kernel = mixer_kernel_np
    b_apply_kernel = b_apply_kernel_np
    qaoa_evolve_kernel = qaoa_evolve_kernel_np
    qaoa_value_grad_kernel = qaoa_value_grad_kernel_np
    expm_step_kernel = expm_step_kernel_np
    USING_NUMBA = False
