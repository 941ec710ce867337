"""Brute-force reference computations on dense truncated Fock arrays.

These deliberately avoid the sparse/pointer machinery so they can check it.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import sparse

from .kerr import DenseJointState, PointerState, coherent_vector
from .states import FockState

__all__ = [
    "dense_vector",
    "ladder_matrices",
    "dense_moments",
    "dense_outcomes",
    "quadrature_wavefunctions",
    "quadrature_density_dense",
    "quadrature_density_pointer",
    "total_variation",
]


def dense_vector(state: FockState, cutoff: int | None = None) -> np.ndarray:
    """Flattened amplitude vector over the full ``(cutoff+1)**M`` grid."""
    c = state.cutoff if cutoff is None else cutoff
    arr = np.zeros((c + 1,) * state.modes, dtype=complex)
    for occ, amp in state.terms.items():
        arr[occ] = amp
    return arr.reshape(-1)


def ladder_matrices(modes: int, cutoff: int) -> list[sparse.csr_matrix]:
    """Annihilation operators for each mode on the truncated product space."""
    d = cutoff + 1
    a = sparse.diags(np.sqrt(np.arange(1, d)), offsets=1, format="csr")
    eye = sparse.identity(d, format="csr")
    out = []
    for m in range(modes):
        full = a if m == 0 else eye
        for i in range(1, modes):
            full = sparse.kron(full, a if i == m else eye, format="csr")
        out.append(full)
    return out


def dense_moments(state: FockState, i: int, j: int) -> tuple[complex, float]:
    """``(<b_i† b_j>, <N_i N_j>)`` by explicit matrix products.

    The cutoff is raised by one so that hopping never leaves the space.
    """
    c = state.cutoff + 1
    psi = dense_vector(state, c)
    b = ladder_matrices(state.modes, c)
    cross = np.vdot(psi, b[i].conj().T @ (b[j] @ psi))
    ni = b[i].conj().T @ b[i]
    nj = b[j].conj().T @ b[j]
    corr = np.vdot(psi, ni @ (nj @ psi)).real
    return complex(cross), float(corr)


def dense_outcomes(
    dense: DenseJointState, tau: float
) -> tuple[dict[int, float], dict[int, FockState]]:
    """Outcome distribution and conditional states read off a dense joint state.

    Each signal tuple's probe vector is matched against the candidate pointer
    labels ``alpha e^{-i k tau}``; the best match fixes the label and the
    overlap gives the re-contracted signal amplitude. Needs ``alpha != 0``.
    """
    cutoff = dense.probe_cutoff
    sig_shape = dense.amplitudes.shape[:-1]
    k_cand = sum(s - 1 for s in sig_shape)
    labels = []
    for k in range(k_cand + 1):
        v = coherent_vector(dense.alpha * np.exp(-1j * k * tau), cutoff)
        labels.append(v / np.linalg.norm(v))
    labels = np.array(labels)

    probs: dict[int, list[float]] = {}
    amps: dict[int, dict] = {}
    for idx in np.ndindex(*sig_shape):
        v = dense.amplitudes[idx]
        w = float(np.vdot(v, v).real)
        if w == 0.0:
            continue
        overlaps = labels.conj() @ v
        k = int(np.argmax(np.abs(overlaps)))
        probs.setdefault(k, []).append(w)
        amps.setdefault(k, {})[tuple(int(i) for i in idx)] = complex(overlaps[k])
    modes = len(sig_shape)
    sig_cut = max(sig_shape) - 1
    dist = {k: math.fsum(v) for k, v in sorted(probs.items())}
    states = {k: FockState(modes, sig_cut, t).normalize() for k, t in amps.items()}
    return dist, states


def quadrature_wavefunctions(x: np.ndarray, n_max: int) -> np.ndarray:
    """``<x|n>`` for the quadrature ``a + a†`` (vacuum variance 1), n = 0..n_max."""
    out = np.empty((n_max + 1, x.size))
    out[0] = (2 * np.pi) ** -0.25 * np.exp(-(x**2) / 4)
    if n_max >= 1:
        out[1] = x * out[0]
    for n in range(1, n_max):
        out[n + 1] = (x * out[n] - math.sqrt(n) * out[n - 1]) / math.sqrt(n + 1)
    return out


def quadrature_density_dense(dense: DenseJointState, lo_phase: float, x: np.ndarray) -> np.ndarray:
    """Probe quadrature density from the dense joint state (signal traced out)."""
    n = np.arange(dense.probe_cutoff + 1)
    rotated = dense.amplitudes * np.exp(-1j * n * lo_phase)
    psi = quadrature_wavefunctions(x, dense.probe_cutoff)
    flat = rotated.reshape(-1, dense.probe_cutoff + 1)
    wave = flat @ psi
    return np.sum(np.abs(wave) ** 2, axis=0)


def quadrature_density_pointer(state: PointerState, lo_phase: float, x: np.ndarray) -> np.ndarray:
    """Same density from pointer labels: a Gaussian mixture of unit variance."""
    dens = np.zeros_like(x)
    for occ, (phase, amp) in state.terms.items():
        gamma = state.alpha * np.exp(-1j * phase)
        mu = 2 * np.real(gamma * np.exp(-1j * lo_phase))
        dens += abs(amp) ** 2 * np.exp(-((x - mu) ** 2) / 2) / math.sqrt(2 * np.pi)
    return dens


def total_variation(p: dict[int, float] | np.ndarray, q: dict[int, float] | np.ndarray) -> float:
    if isinstance(p, dict):
        keys = set(p) | set(q)
        return 0.5 * math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))
