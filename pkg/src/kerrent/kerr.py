"""Cross-Kerr evolution of signal modes against a coherent probe.

The probe is never expanded: a coherent probe stays coherent under the
interaction, so each signal occupation tuple carries an analytic probe label
``alpha * exp(-i * phase)`` where ``phase = sum_i n_i * tau_i``. The dense
truncated-Fock oracle at the bottom of the module exists only to validate that
representation at small ``|alpha|``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CutoffTooSmall, ModeMismatch
from .states import FockState, Occupation, poisson_tail

__all__ = [
    "KerrInteraction",
    "PointerState",
    "lift",
    "apply_kerr",
    "run_sequence",
    "DenseJointState",
    "dense_oracle",
    "coherent_vector",
    "probe_cutoff_for",
]


@dataclass(frozen=True)
class KerrInteraction:
    """One pass of the probe through a Kerr medium shared with ``signal_mode``.

    ``tau`` is the scaled interaction time (nonlinear phase per photon pair).
    """

    tau: float
    signal_mode: int

    def __post_init__(self) -> None:
        if not math.isfinite(self.tau):
            raise ValueError("tau must be finite")

    @classmethod
    def from_physical(cls, coupling: float, time: float, signal_mode: int) -> KerrInteraction:
        return cls(coupling * time, signal_mode)


@dataclass(frozen=True)
class PointerState:
    """Joint signal/probe state with the probe kept as a coherent label.

    ``terms`` maps an occupation tuple to ``(phase, amplitude)``; the probe for
    that tuple is ``|alpha * exp(-1j * phase)>``. ``mode_taus`` records the
    total coupling applied to each signal mode so far.
    """

    modes: int
    cutoff: int
    alpha: complex
    terms: dict[Occupation, tuple[float, complex]]
    mode_taus: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.mode_taus:
            object.__setattr__(self, "mode_taus", (0.0,) * self.modes)

    def __len__(self) -> int:
        return len(self.terms)

    def norm_sq(self) -> float:
        return math.fsum(abs(a) ** 2 for _, a in self.terms.values())

    def probe_label(self, occ: Occupation) -> complex:
        phase, _ = self.terms[occ]
        return self.alpha * cmath.exp(-1j * phase)

    def signal(self) -> FockState:
        """Signal amplitudes with the probe discarded (not a reduced state)."""
        return FockState._trusted(self.modes, self.cutoff, {o: a for o, (_, a) in self.terms.items()})


def lift(signal: FockState, alpha: complex) -> PointerState:
    """Attach a probe ``|alpha>`` with zero accumulated phase."""
    terms = {occ: (0.0, amp) for occ, amp in signal.terms.items()}
    return PointerState(signal.modes, signal.cutoff, complex(alpha), terms)


def apply_kerr(state: PointerState, k: KerrInteraction) -> PointerState:
    if not 0 <= k.signal_mode < state.modes:
        raise ModeMismatch(f"signal mode {k.signal_mode} out of range for {state.modes} modes")
    m = k.signal_mode
    terms = {occ: (phase + occ[m] * k.tau, amp) for occ, (phase, amp) in state.terms.items()}
    taus = list(state.mode_taus)
    taus[m] += k.tau
    return PointerState(state.modes, state.cutoff, state.alpha, terms, tuple(taus))


def run_sequence(signal: FockState, alpha: complex, taus: Sequence[float]) -> PointerState:
    """Probe interacts with modes 0, 1, ..., M-1 in turn, coupling ``taus[i]``."""
    if len(taus) != signal.modes:
        raise ModeMismatch(f"{len(taus)} couplings for {signal.modes} modes")
    state = lift(signal, alpha)
    for mode, tau in enumerate(taus):
        state = apply_kerr(state, KerrInteraction(float(tau), mode))
    return state


# dense oracle --------------------------------------------------------------


def coherent_vector(gamma: complex, cutoff: int) -> np.ndarray:
    """Fock amplitudes ``e^{-|g|^2/2} g^n / sqrt(n!)`` for n = 0..cutoff, unrenormalized."""
    out = np.empty(cutoff + 1, dtype=complex)
    out[0] = math.exp(-abs(gamma) ** 2 / 2)
    for n in range(1, cutoff + 1):
        out[n] = out[n - 1] * gamma / math.sqrt(n)
    return out


def probe_cutoff_for(alpha: complex, tail_tol: float = 1e-12, hard_limit: int = 400) -> int:
    mean = abs(alpha) ** 2
    for n in range(hard_limit + 1):
        if poisson_tail(mean, n) <= tail_tol:
            return n
    raise CutoffTooSmall(f"probe |alpha|={abs(alpha)} needs more than {hard_limit} photons")


@dataclass(frozen=True)
class DenseJointState:
    """Joint amplitudes on a full truncated grid; the last axis is the probe."""

    amplitudes: np.ndarray
    alpha: complex

    @property
    def signal_modes(self) -> int:
        return self.amplitudes.ndim - 1

    @property
    def probe_cutoff(self) -> int:
        return self.amplitudes.shape[-1] - 1

    def probe_vector(self, occ: Occupation) -> np.ndarray:
        return self.amplitudes[tuple(occ)]

    def occupations(self) -> list[Occupation]:
        return [tuple(int(i) for i in idx) for idx in np.ndindex(*self.amplitudes.shape[:-1])]


def dense_oracle(
    signal: FockState,
    alpha: complex,
    taus: Sequence[float],
    probe_cutoff: int | None = None,
    tail_tol: float = 1e-12,
) -> DenseJointState:
    """Evolve signal ⊗ |alpha> with ``exp(-i n_probe sum_i tau_i n_i)`` on a dense grid.

    The probe is expanded in Fock space up to ``probe_cutoff`` and renormalized.
    """
    if len(taus) != signal.modes:
        raise ModeMismatch(f"{len(taus)} couplings for {signal.modes} modes")
    if probe_cutoff is None:
        probe_cutoff = probe_cutoff_for(alpha, tail_tol)
    elif poisson_tail(abs(alpha) ** 2, probe_cutoff) > tail_tol:
        raise CutoffTooSmall(f"probe cutoff {probe_cutoff} too small for |alpha|={abs(alpha)}")

    dim = signal.cutoff + 1
    sig = np.zeros((dim,) * signal.modes, dtype=complex)
    for occ, amp in signal.terms.items():
        sig[occ] = amp
    probe = coherent_vector(alpha, probe_cutoff)
    probe /= np.linalg.norm(probe)
    joint = np.multiply.outer(sig, probe)

    # generator sum_i tau_i n_i on the signal grid, then the diagonal unitary
    grids = np.meshgrid(*[np.arange(dim)] * signal.modes, indexing="ij")
    shift = sum(t * g for t, g in zip(taus, grids)) if signal.modes else 0.0
    n_probe = np.arange(probe_cutoff + 1)
    unitary = np.exp(-1j * np.multiply.outer(shift, n_probe))
    return DenseJointState(joint * unitary, complex(alpha))
