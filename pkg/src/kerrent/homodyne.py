"""Homodyne discrimination of rotated coherent pointer states.

Two readout models are provided. :class:`IdealProjective` treats the pointer
states as perfectly distinguishable and projects the signal onto a fixed total
photon number. :class:`GaussianQuadrature` measures one probe quadrature with
vacuum-limited (unit) variance and decides by nearest mean, which quantifies
the finite pointer overlap.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import AmbiguousOutcomeLabeling, DegenerateReadout, NotApplicable
from .kerr import PointerState
from .states import FockState

__all__ = [
    "pointer_overlap",
    "log_pointer_overlap",
    "approx_log_pointer_overlap",
    "DistinguishabilityReport",
    "distinguishability_check",
    "IdealProjective",
    "GaussianQuadrature",
    "HomodyneModel",
    "OutcomeRecord",
    "gaussian_tail",
    "quadrature_means",
    "confusion_matrix",
    "measure",
]

DEFAULT_ORTHOGONALITY_TOL = 1e-6


def log_pointer_overlap(alpha: complex, tau: float, n: int, m: int) -> float:
    """``log |<alpha e^{-i n tau} | alpha e^{-i m tau}>|^2``."""
    s = math.sin((n - m) * tau / 2)
    return -4.0 * abs(alpha) ** 2 * s * s


def pointer_overlap(alpha: complex, tau: float, n: int, m: int) -> float:
    """Squared overlap of the probe labels for total photon numbers ``n`` and ``m``.

    Exact closed form ``exp(-4 |alpha|^2 sin^2((n - m) tau / 2))``.
    """
    return math.exp(log_pointer_overlap(alpha, tau, n, m))


def approx_log_pointer_overlap(alpha: complex, tau: float, n: int, m: int) -> float:
    """Small-angle form ``-|alpha|^2 (n - m)^2 tau^2``."""
    return -(abs(alpha) ** 2) * ((n - m) * tau) ** 2


@dataclass(frozen=True)
class DistinguishabilityReport:
    brightness: float  # |alpha|^2 tau^2
    max_adjacent_overlap: float
    max_overlap: float
    tol: float
    passed: bool


def distinguishability_check(
    alpha: complex, tau: float, k_max: int, tol: float = DEFAULT_ORTHOGONALITY_TOL
) -> DistinguishabilityReport:
    """Check that all pointer labels for k = 0..k_max are nearly orthogonal.

    The verdict uses the largest overlap over every pair of labels, which equals
    the adjacent overlap unless ``k_max * tau`` wraps far enough round the circle.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    adjacent = pointer_overlap(alpha, tau, 0, 1)
    worst = max(pointer_overlap(alpha, tau, 0, d) for d in range(1, k_max + 1))
    return DistinguishabilityReport(
        brightness=abs(alpha) ** 2 * tau**2,
        max_adjacent_overlap=adjacent,
        max_overlap=worst,
        tol=tol,
        passed=worst <= tol,
    )


# readout models --------------------------------------------------------------


@dataclass(frozen=True)
class IdealProjective:
    pass


@dataclass(frozen=True)
class GaussianQuadrature:
    """Quadrature readout; ``lo_phase`` is absolute. ``None`` means arg(alpha) + pi/2."""

    lo_phase: float | None = None


Readout = Union[IdealProjective, GaussianQuadrature]


@dataclass(frozen=True)
class HomodyneModel:
    readout: Readout
    alpha: complex
    tau: float

    @property
    def lo_phase(self) -> float:
        if not isinstance(self.readout, GaussianQuadrature):
            raise NotApplicable("ideal readout has no local-oscillator phase")
        if self.readout.lo_phase is not None:
            return self.readout.lo_phase
        return cmath.phase(self.alpha) + math.pi / 2


def gaussian_tail(x: float) -> float:
    """Standard normal upper tail Q(x)."""
    if x == math.inf:
        return 0.0
    if x == -math.inf:
        return 1.0
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def _interval_probability(lo: float, hi: float, mu: float) -> float:
    a, b = lo - mu, hi - mu
    # evaluate on the side of the mean where both tails are small
    if a >= 0:
        return gaussian_tail(a) - gaussian_tail(b)
    if b <= 0:
        return gaussian_tail(-b) - gaussian_tail(-a)
    return 1.0 - gaussian_tail(-a) - gaussian_tail(b)


def quadrature_means(model: HomodyneModel, k_max: int) -> np.ndarray:
    """``2 Re(alpha e^{-i k tau} e^{-i lo_phase})`` for k = 0..k_max."""
    lo = model.lo_phase
    ks = np.arange(k_max + 1)
    return 2.0 * np.real(model.alpha * np.exp(-1j * (ks * model.tau + lo)))


def confusion_matrix(model: HomodyneModel, k_max: int) -> np.ndarray:
    """``C[k, j] = P(decide j | true k)`` for the nearest-mean decision rule.

    Labels whose means coincide are merged into the smallest such label; the
    others are never decided.
    """
    if not isinstance(model.readout, GaussianQuadrature):
        raise NotApplicable("confusion matrix needs the Gaussian quadrature readout")
    means = quadrature_means(model, k_max)
    order = sorted(range(k_max + 1), key=lambda k: (means[k], k))
    reps: list[int] = []
    for k in order:
        if reps and means[k] == means[reps[-1]]:
            continue
        reps.append(k)
    if len(reps) < 2 and k_max >= 1:
        raise DegenerateReadout("all pointer quadrature means coincide")
    # merged labels map to the smallest k sharing the mean
    rep_label = {}
    for r in reps:
        rep_label[r] = min(k for k in range(k_max + 1) if means[k] == means[r])
    edges = [-math.inf]
    for left, right in zip(reps, reps[1:]):
        edges.append(0.5 * (means[left] + means[right]))
    edges.append(math.inf)

    out = np.zeros((k_max + 1, k_max + 1))
    for k in range(k_max + 1):
        for idx, r in enumerate(reps):
            out[k, rep_label[r]] = _interval_probability(edges[idx], edges[idx + 1], means[k])
    return out


# measurement ------------------------------------------------------------------


@dataclass(frozen=True)
class OutcomeRecord:
    """Result of one readout label ``k``.

    ``conditional_state`` is the ideal post-selected state for the label.
    ``mixture`` lists ``(true_k, weight, state)`` components of the actual
    post-measurement ensemble; for the ideal readout it has one entry. The
    components live in different photon-number sectors.
    """

    k: int
    probability: float
    conditional_state: FockState
    fidelity: float = 1.0
    mixture: tuple[tuple[int, float, FockState], ...] = field(default=())


def _group_by_total(state: PointerState) -> dict[int, FockState]:
    groups: dict[int, dict] = {}
    for occ, (_, amp) in state.terms.items():
        if amp == 0:
            continue
        groups.setdefault(sum(occ), {})[occ] = amp
    return {
        k: FockState._trusted(state.modes, state.cutoff, terms) for k, terms in sorted(groups.items())
    }


def _check_labeling(state: PointerState, model: HomodyneModel) -> None:
    taus = state.mode_taus
    if any(t != taus[0] for t in taus):
        raise AmbiguousOutcomeLabeling(f"couplings differ across modes: {taus}")
    if not math.isclose(taus[0], model.tau, rel_tol=1e-12, abs_tol=1e-15):
        raise ValueError(f"model tau {model.tau} != applied tau {taus[0]}")
    if model.alpha != state.alpha:
        raise ValueError("model alpha does not match the probe amplitude")


def measure(state: PointerState, model: HomodyneModel) -> list[OutcomeRecord]:
    """Outcome records sorted by label, including k = 0."""
    _check_labeling(state, model)
    groups = _group_by_total(state)
    probs = {k: g.norm_sq() for k, g in groups.items()}
    conditional = {k: g.normalize() for k, g in groups.items() if probs[k] > 0}

    if isinstance(model.readout, IdealProjective):
        return [
            OutcomeRecord(k, probs[k], s, 1.0, ((k, 1.0, s),)) for k, s in conditional.items()
        ]

    k_max = max(groups)
    conf = confusion_matrix(model, k_max)
    records = []
    for j in range(k_max + 1):
        joint = {k: float(conf[k, j]) * probs[k] for k in conditional}
        p_j = math.fsum(joint.values())
        if p_j == 0.0:
            continue
        weights = {k: w / p_j for k, w in joint.items() if w > 0}
        main = j if j in conditional else max(weights, key=weights.get)
        mixture = tuple((k, w, conditional[k]) for k, w in sorted(weights.items()))
        records.append(OutcomeRecord(j, p_j, conditional[main], weights.get(j, 0.0), mixture))
    return records
