"""Self-check suite backing the ``verify`` subcommand.

Every check pairs the library path with an independent route (closed form,
dense matrices, dense Kerr evolution, Gaussian tail function) and reports the
largest deviation seen against a fixed tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .homodyne import (
    GaussianQuadrature,
    HomodyneModel,
    confusion_matrix,
    log_pointer_overlap,
)
from .io import outcomes_from_list, outcomes_to_list
from .kerr import dense_oracle, run_sequence
from .oracles import dense_moments, dense_outcomes, total_variation
from .protocol import ProtocolConfig, poisson_probability, run_protocol, weak_probability
from .states import CoherentSpec, FockState, PoissonCutoff, expand_coherent, tensor_all
from .witness import TargetState, build_target, fidelity, moments, witness

__all__ = ["Check", "VerificationReport", "run_verification", "DEFAULT_CHECKS"]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    error: float
    tolerance: float
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_rel_error(self) -> float:
        return max((c.error for c in self.checks), default=0.0)

    def to_json(self) -> str:
        return json.dumps(
            {
                "passed": self.passed,
                "checks": [
                    {"name": c.name, "pass": c.passed, "error": c.error, "tolerance": c.tolerance, "detail": c.detail}
                    for c in self.checks
                ],
            },
            indent=1,
        ) + "\n"


def _check(name: str, error: float, tol: float, detail: str = "") -> Check:
    return Check(name, bool(error <= tol), float(error), tol, detail)


def check_overlap_identity() -> Check:
    """Closed form vs ``-|g1 - g2|^2`` computed from the complex labels."""
    worst = 0.0
    for a in (10.0, 100.0, 1000.0):
        for tau in (0.001, 0.01, 0.05):
            got = log_pointer_overlap(a, tau, 0, 1)
            ref = -abs(a - a * np.exp(-1j * tau)) ** 2
            worst = max(worst, abs(got - ref) / abs(ref))
    return _check("overlap_identity", worst, 1e-12, "log-overlap relative error")


def check_overlap_grid() -> Check:
    """Small-angle approximation of the overlap for |tau| <= 0.05.

    Deviation is measured on the overlap value itself (a probability in [0, 1]).
    """
    worst = 0.0
    for tau in np.linspace(-0.05, 0.05, 101):
        for a in np.geomspace(1.0, 1e4, 81):
            exact = math.exp(-4 * a * a * math.sin(tau / 2) ** 2)
            approx = math.exp(-(a * tau) ** 2)
            worst = max(worst, abs(exact - approx))
    return _check("overlap_small_angle_grid", worst, 1e-4, "max |exact - approx| over |alpha| in [1, 1e4]")


def _kphoton_checks(modes: int, ks: Sequence[int]) -> tuple[Check, Check]:
    worst_f, worst_p = 0.0, 0.0
    for beta in (0.1, 0.5, 1.0):
        res = run_protocol(ProtocolConfig(modes=modes, beta=beta, beta_model="poisson", k_max=max(ks)))
        for k in ks:
            rec = res.outcome(k)
            target = build_target(TargetState("kphoton", k, modes))
            worst_f = max(worst_f, 1.0 - fidelity(rec.conditional_state, target))
            p = poisson_probability(modes, beta, k)
            worst_p = max(worst_p, abs(rec.probability - p) / p)
    return (
        _check(f"{modes}mode_fidelity", worst_f, 1e-12),
        _check(f"{modes}mode_probability", worst_p, 1e-10, "relative"),
    )


def check_two_mode() -> list[Check]:
    return list(_kphoton_checks(2, range(1, 7)))


def check_three_mode() -> list[Check]:
    return list(_kphoton_checks(3, range(1, 6)))


def check_weak() -> list[Check]:
    worst_f, worst_p = 0.0, 0.0
    for beta in (0.05, 0.1, 0.3):
        for modes, ks in ((2, (1,)), (3, (1, 2))):
            res = run_protocol(ProtocolConfig(modes=modes, beta=beta, beta_model="weak"))
            for k in ks:
                rec = res.outcome(k)
                target = build_target(TargetState("w", k, modes))
                worst_f = max(worst_f, 1.0 - fidelity(rec.conditional_state, target))
                worst_p = max(worst_p, abs(rec.probability - weak_probability(modes, beta, k)))
    return [_check("weak_fidelity", worst_f, 1e-12), _check("weak_probability", worst_p, 1e-12)]


def check_witness_values() -> list[Check]:
    worst_closed, worst_dense = 0.0, 0.0
    passes = True
    for modes in (2, 3):
        for k in range(1, 11):
            state = build_target(TargetState("kphoton", k, modes))
            for i, j in [(0, 1), (1, 2)][: modes - 1]:
                m = moments(state, i, j)
                passes &= m.passed
                worst_closed = max(
                    worst_closed,
                    abs(m.cross_abs_sq - k * k / modes**2),
                    abs(m.number_corr - k * (k - 1) / modes**2),
                )
                if k <= 6:
                    cross, corr = dense_moments(state, i, j)
                    worst_dense = max(worst_dense, abs(abs(cross) ** 2 - m.cross_abs_sq), abs(corr - m.number_corr))
    return [
        _check("witness_closed_form", worst_closed, 1e-12),
        _check("witness_dense_matrices", worst_dense, 1e-12),
        Check("witness_verdicts", passes, 0.0, 0.0),
    ]


def check_oracle(alphas: Sequence[float] = (1.0, 2.0, 3.0, 4.0), tau: float = 0.1, beta: float = 0.5) -> list[Check]:
    worst_tv, worst_f = 0.0, 0.0
    arm = expand_coherent(CoherentSpec(beta, PoissonCutoff()))
    signal = tensor_all([arm, arm])
    for a in alphas:
        pointer = run_sequence(signal, a, (tau, tau))
        groups: dict[int, dict] = {}
        for occ, (_, amp) in pointer.terms.items():
            groups.setdefault(sum(occ), {})[occ] = amp
        p_ptr = {k: math.fsum(abs(x) ** 2 for x in g.values()) for k, g in groups.items()}
        dense = dense_oracle(signal, a, (tau, tau))
        p_dense, s_dense = dense_outcomes(dense, tau)
        worst_tv = max(worst_tv, total_variation(p_ptr, p_dense))
        for k, g in groups.items():
            s_ptr = FockState(2, signal.cutoff, g).normalize()
            worst_f = max(worst_f, abs(1.0 - fidelity(s_dense[k], s_ptr)))
    return [
        _check("oracle_total_variation", worst_tv, 1e-8, f"alpha in {list(alphas)}"),
        _check("oracle_conditional_fidelity", worst_f, 1e-8),
    ]


def check_gaussian() -> list[Check]:
    tau = 0.01
    bright = HomodyneModel(GaussianQuadrature(), 8.0 / tau, tau)
    conf = confusion_matrix(bright, 5)
    off = float(np.max((conf - np.diag(np.diag(conf))).sum(axis=1)))
    # two labels whose means sit 2 apart
    a = 1.0 / math.sin(tau)
    two = confusion_matrix(HomodyneModel(GaussianQuadrature(), a, tau), 1)
    ref = float(special.ndtr(-1.0))
    err = max(abs(two[0, 1] - ref), abs(two[1, 0] - ref))
    return [
        _check("gaussian_bright_offdiagonal", off, 1e-10, "|alpha| tau = 8"),
        _check("gaussian_two_label_tail", err, 1e-10, "Q(1) from the normal CDF"),
    ]


def check_roundtrip() -> Check:
    res = run_protocol(ProtocolConfig(modes=3, beta=0.5, k_max=4))
    text = json.dumps(outcomes_to_list(res.outcomes))
    parsed = outcomes_from_list(json.loads(text))
    mismatch = 0.0
    for rec, back, w in zip(res.outcomes, parsed, res.witness):
        w2 = witness(back.conditional_state, target=TargetState("kphoton", back.k, 3))
        same = (
            back.probability == rec.probability
            and w2.verdicts == {(p.i, p.j): p.passed for p in w.pairs}
            and [p.margin for p in w2.pairs] == [p.margin for p in w.pairs]
        )
        mismatch = max(mismatch, 0.0 if same else 1.0)
    return _check("serialization_roundtrip", mismatch, 0.0, "bit-for-bit")


DEFAULT_CHECKS: dict[str, Callable[[], Check | list[Check]]] = {
    "overlap": check_overlap_identity,
    "overlap_grid": check_overlap_grid,
    "two_mode": check_two_mode,
    "three_mode": check_three_mode,
    "weak": check_weak,
    "witness": check_witness_values,
    "oracle": check_oracle,
    "gaussian": check_gaussian,
    "roundtrip": check_roundtrip,
}


def run_verification(
    only: Sequence[str] | None = None, oracle_alphas: Sequence[float] | None = None
) -> VerificationReport:
    report = VerificationReport()
    for name, fn in DEFAULT_CHECKS.items():
        if only and name not in only:
            continue
        if name == "oracle" and oracle_alphas is not None:
            out = check_oracle(oracle_alphas)
        else:
            out = fn()
        report.checks.extend(out if isinstance(out, list) else [out])
    return report
