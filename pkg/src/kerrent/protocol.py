"""End-to-end generation pipeline and parameter sweeps.

``run_protocol`` expands M coherent signal arms, couples each to a bright
probe, reads the probe out, and scores every conditional state against its
closed-form probability, its target state and the pairwise witness.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Literal, Mapping, Sequence

import numpy as np

from .errors import (
    AmbiguousOutcomeLabeling,
    ConfigError,
    CutoffTooSmall,
    DegenerateReadout,
    GridTooLarge,
    OverlapError,
)
from .homodyne import (
    DistinguishabilityReport,
    GaussianQuadrature,
    HomodyneModel,
    IdealProjective,
    OutcomeRecord,
    confusion_matrix,
    distinguishability_check,
    measure,
)
from .kerr import run_sequence
from .states import (
    HARD_CUTOFF,
    CoherentSpec,
    FockState,
    PoissonCutoff,
    WeakTwoTerm,
    expand_coherent,
    poisson_tail,
    tensor_all,
)
from .witness import TargetState, WitnessReport, all_pairs, chain_pairs, witness

__all__ = [
    "ProtocolConfig",
    "ClosedFormCheck",
    "RunResult",
    "weak_probability",
    "poisson_probability",
    "run_protocol",
    "SWEEP_COLUMNS",
    "sweep",
    "MAX_GRID_POINTS",
]

MIN_MODES, MAX_MODES = 2, 8
MAX_STATE_TERMS = 2_000_000
MAX_GRID_POINTS = 1_000_000
REPORT_TAIL = 1e-10


def parse_complex(value: Any) -> complex:
    """Accept 0.5, "0.5+0.1j", [re, im] or {"re": .., "im": ..}."""
    if isinstance(value, Mapping):
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    if isinstance(value, (list, tuple)):
        re, im = value
        return complex(float(re), float(im))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


@dataclass(frozen=True)
class ProtocolConfig:
    """Protocol parameters. ``taus`` overrides the shared ``tau`` per mode."""

    modes: int = 2
    beta: complex = 0.1
    beta_model: Literal["weak", "poisson"] = "poisson"
    alpha: complex = 1000.0
    tau: float = 0.01
    taus: tuple[float, ...] | None = None
    readout: Literal["ideal", "gaussian"] = "ideal"
    lo_phase: float | None = None
    signal_cutoff: int | None = None
    k_max: int | None = None
    seed: int = 0
    shots: int = 0
    allow_overlap: bool = False
    all_pairs: bool = False
    tail_tol: float = 1e-12
    overlap_tol: float = 1e-6

    def __post_init__(self) -> None:
        object.__setattr__(self, "beta", parse_complex(self.beta))
        object.__setattr__(self, "alpha", parse_complex(self.alpha))
        if self.taus is not None:
            object.__setattr__(self, "taus", tuple(float(t) for t in self.taus))

    def validate(self) -> None:
        if not MIN_MODES <= self.modes <= MAX_MODES:
            raise ConfigError(f"modes must be in [{MIN_MODES}, {MAX_MODES}], got {self.modes}")
        if self.beta_model not in ("weak", "poisson"):
            raise ConfigError(f"beta_model must be 'weak' or 'poisson', got {self.beta_model!r}")
        if self.readout not in ("ideal", "gaussian"):
            raise ConfigError(f"readout must be 'ideal' or 'gaussian', got {self.readout!r}")
        for name in ("beta", "alpha"):
            z = getattr(self, name)
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise ConfigError(f"{name} must be finite")
        if not math.isfinite(self.tau):
            raise ConfigError("tau must be finite")
        if self.taus is not None and len(self.taus) != self.modes:
            raise ConfigError(f"{len(self.taus)} per-mode couplings for {self.modes} modes")
        if self.k_max is not None and self.k_max < 0:
            raise ConfigError("k_max must be >= 0")
        if self.signal_cutoff is not None:
            if self.signal_cutoff < 0:
                raise ConfigError("signal_cutoff must be >= 0")
            if self.k_max is not None and self.signal_cutoff < self.k_max:
                raise ConfigError("signal_cutoff must be >= k_max")
        if self.shots < 0:
            raise ConfigError("shots must be >= 0")
        if self.tail_tol <= 0 or self.overlap_tol <= 0:
            raise ConfigError("tolerances must be > 0")

    @property
    def mode_taus(self) -> tuple[float, ...]:
        return self.taus if self.taus is not None else (self.tau,) * self.modes

    def homodyne_model(self) -> HomodyneModel:
        readout = IdealProjective() if self.readout == "ideal" else GaussianQuadrature(self.lo_phase)
        return HomodyneModel(readout, self.alpha, self.mode_taus[0])

    def to_dict(self) -> dict:
        d = asdict(self)
        for name in ("beta", "alpha"):
            z = d[name]
            d[name] = {"re": z.real, "im": z.imag}
        if d["taus"] is not None:
            d["taus"] = list(d["taus"])
        return d

    @classmethod
    def from_dict(cls, data: Mapping) -> ProtocolConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            return cls(**dict(data))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


# closed forms -----------------------------------------------------------------


def weak_probability(modes: int, beta: complex, k: int) -> float:
    """Probability of total photon number ``k`` for weak two-term arms."""
    if not 0 <= k <= modes:
        return 0.0
    b2 = abs(beta) ** 2
    return math.comb(modes, k) * b2**k / (1.0 + b2) ** modes


def poisson_probability(modes: int, beta: complex, k: int) -> float:
    """``exp(-M|b|^2) M^k |b|^(2k) / k!``."""
    mean = modes * abs(beta) ** 2
    if mean == 0.0:
        return 1.0 if k == 0 else 0.0
    return math.exp(-mean + k * math.log(mean) - math.lgamma(k + 1))


def _poisson_total_cutoff(mean: float, tol: float) -> int:
    for n in range(10 * HARD_CUTOFF):
        if poisson_tail(mean, n) <= tol:
            return n
    raise ConfigError(f"total photon mean {mean} too large")


def _report_k(config: ProtocolConfig) -> int:
    """Smallest k whose closed-form cumulative probability exceeds 1 - 1e-10."""
    if config.beta_model == "weak":
        k_rep = config.modes
    else:
        mean = config.modes * abs(config.beta) ** 2
        k_rep = 0
        while poisson_tail(mean, k_rep) >= REPORT_TAIL:
            k_rep += 1
    if config.k_max is not None:
        k_rep = max(k_rep, config.k_max)
    return k_rep


def prepare_signal(config: ProtocolConfig, k_report: int) -> FockState:
    """Product of M coherent arms, truncated to complete photon-number sectors."""
    if config.beta_model == "weak":
        arm = expand_coherent(CoherentSpec(config.beta, WeakTwoTerm()))
        return tensor_all([arm] * config.modes)
    mean_total = config.modes * abs(config.beta) ** 2
    n_max = max(
        _poisson_total_cutoff(mean_total, config.tail_tol), k_report, config.signal_cutoff or 0
    )
    if n_max > HARD_CUTOFF:
        raise ConfigError(f"needs {n_max} photons per mode, above the hard limit {HARD_CUTOFF}")
    if math.comb(n_max + config.modes, config.modes) > MAX_STATE_TERMS:
        raise ConfigError(
            f"{config.modes} modes with total cutoff {n_max} exceed {MAX_STATE_TERMS} terms"
        )
    try:
        arm = expand_coherent(CoherentSpec(config.beta, PoissonCutoff(config.tail_tol, n_max)))
    except CutoffTooSmall as exc:
        raise ConfigError(str(exc)) from exc
    # every sector up to n_max is complete; the dropped mass is below tail_tol
    return tensor_all([arm] * config.modes, max_total=n_max)


# results ----------------------------------------------------------------------


@dataclass(frozen=True)
class ClosedFormCheck:
    k: int
    analytic: float
    simulated: float

    @property
    def rel_error(self) -> float:
        if self.analytic == 0.0:
            return abs(self.simulated)
        return abs(self.simulated - self.analytic) / self.analytic


@dataclass
class RunResult:
    config: ProtocolConfig
    outcomes: list[OutcomeRecord]
    witness: list[WitnessReport]
    checks: list[ClosedFormCheck]
    tail_probability: float
    distinguishability: DistinguishabilityReport
    confusion: np.ndarray | None = None
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def fidelity_to_target(self) -> list[float]:
        return [w.fidelity for w in self.witness]

    def outcome(self, k: int) -> OutcomeRecord:
        for rec in self.outcomes:
            if rec.k == k:
                return rec
        raise KeyError(k)

    def witness_for(self, k: int) -> WitnessReport:
        for rec, w in zip(self.outcomes, self.witness):
            if rec.k == k:
                return w
        raise KeyError(k)

    def check_for(self, k: int) -> ClosedFormCheck:
        for c in self.checks:
            if c.k == k:
                return c
        raise KeyError(k)

    def total_probability(self) -> float:
        return math.fsum([r.probability for r in self.outcomes] + [self.tail_probability])


def target_for(config: ProtocolConfig, k: int) -> TargetState:
    if config.beta_model == "weak":
        return TargetState("w", k, config.modes)
    return TargetState("kphoton", k, config.modes)


def run_protocol(config: ProtocolConfig) -> RunResult:
    config.validate()
    taus = config.mode_taus
    if any(t != taus[0] for t in taus):
        raise AmbiguousOutcomeLabeling(f"outcome labels need equal couplings, got {taus}")
    k_report = _report_k(config)
    dist = distinguishability_check(config.alpha, taus[0], max(k_report, 1), config.overlap_tol)
    if not dist.passed and not config.allow_overlap:
        raise OverlapError(
            f"max pointer overlap {dist.max_overlap:.3e} > {config.overlap_tol:.1e} "
            f"(|alpha|^2 tau^2 = {dist.brightness:.3g}); pass allow_overlap to continue"
        )
    joint = run_sequence(prepare_signal(config, k_report), config.alpha, taus)
    model = config.homodyne_model()
    records = measure(joint, model)

    closed = weak_probability if config.beta_model == "weak" else poisson_probability
    confusion = None
    if config.readout == "gaussian":
        k_top = max(r.k for r in records) if records else 0
        k_top = max(k_top, max(sum(o) for o in joint.terms))
        confusion = confusion_matrix(model, k_top)
        analytic = {
            j: math.fsum(confusion[k, j] * closed(config.modes, config.beta, k) for k in range(k_top + 1))
            for j in range(k_top + 1)
        }
    else:
        analytic = {r.k: closed(config.modes, config.beta, r.k) for r in records}

    reported = [r for r in records if r.k <= k_report]
    tail = math.fsum(r.probability for r in records if r.k > k_report)
    pairs = all_pairs(config.modes) if config.all_pairs else chain_pairs(config.modes)

    witnesses = []
    checks = []
    for rec in reported:
        comps = [(w, s) for _, w, s in rec.mixture] or [(1.0, rec.conditional_state)]
        witnesses.append(witness(comps, pairs, target_for(config, rec.k)))
        checks.append(ClosedFormCheck(rec.k, analytic.get(rec.k, 0.0), rec.probability))

    result = RunResult(config, reported, witnesses, checks, tail, dist, confusion)
    if config.shots:
        result.counts = sample_counts(result, config.shots, config.seed)
    return result


def sample_counts(result: RunResult, shots: int, seed: int) -> dict[str, int]:
    """Simulated readout record: label counts over ``shots`` repetitions."""
    labels = [str(r.k) for r in result.outcomes] + ["tail"]
    probs = np.array([r.probability for r in result.outcomes] + [result.tail_probability])
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, probs)
    return {lab: int(n) for lab, n in zip(labels, draws) if n}


# sweeps ---------------------------------------------------------------------------

SWEEP_COLUMNS = (
    "modes",
    "beta_re",
    "beta_im",
    "tau",
    "alpha_abs",
    "k",
    "probability",
    "witness_margin_min",
    "fidelity",
    "discrimination_error",
)


def _sweep_point(args: tuple[ProtocolConfig, tuple[int, ...]]) -> list[dict]:
    config, ks = args
    base = {
        "modes": config.modes,
        "beta_re": config.beta.real,
        "beta_im": config.beta.imag,
        "tau": config.tau,
        "alpha_abs": abs(config.alpha),
    }
    dist = distinguishability_check(config.alpha, config.tau, max(max(ks), 1), config.overlap_tol)
    try:
        result = run_protocol(config)
    except DegenerateReadout:
        result = None
    rows = []
    for k in ks:
        row = dict(base, k=k, probability=math.nan, witness_margin_min=math.nan,
                   fidelity=math.nan, discrimination_error=math.nan)
        if result is not None:
            try:
                rec = result.outcome(k)
            except KeyError:
                row["probability"] = 0.0
            else:
                w = result.witness_for(k)
                row["probability"] = rec.probability
                row["witness_margin_min"] = w.min_margin if w.pairs else math.nan
                row["fidelity"] = w.fidelity
            if result.confusion is not None and k < result.confusion.shape[0]:
                row["discrimination_error"] = 1.0 - result.confusion[k, k]
        row["distinguishable"] = dist.passed
        rows.append(row)
    return rows


def sweep(
    template: ProtocolConfig,
    grid: Mapping[str, Sequence[Any]],
    jobs: int = 1,
) -> list[dict]:
    """Evaluate the protocol over the Cartesian product of ``grid``.

    Grid keys: ``beta``, ``tau``, ``alpha``, ``modes``, ``k``; missing keys take
    the template value (``k`` defaults to 0..k_max or 0..modes). Rows come out
    in grid order (modes, beta, tau, alpha, k) whatever ``jobs`` is. Points
    where the pointers overlap are still computed and carry
    ``distinguishable=False``.
    """
    unknown = set(grid) - {"beta", "tau", "alpha", "modes", "k"}
    if unknown:
        raise ConfigError(f"unknown sweep axes: {sorted(unknown)}")
    modes = [int(m) for m in grid.get("modes", [template.modes])]
    betas = [parse_complex(b) for b in grid.get("beta", [template.beta])]
    taus = [float(t) for t in grid.get("tau", [template.tau])]
    alphas = [parse_complex(a) for a in grid.get("alpha", [template.alpha])]
    if "k" in grid:
        ks = tuple(int(k) for k in grid["k"])
    else:
        ks = tuple(range((template.k_max if template.k_max is not None else max(modes)) + 1))
    n_points = len(modes) * len(betas) * len(taus) * len(alphas) * len(ks)
    if n_points > MAX_GRID_POINTS:
        raise GridTooLarge(f"{n_points} grid points exceed {MAX_GRID_POINTS}")

    k_need = max(ks)
    tasks = []
    for m, b, t, a in itertools.product(modes, betas, taus, alphas):
        cfg = replace(
            template, modes=m, beta=b, tau=t, alpha=a, taus=None, allow_overlap=True,
            k_max=max(k_need, template.k_max or 0), shots=0,
        )
        cfg.validate()
        tasks.append((cfg, ks))

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_sweep_point, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        chunks = [_sweep_point(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]
