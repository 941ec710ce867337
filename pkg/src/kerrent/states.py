"""Sparse multimode photon-number states.

A :class:`FockState` maps occupation tuples ``(n_1, ..., n_M)`` to complex
amplitudes. States are treated as immutable values: every operation returns a
new state. Mode indices are zero-based throughout the Python API.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Literal, Mapping, Union

from scipy.special import gammainc

from .errors import CutoffOverflow, CutoffTooSmall, ModeMismatch

__all__ = [
    "HARD_CUTOFF",
    "DEFAULT_TAIL_TOL",
    "FockState",
    "WeakTwoTerm",
    "PoissonCutoff",
    "CoherentSpec",
    "vacuum",
    "fock",
    "expand_coherent",
    "poisson_tail",
    "tensor",
    "tensor_all",
    "inner_product",
    "apply_ladder",
    "compositions",
]

HARD_CUTOFF = 64
DEFAULT_TAIL_TOL = 1e-12

Occupation = tuple[int, ...]


@dataclass(frozen=True)
class FockState:
    """Superposition of occupation tuples over ``modes`` bosonic modes.

    ``terms`` must not be mutated after construction. ``cutoff`` bounds the
    photon number in every mode.
    """

    modes: int
    cutoff: int
    terms: dict[Occupation, complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.modes < 1:
            raise ValueError(f"mode count must be >= 1, got {self.modes}")
        if self.cutoff < 0:
            raise ValueError(f"cutoff must be >= 0, got {self.cutoff}")
        clean: dict[Occupation, complex] = {}
        for occ, amp in self.terms.items():
            occ = tuple(int(n) for n in occ)
            if len(occ) != self.modes:
                raise ModeMismatch(f"tuple {occ} has length != {self.modes}")
            if any(n < 0 or n > self.cutoff for n in occ):
                raise ValueError(f"tuple {occ} outside [0, {self.cutoff}]")
            amp = complex(amp)
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise ValueError(f"non-finite amplitude at {occ}")
            clean[occ] = amp
        object.__setattr__(self, "terms", clean)

    @classmethod
    def _trusted(cls, modes: int, cutoff: int, terms: dict[Occupation, complex]) -> FockState:
        # skips validation; only for terms derived from already-valid states
        out = object.__new__(cls)
        object.__setattr__(out, "modes", modes)
        object.__setattr__(out, "cutoff", cutoff)
        object.__setattr__(out, "terms", terms)
        return out

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[Occupation, complex]]:
        return iter(self.terms.items())

    def amplitude(self, occ: Iterable[int]) -> complex:
        return self.terms.get(tuple(occ), 0j)

    def norm_sq(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self.terms.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def normalize(self, prune: float = 0.0) -> FockState:
        """Return the unit-norm state, dropping terms with ``|amp| < prune``."""
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        terms = {o: a / n for o, a in self.terms.items() if abs(a / n) >= prune}
        if prune > 0.0:
            n2 = math.sqrt(math.fsum(abs(a) ** 2 for a in terms.values()))
            terms = {o: a / n2 for o, a in terms.items()}
        return FockState._trusted(self.modes, self.cutoff, terms)

    def scale(self, factor: complex) -> FockState:
        factor = complex(factor)
        return FockState._trusted(self.modes, self.cutoff, {o: a * factor for o, a in self.terms.items()})

    def with_cutoff(self, cutoff: int) -> FockState:
        return FockState(self.modes, cutoff, self.terms)

    def total_photons(self) -> set[int]:
        return {sum(o) for o in self.terms}

    def sorted_terms(self) -> list[tuple[Occupation, complex]]:
        return sorted(self.terms.items())

    # serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "modes": self.modes,
            "cutoff": self.cutoff,
            "terms": [
                {"n": list(o), "re": a.real, "im": a.imag} for o, a in self.sorted_terms()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: Mapping) -> FockState:
        terms = {tuple(t["n"]): complex(t["re"], t["im"]) for t in data["terms"]}
        return cls(int(data["modes"]), int(data["cutoff"]), terms)

    @classmethod
    def from_json(cls, text: str) -> FockState:
        return cls.from_dict(json.loads(text))


def vacuum(modes: int = 1, cutoff: int = 0) -> FockState:
    return FockState(modes, cutoff, {(0,) * modes: 1.0})


def fock(*occ: int, cutoff: int | None = None) -> FockState:
    """Number state ``|n_1, ..., n_M>``."""
    c = max(occ) if cutoff is None else cutoff
    return FockState(len(occ), c, {tuple(occ): 1.0})


# coherent expansions ---------------------------------------------------


@dataclass(frozen=True)
class WeakTwoTerm:
    """Vacuum plus one-photon truncation for weak beams."""


@dataclass(frozen=True)
class PoissonCutoff:
    """Poissonian expansion truncated at ``n_max`` photons.

    With ``n_max=None`` the smallest cutoff meeting ``tail_tol`` is used. An
    explicit ``n_max`` must itself meet ``tail_tol``.
    """

    tail_tol: float = DEFAULT_TAIL_TOL
    n_max: int | None = None
    hard_limit: int = HARD_CUTOFF


Truncation = Union[WeakTwoTerm, PoissonCutoff]


@dataclass(frozen=True)
class CoherentSpec:
    amplitude: complex
    truncation: Truncation = PoissonCutoff()


def poisson_tail(mean: float, n_max: int) -> float:
    """Probability that a Poisson(mean) variable exceeds ``n_max``."""
    if mean == 0.0:
        return 0.0
    return float(gammainc(n_max + 1, mean))


def _poisson_n_max(mean: float, trunc: PoissonCutoff) -> int:
    if trunc.tail_tol <= 0.0:
        raise ValueError("tail_tol must be > 0")
    if trunc.n_max is not None:
        if trunc.n_max > trunc.hard_limit:
            raise CutoffTooSmall(f"n_max={trunc.n_max} exceeds hard limit {trunc.hard_limit}")
        tail = poisson_tail(mean, trunc.n_max)
        if tail > trunc.tail_tol:
            raise CutoffTooSmall(
                f"n_max={trunc.n_max} leaves tail {tail:.3e} > {trunc.tail_tol:.1e}"
            )
        return trunc.n_max
    for n in range(trunc.hard_limit + 1):
        if poisson_tail(mean, n) <= trunc.tail_tol:
            return n
    raise CutoffTooSmall(
        f"|beta|^2={mean} needs more than {trunc.hard_limit} photons for tail {trunc.tail_tol:.1e}"
    )


def expand_coherent(spec: CoherentSpec | complex, truncation: Truncation | None = None) -> FockState:
    """Single-mode Fock expansion of a coherent state.

    Accepts either a :class:`CoherentSpec` or a bare amplitude plus truncation.
    Amplitudes keep the phase of ``beta**n`` (no phase canonicalization).
    """
    if not isinstance(spec, CoherentSpec):
        spec = CoherentSpec(complex(spec), truncation or PoissonCutoff())
    beta = complex(spec.amplitude)
    if not (math.isfinite(beta.real) and math.isfinite(beta.imag)):
        raise ValueError("coherent amplitude must be finite")
    trunc = spec.truncation
    if isinstance(trunc, WeakTwoTerm):
        state = FockState(1, 1, {(0,): 1.0, (1,): beta})
        return state.normalize()
    mean = abs(beta) ** 2
    n_max = _poisson_n_max(mean, trunc)
    pref = math.exp(-mean / 2)
    terms = {}
    # beta**n / sqrt(n!) built by recurrence to avoid overflow at large n
    coeff = complex(pref)
    for n in range(n_max + 1):
        if n > 0:
            coeff *= beta / math.sqrt(n)
        terms[(n,)] = coeff
    return FockState(1, n_max, terms).normalize()


# algebra -----------------------------------------------------------------


def tensor(a: FockState, b: FockState) -> FockState:
    """Tensor product; ``a``'s modes come first."""
    terms = {oa + ob: xa * xb for oa, xa in a.terms.items() for ob, xb in b.terms.items()}
    return FockState._trusted(a.modes + b.modes, max(a.cutoff, b.cutoff), terms)


def tensor_all(states: Iterable[FockState], max_total: int | None = None) -> FockState:
    """Tensor product of several states, in order.

    With ``max_total`` set, tuples whose total photon number exceeds it are
    dropped and the result is renormalized; sectors at or below the bound keep
    their relative amplitudes exactly.
    """
    states = list(states)
    out = states[0]
    if max_total is not None:
        out = FockState._trusted(
            out.modes, out.cutoff, {o: a for o, a in out.terms.items() if sum(o) <= max_total}
        )
    for s in states[1:]:
        if max_total is None:
            out = tensor(out, s)
            continue
        terms = {
            oa + ob: xa * xb
            for oa, xa in out.terms.items()
            for ob, xb in s.terms.items()
            if sum(oa) + sum(ob) <= max_total
        }
        out = FockState._trusted(out.modes + s.modes, max(out.cutoff, s.cutoff), terms)
    if max_total is not None:
        out = out.normalize()
    return out


def inner_product(a: FockState, b: FockState) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.modes != b.modes:
        raise ModeMismatch(f"{a.modes} vs {b.modes} modes")
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    re: list[float] = []
    im: list[float] = []
    for occ, xs in small.terms.items():
        xl = large.terms.get(occ)
        if xl is None:
            continue
        z = (xs.conjugate() * xl) if small is a else (xl.conjugate() * xs)
        re.append(z.real)
        im.append(z.imag)
    return complex(math.fsum(re), math.fsum(im))


LadderKind = Literal["raise", "lower", "number"]


def apply_ladder(
    state: FockState, mode: int, kind: LadderKind, *, truncate: bool = False
) -> FockState:
    """Apply ``b†``, ``b`` or ``N`` on one mode. The result is not normalized.

    Raising a term already at the cutoff raises :class:`CutoffOverflow`, unless
    ``truncate`` is set, in which case that term is dropped.
    """
    if not 0 <= mode < state.modes:
        raise ModeMismatch(f"mode {mode} out of range for {state.modes} modes")
    terms: dict[Occupation, complex] = {}
    for occ, amp in state.terms.items():
        n = occ[mode]
        if kind == "number":
            if n:
                terms[occ] = amp * n
        elif kind == "lower":
            if n:
                new = occ[:mode] + (n - 1,) + occ[mode + 1 :]
                terms[new] = terms.get(new, 0j) + amp * math.sqrt(n)
        elif kind == "raise":
            if n + 1 > state.cutoff:
                if truncate:
                    continue
                raise CutoffOverflow(f"raising mode {mode} above cutoff {state.cutoff}")
            new = occ[:mode] + (n + 1,) + occ[mode + 1 :]
            terms[new] = terms.get(new, 0j) + amp * math.sqrt(n + 1)
        else:
            raise ValueError(f"unknown ladder kind {kind!r}")
    return FockState._trusted(state.modes, state.cutoff, terms)


def compositions(total: int, modes: int) -> Iterator[Occupation]:
    """All occupation tuples of length ``modes`` summing to ``total``, lexicographic."""
    if modes == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, modes - 1):
            yield (first,) + rest
