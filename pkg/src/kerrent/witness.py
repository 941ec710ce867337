"""Hillery-Zubairy pairwise entanglement witness and target states."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from .errors import ModeMismatch
from .states import FockState, apply_ladder, compositions, inner_product

__all__ = [
    "PairMoments",
    "WitnessReport",
    "TargetState",
    "moments",
    "mixture_moments",
    "witness",
    "chain_pairs",
    "all_pairs",
    "build_target",
    "multinomial",
    "fidelity",
]


@dataclass(frozen=True)
class PairMoments:
    i: int
    j: int
    cross: complex  # <b_i† b_j>
    number_corr: float  # <N_i N_j>

    @property
    def cross_abs_sq(self) -> float:
        return abs(self.cross) ** 2

    @property
    def margin(self) -> float:
        return self.cross_abs_sq - self.number_corr

    @property
    def passed(self) -> bool:
        return self.cross_abs_sq > self.number_corr


@dataclass(frozen=True)
class WitnessReport:
    pairs: tuple[PairMoments, ...]
    target: str | None = None
    fidelity: float | None = None

    @property
    def verdicts(self) -> dict[tuple[int, int], bool]:
        return {(p.i, p.j): p.passed for p in self.pairs}

    @property
    def all_passed(self) -> bool:
        return all(p.passed for p in self.pairs)

    @property
    def min_margin(self) -> float:
        return min(p.margin for p in self.pairs)

    def to_dict(self, margin_tol: float | None = None) -> dict:
        """JSON shape; mode indices are one-based to match the b1, b2, ... naming.

        ``pass`` is the strict verdict. With ``margin_tol`` an extra
        ``pass_tol`` field reports ``margin > margin_tol``.
        """
        pairs = []
        for p in self.pairs:
            d = {
                "i": p.i + 1,
                "j": p.j + 1,
                "cross_abs_sq": p.cross_abs_sq,
                "number_corr": p.number_corr,
                "margin": p.margin,
                "pass": p.passed,
            }
            if margin_tol is not None:
                d["pass_tol"] = p.margin > margin_tol
            pairs.append(d)
        out: dict = {"pairs": pairs}
        if self.target is not None:
            out["fidelity"] = {"target": self.target, "value": self.fidelity}
        return out


def _check_pair(state: FockState, i: int, j: int) -> None:
    if i == j:
        raise ValueError("witness needs two distinct modes")
    for idx in (i, j):
        if not 0 <= idx < state.modes:
            raise ModeMismatch(f"mode {idx} out of range for {state.modes} modes")


def moments(state: FockState, i: int, j: int) -> PairMoments:
    """``<b_i† b_j>`` and ``<N_i N_j>`` for a pure state."""
    _check_pair(state, i, j)
    # b_i† b_j conserves total photon number, so terms pushed past the cutoff
    # have no overlap with the state and can be dropped
    hopped = apply_ladder(apply_ladder(state, j, "lower"), i, "raise", truncate=True)
    cross = inner_product(state, hopped)
    corr = math.fsum(occ[i] * occ[j] * abs(a) ** 2 for occ, a in state.terms.items())
    return PairMoments(i, j, cross, corr)


def mixture_moments(
    components: Iterable[tuple[float, FockState]], i: int, j: int
) -> PairMoments:
    """Moments of ``sum_k w_k |psi_k><psi_k|``.

    Exact for any coherences between components of different total photon
    number, since both operators conserve that number.
    """
    cross = 0j
    corr = []
    for w, s in components:
        m = moments(s, i, j)
        cross += w * m.cross
        corr.append(w * m.number_corr)
    return PairMoments(i, j, cross, math.fsum(corr))


def chain_pairs(modes: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(modes - 1)]


def all_pairs(modes: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(modes) for j in range(i + 1, modes)]


def witness(
    state: FockState | Sequence[tuple[float, FockState]],
    mode_pairs: Sequence[tuple[int, int]] | None = None,
    target: TargetState | None = None,
) -> WitnessReport:
    """Evaluate the pairwise criterion ``|<b_i† b_j>|^2 > <N_i N_j>``.

    ``state`` may be a pure state or a list of ``(weight, state)`` components.
    Pairs default to the chain (0,1), (1,2), ...
    """
    if isinstance(state, FockState):
        comps = [(1.0, state)]
    else:
        comps = list(state)
    modes = comps[0][1].modes
    if mode_pairs is None:
        mode_pairs = chain_pairs(modes)
    pairs = tuple(mixture_moments(comps, i, j) for i, j in mode_pairs)
    if target is None:
        return WitnessReport(pairs)
    tstate = build_target(target)
    f = math.fsum(w * fidelity(s, tstate) for w, s in comps)
    return WitnessReport(pairs, target.name, f)


# targets ---------------------------------------------------------------------

Family = Literal["kphoton", "w", "noon"]


@dataclass(frozen=True)
class TargetState:
    """Named target.

    ``kphoton``: all tuples summing to ``photons`` with multinomial weights.
    ``w``: equal weights on tuples with at most one photon per mode.
    ``noon``: equal weights on the ``modes`` tuples with every photon in one mode.
    """

    family: Family
    photons: int
    modes: int

    def __post_init__(self) -> None:
        if self.photons < 0 or self.modes < 1:
            raise ValueError(f"invalid target parameters {self}")
        if self.family not in ("kphoton", "w", "noon"):
            raise ValueError(f"unknown target family {self.family!r}")
        if self.family == "w" and self.photons > self.modes:
            raise ValueError("hard-core W state needs photons <= modes")

    @property
    def name(self) -> str:
        if self.family == "kphoton":
            return f"{self.modes}-mode-k{self.photons}"
        return f"{self.family}{self.modes}-k{self.photons}"

    @classmethod
    def two_mode(cls, k: int) -> TargetState:
        return cls("kphoton", k, 2)

    @classmethod
    def three_mode(cls, k: int) -> TargetState:
        return cls("kphoton", k, 3)

    @classmethod
    def parse(cls, name: str) -> TargetState:
        head, _, k = name.rpartition("-k")
        if head.endswith("-mode"):
            return cls("kphoton", int(k), int(head[: -len("-mode")]))
        for fam in ("w", "noon"):
            if head.startswith(fam):
                return cls(fam, int(k), int(head[len(fam) :]))
        raise ValueError(f"cannot parse target name {name!r}")


def multinomial(occ: Sequence[int]) -> int:
    """``(sum n)! / prod(n_i!)`` as an exact integer."""
    total, out = 0, 1
    for n in occ:
        total += n
        out *= math.comb(total, n)
    return out


def build_target(t: TargetState) -> FockState:
    k, m = t.photons, t.modes
    if t.family == "kphoton":
        scale = m**k
        terms = {occ: math.sqrt(multinomial(occ) / scale) for occ in compositions(k, m)}
        return FockState(m, k, terms)
    if t.family == "w":
        tuples = [occ for occ in compositions(k, m) if max(occ, default=0) <= 1]
    else:
        tuples = sorted({tuple(k if i == j else 0 for i in range(m)) for j in range(m)})
    amp = 1.0 / math.sqrt(len(tuples))
    return FockState(m, k, {occ: amp for occ in tuples})


def fidelity(state: FockState, target: FockState) -> float:
    """``|<target|state>|^2``."""
    if state.modes != target.modes:
        raise ModeMismatch(f"{state.modes} vs {target.modes} modes")
    return abs(inner_product(target, state)) ** 2
