"""JSON and CSV emission for states, outcomes, run results and sweeps.

All writers are deterministic: fixed key order, terms sorted by occupation
tuple, floats written with ``repr`` precision so parsing round-trips exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .homodyne import OutcomeRecord
from .protocol import SWEEP_COLUMNS, RunResult
from .states import FockState
from .witness import PairMoments, WitnessReport

__all__ = [
    "SIDECAR_TERMS",
    "dumps",
    "outcomes_to_list",
    "outcomes_from_list",
    "witness_from_dict",
    "confusion_to_csv",
    "result_to_dict",
    "write_result",
    "read_result",
    "sweep_to_csv",
    "sweep_to_json",
]

SIDECAR_TERMS = 10_000


def dumps(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=1, allow_nan=False) + "\n"


def _clean(obj: Any) -> Any:
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def outcomes_to_list(records: Iterable[OutcomeRecord], mixture: bool = False) -> list[dict]:
    out = []
    for r in records:
        d: dict[str, Any] = {"k": r.k, "probability": r.probability, "state": r.conditional_state.to_dict()}
        if mixture:
            d["fidelity"] = r.fidelity
            d["components"] = [{"k": k, "weight": w} for k, w, _ in r.mixture]
        out.append(d)
    return out


def outcomes_from_list(items: Sequence[dict]) -> list[OutcomeRecord]:
    """Rebuild ideal-readout records (mixture components beyond the label are not restored)."""
    records = []
    for d in items:
        state = FockState.from_dict(d["state"])
        records.append(
            OutcomeRecord(d["k"], d["probability"], state, d.get("fidelity", 1.0), ((d["k"], 1.0, state),))
        )
    return records


def witness_from_dict(d: dict) -> WitnessReport:
    pairs = tuple(
        # only |cross|^2 survives serialization; store it as a real cross moment
        PairMoments(p["i"] - 1, p["j"] - 1, complex(math.sqrt(p["cross_abs_sq"])), p["number_corr"])
        for p in d["pairs"]
    )
    fid = d.get("fidelity")
    if fid is None:
        return WitnessReport(pairs)
    return WitnessReport(pairs, fid["target"], fid["value"])


def confusion_to_csv(matrix: np.ndarray) -> str:
    """Rows are true labels; the header lists decided labels."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = matrix.shape[1]
    w.writerow(["true_k"] + [str(j) for j in range(n)])
    for k, row in enumerate(matrix):
        w.writerow([k] + [repr(float(x)) for x in row])
    return buf.getvalue()


def result_to_dict(result: RunResult, sidecar_stem: Path | None = None) -> dict:
    """Nested run record. States above ``SIDECAR_TERMS`` terms go to sidecar files."""
    gaussian = result.config.readout == "gaussian"
    outcomes = outcomes_to_list(result.outcomes, mixture=gaussian)
    if sidecar_stem is not None:
        for d, rec in zip(outcomes, result.outcomes):
            if len(rec.conditional_state) > SIDECAR_TERMS:
                side = sidecar_stem.with_name(f"{sidecar_stem.name}.state-k{rec.k}.json")
                side.write_text(rec.conditional_state.to_json() + "\n")
                d["state"] = {"ref": side.name}
    dist = result.distinguishability
    return {
        "config": result.config.to_dict(),
        "distinguishability": {
            "brightness": dist.brightness,
            "max_adjacent_overlap": dist.max_adjacent_overlap,
            "max_overlap": dist.max_overlap,
            "tol": dist.tol,
            "pass": dist.passed,
        },
        "outcomes": outcomes,
        "tail_probability": result.tail_probability,
        "witness": [dict(k=rec.k, **w.to_dict()) for rec, w in zip(result.outcomes, result.witness)],
        "closed_form_check": [
            {"k": c.k, "analytic": c.analytic, "simulated": c.simulated, "rel_error": c.rel_error}
            for c in result.checks
        ],
        "confusion": None if result.confusion is None else result.confusion.tolist(),
        "counts": result.counts,
    }


def write_result(result: RunResult, path: Path | str) -> None:
    path = Path(path)
    path.write_text(dumps(result_to_dict(result, sidecar_stem=path.with_suffix(""))))


def read_result(path: Path | str) -> dict:
    """Parse a run record, resolving sidecar state references to :class:`FockState`."""
    path = Path(path)
    data = json.loads(path.read_text())
    for d in data["outcomes"]:
        ref = d["state"].get("ref") if isinstance(d["state"], dict) else None
        if ref is not None:
            d["state"] = json.loads((path.parent / ref).read_text())
    data["records"] = outcomes_from_list(data["outcomes"])
    return data


def sweep_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow(["" if _is_missing(row[c]) else _fmt(row[c]) for c in SWEEP_COLUMNS])
    return buf.getvalue()


def sweep_to_json(rows: Sequence[dict]) -> str:
    return dumps(list(rows))


def _is_missing(x: Any) -> bool:
    return x is None or (isinstance(x, float) and math.isnan(x))


def _fmt(x: Any) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)
