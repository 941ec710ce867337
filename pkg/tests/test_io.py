import csv
import io
import json
import math

import numpy as np
import pytest

from kerrent import io as kio
from kerrent.protocol import ProtocolConfig, run_protocol, sweep
from kerrent.witness import TargetState, witness


@pytest.fixture(scope="module")
def result():
    return run_protocol(ProtocolConfig(modes=3, beta=0.5))


def test_dumps_nan_to_null():
    assert json.loads(kio.dumps({"x": math.nan, "y": [1.0, math.inf]})) == {"x": None, "y": [1.0, None]}


def test_outcomes_roundtrip(result):
    text = json.dumps(kio.outcomes_to_list(result.outcomes))
    back = kio.outcomes_from_list(json.loads(text))
    for a, b in zip(result.outcomes, back):
        assert a.k == b.k
        assert a.probability == b.probability
        assert a.conditional_state == b.conditional_state


def test_rewitness_bit_identical(result):
    back = kio.outcomes_from_list(json.loads(json.dumps(kio.outcomes_to_list(result.outcomes))))
    for rec, wit in zip(back, result.witness):
        again = witness(rec.conditional_state, target=TargetState("kphoton", rec.k, 3))
        assert [p.margin for p in again.pairs] == [p.margin for p in wit.pairs]
        assert again.verdicts == wit.verdicts


def test_witness_dict_roundtrip(result):
    w = result.witness_for(2)
    back = kio.witness_from_dict(json.loads(json.dumps(w.to_dict())))
    assert back.verdicts == w.verdicts
    assert [p.number_corr for p in back.pairs] == [p.number_corr for p in w.pairs]
    assert back.fidelity == w.fidelity


def test_result_dict_shape(result):
    d = json.loads(kio.dumps(kio.result_to_dict(result)))
    assert set(d) == {
        "config", "distinguishability", "outcomes", "tail_probability",
        "witness", "closed_form_check", "confusion", "counts",
    }
    assert d["outcomes"][0]["k"] == 0
    assert d["witness"][1]["pairs"][0]["i"] == 1
    assert d["closed_form_check"][2]["rel_error"] <= 1e-10


def test_write_read(tmp_path, result):
    path = tmp_path / "run.json"
    kio.write_result(result, path)
    data = kio.read_result(path)
    assert [r.probability for r in data["records"]] == [r.probability for r in result.outcomes]


def test_sidecar(tmp_path, monkeypatch, result):
    monkeypatch.setattr(kio, "SIDECAR_TERMS", 3)
    path = tmp_path / "run.json"
    kio.write_result(result, path)
    raw = json.loads(path.read_text())
    refs = [o["state"]["ref"] for o in raw["outcomes"] if "ref" in o["state"]]
    assert refs and all((tmp_path / r).exists() for r in refs)
    data = kio.read_result(path)
    for rec, orig in zip(data["records"], result.outcomes):
        assert rec.conditional_state == orig.conditional_state


def test_deterministic_bytes(tmp_path):
    cfg = ProtocolConfig(modes=2, beta=0.6, shots=100, seed=3)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    kio.write_result(run_protocol(cfg), a)
    kio.write_result(run_protocol(cfg), b)
    assert a.read_bytes() == b.read_bytes()


def test_confusion_csv():
    text = kio.confusion_to_csv(np.array([[0.9, 0.1], [0.2, 0.8]]))
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["true_k", "0", "1"]
    assert rows[2] == ["1", "0.2", "0.8"]


def test_sweep_csv_header_and_blanks():
    rows = sweep(ProtocolConfig(modes=2, beta=0.2), {"k": [1]})
    parsed = list(csv.reader(io.StringIO(kio.sweep_to_csv(rows))))
    assert parsed[0] == [
        "modes", "beta_re", "beta_im", "tau", "alpha_abs", "k",
        "probability", "witness_margin_min", "fidelity", "discrimination_error",
    ]
    assert parsed[1][-1] == ""
    assert kio.sweep_to_csv([]).count("\n") == 1


def test_sweep_json_null():
    rows = sweep(ProtocolConfig(modes=2, beta=0.2), {"k": [1]})
    data = json.loads(kio.sweep_to_json(rows))
    assert data[0]["discrimination_error"] is None
    assert data[0]["distinguishable"] is True
