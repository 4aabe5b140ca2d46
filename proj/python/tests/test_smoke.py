import json
import math

import numpy as np
import pytest

import vcmasim

QUICK = {"solver": {"t_init": 1e-9, "t_relax": 1e-9}}


def test_default_config_round_trip():
    cfg = vcmasim.default_config()
    assert cfg["device"]["width"] == pytest.approx(40e-9)
    assert vcmasim.resolve_config(cfg) == cfg
    merged = vcmasim.resolve_config({"device": {"damping": 0.05}})
    assert merged["device"]["damping"] == 0.05


def test_config_errors_are_value_errors():
    with pytest.raises(ValueError, match="unknown key"):
        vcmasim.resolve_config({"device": {"nope": 1}})


def test_llg_rhs_is_tangent():
    m = np.array([0.6, 0.0, 0.8])
    v = np.array(vcmasim.llg_rhs(m, (1e5, -3e5, 2e5), (1e-5, 0.0, 0.0)))
    assert abs(v @ m) <= 1e-12 * np.linalg.norm(v)


def test_simulate_is_reproducible():
    a = vcmasim.simulate([(0.7, 1.8e-9)], seed=5, trial=3, config=QUICK)
    b = vcmasim.simulate([(0.7, 1.8e-9)], seed=5, trial=3, config=QUICK)
    assert a == b
    m = np.asarray(a["m"])
    assert np.allclose(np.linalg.norm(m, axis=1), 1.0, atol=1e-9)
    assert a["switched"] == (m[-1, 2] > 0)


def test_probability_and_sweep_agree():
    est = vcmasim.switching_probability([(0.0, 1e-9)], 50, 1, QUICK)
    assert est["p"] == 0.0 and est["n_trials"] == 50
    curve = vcmasim.sweep_width(0.7, [1.8e-9], 20, 9, QUICK)
    assert len(curve) == 1 and curve[0]["ci_low"] <= curve[0]["p"] <= curve[0]["ci_high"]


def test_sneak_two_by_two():
    r0 = 3e3
    sol = vcmasim.sneak_solve([[1 / r0] * 2] * 2, 1, 1, 0.7)
    assert sol["currents"][3] == pytest.approx(0.7 / r0, rel=1e-12)
    assert sol["source_current"] - sol["currents"][3] == pytest.approx(0.7 / (3 * r0), rel=1e-12)
    with pytest.raises(vcmasim.SolverError):
        vcmasim.sneak_solve([[1e-3, 0.0], [0.0, 1e-3]], 0, 0, 0.7)


def test_write_disturb_128():
    d = vcmasim.write_disturb(128, 128, 0.99, 1e-4)
    assert d["half_select_events"] == 254
    assert d["expected_disturbed"] == pytest.approx(16384 * (1 - (1 - 1e-4) ** 254), rel=1e-9)


def test_ordering_and_run_cli(tmp_path):
    text, agreement = vcmasim.ordering_in_cap(0.0)
    assert text.endswith("|Hz|") and agreement == 1.0
    code, out, err = vcmasim.run_cli(["sneak", "--out", tmp_path])
    assert code == 0, err
    report = json.loads((tmp_path / "sneak.json").read_text())
    assert report["counts"]["selected"] == 1
    assert math.isfinite(report["currents"]["selected"])
    code, _, _ = vcmasim.run_cli(["sneak", "--set", "device.nope=1", "--out", tmp_path / "bad"])
    assert code == 1
    assert not (tmp_path / "bad").exists()
