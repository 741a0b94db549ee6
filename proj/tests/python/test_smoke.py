import json
import math

import numpy as np
import pytest

import seasonal_dispersal as sd

WRAP = {
    "grid": {"x_min": -10, "x_max": 10, "n": 101, "boundary": "periodic_wrap"},
    "kernel": {"gamma": 1.0},
    "season": {"omega": 2, "rho": 0.5, "delta": 0.5},
    "growth": {"b": 1.0},
}


def model(**season):
    doc = json.loads(json.dumps(WRAP))
    doc["season"].update(season)
    return sd.Model.from_json(json.dumps(doc))


def test_version_and_properties():
    assert sd.__version__
    m = model()
    assert m.nodes.shape == (101,)
    assert m.h == pytest.approx(20 / 101)
    assert m.K0 == pytest.approx(1.0)
    assert m.substeps >= 8
    assert np.allclose(m.W.sum(axis=1), 1.0)


def test_constant_b_eigenvalue():
    r = model().principal_eigen()
    assert r["lambda_p"] == pytest.approx(-1.0, abs=1e-12)
    assert r["lambda_p_omega"] == pytest.approx(-0.25, abs=1e-12)
    assert r["phi"].min() > 0


def test_periodic_orbit_matches_closed_form():
    m = model()
    u_star = sd.constant_orbit_value(2.0, 0.5, 0.5, 1.0)
    assert u_star == pytest.approx((math.exp(0.5) - 1) / (math.exp(-0.5) * (math.e - 1)))
    for method in ("monotone", "poincare"):
        orbit = m.periodic_orbit(method)
        assert orbit["states"][0] == pytest.approx(np.full(101, u_star), rel=1e-5)
        assert orbit["periodicity_defect"] < 1e-7


def test_simulate_shapes_and_positivity():
    m = model()
    times, states = m.simulate(m.initial_state(), 4)
    assert list(times) == pytest.approx([0, 2, 4, 6, 8])
    assert states.shape == (5, 101)
    assert states.min() > 0


def test_classify_both_regimes():
    assert model(delta=0.6).classify()["observed"] == "persistent"
    v = model(delta=2.0).classify(periods=60)
    assert v["predicted"] == "extinction"
    assert v["observed"] == "extinct"


def test_errors_map_to_python_exceptions():
    with pytest.raises(sd.ExtinctionRegime):
        model(delta=2.0).periodic_orbit()
    with pytest.raises(ValueError, match="season.rho"):
        model(rho=1.2)
    with pytest.raises(ValueError):
        sd.theta_metric(np.ones(3), np.zeros(3))


def test_theta_metric():
    assert sd.theta_metric(np.array([1.0, 2.0]), np.array([2.0, 1.0])) == pytest.approx(math.log(2))


def test_cli_entry(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(WRAP))
    code, _, _ = sd.run_cli(["eigen", "--config", str(cfg), "--out", str(tmp_path / "e.csv")])
    assert code == 0
    assert (tmp_path / "e.csv").read_text().startswith("R,lambda_p")
    assert sd.run_cli([])[0] == 1
