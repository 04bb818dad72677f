import math
from pathlib import Path

import numpy as np
import pytest

import transverse as tv

SCENARIOS = Path(__file__).resolve().parents[2] / "scenarios"


def test_bump_values():
    assert tv.rho(1.0) == pytest.approx(math.exp(-1), abs=1e-15)
    assert tv.rho_l(np.array([0.5])) == pytest.approx(math.exp(-4), abs=1e-15)
    assert tv.rho_l(np.array([0.0])) == 0.0
    assert tv.beta(0.25) == 1.0 and tv.beta(1.5) == 0.0


def test_grid_and_subdivision():
    mesh = tv.grid_triangulation(np.zeros(2), np.ones(2), 2)
    assert mesh.complex.count(2) == 8
    assert mesh.complex.count(0) == 9
    assert tv.subdivision_top_count(mesh) == 48
    assert mesh.to_soff().startswith("SOFF")


def test_circle_becomes_transverse():
    mesh = tv.grid_triangulation(np.full(2, -2.0), np.full(2, 2.0), 4)
    h = tv.SmoothMap.circle(np.zeros(2), 1.0)
    cfg = tv.PipelineConfig()
    before = tv.verify(mesh, h, cfg)
    assert not before.passed and before.skeleton_hits == 4
    out = tv.make_transverse(mesh, h, cfg)
    assert out["report"].passed
    assert out["links"] == 4
    assert out["chain_dump"] == tv.make_transverse(mesh, h, cfg)["chain_dump"]


def test_margin():
    dh = np.array([[1.0], [0.0]])
    df = np.array([[0.0], [2.0]])
    assert tv.transversality_margin(dh, df) == pytest.approx(1.0)


def test_config_validation():
    cfg = tv.PipelineConfig()
    cfg.warp_rate = 1e-3
    with pytest.raises(ValueError):
        cfg.validate()


def test_run_scenario(tmp_path):
    out = tv.run_scenario(str(SCENARIOS / "point_corner.scn"), str(tmp_path), False)
    assert out["exit_code"] == 0
    assert (tmp_path / "summary.txt").read_text().startswith("scenario point_corner")
    with pytest.raises(ValueError):
        tv.run_scenario(str(SCENARIOS / "missing.scn"), str(tmp_path))
