import cmath
import math

import pytest

import ctunnel


def test_quartic_action_and_constant():
    q = ctunnel.Potential.quartic()
    assert q(0.0) == pytest.approx(1.0)
    assert q.frequency == pytest.approx(2.0)
    S = ctunnel.complex_action(q, math.pi / 2)
    assert abs(S - 4 / 3 * cmath.exp(1j * math.pi / 4)) < 1e-10
    A = ctunnel.asymptotic_constant(q, 0.0)
    assert abs(A) == pytest.approx(64 * math.sqrt(2) / math.sqrt(math.pi), rel=1e-9)


def test_wkb_series_leading_term():
    mu = ctunnel.wkb_eigenvalue(ctunnel.Potential.quartic(), 0.0, n=1, J=3)
    assert len(mu) == 3
    assert mu[0] == pytest.approx(2.0)


def test_gap_report_dict():
    r = ctunnel.gap_report(ctunnel.Potential.quartic(), 0.0, 0.1)
    assert r["gap_direct"] is not None
    assert r["gap_wronskian"] is not None
    assert r["gap_direct"].real > 0
    assert 0.8 < r["ratio_transport_wronskian"] < 1.25
    assert r["flags"] == []


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        ctunnel.validate_config("alphas = [0]\nh_grid = []\n")
    with pytest.raises(ValueError):
        ctunnel.gap_report(ctunnel.Potential.quartic(), 0.0, -0.1)
    cfg = ctunnel.validate_config('alphas = ["pi/2"]\nh_grid = [0.05, 0.1]\n')
    assert cfg["h_grid"] == [0.1, 0.05]
