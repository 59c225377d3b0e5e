import math

import pytest

import radcorr


def test_nelson_mu_norm_matches_closed_form():
    for mu in (1.0, 10.0, 1e3):
        p = radcorr.ModelParams(mu=mu)
        exact = 4 * math.pi * (math.log(mu + 1) - mu / (mu + 1))
        assert radcorr.mu_norm(p, 1.0) ** 2 == pytest.approx(exact, rel=1e-8)


def test_fixed_point_and_bracket():
    p = radcorr.ModelParams(mu=100.0)
    g = radcorr.solve_g(0.0, p)
    assert abs(g - radcorr.eval_F(0.0, g, p)) < 1e-9
    lo, hi = radcorr.g_bounds(p)
    assert lo <= g <= hi
    assert radcorr.solve_g(60.0, p) == 0.0


def test_catalan_and_pairings():
    assert [len(radcorr.sigma0(2 * m)) for m in range(1, 6)] == [1, 1, 2, 5, 14]
    assert len(radcorr.wick_pairings([1, 1, 1, -1, -1, -1])) == 6


def test_region_example():
    inside, binding, limit = radcorr.region(0.95, 0.3, 2)
    assert not inside
    assert binding == "b < (N+2)(1-a)"
    assert limit == pytest.approx(0.2)


def test_fiber_error_is_unitary():
    r = radcorr.fiber_error(radcorr.ModelParams(mu=16.0), 0.5, h=0.5, kmax=1.0)
    assert r["dimension"] > 1
    assert r["energy_drift"] < 1e-8
    assert r["norm_error"] < 1e-10


def test_errors_become_exceptions():
    with pytest.raises(radcorr.Error, match="domain"):
        radcorr.ModelParams(mu=-1.0)
    with pytest.raises(radcorr.Error, match="usage"):
        radcorr.ModelParams(form_factor="gaussian")


def test_cli_entry_point():
    code, out, err = radcorr.run(["solve-g", "--grid", "8"])
    assert code == 0 and err == ""
    assert out.splitlines()[0] == "p,g"
    assert len(out.splitlines()) == 9
    assert radcorr.run(["nope"])[0] == 2
