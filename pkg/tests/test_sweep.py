import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lmgphase import biaxial_phase, uniaxial_phase, validate_biaxial, validate_uniaxial
from lmgphase.errors import ConfigError, DomainError, InsufficientPoints
from lmgphase.sweep import (AxisSpec, central_derivative, cusp_detect, find_cusps,
                            jump_ratios, scaling_fit, sweep)


def poly_eval(**kw):
    x = kw["x"]
    return {"const": 2.5, "lin": 3 * x + 1, "quad": 0.7 * x * x - 2 * x + 4}


def biaxial_eval(gamma, h, N):
    r = biaxial_phase(validate_biaxial(gamma, h, N))
    return {"phi_g": r.phi_g, "n_mean": r.n_mean}


def uniaxial_eval(h_x, h_z, N):
    r = uniaxial_phase(validate_uniaxial(h_x, h_z, N))
    return {"phi_g": r.phi_g}


@pytest.mark.parametrize("spec", [AxisSpec("x", 1.0, 1.0, 5), AxisSpec("x", 2.0, 1.0, 5),
                                  AxisSpec("x", 0.0, 1.0, 0), AxisSpec("x", 0.0, math.inf, 4)])
def test_malformed_axes(spec):
    with pytest.raises(ConfigError):
        sweep(poly_eval, [spec])


def test_single_point_axis_matches_direct_evaluation():
    t = sweep(biaxial_eval, [AxisSpec.single("gamma", 0.5), AxisSpec.single("h", 2.0)], {"N": 100})
    assert len(t.rows) == 1
    assert t.rows[0]["phi_g"] == biaxial_phase(validate_biaxial(0.5, 2.0, 100)).phi_g


def test_grid_order_and_failure_marking():
    axes = [AxisSpec("gamma", 0.0, 1.5, 4), AxisSpec("h", 0.5, 2.0, 3)]
    t = sweep(biaxial_eval, axes, {"N": 50})
    assert t.shape == (4, 3)
    assert [(r["gamma"], r["h"]) for r in t.rows[:4]] == [(0.0, 0.5), (0.0, 1.25), (0.0, 2.0), (0.5, 0.5)]
    failed = t.failures()
    assert [i for i, _ in failed] == [9, 10, 11]
    assert all("DomainError" in msg for _, msg in failed)
    assert np.isnan(t.column("phi_g")[3]).all()


def test_threads_do_not_change_results():
    axes = [AxisSpec("gamma", 0.0, 1.0, 7), AxisSpec("h", 0.1, 2.0, 9)]
    a = sweep(biaxial_eval, axes, {"N": 60}, threads=1)
    b = sweep(biaxial_eval, axes, {"N": 60}, threads=8)
    assert a.rows == b.rows


def test_figure_two_curves_coincide_away_from_criticality():
    axes = [AxisSpec.single("gamma", 0.5), AxisSpec("h", 1.5, 2.0, 11)]
    small = sweep(biaxial_eval, axes, {"N": 4}).column("phi_g")
    large = sweep(biaxial_eval, axes, {"N": 1000}).column("phi_g")
    np.testing.assert_allclose(small, large, atol=0.02)


def test_derivatives_exact_on_low_order_polynomials():
    t = sweep(poly_eval, [AxisSpec("x", -1.0, 2.0, 13)])
    x = t.axes["x"]
    np.testing.assert_allclose(central_derivative(t, "const", "x"), 0.0, atol=1e-12)
    np.testing.assert_allclose(central_derivative(t, "lin", "x"), 3.0, atol=1e-10)
    np.testing.assert_allclose(central_derivative(t, "quad", "x"), 1.4 * x - 2, rtol=1e-10, atol=1e-12)


def test_derivative_needs_three_points():
    t = sweep(poly_eval, [AxisSpec("x", 0.0, 1.0, 2)])
    with pytest.raises(InsufficientPoints):
        central_derivative(t, "lin", "x")


def test_derivative_along_second_axis():
    t = sweep(lambda a, b: {"f": a * b * b}, [AxisSpec("a", 1.0, 2.0, 3), AxisSpec("b", 0.0, 1.0, 5)])
    d = central_derivative(t, "f", "b")
    np.testing.assert_allclose(d, 2 * t.axes["a"][:, None] * t.axes["b"][None, :], atol=1e-12)


def test_uniaxial_derivative_jumps_at_zero():
    t = sweep(uniaxial_eval, [AxisSpec("h_x", -0.5, 0.5, 401), AxisSpec.single("h_z", 0.5)], {"N": 200})
    d = central_derivative(t, "phi_g", "h_x").ravel()
    assert d[199] == pytest.approx(-d[201], rel=1e-6)
    assert abs(d[201] - d[199]) > 0.1


def test_synthetic_abs_cusp():
    x = np.linspace(-1, 1, 201)
    assert find_cusps(x, np.abs(x)) == [0.0]
    # kink between grid nodes
    x = np.linspace(-1, 1, 200)
    found = find_cusps(x, np.abs(x - 0.003))
    assert len(found) == 1 and abs(found[0] - 0.003) <= x[1] - x[0]


@pytest.mark.parametrize("f", [np.sin, np.exp, np.cos, lambda x: x ** 3 - x, lambda x: 2 * x + 1,
                               lambda x: np.zeros_like(x), np.tanh])
def test_smooth_columns_have_no_cusps(f):
    x = np.linspace(-2, 2, 401)
    assert find_cusps(x, f(x)) == []


def test_uniaxial_cusp_trichotomy():
    def cusps(h_z):
        t = sweep(uniaxial_eval, [AxisSpec("h_x", -0.5, 0.5, 401), AxisSpec.single("h_z", h_z)], {"N": 200})
        return cusp_detect(t, "phi_g", "h_x")
    found = cusps(0.5)
    assert len(found) == 1 and abs(found[0]) <= 0.0025 + 1e-12
    assert cusps(2.0) == []


def test_cusp_detect_rejects_2d_tables():
    t = sweep(lambda a, b: {"f": a + b}, [AxisSpec("a", 0.0, 1.0, 4), AxisSpec("b", 0.0, 1.0, 4)])
    with pytest.raises(ConfigError):
        cusp_detect(t, "f", "a")


def test_jump_ratios_edges_zero():
    r = jump_ratios(np.linspace(0, 1, 10), np.linspace(0, 1, 10) ** 2)
    assert r[0] == r[-1] == 0.0


def test_scaling_synthetic():
    n = np.array([10.0, 100.0, 1000.0, 1e4])
    linear, loglog = scaling_fit(n, -2 * n)
    assert linear.slope == pytest.approx(-2.0, abs=1e-12)
    assert linear.r_sq == pytest.approx(1.0, abs=1e-12)
    assert loglog.slope == pytest.approx(1.0, abs=1e-12)
    assert linear.domain == (10.0, 1e4)


def test_scaling_preconditions():
    with pytest.raises(InsufficientPoints):
        scaling_fit([1, 2], [1, 2])
    with pytest.raises(ConfigError):
        scaling_fit([1, 3, 2], [1, 2, 3])


@given(st.floats(-50, 50).filter(lambda c: abs(c) > 1e-3))
def test_scaling_affine_equivariance(c):
    n = np.array([100.0, 300.0, 1000.0, 5000.0])
    phi = np.array([-30.0, -101.0, -340.0, -1700.0])
    base = scaling_fit(n, phi)[0]
    scaled = scaling_fit(n, c * phi)[0]
    assert scaled.slope == pytest.approx(c * base.slope, rel=1e-12)
    assert 0.0 <= scaled.r_sq <= 1.0
