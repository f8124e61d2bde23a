import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fricke3 import arc, contour

BITS = 256
THETA0 = 5 * mpmath.pi / 6 - mpmath.mpf(12) / 575


@pytest.fixture(autouse=True)
def _prec():
    with mpmath.workprec(BITS):
        yield


@given(st.floats(2.3, 2.6), st.sampled_from([0, 4, 8, -12, 14]), st.integers(18, 60))
def test_closed_forms_match_residues(theta, k, m):
    b, c = contour.correction_terms(theta, k, m)
    rb, rc = contour.correction_terms_from_residues(theta, k, m)
    scale = 1 + abs(b) + abs(c)
    assert abs(b - rb.real) < 1e-60 * scale and abs(rb.imag) < 1e-60 * scale
    assert abs(c - rc.real) < 1e-60 * scale and abs(rc.imag) < 1e-60 * scale


def test_minus_c_phase_breaks_the_identity():
    theta, k, m = 2.5, 4, 23
    res = contour.identity_check(theta, k, m, "high")
    assert res.residual < 1e-10
    _, c_minus = contour.correction_terms(theta, k, m, minus_c_phase=True)
    assert abs(c_minus - res.C) > 1e-8
    wrong = res.integral + res.B + c_minus
    assert abs(res.lhs - wrong) > 1e50 * abs(res.lhs - res.rhs)


@pytest.mark.parametrize("k,m", [(0, 1), (4, 3), (-12, 2)])
def test_line_above_arc_gives_the_form(k, m):
    z = arc.arc_point(2.0)
    q = contour.trapezoid(z, k, m, contour.ContourConfig(height=2.0, quadrature_points=64))
    f = arc.evaluate(arc.prepare(k, m, BITS).series, z, BITS).value
    assert abs(q.value - f) < 1e-50 * max(1, abs(f))


def test_g_forms_agree():
    z = arc.arc_point(2.1)
    tau = mpmath.mpc("0.17", "0.35")
    vals = [contour.G(tau, z, 4, 23, form=f) for f in ("product", "ratio", "derivative")]
    assert abs(vals[0] - vals[1]) < 1e-50 * abs(vals[0])
    assert abs(vals[0] - vals[2]) < 1e-50 * abs(vals[0])


def test_pole_inventory_high_regime():
    for theta in (2.35, 2.5, 2.6):
        poles = contour.pole_inventory(theta)
        assert [p["term"] for p in poles] == ["B", "B", "C", "C"]
        for p in poles:
            assert contour.HIGH_HEIGHT < p["height"] < contour.LOW_HEIGHT
            assert p["j_gap"] < 1e-40


def test_no_extra_pole_above_low_line():
    for theta in (1.6, 1.9, 2.3):
        assert all(p["height"] < contour.LOW_HEIGHT for p in contour.pole_inventory(theta))


@pytest.mark.parametrize("theta,k,m,regime", [(1.9, 0, 23, "low"), (2.45, 0, 23, "high")])
def test_identity(theta, k, m, regime):
    res = contour.identity_check(theta, k, m, regime)
    assert res.residual < 1e-10
    doc = res.to_json()
    assert set(doc["parts"]) == {"integral", "residues", "B", "C"}


def test_identity_rejects_bad_input():
    with pytest.raises(ValueError):
        contour.identity_check(2.5, 0, 23, "low")
    with pytest.raises(ValueError):
        contour.identity_check(2.0, 0, 23, "high", contour.ContourConfig(height=0.35))
    with pytest.raises(ValueError):
        contour.ContourConfig(quadrature_points=63)
    with pytest.raises(ValueError):
        contour.ContourConfig(height=0)


def test_quadrature_not_converged():
    cfg = contour.ContourConfig(height=0.15, quadrature_points=64)
    with pytest.raises(contour.QuadratureNotConverged):
        contour.line_integral(arc.arc_point(2.0), 0, 23, cfg)


def test_envelopes_at_corner():
    g, h = contour.envelope_functions(5 * mpmath.pi / 6)
    assert abs(g - 1) < 1e-60 and abs(h - 1) < 1e-60


def test_envelope_derivative_finite_differences():
    for i in range(20):
        t = THETA0 + (5 * mpmath.pi / 6 - THETA0) * i / 19
        dg, dh = contour.envelope_derivatives(t)
        fd_g = mpmath.diff(lambda x: contour.envelope_functions(x)[0], t)
        fd_h = mpmath.diff(lambda x: contour.envelope_functions(x)[1], t)
        assert abs(dg - fd_g) < 1e-40 and abs(dh - fd_h) < 1e-40


def test_envelope_floors_and_monotonicity():
    fg, fh = contour.envelope_derivative_floor()
    assert mpmath.mpf("2.4233") < fg < mpmath.mpf("2.4234")
    assert mpmath.mpf("4.2632") < fh < mpmath.mpf("4.2633")
    prev = None
    for i in range(200):
        t = THETA0 + (5 * mpmath.pi / 6 - THETA0) * i / 199
        dg, dh = contour.envelope_derivatives(t)
        assert dg > fg and dh > fh
        g, h = contour.envelope_functions(t)
        if prev is not None:
            assert g > prev[0] and h > prev[1]
        prev = (g, h)
