import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fricke3 import arc, basis, forms
from fricke3.qseries import LaurentSeries

BITS = 256
RHO3 = lambda: mpmath.expjpi(mpmath.mpf(5) / 6) / mpmath.sqrt(3)


@pytest.fixture(autouse=True)
def _prec():
    with mpmath.workprec(BITS):
        yield


def test_special_values():
    assert abs(arc.j3_value(mpmath.mpc(0, 1) / mpmath.sqrt(3), BITS) - 66) < 1e-20
    assert abs(arc.j3_value(RHO3(), BITS) + 42) < 1e-20


def test_evaluate_matches_direct_sum():
    j = forms.j3_plus(400).series
    z = mpmath.mpc("0.123", "0.41")
    q = mpmath.expjpi(2 * z)
    direct = mpmath.fsum(mpmath.mpf(c.numerator) * q**n for n, c in j.items())
    got = arc.evaluate(j, z, BITS)
    assert abs(got.value - direct) < mpmath.mpf(2) ** -200 * abs(direct)
    assert got.error < got.scale * mpmath.mpf(2) ** -(BITS // 2)


def test_short_series_rejected():
    with pytest.raises(arc.InsufficientTruncation):
        arc.evaluate(forms.j3_plus(30).series, RHO3(), BITS)
    with pytest.raises(ValueError):
        arc.evaluate(forms.j3_plus(30).series, mpmath.mpc(0, -1), BITS)


def test_terms_needed_grows_with_precision():
    j = forms.j3_plus(2000).series
    lq = -2 * math.pi * 0.3 / math.log(2)
    assert arc.terms_needed(j, lq, 128)[0] < arc.terms_needed(j, lq, 512)[0]


@given(st.floats(-0.5, 0.5), st.floats(0.3, 0.9))
def test_j3_fricke_invariant(x, y):
    z = mpmath.mpc(x, y)
    w = -1 / (3 * z)
    if w.imag < 0.3:
        return
    assert abs(arc.j3_value(z, 128) - arc.j3_value(w, 128)) < 1e-25 * (1 + abs(arc.j3_value(z, 128)))


@pytest.mark.parametrize("k,m", [(4, 3), (-12, 4), (14, 2), (8, 1)])
def test_basis_form_transforms_under_fricke(k, m):
    """f(-1/(3z)) = (sqrt3 z)^k f(z) at points just outside the arc."""
    b = arc.prepare(k, m, 128)
    for theta in (1.7, 2.0, 2.4):
        z = 1.15 * arc.arc_point(theta)
        w = -1 / (3 * z)
        lhs = arc.evaluate(b.series, w, 128).value
        rhs = (mpmath.sqrt(3) * z) ** k * arc.evaluate(b.series, z, 128).value
        assert abs(lhs - rhs) < 1e-25 * max(abs(lhs), 1)


@pytest.mark.parametrize("k,m", [(0, 4), (12, 3), (14, 5), (-12, 6)])
def test_independent_route(k, m):
    """f = (Delta3+)^l Delta3,r F(j3+) from pointwise values of the three factors."""
    b = basis.build(k, m)
    d = b.decomp
    z = mpmath.mpc("-0.07", "0.62")
    f = arc.evaluate(arc.prepare(k, m, BITS).series, z, BITS).value
    order = 300
    delta = arc.evaluate(forms.delta3_plus(order).series, z, BITS).value
    dr = arc.evaluate(forms.delta3_r(d.r, order).series, z, BITS).value
    j = arc.j3_value(z, BITS)
    poly = mpmath.polyval(list(reversed(b.poly)), j)
    assert abs(f - delta**d.ell * dr * poly) < 1e-40 * abs(f)


def test_normalized_value_is_real():
    b = arc.prepare(6, 7, BITS)
    for th in arc.theta_grid(20):
        s = arc.normalized_value(b, th, BITS)
        assert s.relative_residual < mpmath.mpf(2) ** -(BITS // 2)


@pytest.mark.parametrize("k,m", [(0, 3), (4, 5), (-12, 5), (14, 4), (8, 6), (10, 4), (12, 8)])
def test_zero_count_and_valence(k, m):
    b = arc.prepare(k, m, BITS)
    rep = arc.scan_zeros(b, 400, BITS, keep_samples=False)
    assert rep.found == rep.expected_count == b.decomp.top + m
    assert not rep.rescan and rep.passed
    assert arc.valence_audit(b, rep) == 0
    thetas = [z.theta for z in rep.zeros]
    assert thetas == sorted(thetas) and all(arc.THETA_MIN < t < arc.THETA_MAX for t in thetas)


def test_zeros_are_sign_changes():
    b = arc.prepare(0, 3, BITS)
    rep = arc.scan_zeros(b, 200, BITS, keep_samples=False)
    for z in rep.zeros:
        lo = arc.normalized_value(b, z.theta - 1e-6, BITS).h_value
        hi = arc.normalized_value(b, z.theta + 1e-6, BITS).h_value
        assert lo * hi < 0


def test_valence_audit_detects_missing_zero():
    b = arc.prepare(0, 3, BITS)
    rep = arc.scan_zeros(b, 200, BITS, keep_samples=False)
    rep.zeros = rep.zeros[:-1]
    assert arc.valence_audit(b, rep) == -1
    assert not rep.passed


def test_coarse_grid_requests_rescan():
    b = arc.prepare(0, 23, BITS)
    rep = arc.scan_zeros(b, 16, BITS, keep_samples=False)
    assert rep.rescan


def test_j3_profile():
    prof = arc.j3_arc_profile(201, BITS)
    assert prof.monotone
    assert abs(prof.endpoints[0] - 66) < 1e-20 and abs(prof.endpoints[1] + 42) < 1e-20
    assert prof.max_imag < 1e-30


def test_theta_grid_ends():
    g = arc.theta_grid(10)
    assert arc.THETA_MIN < g[0] and g[-1] < arc.THETA_MAX and len(g) == 10
    c = arc.theta_grid(10, open_ends=False)
    assert abs(c[0] - arc.THETA_MIN) < 1e-30 and abs(c[-1] - arc.THETA_MAX) < 1e-30


def test_zero_report_json():
    b = arc.prepare(4, 2, BITS)
    doc = arc.scan_zeros(b, 100, BITS, keep_samples=False).to_json()
    assert doc["found"] == doc["expected_count"] == 2 and doc["passed"]
