from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fricke3 import bounds, forms
from fricke3.bounds import BoundReport

mpf = mpmath.mpf
BITS = 192


@pytest.fixture(autouse=True)
def _prec():
    with mpmath.workprec(BITS):
        yield


def test_agreement_rule():
    assert bounds.agrees_5sig(mpf("1.9674"), mpf("1.96733"), "upper")
    assert not bounds.agrees_5sig(mpf("1.9674"), mpf("1.96729"), "upper")
    assert not bounds.agrees_5sig(mpf("1.9674"), mpf("1.96741"), "upper")
    assert bounds.agrees_5sig(mpf("2.8964e-4"), mpf("2.89645e-4"), "lower")
    assert not bounds.agrees_5sig(mpf("2.8964e-4"), mpf("2.89652e-4"), "lower")


@given(st.floats(1e-8, 1e8))
def test_round_up_5(x):
    r = bounds.round_up_5(mpf(x))
    assert r >= x
    ulp = mpf(10) ** (mpmath.floor(mpmath.log10(x)) - 4)
    digits = r / ulp
    assert abs(digits - mpmath.nint(digits)) < 1e-20 * digits
    assert r - x < ulp * (1 + mpf(10) ** -20)


def test_report_status():
    assert BoundReport("u", "1.5", mpf("1.4"), "upper").status == "pass"
    assert BoundReport("u", "1.5", mpf("1.6"), "upper").status == "fail"
    assert BoundReport("u", "1.5", mpf("1.4"), "upper", direct=mpf("1.55")).status == "fail"
    assert BoundReport("l", "1.5", mpf("1.6"), "lower").status == "pass"
    assert BoundReport("e", "1", mpf("1"), "le").status == "pass"
    assert BoundReport("u", "1.5", mpf("1.4"), "upper", blocked=True).status == "blocked"
    r = BoundReport("u", "1.5", mpf("1.4"), "upper")
    assert r.margin > 0 and r.computed_extremum == r.computed
    assert set(r.to_json()) >= {"name", "paper_value", "computed", "margin", "status", "grid"}


@given(st.integers(0, 12), st.fractions(min_value=Fraction(1, 50), max_value=Fraction(9, 10), max_denominator=50),
       st.integers(0, 30))
def test_power_tail_recursion(p, x, start):
    a = bounds.power_tail(p, x, start)
    b = bounds.power_tail(p, x, start + 1)
    assert a - b == (start + 1) ** p * x**start


@given(st.fractions(min_value=Fraction(1, 50), max_value=Fraction(9, 10), max_denominator=50))
def test_power_tail_closed_forms(x):
    assert bounds.power_tail(0, x, 0) == 1 / (1 - x)
    assert bounds.power_tail(1, x, 0) == 1 / (1 - x) ** 2
    assert bounds.power_tail(2, x, 0) == (1 + x) / (1 - x) ** 3


def test_coefficient_bounds():
    reps = bounds.coefficient_bounds(200)
    assert all(r.status == "pass" for r in reps)
    a, b = bounds.eta_quotient_coefficients(10)
    assert a[0] == 1 and b[0] == 1
    assert abs(forms.s_coefficient(4, 1)) == 24 <= 504 * 2**4
    assert bounds._t_coefficients(4, 4, 0) == [1]
    with pytest.raises(ValueError):
        bounds.coefficient_bounds(0)


def test_lipschitz_constants():
    l4 = bounds.lipschitz_bound(0.35, BITS)
    l5 = bounds.lipschitz_bound(0.15, BITS)
    assert mpf("4.0199") < l4 < mpf("4.0200")
    assert mpf("32.022") < l5 < mpf("32.023")
    assert mpmath.sqrt(2) * mpf("4.0200") / 4000 <= mpf("1.4213e-3")
    assert mpmath.sqrt(2) * mpf("32.023") / 4000 <= mpf("1.1322e-2")


@pytest.mark.parametrize("regime,r,value", [("arc_low", 4, "3.8757"), ("line_035", 14, "3.0481"), ("arc_low", 8, "0.10414")])
def test_delta_r_sup(regime, r, value):
    rep = bounds.delta_r_sup(regime, r, 101, BITS)
    assert rep.paper_value == value
    assert rep.status == "pass" and rep.agrees


def test_delta_r_sup_rejects_r():
    with pytest.raises(ValueError):
        bounds.delta_r_sup("arc_low", 12, 11, BITS)


def test_pairing_uses_rounded_sub_bounds():
    rep, subs = bounds.delta_r_pairing("sec4", 101, BITS)
    assert rep.status == "pass" and rep.agrees
    assert len(subs) == 10 and all(s.status == "pass" for s in subs)
    r = int(rep.notes.split("worst r = ")[1].split(";")[0])
    assert rep.extra["raw_pairs"][r] <= rep.computed


@pytest.mark.parametrize("regime", ["arc_low", "line_035", "arc_high", "line_015"])
def test_delta3_range_grid_refinement(regime):
    coarse = bounds.delta3_range(regime, 101, BITS)
    fine = bounds.delta3_range(regime, 201, BITS)
    assert [r.status for r in coarse] == [r.status for r in fine] == ["pass", "pass"]
    assert fine[0].direct <= coarse[0].direct and fine[1].direct >= coarse[1].direct


def test_delta3_range_unknown_regime():
    with pytest.raises(ValueError):
        bounds.delta3_range("nowhere", 11, BITS)


def test_aggregation_chains():
    reps = [r for part in "ab" for sign in ("nonneg", "neg") for r in bounds.prop24_aggregate(part, sign)]
    assert len(reps) == 10
    assert all(r.status == "pass" for r in reps)
    bad = [r.paper_value for r in reps if not r.agrees]
    # printed 0.99728 is not the sum 0.10931 + 0.88347 = 0.99278
    assert bad == ["0.99728"]


def test_aggregation_blocked_and_args():
    assert all(r.status == "blocked" for r in bounds.prop24_aggregate("a", "neg", blocked=True))
    with pytest.raises(ValueError):
        bounds.prop24_aggregate("c", "neg")
    with pytest.raises(ValueError):
        bounds.prop24_aggregate("a", "zero")


def test_envelope_reports():
    reps = bounds.envelope_reports(201, BITS)
    assert all(r.status == "pass" for r in reps)


def test_correction_terms_below_envelope_bounds():
    reps = bounds.correction_direct((23, 41), points=101, precision_bits=128)
    assert all(r.status == "pass" for r in reps)


def test_unknown_suite():
    with pytest.raises(ValueError):
        bounds.run_suite("lemma9.9", 11, BITS)
