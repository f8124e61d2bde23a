"""High-precision evaluation of q-series on the arc |z| = 1/sqrt(3).

Near rho_3 the q-expansion of f_{k,m} sums terms of size e^{300} to a value
of size e^{70}, so evaluation runs in fixed point on Gaussian integers with
a precision budget of ``precision_bits`` and only the final scaling goes
through mpmath.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
from mpmath import mpc, mpf

from . import basis as _basis
from . import forms
from .qseries import LaurentSeries

DEFAULT_BITS = 768
DEFAULT_GRID = 4000
THETA_MIN = math.pi / 2
THETA_MAX = 5 * math.pi / 6
THETA_SPLIT = 2.3
ZERO_TOL = 1e-12 * math.pi
_GUARD = 24
_TAIL_MARGIN = 8


class InsufficientTruncation(ArithmeticError):
    pass


@dataclass(frozen=True)
class Evaluation:
    value: mpc
    error: mpf  # |S_N - S_{N/2}|
    scale: mpf  # largest |c_n q^n| among the summed terms
    terms: int


# -- evaluation ------------------------------------------------------------

_log_cache: "OrderedDict[int, tuple[LaurentSeries, np.ndarray]]" = OrderedDict()


def _coeff_log2(series: LaurentSeries) -> np.ndarray:
    key = id(series)
    hit = _log_cache.get(key)
    if hit is not None and hit[0] is series:
        _log_cache.move_to_end(key)
        return hit[1]
    out = np.full(len(series.numerators), -np.inf)
    for i, c in enumerate(series.numerators):
        if c:
            out[i] = math.log2(abs(c))
    out -= math.log2(series.denominator)
    _log_cache[key] = (series, out)
    if len(_log_cache) > 64:
        _log_cache.popitem(last=False)
    return out


def _to_fixed(x: mpf, bits: int) -> int:
    return int(mpmath.nint(mpmath.ldexp(x, bits)))


def _horner_fixed(nums, qr: int, qi: int, bits: int) -> tuple[int, int]:
    ar = ai = 0
    for c in reversed(nums):
        tr = (ar * qr - ai * qi) >> bits
        ai = (ar * qi + ai * qr) >> bits
        ar = tr + (c << bits)
    return ar, ai


def terms_needed(series: LaurentSeries, log2_abs_q: float, precision_bits: int) -> tuple[int, float]:
    """(N, log2 of the largest term) for the doubling rule: every term past N/2
    is below 2^(-p/2-8) of the largest one, leaving room for the tail sum."""
    lg = _coeff_log2(series) + log2_abs_q * (series.valuation + np.arange(len(series.numerators)))
    top = float(np.max(lg))
    big = np.nonzero(lg >= top - precision_bits / 2 - _TAIL_MARGIN)[0]
    half = int(big[-1]) + 1
    return 2 * half + 2, top


def evaluate(
    series: LaurentSeries,
    z,
    precision_bits: int = DEFAULT_BITS,
    terms: int | None = None,
    check: bool = True,
) -> Evaluation:
    """Sum ``c_n e^{2 pi i n z}`` at ``precision_bits``.

    The number of terms N is chosen so that everything past N/2 is below
    2^(-p/2) of the largest term; S_N and S_{N/2} are compared and
    InsufficientTruncation is raised when they disagree by more than that.
    """
    with mpmath.workprec(precision_bits + _GUARD):
        z = mpmath.mpmathify(z)
        if z.imag <= 0:
            raise ValueError("z must lie in the upper half-plane")
        q = mpmath.expjpi(2 * z)
        log2q = float(-2 * mpmath.pi * z.imag / mpmath.log(2))
        avail = len(series.numerators)
        n_terms, top = terms_needed(series, log2q, precision_bits)
        if terms is not None:
            n_terms = terms
        n_terms = min(n_terms, avail)
        half = max(n_terms // 2, 1)
        bits = precision_bits + _GUARD
        qr, qi = _to_fixed(q.real, bits), _to_fixed(q.imag, bits)
        nums = series.numerators
        lo = _horner_fixed(nums[:half], qr, qi, bits)
        hi = _horner_fixed(nums[half:n_terms], qr, qi, bits)
        one = mpmath.ldexp(1, -bits)
        low = mpc(lo[0], lo[1]) * one
        high = mpc(hi[0], hi[1]) * one * q**half
        pref = q**series.valuation / series.denominator
        value = (low + high) * pref
        err = abs(high * pref)
        scale = mpmath.ldexp(1, int(math.floor(top)))
        if check and n_terms > half and err > scale * mpmath.ldexp(1, -precision_bits // 2):
            raise InsufficientTruncation(
                f"insufficient truncation order: {avail} coefficients, doubling check off by {mpmath.nstr(err / scale, 5)}"
            )
        return Evaluation(+value, +err, +scale, n_terms)


# -- arc geometry ----------------------------------------------------------


def arc_point(theta) -> mpc:
    return mpmath.expj(theta) / mpmath.sqrt(3)


def alpha(theta, k: int, m: int):
    """Phase k theta/2 - 2 pi m cos(theta)/sqrt(3)."""
    theta = mpmath.mpmathify(theta)
    return k * theta / 2 - 2 * mpmath.pi * m * mpmath.cos(theta) / mpmath.sqrt(3)


def tail_start(m: int) -> float:
    return THETA_MAX - 12 / (25 * m) if m > 0 else THETA_MAX


@dataclass(frozen=True)
class ArcSample:
    theta: mpf
    z: mpc
    h_value: mpf
    alpha: mpf
    imag_residual: mpf
    term_scale: mpf
    error: mpf

    @property
    def two_cos_alpha(self):
        return 2 * mpmath.cos(self.alpha)

    @property
    def relative_residual(self):
        return abs(self.imag_residual) / self.term_scale


def normalized_value(b: _basis.BasisForm, theta, precision_bits: int = DEFAULT_BITS) -> ArcSample:
    """h(theta) = e^{-2 pi m sin(theta)/sqrt3} e^{i k theta/2} f_{k,m}(e^{i theta}/sqrt3)."""
    with mpmath.workprec(precision_bits + _GUARD):
        theta = mpmath.mpmathify(theta)
        if not (THETA_MIN - 1e-15 <= theta <= THETA_MAX + 1e-15):
            raise ValueError("theta outside [pi/2, 5 pi/6]")
        z = arc_point(theta)
        ev = evaluate(b.series, z, precision_bits)
        norm = mpmath.exp(-2 * mpmath.pi * b.m * z.imag) * mpmath.expj(b.k * theta / 2)
        h = ev.value * norm
        scale = ev.scale * abs(norm)
        return ArcSample(theta, z, h.real, alpha(theta, b.k, b.m), h.imag, scale, ev.error * abs(norm))


def arc_order(k: int, m: int, precision_bits: int = DEFAULT_BITS) -> int:
    """Truncation order for the doubling check at rho_3, from the
    growth log|c_n| ~ 4 pi sqrt(m n/3) + (|k|/2 + 1) log n."""
    y = 1 / (2 * math.sqrt(3))
    mm = max(m, 1)
    n = np.arange(1, 20000, dtype=float)
    lg = 4 * math.pi * np.sqrt(mm * n / 3) + (abs(k) / 2 + 1) * np.log(n + 1) - 2 * math.pi * y * n
    top = lg.max()
    half = int(np.nonzero(lg >= top - precision_bits / 2 * math.log(2) - 8)[0][-1]) + 1
    return max(2 * half + 2 + max(m, 0), 200)


def prepare(
    k: int, m: int, precision_bits: int = DEFAULT_BITS, cache: _basis.BasisCache | None = None
) -> _basis.BasisForm:
    """Build f_{k,m} long enough for arc evaluation at ``precision_bits``."""
    order = arc_order(k, m, precision_bits)
    while True:
        b = _basis.build(k, m, order, cache=cache)
        log2q = -2 * math.pi / (2 * math.sqrt(3)) / math.log(2)
        need, _ = terms_needed(b.series, log2q, precision_bits)
        if need <= len(b.series.numerators):
            return b
        order = int(1.25 * order) + 10


# -- zero scan -------------------------------------------------------------


@dataclass
class ArcZero:
    theta: mpf
    bracket: tuple
    in_tail: bool


@dataclass
class ArcZeroReport:
    k: int
    m: int
    zeros: list
    expected_count: int
    s: int
    t: int
    corner_values: tuple
    corner_small: tuple
    grid_points: int
    precision_bits: int
    max_relative_residual: mpf
    ambiguous_signs: int
    rescan: bool
    samples: list = field(default_factory=list, repr=False)

    @property
    def found(self) -> int:
        return len(self.zeros)

    @property
    def passed(self) -> bool:
        return self.found == self.expected_count and not self.rescan

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "m": self.m,
            "found": self.found,
            "expected_count": self.expected_count,
            "passed": self.passed,
            "rescan": self.rescan,
            "zeros": [{"theta": mpmath.nstr(z.theta, 20), "in_tail": z.in_tail} for z in self.zeros],
            "corner_orders": {"s": self.s, "t": self.t},
            "corner_values": [mpmath.nstr(v, 10) for v in self.corner_values],
            "corner_small": list(self.corner_small),
            "grid_points": self.grid_points,
            "precision_bits": self.precision_bits,
            "max_relative_residual": mpmath.nstr(self.max_relative_residual, 5),
            "ambiguous_signs": self.ambiguous_signs,
        }


def theta_grid(grid_points: int, lo=THETA_MIN, hi=THETA_MAX, open_ends: bool = True) -> list:
    lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
    if open_ends:
        step = (hi - lo) / (grid_points + 1)
        return [lo + i * step for i in range(1, grid_points + 1)]
    step = (hi - lo) / (grid_points - 1)
    return [lo + i * step for i in range(grid_points)]


def _eval_chunk(args):
    b, thetas, bits = args
    with mpmath.workprec(bits + _GUARD):
        return [normalized_value(b, t, bits) for t in thetas]


def sample_arc(b: _basis.BasisForm, thetas, precision_bits: int = DEFAULT_BITS, jobs: int = 1) -> list:
    """normalized_value over ``thetas``, optionally split over worker processes."""
    if jobs <= 1 or len(thetas) < 2 * jobs:
        return _eval_chunk((b, thetas, precision_bits))
    size = -(-len(thetas) // jobs)
    chunks = [(b, thetas[i : i + size], precision_bits) for i in range(0, len(thetas), size)]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        parts = list(ex.map(_eval_chunk, chunks))
    return [s for part in parts for s in part]


def _refine(b, lo, hi, h_lo, bits, tol):
    while hi - lo > tol:
        mid = (lo + hi) / 2
        h_mid = normalized_value(b, mid, bits).h_value
        if h_mid == 0:
            return mid
        if (h_mid > 0) == (h_lo > 0):
            lo, h_lo = mid, h_mid
        else:
            hi = mid
    return (lo + hi) / 2


def scan_zeros(
    b: _basis.BasisForm,
    grid_points: int = DEFAULT_GRID,
    precision_bits: int = DEFAULT_BITS,
    jobs: int = 1,
    keep_samples: bool = True,
    tol: float = ZERO_TOL,
) -> ArcZeroReport:
    with mpmath.workprec(precision_bits + _GUARD):
        thetas = theta_grid(grid_points)
        samples = sample_arc(b, thetas, precision_bits, jobs)
        zeros = []
        ambiguous = 0
        tail = tail_start(b.m)
        for s0, s1 in zip(samples, samples[1:]):
            if abs(s0.h_value) <= s0.error or abs(s1.h_value) <= s1.error:
                ambiguous += 1
            if (s0.h_value > 0) != (s1.h_value > 0):
                th = _refine(b, s0.theta, s1.theta, s0.h_value, precision_bits, tol)
                zeros.append(ArcZero(th, (s0.theta, s1.theta), bool(th > tail)))
        step_alpha = max(abs(s1.alpha - s0.alpha) for s0, s1 in zip(samples, samples[1:]))
        corners = []
        for th in (mpmath.pi / 2, 5 * mpmath.pi / 6):
            smp = normalized_value(b, th, precision_bits)
            corners.append(smp.h_value)
        d = b.decomp
        small = tuple(bool(abs(v) < 1e-20) for v in corners)
        worst = max(s.relative_residual for s in samples)
        separated = all(z1.theta - z0.theta > tol for z0, z1 in zip(zeros, zeros[1:]))
        rescan = step_alpha > mpmath.pi / 4 or not separated or len(zeros) != b.expected_zero_count
        return ArcZeroReport(
            k=b.k,
            m=b.m,
            zeros=zeros,
            expected_count=b.expected_zero_count,
            s=d.s,
            t=d.t,
            corner_values=tuple(corners),
            corner_small=small,
            grid_points=grid_points,
            precision_bits=precision_bits,
            max_relative_residual=worst,
            ambiguous_signs=ambiguous,
            rescan=rescan,
            samples=samples if keep_samples else [],
        )


def valence_audit(b: _basis.BasisForm, report: ArcZeroReport) -> Fraction:
    """v_inf + s/2 + t/6 + #(simple arc zeros) - k/6; zero when the zero count is complete."""
    d = b.decomp
    v_inf = b.series.normalized().valuation
    return Fraction(v_inf) + Fraction(d.s, 2) + Fraction(d.t, 6) + report.found - Fraction(d.k, 6)


# -- j3+ along the arc -----------------------------------------------------


@dataclass
class J3Profile:
    samples: list  # (theta, value)
    max_imag: mpf
    monotone: bool
    endpoints: tuple

    def value_at(self, theta):
        return min(self.samples, key=lambda s: abs(s[0] - theta))[1]


def j3_value(z, precision_bits: int = 256) -> mpc:
    z = mpmath.mpmathify(z)
    y = float(z.imag)
    order = _hauptmodul_order(y, precision_bits)
    return evaluate(forms.j3_plus(order).series, z, precision_bits).value


def _hauptmodul_order(y: float, bits: int) -> int:
    n = np.arange(1, 100000, dtype=float)
    lg = 4 * math.pi * np.sqrt(n / 3) - 2 * math.pi * y * n
    top = max(lg.max(), 2 * math.pi * y)
    half = int(np.nonzero(lg >= top - bits / 2 * math.log(2) - 8)[0][-1]) + 1
    return 2 * half + 8


def j3_arc_profile(grid_points: int = 2001, precision_bits: int = 256) -> J3Profile:
    """j3+ on a closed grid from pi/2 to 5 pi/6; it runs from 66 down to -42."""
    with mpmath.workprec(precision_bits + _GUARD):
        order = _hauptmodul_order(1 / (2 * math.sqrt(3)), precision_bits)
        j = forms.j3_plus(order).series
        out = []
        worst = mpf(0)
        for th in theta_grid(grid_points, open_ends=False):
            v = evaluate(j, arc_point(th), precision_bits).value
            worst = max(worst, abs(v.imag))
            out.append((th, v.real))
        vals = [v for _, v in out]
        monotone = all(b < a for a, b in zip(vals, vals[1:]))
        return J3Profile(out, worst, monotone, (vals[0], vals[-1]))
