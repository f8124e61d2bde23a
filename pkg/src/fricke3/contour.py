"""Contour-integral representation of f_{k,m} and the residue identity on the arc.

    f_{k,m}(z) = int_{-1/2+iA}^{1/2+iA} G(tau, z) dtau          (A large)

Lowering the line to height A' crosses poles of G(., z) at points
gamma z equivalent to z; each contributes 2 pi i Res, with

    Res_{gamma z} G = e^{-2 pi i m gamma z} / (-2 pi i (cz + d)^k).

After multiplying by e^{-2 pi m sin(theta)/sqrt3} e^{ik theta/2} this gives

    h(theta) - 2 cos(alpha) = norm * int_{A'} G  (+ B + C below theta = 2.3 ... 5 pi/6)
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import mpmath
from mpmath import mpc, mpf

from . import arc
from . import basis as _basis
from . import forms

LOW_HEIGHT = 0.35
HIGH_HEIGHT = 0.15
DEFAULT_NODES = 512
DEFAULT_CONTOUR_BITS = 256
POLE_TOL = mpf("1e-20")


class QuadratureNotConverged(ArithmeticError):
    pass


class PoleProximity(ArithmeticError):
    pass


@dataclass(frozen=True)
class ContourConfig:
    height: float = LOW_HEIGHT
    quadrature_points: int = DEFAULT_NODES
    precision_bits: int = DEFAULT_CONTOUR_BITS
    trunc_order: int | None = None  # tau-side series; None picks it from height and precision
    tolerance: float = 1e-18  # doubling check, relative to the mean of |G| on the line
    jobs: int = 1

    def __post_init__(self):
        if not self.height > 0:
            raise ValueError("contour height must be positive")
        if self.quadrature_points < 64 or self.quadrature_points % 2:
            raise ValueError("quadrature_points must be even and at least 64")
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be at least 64")

    @classmethod
    def for_regime(cls, regime: str, **kw) -> "ContourConfig":
        return cls(height=_regime(regime)[0], **kw)


def _regime(regime: str):
    """(height, theta_lo, theta_hi(m)) for 'low' or 'high'."""
    if regime == "low":
        return LOW_HEIGHT, arc.THETA_MIN, lambda m: arc.THETA_SPLIT
    if regime == "high":
        return HIGH_HEIGHT, arc.THETA_SPLIT, arc.tail_start
    raise ValueError(f"regime must be 'low' or 'high', got {regime!r}")


# -- point values of the named forms --------------------------------------


def series_order(height: float, precision_bits: int) -> int:
    # headroom for the differentiated j3+ series, whose coefficients carry an extra factor n
    return int(1.25 * arc._hauptmodul_order(height, precision_bits)) + 40


@dataclass(frozen=True)
class FormValues:
    delta: mpc
    delta14: mpc
    j: mpc
    dj: mpc  # d j3+/d tau from the differentiated series
    r_values: dict


def form_values(tau, rs, precision_bits: int, order: int | None = None) -> FormValues:
    """Delta3+, Delta3,14, j3+, j3+' and Delta3,r for r in ``rs`` at ``tau``."""
    tau = mpmath.mpmathify(tau)
    if order is None:
        order = series_order(float(tau.imag), precision_bits)

    def ev(series):
        return arc.evaluate(series, tau, precision_bits).value

    j_series = forms.j3_plus(order).series
    rv = {}
    for r in set(rs):
        rv[r] = mpc(1) if r == 0 else ev(forms.delta3_r(r, order).series)
    return FormValues(
        delta=ev(forms.delta3_plus(order).series),
        delta14=ev(forms.delta3_r(14, order).series),
        j=ev(j_series),
        dj=2j * mpmath.pi * ev(j_series.qderiv()),
        r_values=rv,
    )


def f_k_value(k: int, z, precision_bits: int) -> mpc:
    """(Delta3+)^l Delta3,r at z."""
    d = _basis.decompose(k)
    fv = form_values(z, [d.r], precision_bits)
    return fv.delta**d.ell * fv.r_values[d.r]


# -- the integrand --------------------------------------------------------


class _GEvaluator:
    """G(., z) with the z-side factors computed once."""

    def __init__(self, z, k, m, precision_bits, order=None):
        self.z = mpmath.mpmathify(z)
        self.k, self.m = k, m
        self.d = _basis.decompose(k)
        self.bits = precision_bits
        self.order = order
        zv = form_values(self.z, [self.d.r], precision_bits)
        self.fk_z = zv.delta**self.d.ell * zv.r_values[self.d.r]
        self.j_z = zv.j

    def __call__(self, tau, form: str = "product") -> mpc:
        tau = mpmath.mpmathify(tau)
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half-plane")
        d = self.d
        rs = [d.r, 14 - d.r] if form == "ratio" else [14 - d.r] if form == "product" else [d.r]
        tv = form_values(tau, rs, self.bits, self.order)
        diff = tv.j - self.j_z
        if abs(diff) < POLE_TOL:
            raise PoleProximity(f"pole proximity: |j3+(tau) - j3+(z)| = {mpmath.nstr(abs(diff), 5)}")
        ex = mpmath.expjpi(-2 * self.m * tau)
        if form == "product":
            # Delta3,r(tau) Delta3,14-r(tau) = Delta3,14(tau), so Delta3,r(tau) never appears in a denominator
            return ex * self.fk_z * tv.r_values[14 - d.r] / (tv.delta ** (d.ell + 1) * diff)
        fk_tau = tv.delta**d.ell * tv.r_values[d.r]
        if form == "ratio":
            return ex * (self.fk_z / fk_tau) * (tv.delta14 / tv.delta) / diff
        if form == "derivative":
            return ex / (-2j * mpmath.pi) * (self.fk_z / fk_tau) * tv.dj / diff
        raise ValueError(f"unknown form {form!r}")


def G(tau, z, k: int, m: int, trunc_order: int | None = None, precision_bits: int = DEFAULT_CONTOUR_BITS, form: str = "product") -> mpc:
    """The integrand; ``form`` is 'product', 'ratio' or 'derivative' (dj3+/dtau in place of Delta3,14/Delta3+)."""
    with mpmath.workprec(precision_bits):
        return _GEvaluator(z, k, m, precision_bits, trunc_order)(tau, form)


def _g_chunk(args):
    z, k, m, bits, order, taus = args
    with mpmath.workprec(bits):
        g = _GEvaluator(z, k, m, bits, order)
        return [g(t) for t in taus]


@dataclass(frozen=True)
class Quadrature:
    value: mpc
    half_value: mpc
    mean_abs: mpf
    nodes: int

    @property
    def doubling_error(self):
        return abs(self.value - self.half_value)


def trapezoid(z, k: int, m: int, cfg: ContourConfig) -> Quadrature:
    """Periodic trapezoid rule on Re tau in [-1/2, 1/2] at Im tau = cfg.height, with the half-node sum."""
    n = cfg.quadrature_points
    with mpmath.workprec(cfg.precision_bits):
        h = mpmath.mpf(cfg.height)
        taus = [mpc(mpf(i) / n - mpf(1) / 2, h) for i in range(n)]
        if cfg.jobs > 1:
            size = -(-n // cfg.jobs)
            chunks = [(z, k, m, cfg.precision_bits, cfg.trunc_order, taus[i : i + size]) for i in range(0, n, size)]
            with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
                vals = [v for part in ex.map(_g_chunk, chunks) for v in part]
        else:
            vals = _g_chunk((z, k, m, cfg.precision_bits, cfg.trunc_order, taus))
        full = mpmath.fsum(vals) / n
        half = mpmath.fsum(vals[::2]) / (n // 2)
        mean_abs = mpmath.fsum(abs(v) for v in vals) / n
        return Quadrature(full, half, mean_abs, n)


def line_integral(z, k: int, m: int, cfg: ContourConfig) -> mpc:
    q = trapezoid(z, k, m, cfg)
    if q.doubling_error > cfg.tolerance * q.mean_abs:
        raise QuadratureNotConverged(
            f"quadrature not converged: {q.nodes} vs {q.nodes // 2} nodes differ by "
            f"{mpmath.nstr(q.doubling_error / q.mean_abs, 5)} (relative to mean |G|)"
        )
    return q.value


# -- residues -------------------------------------------------------------


def residue(z, k: int, m: int, c, d, tau0=None) -> mpc:
    """Res of G(., z) at tau0 = gamma z where (cz + d) is gamma's automorphy factor."""
    z = mpmath.mpmathify(z)
    if tau0 is None:
        raise ValueError("tau0 required")
    return mpmath.expjpi(-2 * m * tau0) / (-2j * mpmath.pi * (c * z + d) ** k)


def residues_main(z, k: int, m: int) -> tuple[mpc, mpc]:
    """Residues at tau = z and tau = -1/(3z)."""
    z = mpmath.mpmathify(z)
    r_z = mpmath.expjpi(-2 * m * z) / (-2j * mpmath.pi)
    r_w = mpmath.expjpi(-2 * m * (-1 / (3 * z))) / (-2j * mpmath.pi * (mpmath.sqrt(3) * z) ** k)
    return r_z, r_w


def extra_poles(z):
    """(tau0, automorphy factor) for the four extra poles crossed at height 0.15, as (B pair, C pair)."""
    z = mpmath.mpmathify(z)
    s3 = mpmath.sqrt(3)
    b = [(z / (3 * z + 1), 3 * z + 1), (-1 / (3 * z + 3), (3 * z + 3) / s3)]
    c = [((-z - 1) / (3 * z + 2), 3 * z + 2), ((3 * z + 1) / (6 * z + 3), (6 * z + 3) / s3)]
    return b, c


def _norm(theta, k: int, m: int):
    theta = mpmath.mpmathify(theta)
    return mpmath.exp(-2 * mpmath.pi * m * mpmath.sin(theta) / mpmath.sqrt(3)) * mpmath.expj(k * theta / 2)


def correction_terms_from_residues(theta, k: int, m: int) -> tuple[mpf, mpf]:
    theta = mpmath.mpmathify(theta)
    z = arc.arc_point(theta)
    nm = _norm(theta, k, m)
    out = []
    for pair in extra_poles(z):
        s = mpmath.fsum(mpmath.expjpi(-2 * m * t0) / (-2j * mpmath.pi * fac**k) for t0, fac in pair)
        out.append(-nm * 2j * mpmath.pi * s)
    return out[0], out[1]


def correction_terms(theta, k: int, m: int, minus_c_phase: bool = False) -> tuple[mpf, mpf]:
    """Closed forms of B_{k,m}(theta) and C_{k,m}(theta).

    The pole (-z-1)/(3z+2) behind C has negative real part, so its phase is
    k theta/2 + 2 pi m R_C; ``minus_c_phase`` uses the minus sign instead,
    which keeps the majorant 2|w| but changes C = 2 Re w.
    """
    theta = mpmath.mpmathify(theta)
    s3 = mpmath.sqrt(3)
    sn, cs = mpmath.sin(theta), mpmath.cos(theta)
    out = []
    c_sign = -1 if minus_c_phase else 1
    for a, num, den, shift, sign in (
        (4 + 2 * s3 * cs, s3 + cs, 4 * s3 + 6 * cs, 1, -1),
        (7 + 4 * s3 * cs, 3 * s3 + 5 * cs, 7 * s3 + 12 * cs, 2, c_sign),
    ):
        damp = mpmath.exp(-2 * mpmath.pi * m / s3 * (sn - sn / a))
        phase = k * theta / 2 + sign * 2 * mpmath.pi * m * num / den
        w = mpmath.expj(phase) * (s3 * mpmath.expj(theta) + shift) ** (-k)
        # the second summand is the conjugate of the first
        out.append(damp * 2 * w.real)
    return out[0], out[1]


def pole_inventory(theta, precision_bits: int = DEFAULT_CONTOUR_BITS) -> list[dict]:
    """Extra poles for an arc point: location, height and |j3+(tau0) - j3+(z)|."""
    with mpmath.workprec(precision_bits):
        z = arc.arc_point(theta)
        jz = arc.j3_value(z, precision_bits)
        out = []
        for label, pair in zip("BC", extra_poles(z)):
            for t0, _ in pair:
                jt = arc.j3_value(t0, precision_bits)
                out.append({"term": label, "tau": t0, "height": t0.imag, "j_gap": abs(jt - jz)})
        return out


# -- the identity ---------------------------------------------------------


@dataclass(frozen=True)
class IdentityResult:
    theta: mpf
    k: int
    m: int
    regime: str
    lhs: mpf
    rhs: mpc
    integral: mpc
    residues: mpc
    B: mpf
    C: mpf
    nodes: int
    quadrature_error: mpf

    @property
    def residual(self):
        """|LHS - RHS| relative to max(1, |LHS|)."""
        return abs(self.lhs - self.rhs) / max(1, abs(self.lhs))

    def to_json(self) -> dict:
        s = lambda x: mpmath.nstr(x, 25)
        return {
            "k": self.k,
            "m": self.m,
            "theta": s(self.theta),
            "regime": self.regime,
            "lhs": s(self.lhs),
            "rhs": {"re": s(self.rhs.real), "im": s(self.rhs.imag)},
            "residual": mpmath.nstr(self.residual, 5),
            "parts": {
                "integral": {"re": s(self.integral.real), "im": s(self.integral.imag)},
                "residues": {"re": s(self.residues.real), "im": s(self.residues.imag)},
                "B": s(self.B),
                "C": s(self.C),
            },
            "nodes": self.nodes,
            "quadrature_error": mpmath.nstr(self.quadrature_error, 5),
        }


def identity_check(
    theta,
    k: int,
    m: int,
    regime: str,
    cfg: ContourConfig | None = None,
    basis_form: _basis.BasisForm | None = None,
    cache: _basis.BasisCache | None = None,
) -> IdentityResult:
    """Compare h(theta) - 2 cos(alpha) from the q-expansion with the contour side."""
    height, lo, hi = _regime(regime)
    if cfg is None:
        cfg = ContourConfig(height=height)
    elif cfg.height != height:
        raise ValueError(f"regime {regime!r} uses height {height}, config has {cfg.height}")
    bits = cfg.precision_bits
    with mpmath.workprec(bits):
        theta = mpmath.mpmathify(theta)
        if not (lo - 1e-12 <= theta <= hi(m) + 1e-12):
            raise ValueError(f"theta={mpmath.nstr(theta, 8)} outside the {regime} regime")
        b = basis_form if basis_form is not None else arc.prepare(k, m, bits, cache)
        sample = arc.normalized_value(b, theta, bits)
        lhs = sample.h_value - 2 * mpmath.cos(sample.alpha)
        z = arc.arc_point(theta)
        nm = _norm(theta, k, m)
        q = trapezoid(z, k, m, cfg)
        if q.doubling_error > cfg.tolerance * q.mean_abs:
            raise QuadratureNotConverged(
                f"quadrature not converged at theta={mpmath.nstr(theta, 8)}: "
                f"{mpmath.nstr(q.doubling_error / q.mean_abs, 5)}"
            )
        r_z, r_w = residues_main(z, k, m)
        res_part = -nm * 2j * mpmath.pi * (r_z + r_w)
        if regime == "high":
            bb, cc = correction_terms(theta, k, m)
        else:
            bb, cc = mpf(0), mpf(0)
        rhs = nm * q.value + bb + cc
        return IdentityResult(theta, k, m, regime, lhs, rhs, nm * q.value, res_part, bb, cc, q.nodes, nm * q.doubling_error)


# -- envelopes for the correction terms ----------------------------------


def envelope_functions(theta) -> tuple[mpf, mpf]:
    """(g, h_env): the m-th roots of the majorants of |B|/2 and |C|/2 at |k|/m = 2/3."""
    theta = mpmath.mpmathify(theta)
    s3 = mpmath.sqrt(3)
    sn, cs = mpmath.sin(theta), mpmath.cos(theta)
    out = []
    for a in (4 + 2 * s3 * cs, 7 + 4 * s3 * cs):
        out.append(mpmath.exp(-2 * mpmath.pi / s3 * (sn - sn / a)) * mpmath.cbrt(a))
    return out[0], out[1]


def _bracket_terms(theta):
    s3 = mpmath.sqrt(3)
    sn, cs = mpmath.sin(theta), mpmath.cos(theta)
    a = 4 + 2 * s3 * cs
    b = 7 + 4 * s3 * cs
    g1 = sn / a * (2 * s3 * mpmath.pi * sn / a - 1)
    g2 = -mpmath.pi * cs * (3 + 2 * s3 * cs) / a
    h1 = 2 * sn / b * (2 * s3 * mpmath.pi * sn / b - 1)
    h2 = -mpmath.pi * cs * (6 + 4 * s3 * cs) / b
    return (g1, g2), (h1, h2)


def envelope_derivatives(theta) -> tuple[mpf, mpf]:
    """Closed-form (g', h_env')."""
    theta = mpmath.mpmathify(theta)
    g, h = envelope_functions(theta)
    (g1, g2), (h1, h2) = _bracket_terms(theta)
    c = 2 / mpmath.sqrt(3)
    return c * g * (g1 + g2), c * h * (h1 + h2)


def envelope_derivative_floor() -> tuple[mpf, mpf]:
    """Lower bounds for g', h_env' on (5 pi/6 - 12/575, 5 pi/6): the value at the left
    end times the first bracket term, both increasing there."""
    t0 = 5 * mpmath.pi / 6 - mpf(12) / 575
    g, h = envelope_functions(t0)
    (g1, _), (h1, _) = _bracket_terms(t0)
    c = 2 / mpmath.sqrt(3)
    return c * g * g1, c * h * h1
