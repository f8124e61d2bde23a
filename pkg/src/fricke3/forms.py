"""Named forms for the Fricke group of level 3 as exact q-expansions.

Everything here is built from eta products and Eisenstein series:

    Delta3+   = (eta(z) eta(3z))^12                       weight 12, q^2 + ...
    E_k^+     = (E_k(z) + 3^(k/2) E_k(3z)) / (1 + 3^(k/2))
    j3+       = (eta(z)/eta(3z))^12 + 12 + 3^6 (eta(3z)/eta(z))^12
    Delta3,r  = the unique weight-r holomorphic form q^eps + O(q^(eps+1))
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from .qseries import LaurentSeries, dilate, eta_product, inverse, mul, pow_int

log = logging.getLogger(__name__)

SUPPORTED_R = (0, 4, 6, 8, 10, 14)
EISENSTEIN_PLUS_WEIGHTS = (4, 6, 8, 10, 14)

# Printed scalar in front of each product-minus-Eisenstein combination.
DELTA_R_CONSTANTS = {
    8: Fraction(41, 1728),
    10: Fraction(61, 432),
    14: Fraction(-22427, 272160),
}
DELTA_R_FACTORS = {8: (4, 4, 8), 10: (4, 6, 10), 14: (6, 8, 14)}

# Sign applied on top of DELTA_R_CONSTANTS to reach leading coefficient +1;
# filled in lazily by delta3_r and exposed for reporting.
NORMALIZATION_SIGNS: dict[int, int] = {}


@dataclass(frozen=True)
class NamedForm:
    label: str
    weight: int
    series: LaurentSeries
    exponent_offset: Fraction = field(default=Fraction(0))

    def __getitem__(self, n):
        return self.series[n]


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """B_n with B_1 = -1/2, from sum_{j<=n} C(n+1, j) B_j = 0."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return Fraction(1)
    if n > 1 and n % 2:
        return Fraction(0)
    s = sum(comb(n + 1, j) * bernoulli(j) for j in range(n))
    return -s / (n + 1)


def sigma(k: int, n: int) -> int:
    """Sum of d^k over the positive divisors d of n."""
    if n < 1:
        raise ValueError("sigma needs n >= 1")
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            e = n // d
            total += d**k
            if e != d:
                total += e**k
        d += 1
    return total


def _check_eisenstein_weight(k):
    if k % 2 or k < 4:
        raise ValueError(f"Eisenstein series need even weight k >= 4, got {k}")


def eisenstein(k: int, order: int) -> NamedForm:
    _check_eisenstein_weight(k)
    c = -Fraction(2 * k) / bernoulli(k)
    coeffs = [Fraction(1)] + [c * sigma(k - 1, n) for n in range(1, order + 1)]
    return NamedForm(f"E{k}", k, LaurentSeries(0, coeffs, order))


def eisenstein_plus(k: int, order: int) -> NamedForm:
    _check_eisenstein_weight(k)
    return _memo(("E+", k), order, lambda n: _eisenstein_plus(k, n))


def _eisenstein_plus(k, order):
    e = eisenstein(k, order).series
    w = 3 ** (k // 2)
    s = (e + dilate(e, 3).truncate(order) * w) * Fraction(1, 1 + w)
    return NamedForm(f"E{k}+", k, s)


def s_coefficient(k: int, n: int) -> Fraction:
    """Closed-form n-th Fourier coefficient of E_k^+."""
    if k not in EISENSTEIN_PLUS_WEIGHTS:
        raise ValueError(f"s_coefficient supports k in {EISENSTEIN_PLUS_WEIGHTS}, got {k}")
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return Fraction(1)
    w = 3 ** (k // 2)
    c = -Fraction(1, 1 + w) * Fraction(2 * k) / bernoulli(k)
    if n % 3:
        return c * sigma(k - 1, n)
    return c * (sigma(k - 1, n) + w * sigma(k - 1, n // 3))


def delta3_plus(order: int) -> NamedForm:
    if order < 2:
        raise ValueError("Delta3+ needs order >= 2")
    return _memo(("Delta3+", None), order, _delta3_plus)


def _delta3_plus(order):
    m = order - 2
    core = pow_int(mul(eta_product(1, m), eta_product(3, m)), 12)
    return NamedForm("Delta3+", 12, core.shift(2))


def eta_quotient_pair(order: int) -> tuple[LaurentSeries, LaurentSeries]:
    """(sum a_n q^n, sum b_n q^n) with eta(z)/eta(3z) = q^(-1/12) sum a_n q^n
    and eta(3z)/eta(z) = q^(1/12) sum b_n q^n."""
    if order < 0:
        raise ValueError("order must be non-negative")
    a = mul(eta_product(1, order), inverse(eta_product(3, order)))
    return a, inverse(a)


def eta_quotient_forms(order: int) -> tuple[NamedForm, NamedForm]:
    a, b = eta_quotient_pair(order)
    return (
        NamedForm("eta/eta3", 0, a, Fraction(-1, 12)),
        NamedForm("eta3/eta", 0, b, Fraction(1, 12)),
    )


def j3_plus(order: int) -> NamedForm:
    if order < 0:
        raise ValueError("order must be non-negative")
    return _memo(("j3+", None), order, _j3_plus)


def _j3_plus(order):
    a, b = eta_quotient_pair(order + 1)
    up = pow_int(a, 12).shift(-1)
    down = pow_int(b, 12).shift(1)
    j = (up + down * 729 + 12).truncate(order)
    return NamedForm("j3+", 0, j)


def delta3_r(r: int, order: int) -> NamedForm:
    if r not in SUPPORTED_R:
        raise ValueError(f"r must be one of {SUPPORTED_R}, got {r}")
    return _memo(("Delta3,r", r), order, lambda n: _delta3_r(r, n))


def _delta3_r(r, order):
    if r == 0:
        return NamedForm("Delta3,0", 0, LaurentSeries.one(order))
    if r in (4, 6):
        return NamedForm(f"Delta3,{r}", r, eisenstein_plus(r, order).series)
    k1, k2, k3 = DELTA_R_FACTORS[r]
    prod = mul(eisenstein_plus(k1, order).series, eisenstein_plus(k2, order).series)
    s = (prod - eisenstein_plus(k3, order).series) * DELTA_R_CONSTANTS[r]
    s = s.normalized()
    lead = s.leading_coefficient()
    if s.valuation != 1 or abs(lead) != 1:
        raise ArithmeticError(f"Delta3,{r} combination does not start with +-q (got {lead} q^{s.valuation})")
    if lead < 0:
        s = -s
    if NORMALIZATION_SIGNS.get(r) != int(lead):
        NORMALIZATION_SIGNS[r] = int(lead)
        if lead < 0:
            log.info("Delta3,%d: printed constant gives leading coefficient -1; negated", r)
    return NamedForm(f"Delta3,{r}", r, s.extend_valuation(0))


def eps_of(r: int) -> int:
    return 1 if r in (8, 10, 14) else 0


# -- memo cache (single writer, many readers) -----------------------------

_cache: dict[tuple, NamedForm] = {}
_cache_lock = threading.RLock()


def _memo(key, order, builder) -> NamedForm:
    hit = _cache.get(key)
    if hit is not None and hit.series.trunc_order >= order:
        if hit.series.trunc_order == order:
            return hit
        return NamedForm(hit.label, hit.weight, hit.series.truncate(order), hit.exponent_offset)
    with _cache_lock:
        hit = _cache.get(key)
        if hit is None or hit.series.trunc_order < order:
            hit = builder(order)
            _cache[key] = hit
    if hit.series.trunc_order == order:
        return hit
    return NamedForm(hit.label, hit.weight, hit.series.truncate(order), hit.exponent_offset)


def clear_cache() -> None:
    with _cache_lock:
        _cache.clear()


def named_form(name: str, order: int, k: int | None = None, r: int | None = None) -> NamedForm:
    """Look a form up by a short name (used by the command line)."""
    key = name.lower().replace("_", "").replace("-", "")
    if key in ("j3plus", "j3+", "j"):
        return j3_plus(order)
    if key in ("delta3plus", "delta3+", "delta"):
        return delta3_plus(order)
    if key in ("delta3r", "deltar"):
        if r is None:
            raise ValueError("delta3r needs r")
        return delta3_r(r, order)
    if key in ("eisenstein", "e"):
        if k is None:
            raise ValueError("eisenstein needs k")
        return eisenstein(k, order)
    if key in ("eisensteinplus", "eplus", "e+"):
        if k is None:
            raise ValueError("eisenstein_plus needs k")
        return eisenstein_plus(k, order)
    raise ValueError(f"unknown form {name!r}")
