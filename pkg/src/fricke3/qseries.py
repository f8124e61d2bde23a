"""Truncated Laurent series in q with exact rational coefficients.

A series is stored as integer numerators over one common positive
denominator, which keeps every ring operation in integer arithmetic.
Products of long series go through Kronecker substitution (pack the
coefficient vector into one big integer, multiply once, unpack), so the
cost is a single big-integer multiplication rather than a quadratic loop.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Iterable, Sequence

try:
    import gmpy2

    _mpz = gmpy2.mpz
except ImportError:  # pragma: no cover
    gmpy2 = None
    _mpz = int

__all__ = [
    "LaurentSeries",
    "add",
    "mul",
    "inverse",
    "pow_int",
    "dilate",
    "eta_product",
    "NonInvertibleSeries",
]

_SCHOOLBOOK_CUTOFF = 24


class NonInvertibleSeries(ZeroDivisionError):
    pass


# -- integer convolution --------------------------------------------------


def _schoolbook(a: Sequence[int], b: Sequence[int], length: int) -> list[int]:
    out = [0] * length
    for i, x in enumerate(a[:length]):
        if not x:
            continue
        for j, y in enumerate(b[: length - i]):
            out[i + j] += x * y
    return out


def _pack(vals: Sequence[int], nbytes: int) -> int:
    pos = b"".join((v if v > 0 else 0).to_bytes(nbytes, "little") for v in vals)
    neg = b"".join((-v if v < 0 else 0).to_bytes(nbytes, "little") for v in vals)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _unpack(packed: int, count: int, nbytes: int) -> list[int]:
    half = 1 << (8 * nbytes - 1)
    bias = int.from_bytes((b"\x00" * (nbytes - 1) + b"\x80") * count, "little")
    raw = (packed + bias).to_bytes(count * nbytes, "little")
    return [
        int.from_bytes(raw[i : i + nbytes], "little") - half
        for i in range(0, count * nbytes, nbytes)
    ]


def convolve(a: Sequence[int], b: Sequence[int], length: int | None = None) -> list[int]:
    """First ``length`` coefficients of the product of two integer polynomials."""
    full = len(a) + len(b) - 1
    if length is None:
        length = full
    if not a or not b or length <= 0:
        return [0] * max(length, 0)
    a = list(a[:length])
    b = list(b[:length])
    if min(len(a), len(b)) <= _SCHOOLBOOK_CUTOFF:
        return _schoolbook(a, b, length)
    abits = max(abs(x) for x in a).bit_length()
    bbits = max(abs(x) for x in b).bit_length()
    if abits == 0 or bbits == 0:
        return [0] * length
    bits = abits + bbits + min(len(a), len(b)).bit_length() + 2
    nbytes = (bits + 7) // 8
    prod = int(_mpz(_pack(a, nbytes)) * _mpz(_pack(b, nbytes)))
    count = len(a) + len(b) - 1
    out = _unpack(prod, count, nbytes)[:length]
    out.extend([0] * (length - len(out)))
    return out


def _inverse_unit(w: Sequence[int], length: int) -> list[int]:
    # Newton iteration g <- g(2 - w g); w[0] must be 1.
    g = [1]
    prec = 1
    while prec < length:
        prec = min(2 * prec, length)
        e = convolve(w[:prec], g, prec)
        e = [-x for x in e]
        e[0] += 2
        g = convolve(g, e, prec)
    return g[:length]


# -- the series type ------------------------------------------------------


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"exact rational required, got {type(x).__name__}")


class LaurentSeries:
    """``sum_{n=valuation}^{trunc_order} c_n q^n + O(q^(trunc_order+1))``.

    Immutable. ``coeffs[i]`` is the coefficient of ``q^(valuation+i)``.
    """

    __slots__ = ("valuation", "trunc_order", "_nums", "_den", "_coeffs")

    def __init__(self, valuation: int, coeffs: Iterable, trunc_order: int | None = None):
        fr = [_as_fraction(c) for c in coeffs]
        if trunc_order is None:
            trunc_order = valuation + len(fr) - 1
        den = reduce(math.lcm, (c.denominator for c in fr), 1)
        nums = [c.numerator * (den // c.denominator) for c in fr]
        self._init(int(valuation), nums, den, int(trunc_order))

    @classmethod
    def from_numerators(cls, valuation: int, nums: Sequence[int], trunc_order: int, den: int = 1):
        obj = cls.__new__(cls)
        obj._init(valuation, list(nums), den, trunc_order)
        return obj

    def _init(self, valuation, nums, den, trunc_order):
        length = trunc_order - valuation + 1
        if length < 1:
            raise ValueError("valuation must not exceed trunc_order")
        if len(nums) < length:
            nums = nums + [0] * (length - len(nums))
        elif len(nums) > length:
            nums = nums[:length]
        if den <= 0:
            raise ValueError("denominator must be positive")
        g = reduce(math.gcd, nums, den)
        if g > 1:
            nums = [x // g for x in nums]
            den //= g
        self.valuation = valuation
        self.trunc_order = trunc_order
        self._nums = tuple(nums)
        self._den = den
        self._coeffs = None

    # constructors
    @classmethod
    def one(cls, trunc_order: int) -> "LaurentSeries":
        return cls.monomial(0, 1, trunc_order)

    @classmethod
    def zero(cls, trunc_order: int) -> "LaurentSeries":
        return cls.from_numerators(trunc_order, [0], trunc_order)

    @classmethod
    def monomial(cls, exponent: int, coeff, trunc_order: int) -> "LaurentSeries":
        c = _as_fraction(coeff)
        nums = [0] * (trunc_order - exponent + 1)
        nums[0] = c.numerator
        return cls.from_numerators(exponent, nums, trunc_order, c.denominator)

    # views
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        if self._coeffs is None:
            d = self._den
            self._coeffs = tuple(Fraction(n, d) for n in self._nums)
        return self._coeffs

    @property
    def numerators(self) -> tuple[int, ...]:
        return self._nums

    @property
    def denominator(self) -> int:
        return self._den

    @property
    def is_integral(self) -> bool:
        return self._den == 1

    def __len__(self) -> int:
        return len(self._nums)

    def __getitem__(self, n: int) -> Fraction:
        """Coefficient of ``q^n``; raises if ``n`` is past the truncation order."""
        if n > self.trunc_order:
            raise IndexError(f"coefficient of q^{n} is beyond truncation order {self.trunc_order}")
        if n < self.valuation:
            return Fraction(0)
        return Fraction(self._nums[n - self.valuation], self._den)

    def items(self):
        for i, c in enumerate(self.coeffs):
            yield self.valuation + i, c

    def true_valuation(self) -> int | None:
        for i, x in enumerate(self._nums):
            if x:
                return self.valuation + i
        return None

    def normalized(self) -> "LaurentSeries":
        v = self.true_valuation()
        if v is None or v == self.valuation:
            return self
        return self.from_numerators(v, self._nums[v - self.valuation :], self.trunc_order, self._den)

    def leading_coefficient(self) -> Fraction:
        v = self.true_valuation()
        return Fraction(0) if v is None else self[v]

    def truncate(self, n: int) -> "LaurentSeries":
        if n > self.trunc_order:
            raise ValueError(f"cannot extend truncation order {self.trunc_order} to {n}")
        return self.from_numerators(self.valuation, self._nums[: n - self.valuation + 1], n, self._den)

    def extend_valuation(self, v: int) -> "LaurentSeries":
        """Same series with explicit zero coefficients down to ``q^v``."""
        if v >= self.valuation:
            return self
        return self.from_numerators(v, [0] * (self.valuation - v) + list(self._nums), self.trunc_order, self._den)

    def shift(self, s: int) -> "LaurentSeries":
        """Multiply by ``q^s`` exactly."""
        return self.from_numerators(self.valuation + s, self._nums, self.trunc_order + s, self._den)

    def scale(self, c) -> "LaurentSeries":
        c = _as_fraction(c)
        return self.from_numerators(
            self.valuation, [x * c.numerator for x in self._nums], self.trunc_order, self._den * c.denominator
        )

    def qderiv(self) -> "LaurentSeries":
        """``q d/dq`` applied termwise."""
        v = self.valuation
        return self.from_numerators(v, [(v + i) * x for i, x in enumerate(self._nums)], self.trunc_order, self._den)

    # ring operations
    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            try:
                other = LaurentSeries.monomial(0, other, self.trunc_order)
            except TypeError:
                return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return self.from_numerators(self.valuation, [-x for x in self._nums], self.trunc_order, self._den)

    def __sub__(self, other):
        if not isinstance(other, LaurentSeries):
            try:
                other = LaurentSeries.monomial(0, other, self.trunc_order)
            except TypeError:
                return NotImplemented
        return add(self, -other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            return mul(self, other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LaurentSeries):
            return mul(self, inverse(other))
        return self.scale(1 / _as_fraction(other))

    def __pow__(self, e: int):
        return pow_int(self, e)

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        if self.trunc_order != other.trunc_order or self._den != other._den:
            return False
        v = min(self.valuation, other.valuation)
        return self.extend_valuation(v)._nums == other.extend_valuation(v)._nums

    def __hash__(self):
        a = self.normalized()
        return hash((a.valuation, a.trunc_order, a._nums, a._den))

    def agrees_with(self, other: "LaurentSeries", order: int | None = None) -> bool:
        """Coefficient equality up to ``q^order`` (default: common truncation)."""
        n = min(self.trunc_order, other.trunc_order) if order is None else order
        return self.truncate(n) == other.truncate(n)

    def __repr__(self):
        terms = []
        for n, c in list(self.items())[:6]:
            if c:
                terms.append(f"{c}*q^{n}")
        body = " + ".join(terms) if terms else "0"
        return f"LaurentSeries({body} + ... + O(q^{self.trunc_order + 1}))"

    # serialization
    def to_json(self) -> dict:
        return {
            "valuation": self.valuation,
            "trunc_order": self.trunc_order,
            "coeffs": [str(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LaurentSeries":
        return cls(int(data["valuation"]), [Fraction(s) for s in data["coeffs"]], int(data["trunc_order"]))


# -- module-level operations ----------------------------------------------


def add(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    n = min(a.trunc_order, b.trunc_order)
    v = min(a.valuation, b.valuation, n)
    den = math.lcm(a._den, b._den)
    fa, fb = den // a._den, den // b._den
    nums = [0] * (n - v + 1)
    for src, f in ((a, fa), (b, fb)):
        off = src.valuation - v
        for i, x in enumerate(src._nums[: n - src.valuation + 1]):
            nums[off + i] += x * f
    return LaurentSeries.from_numerators(v, nums, n, den)


def mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    a, b = a.normalized(), b.normalized()
    v = a.valuation + b.valuation
    n = min(a.trunc_order + b.valuation, b.trunc_order + a.valuation)
    nums = convolve(a._nums, b._nums, n - v + 1)
    return LaurentSeries.from_numerators(v, nums, n, a._den * b._den)


def inverse(a: LaurentSeries) -> LaurentSeries:
    a = a.normalized()
    lead = a._nums[0]
    if lead == 0:
        raise NonInvertibleSeries("non-invertible series")
    v = a.valuation
    n = a.trunc_order - 2 * v
    length = n + v + 1
    c = abs(lead)
    sign = 1 if lead > 0 else -1
    # W(y) = A(c y)/lead is integral with W(0) = 1, and 1/A(x) = (1/lead) W^{-1}(x/c)
    u = a._nums[:length]
    if c == 1:
        w = [sign * x for x in u]
        g = _inverse_unit(w, length)
        return LaurentSeries.from_numerators(-v, [sign * a._den * gi for gi in g], n, 1)
    w = [1] + [sign * x * c ** (i - 1) for i, x in enumerate(u) if i]
    g = _inverse_unit(w, length)
    # 1/a = den * sign * sum g_i x^i / c^(i+1), over the common denominator c^length
    nums = [sign * a._den * gi * c ** (length - 1 - i) for i, gi in enumerate(g)]
    return LaurentSeries.from_numerators(-v, nums, n, c**length)


def pow_int(a: LaurentSeries, e: int) -> LaurentSeries:
    if e < 0:
        return pow_int(inverse(a), -e)
    a = a.normalized()
    result = None
    base = a
    while e:
        if e & 1:
            result = base if result is None else mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    if result is None:
        return LaurentSeries.one(a.trunc_order - a.valuation)
    return result


def dilate(a: LaurentSeries, t: int) -> LaurentSeries:
    """Substitute ``q -> q^t``."""
    if t < 1:
        raise ValueError("dilation factor must be a positive integer")
    if t == 1:
        return a
    nums = [0] * (t * (len(a._nums) - 1) + 1)
    nums[::t] = a._nums
    return LaurentSeries.from_numerators(t * a.valuation, nums, t * a.trunc_order, a._den)


def pentagonal_terms(limit: int) -> Iterable[tuple[int, int]]:
    """(exponent, sign) pairs of ``prod (1-q^n)`` with exponent <= limit."""
    yield 0, 1
    n = 1
    while True:
        e1 = n * (3 * n - 1) // 2
        if e1 > limit:
            break
        s = -1 if n % 2 else 1
        yield e1, s
        e2 = n * (3 * n + 1) // 2
        if e2 <= limit:
            yield e2, s
        n += 1


def eta_product(t: int, order: int) -> LaurentSeries:
    """``prod_{n>=1} (1 - q^(t n))`` modulo ``q^(order+1)``, without the q^(t/24) prefactor."""
    if order < 0:
        raise ValueError("order must be non-negative")
    if t < 1:
        raise ValueError("t must be a positive integer")
    nums = [0] * (order + 1)
    for e, s in pentagonal_terms(order // t):
        nums[t * e] = s
    return LaurentSeries.from_numerators(0, nums, order)
