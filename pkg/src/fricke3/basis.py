"""Canonical basis f_{k,m} = (Delta3+)^l * Delta3,r * F(j3+).

F is found by an ascending triangular solve: the products
P_i = (Delta3+)^l Delta3,r (j3+)^i start at q^(2l+eps-i) with coefficient 1,
so clearing q^(-m+1), ..., q^(2l+eps) one exponent at a time is a unit
upper-triangular system.
"""

from __future__ import annotations

import glob
import json
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from filelock import FileLock

from . import forms
from .qseries import LaurentSeries, inverse, mul, pow_int

DEFAULT_MARGIN = 40


@dataclass(frozen=True)
class WeightDecomposition:
    k: int
    ell: int
    r: int
    eps: int
    s: int
    t: int

    @property
    def top(self) -> int:
        """Exponent 2l + eps: the last coefficient forced to vanish is q^top."""
        return 2 * self.ell + self.eps

    def min_m(self) -> int:
        return -self.top


def decompose(k: int) -> WeightDecomposition:
    if k % 2:
        raise ValueError(f"weight must be even, got {k}")
    r = {0: 0, 2: 14, 4: 4, 6: 6, 8: 8, 10: 10}[k % 12]
    ell = (k - r) // 12
    s = next(s for s in (0, 1) if (2 * s - k) % 4 == 0)
    t = next(t for t in range(6) if (-2 * t - k) % 12 == 0)
    return WeightDecomposition(k, ell, r, forms.eps_of(r), s, t)


@dataclass(frozen=True)
class BasisForm:
    decomp: WeightDecomposition
    m: int
    poly: tuple[int, ...]
    series: LaurentSeries

    @property
    def k(self) -> int:
        return self.decomp.k

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    @property
    def expected_zero_count(self) -> int:
        return self.decomp.top + self.m

    @property
    def order(self) -> int:
        return self.series.trunc_order

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "m": self.m,
            "order": self.order,
            "poly": [str(c) for c in self.poly],
            "series": self.series.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "BasisForm":
        return cls(
            decompose(int(data["k"])),
            int(data["m"]),
            tuple(int(c) for c in data["poly"]),
            LaurentSeries.from_json(data["series"]),
        )

    def truncate(self, order: int) -> "BasisForm":
        return BasisForm(self.decomp, self.m, self.poly, self.series.truncate(order))


def default_order(k: int, m: int, margin: int = DEFAULT_MARGIN) -> int:
    d = decompose(k)
    return max(m + d.top, 0) + d.top + margin


def _input_order(d: WeightDecomposition, degree: int, order: int) -> int:
    return order + degree + 2 * abs(d.ell) + 6


def _generator_series(d: WeightDecomposition, order: int) -> LaurentSeries:
    delta = forms.delta3_plus(order).series
    dr = forms.delta3_r(d.r, order).series
    if d.ell == 0:
        return dr.normalized()
    base = pow_int(delta, d.ell) if d.ell > 0 else pow_int(inverse(delta), -d.ell)
    return mul(base, dr)


def generator(k: int, order: int | None = None) -> BasisForm:
    """The m = -2l-eps element (Delta3+)^l Delta3,r, with F = 1."""
    d = decompose(k)
    m = d.min_m()
    if order is None:
        order = default_order(k, m)
    s = _generator_series(d, _input_order(d, 0, order))
    return BasisForm(d, m, (1,), s.truncate(order))


def _products(d: WeightDecomposition, degree: int, order: int) -> list[LaurentSeries]:
    n_in = _input_order(d, degree, order)
    j = forms.j3_plus(n_in).series
    p = _generator_series(d, n_in)
    out = [p]
    for _ in range(degree):
        p = mul(p, j)
        out.append(p)
    return out


def build(k: int, m: int, order: int | None = None, cache: "BasisCache | None" = None) -> BasisForm:
    d = decompose(k)
    if m < d.min_m():
        raise ValueError(f"index below basis range: m={m} < {d.min_m()} for k={k}")
    if order is None:
        order = default_order(k, m)
    if order < d.top:
        raise ValueError(f"order {order} does not reach the defining window q^{d.top}")
    if cache is not None:
        hit = cache.get(k, m, order)
        if hit is not None:
            return hit
    b = _solve(d, m, order)
    if cache is not None:
        cache.put(b)
    return b


def _solve(d: WeightDecomposition, m: int, order: int) -> BasisForm:
    degree = d.top + m
    prods = _products(d, degree, order)
    result = prods[degree]
    poly = [Fraction(0)] * degree + [Fraction(1)]
    for e in range(-m + 1, d.top + 1):
        c = result[e]
        if c:
            i = d.top - e
            result = result - prods[i] * c
            poly[i] -= c
    if any(c.denominator != 1 for c in poly):
        raise ArithmeticError(f"non-integral solution for f_({d.k},{m}); construction bug")
    result = result.normalized()
    if result.trunc_order < order:
        raise ArithmeticError(f"order starvation: reached q^{result.trunc_order}, wanted q^{order}")
    series = result.truncate(order)
    b = BasisForm(d, m, tuple(int(c) for c in poly), series)
    check_shape(b)
    return b


def check_shape(b: BasisForm) -> None:
    s = b.series
    if s.valuation != -b.m or s[-b.m] != 1:
        raise ArithmeticError(f"f_({b.k},{b.m}) does not start with q^{-b.m}")
    for e in range(-b.m + 1, b.decomp.top + 1):
        if s[e] != 0:
            raise ArithmeticError(f"f_({b.k},{b.m}) has nonzero coefficient at q^{e}")


def series_from_poly(d: WeightDecomposition, poly, order: int) -> LaurentSeries:
    """f_k * F(j3+) evaluated by Horner in the series ring."""
    n_in = _input_order(d, len(poly) - 1, order)
    j = forms.j3_plus(n_in).series
    acc = LaurentSeries.monomial(0, poly[-1], n_in)
    for c in reversed(poly[:-1]):
        acc = mul(acc, j) + c
    return mul(_generator_series(d, n_in), acc).truncate(order)


def uniqueness_check(b: BasisForm, extra: int = 20) -> bool:
    """Re-solve at higher order and confirm the stored form is the unique solution."""
    poly = b.poly
    if not poly or poly[-1] != 1 or len(poly) - 1 != b.decomp.top + b.m:
        return False
    if not all(isinstance(c, int) for c in poly):
        return False
    try:
        check_shape(b)
    except ArithmeticError:
        return False
    rebuilt = _solve(b.decomp, b.m, b.order + extra)
    if rebuilt.poly != poly or not rebuilt.series.agrees_with(b.series, b.order):
        return False
    # F(j) recomputed directly from the stored polynomial must give the stored series
    return series_from_poly(b.decomp, list(poly), b.order) == b.series


# -- disk cache ------------------------------------------------------------


def default_cache_dir() -> Path:
    env = os.environ.get("FRICKE3_CACHE_DIR")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "fricke3"


class BasisCache:
    """JSON files keyed by (k, m, order); any stored order >= the request is reused."""

    def __init__(self, directory: str | os.PathLike | None = None):
        self.directory = Path(directory) if directory is not None else default_cache_dir()

    def _path(self, k, m, order) -> Path:
        return self.directory / f"basis_k{k}_m{m}_N{order}.json"

    def get(self, k: int, m: int, order: int) -> BasisForm | None:
        if not self.directory.is_dir():
            return None
        best = None
        for p in glob.glob(str(self.directory / f"basis_k{k}_m{m}_N*.json")):
            try:
                n = int(p.rsplit("_N", 1)[1][:-5])
            except ValueError:
                continue
            if n >= order and (best is None or n < best[0]):
                best = (n, p)
        if best is None:
            return None
        try:
            with open(best[1]) as fh:
                b = BasisForm.from_json(json.load(fh))
        except (OSError, ValueError, KeyError):
            return None
        return b if b.order == order else b.truncate(order)

    def put(self, b: BasisForm) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self._path(b.k, b.m, b.order)
        with FileLock(str(path) + ".lock"):
            fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
            with os.fdopen(fd, "w") as fh:
                json.dump(b.to_json(), fh)
            os.replace(tmp, path)
        return path
