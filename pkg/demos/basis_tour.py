"""Build a few canonical basis elements and show their exact shape.

    python demos/basis_tour.py
"""

from fricke3 import basis, forms


def show(k, m, terms=8):
    b = basis.build(k, m)
    d = b.decomp
    head = " ".join(f"{int(c):+}q^{n}" for n, c in list(b.series.items())[:terms] if c)
    print(f"f_({k},{m}): l={d.ell} r={d.r} eps={d.eps}  F(j) coefficients {list(b.poly)}")
    print(f"    {head} ...")
    print(f"    zero block q^{-m + 1}..q^{d.top}, expected arc zeros {b.expected_zero_count}")


if __name__ == "__main__":
    j = forms.j3_plus(6).series
    print("j3+ =", " ".join(f"{int(c):+}q^{n}" for n, c in j.items() if c), "...")
    for k, m in [(0, 2), (4, 3), (12, 0), (14, 1), (-12, 3)]:
        show(k, m)
    b = basis.build(8, 6)
    print("uniqueness re-solve for f_(8,6):", basis.uniqueness_check(b))
