"""Split h(theta) - 2 cos(alpha) into its contour pieces.

Below the line Im tau = 0.35 only the two main poles are crossed. At
Im tau = 0.15 four more appear; their residues give the B and C terms.

    python demos/contour_identity.py
"""

import mpmath

from fricke3 import contour

if __name__ == "__main__":
    for theta, regime in [(1.9, "low"), (2.5, "high")]:
        res = contour.identity_check(theta, 4, 23, regime)
        print(f"theta={theta} ({regime}, height {contour._regime(regime)[0]})")
        print(f"  h - 2cos(alpha)   {mpmath.nstr(res.lhs, 20)}")
        print(f"  line integral     {mpmath.nstr(res.integral.real, 20)}")
        print(f"  B, C              {mpmath.nstr(res.B, 10)}, {mpmath.nstr(res.C, 10)}")
        print(f"  relative residual {mpmath.nstr(res.residual, 3)}")
    print("extra poles at theta = 2.5:")
    for p in contour.pole_inventory(2.5):
        print(f"  {p['term']}: tau = {mpmath.nstr(p['tau'], 8)}, |j(tau) - j(z)| = {mpmath.nstr(p['j_gap'], 3)}")
