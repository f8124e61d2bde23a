"""Locate the zeros of f_(k,m) on the arc and compare them with the cosine model.

h(theta) stays within 2 of 2 cos(alpha(theta)) away from the corner, so each
zero sits next to a point where alpha crosses pi/2 + n pi.

    python demos/arc_zeros.py [k m]
"""

import sys

import mpmath

from fricke3 import arc

if __name__ == "__main__":
    k, m = (int(sys.argv[1]), int(sys.argv[2])) if len(sys.argv) == 3 else (0, 23)
    bits, grid = 512, 2000
    b = arc.prepare(k, m, bits)
    rep = arc.scan_zeros(b, grid, bits)
    print(f"f_({k},{m}): {rep.found} of {rep.expected_count} zeros, valence audit {arc.valence_audit(b, rep)}")
    print(f"largest relative imaginary residual {mpmath.nstr(rep.max_relative_residual, 3)}")
    worst = max(abs(s.h_value - s.two_cos_alpha) for s in rep.samples if s.theta <= arc.tail_start(m))
    print(f"max |h - 2 cos alpha| before the corner window: {mpmath.nstr(worst, 6)}")
    for i, z in enumerate(rep.zeros):
        a = arc.alpha(z.theta, k, m)
        print(f"  zero {i:2d}: theta = {mpmath.nstr(z.theta, 15)}  cos(alpha) = {mpmath.nstr(mpmath.cos(a), 3):>9}"
              + ("  (corner window)" if z.in_tail else ""))
