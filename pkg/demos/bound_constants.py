"""Recompute the constants behind the arc inequalities on a coarse grid.

The command line runs the full grids: ``fricke3 verify --suite all``.

    python demos/bound_constants.py
"""

import mpmath

from fricke3 import bounds

if __name__ == "__main__":
    reps = bounds.delta3_range("arc_low", 401, 256) + bounds.delta3_range("line_035", 401, 256)
    reps += [bounds.delta_r_sup(reg, r, 401, 256) for r in (4, 14) for reg in ("arc_low", "line_035")]
    reps += [r for part in "ab" for sign in ("nonneg", "neg") for r in bounds.prop24_aggregate(part, sign)]
    for r in reps:
        tag = "agrees" if r.agrees else "differs"
        print(f"{r.name:40s} {r.kind:5s} {r.paper_value:>10s}  computed {mpmath.nstr(r.computed, 8):>12s}  "
              f"{r.status} ({tag})")
