"""Boundary curvature, condition A2 and a disk -> ellipse deformation family.

Run:  python3 demos/geometry_curvature_and_families.py
"""
import numpy as np

from robin_torsion import (Disk, Ellipse, Peanut, RoundedCrossPolygon, boundary_trace,
                           build_family, check_condition_A2)

beta = 1.0

# min curvature decides A2: beta >= -min kappa
for name, dom in [("disk", Disk()), ("ellipse 2:1", Ellipse(2, 1)),
                  ("peanut", Peanut.with_min_curvature(-0.5)),
                  ("rounded cross rho=0.1", RoundedCrossPolygon(1.5, 3.0, 0.1))]:
    tr = boundary_trace(dom, 2048)
    a2 = check_condition_A2(beta, tr)
    print(f"{name:24s} length {tr.length:8.4f}  min kappa {np.nanmin(tr.kappa):9.4f}  "
          f"A2 holds {a2.holds}  margin {a2.margin:8.4f}")

# The clockwise trace turns by -2 pi for a smooth boundary.
print("ellipse turning / 2pi =", boundary_trace(Ellipse(2, 1), 1024).turning() / (2 * np.pi))

# Each member of the family must satisfy A2; the check runs along a t-grid.
fam = build_family(Disk(), Ellipse(2, 1), beta)
for t in np.linspace(0, 1, 5):
    dom = fam(float(t))
    a2 = check_condition_A2(beta, boundary_trace(dom, 1024))
    print(f"t = {t:4.2f}  half width {dom.half_width:7.4f}  height {dom.height:7.4f}  "
          f"A2 margin {a2.margin:7.4f}")
