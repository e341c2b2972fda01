"""Fit the corner expansion at the reentrant vertex (1, 1).

u ~ c0 B0 + c1 r^(2/3) cos(2 theta/3) + ... near the vertex.  The square
cross has c1 = 0 by the diagonal swap symmetry; a tall cross has c1 < 0,
and the sign of c1 fixes the sign of d2 u next to the corner.

Run:  python3 demos/corners_singular_coefficient.py
"""
import numpy as np

from robin_torsion import CrossPolygon, Grading, RobinProblem, fit_corner, mesh_domain, solve
from robin_torsion.corners import CornerFrame, asymptote_vs_field, fit_samples, synthetic_field

# synthetic field: the fitter recovers the coefficients to roundoff
rng = np.random.default_rng(7)
coef = rng.uniform(-10, 10, 4)
r = np.sqrt(rng.uniform(0.02 ** 2, 0.25 ** 2, 1500))
theta = rng.uniform(-1.5 * np.pi, 0.0, 1500)
pts = CornerFrame().point(r, theta)
fit = fit_samples(pts, synthetic_field(coef, 1.0)(pts), 1.0, 0.02, 0.25)
print("synthetic coefficient error", np.max(np.abs(fit.coefficients - coef)))

grading = Grading(0.5, 8)
for a, b in [(2.0, 2.0), (1.5, 2.0), (1.5, 3.0)]:
    sol = solve(RobinProblem(mesh_domain(CrossPolygon(a, b), 0.05, grading), 1.0))
    fit = fit_corner(sol)
    print(f"a={a} b={b}: c0 {fit.c0:+.4f}  c1 {fit.c1:+.4f} +- {fit.stderr[1]:.1e}  "
          f"annulus [{fit.r_min:.3f}, {fit.r_max:.3f}]")

# leading-order derivative against the finite element field on the tall cross
table = asymptote_vs_field(sol, fit, [0.05, 0.1, 0.2])
print("   r     d1u fem   d2u fem   d1u pred  d2u pred")
for r, _, *g in table["rows"]:
    print(f"  {r:4.2f}  " + "  ".join(f"{v:+8.3f}" for v in g))
