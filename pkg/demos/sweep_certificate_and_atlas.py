"""Continuity certificate along a deformation path and a small cross atlas.

Run:  python3 demos/sweep_certificate_and_atlas.py [outdir]
"""
import sys
import tempfile
from pathlib import Path

from robin_torsion import Disk, Ellipse, atlas, build_family, certify_path, cross_grid

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())

# Monotonicity at every t on the path disk -> ellipse.  9 points is the
# minimum; the acceptance run uses 17.
cert = certify_path(build_family(Disk(), Ellipse(2, 1), 1.0), n_t=9, h=0.05)
print(f"certificate {cert.status.upper()}, min margin {cert.min_margin:.4f}")
for p in cert.points:
    print(f"  t {p['t']:.3f}  {p['verdict']:9s} margin {p['margin']:.4f}  "
          f"2 tau {2 * p['threshold']:.4f}  A2 margin {p['A2_margin']:.3f}")

# Coarse atlas over cross shapes.  Records are sorted by key, so the file
# is the same for any worker count, and a rerun resumes from the store.
# At h = 0.1 the verdicts stay inconclusive; the sign of c1 already
# separates a < b from a > b.
grid = cross_grid([1.5, 2.0], [1.5, 2.0, 3.0], h=0.1, grading=(0.5, 3))
recs = atlas(grid, out / "atlas.jsonl", workers=2)
for r in recs:
    d = r.params["domain"]
    print(f"  a={d['a']} b={d['b']}  x2: {r.verdict:12s} x1: {r.verdict_x1:12s} "
          f"c1 {r.c1:+.4f}")
print("records in", out / "atlas.jsonl", "and", out / "atlas.csv")
