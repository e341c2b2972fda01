"""Mirror-symmetric meshes, corner grading and red refinement.

Run:  python3 demos/mesh_symmetric_and_graded.py
"""
import numpy as np

from robin_torsion import CrossPolygon, Ellipse, Grading, mesh_domain, refine

mesh = mesh_domain(Ellipse(2, 1), 0.1)
print(f"ellipse: {mesh.n_nodes} nodes, {mesh.n_tris} triangles, h {mesh.h:.4f}, "
      f"min angle {mesh.min_angle():.1f} deg")

# reflection x2 -> -x2 maps nodes onto nodes exactly
mirrored = mesh.nodes[mesh.reflect] * [1, -1]
print("reflection error:", np.max(np.abs(mirrored - mesh.nodes)))

fine = refine(mesh)
print(f"refined: {fine.n_tris} triangles ({fine.n_tris / mesh.n_tris:.0f}x), h {fine.h:.4f}")

# graded towards the reentrant vertices (+-1, +-1)
cross = CrossPolygon(1.5, 3.0)
flat = mesh_domain(cross, 0.05)
graded = mesh_domain(cross, 0.05, Grading(0.5, 6))
for label, m in [("uniform", flat), ("graded", graded)]:
    print(f"cross {label:8s} {m.n_tris:6d} triangles, local size at (1, 1) "
          f"{m.local_size(np.array([1.0, 1.0])):.5f}")
