"""Robin torsion solve on the unit disk against the closed-form solution.

u = 1/(2 beta) + (1 - |x|^2)/4.  Each red refinement should cut the nodal
error by about 4 and the boundary gradient error by about 2.

Run:  python3 demos/solver_disk_convergence.py
"""
import numpy as np

from robin_torsion import Disk, RobinProblem, exact_disk_solution, mesh_domain, refine, solve

beta = 1.0
exact = exact_disk_solution(beta)
mesh = mesh_domain(Disk(), 0.2)
prev = None
print("   h       nodes   max|u-u*|   |J-J*|     bdry grad   CG its")
for level in range(4):
    sol = solve(RobinProblem(mesh, beta))
    b = mesh.boundary_nodes()
    err = (np.max(np.abs(sol.u - exact(mesh.nodes))), abs(sol.energy - exact.energy),
           np.max(np.hypot(*(sol.gradient[b] - exact.gradient(mesh.nodes[b])).T)))
    print(f"{mesh.h:7.4f} {mesh.n_nodes:8d}  " + "  ".join(f"{e:.3e}" for e in err)
          + f"  {sol.iterations:5d}")
    if prev is not None:
        print("        orders   " + "  ".join(f"{np.log2(p / e):9.2f}" for p, e in zip(prev, err)))
    prev = err
    mesh = refine(mesh)

print("u(0) ->", sol.evaluate(np.array([[0.0, 0.0]]))[0], "(exact 0.75)")
print("symmetry error", sol.symmetry_error())
