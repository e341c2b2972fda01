import numpy as np
import pytest
import scipy.sparse as sp
import sympy as sym

from robin_torsion.geometry import Disk, Ellipse, Peanut
from robin_torsion.mesh import mesh_domain, refine
from robin_torsion.solver import (IndefiniteError, PatchError, RobinProblem, SolverError,
                                  assemble, discrete_mean, element_stiffness,
                                  exact_disk_solution, local_second_derivatives, patch_fit,
                                  pcg, recover_gradient, solve)


def orders(h, err):
    h, err = np.asarray(h), np.asarray(err)
    return np.log(err[:-1] / err[1:]) / np.log(h[:-1] / h[1:])


def test_reference_element_stiffness():
    K = element_stiffness([[0, 0], [1, 0], [0, 1]])
    expected = np.array([[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]])
    assert np.allclose(K, expected, atol=1e-15)
    with pytest.raises(ValueError):
        element_stiffness([[0, 0], [1, 1], [2, 2]])


def test_robin_operator_is_spd():
    mesh = mesh_domain(Peanut(0.4), 0.1)
    A = assemble(RobinProblem(mesh, 1.0)).matrix
    assert abs(A - A.T).max() < 1e-14
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = rng.standard_normal(mesh.n_nodes)
        assert v @ (A @ v) > 0
    assert A @ np.ones(mesh.n_nodes) @ np.ones(mesh.n_nodes) > 0


def test_neumann_load_is_compatible():
    mesh = mesh_domain(Ellipse(2, 1), 0.1)
    sysn = assemble(RobinProblem(mesh, mode="neumann"))
    assert abs(sysn.load.sum()) < 1e-12
    # stiffness annihilates constants
    assert np.max(np.abs(sysn.matrix @ np.ones(mesh.n_nodes))) < 1e-12


def test_disk_center_value_and_positivity(disk_fine):
    assert disk_fine.evaluate(np.array([[0.0, 0.0]]))[0] == pytest.approx(0.75, abs=1e-3)
    assert disk_fine.u.min() > 0
    assert disk_fine.residual <= 1e-10


def test_disk_energy_approaches_oracle(disk_fine):
    ex = exact_disk_solution(1.0)
    assert ex.energy == pytest.approx(-0.3125 * np.pi, abs=1e-14)
    assert disk_fine.energy == pytest.approx(ex.energy, abs=1e-3)


def test_energy_decreases_under_refinement():
    mesh = mesh_domain(Ellipse(2, 1), 0.2)
    energies = []
    for _ in range(3):
        energies.append(solve(RobinProblem(mesh, 1.0)).energy)
        mesh = refine(mesh)
    assert energies[0] > energies[1] > energies[2]


def test_symmetry_of_solutions():
    for dom in (Ellipse(2, 1), Peanut(0.4)):
        sol = solve(RobinProblem(mesh_domain(dom, 0.08), 1.0))
        assert sol.symmetry_error() <= 1e-12
        g = sol.gradient
        r = sol.mesh.reflect
        assert np.max(np.abs(g[:, 1] + g[r, 1])) <= 1e-12
        assert np.max(np.abs(g[:, 0] - g[r, 0])) <= 1e-12


def test_disk_convergence_rates():
    ex = exact_disk_solution(1.0)
    mesh = mesh_domain(Disk(), 0.2)
    hs, eu, ej, eg = [], [], [], []
    for _ in range(4):
        sol = solve(RobinProblem(mesh, 1.0))
        b = mesh.boundary_nodes()
        hs.append(mesh.h)
        eu.append(np.max(np.abs(sol.u - ex(mesh.nodes))))
        ej.append(abs(sol.energy - ex.energy))
        eg.append(np.max(np.hypot(*(sol.gradient[b] - ex.gradient(mesh.nodes[b])).T)))
        mesh = refine(mesh)
    assert np.all(np.abs(orders(hs, eu) - 2.0) <= 0.3)
    assert np.all(np.abs(orders(hs, ej) - 2.0) <= 0.3)
    assert np.all(np.abs(orders(hs, eg) - 1.0) <= 0.3)


def test_robin_residual_first_order():
    mesh = mesh_domain(Disk(), 0.2)
    hs, res = [], []
    for _ in range(3):
        sol = solve(RobinProblem(mesh, 1.0))
        b = mesh.boundary_nodes()
        nrm = mesh.nodes[b] / np.hypot(*mesh.nodes[b].T)[:, None]
        res.append(np.max(np.abs(np.sum(nrm * sol.gradient[b], 1) + sol.u[b])))
        hs.append(mesh.h)
        mesh = refine(mesh)
    assert np.all(np.abs(orders(hs, res) - 1.0) <= 0.3)


def test_recovered_gradient_of_linear_field():
    mesh = mesh_domain(Peanut(0.4), 0.1)
    g = recover_gradient(mesh, mesh.nodes[:, 1].copy())
    assert np.allclose(g, [0.0, 1.0], atol=1e-12)


def test_recovered_gradient_of_interpolated_oracle():
    ex = exact_disk_solution(1.0)
    mesh = mesh_domain(Disk(), 0.2)
    hs, eb, ei = [], [], []
    for _ in range(4):
        err = np.hypot(*(recover_gradient(mesh, ex(mesh.nodes)) - ex.gradient(mesh.nodes)).T)
        bnd = np.zeros(mesh.n_nodes, bool)
        bnd[mesh.boundary_nodes()] = True
        hs.append(mesh.h)
        eb.append(err[bnd].max())
        ei.append(err[~bnd].max())
        last = err[~bnd]
        mesh = refine(mesh)
    assert np.all(np.abs(orders(hs, eb) - 1.0) <= 0.3)
    # the interior maximum sits at vertices of the coarse mesh and is first
    # order; at nodes whose patch is point symmetric the average is exact
    assert np.all(np.abs(orders(hs, ei) - 1.0) <= 0.3)
    assert np.median(last) < 1e-12


def test_neumann_solution_has_zero_mean_and_ignores_offset():
    mesh = mesh_domain(Ellipse(2, 1), 0.1)
    prob = RobinProblem(mesh, mode="neumann")
    s0 = solve(prob)
    s1 = solve(prob, x0=np.full(mesh.n_nodes, 5.0))
    assert abs(discrete_mean(s0)) < 1e-10
    assert np.max(np.abs(s0.u - s1.u)) < 1e-8
    assert s0.symmetry_error() <= 1e-12


def test_problem_validation():
    mesh = mesh_domain(Disk(), 0.2)
    with pytest.raises(ValueError, match="beta > 0"):
        RobinProblem(mesh, -1.0)
    with pytest.raises(ValueError):
        RobinProblem(mesh, 1.0, mode="dirichlet")
    RobinProblem(mesh, -1.0, mode="neumann")


def test_cg_failure_carries_history():
    mesh = mesh_domain(Disk(), 0.1)
    sysm = assemble(RobinProblem(mesh, 1.0))
    with pytest.raises(SolverError) as info:
        pcg(sysm.matrix, sysm.load, sysm.diagonal, maxiter=3)
    assert len(info.value.history) == 4


def test_cg_detects_indefiniteness():
    A = sp.csr_matrix(np.diag([1.0, -2.0, 3.0]))
    with pytest.raises(IndefiniteError):
        pcg(A, np.ones(3), np.ones(3))


def test_hessian_of_quadratic_is_exact():
    mesh = mesh_domain(Ellipse(2, 1), 0.1)
    x, y = mesh.nodes.T
    f = 0.3 * x ** 2 - 0.7 * x * y + 1.1 * y ** 2 + x - 2 * y + 4
    fit = patch_fit(mesh, f, (0.3, 0.2), 0.35)
    assert np.allclose(fit.hessian, [[0.6, -0.7], [-0.7, 2.2]], atol=1e-10)


def test_hessian_of_disk_solution():
    errs = []
    for sol_h in (0.1, 0.05):
        sol = solve(RobinProblem(mesh_domain(Disk(), sol_h), 1.0))
        H = local_second_derivatives(sol, (0.2, 0.1), 3 * sol.mesh.h)
        errs.append(np.max(np.abs(H + 0.5 * np.eye(2))))
    assert errs[-1] < 0.05
    assert errs[1] < errs[0] or errs[1] < 1e-3


def test_small_patch_is_rejected():
    mesh = mesh_domain(Disk(), 0.2)
    with pytest.raises(PatchError, match=r"\(0\.1"):
        patch_fit(mesh, np.zeros(mesh.n_nodes), (0.1, 0.1), 0.1)


def test_disk_oracle_symbolically():
    x1, x2, beta, R = sym.symbols("x1 x2 beta R", positive=True)
    u = R / (2 * beta) + (R ** 2 - x1 ** 2 - x2 ** 2) / 4
    assert sym.simplify(sym.diff(u, x1, 2) + sym.diff(u, x2, 2) + 1) == 0
    t = sym.symbols("t", real=True)
    on = {x1: R * sym.cos(t), x2: R * sym.sin(t)}
    dnu = (sym.cos(t) * sym.diff(u, x1) + sym.sin(t) * sym.diff(u, x2)).subs(on)
    assert sym.simplify(dnu + beta * u.subs(on)) == 0
    # the constant 1/(2 beta) alone leaves a residual of -beta R^2 / 4
    u_bad = 1 / (2 * beta) - (x1 ** 2 + x2 ** 2) / 4
    dn_bad = (sym.cos(t) * sym.diff(u_bad, x1) + sym.sin(t) * sym.diff(u_bad, x2)).subs(on)
    assert sym.simplify((dn_bad + beta * u_bad.subs(on)).subs(R, 1)) == -beta / 4
    # boundary expression at beta = R = 1
    g2 = (sym.diff(u, x1) ** 2 + sym.diff(u, x2) ** 2).subs(on)
    expr = (-beta ** 2 * u ** 2).subs(on) + g2 / 2 + beta / 2 * u.subs(on) ** 2 / R - u.subs(on)
    assert sym.simplify(expr.subs({beta: 1, R: 1})) == sym.Rational(-1, 2)


def test_disk_oracle_numeric():
    ex = exact_disk_solution(1.0)
    assert ex(np.zeros(2)) == 0.75
    assert ex(np.array([0.6, 0.8])) == pytest.approx(0.5, abs=1e-15)
    x = np.array([[0.3, 0.4], [-0.1, -0.7]])
    assert np.allclose(x[:, 1] * ex.gradient(x)[:, 1], -x[:, 1] ** 2 / 2)
    with pytest.raises(ValueError):
        exact_disk_solution(0.0)


def test_disk_radius_two_oracle():
    ex = exact_disk_solution(1.0, 2.0)
    sol = solve(RobinProblem(mesh_domain(Disk(2.0), 0.1), 1.0))
    assert np.max(np.abs(sol.u - ex(sol.mesh.nodes))) < 5e-3


def test_field_dump(tmp_path, disk_coarse):
    path = tmp_path / "field.csv"
    disk_coarse.write_field(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,u,ux,uy"
    assert len(lines) == disk_coarse.mesh.n_nodes + 1
    back = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.array_equal(back[:, 2], disk_coarse.u)


def test_system_dump(tmp_path):
    mesh = mesh_domain(Disk(), 0.3)
    s = assemble(RobinProblem(mesh, 1.0))
    s.write(tmp_path / "A.txt")
    rows = np.loadtxt(tmp_path / "A.txt")
    A = sp.coo_matrix((rows[:, 2], (rows[:, 0].astype(int), rows[:, 1].astype(int))))
    assert abs(A.tocsr() - s.matrix).max() == 0
