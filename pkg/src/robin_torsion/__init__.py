"""Finite element study of half-domain monotonicity for the Robin torsion problem."""
from .geometry import (CrossPolygon, Disk, Domain, DomainError, Ellipse, Peanut,
                       RoundedCrossPolygon, Stadium, boundary_trace, build_family,
                       build_radial_family, check_condition_A2, domain_from_config)
from .mesh import Grading, MeshError, TriMesh, mesh_domain, refine
from .solver import RobinProblem, Solution, SolverError, exact_disk_solution, solve
from .analysis import (boundary_sign_checks, counterexample_probe, monotonicity_report,
                       overdetermined_residual, reflected_difference, symmetry_residual,
                       tangential_identity_residual)
from .corners import CornerFit, CornerFitError, fit_corner, fit_samples
from .sweep import atlas, certify_path, cross_grid, rounding_study

__version__ = "0.1.0"
