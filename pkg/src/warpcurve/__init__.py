"""Closed graphs of prescribed Weingarten curvature in warped products.

A numerical library for finding height fields z on a flat torus whose
graph in the warped product (t_lo, t_hi) x_h T^n has normalized r-th mean
curvature equal to a prescribed positive function, via damped Newton
inside a homotopy continuation, together with desk-scale verification of
every structural hypothesis the construction rests on (mean-convex
leaves, barrier levels, cone admissibility, gauge decay).
"""

from .ambient import WarpingProfile, ambient_curvature, eval_warp, k_radial, kappa
from .curvature import (CurvatureSpec, F_matrix_derivative, check_structural,
                        f_eval, f_grad, in_cone, sym_poly)
from .errors import (BarrierViolation, BisectError, ConeError, ConfigError,
                     ContinuationStall, DomainError, FrameError, GaugeError,
                     NewtonStall, ProfileError, ShapeError, ValidationError,
                     WarpcurveError)
from .geometry import (GraphGeometry, compute_geometry, fields_csv,
                       special_frame_check, support_identity_check)
from .grid import (NodeField, TorusGrid, derivatives, load_field, make_grid,
                   random_smooth, reduce, save_field)
from .oracle import OracleReport, eig2_oracle, fd_gradcheck, fd_jacobian
from .problem import (Gauge, HomotopyProblem, Prescription, barrier_crossings,
                      build_homotopy, build_phi, build_prescription,
                      psi_homotopy)
from .solver import (ManufacturedProblem, NewtonStats, SolveReport,
                     SolverConfig, StepRecord, assemble_jacobian,
                     build_manufactured, continuation,
                     manufactured_residual_norm, newton_solve, residual)

__version__ = "0.1.0"
