"""Horizontal minimal graphs over the ideal boundary of H^n x R.

A numerical library and CLI for the quasilinear elliptic equation satisfied
by the horizontal length of a minimal graph, regularized by eps in [0, 1]:
pointwise operator kernels for general n, a finite-difference damped-Newton
Dirichlet solver with homotopy and eps-continuation in two variables, the
analytic sub/supersolution barriers, and a verification engine for the
uniform length, boundary-gradient, modulus and global-gradient estimates.
"""

from .barriers import (BarrierParams, GlobalGradientBound, PhiBounds,
                       build_barrier_params, collar_barrier,
                       collar_barrier_slope, gaussian_ramp,
                       global_gradient_bound, modulus_delta,
                       oscillation_barrier)
from .errors import (CollarEmptyWarning, ConfigError, DegenerateLimitWarning,
                     EmptyDomain, HorographError, HypothesisViolated,
                     InvalidParams, LineSearchStalled, NewtonDiverged,
                     NonPositiveBoundaryData, NonPositiveLength,
                     OutsideValidity, SingularJacobian, SolverError)
from .estimates import (EstimateReport, check_boundary_gradient,
                        check_global_gradient, check_length_bounds,
                        check_modulus, run_estimates)
from .fields import ScalarField
from .geometry import (BoundaryData, DomainSpec, GeometricQuantities,
                       HypothesisReport, check_existence_hypotheses,
                       compute_quantities, smallest_enclosing_disk)
from .kernels import (CoefficientMatrix, JacobianRow, PointState, SurfaceGeometry,
                      coefficients, homotopy_residual, homotopy_weight,
                      mean_curvature, residual, residual_jacobian,
                      surface_geometry)
from .solver import (ContinuationResult, ContinuationSchedule, EuclideanResult,
                     NewtonResult, SolverConfig, assemble, continuation_solve,
                     convergence_study, default_eps_sequence,
                     euclidean_minimal_solve, newton_solve)
from .surfaces import (EuclideanPlane, GeodesicPlane, Horocylinder,
                       OracleSurface, XSinhT, classify_numerically, evaluate,
                       hyperbolic_rescale, oracle_from_name)

__version__ = "0.1.0"
