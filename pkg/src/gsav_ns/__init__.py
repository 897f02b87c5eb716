"""Consistent-splitting GSAV scheme for 2D incompressible Navier-Stokes on a MAC grid."""

from .grid import (GridSpec, ScalarField, VelocityField, inner_product_velocity,
                   l2_norm_scalar, l2_norm_velocity)
from .linsolve import SolveStats, SolverError, solve_helmholtz, solve_poisson_neumann
from .mms import (EXAMPLE1, EXAMPLE2, ExactSolution, error_norms, eval_exact, eval_forcing,
                  get_example)
from .stepper import (FlowState, SavState, SolverConfig, StepRecord, initialize, initialize_exact,
                      mms_config, run, step)

__version__ = "0.1.0"
