"""Constant-force particle dynamics on deformed phase spaces and the
noninertial frame maps that reproduce their extra forces."""
from ._accel import USE_NUMBA
from .dynamics import (
    Hamiltonian, IntegrationBlowup, TimeGrid, Trajectory, energy_along, exact_commutative_trajectory,
    hamiltonian_value, hamiltonian_vector_field, integrate_flow, integrate_newton, simulate_flow,
)
from .equivalence import (
    ComparisonResult, compare_trajectories, convergence_order, fd_acceleration, kappa_limit_sweep,
    newton_force, newton_residual,
)
from .noninertial import (
    SampledFunction, T1Params, compute_A, cumulative_integral, double_cumulative_integral,
    transform_t1, transform_t2, transform_t3,
)
from .poisson import (
    CheckReport, ConfigurationError, JacobiSampleConfig, PhasePoint, PoissonStructure,
    broken_control_structure, evaluate_bivector, jacobi_residual, verify_jacobi,
)
from .spaces import (
    DeformationSpec, ForceMass, Kind, SecondOrderState, make_structure, momentum_from_velocity,
    newton_rhs, velocity_shift,
)

__version__ = "0.1.0"
