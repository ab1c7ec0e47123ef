"""Time-optimal evolution of non-Hermitian two-level systems.

Bi-orthogonal states on the complex Bloch sphere, the effective 2x2
Hamiltonian, closed-form and integrated dynamics, evolution-time landscapes
over a complex polar angle, and the real-spectrum branch pictured on the
one-sheeted hyperboloid.
"""
from .bloch import (
    UP,
    BiorthFrame,
    BiorthPair,
    TargetSpec,
    biorthonormal_frame,
    bloch_by_contraction,
    bloch_from_spinors,
    check_on_sphere,
    complex_dot,
    normalize_biorthogonal,
    spinors_from_target,
    target_from_bloch,
)
from .brachistochrone import (
    Constraint,
    ConstraintMode,
    CriticalKind,
    CriticalPoint,
    LandscapeGrid,
    RealityRoot,
    SaddleCheck,
    TimeResult,
    cell_centers,
    classify_saddle,
    critical_points,
    evolution_phase,
    evolution_time,
    landscape,
    phi_from_target,
    reality_manifold_tau,
    solve_reality,
    variance_phase,
)
from .dynamics import (
    Trajectory,
    first_arrival,
    integrate_bloch,
    integrate_spinor,
    propagate_closed,
    propagate_spinor,
    propagator,
    pt_closed,
    pt_params,
)
from .errors import (
    ExceptionalPointError,
    IntegrationError,
    NormalizationError,
    NotOnBranchError,
)
from .hamiltonian import (
    CartesianOmega,
    HamiltonianParams,
    TransitionCoefficients,
    boundary_hamiltonian,
    build_effective,
    decompose,
    eigenvalues,
    energy_variance,
    from_cartesian,
    general_boundary_hamiltonian,
    optimal_hamiltonian,
    transition_coefficients,
)
from .hyperboloid import (
    METRIC,
    HyperPath,
    PTScenario,
    Speeds,
    check_on_hyperboloid,
    closed_form_length,
    final_bloch,
    final_point,
    from_hyperboloid,
    geodesic,
    geodesic_direction,
    geodesic_residual,
    integrate_geodesic,
    mapped_path,
    minkowski_dot,
    omega_constrained_bounds,
    path_length,
    pt_evolution_time,
    schrodinger_curve,
    speeds,
    to_hyperboloid,
)

__version__ = "0.1.0"
