"""spinforge: collective-spin dynamics, metrology, and readout at desk scale."""

__version__ = "0.1.0"

from .spincore import (
    CollectiveOps,
    DickeState,
    Direction,
    build_collective_ops,
    expectation,
    j_axis,
    rotate,
    spin_coherent_state,
)
from .models import (
    FloquetCoefficients,
    HamiltonianKind,
    HamiltonianSpec,
    bessel_j,
    build_hamiltonian,
    floquet_coefficients,
    fourier_component,
    solve_tat_ratio,
    tat_k0,
)
from .dynamics import (
    ConvergenceError,
    EvolutionResult,
    PropagationSettings,
    evolve_driven,
    evolve_static,
    floquet_convergence_scan,
)
from .metrology import (
    AxisDistribution,
    HusimiField,
    QfimResult,
    axis_distribution,
    cat_qfi_estimate,
    husimi,
    metrological_gain,
    qfi_along,
    qfim,
)
from .semiclassical import (
    BlochPoint,
    DetuningOptimum,
    FlowParams,
    FlowTrajectory,
    fixed_points,
    flow_rhs,
    integrate_flow,
    lyapunov_saddle,
    optimal_detuning_sc,
    optimal_time_sc,
    separatrix_curves,
)
from .readout import (
    DegenerateReadoutError,
    NoiseModel,
    OptimalMeasurement,
    PulseSequence,
    ReadoutPlan,
    ResponseMatrices,
    ZeroResponseError,
    final_state,
    moment_precision,
    noisy_observable,
    optimal_measurement,
    parity_precision,
    pulse_angles,
    response_matrices,
)

__all__ = [name for name in dir() if not name.startswith("_")]
