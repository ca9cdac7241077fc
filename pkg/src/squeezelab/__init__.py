"""Steady-state squeezing workbench for a single damped bosonic mode.

Covers three control regimes under a shared Gaussian steady-state engine:
plain cascaded driving, passive coherent feedback through an arbitrary
interferometer, and continuous homodyne monitoring of the output. The
search module certifies numerically that no passive feedback loop pushes
the squeezed variance below nbar/2 while monitoring can.
"""
from .dynamics import (
    CouplingMatrix,
    CovarianceMatrix,
    OpenSystem,
    QuadraticHamiltonian,
    diffusion_matrix,
    drift_matrix,
    evolve_covariance,
    exchange_coupling,
    is_hurwitz,
    load_system_config,
    lyapunov_steady_state,
    no_control_squeezing,
    spectral_abscissa,
    squeezing_db,
    squeezing_hamiltonian,
    squeezing_system,
    system_from_config,
)
from .errors import ConvergenceError, InconclusiveSearchError, StabilityError
from .feedback import (
    BoundCertificate,
    FeedbackLoop,
    FeedbackTopology,
    boundary_stack,
    build_feedback,
    coupling_stack,
    diffusion_eigenvalue,
    drift_trace_shift,
    loop_identity_deviations,
    loop_to_json,
    optimal_eta,
    simple_feedback_loop,
    simple_loop_closed_form,
    steady_state,
    verify_3db_certificate,
)
from .monitoring import (
    GeneralDyneMeasurement,
    HomodyneVariances,
    MonitoredSteadyState,
    RiccatiSystem,
    efficiency_threshold,
    homodyne_closed_form,
    homodyne_steady_state,
    monitored_stable_squeezing_condition,
    monitoring_sweep_rows,
    riccati_matrices,
    riccati_steady_state,
    write_monitoring_csv,
)
from .search import (
    BoundSearchResult,
    SearchConfig,
    SweepRecord,
    bound_search_report,
    probe_near_bound,
    random_bound_search,
    regime_comparison_sweep,
    sample_loop,
    stability_frontier,
    write_sweep_csv,
    write_sweep_json,
)
from .serialize import matrix_from_json, matrix_to_json
from .symplectic import (
    PassiveTransform,
    beam_splitter,
    block_decompose,
    complete_passive,
    epsilon_sum,
    grouped_to_interleaved_indices,
    interleaved_to_grouped_indices,
    is_passive,
    is_symplectic,
    omega,
    passive_to_unitary,
    random_passive,
    reorder_to_grouped,
    reorder_to_interleaved,
    submatrix_asymmetry,
    unitary_to_passive,
)

__version__ = "0.1.0"

__all__ = [
    "BoundCertificate",
    "BoundSearchResult",
    "ConvergenceError",
    "CouplingMatrix",
    "CovarianceMatrix",
    "FeedbackLoop",
    "FeedbackTopology",
    "GeneralDyneMeasurement",
    "HomodyneVariances",
    "InconclusiveSearchError",
    "MonitoredSteadyState",
    "OpenSystem",
    "PassiveTransform",
    "QuadraticHamiltonian",
    "RiccatiSystem",
    "SearchConfig",
    "StabilityError",
    "SweepRecord",
    "beam_splitter",
    "block_decompose",
    "bound_search_report",
    "boundary_stack",
    "build_feedback",
    "complete_passive",
    "coupling_stack",
    "diffusion_eigenvalue",
    "diffusion_matrix",
    "drift_matrix",
    "drift_trace_shift",
    "efficiency_threshold",
    "epsilon_sum",
    "evolve_covariance",
    "exchange_coupling",
    "grouped_to_interleaved_indices",
    "homodyne_closed_form",
    "homodyne_steady_state",
    "interleaved_to_grouped_indices",
    "is_hurwitz",
    "is_passive",
    "is_symplectic",
    "load_system_config",
    "loop_identity_deviations",
    "loop_to_json",
    "lyapunov_steady_state",
    "matrix_from_json",
    "matrix_to_json",
    "monitored_stable_squeezing_condition",
    "monitoring_sweep_rows",
    "no_control_squeezing",
    "omega",
    "optimal_eta",
    "passive_to_unitary",
    "probe_near_bound",
    "random_bound_search",
    "random_passive",
    "regime_comparison_sweep",
    "reorder_to_grouped",
    "reorder_to_interleaved",
    "riccati_matrices",
    "riccati_steady_state",
    "sample_loop",
    "simple_feedback_loop",
    "simple_loop_closed_form",
    "spectral_abscissa",
    "squeezing_db",
    "squeezing_hamiltonian",
    "squeezing_system",
    "stability_frontier",
    "steady_state",
    "submatrix_asymmetry",
    "system_from_config",
    "unitary_to_passive",
    "verify_3db_certificate",
    "write_monitoring_csv",
    "write_sweep_csv",
    "write_sweep_json",
]
