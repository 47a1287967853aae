"""Design and simulation engine for path-entangled NOON-state photon sources.

A quantum emitter (one or two quantum dots driven at the biexciton two-photon
resonance) inside a pair of tunnel-coupled nanocavities can host an energy
eigenstate whose N-photon content is exactly the two-mode NOON superposition.
This package finds the parameter conditions that make that eigenstate exist,
simulates its resonant excitation and decay with a Lindblad master equation,
and evaluates the purity and detection rate of the emitted photon pairs.

All energies are handled in units of sqrt(2) times the reference two-photon
coupling (g_2P for the single-dot system, g_1 for the two-dot system);
conversion to laboratory units happens only at reporting time.
"""

__version__ = "0.1.0"

from .hilbert import (
    BasisLabel,
    HilbertSpace,
    Operator,
    SystemModel,
    N2_MODEL,
    N4_MODEL,
    N4_VARIANT_MODEL,
    build_space,
    annihilator,
    projector,
    total_excitation_operator,
)
from .model import (
    UNIT_COUPLING,
    MicroscopicParams,
    ParamsN2,
    ParamsN4,
    effective_coupling,
    hamiltonian,
    hamiltonian_n2,
    hamiltonian_n4,
    hamiltonian_n4_variant,
    pump_term,
    rotating_frame,
)
from .design import (
    DesignSolutionN2,
    DesignSolutionN4,
    FlowGraph,
    OnePhotonEigensystem,
    condition_delta2,
    flow_graph,
    ges_energy_n2,
    ges_mixing_angle_n2,
    ges_state_n2,
    one_photon_eigensystem,
    requirement_residuals_n4,
    solve_ges_n2,
    solve_ges_n4,
    continuation_curve_n4,
)
from .dynamics import (
    DensityMatrix,
    NumericsError,
    PopulationTrace,
    PulseShape,
    build_liouvillian,
    convergence_check,
    liouvillian_apply,
    propagate,
    pulse_population_map,
    steady_state,
)
from .oracle import DecayParams, decay_populations, one_photon_peak
from .perturbation import (
    SWElement,
    analytic_cw_population,
    analytic_cw_rate,
    sw_matrix_element,
)
from .analysis import (
    CoincidenceRecord,
    PurityMeasures,
    TomographyMatrix,
    coincidence_counts_analytic,
    coincidence_counts_regression,
    concurrence,
    detection_rate,
    rate_scaling_n,
    steady_state_concurrence,
    tomography,
    trace_distance,
)
