"""dclab: a laboratory for the deformed consensus protocol xdot = -Delta(s) x.

Builds graphs and their matrices, computes closed-form and numerical
spectra of the deformed Laplacian Delta(s) = (D - I)s^2 - As + I,
determines s-stability intervals through quadratic-eigenvalue machinery,
and simulates the continuous/discrete multi-agent dynamics under a
human-switchable parameter s.
"""

from .errors import (
    AnalysisError,
    CapacityExceededError,
    DclabError,
    DimensionMismatchError,
    DisconnectedError,
    DuplicateEdgeError,
    EigensolverError,
    EpsilonOutOfRangeError,
    FitDidNotConvergeError,
    GraphError,
    IllConditionedInterpolationError,
    InvalidGraphError,
    MultiplicityAboveOneError,
    NoBracketError,
    NotMarginalError,
    NotUndirectedError,
    ParameterOutOfRangeError,
    RootNotBracketedError,
    SelfLoopError,
    SimulationError,
    StepMismatchError,
    UnknownSessionError,
    VertexOutOfRangeError,
    WindowTooShortError,
    ZeroOffdiagonalError,
    ZeroVectorError,
)
from .graphs import (
    FAMILY_PARAMS,
    Graph,
    GraphFamily,
    MatrixBundle,
    StructureReport,
    build_graph,
    deformed_laplacian,
    generate_family,
    matrices,
    structure_probe,
)
from .graphio import (
    graph_from_dict,
    graph_to_dict,
    load_graph,
    parse_family_spec,
    resolve_graph_source,
    save_graph,
)
from .spectra import (
    ClosedFormSpectrum,
    FamilyStability,
    directed_cycle_oscillation,
    family_spectrum,
    family_stability,
    wheel_mu,
)
from .qep import (
    ASYMPTOTICALLY_STABLE,
    MARGINALLY_STABLE,
    UNSTABLE,
    MarginalMode,
    QepResult,
    StabilityReport,
    classify_at,
    marginal_mode,
    max_spectrum_real_part,
    q_poly,
    qep_solve,
    report_to_dict,
    residual,
    stability_intervals,
    sturm_negative_count,
    sweep_threshold,
)
from .dynamics import (
    OscillationFit,
    PerronConfig,
    PredictedLimit,
    Scenario,
    SwitchSchedule,
    Trajectory,
    discrete_run,
    integrate,
    load_scenario,
    oscillation_fit,
    planar_sim,
    predicted_limit,
    run_scenario,
    settle,
    trajectory_to_csv,
)

__version__ = "0.1.0"
