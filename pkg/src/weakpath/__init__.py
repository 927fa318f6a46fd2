"""weakpath: weak values, boundary-state selection, and real-weight path
probabilities on desk-scale models, with a scenario-runner CLI."""

from .config import Defaults, defaults, reset_defaults, set_defaults
from .hilbert import (
    DimensionMismatch,
    OperatorMatrix,
    Propagator,
    StateVector,
    eigh,
    from_pairs,
    inner,
    matexp,
    to_pairs,
)
from .evolution import BoundaryPair, bracket, evolve_final, evolve_initial
from .weakvalue import (
    OrthogonalBoundaryStates,
    RealityReport,
    WeakValueSeries,
    WeightDistribution,
    reality_report,
    weak_value,
    weak_value_series,
    weight_distribution,
)
from .selection import MaximizedOverlap, SelectedSuite, maximize_overlap, selected_weak_value_suite
from .pathspace import (
    Boundary,
    EnumerationCapExceeded,
    MetropolisDiagnosticError,
    MetropolisResult,
    Path,
    PathAction,
    PathLattice,
    action_from_transfer,
    argmax_path,
    hamming_peak,
    metropolis_sample,
    our_average,
    per_path,
    probability_of_value,
    sample_average,
    weak_value_pathsum,
)
from .trajectory import (
    ActionModel,
    FavoredPathResult,
    OptimizerConfig,
    SlowRollReport,
    Trajectory,
    TwoGaussianPeaks,
    action_value,
    energy_series,
    find_favored_path,
    find_potential_maxima,
    slow_roll_scenario,
    stationarity_residual,
    two_peak_candidates,
)
from .clock import (
    ClockModel,
    DelaySeries,
    DoubleSlitReport,
    SplitSpec,
    clock_stand,
    combined_action,
    double_slit_demo,
    two_amplitude_suppression,
    two_path_probability,
)

__version__ = "0.1.0"
