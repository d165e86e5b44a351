"""Multi-state multi-period stopover models for capture-recapture data.

Exact maximum-likelihood estimation of abundance, recruitment, survival,
within-period arrival/retention, state dynamics and capture probabilities
from robust-design capture histories, without closure assumptions at either
sampling level.
"""

__version__ = "0.1.0"

from .bruteforce import brute_force_likelihood, enumerate_histories, secondary_brute_force
from .design import Dataset, StudyDesign, dataset_from_rows, single_period_dataset
from .errors import ConstraintError, ParseError, PathSpaceError, StructureError
from .fitting import (
    BootstrapResult,
    FitResult,
    OptimizerConfig,
    SelectionResult,
    bootstrap,
    derived_abundance,
    fit,
    fit_single_periods,
    report_rows,
    step_up_selection,
)
from .hmm import (
    build_observation_diagonal,
    build_primary_transition,
    build_secondary_initial,
    build_secondary_transition,
    history_logliks,
    log_likelihood,
    primary_likelihood,
    secondary_likelihood,
)
from .kernels import ACTIVE_KERNEL, available_kernels, forward_loglik
from .params import (
    ParameterSet,
    arrival_from_logistic,
    conditional_arrival,
    conditional_recruitment,
    params_allclose,
    params_from_dict,
    params_to_dict,
    retention_from_logistic,
    simplex_from_conditional,
)
from .simulate import SimTruth, random_parameters, reference_scenario, simulate
from .structure import (
    GENERATING_STRUCTURE,
    LogisticSpec,
    ModelStructure,
    TableSpec,
    apply_move,
    named_structure,
    parse_structure,
)

__all__ = [name for name in dir() if not name.startswith("_")]
