"""Evolutionary game dynamics in mixed strategies.

Zero-sum symmetric games on the simplex, simulated at three scales:
an agent-based pair-interaction Monte Carlo, its mean-field transport
limit solved by coupled characteristics, and the replicator ODE, with
the metrics and experiments tying the three together.
"""

from .games import (
    BadDimension,
    DimensionMismatch,
    EntryOutOfRange,
    EvenDimension,
    GameError,
    NashSearchResult,
    NotAntisymmetric,
    NotInterior,
    PayoffMatrix,
    StepFunctionParams,
    as_simplex_point,
    cyclic_matrix,
    h_eval,
    interior_nash,
    is_nash,
    payoff,
    rps_matrix,
    sample_pure,
    two_strategy_matrix,
    validate_payoff,
)
from .meanfield import (
    DegenerateInitialDistance,
    FieldParams,
    ParticleEnsemble,
    QuadraticTestFn,
    SupportLeftPlateau,
    diffusion_step,
    field_F,
    integrate_transport,
    integrate_two_strategy,
    stability_factor,
    two_strategy_rhs,
    weak_residual,
)
from .metrics import (
    Empty,
    Histogram,
    marginal_histogram,
    mean_strategy,
    sliced_w1,
    uniform_simplex_covariance,
    w1_1d,
)
from .micro import (
    AgentPopulation,
    ConfigInvalid,
    InteractionEvent,
    MicroConfig,
    MicroRun,
    expected_drift,
    interact_batch,
    interact_pair,
    make_generator,
    run_micro,
    sample_simplex_uniform,
    step,
)
from .replicator import (
    RangeOutOfSpan,
    ReplicatorTrajectory,
    StateLeftSimplex,
    estimate_period,
    integrate_rk4,
    replicator_rhs,
    rest_point_residual,
    temporal_mean,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
