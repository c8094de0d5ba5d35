"""safeflow: safety- and stability-constrained dynamical-system learning.

Learns nonlinear models dx/dt = f(x) from demonstrations by solving a
convex QP whose constraints keep a user-specified ellipse/ellipsoid
forward invariant (zeroing barrier rows) and the trajectories ultimately
bounded around an equilibrium (Lyapunov rows), then simulates, certifies,
and evaluates the learned models under disturbances.
"""

from .barriers import (
    BarrierSpec,
    Box,
    LipschitzData,
    SamplePlan,
    barrier_gradient,
    barrier_value,
    classify,
    default_margin,
    lipschitz_constants,
    sample_constraint_points,
    working_box,
)
from .constraints import (
    LearnConfig,
    LinearInequality,
    build_safety_row,
    build_stability_row,
    lyapunov_tightening,
    safety_margin,
)
from .elm import (
    BoundEstimates,
    ElmParams,
    bip_pretrain,
    estimate_bounds,
    evaluate,
    evaluate_batch,
    feature_matrix,
    hidden_features,
    random_init,
    ridge_fit,
)
from .errors import (
    BudgetError,
    DivergenceError,
    InvalidInputError,
    SafeflowError,
    SamplingError,
    SingularMatrixError,
    TrainingError,
)
from .evaluate import MonteCarloReport, monte_carlo, resample_equidistant, sea
from .learner import LearnedModel, assemble_qp, train
from .qp import QpProblem, QpSolution, solve_qp
from .simulate import (
    CertReport,
    DisturbanceSpec,
    UltimateBoundCheck,
    certify_invariance,
    check_ultimate_bound,
    disturbance_bound,
    rollout,
)
from .trajectories import Trajectory, finite_difference_derivatives

__version__ = "0.1.0"

__all__ = [
    "BarrierSpec",
    "BoundEstimates",
    "Box",
    "BudgetError",
    "CertReport",
    "DisturbanceSpec",
    "DivergenceError",
    "ElmParams",
    "InvalidInputError",
    "LearnConfig",
    "LearnedModel",
    "LinearInequality",
    "LipschitzData",
    "MonteCarloReport",
    "QpProblem",
    "QpSolution",
    "SafeflowError",
    "SamplePlan",
    "SamplingError",
    "SingularMatrixError",
    "TrainingError",
    "Trajectory",
    "UltimateBoundCheck",
    "assemble_qp",
    "barrier_gradient",
    "barrier_value",
    "bip_pretrain",
    "build_safety_row",
    "build_stability_row",
    "certify_invariance",
    "check_ultimate_bound",
    "classify",
    "default_margin",
    "disturbance_bound",
    "estimate_bounds",
    "evaluate",
    "evaluate_batch",
    "feature_matrix",
    "finite_difference_derivatives",
    "hidden_features",
    "lipschitz_constants",
    "lyapunov_tightening",
    "monte_carlo",
    "random_init",
    "resample_equidistant",
    "ridge_fit",
    "rollout",
    "safety_margin",
    "sample_constraint_points",
    "sea",
    "solve_qp",
    "train",
    "working_box",
]
