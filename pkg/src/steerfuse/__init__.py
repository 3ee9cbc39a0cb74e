"""Confidence-guided fusion of continuous and discrete steering heads,
with a desk-scale closed-loop driving simulator and evaluation suite."""

from .binning import SteeringSpace, digitize, digitize_all, make_space, scale_raw_steering
from .classification import ClassReport, ConfusionMatrix, confusion, report
from .correction import (
    ConfidenceSummary,
    CorrectionCase,
    CorrectionConfig,
    CorrectionOutcome,
    DualHeadOutput,
    correct,
    entropy,
    make_rng,
    summarize,
)
from .estimator import SteeringCorrector
from .experiment import ExperimentPlan, ExperimentSummary, TrialReport, run_experiment
from .simulation import (
    PredictorStubConfig,
    Route,
    RouteKind,
    RouteLostError,
    TrialSettings,
    VehicleParams,
    VehicleState,
    expert_rollout,
    expert_steering,
    make_route,
    predict,
    run_trial,
    step_vehicle,
)
from .trajectory import (
    AggregateReport,
    SimilarityReport,
    Trajectory,
    aggregate,
    arc_length,
    area_between_curves,
    curve_length_measure,
    dtw_distance,
    frechet_distance,
    resample_by_arc_length,
    similarity_report,
)
from .validation import ValidationError

__version__ = "0.1.0"

__all__ = [
    "AggregateReport",
    "ClassReport",
    "ConfidenceSummary",
    "ConfusionMatrix",
    "CorrectionCase",
    "CorrectionConfig",
    "CorrectionOutcome",
    "DualHeadOutput",
    "ExperimentPlan",
    "ExperimentSummary",
    "PredictorStubConfig",
    "Route",
    "RouteKind",
    "RouteLostError",
    "SimilarityReport",
    "SteeringCorrector",
    "SteeringSpace",
    "Trajectory",
    "TrialReport",
    "TrialSettings",
    "ValidationError",
    "VehicleParams",
    "VehicleState",
    "aggregate",
    "arc_length",
    "area_between_curves",
    "confusion",
    "correct",
    "curve_length_measure",
    "digitize",
    "digitize_all",
    "dtw_distance",
    "entropy",
    "expert_rollout",
    "expert_steering",
    "frechet_distance",
    "make_rng",
    "make_route",
    "make_space",
    "predict",
    "report",
    "resample_by_arc_length",
    "run_experiment",
    "run_trial",
    "scale_raw_steering",
    "similarity_report",
    "step_vehicle",
    "summarize",
]
