"""Batch protocol: seeded trials per route and mode, with/without
correction, aggregated into comparison-table-shaped reports.

Trial ``t`` of every (route, mode) pair uses seed ``base_seed + t``, so
the corrected and uncorrected runs of a trial index see identical fault
sequences (paired comparison). The reference trajectory per route is the
expert-only rollout, computed once.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .simulation import (
    CORRECTED,
    UNCORRECTED,
    Route,
    RouteKind,
    TrialSettings,
    expert_rollout,
    make_route,
    run_trial,
)
from .trajectory import (
    DEFAULT_RESAMPLE_COUNT,
    AggregateReport,
    SimilarityReport,
    Trajectory,
    aggregate,
    similarity_report,
)
from .validation import ValidationError

ALL_ROUTES = (RouteKind.STRAIGHT, RouteKind.ONE_TURN, RouteKind.TWO_TURN)


@dataclass(frozen=True)
class ExperimentPlan:
    routes: tuple = ALL_ROUTES
    trials_per_route: int = 10
    base_seed: int = 0
    run_corrected: bool = True
    run_uncorrected: bool = True
    settings: TrialSettings = field(default_factory=TrialSettings)
    resample_count: int = DEFAULT_RESAMPLE_COUNT

    def __post_init__(self):
        if self.trials_per_route < 1:
            raise ValidationError(f"trials_per_route must be >= 1, got {self.trials_per_route}")
        if not self.routes:
            raise ValidationError("plan needs at least one route")
        if not (self.run_corrected or self.run_uncorrected):
            raise ValidationError("plan needs at least one mode enabled")
        object.__setattr__(self, "routes", tuple(RouteKind(r) for r in self.routes))

    @property
    def modes(self) -> tuple:
        modes = []
        if self.run_corrected:
            modes.append(CORRECTED)
        if self.run_uncorrected:
            modes.append(UNCORRECTED)
        return tuple(modes)


@dataclass(frozen=True)
class TrialReport:
    """Aggregated similarity metrics for one (route, mode) pair."""

    route: RouteKind
    mode: str
    reports: tuple
    trajectories: tuple
    summary: AggregateReport
    case_histogram: dict
    route_lost: tuple
    errors: tuple


@dataclass(frozen=True)
class ExperimentSummary:
    plan: ExperimentPlan
    references: dict
    trial_reports: tuple
    overall: dict


def run_experiment(plan: ExperimentPlan) -> ExperimentSummary:
    """Run the full sweep; deterministic per plan.

    A trial that raises is recorded in its report's ``errors`` and skipped
    in the aggregates; the sweep itself never aborts. ``overall`` pools
    every successful trial of a mode across routes.
    """
    settings = plan.settings
    references: dict[RouteKind, Trajectory] = {}
    routes: dict[RouteKind, Route] = {}
    for kind in plan.routes:
        routes[kind] = make_route(kind)
        references[kind] = expert_rollout(routes[kind], settings)

    trial_reports = []
    pooled: dict[str, list[SimilarityReport]] = {m: [] for m in plan.modes}
    for kind in plan.routes:
        for mode in plan.modes:
            reports, trajectories, lost, errors = [], [], [], []
            cases: Counter = Counter()
            for t in range(plan.trials_per_route):
                seed = plan.base_seed + t
                try:
                    result = run_trial(routes[kind], mode, settings, seed)
                    rep = similarity_report(
                        result.trajectory, references[kind], plan.resample_count
                    )
                except Exception as exc:  # recorded, never fatal
                    errors.append((t, f"{type(exc).__name__}: {exc}"))
                    continue
                reports.append(rep)
                trajectories.append(result.trajectory)
                lost.append(result.route_lost)
                for rec in result.records:
                    if rec.outcome is not None:
                        cases[rec.outcome.case_id.value] += 1
            pooled[mode].extend(reports)
            trial_reports.append(
                TrialReport(
                    route=kind,
                    mode=mode,
                    reports=tuple(reports),
                    trajectories=tuple(trajectories),
                    summary=aggregate(reports) if reports else None,
                    case_histogram=dict(sorted(cases.items())),
                    route_lost=tuple(lost),
                    errors=tuple(errors),
                )
            )
    overall = {m: aggregate(reps) for m, reps in pooled.items() if reps}
    return ExperimentSummary(
        plan=plan,
        references=references,
        trial_reports=tuple(trial_reports),
        overall=overall,
    )
