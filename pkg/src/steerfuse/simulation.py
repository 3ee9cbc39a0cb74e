"""Desk-scale closed-loop driving simulator.

A kinematic bicycle vehicle follows one of three route archetypes
(straight, one-turn, two-turn) under a pure-pursuit expert. A configurable
noisy predictor stub emulates a dual-head model on top of the expert:
Gaussian regression noise with occasional gross faults on the continuous
head, and a distance-based softmax over bin centers on the discrete head.
Closed-loop trials run the stub either raw or through the confidence
correction, tracing the resulting trajectory.

Sign convention: positive steering increases heading at rate
(speed / wheelbase) * tan(steering * max_steer); "right" is the side the
vehicle curves toward under positive steering.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .binning import SteeringSpace, make_space
from .correction import CorrectionConfig, CorrectionOutcome, DualHeadOutput, correct
from .trajectory import Trajectory
from .validation import ValidationError, clamp, require_finite

SPEED_TIME_CONSTANT = 2.0  # s, first-order throttle/drag model
RECOVERY_DISTANCE = 50.0  # m, beyond this the route is considered lost
TURN_RADIUS = 30.0  # m
ARC_STEP = math.radians(1.5)
WAYPOINT_SPACING = 2.0  # m, straight-segment sampling
END_ARC_SLACK = 0.5  # m, arc-position margin that counts as route end

CORRECTED = "corrected"
UNCORRECTED = "uncorrected"


class RouteLostError(RuntimeError):
    """Vehicle strayed beyond the recovery distance from the route."""


class RouteKind(enum.Enum):
    STRAIGHT = "straight"
    ONE_TURN = "one-turn"
    TWO_TURN = "two-turn"


@dataclass(frozen=True)
class VehicleState:
    x: float
    y: float
    heading: float
    speed: float

    def __post_init__(self):
        for name in ("x", "y", "heading", "speed"):
            require_finite(getattr(self, name), name)
        if self.speed < 0:
            raise ValidationError(f"speed must be non-negative, got {self.speed}")


@dataclass(frozen=True)
class VehicleParams:
    wheelbase: float = 2.875
    max_steer: float = 0.6109  # rad, 35 deg; normalized steering +/-1 maps here
    target_speed: float = 8.0
    dt: float = 0.05

    def __post_init__(self):
        for name in ("wheelbase", "max_steer", "target_speed", "dt"):
            if require_finite(getattr(self, name), name) <= 0:
                raise ValidationError(f"{name} must be positive")


@dataclass(frozen=True)
class Route:
    """Lane centerline polyline; doubles as the expert's reference path."""

    kind: RouteKind
    waypoints: np.ndarray = field(repr=False)
    # derived, cached for point-to-route projection
    _cum: np.ndarray = field(init=False, repr=False)
    _seg_vec: np.ndarray = field(init=False, repr=False)
    _seg_len2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.asarray(self.waypoints, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise ValidationError(f"waypoints must have shape (n>=2, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("waypoints must be finite")
        seg = np.diff(pts, axis=0)
        seg_len = np.sqrt(np.sum(seg**2, axis=1))
        if seg_len.sum() <= 0:
            raise ValidationError("route arc length must be positive")
        pts.flags.writeable = False
        object.__setattr__(self, "waypoints", pts)
        object.__setattr__(self, "_cum", np.concatenate(([0.0], np.cumsum(seg_len))))
        object.__setattr__(self, "_seg_vec", seg)
        object.__setattr__(self, "_seg_len2", np.maximum(np.sum(seg**2, axis=1), 1e-300))

    @property
    def length(self) -> float:
        return float(self._cum[-1])

    def project(self, x: float, y: float) -> tuple[float, float]:
        """Arc position and distance of the nearest point on the polyline."""
        p = np.array([x, y])
        rel = p - self.waypoints[:-1]
        t = np.clip(np.sum(rel * self._seg_vec, axis=1) / self._seg_len2, 0.0, 1.0)
        foot = self.waypoints[:-1] + t[:, None] * self._seg_vec
        d2 = np.sum((foot - p) ** 2, axis=1)
        i = int(np.argmin(d2))
        seg_len = math.sqrt(float(self._seg_len2[i]))
        return float(self._cum[i] + t[i] * seg_len), math.sqrt(float(d2[i]))

    def point_at(self, s: float) -> tuple[float, float]:
        """Point at arc position ``s`` (clamped to the route extent)."""
        s = clamp(s, 0.0, self.length)
        return (
            float(np.interp(s, self._cum, self.waypoints[:, 0])),
            float(np.interp(s, self._cum, self.waypoints[:, 1])),
        )


def _append_line(points: list, heading: float, length: float) -> None:
    x0, y0 = points[-1]
    n = max(1, int(math.ceil(length / WAYPOINT_SPACING)))
    for k in range(1, n + 1):
        d = length * k / n
        points.append((x0 + d * math.cos(heading), y0 + d * math.sin(heading)))


def _append_arc(points: list, heading: float, radius: float, angle: float) -> float:
    """Append a circular arc turning by ``angle`` (signed); returns the new heading."""
    x0, y0 = points[-1]
    sign = 1.0 if angle > 0 else -1.0
    cx = x0 + radius * math.cos(heading + sign * math.pi / 2)
    cy = y0 + radius * math.sin(heading + sign * math.pi / 2)
    psi0 = heading - sign * math.pi / 2
    n = max(1, int(math.ceil(abs(angle) / ARC_STEP)))
    for k in range(1, n + 1):
        psi = psi0 + angle * k / n
        points.append((cx + radius * math.cos(psi), cy + radius * math.sin(psi)))
    return heading + angle


def make_route(kind: RouteKind) -> Route:
    """Construct one of the three route archetypes, starting at the origin
    heading along +x: a 200 m straight; 100 m + 90 deg arc (R = 30 m) +
    100 m; or the same with a 60 m link and an opposite 90 deg arc added.
    """
    kind = RouteKind(kind)
    points = [(0.0, 0.0)]
    heading = 0.0
    if kind is RouteKind.STRAIGHT:
        _append_line(points, heading, 200.0)
    elif kind is RouteKind.ONE_TURN:
        _append_line(points, heading, 100.0)
        heading = _append_arc(points, heading, TURN_RADIUS, math.pi / 2)
        _append_line(points, heading, 100.0)
    else:
        _append_line(points, heading, 100.0)
        heading = _append_arc(points, heading, TURN_RADIUS, math.pi / 2)
        _append_line(points, heading, 60.0)
        heading = _append_arc(points, heading, TURN_RADIUS, -math.pi / 2)
        _append_line(points, heading, 100.0)
    return Route(kind=kind, waypoints=np.array(points))


@dataclass(frozen=True)
class PredictorStubConfig:
    """Noise model replacing a trained dual-head network.

    ``softmax_temperature`` may be 0, meaning an exact one-hot at the
    nearest bin center (the zero-temperature limit of the softmax).
    """

    reg_noise_std: float = 0.05
    fault_rate: float = 0.05
    fault_magnitude: float = 0.8
    softmax_temperature: float = 0.005
    confusion_rate: float = 0.02
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("fault_rate", "confusion_rate"):
            v = require_finite(getattr(self, name), name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {v}")
        if require_finite(self.reg_noise_std, "reg_noise_std") < 0:
            raise ValidationError("reg_noise_std must be non-negative")
        if require_finite(self.softmax_temperature, "softmax_temperature") < 0:
            raise ValidationError("softmax_temperature must be non-negative")
        require_finite(self.fault_magnitude, "fault_magnitude")


def make_stub_rng(cfg: PredictorStubConfig) -> np.random.Generator:
    return np.random.default_rng(cfg.rng_seed)


def step_vehicle(
    state: VehicleState, steering_norm: float, throttle: float, params: VehicleParams
) -> VehicleState:
    """Advance one kinematic bicycle step of ``params.dt`` seconds.

    Heading integrates the yaw rate first and the position advances along
    the updated heading at the pre-update speed. Speed follows a
    first-order model (time constant 2 s): relaxing toward target speed
    at throttle 0.5, decaying toward rest at throttle 0.
    """
    steer = require_finite(steering_norm, "steering_norm")
    if not -1.0 <= steer <= 1.0:
        raise ValidationError(f"steering must lie in [-1, 1], got {steer}")
    if throttle not in (0.0, 0.5):
        raise ValidationError(f"throttle must be 0 or 0.5, got {throttle}")
    yaw_rate = state.speed / params.wheelbase * math.tan(steer * params.max_steer)
    heading = state.heading + yaw_rate * params.dt
    x = state.x + state.speed * math.cos(heading) * params.dt
    y = state.y + state.speed * math.sin(heading) * params.dt
    k = params.dt / SPEED_TIME_CONSTANT
    if throttle == 0.5:
        speed = state.speed + (params.target_speed - state.speed) * k
    else:
        speed = state.speed - state.speed * k
    return VehicleState(x=x, y=y, heading=heading, speed=max(speed, 0.0))


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def expert_steering(
    state: VehicleState,
    route: Route,
    lookahead: float,
    params: VehicleParams = VehicleParams(),
) -> float:
    """Pure-pursuit steering toward the point ``lookahead`` meters ahead
    along the route, in normalized units clamped to [-1, 1].

    Raises :class:`RouteLostError` once the vehicle is farther than the
    recovery distance from the route.
    """
    if lookahead <= 0:
        raise ValidationError(f"lookahead must be positive, got {lookahead}")
    s0, dist = route.project(state.x, state.y)
    if dist > RECOVERY_DISTANCE:
        raise RouteLostError(f"vehicle {dist:.1f} m from route (limit {RECOVERY_DISTANCE} m)")
    tx, ty = route.point_at(s0 + lookahead)
    dx, dy = tx - state.x, ty - state.y
    ld = math.hypot(dx, dy)
    if ld < 1e-9:
        return 0.0
    alpha = _wrap_angle(math.atan2(dy, dx) - state.heading)
    delta = math.atan2(2.0 * params.wheelbase * math.sin(alpha), ld)
    return clamp(delta / params.max_steer, -1.0, 1.0)


def _softmax_over_bins(space: SteeringSpace, value: float, temperature: float) -> np.ndarray:
    d2 = (space.centers - value) ** 2
    if temperature == 0.0:
        probs = np.zeros(space.n_bins)
        probs[int(np.argmin(d2))] = 1.0
        return probs
    logits = -d2 / temperature
    logits -= logits.max()
    p = np.exp(logits)
    return p / p.sum()


def predict(
    state: VehicleState,
    route: Route,
    cfg: PredictorStubConfig,
    space: SteeringSpace,
    rng: np.random.Generator,
    lookahead: float = 6.0,
    params: VehicleParams = VehicleParams(),
) -> DualHeadOutput:
    """Emulated dual-head prediction around the expert steering value.

    The continuous head is the expert value plus Gaussian noise, replaced
    by a gross fault of +/-fault_magnitude with probability fault_rate.
    The discrete head is a softmax over bin centers around the expert
    value, optionally shifted one bin with probability confusion_rate.
    Consumes exactly five random draws per call regardless of outcome.
    """
    expert = expert_steering(state, route, lookahead, params)
    noise = rng.normal()
    fault_u = rng.uniform()
    fault_sign = rng.integers(0, 2)
    confusion_u = rng.uniform()
    confusion_dir = rng.integers(0, 2)
    y_cont = expert + noise * cfg.reg_noise_std
    if fault_u < cfg.fault_rate:
        y_cont = (1.0 if fault_sign else -1.0) * cfg.fault_magnitude
    perceived = expert
    if confusion_u < cfg.confusion_rate:
        perceived += (1.0 if confusion_dir else -1.0) * space.width
    probs = _softmax_over_bins(space, perceived, cfg.softmax_temperature)
    return DualHeadOutput(y_cont=clamp(y_cont, -1.0, 1.0), probs=probs)


@dataclass(frozen=True)
class TrialSettings:
    """Everything a closed-loop trial needs besides route, mode, and seed."""

    vehicle: VehicleParams = VehicleParams()
    stub: PredictorStubConfig = PredictorStubConfig()
    correction: CorrectionConfig = CorrectionConfig()
    space: SteeringSpace = field(default_factory=lambda: make_space(11))
    lookahead: float = 6.0
    step_cap: int = 5000
    end_radius: float = 2.0


@dataclass(frozen=True)
class StepRecord:
    step: int
    out: DualHeadOutput
    outcome: CorrectionOutcome | None
    steering: float


@dataclass(frozen=True)
class TrialResult:
    trajectory: Trajectory
    records: tuple[StepRecord, ...]
    route_lost: bool
    mode: str


def initial_state(route: Route) -> VehicleState:
    p0, p1 = route.waypoints[0], route.waypoints[1]
    return VehicleState(
        x=float(p0[0]),
        y=float(p0[1]),
        heading=math.atan2(float(p1[1] - p0[1]), float(p1[0] - p0[0])),
        speed=0.0,
    )


def _reached_end(route: Route, state: VehicleState, end_radius: float) -> bool:
    ex, ey = route.waypoints[-1]
    if math.hypot(state.x - float(ex), state.y - float(ey)) < end_radius:
        return True
    s0, _ = route.project(state.x, state.y)
    return s0 >= route.length - END_ARC_SLACK


def run_trial(
    route: Route, mode: str, settings: TrialSettings, seed: int
) -> TrialResult:
    """One closed-loop rollout from route start to route end (or step cap).

    ``mode`` is "corrected" (steering passes through the confidence
    correction) or "uncorrected" (the raw continuous head is applied).
    The predictor and the correction draw from independent streams spawned
    from ``seed``, so both modes of the same seed see identical fault
    sequences. Losing the route terminates the trial with the flag set.
    """
    if mode not in (CORRECTED, UNCORRECTED):
        raise ValidationError(f"mode must be '{CORRECTED}' or '{UNCORRECTED}', got {mode!r}")
    pred_seq, corr_seq = np.random.SeedSequence(seed).spawn(2)
    rng_pred = np.random.default_rng(pred_seq)
    rng_corr = np.random.default_rng(corr_seq)
    state = initial_state(route)
    points = [(state.x, state.y)]
    records = []
    route_lost = False
    throttle_on = 0.5
    for step in range(settings.step_cap):
        throttle = throttle_on if state.speed < settings.vehicle.target_speed else 0.0
        try:
            out = predict(
                state,
                route,
                settings.stub,
                settings.space,
                rng_pred,
                lookahead=settings.lookahead,
                params=settings.vehicle,
            )
        except RouteLostError:
            route_lost = True
            break
        if mode == CORRECTED:
            outcome = correct(out, settings.space, settings.correction, rng_corr)
            steering = outcome.y_final
        else:
            outcome = None
            steering = out.y_cont
        state = step_vehicle(state, steering, throttle, settings.vehicle)
        points.append((state.x, state.y))
        records.append(StepRecord(step=step, out=out, outcome=outcome, steering=steering))
        if _reached_end(route, state, settings.end_radius):
            break
    return TrialResult(
        trajectory=Trajectory(points=np.array(points)),
        records=tuple(records),
        route_lost=route_lost,
        mode=mode,
    )


def expert_rollout(route: Route, settings: TrialSettings) -> Trajectory:
    """Deterministic expert-only rollout; defines the reference trajectory."""
    state = initial_state(route)
    points = [(state.x, state.y)]
    for _ in range(settings.step_cap):
        throttle = 0.5 if state.speed < settings.vehicle.target_speed else 0.0
        steering = expert_steering(state, route, settings.lookahead, settings.vehicle)
        state = step_vehicle(state, steering, throttle, settings.vehicle)
        points.append((state.x, state.y))
        if _reached_end(route, state, settings.end_radius):
            break
    return Trajectory(points=np.array(points))
