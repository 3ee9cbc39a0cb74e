"""Confidence-guided correction of a dual-head steering prediction.

A dual-head model emits a continuous steering value and a probability
distribution over discrete steering bins. Each prediction is summarized by
the classification confidence (max probability), its entropy, and whether
the continuous value lands in the argmax bin or an immediate neighbor.
Those three signals route every prediction through exactly one of four
correction cases:

* Case1 - confident and aligned: keep the continuous value.
* Case2 - confident but misaligned: resample uniformly inside the argmax
  bin and average.
* Case3 - diffuse (low confidence, high entropy): keep the continuous
  value.
* Case4 - everything else: average normal draws centred on the continuous
  value with the categorical variance over bin centers as spread.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .binning import SteeringSpace, digitize
from .validation import PROB_SUM_TOL, ValidationError, as_probabilities, clamp, require_finite

DEFAULT_TAU = 0.9
DEFAULT_LOW_CONF = 0.5
DEFAULT_ENTROPY_GATE = 1.5
DEFAULT_SAMPLE_COUNT = 32
DEFAULT_EPSILON = 1e-12


class CorrectionCase(enum.Enum):
    """Which correction branch fired, in evaluation order."""

    RETAIN_ALIGNED = "Case1"
    RESAMPLE_CLASS_BIN = "Case2"
    RETAIN_UNCERTAIN = "Case3"
    SMOOTH_REGRESSION = "Case4"


@dataclass(frozen=True)
class DualHeadOutput:
    """One timestep's (continuous value, bin distribution) pair.

    ``y_cont`` is clamped to [-1, 1] at ingestion; ``probs`` must be a
    valid probability vector (sum within 1e-6 of 1).
    """

    y_cont: float
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        y = require_finite(self.y_cont, "y_cont")
        object.__setattr__(self, "y_cont", clamp(y, -1.0, 1.0))
        p = as_probabilities(self.probs)
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True)
class ConfidenceSummary:
    c_max: float
    i_max: int
    h: float
    i_cont: int
    aligned: bool


@dataclass(frozen=True)
class CorrectionOutcome:
    y_final: float
    case_id: CorrectionCase
    summary: ConfidenceSummary
    sampled: bool


@dataclass(frozen=True)
class CorrectionConfig:
    tau: float = DEFAULT_TAU
    low_conf: float = DEFAULT_LOW_CONF
    entropy_gate: float = DEFAULT_ENTROPY_GATE
    sample_count: int = DEFAULT_SAMPLE_COUNT
    epsilon: float = DEFAULT_EPSILON
    rng_seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.low_conf <= self.tau <= 1.0):
            raise ValidationError(
                f"need 0 < low_conf <= tau <= 1, got low_conf={self.low_conf}, tau={self.tau}"
            )
        if self.entropy_gate <= 0:
            raise ValidationError(f"entropy_gate must be positive, got {self.entropy_gate}")
        if self.sample_count < 1:
            raise ValidationError(f"sample_count must be >= 1, got {self.sample_count}")
        if self.epsilon < 0:
            raise ValidationError(f"epsilon must be non-negative, got {self.epsilon}")


def make_rng(cfg: CorrectionConfig) -> np.random.Generator:
    """Fresh deterministic random source for ``cfg.rng_seed``."""
    return np.random.default_rng(cfg.rng_seed)


def entropy(probs, epsilon: float = DEFAULT_EPSILON) -> float:
    """Entropy in nats of a bin distribution, with an additive log guard.

    Returns -sum(p * ln(p + epsilon)); zero entries contribute exactly 0,
    so the result can undershoot 0 (or overshoot ln n) by at most
    n * epsilon.
    """
    p = as_probabilities(probs, tol=PROB_SUM_TOL)
    return float(-np.sum(p * np.log(p + epsilon)))


def summarize(out: DualHeadOutput, space: SteeringSpace, cfg: CorrectionConfig) -> ConfidenceSummary:
    """Compute the confidence signals that drive case routing.

    Argmax ties break to the lowest index; the alignment neighborhood is
    {i_max - 1, i_max, i_max + 1} clipped to the lattice.
    """
    if out.probs.shape[0] != space.n_bins:
        raise ValidationError(
            f"probs length {out.probs.shape[0]} does not match lattice with {space.n_bins} bins"
        )
    i_max = int(np.argmax(out.probs))
    c_max = float(out.probs[i_max])
    h = entropy(out.probs, cfg.epsilon)
    i_cont = digitize(space, out.y_cont)
    aligned = abs(i_cont - i_max) <= 1
    return ConfidenceSummary(c_max=c_max, i_max=i_max, h=h, i_cont=i_cont, aligned=aligned)


def categorical_variance(probs: np.ndarray, centers: np.ndarray) -> float:
    """Variance of the bin distribution taken over bin centers (steering units^2)."""
    mu = float(np.dot(probs, centers))
    return float(np.dot(probs, (centers - mu) ** 2))


def correct(
    out: DualHeadOutput,
    space: SteeringSpace,
    cfg: CorrectionConfig,
    rng: np.random.Generator,
) -> CorrectionOutcome:
    """Route one prediction through the four-case correction policy.

    Cases are evaluated in order and exactly one fires. Only Cases 2 and 4
    consume random draws (a single batch of ``cfg.sample_count`` values);
    the final value is clamped to [-1, 1] after any sampling. A zero
    categorical variance degenerates Case4 to the unmodified continuous
    value.
    """
    s = summarize(out, space, cfg)
    if s.c_max >= cfg.tau and s.aligned:
        return CorrectionOutcome(out.y_cont, CorrectionCase.RETAIN_ALIGNED, s, sampled=False)
    if s.c_max >= cfg.tau:
        a = float(space.edges[s.i_max])
        b = float(space.edges[s.i_max + 1])
        y = float(np.mean(rng.uniform(a, b, size=cfg.sample_count)))
        return CorrectionOutcome(
            clamp(y, -1.0, 1.0), CorrectionCase.RESAMPLE_CLASS_BIN, s, sampled=True
        )
    if s.c_max < cfg.low_conf and s.h > cfg.entropy_gate:
        return CorrectionOutcome(out.y_cont, CorrectionCase.RETAIN_UNCERTAIN, s, sampled=False)
    var = categorical_variance(out.probs, space.centers)
    if var == 0.0:
        return CorrectionOutcome(out.y_cont, CorrectionCase.SMOOTH_REGRESSION, s, sampled=False)
    y = float(np.mean(rng.normal(out.y_cont, math.sqrt(var), size=cfg.sample_count)))
    return CorrectionOutcome(
        clamp(y, -1.0, 1.0), CorrectionCase.SMOOTH_REGRESSION, s, sampled=True
    )
