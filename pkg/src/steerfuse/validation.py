"""Input validation helpers shared across the package."""

from __future__ import annotations

import math

import numpy as np

PROB_SUM_TOL = 1e-6


class ValidationError(ValueError):
    """Raised when an input violates a documented contract."""


def require_finite(value: float, name: str) -> float:
    """Coerce to float and reject NaN/inf."""
    x = float(value)
    if not math.isfinite(x):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return x


def as_probabilities(probs, tol: float = PROB_SUM_TOL) -> np.ndarray:
    """Validate a probability vector: finite, non-negative, sums to 1 within tol."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValidationError(f"probabilities must be a non-empty 1-D vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValidationError("probabilities must be finite")
    if np.any(p < 0):
        raise ValidationError(f"probabilities must be non-negative, min={p.min()}")
    total = float(p.sum())
    if abs(total - 1.0) > tol:
        raise ValidationError(f"probabilities must sum to 1 within {tol}, got {total}")
    return p


def as_points(curve, name: str = "trajectory") -> np.ndarray:
    """Coerce to an (n, 2) float array of finite planar points, n >= 2."""
    pts = np.asarray(getattr(curve, "points", curve), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError(f"{name} must have shape (n, 2), got {pts.shape}")
    if pts.shape[0] < 2:
        raise ValidationError(f"{name} needs at least 2 points, got {pts.shape[0]}")
    if not np.all(np.isfinite(pts)):
        raise ValidationError(f"{name} contains non-finite coordinates")
    return pts


def clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value
