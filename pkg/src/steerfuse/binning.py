"""Discrete steering lattice over the normalized range [-1, 1].

Every other module shares this lattice: uniform bin edges, bin centers,
digitization of continuous steering values, and the raw-to-normalized
steering scaling used when ingesting recorded data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import ValidationError, clamp, require_finite

RAW_STEER_GAIN = 4.0


@dataclass(frozen=True)
class SteeringSpace:
    """Uniform bin lattice spanning [-1, 1].

    ``edges`` has ``n_bins + 1`` strictly increasing entries with
    ``edges[0] == -1`` and ``edges[-1] == 1``; ``centers`` holds the
    midpoint of each consecutive edge pair. Instances are immutable and
    safe to share across threads.
    """

    n_bins: int
    edges: np.ndarray = field(repr=False)
    centers: np.ndarray = field(repr=False)

    @property
    def width(self) -> float:
        return 2.0 / self.n_bins


def make_space(n_bins: int) -> SteeringSpace:
    """Build the uniform steering lattice with ``n_bins`` bins."""
    n = int(n_bins)
    if n != n_bins or n < 2:
        raise ValidationError(f"n_bins must be an integer >= 2, got {n_bins!r}")
    edges = np.linspace(-1.0, 1.0, n + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    edges.flags.writeable = False
    centers.flags.writeable = False
    return SteeringSpace(n_bins=n, edges=edges, centers=centers)


def digitize(space: SteeringSpace, value: float) -> int:
    """Map a steering value to its bin index.

    Bin ``i`` covers ``[edges[i], edges[i+1])``; the topmost bin is closed
    on the right so +1.0 maps to ``n_bins - 1``. Out-of-range values clamp
    to the boundary bins.
    """
    x = require_finite(value, "steering value")
    i = int(np.searchsorted(space.edges, x, side="right")) - 1
    return min(max(i, 0), space.n_bins - 1)


def digitize_all(space: SteeringSpace, values) -> np.ndarray:
    """Vectorized :func:`digitize` for a batch of finite values."""
    x = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValidationError("steering values must be finite")
    idx = np.searchsorted(space.edges, x, side="right") - 1
    return np.clip(idx, 0, space.n_bins - 1)


def scale_raw_steering(raw: float) -> float:
    """Scale a raw wheel angle into normalized [-1, 1] steering.

    Raw angles within [-0.25, 0.25] map linearly onto the full range;
    anything beyond saturates.
    """
    x = require_finite(raw, "raw steering")
    return clamp(x * RAW_STEER_GAIN, -1.0, 1.0)
