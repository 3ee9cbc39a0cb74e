"""Route-similarity metrics between planar trajectories.

Four metrics compare a driven path against a reference path: discrete
Frechet distance (worst-case deviation over monotone couplings), dynamic
time warping distance (summed pointwise cost over admissible warpings),
area between curves (after arc-length resampling to a common count), and
a relative arc-length deviation. All are non-negative and zero on
identical inputs.

Pointwise cost is Euclidean, computed as sqrt(dx*dx + dy*dy) so results
are bit-reproducible against enumeration oracles using the same
expression.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .validation import ValidationError, as_points

DEFAULT_RESAMPLE_COUNT = 200


@dataclass(frozen=True)
class Trajectory:
    """Ordered 2-D positions (meters) traced over one trial.

    Consecutive duplicate points are permitted but the overall arc length
    must be positive.
    """

    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = as_points(self.points)
        if arc_length(pts) <= 0.0:
            raise ValidationError("trajectory arc length must be positive")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class SimilarityReport:
    frechet: float
    dtw: float
    abc: float
    cl: float

    def as_dict(self) -> dict:
        return {"frechet": self.frechet, "dtw": self.dtw, "abc": self.abc, "cl": self.cl}


@dataclass(frozen=True)
class AggregateReport:
    mean: SimilarityReport
    std: SimilarityReport


def arc_length(curve) -> float:
    pts = as_points(curve)
    return float(np.sum(np.sqrt(np.sum(np.diff(pts, axis=0) ** 2, axis=1))))


def _cost_matrix(a: np.ndarray, b: np.ndarray) -> list:
    dx = a[:, 0][:, None] - b[:, 0][None, :]
    dy = a[:, 1][:, None] - b[:, 1][None, :]
    return np.sqrt(dx * dx + dy * dy).tolist()


def frechet_distance(a, b) -> float:
    """Discrete Frechet distance via the standard O(n*m) dynamic program."""
    pa, pb = as_points(a), as_points(b)
    cost = _cost_matrix(pa, pb)
    n, m = pa.shape[0], pb.shape[0]
    prev = [0.0] * m
    for i in range(n):
        ci = cost[i]
        cur = [0.0] * m
        if i == 0:
            run = ci[0]
            cur[0] = run
            for j in range(1, m):
                c = ci[j]
                run = run if run > c else c
                cur[j] = run
        else:
            c = ci[0]
            up = prev[0]
            cur[0] = up if up > c else c
            for j in range(1, m):
                up = prev[j]
                diag = prev[j - 1]
                left = cur[j - 1]
                best = up if up < diag else diag
                if left < best:
                    best = left
                c = ci[j]
                cur[j] = best if best > c else c
        prev = cur
    return prev[m - 1]


def dtw_distance(a, b) -> float:
    """Dynamic time warping distance with Euclidean cost and sum aggregation."""
    pa, pb = as_points(a), as_points(b)
    cost = _cost_matrix(pa, pb)
    n, m = pa.shape[0], pb.shape[0]
    prev = [0.0] * m
    for i in range(n):
        ci = cost[i]
        cur = [0.0] * m
        if i == 0:
            run = ci[0]
            cur[0] = run
            for j in range(1, m):
                run = run + ci[j]
                cur[j] = run
        else:
            cur[0] = prev[0] + ci[0]
            for j in range(1, m):
                up = prev[j]
                diag = prev[j - 1]
                left = cur[j - 1]
                best = up if up < diag else diag
                if left < best:
                    best = left
                cur[j] = best + ci[j]
        prev = cur
    return prev[m - 1]


def resample_by_arc_length(curve, count: int) -> np.ndarray:
    """Resample a polyline to ``count`` points uniformly spaced in arc length."""
    pts = as_points(curve)
    if count < 2:
        raise ValidationError(f"resample count must be >= 2, got {count}")
    seg = np.sqrt(np.sum(np.diff(pts, axis=0) ** 2, axis=1))
    total = float(seg.sum())
    if total <= 0.0:
        raise ValidationError("cannot resample a zero-length curve")
    keep = np.concatenate(([True], seg > 0))  # drop duplicate-point plateaus
    pts = pts[keep]
    s = np.concatenate(([0.0], np.cumsum(np.sqrt(np.sum(np.diff(pts, axis=0) ** 2, axis=1)))))
    targets = np.linspace(0.0, s[-1], count)
    return np.column_stack((np.interp(targets, s, pts[:, 0]), np.interp(targets, s, pts[:, 1])))


def _tri_area(p, q, r) -> np.ndarray:
    return 0.5 * np.abs(
        (q[:, 0] - p[:, 0]) * (r[:, 1] - p[:, 1]) - (q[:, 1] - p[:, 1]) * (r[:, 0] - p[:, 0])
    )


def area_between_curves(a, b, resample_count: int = DEFAULT_RESAMPLE_COUNT) -> float:
    """Total area of the quadrilateral strip between two resampled curves.

    Both curves are resampled to ``resample_count`` points by arc length;
    each quadrilateral (a_k, a_k+1, b_k+1, b_k) is split into two
    triangles along both diagonals and the two absolute-area splits are
    averaged, which keeps the result exactly symmetric under argument
    swap (the splits exchange roles).
    """
    ra = resample_by_arc_length(a, resample_count)
    rb = resample_by_arc_length(b, resample_count)
    a0, a1 = ra[:-1], ra[1:]
    b0, b1 = rb[:-1], rb[1:]
    split1 = _tri_area(a0, a1, b1) + _tri_area(a0, b1, b0)
    split2 = _tri_area(b0, b1, a1) + _tri_area(b0, a1, a0)
    return float(np.sum((split1 + split2) * 0.5))


def curve_length_measure(a, b) -> float:
    """Relative arc-length deviation |len(a) - len(b)| / len(b); b is the reference."""
    la = arc_length(a)
    lb = arc_length(b)
    if lb <= 0.0:
        raise ValidationError("reference curve must have positive arc length")
    return abs(la - lb) / lb


def similarity_report(a, b, resample_count: int = DEFAULT_RESAMPLE_COUNT) -> SimilarityReport:
    """All four metrics of ``a`` against reference ``b``."""
    return SimilarityReport(
        frechet=frechet_distance(a, b),
        dtw=dtw_distance(a, b),
        abc=area_between_curves(a, b, resample_count),
        cl=curve_length_measure(a, b),
    )


def aggregate(reports: list[SimilarityReport]) -> AggregateReport:
    """Per-metric arithmetic mean and population standard deviation."""
    if not reports:
        raise ValidationError("cannot aggregate an empty report list")
    table = np.array([[r.frechet, r.dtw, r.abc, r.cl] for r in reports], dtype=float)
    mean = table.mean(axis=0)
    std = table.std(axis=0)  # population (ddof=0)
    return AggregateReport(mean=SimilarityReport(*mean), std=SimilarityReport(*std))
