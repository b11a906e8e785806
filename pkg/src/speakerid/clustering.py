"""Subtractive clustering for RBF center selection.

Centers are chosen incrementally by data-point potential: every point
starts with a potential that counts its neighbors within the cluster
radius, the highest-potential point becomes a center, and the potential
of nearby points is subtracted before the next pick. No cluster count is
fixed in advance; accept/reject ratios against the first potential stop
the process.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadRadius, BadRatios, EmptyData

# Neighborhood shrink factor: the subtraction radius is 1.5x the accept
# radius, which keeps newly found centers from crowding each other.
SUBTRACT_RADIUS_FACTOR = 1.5


@dataclass(frozen=True)
class ClusterResult:
    """Selected centers with their potentials at selection time."""

    centers: np.ndarray        # K x D, each row is one of the input points
    potentials: np.ndarray     # K, strictly positive, non-increasing
    radius: float

    @property
    def count(self) -> int:
        return self.centers.shape[0]


def _initial_potentials(data: np.ndarray, alpha: float) -> np.ndarray:
    """P(i) = sum_j exp(-alpha * ||x_i - x_j||^2), chunked to bound memory."""
    n = data.shape[0]
    sq = np.einsum("ij,ij->i", data, data)
    potentials = np.empty(n)
    chunk = max(1, (1 << 22) // max(n, 1))  # ~32 MB of float64 per block
    for start in range(0, n, chunk):
        block = data[start:start + chunk]
        d2 = sq[start:start + chunk, None] + sq[None, :] - 2.0 * (block @ data.T)
        np.maximum(d2, 0.0, out=d2)  # clamp negative rounding residue
        potentials[start:start + chunk] = np.exp(-alpha * d2).sum(axis=1)
    return potentials


def subtractive_cluster(data, radius: float, accept_ratio: float = 0.5,
                        reject_ratio: float = 0.15) -> ClusterResult:
    """Select cluster centers from the data points themselves.

    Args:
        data: T x D matrix of points (rows). The radius is interpreted in
            this space, so callers normally pass normalized features.
        radius: accept radius r_a; potentials use alpha = 4 / r_a^2.
        accept_ratio: candidates above this fraction of the first
            potential are accepted outright.
        reject_ratio: candidates below this fraction stop the search.

    Candidates between the two ratios are accepted only when
    d_min / r_a + P / P_1 >= 1, where d_min is the distance to the nearest
    existing center; otherwise their potential is zeroed and the search
    continues. Ties on the maximum potential go to the lowest row index.

    Returns a ClusterResult whose centers are rows of ``data``.
    """
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    if data.size == 0:
        raise EmptyData("clustering requires at least one data point")
    if radius <= 0:
        raise BadRadius(f"cluster radius must be positive, got {radius}")
    if not 0.0 < reject_ratio < accept_ratio <= 1.0:
        raise BadRatios(
            f"require 0 < reject_ratio < accept_ratio <= 1, got "
            f"{reject_ratio}, {accept_ratio}")

    alpha = 4.0 / radius**2
    beta = 4.0 / (SUBTRACT_RADIUS_FACTOR * radius) ** 2
    potentials = _initial_potentials(data, alpha)

    center_idx: list[int] = []
    selected_potentials: list[float] = []
    first_potential = None

    while True:
        idx = int(np.argmax(potentials))
        p = float(potentials[idx])
        if first_potential is None:
            pass  # first center is unconditional
        elif p > accept_ratio * first_potential:
            pass
        elif p < reject_ratio * first_potential:
            break
        else:
            d_min = np.sqrt(np.min(np.sum(
                (data[center_idx] - data[idx]) ** 2, axis=1)))
            if d_min / radius + p / first_potential < 1.0:
                potentials[idx] = 0.0
                continue
        if first_potential is None:
            first_potential = p
        center_idx.append(idx)
        selected_potentials.append(p)
        d2 = np.sum((data - data[idx]) ** 2, axis=1)
        potentials -= p * np.exp(-beta * d2)

    return ClusterResult(centers=data[center_idx].copy(),
                         potentials=np.array(selected_potentials),
                         radius=float(radius))


def estimate_widths(result: ClusterResult, spread: float = 1.0) -> np.ndarray:
    """Kernel width per center: squared distance to the nearest other center.

    Widths carry squared-distance units because the Gaussian kernel divides
    by the width directly. A single center falls back to the cluster radius
    squared. ``spread`` scales the nearest-neighbor distance before squaring.
    """
    centers = result.centers
    k = result.count
    if k == 1:
        return np.array([result.radius**2])
    diff = centers[:, None, :] - centers[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    np.fill_diagonal(dist, np.inf)
    nearest = dist.min(axis=1)
    return (spread * nearest) ** 2
