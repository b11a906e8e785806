"""Gaussian RBF network evaluation and ridge-regularized weight fitting.

Hidden units are Gaussian kernels exp(-||x - c||^2 / r) on fixed centers;
the output layer is a linear combiner y = sum_i w_i * phi_i(x) + b fitted
by regularized linear least squares. Centers and widths come from
clustering; only the output layer is trained.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadWidth, DimensionMismatch, SolveFailure


@dataclass(frozen=True)
class RbfNetwork:
    """Immutable fitted network: centers, widths, output weights and bias."""

    centers: np.ndarray   # M x D
    widths: np.ndarray    # M, strictly positive
    weights: np.ndarray   # M x C
    bias: np.ndarray      # C

    def __post_init__(self):
        if self.centers.ndim != 2 or self.centers.shape[0] < 1:
            raise ValueError("need at least one center")
        if self.widths.shape != (self.centers.shape[0],):
            raise DimensionMismatch("one width per center required")
        if np.any(self.widths <= 0):
            raise BadWidth("all widths must be positive")
        if self.weights.shape != (self.centers.shape[0], self.bias.shape[0]):
            raise DimensionMismatch("weights must be M x C with bias length C")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ValueError("weights and bias must be finite")

    @property
    def center_count(self) -> int:
        return self.centers.shape[0]

    @property
    def input_dim(self) -> int:
        return self.centers.shape[1]

    @property
    def output_count(self) -> int:
        return self.bias.shape[0]


def gaussian_kernel(x, center, width: float) -> float:
    """exp(-||x - center||^2 / width); 1.0 at the center, always in (0, 1]."""
    x = np.asarray(x, dtype=np.float64)
    center = np.asarray(center, dtype=np.float64)
    if x.shape != center.shape:
        raise DimensionMismatch(
            f"input shape {x.shape} does not match center shape {center.shape}")
    if width <= 0:
        raise BadWidth(f"kernel width must be positive, got {width}")
    diff = x - center
    return float(np.exp(-np.dot(diff, diff) / width))


def kernel_matrix(data, centers, widths) -> np.ndarray:
    """Gaussian activations of every data row against every center (T x M)."""
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    widths = np.asarray(widths, dtype=np.float64)
    if data.shape[1] != centers.shape[1]:
        raise DimensionMismatch(
            f"data dim {data.shape[1]} != center dim {centers.shape[1]}")
    if np.any(widths <= 0):
        raise BadWidth("all widths must be positive")
    d2 = (np.einsum("ij,ij->i", data, data)[:, None]
          + np.einsum("ij,ij->i", centers, centers)[None, :]
          - 2.0 * (data @ centers.T))
    np.maximum(d2, 0.0, out=d2)
    return np.exp(-d2 / widths[None, :])


def design_matrix(data, centers, widths) -> np.ndarray:
    """Kernel activations with a trailing all-ones bias column (T x (M+1))."""
    phi = kernel_matrix(data, centers, widths)
    return np.hstack([phi, np.ones((phi.shape[0], 1))])


def fit_weights(design: np.ndarray, targets: np.ndarray,
                ridge_lambda: float) -> tuple[np.ndarray, np.ndarray]:
    """Solve the regularized output layer from a design matrix.

    Minimizes ||design @ theta - targets||^2 + lambda * ||theta||^2 with
    the bias row (last design column) exempt from the penalty, via the
    normal equations. With lambda = 0 a rank-deficient system falls back
    to the minimum-norm pseudo-inverse solution.

    Returns (weights, bias): the first M rows of theta and the last row.
    """
    design = np.asarray(design, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if targets.ndim == 1:
        targets = targets[:, None]
    if design.shape[0] != targets.shape[0]:
        raise DimensionMismatch(
            f"design has {design.shape[0]} rows, targets {targets.shape[0]}")
    if ridge_lambda < 0:
        raise ValueError("ridge_lambda must be non-negative")

    if ridge_lambda > 0:
        gram = design.T @ design
        rhs = design.T @ targets
        penalty = np.full(design.shape[1], ridge_lambda)
        penalty[-1] = 0.0  # bias unpenalized
        theta = np.linalg.solve(gram + np.diag(penalty), rhs)
    else:
        # SVD least squares: minimum-norm (pseudo-inverse) solution when
        # the design is rank deficient, exact solve when it is square.
        theta = np.linalg.lstsq(design, targets, rcond=None)[0]
    if not np.all(np.isfinite(theta)):
        raise SolveFailure("least-squares solve produced non-finite values")
    return theta[:-1], theta[-1]


def forward(x, network: RbfNetwork) -> np.ndarray:
    """Network outputs for one input vector: weighted kernel sum plus bias."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != network.input_dim:
        raise DimensionMismatch(
            f"expected a {network.input_dim}-vector, got shape {x.shape}")
    phi = kernel_matrix(x[None, :], network.centers, network.widths)[0]
    return phi @ network.weights + network.bias


def forward_batch(data, network: RbfNetwork) -> np.ndarray:
    """Network outputs for every row of ``data`` (T x C)."""
    phi = kernel_matrix(data, network.centers, network.widths)
    return phi @ network.weights + network.bias
