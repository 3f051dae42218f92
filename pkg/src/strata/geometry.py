"""Tangent spaces of rank strata and second-order tangency measurement.

At a rank-k point X the tangent space of the stratum is the set of
matrices sending the kernel of X into the range of X.  Its dimension is
(m + n - k) * k for n x m operators, and a direction inside it perturbs
the (k+1)-th singular value only to second order, which is what
``tangency_order`` measures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .subspaces import (
    DEFAULT_TOL,
    Subspace,
    ToleranceConfig,
    as_matrix,
    kernel_basis,
    orthogonal_complement,
    principal_angles,
    range_basis,
    rank_of,
)

__all__ = [
    "StratumPoint",
    "TangentBasis",
    "dim_fk",
    "tangent_basis",
    "tangent_violation",
    "tangency_order",
    "EXACT",
]

EXACT = "exact"  # sentinel: the perturbed curve never left the stratum


def dim_fk(m: int, n: int, k: int) -> int:
    """Dimension of the stratum of rank-k operators from R^m to R^n."""
    if m < 1 or n < 1:
        raise ValueError("ambient dimensions must be positive")
    if not 0 <= k <= min(m, n):
        raise ValueError(f"rank {k} out of range for a {n}x{m} operator")
    return (m + n - k) * k


@dataclass(frozen=True)
class StratumPoint:
    """A rank-k matrix together with its kernel and range subspaces."""

    op: np.ndarray
    k: int
    kernel: Subspace
    range: Subspace

    def __post_init__(self):
        op = as_matrix(self.op)
        object.__setattr__(self, "op", op)
        n, m = op.shape
        if not 0 <= self.k <= min(m, n):
            raise ValueError("declared rank out of range for the shape")
        u, s, vt = np.linalg.svd(op)
        # the declared rank must be a numerical rank at some cutoff: a
        # strict singular-value drop right after position k
        if self.k > 0 and (s.size < self.k or s[self.k - 1] == 0.0):
            raise ValueError("declared rank disagrees with the matrix")
        if self.k < s.size and s[self.k] > 0.0 and not s[self.k] < s[self.k - 1 if self.k else 0]:
            raise ValueError("no singular-value gap at the declared rank")
        ker = Subspace(m, vt[self.k :, :].T)
        rng = Subspace(n, u[:, : self.k])
        for mine, computed, name in ((self.kernel, ker, "kernel"), (self.range, rng, "range")):
            if mine.dim != computed.dim:
                raise ValueError(f"{name} subspace has the wrong dimension")
            if mine.dim > 0 and float(np.max(principal_angles(mine, computed))) > 1e-8:
                raise ValueError(f"{name} subspace disagrees with the matrix")

    @classmethod
    def at(cls, op, tol: ToleranceConfig = DEFAULT_TOL) -> "StratumPoint":
        op = as_matrix(op)
        return cls(op, rank_of(op, tol), kernel_basis(op, tol), range_basis(op, tol))

    @property
    def shape(self) -> tuple[int, int]:
        return self.op.shape


@dataclass(frozen=True)
class TangentBasis:
    """Basis matrices spanning the tangent space at a stratum point."""

    at: StratumPoint
    basis: tuple[np.ndarray, ...]
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        if len(self.basis) != self.dim:
            raise ValueError("dimension disagrees with the basis length")


def tangent_basis(x: StratumPoint, tol: ToleranceConfig = DEFAULT_TOL) -> TangentBasis:
    """Orthonormal basis of {V : V kernel(X) inside range(X)}.

    Built in coordinates adapted to the four subspaces (kernel, row space,
    range, corange): every block is free except the one mapping the kernel
    outside the range.  Rank-one products of the adapted basis vectors are
    orthonormal in the Frobenius inner product, so the count is exact.
    """
    n, m = x.shape
    ker = x.kernel.basis
    row = orthogonal_complement(x.kernel).basis
    rng = x.range.basis
    corange = orthogonal_complement(x.range).basis
    elements = []
    for left in (rng, corange):
        for i in range(left.shape[1]):
            for j in range(row.shape[1]):
                elements.append(np.outer(left[:, i], row[:, j]))
        if left is rng:
            for i in range(left.shape[1]):
                for j in range(ker.shape[1]):
                    elements.append(np.outer(left[:, i], ker[:, j]))
    return TangentBasis(x, tuple(elements), len(elements))


def tangent_violation(x: StratumPoint, v) -> float:
    """How far V sends the kernel of X outside the range of X (max norm)."""
    v = as_matrix(v)
    if v.shape != x.shape:
        raise ValueError("direction must match the stratum point's shape")
    if x.kernel.dim == 0:
        return 0.0
    image = v @ x.kernel.basis
    residual = image - x.range.basis @ (x.range.basis.T @ image)
    return float(np.max(np.abs(residual))) if residual.size else 0.0


def tangency_order(x: StratumPoint, v, t_grid=None):
    """Fitted decay order of the (k+1)-th singular value along X + tV.

    Returns the least-squares slope of log sigma_{k+1} against log t over
    the grid points where sigma_{k+1} sits above the machine-noise floor,
    or the sentinel ``EXACT`` when the whole curve stays on the stratum to
    machine precision.  Tangent directions come out near 2, transverse
    directions near 1.
    """
    v = as_matrix(v)
    if v.shape != x.shape:
        raise ValueError("direction must match the stratum point's shape")
    if t_grid is None:
        t_grid = np.logspace(-1, -4, 13)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size < 2 or np.any(t_grid <= 0):
        raise ValueError("degenerate grid: need at least two positive scales")
    if np.max(t_grid) / np.min(t_grid) < 100.0:
        raise ValueError("degenerate grid: scales must span at least two decades")
    k = x.k
    eps = np.finfo(float).eps
    logs_t, logs_s = [], []
    for t in t_grid:
        s = np.linalg.svd(x.op + t * v, compute_uv=False)
        sigma_top = s[0] if s.size else 0.0
        sigma_next = s[k] if s.size > k else 0.0
        if sigma_next > 1e3 * eps * sigma_top:
            logs_t.append(np.log(t))
            logs_s.append(np.log(sigma_next))
    if len(logs_t) < 2:
        return EXACT
    slope = np.polyfit(logs_t, logs_s, 1)[0]
    return float(slope)
