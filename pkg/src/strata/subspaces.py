"""Tolerance-aware subspace arithmetic over real coordinate spaces.

Subspaces are stored as orthonormal basis matrices fixed at construction,
so every coordinate representation derived from them (graph coefficients,
projector formulas) is reproducible run to run.  The zero subspace is a
first-class value with a (n, 0) basis, which lets degenerate cases flow
through callers without special branches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DirectSumError

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "Subspace",
    "DirectSumCheck",
    "rank_of",
    "kernel_basis",
    "range_basis",
    "is_direct_sum",
    "orthogonal_complement",
    "sum_and_intersection",
    "common_complement",
    "principal_angles",
    "subspaces_equal",
]

ANGLE_TOL = 1e-8  # max principal angle below which two subspaces are "equal"


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d float array, rejecting anything else."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical policy knobs.

    rank_rel_tol: singular values below ``rank_rel_tol * sigma_max`` count
        as zero when deciding rank.
    membership_cond_max: largest condition number of a concatenated basis
        matrix still accepted as evidence of a direct sum.
    """

    rank_rel_tol: float = 1e-10
    membership_cond_max: float = 1e8

    def __post_init__(self):
        if not 0.0 < self.rank_rel_tol < 1.0:
            raise ValueError("rank_rel_tol must lie strictly between 0 and 1")
        if self.membership_cond_max <= 1.0:
            raise ValueError("membership_cond_max must exceed 1")


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of R^n held as an orthonormal basis matrix.

    ``basis`` has shape (ambient_dim, dim).  dim == 0 encodes the zero
    subspace.  Constructing directly requires orthonormal columns; use
    :meth:`from_columns` for arbitrary spanning sets.
    """

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        b = as_matrix(self.basis)
        object.__setattr__(self, "basis", b)
        if self.ambient_dim < 1:
            raise ValueError("ambient_dim must be positive")
        if b.shape[0] != self.ambient_dim:
            raise ValueError(
                f"basis has {b.shape[0]} rows, ambient dimension is {self.ambient_dim}"
            )
        if b.shape[1] > self.ambient_dim:
            raise ValueError("subspace dimension exceeds ambient dimension")
        if b.shape[1] > 0:
            gram = b.T @ b
            if np.max(np.abs(gram - np.eye(b.shape[1]))) > 1e-8:
                raise ValueError(
                    "basis columns are not orthonormal; use Subspace.from_columns"
                )

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def from_columns(cls, columns, tol: ToleranceConfig = DEFAULT_TOL) -> "Subspace":
        """Build the span of linearly independent columns.

        Raises ValueError when the columns are numerically dependent, i.e.
        the smallest singular value falls below the rank cutoff.
        """
        m = as_matrix(columns)
        n, d = m.shape
        if d == 0:
            return cls(n, np.zeros((n, 0)))
        s = np.linalg.svd(m, compute_uv=False)
        if s[-1] <= tol.rank_rel_tol * s[0]:
            raise ValueError("columns are numerically linearly dependent")
        q, _ = np.linalg.qr(m)
        return cls(n, q)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.zeros((ambient_dim, 0)))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim))

    @classmethod
    def span(cls, *vectors, tol: ToleranceConfig = DEFAULT_TOL) -> "Subspace":
        """Span of the given (independent) vectors."""
        cols = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
        return cls.from_columns(cols, tol)

    def orthogonal_projector(self) -> np.ndarray:
        return self.basis @ self.basis.T


@dataclass(frozen=True)
class DirectSumCheck:
    """Outcome of a direct-sum test plus its numerical evidence."""

    ok: bool
    condition_number: float
    dim_total: int
    ambient_dim: int

    def __bool__(self) -> bool:
        return self.ok


def rank_of(a, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Numerical rank: count of singular values above the relative cutoff."""
    m = as_matrix(a)
    if m.size == 0:
        raise ValueError("matrix must be nonempty")
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_rel_tol * s[0]))


def kernel_basis(a, tol: ToleranceConfig = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the null space, as a subspace of the domain."""
    m = as_matrix(a)
    if m.size == 0:
        raise ValueError("matrix must be nonempty")
    _, s, vt = np.linalg.svd(m, full_matrices=True)
    r = 0
    if s.size and s[0] > 0.0:
        r = int(np.count_nonzero(s > tol.rank_rel_tol * s[0]))
    return Subspace(m.shape[1], vt[r:, :].T)


def range_basis(a, tol: ToleranceConfig = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the column space, as a subspace of the codomain."""
    m = as_matrix(a)
    if m.size == 0:
        raise ValueError("matrix must be nonempty")
    u, s, _ = np.linalg.svd(m, full_matrices=True)
    r = 0
    if s.size and s[0] > 0.0:
        r = int(np.count_nonzero(s > tol.rank_rel_tol * s[0]))
    return Subspace(m.shape[0], u[:, :r])


def is_direct_sum(parts, tol: ToleranceConfig = DEFAULT_TOL) -> DirectSumCheck:
    """Decide whether the given subspaces decompose their ambient space.

    True iff the dimensions add up to the ambient dimension and the matrix
    formed by concatenating all basis columns is well conditioned.  The
    condition number is reported either way.
    """
    parts = list(parts)
    if not parts:
        raise ValueError("need at least one subspace")
    n = parts[0].ambient_dim
    for p in parts:
        if p.ambient_dim != n:
            raise ValueError(
                f"ambient dimension mismatch: {p.ambient_dim} vs {n}"
            )
    dim_total = sum(p.dim for p in parts)
    cols = [p.basis for p in parts if p.dim > 0]
    if cols:
        stacked = np.hstack(cols)
        s = np.linalg.svd(stacked, compute_uv=False)
        cond = float(s[0] / s[-1]) if s[-1] > 0.0 else np.inf
    else:
        cond = 1.0
    ok = dim_total == n and cond <= tol.membership_cond_max
    return DirectSumCheck(ok, cond, dim_total, n)


def orthogonal_complement(s: Subspace) -> Subspace:
    """The orthogonal complement, the canonical complement supplier."""
    n, d = s.ambient_dim, s.dim
    if d == 0:
        return Subspace.full(n)
    if d == n:
        return Subspace.zero(n)
    q, _ = np.linalg.qr(s.basis, mode="complete")
    return Subspace(n, q[:, d:])


def sum_and_intersection(
    e1: Subspace, e2: Subspace, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[Subspace, Subspace]:
    """Sum and intersection of two subspaces from a single decomposition.

    Both come from one SVD of the concatenated bases, so the dimension
    identity dim(e1) + dim(e2) == dim(sum) + dim(intersection) holds as an
    exact integer statement.
    """
    if e1.ambient_dim != e2.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    n = e1.ambient_dim
    d1, d2 = e1.dim, e2.dim
    if d1 + d2 == 0:
        return Subspace.zero(n), Subspace.zero(n)
    m = np.hstack([e1.basis, e2.basis])
    u, s, vt = np.linalg.svd(m, full_matrices=True)
    r = 0
    if s.size and s[0] > 0.0:
        r = int(np.count_nonzero(s > tol.rank_rel_tol * s[0]))
    total = Subspace(n, u[:, :r])
    # Kernel vectors (x; y) of [B1 B2] satisfy B1 x = -B2 y, which lands in
    # the intersection; mapping them through B1 is injective.
    null_coords = vt[r:, :].T
    q = null_coords.shape[1]
    if q == 0:
        inter = Subspace.zero(n)
    else:
        w = e1.basis @ null_coords[:d1, :]
        qmat, _ = np.linalg.qr(w)
        inter = Subspace(n, qmat)
    return total, inter


def _complement_within(s: Subspace, inner: Subspace) -> Subspace:
    """Orthogonal complement of ``inner`` taken inside ``s`` (inner must lie in s)."""
    if inner.dim == 0:
        return s
    d = s.dim - inner.dim
    if d <= 0:
        return Subspace.zero(s.ambient_dim)
    w = s.basis - inner.basis @ (inner.basis.T @ s.basis)
    u, _, _ = np.linalg.svd(w, full_matrices=False)
    return Subspace(s.ambient_dim, u[:, :d])


def common_complement(
    e1: Subspace, e2: Subspace, tol: ToleranceConfig = DEFAULT_TOL
) -> Subspace:
    """A single subspace complementing two equal-dimensional subspaces.

    Construction: split off the intersection from each input, glue the two
    leftover pieces along a graph (pairing their orthonormal basis vectors
    one-to-one), and pad with the orthogonal complement of e1 + e2.  The
    paired bases are the principal-vector bases of the two pieces, and each
    pair is glued by its sum or its difference depending on the principal
    angle: the difference direction is the transversal one when the pieces
    nearly coincide, the sum when they are far apart.  Either way the glued
    directions are mutually orthogonal, so the result stays well
    conditioned all the way down to the intersection-detection threshold.
    """
    if e1.ambient_dim != e2.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    if e1.dim != e2.dim:
        raise ValueError(
            f"dimension mismatch: {e1.dim} vs {e2.dim}; a common complement needs equal dimensions"
        )
    total, inter = sum_and_intersection(e1, e2, tol)
    e1_star = _complement_within(e1, inter)
    e2_star = _complement_within(e2, inter)
    if e1_star.dim > 0:
        u, cosines, vt = np.linalg.svd(e1_star.basis.T @ e2_star.basis)
        signs = np.where(cosines > np.cos(np.pi / 4.0), -1.0, 1.0)
        glued = e1_star.basis @ u + (e2_star.basis @ vt.T) * signs[None, :]
    else:
        glued = e1_star.basis
    pad = orthogonal_complement(total)
    cols = np.hstack([glued, pad.basis])
    if cols.shape[1] == 0:
        return Subspace.zero(e1.ambient_dim)
    return Subspace.from_columns(cols, tol)


def principal_angles(a: Subspace, b: Subspace) -> np.ndarray:
    """Canonical angles between two subspaces, ascending, in radians.

    Uses the sine-based formulation for small angles, so angles near zero
    keep full precision instead of the sqrt(eps) floor of plain arccos.
    """
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    if a.dim == 0 or b.dim == 0:
        return np.zeros(0)
    angles = scipy.linalg.subspace_angles(a.basis, b.basis)
    return np.sort(angles)


def subspaces_equal(a: Subspace, b: Subspace, angle_tol: float = ANGLE_TOL) -> bool:
    """Equality up to basis choice: equal dimensions and all angles tiny."""
    if a.ambient_dim != b.ambient_dim or a.dim != b.dim:
        return False
    if a.dim == 0:
        return True
    return float(np.max(principal_angles(a, b))) < angle_tol


def require_direct_sum(parts, tol: ToleranceConfig, what: str) -> DirectSumCheck:
    """Raise DirectSumError with context when the check fails."""
    check = is_direct_sum(parts, tol)
    if not check.ok:
        raise DirectSumError(f"{what} is not a direct sum", check.condition_number)
    return check
