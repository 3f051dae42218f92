"""Sampled numerical certification of operator paths.

A certificate records, per sampled parameter, the rank decision and the
two singular values bracketing it, plus any requested direct-sum and
kernel-identity evidence, so a tolerance dispute can be re-adjudicated
offline from the file alone.  Midpoints of affine legs are always forced
into the sample set; a defect parked exactly there would otherwise slip
through every uniform grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .paths import OperatorPath, eval_path_batch, sample_parameters
from .subspaces import (
    DEFAULT_TOL,
    Subspace,
    ToleranceConfig,
    is_direct_sum,
    kernel_basis,
    principal_angles,
    range_basis,
)

__all__ = ["MembershipSpec", "SampleRecord", "PathCertificate", "certify_path"]

ENDPOINT_PASS_TOL = 1e-9
SIGMA_GAP_MIN = 1e6


@dataclass(frozen=True)
class MembershipSpec:
    """Which set-membership facts to check at every sample.

    range_complement: the range must form a direct sum with this subspace.
    kernel_complement: the kernel must form a direct sum with this subspace.
    kernel_equals: the kernel must coincide with this subspace.
    """

    range_complement: Subspace | None = None
    kernel_complement: Subspace | None = None
    kernel_equals: Subspace | None = None

    def any(self) -> bool:
        return (
            self.range_complement is not None
            or self.kernel_complement is not None
            or self.kernel_equals is not None
        )


@dataclass(frozen=True)
class SampleRecord:
    t: float
    segment: int
    local_t: float
    rank: int
    sigma_k: float
    sigma_k_plus_1: float
    membership_residuals: dict | None
    ok: bool


@dataclass(frozen=True)
class PathCertificate:
    """Machine-checkable evidence for one path."""

    instance: dict | None
    grid_size: int
    expected_k: int
    per_sample: tuple[SampleRecord, ...]
    endpoint_errors: tuple[float, float]
    verdict: str
    failures: tuple[float, ...]

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def _maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def certify_path(
    path: OperatorPath,
    expected_k: int,
    grid: int = 1001,
    tol: ToleranceConfig = DEFAULT_TOL,
    membership: MembershipSpec | None = None,
    sigma_gap_min: float = SIGMA_GAP_MIN,
    instance: dict | None = None,
) -> PathCertificate:
    """Sample a path and certify rank plus optional membership claims.

    A sample passes when the rank decision equals ``expected_k``, the
    sigma_k / sigma_{k+1} gap clears ``sigma_gap_min`` (the missing
    singular value counts as machine zero), and every requested membership
    check holds.  The verdict is "degenerate" for rank-zero targets, whose
    passes would be vacuous.  Failures are listed by the local parameter
    of the leg they occur on.
    """
    if grid < 2:
        raise ValueError("grid must contain at least 2 points")
    samples = sample_parameters(path, grid)
    values = eval_path_batch(path, samples)
    svals = np.linalg.svd(values, compute_uv=False)
    eps = np.finfo(float).eps
    records = []
    failures = set()
    for (t, seg, local), w, s in zip(samples, values, svals):
        sigma_top = float(s[0]) if s.size else 0.0
        rank = 0
        if sigma_top > 0.0:
            rank = int(np.count_nonzero(s > tol.rank_rel_tol * sigma_top))
        sigma_k = float(s[expected_k - 1]) if 1 <= expected_k <= s.size else 0.0
        sigma_next = float(s[expected_k]) if s.size > expected_k else 0.0
        floor = max(sigma_next, eps * max(sigma_top, 1.0))
        gap_ok = expected_k == 0 or (sigma_k / floor >= sigma_gap_min)
        ok = rank == expected_k and gap_ok
        residuals = None
        if membership is not None and membership.any():
            residuals = {}
            if membership.range_complement is not None:
                check = is_direct_sum(
                    [range_basis(w, tol), membership.range_complement], tol
                )
                residuals["range_complement_cond"] = float(check.condition_number)
                ok = ok and check.ok
            if membership.kernel_complement is not None:
                check = is_direct_sum(
                    [kernel_basis(w, tol), membership.kernel_complement], tol
                )
                residuals["kernel_complement_cond"] = float(check.condition_number)
                ok = ok and check.ok
            if membership.kernel_equals is not None:
                ker = kernel_basis(w, tol)
                want = membership.kernel_equals
                if ker.dim != want.dim:
                    angle = float("inf")
                elif ker.dim == 0:
                    angle = 0.0
                else:
                    angle = float(np.max(principal_angles(ker, want)))
                residuals["kernel_angle"] = angle
                ok = ok and angle < 1e-8
        records.append(
            SampleRecord(t, seg, local, rank, sigma_k, sigma_next, residuals, bool(ok))
        )
        if not ok:
            failures.add(local)
    e0 = _maxabs(values[0] - path.start)
    e1 = _maxabs(values[-1] - path.end)
    endpoints_ok = e0 <= ENDPOINT_PASS_TOL * (1.0 + _maxabs(path.start)) and e1 <= (
        ENDPOINT_PASS_TOL * (1.0 + _maxabs(path.end))
    )
    if expected_k == 0:
        verdict = "degenerate"
    elif endpoints_ok and not failures:
        verdict = "pass"
    else:
        verdict = "fail"
    return PathCertificate(
        instance,
        len(samples),
        expected_k,
        tuple(records),
        (e0, e1),
        verdict,
        tuple(sorted(failures)),
    )
