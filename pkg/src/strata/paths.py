"""Closed-form operator homotopies between points of a rank stratum.

Every path here is a chain of piecewise closed-form segments; nothing is
integrated numerically.  The segment kinds are:

  constant       t -> A
  affine         t -> A + t*B
  left-affine    t -> (A + t*B) @ C
  right-affine   t -> C @ (A + t*B)
  rotation-flip  rotate one singular direction of a matrix through an
                 orthogonal unit vector, theta = pi*t
  spd-line       t -> Q @ ((1-t)*S + t*I), the convex line in the positive
                 factor of a polar decomposition
  rotation-log   t -> expm((1-t)*K) @ M for skew K, the geodesic winding a
                 rotation factor down to its target

Builders guarantee their declared endpoints; whether the path stays inside
the intended operator set is a separate concern handled by the certifier
(and deliberately violated by ``literal_flip_path``, see
``audit_flip_path``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DirectSumError,
    DisconnectedComponentsError,
    InternalConsistencyError,
    WitnessError,
)
from .projections import (
    GraphParam,
    alpha_from_complements,
    alpha_operator,
    oblique_projection,
)
from .subspaces import (
    DEFAULT_TOL,
    Subspace,
    ToleranceConfig,
    as_matrix,
    common_complement,
    is_direct_sum,
    kernel_basis,
    orthogonal_complement,
    principal_angles,
    range_basis,
    rank_of,
    subspaces_equal,
)

__all__ = [
    "PathSegment",
    "OperatorPath",
    "FlipAudit",
    "ChainWitness",
    "make_segment",
    "constant_path",
    "eval_path",
    "eval_path_batch",
    "sample_parameters",
    "reverse_path",
    "literal_flip_path",
    "audit_flip_path",
    "corrected_flip_path",
    "left_project_path",
    "right_project_path",
    "gl_connect",
    "connect_fk",
    "connect_phi",
    "chain_connect",
    "discover_chain",
]

SEGMENT_KINDS = (
    "constant",
    "affine",
    "left-affine",
    "right-affine",
    "rotation-flip",
    "spd-line",
    "rotation-log",
)

CHAIN_TOL = 1e-10  # consecutive segments must meet this closely
ENDPOINT_TOL = 1e-12  # declared endpoints must be reproduced this closely


def _maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


@dataclass(frozen=True)
class PathSegment:
    """One closed-form leg of a path, with its declared endpoints."""

    kind: str
    payload: dict
    start: np.ndarray
    end: np.ndarray

    def __post_init__(self):
        if self.kind not in SEGMENT_KINDS:
            raise ValueError(f"unknown segment kind {self.kind!r}")


def _expm_skew_batch(skew: np.ndarray, scales: np.ndarray) -> np.ndarray:
    """expm(s*K) for each s, via one Hermitian eigendecomposition of i*K."""
    herm = 1j * skew
    mu, w = np.linalg.eigh(herm)
    phases = np.exp(-1j * scales[:, None] * mu[None, :])
    out = np.einsum("ij,tj,kj->tik", w, phases, w.conj())
    return out.real


def eval_segment_batch(seg: PathSegment, ts: np.ndarray) -> np.ndarray:
    """Evaluate one segment at an array of local parameters in [0, 1]."""
    ts = np.asarray(ts, dtype=float)
    p = seg.payload
    if seg.kind == "constant":
        return np.broadcast_to(p["a"], (ts.size,) + p["a"].shape).copy()
    if seg.kind == "affine":
        return p["a"][None] + ts[:, None, None] * p["b"][None]
    if seg.kind == "left-affine":
        return (p["a"][None] + ts[:, None, None] * p["b"][None]) @ p["c"]
    if seg.kind == "right-affine":
        return p["c"] @ (p["a"][None] + ts[:, None, None] * p["b"][None])
    if seg.kind == "rotation-flip":
        base, u, w = p["base"], p["u"], p["w"]
        cos = np.cos(math.pi * ts)
        sin = np.sin(math.pi * ts)
        if p["side"] == "range":
            row = u @ base
            stripped = base - np.outer(u, row)
            direction = cos[:, None] * u[None, :] + sin[:, None] * w[None, :]
            return stripped[None] + np.einsum("ti,j->tij", direction, row)
        col = base @ u
        stripped = base - np.outer(col, u)
        direction = cos[:, None] * u[None, :] + sin[:, None] * w[None, :]
        return stripped[None] + np.einsum("i,tj->tij", col, direction)
    if seg.kind == "spd-line":
        q, s = p["q"], p["s"]
        eye = np.eye(s.shape[0])
        blend = (1.0 - ts)[:, None, None] * s[None] + ts[:, None, None] * eye[None]
        return q @ blend
    if seg.kind == "rotation-log":
        rotations = _expm_skew_batch(p["skew"], 1.0 - ts)
        return rotations @ p["tail"]
    raise ValueError(f"unknown segment kind {seg.kind!r}")


def eval_segment(seg: PathSegment, t: float) -> np.ndarray:
    return eval_segment_batch(seg, np.array([float(t)]))[0]


def make_segment(kind: str, payload: dict, start=None, end=None) -> PathSegment:
    """Build a segment, verifying it reproduces its declared endpoints."""
    clean = {}
    for key, value in payload.items():
        if key == "side":
            if value not in ("range", "kernel"):
                raise ValueError(f"invalid rotation side {value!r}")
            clean[key] = value
        else:
            clean[key] = np.asarray(value, dtype=float)
    probe = PathSegment(kind, clean, np.zeros((1, 1)), np.zeros((1, 1)))
    got = eval_segment_batch(probe, np.array([0.0, 1.0]))
    start = got[0] if start is None else np.asarray(start, dtype=float)
    end = got[1] if end is None else np.asarray(end, dtype=float)
    # rounding in the evaluation is proportional to the payload magnitude,
    # not the endpoint magnitude (projector factors can be large)
    scale = 1.0 + max(
        [_maxabs(v) for v in clean.values() if isinstance(v, np.ndarray)],
        default=0.0,
    )
    for declared, computed, which in ((start, got[0], "start"), (end, got[1], "end")):
        if _maxabs(declared - computed) > ENDPOINT_TOL * scale:
            raise InternalConsistencyError(
                f"segment {kind!r} does not reproduce its declared {which}"
            )
    if kind == "rotation-flip":
        u, w = clean["u"], clean["w"]
        if abs(np.dot(u, u) - 1.0) > 1e-10 or abs(np.dot(w, w) - 1.0) > 1e-10:
            raise ValueError("rotation vectors must be unit norm")
        if abs(np.dot(u, w)) > 1e-10:
            raise ValueError("rotation vectors must be orthogonal")
    return PathSegment(kind, clean, start, end)


@dataclass(frozen=True)
class OperatorPath:
    """A chained, piecewise closed-form family t in [0, 1] -> matrix."""

    segments: tuple[PathSegment, ...]
    shape: tuple[int, int]

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "shape", tuple(self.shape))
        if not segs:
            raise ValueError("a path needs at least one segment")
        for seg in segs:
            if seg.start.shape != self.shape or seg.end.shape != self.shape:
                raise ValueError("segment endpoint shape disagrees with path shape")
        for left, right in zip(segs, segs[1:]):
            gap = _maxabs(left.end - right.start)
            if gap > CHAIN_TOL * (1.0 + _maxabs(left.end)):
                raise ValueError(
                    f"consecutive segments do not chain (gap {gap:.3e})"
                )

    @property
    def start(self) -> np.ndarray:
        return self.segments[0].start

    @property
    def end(self) -> np.ndarray:
        return self.segments[-1].end


def constant_path(a) -> OperatorPath:
    a = as_matrix(a)
    return OperatorPath((make_segment("constant", {"a": a}),), a.shape)


def locate(path: OperatorPath, t: float) -> tuple[int, float]:
    """Map a global parameter onto (segment index, local parameter).

    Segments share the unit interval equally.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"path parameter {t} outside [0, 1]")
    nseg = len(path.segments)
    x = t * nseg
    idx = min(int(math.floor(x)), nseg - 1)
    return idx, x - idx


def eval_path(path: OperatorPath, t: float) -> np.ndarray:
    idx, local = locate(path, t)
    return eval_segment(path.segments[idx], local)


def eval_path_batch(path: OperatorPath, samples) -> np.ndarray:
    """Evaluate at a list of (global_t, segment, local_t) triples, in order."""
    out = np.empty((len(samples),) + path.shape)
    by_segment: dict[int, list[int]] = {}
    for pos, (_, seg, _) in enumerate(samples):
        by_segment.setdefault(seg, []).append(pos)
    for seg_idx, positions in by_segment.items():
        locals_ = np.array([samples[p][2] for p in positions])
        out[positions] = eval_segment_batch(path.segments[seg_idx], locals_)
    return out


def sample_parameters(path: OperatorPath, grid: int) -> list[tuple[float, int, float]]:
    """Uniform global grid plus the exact midpoint of every affine-family leg.

    Midpoints are forced in because a defect sitting exactly at the middle
    of an affine leg has measure zero and escapes any uniform grid.
    """
    if grid < 2:
        raise ValueError("grid must contain at least 2 points")
    nseg = len(path.segments)
    samples: dict[float, tuple[int, float]] = {}
    for i in range(grid):
        t = i / (grid - 1)
        samples[t] = locate(path, t)
    for s, seg in enumerate(path.segments):
        if seg.kind in ("affine", "left-affine", "right-affine"):
            samples[(s + 0.5) / nseg] = (s, 0.5)
    return [(t,) + samples[t] for t in sorted(samples)]


def _reverse_segment(seg: PathSegment) -> PathSegment:
    p = seg.payload
    if seg.kind == "constant":
        return seg
    if seg.kind == "affine":
        return make_segment(
            "affine", {"a": p["a"] + p["b"], "b": -p["b"]}, seg.end, seg.start
        )
    if seg.kind in ("left-affine", "right-affine"):
        return make_segment(
            seg.kind,
            {"a": p["a"] + p["b"], "b": -p["b"], "c": p["c"]},
            seg.end,
            seg.start,
        )
    if seg.kind == "rotation-flip":
        base, u = p["base"], p["u"]
        if p["side"] == "range":
            flipped = base - 2.0 * np.outer(u, u @ base)
        else:
            flipped = base - 2.0 * np.outer(base @ u, u)
        return make_segment(
            "rotation-flip",
            {"base": flipped, "u": -u, "w": p["w"], "side": p["side"]},
            seg.end,
            seg.start,
        )
    if seg.kind == "spd-line":
        q, s = p["q"], p["s"]
        return make_segment(
            "affine", {"a": q, "b": q @ (s - np.eye(s.shape[0]))}, seg.end, seg.start
        )
    if seg.kind == "rotation-log":
        k, tail = p["skew"], p["tail"]
        return make_segment(
            "rotation-log",
            {"skew": -k, "tail": scipy.linalg.expm(k) @ tail},
            seg.end,
            seg.start,
        )
    raise ValueError(f"unknown segment kind {seg.kind!r}")


def reverse_path(path: OperatorPath) -> OperatorPath:
    """The same trajectory traversed backwards, re-expressed in closed form."""
    segs = tuple(_reverse_segment(s) for s in reversed(path.segments))
    return OperatorPath(segs, path.shape)


def _assemble(stage_paths, shape, fallback) -> OperatorPath:
    """Concatenate stage paths, dropping do-nothing constant legs."""
    segments = []
    for stage in stage_paths:
        segments.extend(stage.segments)
    kept = [s for s in segments if s.kind != "constant"]
    if not kept:
        return constant_path(fallback)
    return OperatorPath(tuple(kept), shape)


# ---------------------------------------------------------------------------
# projector flip families


def literal_flip_path(
    e_star: Subspace, r: Subspace, alpha: GraphParam, tol: ToleranceConfig = DEFAULT_TOL
) -> OperatorPath:
    """Two affine legs taking a projector to its negative through its graph tilts.

    Leg one tilts the projector onto the graph complement, leg two runs the
    printed affine family back down to the negated projector.  This is the
    classical construction shipped verbatim; it makes no membership promise
    along the way, and ``audit_flip_path`` shows the second leg leaves the
    admissible set at its midpoint whenever the tilt is nonzero.
    """
    if r.dim == 0:
        raise ValueError("the complement must have positive dimension")
    n = r.ambient_dim
    if e_star.dim == 0:
        return constant_path(np.zeros((n, n)))
    if not subspaces_equal(alpha.domain, e_star) or not subspaces_equal(alpha.codomain, r):
        raise ValueError("graph parameter does not match the given decomposition")
    if alpha.is_zero():
        raise ValueError("the tilt must be nonzero when the base subspace is nonzero")
    proj = oblique_projection(e_star, r, tol).projector
    ap = alpha_operator(alpha) @ proj
    leg1 = make_segment("affine", {"a": proj, "b": ap}, proj, proj + ap)
    leg2 = make_segment(
        "affine", {"a": proj + ap, "b": -2.0 * proj - ap}, proj + ap, -proj
    )
    return OperatorPath((leg1, leg2), (n, n))


@dataclass(frozen=True)
class FlipAudit:
    """Pointwise membership evidence for a flip path."""

    grid_size: int
    degenerate: bool
    records: tuple[dict, ...]
    failures: tuple[float, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def audit_flip_path(
    path: OperatorPath,
    s_spec: tuple[Subspace, Subspace],
    grid: int = 11,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> FlipAudit:
    """Check, per sample, that the path stays in its advertised operator set.

    ``s_spec`` is (expected kernel, complement): at each sample the range
    must complement the given subspace and the kernel must equal the
    expected one.  Failures are reported by the local parameter of the leg
    they occur on, so a midpoint defect always reads 0.5.
    """
    expected_kernel, complement = s_spec
    samples = sample_parameters(path, grid)
    values = eval_path_batch(path, samples)
    if _maxabs(values) == 0.0:
        records = tuple(
            {
                "t": t,
                "segment": seg,
                "local_t": local,
                "range_split_ok": True,
                "range_condition": 0.0,
                "kernel_ok": True,
                "kernel_angle": 0.0,
            }
            for (t, seg, local) in samples
        )
        return FlipAudit(len(samples), True, records, ())
    records = []
    failures = set()
    for (t, seg, local), w in zip(samples, values):
        rng = range_basis(w, tol)
        check = is_direct_sum([rng, complement], tol)
        ker = kernel_basis(w, tol)
        if ker.dim == expected_kernel.dim and ker.dim > 0:
            angle = float(np.max(principal_angles(ker, expected_kernel)))
        elif ker.dim == expected_kernel.dim:
            angle = 0.0
        else:
            angle = float("nan")
        kernel_ok = ker.dim == expected_kernel.dim and (ker.dim == 0 or angle < 1e-8)
        records.append(
            {
                "t": t,
                "segment": seg,
                "local_t": local,
                "range_split_ok": bool(check.ok),
                "range_condition": float(check.condition_number),
                "kernel_ok": bool(kernel_ok),
                "kernel_angle": angle,
            }
        )
        if not (check.ok and kernel_ok):
            failures.add(local)
    return FlipAudit(len(samples), False, tuple(records), tuple(sorted(failures)))


def corrected_flip_path(
    t_mat, k: int, side: str | None = None, tol: ToleranceConfig = DEFAULT_TOL
) -> OperatorPath:
    """Connect a rank-k matrix to its negative without ever dropping rank.

    Writes the matrix in its singular frame and rotates each of the k
    range directions (side="range") or row-space directions
    (side="kernel") through a fixed unit vector taken from the orthogonal
    complement, half a turn each.  Every intermediate frame stays
    orthonormal, so the singular values, and hence the rank, are constant
    along the whole path.  Requires a spare direction on the chosen side.
    """
    t_mat = as_matrix(t_mat)
    rows, cols = t_mat.shape
    if rank_of(t_mat, tol) != k:
        raise ValueError(f"matrix rank is not the declared {k}")
    if k == 0:
        return constant_path(t_mat)
    if side is None:
        if rows > k:
            side = "range"
        elif cols > k:
            side = "kernel"
        else:
            raise DisconnectedComponentsError(
                "a full-rank square matrix and its negative may lie in "
                "different invertible components; no spare direction to "
                "rotate through"
            )
    if side == "range" and rows <= k:
        raise ValueError("side='range' needs more rows than the rank")
    if side == "kernel" and cols <= k:
        raise ValueError("side='kernel' needs more columns than the rank")
    u_full, _, vt_full = np.linalg.svd(t_mat)
    if side == "range":
        w = u_full[:, k]
        axes = [u_full[:, i] for i in range(k)]
    else:
        w = vt_full[k, :]
        axes = [vt_full[i, :] for i in range(k)]
    segments = []
    base = t_mat.copy()
    for i, u in enumerate(axes):
        if side == "range":
            nxt = base - 2.0 * np.outer(u, u @ base)
        else:
            nxt = base - 2.0 * np.outer(base @ u, u)
        declared_end = -t_mat if i == k - 1 else nxt
        segments.append(
            make_segment(
                "rotation-flip",
                {"base": base, "u": u, "w": w, "side": side},
                base,
                declared_end,
            )
        )
        base = nxt
    return OperatorPath(tuple(segments), t_mat.shape)


# ---------------------------------------------------------------------------
# one-sided projection lines


def left_project_path(
    t0, f_star: Subspace, n_sub: Subspace, tol: ToleranceConfig = DEFAULT_TOL
) -> OperatorPath:
    """Slide the range of an operator onto a reference complement.

    With the codomain split both by range(t0) and by f_star against the
    same complement n_sub, the family (P + s*aP) t0 moves the projected
    operator at s=0 back up to t0 at s=1, keeping the kernel fixed and the
    range on the tilted family of complements throughout.
    """
    t0 = as_matrix(t0)
    if n_sub.dim == 0:
        raise ValueError("the complement must have positive dimension")
    rng = range_basis(t0, tol)
    for name, sub in (("range(t0)", rng), ("f_star", f_star)):
        check = is_direct_sum([sub, n_sub], tol)
        if not check.ok:
            raise DirectSumError(
                f"{name} does not complement the reference subspace",
                check.condition_number,
            )
    alpha = alpha_from_complements(rng, f_star, n_sub, tol)
    proj = oblique_projection(f_star, n_sub, tol).projector
    if alpha.is_zero():
        return constant_path(proj @ t0)
    ap = alpha_operator(alpha) @ proj
    seg = make_segment(
        "left-affine", {"a": proj, "b": ap, "c": t0}, proj @ t0, t0
    )
    return OperatorPath((seg,), t0.shape)


def right_project_path(
    t0, e_star: Subspace, r0: Subspace, tol: ToleranceConfig = DEFAULT_TOL
) -> OperatorPath:
    """Slide the kernel of an operator onto a reference subspace.

    With the domain split both by kernel(t0) and by e_star against the same
    complement r0, the family t0 (P_r0 - s*aP) moves the right-projected
    operator at s=0 back up to t0 at s=1, keeping the range fixed and the
    kernel on a tilted family throughout.
    """
    t0 = as_matrix(t0)
    if r0.dim == 0:
        raise ValueError("the complement must have positive dimension")
    ker = kernel_basis(t0, tol)
    for name, sub in (("kernel(t0)", ker), ("e_star", e_star)):
        check = is_direct_sum([sub, r0], tol)
        if not check.ok:
            raise DirectSumError(
                f"{name} does not complement the reference subspace",
                check.condition_number,
            )
    alpha = alpha_from_complements(ker, e_star, r0, tol)
    p_estar = oblique_projection(e_star, r0, tol).projector
    p_r0 = np.eye(t0.shape[1]) - p_estar
    if alpha.is_zero():
        return constant_path(t0 @ p_r0)
    ap = alpha_operator(alpha) @ p_estar
    seg = make_segment(
        "right-affine", {"a": p_r0, "b": -ap, "c": t0}, t0 @ p_r0, t0
    )
    return OperatorPath((seg,), t0.shape)


# ---------------------------------------------------------------------------
# invertible factors


def polar_factors(a) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal and symmetric positive parts, a = Q @ S."""
    a = as_matrix(a)
    u, s, vt = np.linalg.svd(a)
    return u @ vt, vt.T @ np.diag(s) @ vt


def _skew_log_rotation(w: np.ndarray) -> np.ndarray:
    """Skew matrix K with expm(K) equal to the given rotation.

    Works on the real block-Schur form: genuine rotation blocks contribute
    their angle, paired -1 eigenvalues contribute a half-turn in their
    plane, +1 eigenvalues contribute nothing.  The rotation must have
    determinant +1, otherwise the -1 count comes out odd.
    """
    n = w.shape[0]
    t, z = scipy.linalg.schur(w, output="real")
    skew = np.zeros((n, n))
    minus_ones = []
    i = 0
    while i < n:
        if i + 1 < n and abs(t[i + 1, i]) > 1e-10:
            theta = math.atan2(t[i + 1, i], 0.5 * (t[i, i] + t[i + 1, i + 1]))
            z1, z2 = z[:, i], z[:, i + 1]
            skew += theta * (np.outer(z2, z1) - np.outer(z1, z2))
            i += 2
        else:
            if t[i, i] < 0.0:
                minus_ones.append(i)
            i += 1
    if len(minus_ones) % 2:
        raise InternalConsistencyError(
            "rotation with determinant -1 has no real logarithm"
        )
    for a, b in zip(minus_ones[0::2], minus_ones[1::2]):
        z1, z2 = z[:, a], z[:, b]
        skew += math.pi * (np.outer(z2, z1) - np.outer(z1, z2))
    if _maxabs(scipy.linalg.expm(skew) - w) > 1e-8 * (1.0 + n):
        raise InternalConsistencyError("rotation logarithm failed to reproduce input")
    return skew


def gl_connect(
    a, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[OperatorPath, int]:
    """Connect an invertible matrix to a canonical point of its component.

    The target is diag(sign det a, 1, ..., 1): over the reals that point is
    always reachable, whereas the identity itself is not when the
    determinant is negative.  Leg one straightens the positive factor of
    the polar decomposition along a convex line (never singular), leg two
    winds the orthogonal factor down along a rotation geodesic (always
    orthogonal).  Returns the path and the determinant sign.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError("gl_connect needs a square matrix")
    if rank_of(a, tol) != n:
        raise ValueError("matrix is numerically singular")
    q, s = polar_factors(a)
    sign = int(np.linalg.slogdet(a)[0])
    d = np.eye(n)
    d[0, 0] = sign
    segments = []
    if _maxabs(s - np.eye(n)) > 1e-13 * (1.0 + _maxabs(s)):
        segments.append(make_segment("spd-line", {"q": q, "s": s}, a, q))
    if _maxabs(q - d) > 1e-13:
        skew = _skew_log_rotation(q @ d)
        start = q if segments else a
        segments.append(
            make_segment("rotation-log", {"skew": skew, "tail": d}, start, d)
        )
    if not segments:
        segments.append(make_segment("constant", {"a": a}))
    return OperatorPath(tuple(segments), (n, n)), sign


def _embed_gl_segments(glpath: OperatorPath, b: np.ndarray, c: np.ndarray):
    """Carry a small invertible-factor path onto full-size operators.

    Maps each leg M(t) to b @ M(t) @ c, where b has orthonormal columns.
    Affine-in-t legs stay affine; rotation legs lift to rotations of the
    embedded ambient space because conjugating a skew generator by an
    isometry keeps the exponential closed form.
    """
    out = []
    eye = np.eye(b.shape[1])
    for seg in glpath.segments:
        start = b @ seg.start @ c
        end = b @ seg.end @ c
        p = seg.payload
        if seg.kind == "constant":
            out.append(make_segment("constant", {"a": b @ p["a"] @ c}, start, end))
        elif seg.kind == "affine":
            out.append(
                make_segment(
                    "affine", {"a": b @ p["a"] @ c, "b": b @ p["b"] @ c}, start, end
                )
            )
        elif seg.kind == "spd-line":
            q, s = p["q"], p["s"]
            out.append(
                make_segment(
                    "affine",
                    {"a": b @ (q @ s) @ c, "b": b @ (q @ (eye - s)) @ c},
                    start,
                    end,
                )
            )
        elif seg.kind == "rotation-log":
            out.append(
                make_segment(
                    "rotation-log",
                    {"skew": b @ p["skew"] @ b.T, "tail": b @ p["tail"] @ c},
                    start,
                    end,
                )
            )
        else:
            raise InternalConsistencyError(
                f"cannot embed segment kind {seg.kind!r}"
            )
    return out


def _restricted_inverse(
    l1: np.ndarray,
    r1: Subspace,
    rl1: Subspace,
    n_plus: Subspace,
    tol: ToleranceConfig,
) -> np.ndarray:
    """Inverse of l1 restricted to r1, extended by zero on the complement.

    Sends range(l1) back through the bijection l1|_r1 and kills n_plus.
    """
    if n_plus.dim == 0:
        proj = np.eye(l1.shape[0])
    else:
        proj = oblique_projection(rl1, n_plus, tol).projector
    c = l1 @ r1.basis
    return r1.basis @ np.linalg.pinv(c) @ proj


def _sign_flip_stage(
    start_matrix: np.ndarray,
    target: np.ndarray,
    u_first: np.ndarray,
    v_first: np.ndarray,
    rl1: Subspace,
    tol: ToleranceConfig,
) -> PathSegment:
    """Rotate the single negated singular direction back, absorbing a sign.

    Prefers a spare range direction; falls back to a spare kernel
    direction.  When neither side has room the two endpoints genuinely lie
    in different invertible components.
    """
    rows, cols = target.shape
    k = rl1.dim
    if rows > k:
        w = orthogonal_complement(rl1).basis[:, 0]
        return make_segment(
            "rotation-flip",
            {"base": start_matrix, "u": u_first, "w": w, "side": "range"},
            start_matrix,
            target,
        )
    if cols > k:
        w = kernel_basis(target, tol).basis[:, 0]
        return make_segment(
            "rotation-flip",
            {"base": start_matrix, "u": v_first, "w": w, "side": "kernel"},
            start_matrix,
            target,
        )
    raise DisconnectedComponentsError(
        "endpoints lie in different invertible components: the factor "
        "connecting them has negative determinant and there is no spare "
        "direction to rotate the sign away"
    )


def _gl_stage(
    current: np.ndarray,
    l1: np.ndarray,
    r1: Subspace,
    n_plus: Subspace,
    k: int,
    tol: ToleranceConfig,
) -> list[PathSegment]:
    """Connect current = G(l1) to l1, G invertible on range(l1).

    Extracts the invertible factor in the singular frame of l1, connects it
    to the canonical component point, and if the determinant sign is
    negative rotates the one leftover negated direction back.
    """
    u_full, _, vt_full = np.linalg.svd(l1)
    bf = u_full[:, :k]
    rl1 = Subspace(l1.shape[0], bf)
    l1_plus = _restricted_inverse(l1, r1, rl1, n_plus, tol)
    g_small = bf.T @ (current @ l1_plus) @ bf
    glpath, sign = gl_connect(g_small, tol)
    c2 = bf.T @ l1
    segments = _embed_gl_segments(glpath, bf, c2)
    if sign < 0:
        flipped = segments[-1].end if segments else current
        segments.append(
            _sign_flip_stage(flipped, l1, bf[:, 0], vt_full[0, :], rl1, tol)
        )
    return segments


def connect_fk(t1, t2, tol: ToleranceConfig = DEFAULT_TOL) -> OperatorPath:
    """Build an explicit path from t2 to t1 inside the rank-k stratum.

    Assembly: pick a common complement of the two row spaces and one of the
    two ranges; slide t2 down to its restriction against the common kernel
    complement, slide its range onto the range of the restricted t1, peel
    off the invertible factor and connect it canonically, absorb a leftover
    sign by one rotation flip, then slide back up to t1.  Rank k is
    maintained at every parameter.
    """
    t1 = as_matrix(t1)
    t2 = as_matrix(t2)
    if t1.shape != t2.shape:
        raise ValueError("endpoints must share a shape")
    k = rank_of(t1, tol)
    if rank_of(t2, tol) != k:
        raise ValueError(
            f"rank mismatch: {k} vs {rank_of(t2, tol)}; endpoints lie in "
            "different strata"
        )
    if np.array_equal(t1, t2):
        return constant_path(t1)
    rows, cols = t1.shape
    ker1 = kernel_basis(t1, tol)
    ker2 = kernel_basis(t2, tol)
    r1 = orthogonal_complement(ker1)
    r2 = orthogonal_complement(ker2)
    n0 = common_complement(r1, r2, tol)
    n_plus = common_complement(range_basis(t1, tol), range_basis(t2, tol), tol)
    proj_r1 = oblique_projection(r1, n0, tol).projector
    proj_r2 = oblique_projection(r2, n0, tol).projector
    l1 = t1 @ proj_r1
    l2 = t2 @ proj_r2
    stages = []
    if n0.dim > 0:
        stages.append(reverse_path(right_project_path(t2, n0, r2, tol)))
    rl1 = range_basis(l1, tol)
    if n_plus.dim > 0:
        stages.append(reverse_path(left_project_path(l2, rl1, n_plus, tol)))
        pl2 = oblique_projection(rl1, n_plus, tol).projector @ l2
    else:
        pl2 = l2
    gl_segments = _gl_stage(pl2, l1, r1, n_plus, k, tol)
    if gl_segments:
        stages.append(OperatorPath(tuple(gl_segments), t1.shape))
    if n0.dim > 0:
        stages.append(right_project_path(t1, n0, r1, tol))
    return _assemble(stages, t1.shape, t1)


def connect_phi(
    t1, t2, kernel_dim: int, corank: int, tol: ToleranceConfig = DEFAULT_TOL
) -> OperatorPath:
    """Path between two operators with fixed kernel dimension and corank.

    At fixed shape those two numbers pin the rank, so the construction is
    the rank-stratum assembly; this entry point verifies the membership
    data first and rejects the invertible-by-invertible case, which is
    genuinely not path connected.
    """
    t1 = as_matrix(t1)
    t2 = as_matrix(t2)
    if t1.shape != t2.shape:
        raise ValueError("endpoints must share a shape")
    if kernel_dim < 0 or corank < 0:
        raise ValueError("kernel dimension and corank must be nonnegative")
    if kernel_dim == 0 and corank == 0:
        raise DisconnectedComponentsError(
            "the set of invertible operators is not path connected over "
            "the reals; kernel dimension and corank cannot both be zero"
        )
    rows, cols = t1.shape
    for name, t in (("t1", t1), ("t2", t2)):
        k = rank_of(t, tol)
        if cols - k != kernel_dim:
            raise ValueError(
                f"{name} has kernel dimension {cols - k}, expected {kernel_dim}"
            )
        if rows - k != corank:
            raise ValueError(f"{name} has corank {rows - k}, expected {corank}")
    return connect_fk(t1, t2, tol)


# ---------------------------------------------------------------------------
# equivalence chains


@dataclass(frozen=True)
class ChainWitness:
    """Finite chains of subspaces certifying two operators equivalent.

    ``kernel_complements[j]`` must complement both its neighbouring kernels
    in the chain kernel(t0), kernels[0], ..., kernels[-1], kernel(t_star);
    ``range_complements`` plays the symmetric role on the codomain side for
    the chain range(t0), ranges[0], ..., ranges[-1], range(t_star).
    """

    kernels: tuple[Subspace, ...]
    kernel_complements: tuple[Subspace, ...]
    ranges: tuple[Subspace, ...]
    range_complements: tuple[Subspace, ...]

    def __post_init__(self):
        object.__setattr__(self, "kernels", tuple(self.kernels))
        object.__setattr__(self, "kernel_complements", tuple(self.kernel_complements))
        object.__setattr__(self, "ranges", tuple(self.ranges))
        object.__setattr__(self, "range_complements", tuple(self.range_complements))
        if len(self.kernel_complements) != len(self.kernels) + 1:
            raise ValueError(
                "need exactly one kernel complement per consecutive kernel pair"
            )
        if len(self.range_complements) != len(self.ranges) + 1:
            raise ValueError(
                "need exactly one range complement per consecutive range pair"
            )


def _validate_witness(
    witness: ChainWitness, t0: np.ndarray, t_star: np.ndarray, tol: ToleranceConfig
) -> tuple[list[Subspace], list[Subspace]]:
    kernel_nodes = [kernel_basis(t0, tol), *witness.kernels, kernel_basis(t_star, tol)]
    range_nodes = [range_basis(t0, tol), *witness.ranges, range_basis(t_star, tol)]
    for j, comp in enumerate(witness.kernel_complements, start=1):
        for node, side in ((kernel_nodes[j - 1], "left"), (kernel_nodes[j], "right")):
            check = is_direct_sum([node, comp], tol)
            if not check.ok:
                raise WitnessError(
                    f"kernel chain slot {j}: complement does not split the "
                    f"{side} kernel (condition {check.condition_number:.3e})"
                )
    for i, comp in enumerate(witness.range_complements, start=1):
        for node, side in ((range_nodes[i - 1], "left"), (range_nodes[i], "right")):
            check = is_direct_sum([node, comp], tol)
            if not check.ok:
                raise WitnessError(
                    f"range chain slot {i}: complement does not split the "
                    f"{side} range (condition {check.condition_number:.3e})"
                )
    return kernel_nodes, range_nodes


def chain_connect(
    t0, t_star, witness: ChainWitness, tol: ToleranceConfig = DEFAULT_TOL
) -> OperatorPath:
    """Path from t_star to t0 through the stages named by a chain witness.

    The kernel chain re-anchors the kernel one link at a time by right
    projections; the range chain re-anchors the range by left projections;
    the closing stage compares the final chained operator with t_star
    through an invertible factor, connected canonically with a possible
    sign-absorbing rotation.
    """
    t0 = as_matrix(t0)
    t_star = as_matrix(t_star)
    if t0.shape != t_star.shape:
        raise ValueError("endpoints must share a shape")
    k = rank_of(t0, tol)
    if rank_of(t_star, tol) != k:
        raise ValueError("rank mismatch: no chain can certify equivalence")
    kernel_nodes, range_nodes = _validate_witness(witness, t0, t_star, tol)
    if np.array_equal(t0, t_star):
        return constant_path(t0)
    m = len(witness.kernels)
    n_chain = len(witness.ranges)
    # forward chained operators
    chained = [t0]
    cur = t0
    for j in range(1, m + 1):
        proj = oblique_projection(
            witness.kernel_complements[j - 1], kernel_nodes[j], tol
        ).projector
        cur = cur @ proj
        chained.append(cur)
    for i in range(1, n_chain + 1):
        proj = oblique_projection(
            range_nodes[i], witness.range_complements[i - 1], tol
        ).projector
        cur = proj @ cur
        chained.append(cur)
    t_mn = cur
    stages = []
    # closing stage: t_star -> w1 -> w2 -> (invertible factor) -> t_mn
    r_last = witness.kernel_complements[m]
    n_m = kernel_nodes[m]
    w1 = t_star
    if r_last.dim > 0 and n_m.dim > 0:
        stages.append(reverse_path(right_project_path(t_star, n_m, r_last, tol)))
        w1 = t_star @ oblique_projection(r_last, n_m, tol).projector
    s_last = witness.range_complements[n_chain]
    f_n = range_nodes[n_chain]
    w2 = w1
    if s_last.dim > 0:
        stages.append(reverse_path(left_project_path(w1, f_n, s_last, tol)))
        w2 = oblique_projection(f_n, s_last, tol).projector @ w1
    gl_segments = _gl_stage(w2, t_mn, r_last, s_last, k, tol)
    if gl_segments:
        stages.append(OperatorPath(tuple(gl_segments), t0.shape))
    # walk the range chain back down, then the kernel chain
    for i in range(n_chain, 0, -1):
        if witness.range_complements[i - 1].dim > 0:
            stages.append(
                left_project_path(
                    chained[m + i - 1], range_nodes[i], witness.range_complements[i - 1], tol
                )
            )
    for j in range(m, 0, -1):
        stages.append(
            right_project_path(
                chained[j - 1], kernel_nodes[j], witness.kernel_complements[j - 1], tol
            )
        )
    return _assemble(stages, t0.shape, t0)


def discover_chain(
    t0, t_star, tol: ToleranceConfig = DEFAULT_TOL
) -> ChainWitness:
    """Shortest witness between same-rank operators: one common complement a side."""
    t0 = as_matrix(t0)
    t_star = as_matrix(t_star)
    if t0.shape != t_star.shape:
        raise ValueError("endpoints must share a shape")
    if rank_of(t0, tol) != rank_of(t_star, tol):
        raise ValueError("rank mismatch: the operators are not equivalent")
    r1 = common_complement(kernel_basis(t0, tol), kernel_basis(t_star, tol), tol)
    s1 = common_complement(range_basis(t0, tol), range_basis(t_star, tol), tol)
    return ChainWitness((), (r1,), (), (s1,))
