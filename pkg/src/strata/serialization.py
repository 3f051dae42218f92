"""JSON encoding of every artifact the tools read or write.

One matrix format is shared repo-wide: {"rows": r, "cols": c, "data":
[row-major numbers]}.  Subspace files add a "subspace": true flag and use
their ambient dimension as the row count.  Field order is fixed
everywhere so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json

import numpy as np

from .certify import PathCertificate, SampleRecord
from .geometry import TangentBasis
from .paths import (
    ChainWitness,
    FlipAudit,
    OperatorPath,
    PathSegment,
    make_segment,
)
from .projections import GraphParam
from .subspaces import Subspace

__all__ = [
    "matrix_to_obj",
    "matrix_from_obj",
    "subspace_to_obj",
    "subspace_from_obj",
    "graph_param_to_obj",
    "graph_param_from_obj",
    "path_to_obj",
    "path_from_obj",
    "tangent_basis_to_obj",
    "certificate_to_obj",
    "audit_to_obj",
    "instance_to_obj",
    "instance_from_obj",
    "instance_echo",
    "membership_from_obj",
    "witness_to_obj",
    "witness_from_obj",
    "save_json",
    "load_json",
]


def matrix_to_obj(a) -> dict:
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [float(x) for x in a.ravel(order="C")],
    }


def matrix_from_obj(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    data = np.asarray(obj["data"], dtype=float)
    if data.size != rows * cols:
        raise ValueError("matrix data length disagrees with its shape")
    return data.reshape(rows, cols)


def subspace_to_obj(s: Subspace) -> dict:
    obj = matrix_to_obj(s.basis)
    obj["subspace"] = True
    return obj


def subspace_from_obj(obj: dict) -> Subspace:
    basis = matrix_from_obj(obj)
    if basis.shape[1] == 0:
        return Subspace.zero(basis.shape[0])
    return Subspace.from_columns(basis)


def graph_param_to_obj(g: GraphParam) -> dict:
    return {
        "domain": subspace_to_obj(g.domain),
        "codomain": subspace_to_obj(g.codomain),
        "coeff": matrix_to_obj(g.coeff),
    }


def graph_param_from_obj(obj: dict) -> GraphParam:
    return GraphParam(
        subspace_from_obj(obj["domain"]),
        subspace_from_obj(obj["codomain"]),
        matrix_from_obj(obj["coeff"]),
    )


_VECTOR_KEYS = {"u", "w"}
_SCALAR_KEYS = {"side"}


def _segment_to_obj(seg: PathSegment) -> dict:
    obj = {"kind": seg.kind}
    for key in sorted(seg.payload):
        value = seg.payload[key]
        if key in _SCALAR_KEYS:
            obj[key] = value
        elif key in _VECTOR_KEYS:
            obj[key] = [float(x) for x in np.asarray(value).ravel()]
        else:
            obj[key] = matrix_to_obj(value)
    obj["start"] = matrix_to_obj(seg.start)
    obj["end"] = matrix_to_obj(seg.end)
    return obj


def _segment_from_obj(obj: dict) -> PathSegment:
    payload = {}
    for key, value in obj.items():
        if key in ("kind", "start", "end"):
            continue
        if key in _SCALAR_KEYS:
            payload[key] = value
        elif key in _VECTOR_KEYS:
            payload[key] = np.asarray(value, dtype=float)
        else:
            payload[key] = matrix_from_obj(value)
    return make_segment(
        obj["kind"], payload, matrix_from_obj(obj["start"]), matrix_from_obj(obj["end"])
    )


def path_to_obj(p: OperatorPath, instance: dict | None = None) -> dict:
    obj = {"shape": [int(p.shape[0]), int(p.shape[1])]}
    if instance is not None:
        obj["instance"] = instance
    obj["segments"] = [_segment_to_obj(s) for s in p.segments]
    return obj


def path_from_obj(obj: dict) -> OperatorPath:
    shape = tuple(int(x) for x in obj["shape"])
    segments = tuple(_segment_from_obj(s) for s in obj["segments"])
    return OperatorPath(segments, shape)


def tangent_basis_to_obj(tb: TangentBasis) -> dict:
    return {
        "at": matrix_to_obj(tb.at.op),
        "k": int(tb.at.k),
        "dim": int(tb.dim),
        "basis": [matrix_to_obj(b) for b in tb.basis],
    }


def _sample_to_obj(rec: SampleRecord) -> dict:
    return {
        "t": rec.t,
        "segment": rec.segment,
        "local_t": rec.local_t,
        "rank": rec.rank,
        "sigma_k": rec.sigma_k,
        "sigma_k_plus_1": rec.sigma_k_plus_1,
        "membership_residuals": rec.membership_residuals,
        "ok": rec.ok,
    }


def certificate_to_obj(cert: PathCertificate) -> dict:
    return {
        "instance": cert.instance,
        "grid_size": cert.grid_size,
        "expected_k": cert.expected_k,
        "per_sample": [_sample_to_obj(r) for r in cert.per_sample],
        "endpoint_errors": [cert.endpoint_errors[0], cert.endpoint_errors[1]],
        "verdict": cert.verdict,
        "failures": list(cert.failures),
    }


def audit_to_obj(audit: FlipAudit) -> dict:
    return {
        "grid_size": audit.grid_size,
        "degenerate": audit.degenerate,
        "passed": audit.passed,
        "failures": list(audit.failures),
        "records": list(audit.records),
    }


def instance_to_obj(payload: dict) -> dict:
    obj = {}
    for key, value in payload.items():
        if isinstance(value, np.ndarray):
            obj[key] = matrix_to_obj(value)
        elif isinstance(value, Subspace):
            obj[key] = subspace_to_obj(value)
        else:
            obj[key] = value
    return obj


def instance_from_obj(obj: dict) -> dict:
    payload = {}
    for key, value in obj.items():
        if isinstance(value, dict) and "rows" in value and "data" in value:
            if value.get("subspace"):
                payload[key] = subspace_from_obj(value)
            else:
                payload[key] = matrix_from_obj(value)
        else:
            payload[key] = value
    return payload


def instance_echo(payload: dict) -> dict:
    """The scalar part of an instance payload, for certificate embedding."""
    return {
        key: payload[key] for key in ("kind", "m", "n", "k", "seed") if key in payload
    }


def membership_from_obj(obj: dict):
    from .certify import MembershipSpec

    def get(key):
        value = obj.get(key)
        return None if value is None else subspace_from_obj(value)

    return MembershipSpec(
        range_complement=get("range_complement"),
        kernel_complement=get("kernel_complement"),
        kernel_equals=get("kernel_equals"),
    )


def witness_to_obj(w: ChainWitness) -> dict:
    return {
        "kernels": [subspace_to_obj(s) for s in w.kernels],
        "kernel_complements": [subspace_to_obj(s) for s in w.kernel_complements],
        "ranges": [subspace_to_obj(s) for s in w.ranges],
        "range_complements": [subspace_to_obj(s) for s in w.range_complements],
    }


def witness_from_obj(obj: dict) -> ChainWitness:
    return ChainWitness(
        tuple(subspace_from_obj(s) for s in obj["kernels"]),
        tuple(subspace_from_obj(s) for s in obj["kernel_complements"]),
        tuple(subspace_from_obj(s) for s in obj["ranges"]),
        tuple(subspace_from_obj(s) for s in obj["range_complements"]),
    )


def save_json(obj, path) -> None:
    with open(path, "w") as f:
        json.dump(obj, f, indent=2)
        f.write("\n")


def load_json(path):
    with open(path) as f:
        return json.load(f)
