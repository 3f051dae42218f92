import numpy as np
import pytest

from strata import (
    GraphParam,
    MembershipSpec,
    Subspace,
    certify_path,
    connect_fk,
    constant_path,
    eval_path,
    kernel_basis,
    literal_flip_path,
)
from strata.instances import InstanceSpec, gen_instance
from strata.serialization import certificate_to_obj

from conftest import span


def tilt(e_star, r, ambient):
    coeff = r.basis.T @ np.asarray(ambient, dtype=float) @ e_star.basis
    return GraphParam(e_star, r, coeff)


class TestCertify:
    def test_constant_rank_one_passes(self):
        p = constant_path(np.array([[1.0, 0.0], [0.0, 0.0]]))
        cert = certify_path(p, 1, grid=11)
        assert cert.verdict == "pass"
        assert cert.failures == ()
        assert all(r.rank == 1 for r in cert.per_sample)

    def test_literal_flip_fails_at_half(self):
        e_star, r = span([1, 0]), span([0, 1])
        p = literal_flip_path(e_star, r, tilt(e_star, r, [[0, 0], [1, 0]]))
        cert = certify_path(p, 1, grid=11, membership=MembershipSpec(range_complement=r))
        assert cert.verdict == "fail"
        assert 0.5 in cert.failures

    def test_full_pipeline_pass(self):
        payload = gen_instance(InstanceSpec(m=2, n=2, k=1, seed=7, kind="fk-pair"))
        p = connect_fk(payload["T1"], payload["T2"])
        cert = certify_path(p, 1, grid=1001)
        assert cert.verdict == "pass"
        assert max(cert.endpoint_errors) <= 1e-9

    def test_degenerate_zero_rank(self):
        cert = certify_path(constant_path(np.zeros((2, 2))), 0, grid=5)
        assert cert.verdict == "degenerate"

    def test_membership_kernel_checks(self):
        t = np.array([[1.0, 0.0], [0.0, 0.0]])
        p = constant_path(t)
        ker = kernel_basis(t)
        good = certify_path(
            p,
            1,
            grid=5,
            membership=MembershipSpec(
                kernel_equals=ker, kernel_complement=span([1, 0])
            ),
        )
        assert good.verdict == "pass"
        bad = certify_path(
            p, 1, grid=5, membership=MembershipSpec(kernel_equals=span([1, 0]))
        )
        assert bad.verdict == "fail"

    def test_grid_too_small(self):
        with pytest.raises(ValueError):
            certify_path(constant_path(np.eye(2)), 2, grid=1)

    def test_replay_recorded_samples(self):
        payload = gen_instance(InstanceSpec(m=3, n=3, k=2, seed=11, kind="fk-pair"))
        p = connect_fk(payload["T1"], payload["T2"])
        cert = certify_path(p, 2, grid=101)
        assert cert.verdict == "pass"
        rng = np.random.default_rng(0)
        picks = rng.choice(len(cert.per_sample), size=10, replace=False)
        for i in picks:
            rec = cert.per_sample[i]
            w = eval_path(p, rec.t)
            s = np.linalg.svd(w, compute_uv=False)
            assert abs(s[1] - rec.sigma_k) <= 1e-12 * (1 + s[0])
            next_sigma = s[2] if s.size > 2 else 0.0
            assert abs(next_sigma - rec.sigma_k_plus_1) <= 1e-12 * (1 + s[0])

    def test_certificates_deterministic(self):
        payload = gen_instance(InstanceSpec(m=3, n=2, k=1, seed=3, kind="fk-pair"))
        certs = []
        for _ in range(2):
            p = connect_fk(payload["T1"], payload["T2"])
            cert = certify_path(p, 1, grid=101, instance={"seed": 3})
            certs.append(certificate_to_obj(cert))
        import json

        assert json.dumps(certs[0]) == json.dumps(certs[1])

    def test_sigma_gap_enforced(self):
        # a nearly rank-deficient second value must fail the gap policy
        t = np.diag([1.0, 1e-8])
        cert = certify_path(constant_path(t), 1, grid=5)
        assert cert.verdict == "fail"


class TestInstances:
    def test_determinism(self):
        a = gen_instance(InstanceSpec(m=2, n=2, k=1, seed=7, kind="fk-pair"))
        b = gen_instance(InstanceSpec(m=2, n=2, k=1, seed=7, kind="fk-pair"))
        assert np.array_equal(a["T1"], b["T1"]) and np.array_equal(a["T2"], b["T2"])
        assert np.linalg.matrix_rank(a["T1"]) == 1

    def test_zero_rank(self):
        payload = gen_instance(InstanceSpec(m=3, n=2, k=0, seed=1, kind="fk-pair"))
        assert not payload["T1"].any() and not payload["T2"].any()

    def test_gl_conditioning(self):
        payload = gen_instance(InstanceSpec(m=3, n=3, k=3, seed=5, kind="gl"))
        s = np.linalg.svd(payload["A"], compute_uv=False)
        assert s[-1] / s[0] >= 1e-3

    def test_gl_needs_square(self):
        with pytest.raises(ValueError):
            gen_instance(InstanceSpec(m=2, n=3, k=2, seed=0, kind="gl"))

    def test_fk_conditioning_floor(self):
        for seed in range(20):
            payload = gen_instance(InstanceSpec(m=4, n=5, k=2, seed=seed, kind="fk-pair"))
            for key in ("T1", "T2"):
                s = np.linalg.svd(payload[key], compute_uv=False)
                assert s[1] / s[0] >= 1e-3

    def test_subspace_pair(self):
        payload = gen_instance(InstanceSpec(m=4, n=4, k=2, seed=9, kind="subspace-pair"))
        assert isinstance(payload["E1"], Subspace)
        assert payload["E1"].dim == 2 and payload["E1"].ambient_dim == 4

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            InstanceSpec(m=2, n=2, k=3, seed=0, kind="fk-pair")
        with pytest.raises(ValueError):
            InstanceSpec(m=2, n=2, k=1, seed=0, kind="nope")
