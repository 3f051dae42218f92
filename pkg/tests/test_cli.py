import json

import numpy as np
import pytest

from strata.cli import main
from strata import serialization as ser


def run(args):
    return main([str(a) for a in args])


class TestGenConnectCertify:
    def test_pipeline(self, tmp_path):
        pair = tmp_path / "pair.json"
        path = tmp_path / "path.json"
        cert = tmp_path / "cert.json"
        assert run(["gen", "--m", 3, "--n", 3, "--k", 2, "--seed", 7,
                    "--kind", "fk-pair", "--out", pair]) == 0
        assert run(["connect", "--in", pair, "--mode", "fk", "--out", path]) == 0
        assert run(["certify", "--path", path, "--k", 2, "--samples", 301,
                    "--out", cert]) == 0
        loaded = json.loads(cert.read_text())
        assert loaded["verdict"] == "pass"
        assert loaded["instance"]["seed"] == 7

    def test_reverse_flag(self, tmp_path):
        pair = tmp_path / "pair.json"
        run(["gen", "--m", 2, "--n", 2, "--k", 1, "--seed", 1,
             "--kind", "fk-pair", "--out", pair])
        fwd, rev = tmp_path / "f.json", tmp_path / "r.json"
        run(["connect", "--in", pair, "--mode", "fk", "--out", fwd])
        run(["connect", "--in", pair, "--mode", "fk", "--reverse", "--out", rev])
        payload = ser.instance_from_obj(ser.load_json(fwd))
        p_fwd = ser.path_from_obj(ser.load_json(fwd))
        p_rev = ser.path_from_obj(ser.load_json(rev))
        from strata import eval_path

        assert np.allclose(eval_path(p_fwd, 0.0), eval_path(p_rev, 1.0), atol=1e-9)

    def test_phi_and_chain_modes(self, tmp_path):
        pair = tmp_path / "pair.json"
        run(["gen", "--m", 4, "--n", 3, "--k", 2, "--seed", 5,
             "--kind", "phi-pair", "--out", pair])
        for mode in ("phi", "chain"):
            path = tmp_path / f"{mode}.json"
            cert = tmp_path / f"{mode}-cert.json"
            assert run(["connect", "--in", pair, "--mode", mode, "--out", path]) == 0
            assert run(["certify", "--path", path, "--k", 2, "--samples", 201,
                        "--out", cert]) == 0

    def test_certify_exit_codes(self, tmp_path):
        pair = tmp_path / "pair.json"
        path = tmp_path / "path.json"
        cert = tmp_path / "cert.json"
        run(["gen", "--m", 2, "--n", 2, "--k", 1, "--seed", 2,
             "--kind", "fk-pair", "--out", pair])
        run(["connect", "--in", pair, "--mode", "fk", "--out", path])
        # wrong expected rank: fail -> exit 1
        assert run(["certify", "--path", path, "--k", 2, "--samples", 51,
                    "--out", cert]) == 1
        # zero expected rank: degenerate -> exit 2
        assert run(["certify", "--path", path, "--k", 0, "--samples", 51,
                    "--out", cert]) == 2

    def test_deterministic_outputs(self, tmp_path):
        out = []
        for name in ("a", "b"):
            pair = tmp_path / f"pair-{name}.json"
            path = tmp_path / f"path-{name}.json"
            cert = tmp_path / f"cert-{name}.json"
            run(["gen", "--m", 3, "--n", 2, "--k", 1, "--seed", 9,
                 "--kind", "fk-pair", "--out", pair])
            run(["connect", "--in", pair, "--mode", "fk", "--out", path])
            run(["certify", "--path", path, "--k", 1, "--samples", 101,
                 "--out", cert])
            out.append((pair.read_bytes(), path.read_bytes(), cert.read_bytes()))
        assert out[0] == out[1]

    def test_disconnected_reports_error(self, tmp_path, capsys):
        pair = tmp_path / "pair.json"
        obj = {
            "kind": "fk-pair", "m": 2, "n": 2, "k": 2, "seed": 0,
            "T1": ser.matrix_to_obj(np.eye(2)),
            "T2": ser.matrix_to_obj(np.diag([-1.0, 1.0])),
        }
        ser.save_json(obj, pair)
        code = run(["connect", "--in", pair, "--mode", "fk",
                    "--out", tmp_path / "p.json"])
        assert code == 4
        assert "components" in capsys.readouterr().err


class TestOtherCommands:
    def test_dim_prints(self, capsys):
        assert run(["dim", "--m", 3, "--n", 2, "--k", 1]) == 0
        assert capsys.readouterr().out == "4\n"

    def test_audit_exits_one(self, tmp_path):
        out = tmp_path / "audit.json"
        assert run(["audit-thm12", "--dim", 4, "--seed", 11, "--out", out]) == 1
        report = json.loads(out.read_text())
        assert 0.5 in report["failures"]
        assert report["passed"] is False

    def test_flip_command(self, tmp_path):
        t = tmp_path / "T.json"
        ser.save_json(ser.matrix_to_obj(np.array([[1.0, 0.0], [0.0, 0.0]])), t)
        out = tmp_path / "flip.json"
        assert run(["flip", "--in", t, "--out", out]) == 0
        cert = tmp_path / "cert.json"
        assert run(["certify", "--path", out, "--k", 1, "--samples", 101,
                    "--out", cert]) == 0

    def test_tangent_command(self, tmp_path):
        t = tmp_path / "X.json"
        ser.save_json(ser.matrix_to_obj(np.array([[1.0, 0.0], [0.0, 0.0]])), t)
        out = tmp_path / "basis.json"
        assert run(["tangent", "--in", t, "--out", out]) == 0
        basis = json.loads(out.read_text())
        assert basis["dim"] == 3

    def test_membership_file(self, tmp_path):
        # certify the literal flip family against its complement: must fail
        from strata import GraphParam, literal_flip_path
        from strata.subspaces import Subspace

        e_star = Subspace.span([1, 0])
        r = Subspace.span([0, 1])
        coeff = r.basis.T @ np.array([[0.0, 0.0], [1.0, 0.0]]) @ e_star.basis
        p = literal_flip_path(e_star, r, GraphParam(e_star, r, coeff))
        path_file = tmp_path / "path.json"
        ser.save_json(ser.path_to_obj(p), path_file)
        member_file = tmp_path / "member.json"
        ser.save_json({"range_complement": ser.subspace_to_obj(r)}, member_file)
        cert = tmp_path / "cert.json"
        code = run(["certify", "--path", path_file, "--k", 1, "--samples", 11,
                    "--membership", member_file, "--out", cert])
        assert code == 1
        assert 0.5 in json.loads(cert.read_text())["failures"]

    def test_strata_tol_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("STRATA_TOL", "1e-2")
        t = tmp_path / "T.json"
        # second singular value 1e-4 sits below the loosened cutoff
        ser.save_json(ser.matrix_to_obj(np.diag([1.0, 1e-4])), t)
        out = tmp_path / "basis.json"
        assert run(["tangent", "--in", t, "--out", out]) == 0
        assert json.loads(out.read_text())["k"] == 1
