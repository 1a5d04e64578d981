import io
import json
import subprocess
import sys

import pytest

from schurpick.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_UNSOLVABLE, EXIT_USAGE, run

from conftest import fixture_path


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], stdout=out, stderr=err)
    text = out.getvalue()
    return code, (json.loads(text) if text else None), err.getvalue()


SINGLE = fixture_path("single_node_gamma1.json")
SINGULAR = fixture_path("two_node_singular.json")


class TestCheck:
    def test_solvable(self):
        code, out, _ = call("check", SINGLE)
        assert code == EXIT_OK
        assert out["solvable"] and out["psd"] and out["rank"] == 1

    def test_not_psd(self):
        code, out, _ = call("check", fixture_path("not_psd.json"))
        assert code == EXIT_UNSOLVABLE
        assert not out["psd"] and out["min_eigenvalue"] == pytest.approx(-0.9, abs=1e-12)

    def test_inadmissible(self):
        code, out, _ = call("check", fixture_path("bad_modulus.json"))
        assert code == EXIT_UNSOLVABLE
        assert not out["admissible"] and "node 0" in " ".join(out["messages"])

    @pytest.mark.parametrize("name", ["malformed.json", "absent.json"])
    def test_bad_input(self, name):
        code, out, err = call("check", fixture_path(name))
        assert code == EXIT_USAGE and out is None
        assert err.startswith("schurpick:")


class TestCoeffs:
    def test_single_node(self):
        code, out, _ = call("coeffs", SINGLE)
        assert code == EXIT_OK and not out["singular"]
        assert out["alpha"] == pytest.approx(2**0.5)
        assert out["inner_defect"] <= 1e-12

    def test_singular(self):
        code, out, _ = call("coeffs", SINGULAR)
        assert code == EXIT_OK and out["singular"] and out["rank"] == 1
        assert out["w"]["num"][1][0] == pytest.approx(1.0)

    def test_unsolvable(self):
        code, out, _ = call("coeffs", fixture_path("not_psd.json"))
        assert code == EXIT_UNSOLVABLE and out["error"]

    def test_numerical_failure(self):
        # tolerances this tight call a rank-one problem nonsingular
        code, out, err = call("coeffs", fixture_path("near_singular.json"), "--tol-rank", "1e-17", "--tol-psd", "1e-17")
        assert code == EXIT_NUMERICAL and out is None
        assert "numerical failure" in err


class TestSolve:
    def test_param(self):
        code, out, _ = call("solve", SINGLE, "--param", "blaschke:0")
        assert code == EXIT_OK and "note" not in out

    def test_file_param(self):
        code, out, _ = call("solve", SINGLE, "--param", "file:" + fixture_path("param_z.json"))
        assert code == EXIT_OK

    def test_singular_note(self):
        code, out, _ = call("solve", SINGULAR, "--param", "const:0.5")
        assert code == EXIT_OK and "ignored" in out["note"]

    @pytest.mark.parametrize("param", ["const:3", "bogus", "file:/nonexistent.json"])
    def test_bad_param(self, param):
        assert call("solve", SINGLE, "--param", param)[0] == EXIT_USAGE

    def test_missing_param(self):
        assert call("solve", SINGLE)[0] == EXIT_USAGE


class TestVerify:
    def test_solution(self):
        code, out, _ = call("verify", SINGLE, "--w", fixture_path("w_candidate.json"))
        assert code == EXIT_OK and out["solution"]
        assert out["nodes"][0]["gap"] == pytest.approx(2 / 3, abs=1e-8)

    def test_not_a_solution(self, tmp_path):
        wfile = tmp_path / "half.json"
        wfile.write_text(json.dumps({"num": [[0.5, 0]], "den": [[1, 0]]}))
        code, out, _ = call("verify", SINGLE, "--w", wfile)
        assert code == EXIT_OK and not out["solution"]
        assert not out["nodes"][0]["match"]

    def test_pole_at_node(self, tmp_path):
        wfile = tmp_path / "pole.json"
        wfile.write_text(json.dumps({"num": [[1, 0]], "den": [[1, 0], [-1, 0]]}))
        code, out, _ = call("verify", SINGLE, "--w", wfile)
        assert code == EXIT_OK and not out["solution"]
        assert out["nodes"][0]["jet_error"] == "inf" and out["sup_on_circle"] == "inf"

    def test_bad_function_file(self):
        assert call("verify", SINGLE, "--w", fixture_path("single_node_gamma1.json"))[0] == EXIT_USAGE


class TestGap:
    def test_nonsingular(self):
        code, out, _ = call("gap", SINGLE, "--param", "blaschke:0", "--node", 0)
        assert code == EXIT_OK
        assert out["direct"]["converged"]
        assert out["direct"]["value"] == pytest.approx(2 / 3, abs=1e-6)
        assert out["formula"] == pytest.approx(2 / 3, abs=1e-12)
        assert out["equality"] is False

    def test_equality(self):
        code, out, _ = call("gap", SINGLE, "--param", "const:0", "--node", 0)
        assert out["equality"] is True and out["formula"] == 0

    def test_singular(self):
        code, out, _ = call("gap", SINGULAR, "--param", "const:0", "--node", 1)
        assert code == EXIT_OK and out["singular"] and out["formula"] is None
        assert abs(out["direct"]["value"]) <= 1e-8

    @pytest.mark.parametrize("node", [-1, 1])
    def test_node_out_of_range(self, node):
        assert call("gap", SINGLE, "--param", "const:0", "--node", node)[0] == EXIT_USAGE

    def test_radial_steps(self):
        code, out, _ = call("gap", SINGLE, "--param", "blaschke:0", "--node", 0, "--radial-steps", 20)
        assert code == EXIT_OK and out["direct"]["value"] == pytest.approx(2 / 3, abs=1e-6)
        assert call("gap", SINGLE, "--param", "blaschke:0", "--node", 0, "--radial-steps", 1)[0] == EXIT_USAGE


class TestUsage:
    def test_no_command(self):
        assert call()[0] == EXIT_USAGE

    def test_unknown_flag(self):
        assert call("check", SINGLE, "--frobnicate")[0] == EXIT_USAGE

    def test_bad_grid(self):
        assert call("coeffs", SINGLE, "--grid", 0)[0] == EXIT_USAGE

    def test_out_file(self, tmp_path):
        target = tmp_path / "r.json"
        code, out, _ = call("check", SINGLE, "--out", target)
        assert code == EXIT_OK and out is None
        assert json.loads(target.read_text())["solvable"]

    def test_unwritable_out(self, tmp_path):
        assert call("check", SINGLE, "--out", tmp_path / "no" / "r.json")[0] == EXIT_USAGE


COMMANDS = [
    ["check", SINGLE],
    ["coeffs", SINGLE],
    ["coeffs", SINGULAR],
    ["solve", SINGLE, "--param", "blaschke:0.5,0.1;-0.2@1"],
    ["verify", SINGLE, "--w", fixture_path("w_candidate.json")],
    ["gap", fixture_path("w_z2.json"), "--param", "const:0.3,0.4", "--node", "0"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: a[0])
def test_byte_identical_runs(argv):
    runs = [subprocess.run([sys.executable, "-m", "schurpick.cli", *argv], capture_output=True) for _ in range(2)]
    assert runs[0].returncode == 0
    assert runs[0].stdout == runs[1].stdout
