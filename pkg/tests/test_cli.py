import json

import pytest
from typer.testing import CliRunner

from dqgkit.assembly import normalized_cutoff
from dqgkit.blockalg import Element
from dqgkit.core import perturb_isometry
from dqgkit.formats import SpecDocument, emit_element, load_spec, save_spec
from dqgkit.report import REPORT_VERSION
from main import app

runner = CliRunner()


@pytest.fixture(scope="module")
def s3_dual_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("specs") / "s3dual.json"
    result = runner.invoke(app, ["build", "group-dual", "S3", "--cycle", "regular", "-o", str(path)])
    assert result.exit_code == 0, result.output
    return path


@pytest.fixture(scope="module")
def z3_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("specs") / "z3.json"
    result = runner.invoke(app, ["build", "commutative", "Z3", "--cycle", "regular", "-o", str(path)])
    assert result.exit_code == 0, result.output
    return path


@pytest.mark.parametrize("verb", ["validate", "haar", "dual", "module", "assemble"])
def test_verbs_pass_on_group_dual(verb, s3_dual_path):
    result = runner.invoke(app, ["--samples", "4", verb, str(s3_dual_path)])
    assert result.exit_code == 0, result.output


def test_machine_output_is_deterministic(s3_dual_path):
    args = ["--format", "machine", "--samples", "4", "--seed", "7", "validate", str(s3_dual_path)]
    first = runner.invoke(app, args)
    second = runner.invoke(app, args)
    assert first.exit_code == 0
    assert first.output == second.output
    lines = first.output.splitlines()
    header = json.loads(lines[0])
    assert header["record"] == "header"
    assert header["version"] == REPORT_VERSION
    assert header["seed"] == 7
    assert all(json.loads(line)["record"] == "check" for line in lines[1:])


def test_seed_from_environment(s3_dual_path):
    result = runner.invoke(
        app, ["--format", "machine", "--samples", "2", "haar", str(s3_dual_path)], env={"DQG_SEED": "99"}
    )
    assert result.exit_code == 0
    assert json.loads(result.output.splitlines()[0])["seed"] == 99


def test_corrupted_spec_fails(tmp_path, s3_dual_path):
    doc = load_spec(s3_dual_path)
    broken = SpecDocument(perturb_isometry(doc.spec, "rho2", "rho2", "rho2", 1e-3, seed=4), doc.haar)
    path = tmp_path / "broken.json"
    save_spec(broken, path)
    result = runner.invoke(app, ["--samples", "32", "validate", str(path)])
    assert result.exit_code == 1


def test_malformed_documents_exit_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    result = runner.invoke(app, ["validate", str(path)])
    assert result.exit_code == 2
    assert "error:" in result.output


def test_assemble_needs_a_cycle(tmp_path):
    plain = tmp_path / "plain.json"
    assert runner.invoke(app, ["build", "group-dual", "S3", "-o", str(plain)]).exit_code == 0
    assert runner.invoke(app, ["assemble", str(plain)]).exit_code == 2
    suq2 = tmp_path / "suq2.json"
    assert runner.invoke(app, ["build", "suq2", "--q", "1.5", "--L", "1", "-o", str(suq2)]).exit_code == 0
    assert runner.invoke(app, ["assemble", str(suq2)]).exit_code == 2


def test_suq2_window_verbs(tmp_path):
    path = tmp_path / "suq2.json"
    assert runner.invoke(app, ["build", "suq2", "--q", "1.5", "--L", "2", "-o", str(path)]).exit_code == 0
    result = runner.invoke(app, ["--samples", "3", "validate", str(path)])
    assert result.exit_code == 0, result.output
    result = runner.invoke(app, ["--samples", "3", "--window-grow", "1", "haar", str(path)])
    assert result.exit_code == 0, result.output


def test_build_rejects_bad_input():
    assert runner.invoke(app, ["build", "suq2", "--q", "1.0"]).exit_code == 2
    assert runner.invoke(app, ["build", "commutative", "Q8"]).exit_code == 2
    assert runner.invoke(app, ["build", "commutative", "Z3", "--cycle", "nonsense"]).exit_code == 2
    assert runner.invoke(app, ["--format", "xml", "validate", "x.json"]).exit_code == 2


def test_build_writes_to_stdout():
    result = runner.invoke(app, ["build", "commutative", "Z2"])
    assert result.exit_code == 0
    assert json.loads(result.output)["name"]


def test_assemble_and_homotopy_on_z3(tmp_path, z3_path):
    result = runner.invoke(app, ["--samples", "4", "assemble", str(z3_path)])
    assert result.exit_code == 0, result.output

    doc = load_spec(z3_path)
    h2 = normalized_cutoff(doc.coaction, doc.haar, Element({"1": [[1.0]]}))
    cutoff = tmp_path / "h2.json"
    cutoff.write_bytes(emit_element(h2))
    result = runner.invoke(app, ["--samples", "4", "homotopy", str(z3_path), "--h2", str(cutoff), "--steps", "3"])
    assert result.exit_code == 0, result.output


def test_unknown_verb():
    assert runner.invoke(app, ["frobnicate"]).exit_code == 2
