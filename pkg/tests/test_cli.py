import json

import pytest

from picturelab.cli import EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_state_report(capsys):
    code, out, _ = run(capsys, "state", "--kind", "rho_s", "--eta", "0.5",
                       "--n-max", "14")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["kind"] == "density"
    assert doc["dims"] == [15, 15]
    assert abs(doc["diagonal"][0] - 0.75) < 1e-12
    assert doc["max_offdiagonal"] == 0.0
    assert doc["config"]["record"]["state"] == "rho_s"


def test_state_config_file(tmp_path, capsys):
    cfg = tmp_path / "state.json"
    cfg.write_text(json.dumps({"state": "coherent", "params": {"alpha": 1.0, "n_max": 20}}))
    code, out, _ = run(capsys, "state", "--config", str(cfg))
    assert code == EXIT_OK
    assert json.loads(out)["kind"] == "ket"


def test_state_bad_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "state.json"
    cfg.write_text(json.dumps({"state": "rho_s", "params": {"eta": 0.5, "bogus": 1}}))
    code, _, err = run(capsys, "state", "--config", str(cfg))
    assert code == EXIT_USAGE
    doc = json.loads(err)
    assert doc["error"] == "validation"
    assert doc["type"] == "ConfigurationError"


def test_negativity_bell(capsys):
    code, out, _ = run(capsys, "negativity", "--kind", "bell")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["status"] == "entangled-certified"
    assert abs(doc["negativity"] - 0.5) < 1e-12


def test_negativity_rho_s_certificate(capsys):
    code, out, _ = run(capsys, "negativity", "--kind", "rho_s", "--eta", "0.5",
                       "--n-max", "14")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["status"] == "separable-certified"
    assert doc["certificate"][0]["occupations"] == [0, 0]


def test_negativity_resource_exit(capsys):
    code, _, err = run(capsys, "negativity", "--kind", "rho_t", "--eta", "0.6",
                       "--m", "3", "--n-max", "8")
    assert code == EXIT_RESOURCE
    assert json.loads(err)["error"] == "resource"


def test_bell_scan_csv(tmp_path, capsys):
    out_file = tmp_path / "scan.csv"
    code, _, _ = run(capsys, "bell-scan", "--state", "vacuum", "--n-max", "8",
                     "--points", "5", "--out", str(out_file))
    assert code == EXIT_OK
    lines = out_file.read_text().strip().splitlines()
    assert lines[0].startswith("# config: ")
    cfg = json.loads(lines[0][len("# config: "):])
    assert cfg["state"] == "vacuum"
    assert lines[1] == "a0,a1,b0,b1,chsh"
    assert len(lines) == 2 + 5 * 5 + 1  # grid rows plus the best row
    best = float(lines[-1].rsplit(",", 1)[1])
    assert best <= 2.0 + 1e-9


def test_protocol_determinism(tmp_path, capsys):
    args = ["protocol", "--eta", "0.6", "--m", "40", "--m", "80",
            "--experiments", "20", "--phase-model", "shared", "--seed", "42"]
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *args, "--out", str(f1))[0] == EXIT_OK
    assert run(capsys, *args, "--out", str(f2))[0] == EXIT_OK
    assert f1.read_bytes() == f2.read_bytes()


def test_protocol_json_format(capsys):
    code, out, _ = run(capsys, "protocol", "--eta", "0.6", "--m", "40",
                       "--experiments", "10", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["config"]["eta"] == 0.6
    assert len(doc["points"]) == 1
    assert 0.0 <= doc["points"][0]["p_hat"] <= 1.0


def test_protocol_bad_m_exits_2(capsys):
    code, _, err = run(capsys, "protocol", "--eta", "0.6", "--m", "10",
                       "--experiments", "5")
    assert code == EXIT_USAGE
    assert json.loads(err)["error"] == "validation"


def test_qubit_demo_report(capsys):
    code, out, _ = run(capsys, "qubit-demo")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["reduced_state_negativity"] == 0.0
    assert all(abs(c["probability"] - 0.25) < 1e-12
               and abs(c["fidelity"] - 1.0) < 1e-12
               for c in doc["conditional_states"])


def test_picture_check_all_pass(capsys):
    code, out, _ = run(capsys, "picture-check")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["all_pass"] is True
    assert len(doc["checks"]) == 2


def test_plot_written_next_to_output(tmp_path, capsys):
    out_file = tmp_path / "scan.csv"
    code, _, _ = run(capsys, "bell-scan", "--state", "vacuum", "--n-max", "6",
                     "--points", "3", "--out", str(out_file), "--plot")
    assert code == EXIT_OK
    assert (tmp_path / "scan.png").exists()


def test_unknown_flag_is_argparse_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["state", "--no-such-flag"])
    assert exc.value.code == 2


def test_tail_tol_env_override(capsys, monkeypatch):
    monkeypatch.setenv("PICTURELAB_TAIL_TOL", "1e-3")
    code, out, _ = run(capsys, "state", "--kind", "rho_s", "--eta", "0.5",
                       "--n-max", "8")
    assert code == EXIT_OK
    assert json.loads(out)["config"]["tail_tol"] == 1e-3
    monkeypatch.setenv("PICTURELAB_TAIL_TOL", "junk")
    code, _, err = run(capsys, "state", "--kind", "rho_s", "--eta", "0.5",
                       "--n-max", "8")
    assert code == EXIT_USAGE
