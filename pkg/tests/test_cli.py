import json
import subprocess
import sys

import pytest

from ncqft.cli import build_config, main

pytestmark = pytest.mark.filterwarnings("ignore::ncqft.lsz.CoincidentMomentumWarning")


@pytest.fixture
def cfg0(tmp_path):
    path = tmp_path / "c0.json"
    path.write_text(json.dumps({"d": 0, "l": 2, "theta0": 0.3}))
    return str(path)


@pytest.fixture
def processes(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(
        json.dumps(
            {
                "processes": [
                    {"name": "diag", "in": [[0.3, 0.4, -0.2]], "out": [[0.3, 0.4, -0.2]], "core": "free2pt"},
                    {"name": "c22", "in": [[0.3, 0.4, -0.2], [0.1, 0.5, 0.7]], "out": [[-0.3, 0.2, 0.1], [0.2, 0.1, -0.6]], "core": "contact:2"},
                ]
            }
        )
    )
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_star_eval_phase(capsys, cfg0):
    code, out, _ = run(capsys, "--config", cfg0, "--format", "json", "star", "eval", "pw(1; 0,1,0) * pw(1; 0,0,1)")
    (rec,) = json.loads(out)
    assert code == 0 and rec["phase_exponent"] == -0.15 and rec["momentum"] == [0.0, 1.0, 1.0]


def test_star_eval_symbolic_commutator(capsys, cfg0):
    code, out, _ = run(capsys, "--config", cfg0, "star", "eval", "--symbolic", "poly(x1) * poly(x2) - poly(x2) * poly(x1)")
    assert code == 0 and "result: i*θ12" in out


def test_star_eval_symbolic_phase(capsys, cfg0):
    _, out, _ = run(capsys, "--config", cfg0, "star", "eval", "--symbolic", "pw(1; 0,1,0) * pw(1; 0,0,1)")
    assert "phase_exponent: -θ12/2" in out


def test_empty_expression_usage_error(capsys):
    code, _, err = run(capsys, "star", "eval", "")
    assert code == 2 and "position 0" in err


def test_unknown_subcommand(capsys):
    code, _, _ = run(capsys, "frobnicate")
    assert code == 2


def test_fock_vev_with_oracle(capsys):
    code, out, _ = run(capsys, "--format", "json", "fock", "vev", "a-(k0) a-(k1) a+(k0) a+(k1)", "--oracle", "4")
    (rec,) = json.loads(out)
    assert code == 0 and rec["oracle_deviation"] < 1e-12
    assert abs(complex(rec["vev"]["re"], rec["vev"]["im"])) == pytest.approx(1)


def test_fock_vev_truncation_error(capsys):
    code, _, err = run(capsys, "fock", "vev", "a-(k0) a-(k0) a-(k0) a+(k0) a+(k0) a+(k0)", "--oracle", "2")
    assert code == 2 and "N >=" in err


def test_corr_eval(capsys, tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"kind": "pairing", "points": [{"label": 1, "mode": 2, "sign": -1}, {"label": 2, "mode": 2, "sign": 1}]}))
    cfg = build_config({})
    code, out, _ = run(capsys, "--format", "json", "corr", "eval", str(spec))
    (rec,) = json.loads(out)
    assert code == 0 and rec["value"]["re"] == pytest.approx(1 / (2 * cfg.lattice.energy(2)))


def test_lsz_amp_fields(capsys, processes):
    code, out, _ = run(capsys, "--format", "json", "lsz", "amp", processes)
    recs = json.loads(out)
    assert code == 0 and len(recs) == 2
    assert set(recs[0]) >= {"schema_version", "amplitude", "modulus", "phase", "nc_phase_factor"}
    assert recs[0]["amplitude"] == {"re": 1.0, "im": 0.0}
    assert recs[1]["modulus"] == pytest.approx(abs(complex(recs[1]["amplitude"]["re"], recs[1]["amplitude"]["im"])))


def test_lsz_bad_core(capsys, processes):
    code, _, err = run(capsys, "lsz", "amp", processes, "--core", "magic")
    assert code == 2 and "unknown core" in err


def test_haag_check(capsys):
    code, out, _ = run(capsys, "--format", "json", "haag", "check")
    recs = json.loads(out)
    assert code == 0 and all(r["consistent"] for r in recs)
    assert any(not r["equal"] for r in recs if not r["predicted_equal"])


def test_verify_ccr_oracle(capsys):
    code, out, _ = run(capsys, "--format", "json", "verify", "ccr-oracle")
    recs = json.loads(out)
    assert code == 0 and max(r["max_deviation"] for r in recs) < 1e-12


def test_verify_all_zero_theta(capsys, tmp_path):
    path = tmp_path / "z.json"
    path.write_text(json.dumps({"d": 1, "l": 2, "theta0": 0.0}))
    code, out, _ = run(capsys, "--config", str(path), "verify", "all")
    assert code == 0 and "FAIL" not in out


def test_verify_corrupted_theta(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"d": 1, "l": 2, "theta_block": [[0, 1], [2, 0]]}))
    code, out, err = run(capsys, "--config", str(path), "verify", "all")
    assert code == 2 and out == "" and "antisymmetric" in err


def test_verify_unknown_suite(capsys):
    assert run(capsys, "verify", "nope")[0] == 2


def test_bad_tolerance(capsys):
    code, _, err = run(capsys, "--tolerance", "-1", "verify", "pairing")
    assert code == 2 and "tolerance" in err


def test_export_phase_table_sweep(capsys, tmp_path):
    inputs = tmp_path / "one.json"
    inputs.write_text(json.dumps([{"in": [[0.3, 0.4, -0.2], [0.1, 0.5, 0.7]], "out": [[-0.3, 0.2, 0.1], [0.2, 0.1, -0.6]]}]))
    code, out, _ = run(capsys, "--format", "csv", "export", "phase-table", str(inputs), "--theta0", "0,0.1,1")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 4
    first = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert float(first["nc_phase_factor_re"]) == 1.0 and float(first["nc_phase_factor_im"]) == 0.0


def test_export_amplitude_table_diagonal(capsys, processes):
    _, out, _ = run(capsys, "--format", "json", "export", "amplitude-table", processes)
    assert json.loads(out)[0]["amplitude"] == {"re": 1.0, "im": 0.0}


def test_export_empty(capsys, tmp_path):
    empty = tmp_path / "e.json"
    empty.write_text("[]")
    code, out, _ = run(capsys, "export", "amplitude-table", str(empty))
    assert code == 0 and out.startswith("schema_version,") and len(out.strip().splitlines()) == 1


def test_export_deterministic(capsys, processes, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for target in (a, b):
        assert run(capsys, "export", "amplitude-table", processes, "-o", str(target))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_missing_input_path(capsys):
    code, _, err = run(capsys, "lsz", "amp", "/nonexistent/p.json")
    assert code == 2 and "/nonexistent/p.json" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ncqft", "star", "eval", "poly(x1)"], capture_output=True, text=True)
    assert res.returncode == 0 and "x1" in res.stdout
