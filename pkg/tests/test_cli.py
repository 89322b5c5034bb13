"""End-to-end exercises of the command line front end."""

import json
import math

import pytest

from rotascope.cli import main

GOLDEN = 0.6180339887498949


def _run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_rho_identity_json(capsys):
    rc, out, err = _run(capsys, "rho", "--family", "identity", "--t", "0.25")
    assert rc == 0
    assert json.loads(out) == {"value": 0.25, "radius": 0.0, "locked": "1/4"}


def test_rho_identity_csv(capsys):
    rc, out, _ = _run(capsys, "rho", "--family", "identity", "--t", "0.25",
                      "--format", "csv")
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "value,radius,locked_p,locked_q"
    assert lines[1] == "0.25,0.0,1,4"


def test_rho_birkhoff_method(capsys):
    rc, out, _ = _run(capsys, "rho", "--family", "identity", "--t", "0.3",
                      "--method", "birkhoff", "--n", "1000")
    assert rc == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(0.3, abs=1e-12)
    assert doc["radius"] == pytest.approx(0.001)
    assert doc["locked"] is None


def test_rho_higher_precision(capsys):
    rc, out, _ = _run(capsys, "rho", "--family", "identity", "--t", "0.25",
                      "--precision", "30")
    assert rc == 0
    assert json.loads(out)["value"] == 0.25


def test_cf_rational_json(capsys):
    rc, out, _ = _run(capsys, "cf", "--alpha", "355/113", "--terms", "10")
    assert rc == 0
    doc = json.loads(out)
    assert doc["quotients"] == [3, 7, 16]
    assert doc["convergents"] == ["3/1", "22/7", "355/113"]
    assert doc["exact"] is True


def test_cf_golden_csv(capsys):
    rc, out, _ = _run(capsys, "cf", "--alpha", repr(GOLDEN),
                      "--terms", "5", "--format", "csv")
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "k,a,p,q"
    assert lines[1] == "0,0,0,1"
    assert lines[5] == "4,1,3,5"


def test_plateau_arnold_json(capsys):
    rc, out, _ = _run(capsys, "plateau", "--family", "arnold", "--K", "0.9",
                      "--p", "0", "--q", "1")
    assert rc == 0
    doc = json.loads(out)
    half_width = 0.9 / (2 * math.pi)
    assert doc["p"] == 0 and doc["q"] == 1
    assert doc["t_left"] == pytest.approx(-half_width, abs=1e-9)
    assert doc["t_right"] == pytest.approx(half_width, abs=1e-9)


def test_inverse_identity_rational_target(capsys):
    rc, out, _ = _run(capsys, "inverse", "--family", "identity",
                      "--alpha", "1/3")
    assert rc == 0
    doc = json.loads(out)
    assert doc["t"] == pytest.approx(1 / 3, abs=1e-12)
    assert doc["alpha"] == pytest.approx(1 / 3)


def test_jd_identity_holds(capsys):
    rc, out, _ = _run(capsys, "jd", "--family", "identity",
                      "--p", "1", "--q", "5", "--d", "3.5")
    assert rc == 0
    doc = json.loads(out)
    assert doc["holds"] is True
    assert doc["measure"] == pytest.approx(2 * 5.0 ** -3.5, abs=1e-7)
    assert doc["bound"] == pytest.approx(2 * 5.0 ** -3.5, rel=1e-12)


def test_sweep_csv_and_plot_files(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc, out, _ = _run(capsys, "sweep", "--family", "identity",
                      "--t-lo", "0", "--t-hi", "0.3", "--samples", "4",
                      "--format", "csv", "--plot", "stair")
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "t,rho,radius,locked_p,locked_q"
    assert len(lines) == 5
    assert lines[1] == "0.0,0.0,0.0,0,1"
    assert (tmp_path / "stair.dat").exists()
    assert (tmp_path / "stair.gp").exists()


def test_denjoy_identity_report(capsys):
    rc, out, _ = _run(capsys, "denjoy", "--family", "identity",
                      "--t", repr(GOLDEN), "--index", "3")
    assert rc == 0
    doc = json.loads(out)
    assert doc["pq"] == "2/3"
    assert all(doc["checks"].values())
    assert doc["constants"]["M"] == 0.0
    assert doc["hat"]["holds"] is True
    assert doc["hat"]["quotient"] == pytest.approx(1.0, abs=1e-9)


def test_conjugacy_ladder(capsys):
    rc, out, _ = _run(capsys, "conjugacy", "--family", "identity",
                      "--t", repr(GOLDEN), "--n", "512", "--ladder", "2")
    assert rc == 0
    doc = json.loads(out)
    assert doc["n"] == 512
    assert doc["derivative"] == pytest.approx(1.0, abs=1e-6)
    assert [step["n"] for step in doc["ladder"]] == [256, 128]
    for step in doc["ladder"]:
        assert step["residual"] <= 1e-6


def test_probe_convergents_csv_header(capsys):
    rc, out, _ = _run(capsys, "probe", "convergents", "--family", "identity",
                      "--t", repr(GOLDEN), "--n-conv", "3",
                      "--no-refined", "--format", "csv")
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "k,p,q,t_prime,quotient,uncertainty,bound_coarse,bound_refined"
    assert len(lines) == 5
    # identity quotients are exactly 1, refined floor suppressed
    assert lines[1].split(",")[4] == "1.0"
    assert lines[1].endswith(",")


def test_probe_boundary_json(capsys):
    rc, out, _ = _run(capsys, "probe", "boundary", "--family", "arnold",
                      "--K", "0.5", "--p", "0", "--q", "1",
                      "--deltas", "1e-2,1e-3")
    assert rc == 0
    doc = json.loads(out)
    assert doc["side"] == "right"
    assert doc["quotients"][1] > doc["quotients"][0]
    assert doc["loglog_slope"] < -0.3


def test_verify_single_check_schema(capsys):
    rc, out, _ = _run(capsys, "verify", "--suite", "path-derivative-identity")
    assert rc == 0
    doc = json.loads(out)
    assert len(doc["checks"]) == 1
    check = doc["checks"][0]
    assert set(check) == {"id", "ref", "status", "observed", "bound",
                          "tol", "seconds"}
    assert check["id"] == "path-derivative-identity"
    assert check["status"] == "pass"


def test_verify_unknown_suite_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "no-such-check"])
    assert exc.value.code == 2


def test_missing_required_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["rho", "--family", "identity"])
    assert exc.value.code == 2


def test_arnold_without_coupling_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["rho", "--family", "arnold", "--t", "0.1"])
    assert exc.value.code == 2


def test_non_diffeo_lift_reports_domain_error(capsys):
    rc, out, err = _run(capsys, "rho", "--family", "custom",
                        "--sin", "0.2", "--t", "0.0")
    assert rc == 1
    assert out == ""
    assert "DomainError" in err
