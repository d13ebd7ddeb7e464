import json

import pytest

from pseudomoments import acceptance, cli


def run_cli(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def test_moment_harmonic(tmp_path, capsys):
    code, out = run_cli(["moment", "--N", "10", "--k", "1", "--rho2", "1/1",
                         "--results-dir", str(tmp_path)], capsys)
    assert code == 0
    record = json.loads(out)
    assert record["result"]["value_exact"] == "7381/2520"
    assert record["tool_version"]


def test_polytope_gamma_near_third(tmp_path, capsys):
    code, out = run_cli(["polytope", "gamma", "--k", "1", "--rho2", "1/1",
                         "--samples", "100000", "--seed", "7", "--workers", "2",
                         "--results-dir", str(tmp_path)], capsys)
    assert code == 0
    res = json.loads(out)["result"]
    mean = float(res["mean"])
    se = float(res["std_error"])
    assert abs(mean - 1 / 3) <= 5 * se


def test_cache_hit_byte_identical(tmp_path, capsys):
    argv = ["moment", "--N", "6", "--k", "2", "--rho2", "1/4",
            "--results-dir", str(tmp_path)]
    code1, out1 = run_cli(argv, capsys)
    code2, out2 = run_cli(argv, capsys)
    assert code1 == code2 == 0
    assert out1 == out2  # replayed bytes, including the original timestamp
    assert len(list(tmp_path.glob("*.json"))) == 1


def test_cache_distinguishes_params(tmp_path, capsys):
    run_cli(["moment", "--N", "6", "--k", "2", "--rho2", "1/4",
             "--results-dir", str(tmp_path)], capsys)
    run_cli(["moment", "--N", "6", "--k", "2", "--rho2", "1/2",
             "--results-dir", str(tmp_path)], capsys)
    assert len(list(tmp_path.glob("*.json"))) == 2


def test_no_cache_flag(tmp_path, capsys):
    run_cli(["moment", "--N", "6", "--k", "1", "--no-cache",
             "--results-dir", str(tmp_path)], capsys)
    assert list(tmp_path.glob("*.json")) == []


def test_worker_count_does_not_change_result(tmp_path, capsys):
    outs = []
    for w in ("1", "4"):
        _, out = run_cli(["torus", "concentration", "--N", "5", "--lambda", "0.5",
                          "--samples", "200000", "--seed", "3", "--workers", w,
                          "--no-cache", "--results-dir", str(tmp_path)], capsys)
        outs.append(json.loads(out)["result"])
    assert outs[0] == outs[1]


def test_bounds_sandwich_record(tmp_path, capsys):
    code, out = run_cli(["bounds", "sandwich", "--N", "30", "--k", "5/2",
                         "--precision-bits", "64",
                         "--results-dir", str(tmp_path)], capsys)
    assert code == 0
    res = json.loads(out)["result"]
    assert res["k"] == "5/2"
    assert float(res["lower"]) <= float(res["upper"])


def test_euler_factor_record(tmp_path, capsys):
    code, out = run_cli(["euler", "factor", "--k", "2", "--rho2", "1",
                         "--trunc-prime", "1000", "--precision-bits", "64",
                         "--results-dir", str(tmp_path)], capsys)
    assert code == 0
    res = json.loads(out)["result"]
    assert abs(float(res["value"]) - 0.6079271) < 1e-5


def test_sweep_csv(tmp_path, capsys):
    out_file = tmp_path / "sweep.csv"
    code, out = run_cli(["sweep", "--target", "moment", "--N-list", "10,20",
                         "--k-list", "1,2", "--rho2-list", "1",
                         "--out", str(out_file)], capsys)
    assert code == 0
    lines = out_file.read_text().strip().splitlines()
    assert len(lines) == 5  # header + 4 rows
    assert lines[0].startswith("N,")


def test_budget_exit_code(tmp_path, capsys):
    code = cli.main(["moment", "--N", "100000", "--k", "2",
                     "--results-dir", str(tmp_path)])
    assert code == cli.EXIT_BUDGET


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        cli.main(["moment"])  # missing required flags
    assert exc.value.code == 2


def test_verify_exit_codes(monkeypatch):
    ok = acceptance.CriterionResult(1, "stub", True, "fine", 0.0)
    bad = acceptance.CriterionResult(2, "stub", False, "broken", 0.0)
    monkeypatch.setattr(acceptance, "run_all", lambda quick, seed: [ok, ok])
    assert cli.main(["verify", "--quick"]) == 0
    monkeypatch.setattr(acceptance, "run_all", lambda quick, seed: [ok, bad])
    assert cli.main(["verify"]) == cli.EXIT_VERIFY_FAILED
