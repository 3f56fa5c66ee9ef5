import json
import subprocess
import sys

import pytest

from triperiod.cli import fmt, jsonable, lookup_metric, main, rows_to_csv

OK_CONFIG = {
    "experiment": "tilde-suppression",
    "params": {"tau": "0.3i", "tau_prime": "0.7i", "seed": 1},
    "assertions": [{"metric": "max_ratio", "op": "<=", "value": 1.0}],
}


def write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(cfg if isinstance(cfg, str) else json.dumps(cfg))
    return str(path)


def test_fmt_twelve_digits():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(2.0) == "2"
    assert fmt(1 + 2j) == "1+2j"
    assert fmt(True) == "true" and fmt(None) == ""
    assert jsonable({"x": 1 / 3, "z": 1j, "l": [float("nan")]}) == {"x": 0.333333333333, "z": {"re": 0.0, "im": 1.0}, "l": ["nan"]}


def test_rows_to_csv_union_of_columns():
    text = rows_to_csv([{"a": 1, "b": 0.5}, {"a": 2, "c": "x"}])
    assert text.splitlines() == ["a,b,c", "1,0.5,", "2,,x"]


def test_lookup_metric():
    s = {"totals": {"8": 1.5}, "norm": [1, 2, 3], "flat": 4}
    assert lookup_metric(s, "flat") == 4
    assert lookup_metric(s, "totals.8") == 1.5
    assert lookup_metric(s, "norm.2") == 3
    with pytest.raises(KeyError):
        lookup_metric(s, "totals.9")


def test_run_passes_and_writes_reports(tmp_path, capsys):
    rc = main(["run", write(tmp_path, OK_CONFIG), "--out-dir", str(tmp_path / "out")])
    assert rc == 0
    report = json.loads((tmp_path / "out" / "tilde-suppression.json").read_text())
    assert report["schema_version"] == 1 and report["criterion"] == 4 and report["passed"]
    assert report["assertions"][0]["passed"]
    header = (tmp_path / "out" / "tilde-suppression.csv").read_text().splitlines()[0]
    assert header == "n,t,H,budget,ratio"
    assert "PASS" in capsys.readouterr().out


def test_run_assertion_failure_names_criterion(tmp_path, capsys):
    cfg = dict(OK_CONFIG, assertions=[{"metric": "max_ratio", "op": ">", "value": 1.0}])
    rc = main(["run", write(tmp_path, cfg), "--out-dir", str(tmp_path)])
    assert rc == 1
    err = capsys.readouterr().err
    assert "criterion 4" in err and "tilde-suppression" in err and "max_ratio" in err


def test_run_deterministic_bytes(tmp_path, monkeypatch):
    cfg = write(tmp_path, OK_CONFIG)
    main(["run", cfg, "--out-dir", str(tmp_path / "a")])
    monkeypatch.setenv("TRIPERIOD_THREADS", "4")
    main(["run", cfg, "--out-dir", str(tmp_path / "b")])
    for name in ("tilde-suppression.csv", "tilde-suppression.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.mark.parametrize(
    "cfg",
    [
        '{"experiment": ',
        "[1, 2]",
        {"experiment": "nope"},
        {"experiment": "tilde-suppression", "extra": 1},
        {"experiment": "tilde-suppression", "params": []},
        {"experiment": "tilde-suppression", "params": {"tau": "0.3+1i"}},
        {"experiment": "tilde-suppression", "params": {"t_grid": [1, -2]}},
        {"experiment": "tilde-suppression", "params": {"tol": 0}},
        {"experiment": "tilde-suppression", "params": {"seed": 1.5}},
        {"experiment": "tilde-suppression", "assertions": [{"metric": "max_ratio", "op": "~", "value": 1}]},
        {"experiment": "tilde-suppression", "assertions": [{"metric": "max_ratio"}]},
        {"experiment": "tilde-suppression", "assertions": [{"metric": "missing", "op": "<", "value": 1}]},
    ],
)
def test_run_invalid_config_exit_2(tmp_path, cfg, capsys):
    assert main(["run", write(tmp_path, cfg), "--out-dir", str(tmp_path)]) == 2
    assert "invalid config" in capsys.readouterr().err


def test_run_missing_file(tmp_path):
    assert main(["run", str(tmp_path / "absent.json")]) == 2


def test_bad_arguments_exit_2():
    assert main(["kernel", "--t", "abc", "--c", "1"]) == 2
    assert main([]) == 2


def test_kernel_json(capsys):
    assert main(["kernel", "--t", "100", "--c", "1.0", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["error"] <= out["remainder_budget"]
    assert set(out["value"]) == {"re", "im"}
    assert len(repr(out["value"]["re"]).lstrip("-0.").replace(".", "").rstrip("0")) <= 12


def test_kernel_below_cutoff_skips_approximation(capsys):
    assert main(["kernel", "--t", "2", "--c", "1.0", "--json"]) == 0
    assert "main_term" not in json.loads(capsys.readouterr().out)


def test_hform_csv(tmp_path):
    out = tmp_path / "h.csv"
    assert main(["hform", "--t", "50", "--n", "20", "--kind", "tilde", "--csv", str(out)]) == 0
    assert out.read_text().splitlines()[0].startswith("t,n,kind,H,regime")


def test_hform_bad_n(capsys):
    assert main(["hform", "--t", "50", "--n", "3"]) == 2


@pytest.mark.parametrize("kind", ["std", "scaled", "general"])
def test_beta(kind, capsys):
    assert main(["beta", "--kind", kind, "--t", "120", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["remainder"] < 0.05


def test_vdc(capsys):
    assert main(["vdc", "--coeffs", "0", "100", "50", "--k", "1", "--interval", "0", "1", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["dominated"]
    assert main(["vdc", "--coeffs", "0", "0", "1", "--k", "1"]) == 2


def test_spectrum_pipeline(tmp_path, capsys):
    spec = tmp_path / "s.csv"
    assert main(["spectrum", "gen", "--T-max", "120", "--seed", "4", "--out", str(spec), "--json"]) == 0
    gen = json.loads(capsys.readouterr().out)
    assert gen["weyl_excess"] <= 0 and gen["mv_excess"] <= 0
    blocks = tmp_path / "blocks.csv"
    assert main(["spectrum", "sum", "--spectrum", str(spec), "--n", "32", "--csv", str(blocks), "--json"]) == 0
    summ = json.loads(capsys.readouterr().out)
    assert summ["blocks_ok"] and summ["tail_sum"] <= summ["tail_bound"]
    assert blocks.read_text().splitlines()[0] == "k,lo,hi,count,mass,H_k,M_k,bound,bound_literal,spot_max_ratio"
    assert main(["spectrum", "extract", "--spectrum", str(spec), "--T", "100", "--json"]) == 0
    ext = json.loads(capsys.readouterr().out)
    assert ext["window_sum"] <= ext["certified_bound"]


def test_spectrum_missing_file(tmp_path):
    assert main(["spectrum", "sum", "--spectrum", str(tmp_path / "x.csv"), "--n", "8"]) == 2


def test_fit(tmp_path, capsys):
    assert main(["fit", "--pairs", "1,7", "2,1.75", "4,0.4375", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["slope"] == pytest.approx(-2.0)
    data = tmp_path / "d.csv"
    data.write_text("t,err\n64,1\n128,0.3535533905932738\n256,0.125\n")
    assert main(["fit", "--data", str(data), "--x", "t", "--y", "err", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["slope"] == pytest.approx(-1.5)
    assert main(["fit", "--data", str(data), "--x", "nope"]) == 2
    assert main(["fit", "--pairs", "1,2", "2,3"]) == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "triperiod", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "triperiod" in r.stdout
