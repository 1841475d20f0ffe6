import json
import subprocess
import sys
import time

import numpy as np
import pytest

from lindft.bench import cli, harness
from lindft.linear_estimator import EstimatorConfig, estimate_components
from lindft.power_bands import PowerReport
from lindft.signal_model import FrequencyComponent, SampledSignal, write_samples_csv

TIMING_COLUMNS = ("mean_time_ms",)


def report(total, fund=None):
    fund = total if fund is None else fund
    return PowerReport(fund, 0.0, 0.0, 0.0, total, 10.24)


def strip_timing(rows):
    return [{k: v for k, v in r.items() if k not in TIMING_COLUMNS} for r in harness.rows_to_dicts(rows)]


# --------------------------------------------------------------------------
# metrics


def test_metrics_trivial_cases():
    truth = report(0.5)
    m = harness.compute_metrics([truth, truth], truth)
    assert m["total"].rmse == 0 and m["total"].ec_mean == 0 and m["total"].ec_std == 0
    m = harness.compute_metrics([report(0.55)], truth)
    assert m["total"].ec_mean == pytest.approx(0.1)
    assert m["total"].rmse == pytest.approx(0.05)


def test_metrics_zero_truth_uses_absolute_path():
    m = harness.compute_metrics([PowerReport(0.5, 0.0, 2e-6, 0.0, 0.5, 10)], report(0.5))
    assert m["inter"].n_floored == 1
    assert m["inter"].ec_mean == pytest.approx(2e-6 / harness.EC_FLOOR)
    assert m["cross"].ec_mean == 0.0
    with pytest.raises(ValueError):
        harness.compute_metrics([], report(0.5))
    with pytest.raises(ValueError):
        harness.compute_metrics([report(1)], [report(1), report(1)])


def test_metrics_permutation_invariant():
    rng = np.random.default_rng(0)
    est = [report(0.5 + e) for e in rng.normal(0, 0.01, 20)]
    truth = [report(0.5 + e) for e in rng.normal(0, 0.001, 20)]
    perm = rng.permutation(20)
    a = harness.compute_metrics(est, truth)
    b = harness.compute_metrics([est[p] for p in perm], [truth[p] for p in perm])
    for band in a:
        assert a[band].rmse == pytest.approx(b[band].rmse, rel=1e-12)
        assert a[band].ec_mean == pytest.approx(b[band].ec_mean, rel=1e-12)


# --------------------------------------------------------------------------
# scenarios


def test_scenario_definitions():
    assert harness.default_sweep("A") == (49.0, 48.0, 47.0, 46.0, 51.0, 52.0, 53.0, 54.0)
    d = harness.default_sweep("D")
    assert len(d) == 10 and 50.0 not in d and d[0] == 49.5 and d[-1] == 50.5
    assert harness.default_sweep("E") == tuple(float(s) for s in range(40, 81, 5))
    comps = harness.scenario_components("D", 49.7)
    assert [f for f, _ in comps] == pytest.approx([49.7, 149.1, 248.5, 347.9, 546.7, 646.1, 50.7, 150.1])
    assert len(harness.scenario_components("A", 54)) == 7
    assert len(harness.scenario_components("C", (51, 151))) == 8


def test_scenario_validation():
    base = harness.make_scenario("A").base_spec
    for kw in ({"id": "Z"}, {"trials": 0}, {"sweep_values": ()}, {"algorithms": ("mpsvd",)}, {"seed": -1}):
        args = dict(id="A", sweep_values=(54.0,), base_spec=base) | kw
        with pytest.raises(ValueError):
            harness.Scenario(**args)


def test_phase_draws_independent_of_algorithms():
    a = harness.make_scenario("A", trials=5, algorithms=("proposed",))
    b = harness.make_scenario("A", trials=5, algorithms=("fft", "wifft", "proposed"))
    for t in range(5):
        sa, sb = harness.trial_signals(a, 54.0, t), harness.trial_signals(b, 54.0, t)
        assert sa[0] == sb[0] and sa[1] == sb[1]
        np.testing.assert_array_equal(sa[2].samples, sb[2].samples)
    # voltage and current phases come from different channels
    u, i = harness.trial_specs(a, 54.0, 0)
    assert u.components[0].phase != i.components[0].phase


def test_run_scenario_is_deterministic():
    scen = harness.make_scenario("A", trials=3, sweep_values=(54.0,), seed=11)
    a, b = harness.run_scenario(scen), harness.run_scenario(scen)
    assert strip_timing(a) == strip_timing(b)
    keys = [(r.scenario, r.sweep_value, r.algorithm, r.band) for r in a]
    assert len(keys) == len(set(keys)) == 3 * 5
    assert all(r.rmse >= 0 and r.ec_std >= 0 and r.n_failed == 0 for r in a)
    other = harness.run_scenario(harness.make_scenario("A", trials=3, sweep_values=(54.0,), seed=12))
    assert strip_timing(a) != strip_timing(other)


def test_failed_trials_are_counted(monkeypatch):
    def boom(*args, **kwargs):
        raise ValueError("no pairs")
    monkeypatch.setattr(harness, "analyze_window", boom)
    rows = harness.run_scenario(harness.make_scenario("B", trials=2, sweep_values=(154.0,), algorithms=("fft",)))
    assert all(r.n_failed == 2 and np.isnan(r.rmse) for r in rows)


def test_write_rows(tmp_path):
    rows = harness.run_scenario(harness.make_scenario("B", trials=2, sweep_values=(154.0,), algorithms=("fft",)))
    text = harness.write_rows(rows, tmp_path / "m.csv")
    lines = text.splitlines()
    assert lines[0].startswith("# rmse") and lines[1].startswith("# ec")
    assert lines[2].split(",")[:4] == ["scenario", "sweep_value", "algorithm", "band"]
    assert len(lines) == 2 + 1 + 5
    assert (tmp_path / "m.csv").read_text() == text
    js = json.loads(harness.write_rows(rows, fmt="json"))
    assert len(js["rows"]) == 5 and js["definitions"] == list(harness.METRIC_DEFINITIONS)
    with pytest.raises(ValueError):
        harness.write_rows(rows, fmt="xml")


# --------------------------------------------------------------------------
# q sweep


def test_component_errors_one_to_one():
    truth = [FrequencyComponent(50, 1.0, 0.0), FrequencyComponent(52.5, 0.1, 0.0)]
    found = [FrequencyComponent(50.1, 1.1, 0.2)]
    err, missed = harness.component_errors(truth, found, 4.8828125)
    assert missed == 1
    np.testing.assert_allclose(err[0], [0.1, 0.1, 0.2], atol=1e-12)
    np.testing.assert_allclose(err[1], [4.8828125, 1.0, np.pi / 2])


def test_q1_gives_large_errors():
    (q1, q5) = harness.run_q_sweep([1, 5], trials=3)
    assert q1.n_missed == 3 * 7
    assert q1.score > 100 * q5.score
    with pytest.raises(ValueError):
        harness.run_q_sweep([0])


def test_estimator_time_monotone_in_q():
    sig = harness.timing_signal(7)
    qs = list(range(1, 8))
    cfgs = [EstimatorConfig(q=q) for q in qs]
    t = np.empty((len(qs), 40))
    for cfg in cfgs:
        estimate_components(sig, cfg)
    for r in range(t.shape[1]):
        for j, cfg in enumerate(cfgs):
            t0 = time.perf_counter()
            estimate_components(sig, cfg)
            t[j, r] = time.perf_counter() - t0
    med = np.median(t, axis=1)
    # non-decreasing within 5% timer jitter
    assert np.all(med[1:] >= 0.95 * med[:-1]), med


# --------------------------------------------------------------------------
# timing


def test_timing_study_shape():
    rows, fit = harness.run_timing_study([1, 2, 4, 8], reps=15, warmup=2)
    assert [r.n_components for r in rows] == [1, 2, 4, 8]
    med = [r.median_ms for r in rows]
    assert min(med) == med[0]
    assert fit.slope > 0
    with pytest.raises(ValueError):
        harness.timing_signal(60)


def test_linear_fit():
    fit = harness.linear_fit([1, 2, 3, 4], [3, 5, 7, 9])
    assert (fit.slope, fit.intercept) == pytest.approx((2.0, 1.0))
    assert fit.r2 == pytest.approx(1.0)
    assert harness.linear_fit([1, 2, 3], [2, 2, 2]).r2 == 1.0


def test_time_call():
    t = harness.time_call(lambda: None, reps=7, warmup=1)
    assert t.shape == (7,) and np.all(t >= 0)
    with pytest.raises(ValueError):
        harness.time_call(lambda: None, reps=0)


# --------------------------------------------------------------------------
# command line


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "lindft.bench.cli", *args], capture_output=True, text=True)


def test_cli_scenario_and_exit_codes(tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert cli.main(["scenario", "B", "--trials", "2", "--algorithms", "fft,proposed", "--out", str(out)]) == 0
    body = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    assert len(body) == 1 + 4 * 2 * 5
    with pytest.raises(SystemExit) as exc:
        cli.main(["scenario", "Z"])
    assert exc.value.code != 0
    with pytest.raises(SystemExit):
        cli.main(["scenario", "A", "--algorithms", "mpsvd"])
    with pytest.raises(SystemExit):
        cli.main(["scenario", "A", "--q", "9"])
    capsys.readouterr()
    assert cli.main(["estimate", str(tmp_path / "missing.csv")]) == 2
    assert "lindft: error:" in capsys.readouterr().err


def test_cli_estimate(tmp_path):
    scen = harness.make_scenario("A", trials=1)
    _, _, u, i = harness.trial_signals(scen, 54.0, 0)
    write_samples_csv(u, tmp_path / "u.csv")
    write_samples_csv(i, tmp_path / "i.csv")
    r = run_cli("estimate", str(tmp_path / "u.csv"))
    assert r.returncode == 0, r.stderr
    lines = r.stdout.splitlines()
    assert lines[0] == "freq_hz,amp_pu,phase_rad" and len(lines) == 8
    r = run_cli("estimate", str(tmp_path / "u.csv"), "--current", str(tmp_path / "i.csv"))
    assert r.returncode == 0, r.stderr
    rep = json.loads(r.stdout)
    parts = rep["p_fund"] + rep["p_harm"] + rep["p_inter"] + rep["p_cross"]
    assert rep["p_total"] == pytest.approx(parts)
    short = SampledSignal(u.samples[:512], u.fs)
    write_samples_csv(short, tmp_path / "s.csv")
    r = run_cli("estimate", str(tmp_path / "u.csv"), "--current", str(tmp_path / "s.csv"))
    assert r.returncode == 2 and "differ" in r.stderr


def test_cli_qsweep_and_timing(tmp_path):
    r = run_cli("qsweep", "--trials", "2", "--q-values", "3,5", "--format", "json")
    assert r.returncode == 0, r.stderr
    js = json.loads(r.stdout)
    assert [row["q"] for row in js["rows"]] == [3, 5]
    assert any(d.startswith("best q") for d in js["definitions"])
    r = run_cli("timing", "--counts", "2-4", "--trials", "3")
    assert r.returncode == 0, r.stderr
    assert "R^2" in r.stdout and len([ln for ln in r.stdout.splitlines() if not ln.startswith("#")]) == 4
