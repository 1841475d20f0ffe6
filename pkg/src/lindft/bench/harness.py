"""Monte-Carlo scenarios, q-sweep and timing study for the power estimators.

Every trial draws its phases and noise from ``SeedSequence([seed, trial,
channel])`` so results do not depend on which algorithms run or in what
order trials are evaluated.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ..errors import LinDFTError
from ..linear_estimator import EstimatorConfig, estimate_components
from ..power_bands import BANDS, PowerReport, ground_truth_power, power_report
from ..reference_estimators import fft_estimate, wifft_estimate
from ..signal_model import FrequencyComponent, SampledSignal, SignalSpec, add_awgn, tones, wrap_phase

ALGORITHMS = ("proposed", "fft", "wifft")
SCENARIO_IDS = ("A", "B", "C", "D", "E", "Qsweep", "qsweep")

FS = 5000.0
N_SAMPLES = 1024
F1 = 50.0
HARMONICS = (3, 5, 7, 11, 13)
A_FUND = 1.0
A_OTHER = 0.1
DEFAULT_SNR_DB = 60.0
DEFAULT_TRIALS = 100

# Ec of a band whose true power is below this is reported as |error| / EC_FLOOR
EC_FLOOR = 1e-6

# sub-seed channels
CH_PHASE_U, CH_PHASE_I, CH_NOISE_U, CH_NOISE_I = range(4)

METRIC_DEFINITIONS = (
    "rmse = sqrt(mean over trials of (P_est - P_true)^2), per-unit power",
    "ec = |P_est - P_true| / |P_true| per trial (|error| / %g when |P_true| <= %g, counted in n_floored);"
    " ec_mean / ec_std over successful trials" % (EC_FLOOR, EC_FLOOR),
)


@dataclass(frozen=True)
class Scenario:
    """One reproducible Monte-Carlo study.

    ``base_spec`` carries fs, N and the default SNR; the components of each
    sweep point come from :func:`scenario_components`.
    """

    id: str
    sweep_values: tuple
    base_spec: SignalSpec
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    algorithms: tuple[str, ...] = ALGORITHMS
    q: int = 5

    def __post_init__(self):
        object.__setattr__(self, "sweep_values", tuple(self.sweep_values))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if self.id not in SCENARIO_IDS:
            raise ValueError(f"unknown scenario id {self.id!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.sweep_values:
            raise ValueError("sweep_values is empty")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise ValueError(f"algorithms must be a non-empty subset of {ALGORITHMS}, got {self.algorithms}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class MetricsRow:
    scenario: str
    sweep_value: str
    algorithm: str
    band: str
    rmse: float
    ec_mean: float
    ec_std: float
    mean_time_ms: float
    n_trials: int
    n_failed: int
    n_floored: int


@dataclass(frozen=True)
class BandMetrics:
    rmse: float
    ec_mean: float
    ec_std: float
    n_floored: int = 0


# --------------------------------------------------------------------------
# scenario definitions


def _base(f1: float = F1) -> list[tuple[float, float]]:
    return [(f1, A_FUND)] + [(h * f1, A_OTHER) for h in HARMONICS]


def scenario_components(scenario_id: str, value) -> list[tuple[float, float]]:
    """``(freq, amp)`` list for one sweep point (phases are drawn per trial)."""
    if scenario_id in ("A", "B"):
        return _base() + [(float(value), A_OTHER)]
    if scenario_id in ("C", "E"):
        pair = (54.0, 154.0) if scenario_id == "E" else value
        return _base() + [(float(pair[0]), A_OTHER), (float(pair[1]), A_OTHER)]
    if scenario_id == "D":
        f1 = float(value)
        return _base(f1) + [(f1 + 1, A_OTHER), (3 * f1 + 1, A_OTHER)]
    if scenario_id in ("Qsweep", "qsweep"):
        return _base() + [(52.5, A_OTHER)]
    raise ValueError(f"unknown scenario id {scenario_id!r}")


def default_sweep(scenario_id: str) -> tuple:
    if scenario_id == "A":
        return (49.0, 48.0, 47.0, 46.0, 51.0, 52.0, 53.0, 54.0)
    if scenario_id == "B":
        return (151.0, 152.0, 153.0, 154.0)
    if scenario_id == "C":
        return tuple((51.0 + d, 151.0 + d) for d in range(4))
    if scenario_id == "D":
        return tuple(round(49.5 + 0.1 * i, 1) for i in range(11) if i != 5)
    if scenario_id == "E":
        return tuple(float(s) for s in range(40, 81, 5))
    if scenario_id in ("Qsweep", "qsweep"):
        return tuple(range(2, 8))
    raise ValueError(f"unknown scenario id {scenario_id!r}")


def make_scenario(scenario_id: str, *, trials: int = DEFAULT_TRIALS, seed: int = 0,
                  snr_db: float = DEFAULT_SNR_DB, algorithms: Sequence[str] = ALGORITHMS,
                  q: int = 5, sweep_values: Sequence | None = None) -> Scenario:
    sweep = tuple(sweep_values) if sweep_values is not None else default_sweep(scenario_id)
    comps = tuple(FrequencyComponent(f, a) for f, a in _base())
    base = SignalSpec(FS, N_SAMPLES, comps, snr_db=snr_db, seed=seed)
    return Scenario(scenario_id, sweep, base, trials, seed, tuple(algorithms), q)


def _sweep_label(value) -> str:
    if isinstance(value, (tuple, list)):
        return "+".join(f"{float(v):g}" for v in value)
    return f"{float(value):g}"


def _snr_for(scenario: Scenario, value) -> float | None:
    return float(value) if scenario.id == "E" else scenario.base_spec.snr_db


def _rng(seed: int, trial: int, channel: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial, channel]))


def trial_specs(scenario: Scenario, value, trial: int) -> tuple[SignalSpec, SignalSpec]:
    """Voltage and current specs of one trial: same lines, independent phases."""
    fa = scenario_components(scenario.id, value)
    ph_u = _rng(scenario.seed, trial, CH_PHASE_U).uniform(-np.pi, np.pi, len(fa))
    ph_i = _rng(scenario.seed, trial, CH_PHASE_I).uniform(-np.pi, np.pi, len(fa))
    spec = scenario.base_spec
    snr = _snr_for(scenario, value)
    u = SignalSpec(spec.fs, spec.n_samples, tuple(FrequencyComponent(f, a, p) for (f, a), p in zip(fa, ph_u)), snr)
    i = SignalSpec(spec.fs, spec.n_samples, tuple(FrequencyComponent(f, a, p) for (f, a), p in zip(fa, ph_i)), snr)
    return u, i


def _noisy(spec: SignalSpec, rng: np.random.Generator) -> SampledSignal:
    x = tones(spec.fs, spec.n_samples, spec.components)
    return SampledSignal(add_awgn(x, spec.snr_db, rng), spec.fs)


def trial_signals(scenario: Scenario, value, trial: int):
    u_spec, i_spec = trial_specs(scenario, value, trial)
    u = _noisy(u_spec, _rng(scenario.seed, trial, CH_NOISE_U))
    i = _noisy(i_spec, _rng(scenario.seed, trial, CH_NOISE_I))
    return u_spec, i_spec, u, i


# --------------------------------------------------------------------------
# algorithms end to end


def component_estimator(algorithm: str, q: int = 5, config: EstimatorConfig | None = None) -> Callable:
    if algorithm == "proposed":
        cfg = config or EstimatorConfig(q=q)
        return lambda sig: estimate_components(sig, cfg)
    if algorithm == "fft":
        return fft_estimate
    if algorithm == "wifft":
        return wifft_estimate
    raise ValueError(f"unknown algorithm {algorithm!r}")


def analyze_window(u: SampledSignal, i: SampledSignal, algorithm: str = "proposed", q: int = 5,
                   config: EstimatorConfig | None = None) -> PowerReport:
    """Estimate both channels, then match, classify and integrate."""
    est = component_estimator(algorithm, q, config)
    report, _ = power_report(est(u), est(i), u.n_samples, u.fs)
    return report


# --------------------------------------------------------------------------
# metrics


def compute_metrics(estimates: Sequence[PowerReport], truth: PowerReport | Sequence[PowerReport],
                    floor: float = EC_FLOOR) -> dict[str, BandMetrics]:
    """Per-band RMSE and Ec of estimates against one truth or one truth per estimate."""
    if not estimates:
        raise ValueError("no estimates to aggregate")
    truths = [truth] * len(estimates) if isinstance(truth, PowerReport) else list(truth)
    if len(truths) != len(estimates):
        raise ValueError("need one truth per estimate")
    out = {}
    for band in BANDS:
        est = np.array([r.band(band) for r in estimates])
        ref = np.array([t.band(band) for t in truths])
        err = est - ref
        floored = np.abs(ref) <= floor
        ec = np.abs(err) / np.where(floored, floor, np.abs(ref))
        out[band] = BandMetrics(
            rmse=float(np.sqrt(np.mean(err**2))),
            ec_mean=float(np.mean(ec)),
            ec_std=float(np.std(ec)),
            n_floored=int(floored.sum()),
        )
    return out


def run_scenario(scenario: Scenario, progress: Callable[[str], None] | None = None) -> list[MetricsRow]:
    """All sweep points x algorithms; failed trials are counted, not aggregated."""
    rows = []
    for value in scenario.sweep_values:
        truths = []
        windows = []
        for t in range(scenario.trials):
            u_spec, i_spec, u, i = trial_signals(scenario, value, t)
            truths.append(ground_truth_power(u_spec, i_spec))
            windows.append((u, i))
        for alg in scenario.algorithms:
            est, ref, times = [], [], []
            failed = 0
            for (u, i), truth in zip(windows, truths):
                t0 = time.perf_counter()
                try:
                    rep = analyze_window(u, i, alg, scenario.q)
                except (ValueError, LinDFTError, np.linalg.LinAlgError):
                    failed += 1
                    continue
                times.append(time.perf_counter() - t0)
                est.append(rep)
                ref.append(truth)
            label = _sweep_label(value)
            if est:
                metrics = compute_metrics(est, ref)
            else:
                nan = float("nan")
                metrics = {b: BandMetrics(nan, nan, nan) for b in BANDS}
            mean_ms = 1e3 * float(np.mean(times)) if times else float("nan")
            for band in BANDS:
                m = metrics[band]
                rows.append(MetricsRow(scenario.id, label, alg, band, m.rmse, m.ec_mean, m.ec_std,
                                       mean_ms, scenario.trials, failed, m.n_floored))
            if progress:
                progress(f"{scenario.id} {label} {alg}: Ec(total)={metrics['total'].ec_mean:.3g} failed={failed}")
    return rows


# --------------------------------------------------------------------------
# q sweep


@dataclass(frozen=True)
class QSweepRow:
    q: int
    freq_err_hz: float
    amp_err_rel: float
    phase_err_rad: float
    score: float
    n_missed: int
    mean_time_ms: float
    n_trials: int


def component_errors(truth: Sequence[FrequencyComponent], found: Sequence, delta_f: float):
    """Per true line: |df| (Hz), |dA|/A and wrapped |dphi| of its matched estimate.

    True lines and estimates are paired one-to-one, closest first, within
    ``delta_f / 2``. An unpaired true line counts as missed and is charged
    ``delta_f``, 1 and ``pi/2``.
    """
    err = np.tile([delta_f, 1.0, np.pi / 2], (len(truth), 1))
    pairs = sorted(
        (abs(c.freq - tc.freq), n, j)
        for n, tc in enumerate(truth)
        for j, c in enumerate(found)
        if abs(c.freq - tc.freq) <= delta_f / 2
    )
    used_t: set[int] = set()
    used_e: set[int] = set()
    for _, n, j in pairs:
        if n in used_t or j in used_e:
            continue
        used_t.add(n)
        used_e.add(j)
        tc, c = truth[n], found[j]
        err[n] = (abs(c.freq - tc.freq), abs(c.amp - tc.amp) / tc.amp,
                  abs(float(wrap_phase(c.phase - tc.phase))))
    return err, len(truth) - len(used_t)


def run_q_sweep(q_values: Sequence[int] = tuple(range(2, 8)), trials: int = DEFAULT_TRIALS, seed: int = 0,
                snr_db: float = DEFAULT_SNR_DB) -> list[QSweepRow]:
    """Mean parameter errors and runtime of the proposed estimator per ``q``.

    ``score`` is the geometric mean of the three mean errors, so the
    ranking of ``q`` values does not depend on the units chosen.
    """
    q_values = list(q_values)
    if not q_values or any(not 1 <= q <= 8 for q in q_values):
        raise ValueError("q values must lie in [1, 8]")
    scen = make_scenario("qsweep", trials=trials, seed=seed, snr_db=snr_db, algorithms=("proposed",))
    signals = []
    for t in range(trials):
        u_spec, _, u, _ = trial_signals(scen, None, t)
        signals.append((u_spec, u))
    delta_f = scen.base_spec.delta_f
    rows = []
    for q in q_values:
        cfg = EstimatorConfig(q=q)
        errs, times, missed = [], [], 0
        for spec, sig in signals:
            t0 = time.perf_counter()
            found = estimate_components(sig, cfg)
            times.append(time.perf_counter() - t0)
            e, m = component_errors(spec.components, found, delta_f)
            errs.append(e)
            missed += m
        mean = np.concatenate(errs).mean(axis=0)
        score = float(np.exp(np.mean(np.log(np.maximum(mean, 1e-300)))))
        rows.append(QSweepRow(q, float(mean[0]), float(mean[1]), float(mean[2]), score, missed,
                              1e3 * float(np.mean(times)), trials))
    return rows


def best_q(rows: Sequence[QSweepRow]) -> int:
    return min(rows, key=lambda r: r.score).q


# --------------------------------------------------------------------------
# timing


@dataclass(frozen=True)
class TimingRow:
    n_components: int
    median_ms: float
    mean_ms: float
    n_reps: int


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r2: float


def time_call(fn: Callable[[], object], reps: int = 30, warmup: int = 5) -> np.ndarray:
    """Wall times (seconds) of ``reps`` calls after ``warmup`` discarded calls."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    for _ in range(warmup):
        fn()
    out = np.empty(reps)
    for r in range(reps):
        t0 = time.perf_counter()
        fn()
        out[r] = time.perf_counter() - t0
    return out


def timing_signal(n_components: int, seed: int = 0, snr_db: float = DEFAULT_SNR_DB) -> SampledSignal:
    """Fundamental plus harmonics 2..Q, random phases."""
    if n_components < 1:
        raise ValueError("need at least one component")
    if n_components * F1 >= FS / 2:
        raise ValueError(f"{n_components} harmonics of {F1} Hz alias at fs={FS}")
    rng = _rng(seed, n_components, CH_PHASE_U)
    amps = [A_FUND] + [A_OTHER] * (n_components - 1)
    comps = [FrequencyComponent(h * F1, a, p)
             for h, a, p in zip(range(1, n_components + 1), amps, rng.uniform(-np.pi, np.pi, n_components))]
    x = add_awgn(tones(FS, N_SAMPLES, comps), snr_db, _rng(seed, n_components, CH_NOISE_U))
    return SampledSignal(x, FS)


def linear_fit(x, y) -> LinearFit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return LinearFit(float(slope), float(intercept), r2)


def run_timing_study(component_counts: Sequence[int] = tuple(range(2, 21)), reps: int = 30, warmup: int = 5,
                     seed: int = 0, q: int = 5) -> tuple[list[TimingRow], LinearFit]:
    """Median ``estimate_components`` time per component count, with a line fit.

    Repetitions are interleaved round-robin over the counts so that a
    transient slowdown of the machine hits every count alike.
    """
    counts = list(component_counts)
    if not counts or min(counts) < 1:
        raise ValueError("component counts must be >= 1")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    cfg = EstimatorConfig(q=q)
    signals = [timing_signal(n, seed) for n in counts]
    for sig in signals:
        for _ in range(warmup):
            estimate_components(sig, cfg)
    t = np.empty((len(counts), reps))
    for r in range(reps):
        for j, sig in enumerate(signals):
            t0 = time.perf_counter()
            estimate_components(sig, cfg)
            t[j, r] = time.perf_counter() - t0
    rows = [TimingRow(n, 1e3 * float(np.median(t[j])), 1e3 * float(np.mean(t[j])), reps)
            for j, n in enumerate(counts)]
    fit = linear_fit(counts, [r.median_ms for r in rows])
    return rows, fit


def runtime_ratio(scenario: Scenario, reps: int = 30, warmup: int = 5, n_windows: int = 4) -> dict[str, float]:
    """Median end-to-end window time of each algorithm relative to plain FFT.

    Windows are the first ``n_windows`` trials of every sweep point; each
    window is timed ``reps`` times and the per-window medians are averaged.
    """
    windows = [trial_signals(scenario, v, t)[2:] for v in scenario.sweep_values for t in range(n_windows)]
    med = {}
    for alg in sorted(set(scenario.algorithms) | {"fft"}):
        per = [np.median(time_call(lambda: analyze_window(u, i, alg, scenario.q), reps, warmup))
               for u, i in windows]
        med[alg] = float(np.mean(per))
    return {alg: t / med["fft"] for alg, t in med.items()}


# --------------------------------------------------------------------------
# output


def rows_to_dicts(rows: Sequence) -> list[dict]:
    return [asdict(r) for r in rows]


def write_rows(rows: Sequence, path: str | Path | None = None, fmt: str = "csv",
               comments: Sequence[str] = METRIC_DEFINITIONS) -> str:
    """CSV (with ``#`` definition lines) or JSON; returns the text, writes it if ``path`` is given."""
    if fmt == "json":
        text = json.dumps({"definitions": list(comments), "rows": rows_to_dicts(rows)}, indent=2) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        for c in comments:
            buf.write(f"# {c}\n")
        if rows:
            names = [f.name for f in fields(rows[0])]
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(names)
            for r in rows:
                w.writerow([_fmt(getattr(r, n)) for n in names])
        text = buf.getvalue()
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return v
