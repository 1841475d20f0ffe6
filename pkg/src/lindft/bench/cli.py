"""``lindft`` command line: scenarios, q-sweep, timing and single-file estimation."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..errors import LinDFTError
from ..linear_estimator import EstimatorConfig, estimate, write_components_csv
from ..power_bands import power_report, write_reports
from ..signal_model import read_samples_csv
from . import harness

log = logging.getLogger("lindft")


def _algorithms(text: str) -> tuple[str, ...]:
    algs = tuple(a.strip() for a in text.split(",") if a.strip())
    bad = [a for a in algs if a not in harness.ALGORITHMS]
    if bad or not algs:
        raise argparse.ArgumentTypeError(f"algorithms must be a comma list from {','.join(harness.ALGORITHMS)}")
    return algs


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--q", type=int, default=5, help="model order per cluster (1..8)")
    common.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="lindft", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("scenario", parents=[common], help="Monte-Carlo power-band scenario A-E")
    sc.add_argument("id", choices=("A", "B", "C", "D", "E"))
    sc.add_argument("--trials", type=_positive_int, default=harness.DEFAULT_TRIALS)
    sc.add_argument("--snr-db", type=float, default=harness.DEFAULT_SNR_DB,
                    help="SNR for A-D (E sweeps 40..80 dB)")
    sc.add_argument("--algorithms", type=_algorithms, default=harness.ALGORITHMS)

    qs = sub.add_parser("qsweep", parents=[common], help="parameter error and runtime versus q")
    qs.add_argument("--trials", type=_positive_int, default=harness.DEFAULT_TRIALS)
    qs.add_argument("--snr-db", type=float, default=harness.DEFAULT_SNR_DB)
    qs.add_argument("--q-values", default="2,3,4,5,6,7")

    tm = sub.add_parser("timing", parents=[common], help="runtime versus number of components")
    tm.add_argument("--counts", default="2-20", help="component counts, e.g. 2-20 or 2,4,8")
    tm.add_argument("--trials", type=_positive_int, default=30, help="timed repetitions per count")

    es = sub.add_parser("estimate", parents=[common], help="components (and powers) of one recorded window")
    es.add_argument("signal", type=Path, help="CSV with index,time_s,value columns")
    es.add_argument("--current", type=Path, default=None, help="current CSV; adds a power report")
    es.add_argument("--fs", type=float, default=None, help="sampling rate (inferred when omitted)")
    es.add_argument("--mu", type=float, default=None)
    return p


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        elif part.strip():
            out.append(int(part))
    return out


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)
        log.info("wrote %s", out)


def _cmd_scenario(args) -> int:
    scen = harness.make_scenario(args.id, trials=args.trials, seed=args.seed, snr_db=args.snr_db,
                                 algorithms=args.algorithms, q=args.q)
    rows = harness.run_scenario(scen, progress=log.info)
    _emit(harness.write_rows(rows, fmt=args.format), args.out)
    return 0


def _cmd_qsweep(args) -> int:
    rows = harness.run_q_sweep(_int_list(args.q_values), trials=args.trials, seed=args.seed, snr_db=args.snr_db)
    notes = ("errors are means over all true lines and trials; a missed line costs delta_f, 1 and pi/2",
             "score = geometric mean of freq_err_hz, amp_err_rel, phase_err_rad",
             f"best q = {harness.best_q(rows)}")
    _emit(harness.write_rows(rows, fmt=args.format, comments=notes), args.out)
    return 0


def _cmd_timing(args) -> int:
    rows, fit = harness.run_timing_study(_int_list(args.counts), reps=args.trials, seed=args.seed, q=args.q)
    notes = (f"median_ms = a * n_components + b: a={fit.slope:.6g} ms, b={fit.intercept:.6g} ms, R^2={fit.r2:.4f}",)
    _emit(harness.write_rows(rows, fmt=args.format, comments=notes), args.out)
    return 0


def _cmd_estimate(args) -> int:
    cfg = EstimatorConfig(q=args.q, **({"mu": args.mu} if args.mu is not None else {}))
    u = read_samples_csv(args.signal, args.fs)
    res_u = estimate(u, cfg)
    for d in res_u.diagnostics:
        log.warning("cluster at bin %d: %s", d.k_peak, d.reason)
    if args.current is None:
        if args.out is None:
            rows = [c.as_tuple() for c in res_u.components]
            if args.format == "json":
                sys.stdout.write(json.dumps([dict(zip(("freq_hz", "amp_pu", "phase_rad"), r)) for r in rows],
                                            indent=2) + "\n")
            else:
                sys.stdout.write("freq_hz,amp_pu,phase_rad\n")
                for r in rows:
                    sys.stdout.write(",".join(repr(float(v)) for v in r) + "\n")
        else:
            write_components_csv(res_u, args.out)
        return 0
    i = read_samples_csv(args.current, args.fs if args.fs is not None else u.fs)
    if (i.n_samples, i.fs) != (u.n_samples, u.fs):
        raise ValueError("voltage and current windows differ in length or sampling rate")
    res_i = estimate(i, cfg)
    report, match = power_report(res_u.components, res_i.components, u.n_samples, u.fs)
    for msg in match.diagnostics:
        log.warning(msg)
    if args.out is None:
        sys.stdout.write(json.dumps(report.as_dict(), indent=2, default=float) + "\n")
    else:
        write_reports([report], args.out, args.format)
    return 0


COMMANDS = {"scenario": _cmd_scenario, "qsweep": _cmd_qsweep, "timing": _cmd_timing, "estimate": _cmd_estimate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    if not 1 <= args.q <= 8:
        parser.error("--q must lie in 1..8")
    try:
        return COMMANDS[args.command](args)
    except (ValueError, LinDFTError, OSError) as exc:
        print(f"lindft: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
