"""``vsi-ssa`` command-line front end.

Exit codes: 0 success, 2 usage/config error, 3 infeasible model,
4 numerical divergence.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, UsageError, VsiError
from .params import load_params
from .sim_avg import AvgInputs, simulate_average
from .sim_switched import simulate_switched
from .smallsignal import (
    ENTRIES,
    FREQRESP_HEADER,
    build_state_space,
    closed_form_all,
    format_response_rows,
    frequency_response,
)
from .steady_state import DEFAULT_D0, operating_point, residuals
from .trace import ChannelStats, steady_state_of_trace, switching_average
from .verify import StageError, Tolerances, run_verify

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_DIVERGED = 4


def _positive(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _nonnegative(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def cmd_operating_point(args):
    params = load_params(args.config)
    op = operating_point(params, args.d0)
    r_d, r_q, r_in = residuals(params, op)
    print(f"d_d = {op.d_d:.6g}")
    print(f"d_q = {op.d_q:.6g}")
    print(f"d_0 = {op.d_0:.6g}")
    print(f"i_ld = {op.i_ld:.6g} A")
    print(f"i_lq = {op.i_lq:.6g} A")
    print(f"residual r_d = {r_d:.3g} V")
    print(f"residual r_q = {r_q:.3g} V")
    print(f"residual r_in = {r_in:.3g} A")
    return EXIT_OK


def cmd_freqresp(args):
    params = load_params(args.config)
    if args.entries:
        entries = tuple(e.strip() for e in args.entries.split(",") if e.strip())
        unknown = [e for e in entries if e not in ENTRIES]
        if unknown:
            raise UsageError(f"unknown entries {', '.join(unknown)}; valid names: {', '.join(ENTRIES)}")
    else:
        entries = ENTRIES
    if not args.f_min < args.f_max:
        raise UsageError("--f-min must be below --f-max")
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    freqs = np.geomspace(args.f_min, args.f_max, args.points)

    op = operating_point(params, args.d0)
    numeric = frequency_response(build_state_space(params, op), freqs, entries)
    closed = frequency_response(closed_form_all(params, op), freqs, entries)
    lines = [",".join(FREQRESP_HEADER + ("source", "flag"))]
    lines += format_response_rows(numeric, source="numeric")
    lines += format_response_rows(closed, source="closed_form")
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"wrote {len(lines) - 1} rows to {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _averaged_path(path):
    path = Path(path)
    return path.with_name(f"{path.stem}_avg{path.suffix or '.csv'}")


def cmd_simulate(args):
    params = load_params(args.config)
    op = operating_point(params, args.d0)
    if args.mode == "averaged":
        duration = 10e-3 if args.duration is None else args.duration
        dt = 1e-6 if args.dt is None else args.dt
        trace = simulate_average(params, AvgInputs.from_operating_point(params, op),
                                 duration=duration, dt=dt)
    else:
        duration = 100e-3 if args.duration is None else args.duration
        dt = 0.5e-6 if args.dt is None else args.dt
        trace = simulate_switched(params, op, duration=duration, dt=dt)
    trace.metadata.setdefault("f_sw", params.f_sw)
    averaged = switching_average(trace, 1.0 / params.f_sw)

    # the averaged model has no ripple, so a short tail suffices; switched
    # traces are averaged over a whole fundamental period
    window = 1e-3 if args.mode == "averaged" else 1.0 / params.f_grid
    window = min(window, 0.5 * trace.duration)
    if window < 2 * trace.dt:
        # single-step runs: report the final sample
        stats = {k: ChannelStats(float(v[-1]), 0.0) for k, v in trace.channels.items()}
    else:
        stats = steady_state_of_trace(trace, window)
    print(f"{args.mode} simulation: {len(trace)} samples, dt = {dt:g} s")
    for name in ("i_od", "i_oq", "i_in"):
        print(f"  trailing mean {name} = {stats[name].mean:.6g} A (ripple {stats[name].ripple:.3g})")
    if args.output:
        trace.to_csv(args.output)
        averaged_path = _averaged_path(args.output)
        trace.to_csv(averaged_path, averaged=averaged)
        print(f"wrote {args.output} and {averaged_path}")
    return EXIT_OK


def cmd_verify(args):
    params = load_params(args.config)
    tol = Tolerances(i_od_rel=args.tol_iod, i_oq_abs=args.tol_ioq,
                     i_in_rel=args.tol_iin, tf_rel=args.tol_tf)
    report = run_verify(params, tol, d_0=args.d0)
    print(report.format())
    return EXIT_OK if report.passed else 1


def cmd_svm_table(args):
    from .svm import format_table

    params = load_params(args.config)
    print(f"u_in = {params.u_in:g} V")
    print(format_table(params.u_in))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="vsi-ssa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="key = value parameter file")
        p.set_defaults(func=func)
        return p

    p = add("operating-point", cmd_operating_point, "print the steady-state operating point")
    p.add_argument("--d0", type=float, default=DEFAULT_D0, help="zero-sequence duty")

    p = add("freqresp", cmd_freqresp, "export the transfer-function sweep as CSV")
    p.add_argument("--entries", default="", help="comma-separated entry names (default: all 15)")
    p.add_argument("--f-min", type=_positive, default=10.0)
    p.add_argument("--f-max", type=_positive, default=1e4)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--d0", type=float, default=DEFAULT_D0)
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")

    p = add("simulate", cmd_simulate, "simulate from rest and write trace CSVs")
    p.add_argument("--mode", choices=("averaged", "switched"), default="switched")
    p.add_argument("--duration", type=_positive)
    p.add_argument("--dt", type=_positive)
    p.add_argument("--d0", type=float, default=DEFAULT_D0)
    p.add_argument("-o", "--output", help="trace CSV path; <stem>_avg.csv receives the averaged trace")

    p = add("verify", cmd_verify, "run the analytic / averaged / switched comparison")
    p.add_argument("--d0", type=float, default=DEFAULT_D0)
    p.add_argument("--tol-iod", type=_nonnegative, default=Tolerances.i_od_rel)
    p.add_argument("--tol-ioq", type=_nonnegative, default=Tolerances.i_oq_abs)
    p.add_argument("--tol-iin", type=_nonnegative, default=Tolerances.i_in_rel)
    p.add_argument("--tol-tf", type=_nonnegative, default=Tolerances.tf_rel)

    add("svm-table", cmd_svm_table, "print the per-sector switch sequences and u_nN levels")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        cause = exc.cause
        return cause.exit_code if isinstance(cause, VsiError) else 1
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VsiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
