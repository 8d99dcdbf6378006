"""Command-line front end.

Subcommands::

    analyze   JSON report for one scenario
    sweep     CSV of quantifiers over an (R0, M) grid
    profile   CSV of quantifiers and their derivatives along R0
    curve     CSV trajectory t,S,I,R

Every flag can also come from ``--config FILE`` holding ``key=value`` lines
whose keys are the flag names without the leading dashes (``t-max=200``). Flags on
the command line win over the file.

Exit codes: 0 success, 2 invalid input, 1 internal error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager

from .errors import SirThresholdError
from .sir import SirParams, SirState, default_dt, default_t_max, integrate
from .sweep import SweepGrid, r0_profile, sweep, write_profile_csv, write_sweep_csv
from .threshold import Q5_PANELS, ThresholdProblem, analyze


class UsageError(Exception):
    pass


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0 or value == float("inf"):
        raise argparse.ArgumentTypeError(f"must be positive and finite, got {text!r}")
    return value


def _nonnegative(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value >= 0 or value == float("inf"):
        raise argparse.ArgumentTypeError(f"must be non-negative and finite, got {text!r}")
    return value


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text!r}")
    return value


def _panels(text: str) -> int:
    value = _count(text)
    if value < 2 or value % 2:
        raise argparse.ArgumentTypeError(f"panels must be an even integer >= 2, got {text!r}")
    return value


MODEL_FLAGS = {
    "n": (_positive, "total population N"),
    "gamma": (_positive, "recovery rate (1/time)"),
    "infectious-period": (_positive, "mean infectious period; sets gamma = 1/period"),
    "r0": (_positive, "basic reproduction number"),
    "s0": (_nonnegative, "initial susceptible (default N - I0 - RR0)"),
    "i0": (_nonnegative, "initial infected"),
    "rr0": (_nonnegative, "initial removed (default 0)"),
}
THRESHOLD_FLAGS = {"m": (_positive, "capacity threshold M")}
SOLVER_FLAGS = {
    "dt": (_positive, "RK4 step (default 1e-3/gamma)"),
    "t-max": (_positive, "integration horizon (default 60/gamma)"),
    "panels": (_panels, f"initial Simpson panels for q5 (default {Q5_PANELS})"),
}
GRID_FLAGS = {
    "r0-min": (_positive, "smallest R0"),
    "r0-max": (_positive, "largest R0"),
    "r0-count": (_count, "number of R0 samples"),
    "m-min": (_positive, "smallest M"),
    "m-max": (_positive, "largest M"),
    "m-count": (_count, "number of M samples"),
    "workers": (_count, "worker processes (default 1)"),
}
PROFILE_FLAGS = {
    "r0-min": (_positive, "smallest R0 (default: critical R0)"),
    "r0-max": (_positive, "largest R0"),
    "r0-count": (_count, "number of R0 samples"),
    "workers": (_count, "worker processes (default 1)"),
}


def _add_flags(parser: argparse.ArgumentParser, flags: dict) -> None:
    for name, (kind, text) in flags.items():
        parser.add_argument(f"--{name}", type=kind, default=None, help=text,
                            dest=name.replace("-", "_"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sirthreshold",
        description="Threshold exceedance analysis for the SIR epidemic model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    layouts = {
        "analyze": (MODEL_FLAGS, THRESHOLD_FLAGS, SOLVER_FLAGS),
        "sweep": (MODEL_FLAGS, GRID_FLAGS, SOLVER_FLAGS),
        "profile": (MODEL_FLAGS, THRESHOLD_FLAGS, PROFILE_FLAGS, SOLVER_FLAGS),
        "curve": (MODEL_FLAGS, SOLVER_FLAGS),
    }
    helps = {
        "analyze": "JSON report for one scenario",
        "sweep": "quantifier CSV over an (R0, M) grid",
        "profile": "quantifier CSV along R0 with derivatives",
        "curve": "trajectory CSV t,S,I,R",
    }
    for name, groups in layouts.items():
        p = sub.add_parser(name, help=helps[name])
        for flags in groups:
            _add_flags(p, flags)
        p.add_argument("--config", default=None, help="key=value file supplying any flag")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.set_defaults(known=[k for flags in groups for k in flags])
    return parser


def read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path) as fp:
        for lineno, raw in enumerate(fp, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("_", "-")] = value
    return values


def _merge_config(args: argparse.Namespace) -> None:
    if args.config is None:
        return
    flags = {**MODEL_FLAGS, **THRESHOLD_FLAGS, **SOLVER_FLAGS, **GRID_FLAGS, **PROFILE_FLAGS}
    try:
        file_values = read_config(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}")
    for key, text in file_values.items():
        if key not in args.known:
            raise UsageError(f"{args.config}: unknown key {key!r} for '{args.command}'")
        dest = key.replace("-", "_")
        if getattr(args, dest) is not None:
            continue
        try:
            setattr(args, dest, flags[key][0](text))
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"{args.config}: {key}: {exc}")


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise UsageError("missing required " + ", ".join(missing))


def _resolve_model(args: argparse.Namespace) -> None:
    if args.gamma is not None and args.infectious_period is not None:
        raise UsageError("give either --gamma or --infectious-period, not both")
    if args.infectious_period is not None:
        args.gamma = 1.0 / args.infectious_period
    _require(args, "n", "gamma", "i0")
    if args.rr0 is None:
        args.rr0 = 0.0
    if args.s0 is None:
        args.s0 = args.n - args.i0 - args.rr0


def _solver(args: argparse.Namespace) -> dict:
    return {"dt": args.dt, "t_max": args.t_max, "panels": args.panels or Q5_PANELS}


def _effective_config(args: argparse.Namespace, params: SirParams) -> dict:
    return {
        "n": args.n, "gamma": args.gamma, "r0": args.r0,
        "s0": args.s0, "i0": args.i0, "rr0": args.rr0, "m": args.m,
        "dt": args.dt if args.dt is not None else default_dt(params),
        "t-max": args.t_max if args.t_max is not None else default_t_max(params),
        "panels": args.panels or Q5_PANELS,
    }


def cmd_analyze(args: argparse.Namespace, out) -> None:
    _require(args, "r0", "m")
    problem = ThresholdProblem.from_values(args.n, args.gamma, args.r0, args.s0, args.i0,
                                           args.m, args.rr0)
    report = analyze(problem, **_solver(args)).to_dict()
    report["config"] = _effective_config(args, problem.params)
    json.dump(report, out, indent=2)
    out.write("\n")


def cmd_sweep(args: argparse.Namespace, out) -> None:
    _require(args, "r0-min", "r0-max", "r0-count", "m-min", "m-max", "m-count")
    grid = SweepGrid(
        (args.r0_min, args.r0_max, args.r0_count),
        (args.m_min, args.m_max, args.m_count),
        n=args.n, gamma=args.gamma, s0=args.s0, i0=args.i0, rr0=args.rr0,
    )
    cells = sweep(grid, workers=args.workers or 1, **_solver(args))
    write_sweep_csv(cells, out)


def cmd_profile(args: argparse.Namespace, out) -> None:
    _require(args, "m", "r0-max", "r0-count")
    # R0 of the template is irrelevant; each row overrides it.
    problem = ThresholdProblem.from_values(args.n, args.gamma, args.r0_max, args.s0, args.i0,
                                           args.m, args.rr0)
    table = r0_profile(problem, args.r0_min, args.r0_max, args.r0_count,
                       workers=args.workers or 1, **_solver(args))
    write_profile_csv(table, out)


def cmd_curve(args: argparse.Namespace, out) -> None:
    _require(args, "r0")
    params = SirParams(args.n, args.gamma, args.r0)
    trajectory = integrate(params, SirState(0.0, args.s0, args.i0, args.rr0),
                           t_max=args.t_max, dt=args.dt)
    trajectory.to_csv(out)


COMMANDS = {
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "profile": cmd_profile,
    "curve": cmd_curve,
}


@contextmanager
def _output(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fp:
            yield fp


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge_config(args)
        _resolve_model(args)
        with _output(args.out) as out:
            COMMANDS[args.command](args, out)
    except (UsageError, SirThresholdError) as exc:
        print(f"sirthreshold {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # Reader went away (e.g. piped into head); silence the flush at exit.
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except Exception as exc:  # noqa: BLE001
        print(f"sirthreshold {args.command}: internal error: {exc!r}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
