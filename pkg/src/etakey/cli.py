"""Command-line surface.

Subcommands: ``keyrate`` (single evaluation), ``sweep`` (efficiency grid
to CSV, optionally rendered to a figure), ``decoy`` (weak-coherent
estimation from a config file), ``p01min`` (the double-click root), and
``verify`` (the randomized verification suites).

Exit codes: 0 success, 1 input error, 2 protocol abort, 3 verification
violation.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import decoy as decoy_mod
from . import oracles
from .keyrate import (
    Observables,
    STATUS_FEASIBLE,
    deltas_from_single_obs,
    keyrate_multiphoton,
    keyrate_no_mismatch,
    keyrate_single_simple,
    keyrate_single_tight,
)
from .simulate import SweepRow, sweep_figure

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_ABORT = 2
EXIT_VIOLATION = 3

_MODES = ("multiphoton", "tight", "simple", "nomismatch")
_SUITES = ("all", "lemma4", "eur", "prop3", "prop4", "concavity", "p01min-monotone", "fock")


class _CliInputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 by default, which this tool reserves
    # for protocol aborts; route usage errors to exit code 1 instead
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _CliInputError(message)


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="etakey", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    kp = sub.add_parser("keyrate", help="evaluate one key-rate bound")
    kp.add_argument("--eta", type=float, required=True, help="efficiency ratio in (0, 1]")
    kp.add_argument("--p-det", type=float, required=True, help="z-basis detection probability")
    kp.add_argument("--p1", type=float, required=True, help="detector-1 single-click probability")
    kp.add_argument("--q", type=float, required=True, help="weighted x-basis error rate")
    kp.add_argument("--p01", type=float, required=True, help="mean double-click probability")
    kp.add_argument("--qz", type=float, required=True, help="z-basis error ratio")
    kp.add_argument("--mode", choices=_MODES, default="multiphoton")

    sp = sub.add_parser("sweep", help="key-rate curves over an efficiency grid")
    sp.add_argument("--qber", type=float, required=True, help="depolarizing error weight Q")
    sp.add_argument("--p01", type=float, required=True, help="injected double-click rate")
    sp.add_argument("--eta-min", type=float, required=True)
    sp.add_argument("--eta-max", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True, help="number of grid points")
    sp.add_argument("--out", required=True, help="CSV output path")
    sp.add_argument("--plot", default=None, metavar="PATH", help="also render the curves to an image")

    dp = sub.add_parser("decoy", help="decoy-state estimation from a config file")
    dp.add_argument("config", help="key = value config file")

    pp = sub.add_parser("p01min", help="minimal mean double-click probability")
    pp.add_argument("--n", type=int, required=True, help="photon number, n >= 3")

    vp = sub.add_parser("verify", help="run the randomized verification suites")
    vp.add_argument("--suite", default="all", help="one of: " + ", ".join(_SUITES))
    vp.add_argument("--trials", type=int, default=500)
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--csv", default=None, metavar="PATH", help="also write machine-readable rows")
    return parser


def cmd_keyrate(args: argparse.Namespace) -> int:
    obs = Observables(
        eta=args.eta, p_det=args.p_det, p_1=args.p1, q=args.q, p_01=args.p01, q_z=args.qz
    )
    if args.mode == "multiphoton":
        res = keyrate_multiphoton(obs)
        print(f"K = {_fmt(res.k_bound)}")
        if res.status == STATUS_FEASIBLE:
            print(f"argmin_pdet2 = {_fmt(res.argmin_pdet2)}")
        print(f"status = {res.status}")
        return EXIT_OK if res.status == STATUS_FEASIBLE else EXIT_ABORT
    if args.mode == "nomismatch":
        k = keyrate_no_mismatch(obs.p_det, obs.q_z)
    else:
        # single-photon modes: the exact accounting t1 = p_det + (1/eta - 1) p_1
        # recovers the perfect-detection rate from the flags
        t1 = obs.p_det + (1.0 / obs.eta - 1.0) * obs.p_1
        deltas = deltas_from_single_obs(obs.p_det, obs.p_1, t1, obs.q, obs.eta)
        if args.mode == "tight":
            k = keyrate_single_tight(obs.p_det, deltas)
        else:
            k = keyrate_single_simple(obs.p_det, deltas.delta_x)
    print(f"K = {_fmt(k)}")
    print(f"status = {STATUS_FEASIBLE}")
    return EXIT_OK


def _csv_cell(x: float) -> str:
    return "" if x != x else _fmt(x)  # NaN renders as an empty field


def write_sweep_csv(rows: list[SweepRow], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("eta,k_main,k_tight,k_simple,k_nomismatch,ratio,status\n")
        for r in rows:
            fh.write(
                ",".join(
                    (
                        _fmt(r.eta),
                        _csv_cell(r.k_main),
                        _fmt(r.k_tight),
                        _fmt(r.k_simple),
                        _fmt(r.k_nomismatch),
                        _csv_cell(r.ratio),
                        r.status,
                    )
                )
                + "\n"
            )


def cmd_sweep(args: argparse.Namespace) -> int:
    if not (0.0 < args.eta_min <= args.eta_max <= 1.0):
        raise _CliInputError("grid violates 0 < eta-min <= eta-max <= 1")
    if args.steps < 1:
        raise _CliInputError("steps must be >= 1")
    if args.steps == 1:
        grid = [args.eta_min]
        if args.eta_min != args.eta_max:
            raise _CliInputError("steps = 1 requires eta-min == eta-max")
    else:
        step = (args.eta_max - args.eta_min) / (args.steps - 1)
        grid = [args.eta_min + i * step for i in range(args.steps)]
    rows = sweep_figure(args.qber, args.p01, grid)
    try:
        write_sweep_csv(rows, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.plot is not None:
        from .plots import render_sweep_figure

        try:
            render_sweep_figure(rows, args.plot)
        except OSError as exc:
            print(f"error: cannot write {args.plot}: {exc}", file=sys.stderr)
            return EXIT_INPUT
    return EXIT_OK


_CONFIG_SCALARS = ("eta", "qz", "mu", "nu1", "nu2")
_CONFIG_RATES = ("p_det", "p_1", "p_01", "q0", "q1")
_CONFIG_KEYS = set(_CONFIG_SCALARS) | {
    f"{who}.{what}" for who in ("signal", "decoy1", "decoy2") for what in _CONFIG_RATES
}


def read_config(path: str) -> dict[str, float]:
    """Parse a line-oriented ``key = value`` file with ``#`` comments."""
    values: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise _CliInputError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise _CliInputError(f"{path}:{lineno}: unknown key {key!r}")
            if key in values:
                raise _CliInputError(f"{path}:{lineno}: duplicate key {key!r}")
            try:
                values[key] = float(val.strip())
            except ValueError:
                raise _CliInputError(f"{path}:{lineno}: {val.strip()!r} is not a number") from None
    missing = sorted(_CONFIG_KEYS - set(values))
    if missing:
        raise _CliInputError(f"{path}: missing keys: {', '.join(missing)}")
    return values


def _record(values: dict[str, float], who: str, mu: float) -> decoy_mod.IntensityRecord:
    return decoy_mod.IntensityRecord(
        label=who,
        mu=mu,
        p_det=values[f"{who}.p_det"],
        p_1=values[f"{who}.p_1"],
        p_01=values[f"{who}.p_01"],
        q0=values[f"{who}.q0"],
        q1_frac=values[f"{who}.q1"],
    )


def cmd_decoy(args: argparse.Namespace) -> int:
    values = read_config(args.config)
    inputs = decoy_mod.DecoyInputs(
        signal=_record(values, "signal", values["mu"]),
        decoy1=_record(values, "decoy1", values["nu1"]),
        decoy2=_record(values, "decoy2", values["nu2"]),
        eta=values["eta"],
    )
    est = decoy_mod.decoy_estimates(inputs)
    res = decoy_mod.decoy_keyrate(inputs, values["qz"])
    print(f"pdet_single_lower = {_fmt(est.pdet_single_l)}")
    print(f"p1_single_lower = {_fmt(est.p1_single_l)}")
    print(f"q_single_upper = {_fmt(est.q_single_u)}")
    print(f"y0_lower = {_fmt(est.y0_detect_l)}")
    print(f"K = {_fmt(res.k_bound)}")
    print(f"status = {res.status}")
    return EXIT_OK if res.status == STATUS_FEASIBLE else EXIT_ABORT


def cmd_p01min(args: argparse.Namespace) -> int:
    from .scalarmath import p01_min

    if args.n < 3:
        raise _CliInputError(f"n = {args.n} must be >= 3")
    print(f"{p01_min(args.n):.12f}")
    return EXIT_OK


def _run_suite(name: str, trials: int, seed: int) -> list[oracles.TrialReport]:
    if name == "all":
        return oracles.default_suites(trials, seed)
    if name == "lemma4":
        return [oracles.check_lemma4(n, trials, seed) for n in (3, 4, 5)]
    if name == "eur":
        return [oracles.check_eur(n, trials, seed) for n in (1, 2, 3, 4, 5)]
    if name == "prop3":
        return [oracles.check_prop3(trials, seed)]
    if name == "prop4":
        return [oracles.check_prop4(trials, seed)]
    if name == "concavity":
        return [oracles.check_concavity(trials, seed)]
    if name == "p01min-monotone":
        return [oracles.check_p01min_monotone()]
    if name == "fock":
        return [oracles.check_fock(trials, seed)]
    raise _CliInputError(f"unknown suite {name!r}; expected one of: " + ", ".join(_SUITES))


def cmd_verify(args: argparse.Namespace) -> int:
    reports = _run_suite(args.suite, args.trials, args.seed)
    for rep in reports:
        print(rep.line())
    total = sum(rep.violations for rep in reports)
    print(f"total violations = {total}")
    if args.csv is not None:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write("suite,trials,violations,worst_slack,seed\n")
            for rep in reports:
                fh.write(
                    f"{rep.suite},{rep.trials},{rep.violations},{rep.worst_slack:.10e},{rep.seed}\n"
                )
    return EXIT_OK if total == 0 else EXIT_VIOLATION


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "keyrate":
            return cmd_keyrate(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "decoy":
            return cmd_decoy(args)
        if args.command == "p01min":
            return cmd_p01min(args)
        return cmd_verify(args)
    except _CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def run() -> None:
    sys.exit(main())
