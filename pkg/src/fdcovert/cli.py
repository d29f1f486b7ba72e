"""Command-line front end.

Exit status: 0 success, 1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import covertness as cov
from .config import ConfigError, parse_config, parse_overrides
from .link import OutageInputs, outage_probability
from .model import ParameterError
from .sweep import OUTPUTS, PRESETS, SweepSpec, run_preset, run_sweep
from .verification import SUITES, verify

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

EVAL_QUANTITIES = (
    "delta",
    "expected_xi",
    "t",
    "prob_rho1_geq_rho2",
    "t_eps",
    "p_b_max_star",
    "r_c_star",
    "r_c_limit",
)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key (repeatable)")
    p.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    p.add_argument("--trials", type=int, help="Monte-Carlo sample count (overrides config)")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.add_argument("--workers", type=int, default=1, help="worker threads; output does not depend on it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdcovert",
        description="Covert communication with a full-duplex AN receiver: sweeps, checks and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="sweep one parameter and tabulate outputs")
    _common(sw)
    sw.add_argument("--var", required=True, help="one of p_b_max, p_a, epsilon, rate, sigma2_b, phi")
    sw.add_argument("--start", type=float, required=True)
    sw.add_argument("--stop", type=float, required=True)
    sw.add_argument("--steps", type=int, default=21)
    sw.add_argument("--scale", choices=("db", "linear"), default="linear")
    sw.add_argument("--outputs", default="delta", help=f"comma list from {','.join(OUTPUTS)}")
    sw.add_argument("--no-mc", action="store_true", help="skip Monte-Carlo columns")

    ve = sub.add_parser("verify", help="closed forms against independent oracles")
    _common(ve)
    ve.add_argument("suite", nargs="?", default="all", choices=SUITES + ("all",))

    pr = sub.add_parser("preset", help="figure reproduction sweeps")
    _common(pr)
    pr.add_argument("name", choices=tuple(PRESETS))
    pr.add_argument("--curve", action="append", default=[], metavar="KEY=V1,V2,...",
                    help="replace the values of one curve family (repeatable)")
    pr.add_argument("--no-mc", action="store_true", help="skip Monte-Carlo columns")

    ev = sub.add_parser("eval", help="closed-form quantities at one configuration")
    _common(ev)
    ev.add_argument("quantities", nargs="*", default=["delta", "expected_xi"],
                    help=f"any of {', '.join(EVAL_QUANTITIES)}")
    return parser


def load_config(args):
    config = parse_config(args.config)
    extra = list(args.overrides)
    if args.seed is not None:
        extra.append(f"seed={args.seed}")
    if args.trials is not None:
        extra.append(f"trials={args.trials}")
    return parse_overrides(extra, config)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_curves(items):
    curves = {}
    for item in items:
        key, sep, values = item.partition("=")
        if not sep or not values:
            raise ConfigError(f"expected KEY=V1,V2,..., got {item!r}", "curve")
        curves[key.strip()] = tuple(v.strip() for v in values.split(","))
    return curves


def cmd_sweep(args, config) -> int:
    spec = SweepSpec(
        args.var, args.start, args.stop, args.steps, args.scale,
        tuple(o.strip() for o in args.outputs.split(",") if o.strip()),
        mc=not args.no_mc,
    )
    _emit(run_sweep(config, spec, workers=args.workers).to_csv(), args.out)
    return EXIT_OK


def cmd_preset(args, config) -> int:
    # preset parameters sit between the config file and --set overrides
    base = parse_overrides([f"{k}={v}" for k, v in (("seed", args.seed), ("trials", args.trials)) if v is not None],
                           parse_config(args.config))
    table = run_preset(args.name, base, args.overrides, _parse_curves(args.curve),
                       mc=not args.no_mc, workers=args.workers)
    _emit(table.to_csv(), args.out)
    return EXIT_OK


def cmd_verify(args, config) -> int:
    checks = verify(config, args.suite, workers=args.workers)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["suite", "check", "cases", "tolerance", "deviation", "result"])
    for c in checks:
        writer.writerow([c.suite, c.name, c.cases, repr(float(c.tolerance)), repr(float(c.deviation)),
                         "pass" if c.passed else "FAIL"])
    _emit(buf.getvalue(), args.out)
    for c in checks:
        mark = "PASS" if c.passed else "FAIL"
        print(f"[{mark}] {c.suite}: {c.name} (deviation {c.deviation:.3e}, tolerance {c.tolerance:.3e}, "
              f"{c.cases} cases)", file=sys.stderr)
    failed = [c for c in checks if not c.passed]
    if failed:
        print("failed: " + "; ".join(f"{c.suite}: {c.name}" for c in failed), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_eval(args, config) -> int:
    p, s, form = config.params, config.stats, config.xi_form
    rows = []
    for q in args.quantities:
        if q not in EVAL_QUANTITIES:
            raise ConfigError(f"unknown quantity; choose from {EVAL_QUANTITIES}", q)
        if q in ("t_eps", "p_b_max_star", "r_c_star", "r_c_limit") and config.epsilon is None:
            raise ConfigError(f"{q} needs epsilon", "epsilon")
        if q == "delta":
            value = outage_probability(OutageInputs(p, s))
        elif q == "expected_xi":
            value = cov.expected_xi_star(cov.t_of_powers(p, s), form)
        elif q == "t":
            value = cov.t_of_powers(p, s)
        elif q == "prob_rho1_geq_rho2":
            value = cov.prob_rho1_geq_rho2(p, s)
        elif q == "t_eps":
            value = cov.solve_t_epsilon(config.epsilon, form)
        elif q == "p_b_max_star":
            value = cov.optimal_pb_max(p.p_a, s, config.epsilon, form)
        elif q == "r_c_star":
            value = cov.max_covert_rate(p, s, config.epsilon, form)
        else:
            value = cov.covert_rate_limit(s, p.rate, p.phi, config.epsilon, form)
        rows.append(f"{q},{value!r}\n")
    _emit("quantity,value\n" + "".join(rows), args.out)
    return EXIT_OK


COMMANDS = {"sweep": cmd_sweep, "preset": cmd_preset, "verify": cmd_verify, "eval": cmd_eval}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
        return COMMANDS[args.command](args, config)
    except (ConfigError, ParameterError, cov.CovertnessUnsatisfiable) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
