"""Command line entry point.

Tables go to standard output (or ``--out``) as CSV; diagnostics go to
standard error.  ``--config FILE`` supplies ``key=value`` lines named after
the long flags; flags given on the command line win.
"""

import argparse
import logging
import sys

from . import acceptance
from .capping import build_cap, verify_metric_lower_bound
from .errors import CapBuildError, ConfigError
from .family import FamilySpec, emit_csv, format_cell, run_family
from .graph import ads_schwarzschild
from .mass import DEFAULT_SCHEDULE, mass_estimate

log = logging.getLogger("ahgraph")


def _floats(text):
    try:
        return tuple(float(x) for x in str(text).split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _model(parser):
    parser.add_argument("--model", choices=("ads",), default="ads")
    parser.add_argument("--n", type=int, default=3)


def build_parser():
    parser = argparse.ArgumentParser(prog="ahgraph", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="file of key=value lines mirroring the long flags")
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    fam = sub.add_parser("family", help="run a mass-to-zero family and emit its table")
    _model(fam)
    fam.add_argument("--masses", type=_floats, default=(1.0, 0.5, 0.1, 0.02))
    fam.add_argument("--rho", type=float, default=2.0)
    fam.add_argument("--rho-bar", type=float, default=3.0)
    fam.add_argument("--beta", type=float, default=2.0)
    fam.add_argument("--lambda", dest="lam", type=float, default=0.9)
    fam.add_argument("--L", type=float, default=1.0)
    fam.add_argument("--samples", type=int, default=10_000)
    fam.add_argument("--abs-tol", type=float, default=1e-12)
    fam.add_argument("--rel-tol", type=float, default=1e-10)
    fam.add_argument("--out", help="CSV path (default: stdout)")

    mass = sub.add_parser("mass", help="estimate the mass of one member")
    _model(mass)
    mass.add_argument("--m", type=float, required=True)
    mass.add_argument("--r-schedule", type=_floats, default=DEFAULT_SCHEDULE)
    mass.add_argument("--out")

    cap = sub.add_parser("cap", help="build and check the cap of one member")
    _model(cap)
    cap.add_argument("--m", type=float, required=True)
    cap.add_argument("--lambda", dest="lam", type=float, default=0.9)
    cap.add_argument("--L", type=float, default=1.0)
    cap.add_argument("--rho", type=float, default=2.0)
    cap.add_argument("--samples", type=int, default=10_000)
    cap.add_argument("--out")

    ver = sub.add_parser("verify", help="run acceptance suites (nonzero exit on failure)")
    ver.add_argument("--suite", choices=tuple(acceptance.SUITES), default="all")
    ver.add_argument("--out")
    return parser


def read_config(path):
    """Parse ``key=value`` lines; '#' starts a comment."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.lstrip("-")] = value
    return values


def _apply_config(parser, argv):
    """Re-parse ``argv`` with config values installed as subcommand defaults."""
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known_args, rest = pre.parse_known_args(argv)
    command = next((tok for tok in rest if tok in COMMANDS), None)
    if not known_args.config or command is None:
        return parser.parse_args(argv)
    config = read_config(known_args.config)
    subparser = parser._subparsers._group_actions[0].choices[command]
    known = {}
    for action in subparser._actions:
        for opt in action.option_strings:
            known[opt.lstrip("-")] = action
    defaults = {}
    for key, raw in config.items():
        action = known.get(key) or known.get(key.replace("_", "-"))
        if action is None or not action.option_strings:
            raise ConfigError(f"unknown config key {key!r} for '{command}'")
        value = raw
        if action.type is not None:
            try:
                value = action.type(raw)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
        if action.choices is not None and value not in action.choices:
            raise ConfigError(f"{key} must be one of {list(action.choices)}")
        defaults[action.dest] = value
    subparser.set_defaults(**defaults)
    for action in subparser._actions:
        if action.dest in defaults:
            action.required = False
    return parser.parse_args(argv)


def _write(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(header, rows):
    lines = [",".join(header)]
    lines += [",".join(format_cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def cmd_family(args):
    spec = FamilySpec(masses=args.masses, n=args.n, model=args.model, rho=args.rho,
                      rho_bar=args.rho_bar, beta=args.beta, lam=args.lam, L=args.L,
                      abs_tol=args.abs_tol, rel_tol=args.rel_tol, cap_samples=args.samples)
    report = run_family(spec)
    emit_csv(report, args.out or sys.stdout)
    return 0


def cmd_mass(args):
    rep = mass_estimate(ads_schwarzschild(args.n, args.m), args.r_schedule)
    for r, value in rep.samples:
        log.info("r=%g integrand=%.15g", r, value)
    _write(_table(("mass", "mass_numeric", "convergence_ok", "tail_slope"),
                  [(args.m, rep.mass, rep.convergence_ok, rep.tail_slope)]), args.out)
    return 0 if rep.convergence_ok else 1


def cmd_cap(args):
    header = ("mass", "lambda", "L", "epsilon", "C", "cap_min_ratio", "cap_pass")
    G = ads_schwarzschild(args.n, args.m)
    try:
        cap = build_cap(G, args.rho, args.L, args.lam)
    except CapBuildError as exc:
        print(f"cap build failed: {exc}", file=sys.stderr)
        _write(_table(header, [(args.m, args.lam, args.L, "nan", "nan", "nan",
                                f"violated:{exc.violated}")]), args.out)
        return 1
    check = verify_metric_lower_bound(cap, args.samples)
    _write(_table(header, [(args.m, args.lam, args.L, cap.epsilon, cap.C, check.min_ratio,
                            check.passed)]), args.out)
    return 0 if check.passed else 1


def cmd_verify(args):
    results = acceptance.run_suite(args.suite)
    for res in results:
        print(acceptance.summary_line(res), file=sys.stderr)
    _write(acceptance.results_csv(results), args.out)
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {"family": cmd_family, "mass": cmd_mass, "cap": cmd_cap, "verify": cmd_verify}


def main(argv=None):
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
