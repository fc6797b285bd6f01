import argparse
import os

from lohner import SolverConfig

SYSTEMS = ["michelson", "falkner-skan", "rossler-h", "rossler-pd", "vanderpol"]
STRATEGIES = ["cartesian", "diag+normal", "diag+flowdir"]


def log10_list(text):
    return [float(value) for value in text.split(",")]


common = argparse.ArgumentParser(add_help=False)

# Solver
common.add_argument(
    "--order", type=int, default=20, choices=range(5, 31), metavar="[5-30]",
    help="Taylor order of the validated solver",
)
common.add_argument(
    "--tol", type=float, default=1e-18, help="Local error target used to predict steps"
)
common.add_argument("--min-step", type=float, default=1e-10, help="Smallest step before giving up")
common.add_argument("--max-step", type=float, default=0.5, help="Largest step the solver takes")
common.add_argument(
    "--min-flight",
    type=float,
    default=None,
    help="Ignore crossings before this time (default: time to leave the source section)",
)
common.add_argument(
    "--no-polish",
    action="store_true",
    default=False,
    help="Use catalog orbit points without Newton shooting",
)
# Experiment
common.add_argument("--exp-name", type=str, default="poincare", help="Experiment name")
common.add_argument("--out", type=str, default=None, help="CSV file for the result rows")
common.add_argument("--jobs", type=int, default=1, help="Worker processes for independent rows")
common.add_argument(
    "--check",
    action="store_true",
    default=False,
    help="Compare asserted rows with the acceptance bands and set the exit code",
)
# Logging
common.add_argument(
    "--filelogger",
    action="store_true",
    default=False,
    help="Save rows, timings and failures in a json file",
)
common.add_argument(
    "--tensorboard",
    action="store_true",
    default=False,
    help="Use Tensorboard for logging",
)
# Other configuration
common.add_argument(
    "--seed", type=int, default=42, help="Random seed for reproducibility"
)

parser = argparse.ArgumentParser(
    description="Validated Poincare map enclosures for periodic orbits"
)
subparsers = parser.add_subparsers(dest="command", required=True)

vdp = subparsers.add_parser("vdp", parents=[common], help="van der Pol return-time tables")
vdp.add_argument("--section", choices=["orthogonal", "cto"], default="orthogonal")
vdp.add_argument(
    "--deltas",
    type=log10_list,
    default=[-9, -8, -7, -6, -5, -4, -3, -2, -1],
    help="Comma separated log10 of the initial segment radius",
)

fixed = subparsers.add_parser("fixed", parents=[common], help="Ratios on the standard section")
fixed.add_argument("--system", choices=SYSTEMS[:4], required=True)
fixed.add_argument("--strategy", choices=STRATEGIES + ["all"], default="all")
fixed.add_argument(
    "--sizes",
    type=log10_list,
    default=[-10, -9, -8, -7, -6, -5, -4, -3, -2],
    help="Comma separated log10 of the initial set size s",
)

varying = subparsers.add_parser("varying", parents=[common], help="Ratios on rebuilt sections")
varying.add_argument("--system", choices=SYSTEMS[:4], required=True)
varying.add_argument(
    "--section", choices=["orthogonal", "cto", "max-angle-cto", "all"], default="all"
)
varying.add_argument(
    "--sizes",
    type=log10_list,
    default=[-10, -9, -8, -7, -6, -5, -4, -3, -2],
    help="Comma separated log10 of the initial set size s",
)
varying.add_argument("--samples", type=int, default=200, help="Orbit samples for max-angle-cto")

angles = subparsers.add_parser("angles", parents=[common], help="Flow/CTO-normal angle scan")
angles.add_argument("--system", choices=SYSTEMS, required=True)
angles.add_argument("--samples", type=int, default=1000)

verify = subparsers.add_parser("verify", parents=[common], help="Property suites")
verify.add_argument(
    "--samples", type=int, default=100, help="Oracle sample points per containment check"
)

orbit = subparsers.add_parser("orbit", parents=[common], help="Dump a reference orbit")
orbit.add_argument("--system", choices=SYSTEMS, required=True)
orbit.add_argument("--points", type=int, default=2000)
orbit.add_argument(
    "--store-period",
    action="store_true",
    default=False,
    help="Recompute the reference period and save it in systems/catalog.json",
)


def print_args(args):
    s = ""
    args_dict = vars(args)
    for key, value in sorted(args_dict.items()):
        if key == "solver_config":
            continue
        print(key, value)
        s += "%s: %s\n" % (key, value)
    return s


def parse_args(argv=None):
    args = parser.parse_args(argv)
    try:
        args.solver_config = SolverConfig(
            order=args.order,
            tolerance=args.tol,
            min_step=args.min_step,
            max_step=args.max_step,
        )
    except ValueError as err:
        parser.error(str(err))
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    for name in ("sizes", "deltas"):
        values = getattr(args, name, None)
        if values and any(b <= a for a, b in zip(values, values[1:])):
            parser.error("--%s must be strictly increasing, got %s" % (name, values))
    if args.command == "vdp" and any(k < -9 or k > -1 for k in args.deltas):
        parser.error("--deltas must lie in [-9, -1], got %s" % args.deltas)
    if args.command == "varying" and args.samples < 100:
        parser.error("--samples must be at least 100 for max-angle-cto, got %d" % args.samples)

    args.logdir = os.path.join("checkpoints", args.exp_name)
    args.polish = None if not args.no_polish else False

    return args
