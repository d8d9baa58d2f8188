import argparse

import handlers as handlers

# Subcommand -> (handler, one-line help)
COMMANDS = {
    "converge": (handlers.converge_command, "strong-error curve and fitted order of one solver"),
    "dimscale": (handlers.dimscale_command, "error growth with dimension on separable quadratics"),
    "weak": (handlers.weak_command, "deterministic moment-error order of the midpoint scheme"),
    "prob": (handlers.prob_command, "Monte Carlo estimate of the crossing event probability"),
    "clow": (handlers.clow_command, "grid search for the lower-bound constant"),
    "perturb": (handlers.perturb_command, "pathwise perturbation bounds for adversarial potentials"),
    "trap": (handlers.trap_command, "trapping region of ordered potential pairs"),
    "separate": (handlers.separate_command, "separation of solutions on event paths"),
    "lattice": (handlers.lattice_command, "equivalence classes seen through a solver's queries"),
    "scd-check": (handlers.scd_check_command, "symmetric chain decomposition checks"),
}

# (flag, config key, help)
COMMON_FLAGS = (
    ("--seed", "seed", "master seed (mandatory here or in --config)"),
    ("--workers", "workers", "worker threads for trial fan-out"),
    ("--out-dir", "out_dir", "directory for default output paths"),
    ("--csv", "csv", "CSV data file path"),
    ("--json", "json", "JSON summary path"),
    ("--T", "T", "time horizon"),
    ("--trials", "trials", "number of independent trials"),
    ("--solver", "solver", "exact, em or rmm"),
    ("--potential", "potential", "potential spec, e.g. quadratic:u=1,L=4"),
    ("--ns", "ns", "comma-separated step counts"),
    ("--h", "h", "comma-separated step sizes"),
    ("--d", "d", "comma-separated dimensions"),
    ("--ell", "ell", "strong convexity constant"),
    ("--L", "L", "smoothness constant"),
    ("--u", "u", "base curvature"),
    ("--u-r", "u_r", "upper curvature u_R"),
    ("--u-list", "u_list", "comma-separated base curvatures searched by clow"),
    ("--u-r-list", "u_r_list", "comma-separated upper curvatures searched by clow"),
    ("--cx", "cx", "comma-separated position thresholds"),
    ("--cv", "cv", "comma-separated velocity bounds"),
    ("--xi", "xi", "bump slope"),
    ("--n", "n", "comma-separated query budgets N"),
    ("--ns-fine", "ns_fine", "fine grid steps for pathwise checks"),
)
CONFIG_KEYS = tuple(key for _, key, _ in COMMON_FLAGS)


def _add_common_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="YAML file with experiment parameters; flags override it")
    for flag, key, text in COMMON_FLAGS:
        # raw strings; ExperimentConfig does the typing so file and flag values share one path
        parser.add_argument(flag, dest=key, default=None, help=text)


# Register subcommands
def register_commands(parser: argparse.ArgumentParser) -> argparse.ArgumentParser:
    subparsers = parser.add_subparsers(dest="experiment", required=True, metavar="experiment")
    for name, (handler, text) in COMMANDS.items():
        sub = subparsers.add_parser(name, help=text, description=text)
        _add_common_flags(sub)
        sub.set_defaults(handler=handler)
    return parser


def config_flags(namespace: argparse.Namespace) -> dict:
    """Flag values actually given on the command line."""
    return {key: getattr(namespace, key) for key in CONFIG_KEYS if getattr(namespace, key, None) is not None}
