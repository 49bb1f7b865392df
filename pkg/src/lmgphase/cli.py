"""Command-line driver: every pipeline as a subcommand writing CSV.

Output layout: ``#`` metadata lines (version and the full effective
configuration), a header row, then one data row per grid point in grid order.
Floats use 12 significant digits so identical flags give identical bytes.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import __version__
from .biaxial import biaxial_phase, epsilon_biaxial, rotation_angle
from .errors import LMGError
from .model import RotationFrame, validate_biaxial, validate_uniaxial
from .oracle import (DEFAULT_MAX_DIM, FULL_HILBERT_MAX_N, berry_phase_exact,
                     berry_phase_overlap, broken_symmetry_state, build_hamiltonian,
                     full_hilbert_check, ground_doublet, spin_operators)
from .series import geometric_phase_series
from .sweep import AxisSpec, cusp_detect, scaling_fit, sweep
from .uniaxial import displacement, epsilon_uniaxial

BIAXIAL_COLUMNS = ["gamma", "h", "N", "theta", "epsilon", "t_sq", "phi_g", "n_mean"]
UNIAXIAL_COLUMNS = ["h_x", "h_z", "N", "lambda0", "y", "epsilon", "t_sq", "phi_g",
                    "n_mean", "e0"]
ORACLE_TAIL = ["N", "n_mean_hp", "n_mean_ed", "abs_diff", "gap", "phase_overlap",
               "phase_exact"]
# flags that never change the numbers and are left out of the config echo
NOT_ECHOED = {"out", "threads", "func", "parser", "defaults"}


def fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, int)) and not isinstance(value, float):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = format(value, ".12g")
    return "0" if text == "-0" else text


def _parse_n_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    return values


# --- row evaluators -------------------------------------------------------

def biaxial_row(gamma, h, N, truncation=None, ed=False, ed_max_dim=DEFAULT_MAX_DIM):
    params = validate_biaxial(gamma, h, N)
    squeeze = epsilon_biaxial(params)
    m = params.truncation if truncation is None else truncation
    phase = geometric_phase_series(squeeze.t_sq, m)
    row = {"theta": rotation_angle(h).theta, "epsilon": squeeze.epsilon,
           "t_sq": squeeze.t_sq, "phi_g": phase.phi_g, "n_mean": phase.n_mean}
    if ed:
        exact, doublet, _ = _ed_state(params, rotation_angle(h), ed_max_dim)
        row["n_mean_ed"] = exact.n_mean
        row["gap_ed"] = doublet.gap
    return row


def uniaxial_row(h_x, h_z, N, truncation=None):
    params = validate_uniaxial(h_x, h_z, N)
    sol = displacement(params)
    squeeze = epsilon_uniaxial(params, sol)
    m = params.truncation if truncation is None else truncation
    phase = geometric_phase_series(squeeze.t_sq, m)
    return {"lambda0": sol.lambda0, "y": sol.y, "epsilon": squeeze.epsilon,
            "t_sq": squeeze.t_sq, "phi_g": phase.phi_g, "n_mean": phase.n_mean,
            "e0": sol.e0}


def _ed_state(params, frame, max_dim, steps=None):
    sector = spin_operators(params.n_particles, max_dim=max_dim)
    doublet = ground_doublet(build_hamiltonian(params, sector))
    state = broken_symmetry_state(doublet, frame, sector)
    exact = berry_phase_exact(state, frame, sector)
    overlap = None if steps is None else berry_phase_overlap(state, frame, sector, steps)
    return exact, doublet, overlap


def oracle_row(model, N, steps, ed_max_dim, truncation=None, gamma=None, h=None,
               h_x=None, h_z=None):
    if model == "biaxial":
        params = validate_biaxial(gamma, h, N)
        frame = rotation_angle(h)
        n_hp = biaxial_phase(params, truncation).n_mean
    else:
        params = validate_uniaxial(h_x, h_z, N)
        frame = RotationFrame(0.0)
        sol = displacement(params)
        m = params.truncation if truncation is None else truncation
        # N/2 - <Sz> in the laboratory frame includes the displacement
        n_hp = N * sol.lambda0 ** 2 + geometric_phase_series(
            epsilon_uniaxial(params, sol).t_sq, m).n_mean
    exact, doublet, overlap = _ed_state(params, frame, ed_max_dim, steps)
    return {"n_mean_hp": n_hp, "n_mean_ed": exact.n_mean,
            "abs_diff": abs(n_hp - exact.n_mean), "gap": doublet.gap,
            "phase_overlap": overlap, "phase_exact": exact.phase}


# --- output ---------------------------------------------------------------

def _header(args):
    lines = [f"# lmgphase {__version__}", f"# command={args.command}"]
    for key in sorted(vars(args)):
        if key in NOT_ECHOED or key == "command":
            continue
        value = getattr(args, key)
        if isinstance(value, list):
            value = ",".join(fmt(v) for v in value)
        elif value is None:
            value = "none"
        elif not isinstance(value, str):
            value = fmt(value)
        lines.append(f"# {key}={value}")
    return lines


def _table_lines(table, columns):
    lines = [",".join(columns)]
    for row in table.rows:
        lines.append(",".join(fmt(row.get(c, math.nan)) for c in columns))
    for index, message in table.failures():
        lines.append(f"# error: row {index}: {message}")
    return lines


def _emit(args, lines):
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _status(table):
    if table.rows and len(table.failures()) == len(table.rows):
        print(f"error: every grid point failed; first: {table.rows[0]['error']}",
              file=sys.stderr)
        return 1
    return 0


def _axis(args, name, flag):
    single = getattr(args, flag)
    lo, hi, steps = (getattr(args, f"{flag}_{k}") for k in ("min", "max", "steps"))
    if lo is not None or hi is not None:
        if single is not None:
            raise LMGError(f"--{flag.replace('_', '-')} conflicts with its range flags")
        if lo is None or hi is None:
            raise LMGError(f"--{flag.replace('_', '-')}-min and -max go together")
        return AxisSpec(name, lo, hi, steps)
    return AxisSpec.single(name, single if single is not None else args.defaults[flag])


# --- subcommands ----------------------------------------------------------

def cmd_biaxial(args):
    axes = [_axis(args, "gamma", "gamma"), _axis(args, "h", "h")]
    table = sweep(biaxial_row, axes,
                  {"N": args.n, "truncation": args.truncation, "ed": args.ed,
                   "ed_max_dim": args.ed_max_dim},
                  threads=args.threads)
    columns = BIAXIAL_COLUMNS + (["n_mean_ed", "gap_ed"] if args.ed else [])
    _emit(args, _header(args) + _table_lines(table, columns))
    return _status(table)


def cmd_uniaxial(args):
    axes = [_axis(args, "h_x", "hx"), _axis(args, "h_z", "hz")]
    table = sweep(uniaxial_row, axes, {"N": args.n, "truncation": args.truncation},
                  threads=args.threads)
    _emit(args, _header(args) + _table_lines(table, UNIAXIAL_COLUMNS))
    return _status(table)


def cmd_scaling(args):
    n_list = args.n_list
    if len(n_list) < 3:
        args.parser.error("--n-list needs at least 3 values for the fit")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        args.parser.error("--n-list must be strictly increasing")
    if args.model == "biaxial":
        def evaluate(N):
            r = biaxial_row(args.gamma, args.h, int(N))
            return {"phi_g": r["phi_g"], "n_mean": r["n_mean"], "t_sq": r["t_sq"]}
    else:
        def evaluate(N):
            r = uniaxial_row(args.hx, args.hz, int(N))
            return {"phi_g": r["phi_g"], "n_mean": r["n_mean"], "t_sq": r["t_sq"]}
    table = sweep(evaluate, [_ListAxis("N", n_list)], threads=args.threads)
    lines = _header(args) + _table_lines(table, ["N", "t_sq", "phi_g", "n_mean"])
    status = _status(table)
    if status == 0:
        ok = [(r["N"], r["phi_g"]) for r in table.rows if not r["error"]]
        if len(ok) >= 3:
            for fit in scaling_fit([n for n, _ in ok], [p for _, p in ok]):
                lines.append(f"# fit: {fit.kind} slope={fmt(fit.slope)} "
                             f"intercept={fmt(fit.intercept)} r_sq={fmt(fit.r_sq)}")
    _emit(args, lines)
    return status


class _ListAxis(AxisSpec):
    """Axis with explicit, strictly increasing values."""

    def __init__(self, name, values):
        super().__init__(name, float(values[0]), float(values[-1]), len(values))
        object.__setattr__(self, "_values", [int(v) for v in values])

    def values(self):
        return list(self._values)


def cmd_oracle(args):
    if args.model == "biaxial":
        axes = [_axis(args, "gamma", "gamma"), _axis(args, "h", "h")]
        params_cols = ["gamma", "h"]
    else:
        axes = [_axis(args, "h_x", "hx"), _axis(args, "h_z", "hz")]
        params_cols = ["h_x", "h_z"]
    table = sweep(oracle_row, axes,
                  {"model": args.model, "N": args.n, "steps": args.steps,
                   "ed_max_dim": args.ed_max_dim, "truncation": args.truncation},
                  threads=args.threads)
    lines = _header(args) + _table_lines(table, ["model", *params_cols, *ORACLE_TAIL])
    status = _status(table)

    varying = [name for name, values in table.axes.items() if len(values) >= 3]
    if status == 0 and len(varying) == 1:
        axis = varying[0]
        for label, column in (("hp", "n_mean_hp"), ("ed", "n_mean_ed")):
            found = cusp_detect(table, column, axis, args.jump_threshold)
            lines.append(f"# cusp_{label}: {axis}=" + ";".join(fmt(v) for v in found))

    if args.full_check:
        if args.n > FULL_HILBERT_MAX_N:
            args.parser.error(f"--full-check needs --n <= {FULL_HILBERT_MAX_N}")
        for row in table.rows:
            if row["error"]:
                continue
            if args.model == "biaxial":
                params = validate_biaxial(row["gamma"], row["h"], args.n)
            else:
                params = validate_uniaxial(row["h_x"], row["h_z"], args.n)
            check = full_hilbert_check(params)
            point = ",".join(f"{c}={fmt(row[c])}" for c in params_cols)
            lines.append(f"# full_check: {point} sector_e0={fmt(check['sector_e0'])} "
                         f"full_e0={fmt(check['full_e0'])} abs_diff={fmt(check['abs_diff'])}")
    _emit(args, lines)
    return status


# --- parser ---------------------------------------------------------------

def _add_range(parser, flag, label, default, steps):
    dest = flag.replace("-", "_")
    parser.add_argument(f"--{flag}", dest=dest, type=float, default=None,
                        help=f"single {label} value (default {default} when no range given)")
    parser.add_argument(f"--{flag}-min", dest=f"{dest}_min", type=float, default=None,
                        help=f"{label} grid start (default: none)")
    parser.add_argument(f"--{flag}-max", dest=f"{dest}_max", type=float, default=None,
                        help=f"{label} grid end (default: none)")
    parser.add_argument(f"--{flag}-steps", dest=f"{dest}_steps", type=int, default=steps,
                        help=f"{label} grid points (default {steps})")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None,
                        help="write CSV here instead of standard output (default: stdout)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads for grid evaluation, 0 = auto (default 1)")

    parser = argparse.ArgumentParser(
        prog="lmgphase",
        description="Ground-state geometric phase of the LMG model, as CSV.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, defaults):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text,
                           formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        p.set_defaults(func=func, parser=p, defaults=defaults)
        return p

    p = add("biaxial", cmd_biaxial, "phi_g of H = -(Sx^2 + gamma Sy^2)/N - h Sz",
            {"gamma": 0.5, "h": 2.0})
    _add_range(p, "gamma", "anisotropy", 0.5, 400)
    _add_range(p, "h", "field", 2.0, 400)
    p.add_argument("--n", type=int, default=1000, help="number of spins N")
    p.add_argument("--truncation", type=int, default=None,
                   help="series upper index M (default floor(N/2))")
    p.add_argument("--ed", action="store_true", help="add exact-diagonalization columns")
    p.add_argument("--ed-max-dim", type=int, default=DEFAULT_MAX_DIM,
                   help="largest sector dimension allowed for ED")

    p = add("uniaxial", cmd_uniaxial, "phi_g of H = -Sx^2/N - h_x Sx - h_z Sz",
            {"hx": 0.0, "hz": 0.5})
    _add_range(p, "hx", "transverse field h_x", 0.0, 400)
    _add_range(p, "hz", "longitudinal field h_z", 0.5, 400)
    p.add_argument("--n", type=int, default=200, help="number of spins N")
    p.add_argument("--truncation", type=int, default=None,
                   help="series upper index M (default floor(N/2))")

    p = add("scaling", cmd_scaling, "phi_g versus N with linear and log-log fits",
            {})
    p.add_argument("--model", choices=["biaxial", "uniaxial"], default="biaxial",
                   help="model family")
    p.add_argument("--gamma", type=float, default=0.5, help="anisotropy (biaxial)")
    p.add_argument("--h", type=float, default=1.0, help="field (biaxial)")
    p.add_argument("--hx", type=float, default=0.0, help="transverse field (uniaxial)")
    p.add_argument("--hz", type=float, default=1.0, help="longitudinal field (uniaxial)")
    p.add_argument("--n-list", type=_parse_n_list, default=[100, 1000, 10000, 100000],
                   help="comma-separated particle numbers")

    p = add("oracle", cmd_oracle, "boson series against exact diagonalization",
            {"gamma": 0.5, "h": 2.0, "hx": 0.0, "hz": 0.5})
    p.add_argument("--model", choices=["biaxial", "uniaxial"], default="biaxial",
                   help="model family")
    _add_range(p, "gamma", "anisotropy", 0.5, 400)
    _add_range(p, "h", "field", 2.0, 400)
    _add_range(p, "hx", "transverse field h_x", 0.0, 400)
    _add_range(p, "hz", "longitudinal field h_z", 0.5, 400)
    p.add_argument("--n", type=int, default=200, help="number of spins N")
    p.add_argument("--truncation", type=int, default=None,
                   help="series upper index M (default floor(N/2))")
    p.add_argument("--steps", type=int, default=10_000,
                   help="phi steps for the overlap-product phase")
    p.add_argument("--ed-max-dim", type=int, default=DEFAULT_MAX_DIM,
                   help="largest sector dimension allowed for ED")
    p.add_argument("--jump-threshold", type=float, default=10.0,
                   help="cusp detection threshold for one-dimensional sweeps")
    p.add_argument("--full-check", action="store_true",
                   help=f"compare with the full 2^N space (N <= {FULL_HILBERT_MAX_N})")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 0:
        args.parser.error("--threads must be >= 0")
    try:
        return args.func(args)
    except LMGError as exc:
        # configuration problems surface before any evaluation
        args.parser.error(str(exc))
