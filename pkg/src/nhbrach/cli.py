"""Command-line front end: ``nhbrach <command> [options]``.

Every command writes CSV (default) or JSON to ``--output`` or stdout.
Relative output paths are resolved against ``$NHBRACH_OUTPUT_DIR`` when set.
A ``--config FILE`` of ``key = value`` lines supplies the same options as
flags; explicit flags win.

Exit status: 0 on success, 1 on a numerical failure (the message names the
violated invariant), 2 on invalid usage.
"""
import argparse
import os
import re
import sys

import numpy as np

from . import verify as _verify
from .bloch import UP, TargetSpec, spinors_from_target
from .brachistochrone import (
    ConstraintMode,
    cell_centers,
    critical_points,
    evolution_time,
    landscape,
)
from .dynamics import integrate_bloch, propagate_closed
from .errors import ExceptionalPointError, IntegrationError, NotOnBranchError
from .hamiltonian import HamiltonianParams, optimal_hamiltonian
from .hyperboloid import (
    PTScenario,
    closed_form_length,
    mapped_path,
    omega_constrained_bounds,
    path_length,
    pt_evolution_time,
)
from .io import landscape_rows, parse_complex, parse_range, parse_real, rows_to_csv, to_json

OUTPUT_ENV = "NHBRACH_OUTPUT_DIR"
BOUND_TOL = 1e-10


class NumericalFailure(RuntimeError):
    """A computed quantity violated a stated invariant."""


def _argtype(fn, what):
    def convert(text):
        try:
            return fn(text)
        except (TypeError, ValueError) as exc:
            raise argparse.ArgumentTypeError(f"invalid {what} {text!r}: {exc}") from None

    convert.__name__ = what
    return convert


REAL = _argtype(parse_real, "real number")
COMPLEX = _argtype(parse_complex, "complex number")


def _grid(text):
    n_re, _, n_im = text.lower().partition("x")
    n_re, n_im = int(n_re), int(n_im)
    if n_re < 1 or n_im < 1:
        raise ValueError("grid sizes must be positive")
    return n_re, n_im


def _span(text):
    lo, hi, _ = parse_range(text, n_default=0)
    if not hi > lo:
        raise ValueError("need lo < hi")
    return lo, hi


def _sweep(text):
    lo, hi, n = parse_range(text)
    if n < 1 or hi < lo:
        raise ValueError("need n >= 1 and lo <= hi")
    return lo, hi, n


GRID = _argtype(_grid, "grid 'NxM'")
SPAN = _argtype(_span, "range 'lo:hi'")
SWEEP = _argtype(_sweep, "sweep 'lo:hi:n'")


def read_config(path):
    """Turn ``key = value`` lines into ``--key value`` tokens.

    Blank lines and ``#`` comments are skipped.  A bare ``key`` (or a value
    of ``true``) becomes a switch.  ``command = name`` selects the command.
    """
    command = None
    tokens = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = (s.strip() for s in line.partition("="))
            key = key.replace("_", "-")
            if not key:
                raise ValueError(f"{path}:{lineno}: missing key")
            if key == "command":
                command = value
            elif not sep or value.lower() == "true":
                tokens.append(f"--{key}")
            elif value.lower() != "false":
                tokens += [f"--{key}", value]
    return command, tokens


def _add_output(p):
    p.add_argument("--output", "-o", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_mode(p):
    p.add_argument(
        "--constraint",
        choices=("omega", "abs-omega", "variance"),
        default="omega",
        help="which quantity is held fixed",
    )
    p.add_argument("--omega", type=COMPLEX, default=1 + 0j, help="gap 're,im'")
    p.add_argument("--delta-e", type=REAL, default=1.0, help="energy variance (variance mode)")
    p.add_argument("--chi", type=COMPLEX, required=True, help="target polar angle 're,im'")
    p.add_argument("--gamma", type=COMPLEX, default=0j, help="target azimuth 're,im'")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nhbrach",
        description="Time-optimal evolution of non-Hermitian two-level systems.",
    )
    parser.add_argument("--config", help="key=value file mirroring the flags")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("tau", help="evolution time at one complex theta")
    _add_mode(p)
    p.add_argument("--theta", type=COMPLEX, required=True)
    _add_output(p)

    p = sub.add_parser("landscape", help="|Psi| and arg Psi on a theta grid")
    _add_mode(p)
    p.add_argument("--grid", type=GRID, default=(200, 200), help="NxM cells (Re x Im)")
    p.add_argument("--re-range", type=SPAN, default=(0.0, np.pi))
    p.add_argument("--im-range", type=SPAN, default=(-3.0, 3.0))
    _add_output(p)

    p = sub.add_parser("critical", help="stationary points of tau(theta)")
    p.add_argument("--omega", type=COMPLEX, default=1 + 0j)
    p.add_argument("--chi", type=COMPLEX, required=True)
    _add_output(p)

    p = sub.add_parser("optimal-ham", help="time-optimal Hamiltonian for a target")
    p.add_argument("--omega", type=COMPLEX, default=1 + 0j)
    p.add_argument("--chi", type=COMPLEX, required=True)
    p.add_argument("--gamma", type=COMPLEX, default=0j)
    p.add_argument("--lambda0", type=COMPLEX, default=0j)
    _add_output(p)

    p = sub.add_parser("evolve", help="Bloch trajectory from (0, 0, 1)")
    p.add_argument("--lambda0", type=COMPLEX, default=0j)
    p.add_argument("--omega", type=COMPLEX, default=1 + 0j)
    p.add_argument("--theta", type=COMPLEX, default=complex(np.pi / 2))
    p.add_argument("--phi", type=COMPLEX, default=0j)
    p.add_argument("--t-end", type=REAL, required=True)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--integrate", action="store_true", help="use the ODE instead of the closed form")
    p.add_argument("--tol", type=REAL, default=1e-10, help="ODE tolerance")
    _add_output(p)

    p = sub.add_parser("pt-time", help="transfer time on the real-spectrum branch")
    p.add_argument("--omega", type=REAL, default=1.0)
    p.add_argument("--eta", type=REAL, required=True)
    p.add_argument("--chi", type=REAL, required=True)
    _add_output(p)

    p = sub.add_parser("pt-length", help="hyperboloid path length, quadrature and closed form")
    p.add_argument("--omega", type=REAL, default=1.0)
    p.add_argument("--eta", type=REAL, required=True)
    p.add_argument("--chi", type=REAL, required=True)
    p.add_argument("--samples", type=int, default=4096)
    _add_output(p)

    p = sub.add_parser("bounds", help="time and length at fixed Omega cosh(eta)")
    p.add_argument("--omega-bar", type=REAL, required=True)
    p.add_argument("--chi", type=REAL, required=True)
    p.add_argument("--omega-grid", type=SWEEP, default=(0.01, 1.0, 100))
    _add_output(p)

    sub.add_parser("verify", help="run the acceptance suite")
    return parser


def _mode(args):
    if args.constraint == "variance":
        return ConstraintMode.variance_fixed(args.delta_e)
    if args.constraint == "abs-omega":
        return ConstraintMode.abs_omega_fixed(args.omega)
    return ConstraintMode.omega_fixed(args.omega)


def cmd_tau(args):
    res = evolution_time(_mode(args), args.theta, TargetSpec(args.chi, args.gamma))
    row = {
        "theta": args.theta,
        "tau": res.tau,
        "psi": res.psi,
        "arg_psi": res.reality_residual,
        "admissible": res.admissible,
        "branch_point": res.branch_point,
    }
    if res.required_arg_omega is not None:
        row["required_arg_omega"] = res.required_arg_omega
    return [row]


def cmd_landscape(args):
    (n_re, n_im) = args.grid
    grid = landscape(
        _mode(args),
        TargetSpec(args.chi, args.gamma),
        cell_centers(*args.re_range, n_re),
        cell_centers(*args.im_range, n_im),
    )
    return landscape_rows(grid)


def cmd_critical(args):
    return [
        {
            "kind": cp.kind.value,
            "theta": cp.theta,
            "tau": cp.tau,
            "admissible": cp.admissible,
            "limit": cp.limit,
        }
        for cp in critical_points(args.omega, args.chi)
    ]


def cmd_optimal_ham(args):
    target = TargetSpec(args.chi, args.gamma)
    h = optimal_hamiltonian(UP, spinors_from_target(target), args.omega, args.lambda0)
    return [{"row": i + 1, "col": j + 1, "value": complex(h[i, j])} for i in range(2) for j in range(2)]


def cmd_evolve(args):
    params = HamiltonianParams(args.lambda0, args.omega, args.theta, args.phi)
    if args.samples < 2:
        raise ValueError("need at least 2 samples")
    if args.integrate:
        traj = integrate_bloch(params, args.t_end, tol=args.tol, n_samples=args.samples)
        times, n = traj.times, traj.n
    else:
        times = np.linspace(0.0, args.t_end, args.samples)
        n = propagate_closed(params, times)
    norm = np.sum(n * n, axis=-1)
    drift = float(np.max(np.abs(norm - 1)))
    if drift > 1e-8:
        raise NumericalFailure(f"sphere constraint n.n = 1 violated by {drift:.3e}")
    return [{"t": t, "n1": v[0], "n2": v[1], "n3": v[2]} for t, v in zip(times, n)]


def cmd_pt_time(args):
    sc = PTScenario(args.omega, args.eta, args.chi)
    tau = pt_evolution_time(sc)
    if tau > sc.chi / sc.omega + 1e-12:
        raise NumericalFailure(f"geodesic upper bound tau <= chi/Omega violated: tau={tau!r}")
    return [{"omega": sc.omega, "eta": sc.eta, "chi": sc.chi, "tau": tau, "tau_geodesic": sc.chi / sc.omega}]


def cmd_pt_length(args):
    sc = PTScenario(args.omega, args.eta, args.chi)
    quad = path_length(mapped_path(sc, n_samples=args.samples))
    closed = closed_form_length(sc.chi, sc.eta)
    if abs(quad - closed) > 1e-6:
        raise NumericalFailure(f"path length quadrature disagrees with closed form by {abs(quad - closed):.3e}")
    return [{"eta": sc.eta, "chi": sc.chi, "length": quad, "closed_form": closed,
             "lower": 2 * np.sin(sc.chi / 2), "upper": sc.chi}]


def cmd_bounds(args):
    lo_om, hi_om, n = args.omega_grid
    w, chi = args.omega_bar, args.chi
    lo, hi = 2 / w * np.sin(chi / 2), chi / w
    rows = []
    for om in np.linspace(lo_om, hi_om, n):
        tau, length = omega_constrained_bounds(w, chi, om)
        within = lo - BOUND_TOL <= tau <= hi + BOUND_TOL
        rows.append({"omega": om, "tau": tau, "length": length, "tau_lower": lo, "tau_upper": hi, "within": within})
    bad = [r["omega"] for r in rows if not r["within"]]
    if bad:
        raise NumericalFailure(f"time bounds (2/w) sin(chi/2) <= tau <= chi/w violated at Omega={bad[0]!r}")
    return rows


COMMANDS = {
    "tau": cmd_tau,
    "landscape": cmd_landscape,
    "critical": cmd_critical,
    "optimal-ham": cmd_optimal_ham,
    "evolve": cmd_evolve,
    "pt-time": cmd_pt_time,
    "pt-length": cmd_pt_length,
    "bounds": cmd_bounds,
}


def _output_path(path):
    base = os.environ.get(OUTPUT_ENV)
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    return path


def _emit(rows, args, stdout):
    text = to_json(rows) if args.format == "json" else rows_to_csv(rows)
    if args.output:
        path = _output_path(args.output)
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


_SWITCHES = {"-h", "--help", "--integrate"}
_NEGATIVE = re.compile(r"-(\d|\.\d|pi)", re.IGNORECASE)


def _attach_negative_values(argv):
    """Write ``--opt -1:1`` as ``--opt=-1:1``; argparse would read ``-1:1``
    as an option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (
            tok.startswith("-") and "=" not in tok and tok not in _SWITCHES
            and i + 1 < len(argv) and _NEGATIVE.match(argv[i + 1])
        ):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _expand_config(argv, parser):
    """Splice config-file tokens in after the command name."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if known.config is None:
        return argv
    try:
        command, tokens = read_config(known.config)
    except (OSError, ValueError) as exc:
        parser.error(f"cannot read config: {exc}")
    if rest and not rest[0].startswith("-"):
        return [rest[0], *tokens, *rest[1:]]
    if command is None:
        parser.error("config file has no 'command' and none was given")
    return [command, *tokens, *rest]


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(_attach_negative_values(_expand_config(argv, parser)))
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command == "verify":
        results = _verify.run_all(echo=lambda line: print(line, file=stdout))
        failed = [r.name for r in results if not r.passed]
        if failed:
            print(f"failed invariants: {', '.join(failed)}", file=stderr)
            return 1
        return 0

    try:
        rows = COMMANDS[args.command](args)
    except NumericalFailure as exc:
        print(f"nhbrach: numerical failure: {exc}", file=stderr)
        return 1
    except (ExceptionalPointError, NotOnBranchError, IntegrationError) as exc:
        print(f"nhbrach: numerical failure: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    except ValueError as exc:
        print(f"nhbrach: invalid parameters: {exc}", file=stderr)
        return 2
    _emit(rows, args, stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
