"""Command-line front end: single-point solves and the sweep tables.

Every command writes one table (CSV or JSON) with a metadata block. Exit
codes: 0 success, 2 infeasible configuration, 3 numerical failure, 4 bad
arguments.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import (CapacityError, ConvergenceError, InvalidParametersError,
                     NoSolutionError, SingularConfigurationError, TruncationError)
from .imperfections import (averaged_metrics, detector_fidelity_fock,
                            detector_fidelity_quadrature, fidelity_surface)
from .numerics import DEFAULT_QUAD, QuadConfig
from .protocol import (BUDGET_DB, energy_cost, entangler_to_tmeg,
                       optimal_entangler, required_squeezing, solve_inputs,
                       squeezing_to_db, within_budget)
from .states import SFTarget, heralded_fidelity

EXIT_OK, EXIT_INFEASIBLE, EXIT_NUMERICAL, EXIT_USAGE = 0, 2, 3, 4
MIN_QUAD_ORDER = 16


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else f"{float(v):.12g}"
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return None if math.isnan(v) else float(f"{float(v):.12g}")
    return v


def render(table, fmt):
    """Serialize ``table``; output depends only on its contents."""
    if fmt == "json":
        doc = {"metadata": {k: _json_value(v) for k, v in table.meta.items()},
               "columns": list(table.columns),
               "data": {c: [_json_value(r[i]) for r in table.rows]
                        for i, c in enumerate(table.columns)}}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    for k, v in table.meta.items():
        buf.write(f"# {k}={_fmt(v)}\n")
    buf.write(",".join(table.columns) + "\n")
    for r in table.rows:
        buf.write(",".join(_fmt(v) for v in r) + "\n")
    return buf.getvalue()


def parse_values(text, cast=float):
    """``"a,b,c"`` or ``"lo:hi:count"`` (inclusive, evenly spaced)."""
    try:
        if ":" in text:
            lo, hi, count = text.split(":")
            count = int(count)
            if count < 1:
                raise UsageError(f"sweep count must be >= 1 in {text!r}")
            lo, hi = float(lo), float(hi)
            vals = [lo] if count == 1 else list(np.linspace(lo, hi, count))
            return [cast(v) for v in vals]
        vals = [cast(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}") from exc
    if not vals or not all(math.isfinite(v) for v in vals):
        raise UsageError(f"values must be finite: {text!r}")
    return vals


def parse_grid(text):
    """``r1:lo:hi:count,r2:lo:hi:count`` into two arrays."""
    axes = {}
    for part in text.split(","):
        bits = part.split(":")
        if len(bits) != 4 or bits[0] not in ("r1", "r2"):
            raise UsageError(f"bad grid axis {part!r}; expected r1:lo:hi:count")
        axes[bits[0]] = np.array(parse_values(":".join(bits[1:])))
    if set(axes) != {"r1", "r2"}:
        raise UsageError("grid needs both r1 and r2 axes")
    return axes["r1"], axes["r2"]


def _kinds(kind):
    return ["bs", "cz"] if kind == "both" else [kind]


def _targets(args):
    return [SFTarget(n, R) for n in parse_values(args.n, int) for R in parse_values(args.R)]


def _quad(args):
    if args.quad_order is None:
        return DEFAULT_QUAD
    if args.quad_order < MIN_QUAD_ORDER:
        raise UsageError(f"--quad-order must be at least {MIN_QUAD_ORDER}")
    return QuadConfig.from_order(args.quad_order)


def _base_meta(args, quad, **extra):
    meta = {"command": args.command, "quad_order": quad.order_1d,
            "quad_order_nd": quad.order_nd, "quad_order_loss": quad.order_loss,
            "n_max": args.nmax, "version": __version__}
    meta.update(extra)
    return meta


def cmd_solve(args, quad):
    """Optimal entangler, inputs, residuals, probability, energy and squeezing per target."""
    table = Table(["n", "R", "kind", "param", "r1", "r2", "residual_1", "residual_2",
                   "probability", "fidelity", "energy", "max_db", "within_budget"],
                  meta=_base_meta(args, quad, budget_db=args.budget_db))
    for target in _targets(args):
        for kind in _kinds(args.kind):
            e, prob = optimal_entangler(target, kind, quad)
            sol = solve_inputs(e, target)
            _, fid = heralded_fidelity(entangler_to_tmeg(e, sol.r1, sol.r2), target, quad)
            db = min(squeezing_to_db(r) for r in required_squeezing(e, sol))
            ok = within_budget(db, args.budget_db)
            if not ok:
                print(f"warning: {kind} n={target.n} R={target.R} needs {db:.3f} dB, "
                      f"exceeds budget {args.budget_db} dB", file=sys.stderr)
            table.rows.append([target.n, target.R, kind, e.param, sol.r1, sol.r2,
                               abs(sol.residuals.first), abs(sol.residuals.second),
                               prob, fid, energy_cost(e, sol), db, ok])
    return table


def cmd_energy(args, quad):
    """Energy cost at the optimal entangler."""
    table = Table(["n", "R", "kind", "param", "energy"], meta=_base_meta(args, quad))
    for target in _targets(args):
        for kind in _kinds(args.kind):
            e, _ = optimal_entangler(target, kind, quad)
            table.rows.append([target.n, target.R, kind, e.param, energy_cost(e, solve_inputs(e, target))])
    return table


def cmd_budget(args, quad):
    """Most demanding squeezing at the optimal entangler against the budget."""
    table = Table(["n", "R", "kind", "param", "max_db", "budget_db", "within_budget"],
                  meta=_base_meta(args, quad))
    for target in _targets(args):
        for kind in _kinds(args.kind):
            e, _ = optimal_entangler(target, kind, quad)
            sol = solve_inputs(e, target)
            db = min(squeezing_to_db(r) for r in required_squeezing(e, sol))
            table.rows.append([target.n, target.R, kind, e.param, db, args.budget_db,
                               within_budget(db, args.budget_db)])
    return table


def cmd_loss(args, quad):
    """Loss-averaged probability and fidelity deficits versus ``mu``."""
    table = Table(["n", "R", "mu", "kind", "p_opt", "p_avg", "p_deficit", "p_deficit_rel",
                   "f_avg", "f_deficit"],
                  meta=_base_meta(args, quad, note="f_avg>=0.999 for cz is an interpreted bound"))
    mus = parse_values(args.mu)
    for target in _targets(args):
        for kind in _kinds(args.kind):
            e, _ = optimal_entangler(target, kind, quad)
            for mu in mus:
                m = averaged_metrics(kind, target, mu, quad, entangler=e)
                table.rows.append([target.n, target.R, mu, kind, m.p_opt, m.p_avg, m.p_deficit,
                                   m.p_deficit_rel, m.f_avg, m.f_deficit])
    return table


def cmd_surface(args, quad):
    """Fidelity over an ``r1 x r2`` grid; plateau fractions go in the metadata."""
    table = Table(["n", "R", "kind", "r1", "r2", "probability", "fidelity"], meta=_base_meta(args, quad))
    for target in _targets(args):
        for kind in _kinds(args.kind):
            e, _ = optimal_entangler(target, kind, quad)
            sol = solve_inputs(e, target)
            g1, g2 = parse_grid(args.grid)
            surf = fidelity_surface(kind, target, g1, g2, quad, entangler=e)
            at_opt = fidelity_surface(kind, target, [sol.r1], [sol.r2], quad, entangler=e)
            tag = f"{kind}_n{target.n}_R{_fmt(target.R)}"
            table.meta[f"plateau_fraction_{tag}"] = surf.plateau_fraction
            table.meta[f"optimum_{tag}"] = f"r1={_fmt(sol.r1)};r2={_fmt(sol.r2)};F={_fmt(at_opt.fidelity[0, 0])}"
            for i, r1 in enumerate(surf.r1):
                for j, r2 in enumerate(surf.r2):
                    table.rows.append([target.n, target.R, kind, r1, r2,
                                       surf.probability[i, j], surf.fidelity[i, j]])
    return table


def cmd_detector(args, quad):
    """Detector-efficiency fidelity from both models and their difference."""
    table = Table(["eta", "kind", "n", "R", "F_quadrature", "F_fock", "abs_diff"],
                  meta=_base_meta(args, quad))
    etas = parse_values(args.eta)
    for target in _targets(args):
        for kind in _kinds(args.kind):
            e, _ = optimal_entangler(target, kind, quad)
            sol = solve_inputs(e, target)
            p = entangler_to_tmeg(e, sol.r1, sol.r2)
            for eta in etas:
                fq = detector_fidelity_quadrature(p, target, eta, quad)
                ff = detector_fidelity_fock(p, target, eta, args.nmax, quad)
                table.rows.append([eta, kind, target.n, target.R, fq, ff, abs(fq - ff)])
    return table


COMMANDS = {
    "solve": (cmd_solve, "1", "1"),
    "energy": (cmd_energy, "1,2,3", "0.25,0.5,0.75,1"),
    "budget": (cmd_budget, "1,2,3", "0.25:1.5:6"),
    "loss": (cmd_loss, "1", "1"),
    "surface": (cmd_surface, "1", "1"),
    "detector": (cmd_detector, "1,2", "0.5"),
}


def build_parser():
    parser = _Parser(prog="sqfock", description="Heralded squeezed Fock state generation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (func, n_default, r_default) in COMMANDS.items():
        p = sub.add_parser(name, help=func.__doc__.splitlines()[0])
        p.add_argument("--n", default=n_default, help="photon numbers: list a,b or lo:hi:count")
        p.add_argument("--R", default=r_default, help="target squeezing: list or lo:hi:count")
        p.add_argument("--kind", choices=["bs", "cz", "both"], default="both")
        p.add_argument("--quad-order", type=int, default=None,
                       help=f"1-D quadrature order (default {DEFAULT_QUAD.order_1d}); others scale with it")
        p.add_argument("--nmax", type=int, default=100, help="Fock truncation for the thinning model")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--budget-db", type=float, default=BUDGET_DB)
        if name == "loss":
            p.add_argument("--mu", default="0,0.02,0.04,0.06,0.08,0.1")
        if name == "detector":
            p.add_argument("--eta", default="0.8,0.85,0.9,0.95,1")
        if name == "surface":
            p.add_argument("--grid", default="r1:-3:3:61,r2:-3:3:61",
                           help="r1:lo:hi:count,r2:lo:hi:count (one window for every kind)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        quad = _quad(args)
        table = COMMANDS[args.command][0](args, quad)
    except (UsageError, CapacityError, InvalidParametersError) as exc:
        print(f"sqfock: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoSolutionError, SingularConfigurationError) as exc:
        print(f"sqfock: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConvergenceError, TruncationError) as exc:
        print(f"sqfock: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = render(table, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
