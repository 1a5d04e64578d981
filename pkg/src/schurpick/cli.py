"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 unsolvable problem,
3 numerical failure.  Output is deterministic JSON on stdout or ``--out``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from typing import Optional, Sequence

import numpy as np

from ._linalg import TOL_PSD, TOL_RANK, circle_points
from .analyze import RadialSchedule, boundary_limit_d, classify_equality, gap
from .exceptions import InterpolationError, PoleAtPoint, UniqueSolutionWarning
from .jsonio import dumps, rational_from_json, rational_to_json
from .parametrize import SchurParameter, coefficient_matrix_rational, singular_solution, solve
from .pickdata import ProblemData, build_pick_system
from .ratfun import rat_taylor
from .solvability import assess

__all__ = ["main", "run", "EXIT_OK", "EXIT_USAGE", "EXIT_UNSOLVABLE", "EXIT_NUMERICAL"]

EXIT_OK, EXIT_USAGE, EXIT_UNSOLVABLE, EXIT_NUMERICAL = 0, 1, 2, 3
JET_RTOL = 1e-6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; that code is taken
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("problem", help="problem JSON file")
    common.add_argument("--tol-psd", type=float, default=TOL_PSD)
    common.add_argument("--tol-rank", type=float, default=TOL_RANK)
    common.add_argument("--grid", type=int, default=512, help="circle samples for validation (default 512)")
    common.add_argument("--radial-steps", type=int, default=None, help="log-spaced radial samples from 1e-1 to 1e-8")
    common.add_argument("--out", default=None, help="write JSON here instead of stdout")

    p = _Parser(prog="schurpick", description="Boundary interpolation by Schur-class functions.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("check", parents=[common], help="solvability report")
    sub.add_parser("coeffs", parents=[common], help="coefficient matrix, or the unique solution")
    sp = sub.add_parser("solve", parents=[common], help="solution for one parameter")
    sp.add_argument("--param", required=True, help="const:<re>,<im> | blaschke:<re>,<im>;...@<phase> | file:<path>")
    sp = sub.add_parser("verify", parents=[common], help="check a candidate function against the data")
    sp.add_argument("--w", required=True, help="rational function JSON file")
    sp = sub.add_parser("gap", parents=[common], help="gap at one node, two ways")
    sp.add_argument("--param", required=True)
    sp.add_argument("--node", type=int, required=True, help="zero-based node index")
    return p


def _schedule(args) -> Optional[RadialSchedule]:
    if args.radial_steps is None:
        return None
    return RadialSchedule.geometric(args.radial_steps)


def _limit(est) -> dict:
    return {"value": est.value, "converged": est.converged, "error": est.error}


def _cmd_check(args, data):
    rep = assess(data, args.tol_psd, args.tol_rank)
    return rep.to_dict(), EXIT_OK if rep.solvable else EXIT_UNSOLVABLE


def _solvable_system(args, data):
    rep = assess(data, args.tol_psd, args.tol_rank)
    if not rep.solvable:
        return None, ({"error": "problem is not solvable", "report": rep.to_dict()}, EXIT_UNSOLVABLE)
    return build_pick_system(data, tol_rank=args.tol_rank), None


def _cmd_coeffs(args, data):
    sys_, fail = _solvable_system(args, data)
    if fail:
        return fail
    if sys_.singular:
        w = singular_solution(sys_)
        return {"singular": True, "rank": sys_.rank, "w": rational_to_json(w)}, EXIT_OK
    S = coefficient_matrix_rational(sys_)
    St = S(circle_points(args.grid))
    defect = np.abs(np.conj(np.swapaxes(St, -1, -2)) @ St - np.eye(2)).max()
    out = {"singular": False, "rank": sys_.rank, "alpha": sys_.alpha, "beta": sys_.beta}
    out.update(S.to_json())
    out["inner_defect"] = float(defect)
    return out, EXIT_OK


def _cmd_solve(args, data):
    param = args.param_obj
    sys_, fail = _solvable_system(args, data)
    if fail:
        return fail
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", UniqueSolutionWarning)
        w = solve(sys_, param)
    out = rational_to_json(w)
    if caught:
        out["note"] = str(caught[0].message)
    return out, EXIT_OK


def _cmd_verify(args, data):
    w = args.w_obj
    try:
        sup = float(np.abs(w(circle_points(args.grid))).max())
    except PoleAtPoint:
        sup = math.inf
    nodes = []
    for i, nd in enumerate(data.nodes):
        entry = {"node": i}
        try:
            jet = np.asarray(rat_taylor(w, nd.t, 2 * nd.n + 1))
        except PoleAtPoint:
            entry.update(match=False, jet_error=math.inf, d=None, gap=None)
            nodes.append(entry)
            continue
        c = np.asarray(nd.c[: 2 * nd.n + 1])
        err = float((np.abs(jet[: len(c)] - c) / np.maximum(1.0, np.abs(c))).max())
        est = boundary_limit_d(w, nd.t, nd.n, _schedule(args))
        g = -math.inf if est.diverged else nd.gamma - est.value
        entry.update(match=err <= JET_RTOL, jet_error=err, d=_limit(est), gap=g)
        nodes.append(entry)
    ok = sup <= 1 + 1e-8 and all(e["match"] and e["gap"] is not None and e["gap"] >= -1e-8 for e in nodes)
    return {"solution": bool(ok), "sup_on_circle": sup, "nodes": nodes}, EXIT_OK


def _cmd_gap(args, data):
    param = args.param_obj
    sys_, fail = _solvable_system(args, data)
    if fail:
        return fail
    nd = data.nodes[args.node]
    sched = _schedule(args)
    if sys_.singular:
        # unique solution: no coefficient matrix, hence no closed form
        est = boundary_limit_d(singular_solution(sys_), nd.t, nd.n, sched)
        direct = _limit(est)
        direct["value"] = -math.inf if est.diverged else nd.gamma - est.value
        return {"node": args.node, "singular": True, "direct": direct, "formula": None, "equality": None}, EXIT_OK
    S = coefficient_matrix_rational(sys_)
    direct, formula = gap(sys_, S, param, args.node, sched)
    out = {
        "node": args.node,
        "singular": False,
        "direct": _limit(direct),
        "formula": formula,
        "equality": classify_equality(param, S, args.node),
    }
    return out, EXIT_OK


def _read_inputs(args) -> ProblemData:
    """Load every input file and parse every option; failures here are exit 1."""
    data = ProblemData.load(args.problem)
    if getattr(args, "param", None) is not None:
        args.param_obj = SchurParameter.parse(args.param)
    if getattr(args, "w", None) is not None:
        with open(args.w, encoding="utf-8") as fh:
            try:
                args.w_obj = rational_from_json(json.load(fh))
            except ValueError as exc:
                raise UsageError(f"bad function file {args.w}: {exc}") from exc
    if getattr(args, "node", None) is not None and not 0 <= args.node < len(data.nodes):
        raise UsageError(f"node index {args.node} out of range 0..{len(data.nodes) - 1}")
    if args.grid < 1:
        raise UsageError("--grid must be positive")
    if args.radial_steps is not None and args.radial_steps < 2:
        raise UsageError("--radial-steps must be at least 2")
    return data


_COMMANDS = {"check": _cmd_check, "coeffs": _cmd_coeffs, "solve": _cmd_solve, "verify": _cmd_verify, "gap": _cmd_gap}


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, dispatch, write the JSON result and return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = _parser().parse_args(argv)
        data = _read_inputs(args)
    except UsageError as exc:
        print(f"schurpick: {exc}", file=stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        # JSONDecodeError and InterpolationError are ValueErrors
        print(f"schurpick: bad input: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_USAGE
    try:
        out, code = _COMMANDS[args.command](args, data)
    except (InterpolationError, ArithmeticError, np.linalg.LinAlgError) as exc:
        # inputs were valid, so anything raised here is the numerics giving up
        print(f"schurpick: numerical failure: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERICAL
    text = dumps(out) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"schurpick: cannot write output: {exc}", file=stderr)
            return EXIT_USAGE
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
