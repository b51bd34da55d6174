"""Command-line interface.

Indices in every JSON document are 1-based. Floats are written with 17
significant digits so documents round-trip exactly. Exit codes: 0 success,
1 usage or input error, 2 numerical failure, 3 check failed.
"""
import argparse
import csv
import json
import math
import sys

import numpy as np

from . import __version__
from .errors import (CapabilityError, ConvergenceError, CyclingError, InputError, LassoKitError,
                     RangeError, UnsupportedError)
from .instances import KINDS, generate
from .kkt import EquiState, ProblemInstance, check_kkt
from .larspath import DECREASING, Event, LassoPath, PathKnot, lars_path
from .polytope import (active_subspace_check, coefficient_bounds, enumerate_active_sets,
                       solution_polytope)
from .solvers import LossSpec, solve

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# serialization

def fmt_float(x):
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dumps(obj):
    """JSON with floats at 17 significant digits."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    return json.dumps(obj)


def _one_based(idx):
    return [int(i) + 1 for i in idx]


def _emit(doc, out):
    doc = {"version": __version__, **doc}
    text = dumps(doc) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# input

def _read_csv(path):
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: cannot open ({exc.strerror})")
    rows = []
    with fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                raise UsageError(f"{path}:{lineno}: non-numeric entry in {row!r}")
            if rows and len(rows[-1]) != len(rows[0]):
                raise UsageError(f"{path}:{lineno}: expected {len(rows[0])} columns, "
                                 f"got {len(rows[-1])}")
    if not rows:
        raise UsageError(f"{path}: no data")
    return np.array(rows)


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"{path}: cannot open ({exc.strerror})")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}: malformed JSON ({exc.msg})")


def _read_vector(path):
    """A vector from CSV (one value per line) or JSON (list or {"solution": [...]})."""
    with open(path, encoding="utf-8") as fh:
        head = fh.read(1)
    if head in ("[", "{"):
        doc = _read_json(path)
        if isinstance(doc, dict):
            doc = doc.get("solution", doc.get("beta"))
        try:
            return np.array(doc, dtype=float).reshape(-1)
        except (TypeError, ValueError):
            raise UsageError(f"{path}: expected a numeric list")
    M = _read_csv(path)
    if M.shape[1] != 1:
        raise UsageError(f"{path}: expected one value per line, got {M.shape[1]} columns")
    return M[:, 0]


def load_instance(args, need_lambda=False):
    lam = None
    if args.instance:
        doc = _read_json(args.instance)
        if not isinstance(doc, dict) or "X" not in doc or "y" not in doc:
            raise UsageError(f"{args.instance}: expected an object with keys X and y")
        try:
            X = np.array(doc["X"], dtype=float)
            y = np.array(doc["y"], dtype=float)
        except (TypeError, ValueError):
            raise UsageError(f"{args.instance}: X and y must be numeric and rectangular")
        if X.ndim != 2:
            raise UsageError(f"{args.instance}: X must be a list of rows")
        lam = doc.get("lambda")
    elif args.x and args.y:
        X = _read_csv(args.x)
        y = _read_vector(args.y)
    else:
        raise UsageError("give --instance FILE or both --x FILE and --y FILE")
    if getattr(args, "lam", None) is not None:
        lam = args.lam
    if need_lambda and lam is None:
        raise UsageError("lambda is required (--lambda or a \"lambda\" entry in the instance)")
    try:
        return ProblemInstance(X, y, 0.0 if lam is None else float(lam))
    except InputError as exc:
        raise UsageError(str(exc))


# ---------------------------------------------------------------------------
# path documents

def path_document(path):
    knots = []
    for k in path.knots:
        ev = k.event
        knots.append({
            "lambda": k.lambda_k,
            "event": {"type": ev.type, "index": ev.index + 1 if ev.index >= 0 else None,
                      "sign": ev.sign},
            "E": _one_based(k.equi_state.members),
            "s": list(k.equi_state.signs),
            "Z": _one_based(k.zero_set),
            "beta_E_c": list(k.c),
            "beta_E_d": list(k.d),
        })
    return {"p": path.p, "direction": path.direction, "knots": knots,
            "terminal_lambda": path.terminal_lambda}


def path_from_document(doc):
    """Rebuild a LassoPath from the output of the path command."""
    knots = []
    for k in doc["knots"]:
        ev = k["event"]
        E = [i - 1 for i in k["E"]]
        lam = float(k["lambda"])
        knots.append(PathKnot(lam, EquiState(E, k["s"], lam),
                              np.array(k["beta_E_c"], dtype=float),
                              np.array(k["beta_E_d"], dtype=float),
                              Event(ev["type"], ev["index"] - 1 if ev["index"] else -1, ev["sign"]),
                              tuple(i - 1 for i in k.get("Z", []))))
    return LassoPath(tuple(knots), float(doc["terminal_lambda"]), int(doc["p"]),
                     doc.get("direction", DECREASING))


# ---------------------------------------------------------------------------
# commands

def cmd_gen(args):
    X, y = generate(args.kind, args.n, args.p, args.seed)
    if args.x_out or args.y_out:
        if not (args.x_out and args.y_out):
            raise UsageError("--x-out and --y-out must be given together")
        with open(args.x_out, "w", encoding="utf-8") as fh:
            for row in X:
                fh.write(",".join(fmt_float(v) for v in row) + "\n")
        with open(args.y_out, "w", encoding="utf-8") as fh:
            for v in y:
                fh.write(fmt_float(v) + "\n")
        return EXIT_OK
    doc = {"kind": args.kind, "seed": args.seed, "X": X, "y": y}
    if args.lam is not None:
        doc["lambda"] = args.lam
    _emit(doc, args.out)
    return EXIT_OK


def cmd_path(args):
    inst = load_instance(args)
    path = lars_path(inst.X, inst.y, args.lambda_min)
    _emit(path_document(path), args.out)
    return EXIT_OK


def cmd_bounds(args):
    inst = load_instance(args, need_lambda=True)
    spec = solution_polytope(inst)
    rep = coefficient_bounds(spec)
    rows = [{"i": i + 1, "lower": lo, "lars": lv, "upper": up, "class": cl}
            for i, lo, lv, up, cl in zip(rep.members, rep.lower, rep.lars_value, rep.upper,
                                         rep.classification)]
    _emit({"lambda": inst.lam, "E": _one_based(rep.members), "s": list(rep.signs),
           "l1_norm": rep.shared_l1_norm, "rows": rows}, args.out)
    return EXIT_OK


def cmd_enumerate(args):
    inst = load_instance(args, need_lambda=True)
    spec = solution_polytope(inst)
    sets = enumerate_active_sets(spec, cap=args.cap)
    dist = active_subspace_check(inst, sets)
    _emit({"lambda": inst.lam, "active_sets": [_one_based(a) for a in sets],
           "max_projector_distance": dist, "subspace_equivalent": dist <= 1e-8}, args.out)
    return EXIT_OK


def cmd_check(args):
    inst = load_instance(args, need_lambda=True)
    beta = _read_vector(args.beta)
    if beta.shape[0] != inst.p:
        raise UsageError(f"{args.beta}: beta has length {beta.shape[0]}, expected {inst.p}")
    rep = check_kkt(inst, beta, tol=args.tol)
    _emit({"lambda": inst.lam, "stationarity_gap": rep.stationarity_gap,
           "sign_violation": rep.sign_violation, "passed": rep.passed, "tol": rep.tol,
           "E": _one_based(rep.equi_state.members), "s": list(rep.equi_state.signs),
           "support": _one_based(rep.support)}, args.out)
    return EXIT_OK if rep.passed else EXIT_CHECK


def cmd_solve(args):
    inst = load_instance(args, need_lambda=True)
    if args.method == "en" and args.lambda2 is None:
        raise UsageError("method en requires --lambda2")
    if args.method == "proxgrad" and args.loss is None:
        raise UsageError("method proxgrad requires --loss")
    loss = None
    if args.loss is not None:
        loss = LossSpec(args.loss, inst.y, allow_any_response=args.allow_any_response)
    cert = solve(inst, method=args.method, loss=loss, lambda2=args.lambda2, tol=args.tol)
    _emit({"method": cert.method, "lambda": inst.lam, "solution": cert.solution,
           "kkt_gap": cert.kkt_gap, "duality_gap": cert.duality_gap,
           "iterations": cert.iterations}, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _instance_args(sp, with_lambda=True):
    sp.add_argument("--instance", help="JSON problem document {\"X\", \"y\", \"lambda\"}")
    sp.add_argument("--x", help="design matrix CSV (no header)")
    sp.add_argument("--y", help="response CSV, one value per line")
    if with_lambda:
        sp.add_argument("--lambda", dest="lam", type=float, help="penalty (overrides the document)")
    sp.add_argument("--out", help="write the JSON report here instead of stdout")


def build_parser():
    ap = _Parser(prog="lassokit", description="Lasso paths, solution sets and oracles.")
    ap.add_argument("--version", action="version", version=f"lassokit {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("gen", help="generate a seeded instance")
    g.add_argument("--kind", required=True, choices=KINDS)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--out")
    g.add_argument("--x-out")
    g.add_argument("--y-out")
    g.set_defaults(func=cmd_gen)

    pth = sub.add_parser("path", help="full minimum-norm lasso path")
    _instance_args(pth, with_lambda=False)
    pth.add_argument("--lambda-min", type=float, default=0.0)
    pth.set_defaults(func=cmd_path)

    b = sub.add_parser("bounds", help="coefficient bounds over all solutions")
    _instance_args(b)
    b.set_defaults(func=cmd_bounds)

    e = sub.add_parser("enumerate", help="all active sets of solutions")
    _instance_args(e)
    e.add_argument("--cap", type=int, default=16)
    e.set_defaults(func=cmd_enumerate)

    c = sub.add_parser("check", help="KKT check of a coefficient vector")
    _instance_args(c)
    c.add_argument("--beta", required=True, help="coefficients, CSV one per line or JSON")
    c.add_argument("--tol", type=float, default=1e-8)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("solve", help="oracle solvers")
    _instance_args(s)
    s.add_argument("--method", choices=("cd", "en", "proxgrad"), default="cd")
    s.add_argument("--loss", choices=("squared", "logistic", "poisson"))
    s.add_argument("--lambda2", type=float)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--allow-any-response", action="store_true")
    s.set_defaults(func=cmd_solve)
    return ap


def _fail(code, kind, message, **extra):
    doc = {"error": kind, "message": message, "exit_code": code, **extra}
    sys.stderr.write(dumps(doc) + "\n")
    return code


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    except (InputError, RangeError) as exc:
        return _fail(EXIT_USAGE, "input", str(exc))
    except ConvergenceError as exc:
        return _fail(EXIT_NUMERIC, type(exc).__name__, str(exc), gap=exc.gap,
                     iterations=exc.iterations)
    except CyclingError as exc:
        return _fail(EXIT_NUMERIC, "CyclingError", str(exc), history_length=len(exc.history or ()))
    except (UnsupportedError, CapabilityError) as exc:
        return _fail(EXIT_NUMERIC, type(exc).__name__, str(exc))
    except LassoKitError as exc:
        return _fail(EXIT_NUMERIC, type(exc).__name__, str(exc))
    except OSError as exc:
        return _fail(EXIT_USAGE, "io", f"{exc.filename}: {exc.strerror}")


if __name__ == "__main__":
    sys.exit(main())
