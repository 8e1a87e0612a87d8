"""Batch command line: ``wittdisp <group> <command> [options]``.

Every invocation writes one JSON report into ``--out`` (default
``$WITTDISP_OUT`` or ``./wittdisp-runs``) and prints a one-line JSON summary
on stdout.  Exit codes: 0 all checks passed, 1 a mathematical check failed,
2 usage error, 3 a work budget ran out.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import random
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BudgetExceeded, WittDispError

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if hasattr(obj, "to_json"):
        return _jsonable(obj.to_json())
    return obj


def _dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=1)


# ---------------------------------------------------------------------------
# argument helpers


def _prime(text: str) -> int:
    from .exactalg import is_prime

    p = int(text)
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _ints(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _algebra(p: int, kind: str):
    from .exactalg import ZOO_KINDS, zoo_algebra

    try:
        return zoo_algebra(p, kind)
    except KeyError:
        raise UsageError(f"unknown algebra {kind!r}; choose from {', '.join(ZOO_KINDS)}")


def _check_dims(a):
    if not 0 <= a.dprime <= a.d:
        raise UsageError("need 0 <= dprime <= d")


def _datum(a):
    from .semidisplay import DisplayDatum, as_matrix

    _check_dims(a)
    if a.U is not None:
        try:
            U = as_matrix(json.loads(a.U), a.p**a.n)
        except (ValueError, TypeError):
            raise UsageError("--U must be JSON rows of integers, e.g. [[1,0],[0,1]]")
        if U.shape != (a.d, a.d):
            raise UsageError(f"--U must be a {a.d}x{a.d} matrix")
        return DisplayDatum(a.p, a.n, a.d, a.dprime, U)
    if a.matrix == "identity":
        return DisplayDatum.identity(a.p, a.n, a.d, a.dprime)
    if a.matrix == "antidiagonal":
        return DisplayDatum.antidiagonal(a.p, a.n, a.d, a.dprime)
    return DisplayDatum.random(a.seed, a.p, a.n, a.d, a.dprime)


def _algebras(a):
    from .exactalg import zoo

    if not a.algebras:
        return list(zoo(a.p).values())
    return [_algebra(a.p, k) for k in a.algebras.split(",")]


# ---------------------------------------------------------------------------
# commands; each returns (passed, config, results)


def cmd_witt_gen(a):
    from .wittcore import gen_witt_law, write_law_cache

    path = write_law_cache(a.p, a.n, Path(a.cache_dir) if a.cache_dir else None)
    law = gen_witt_law(a.p, a.n)
    ok = law.check_ghost_compatibility()
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    return ok, {"p": a.p, "n": a.n}, {"cache_file": str(path), "sha256": digest, "ghost_compatible": ok}


def cmd_witt_eval(a):
    from .wittcore import WittVec

    A = _algebra(a.p, a.algebra)
    for v in a.x + (a.y or []):
        if not 0 <= v < A.size:
            raise UsageError(f"algebra elements are integers in [0, {A.size})")
    x = WittVec(a.p, A, a.x)
    n = len(a.x)
    if a.op in ("add", "mul"):
        if a.y is None or len(a.y) != n:
            raise UsageError(f"--y must have {n} entries")
        y = WittVec(a.p, A, a.y)
        z = x + y if a.op == "add" else x * y
    elif a.op == "F":
        z = x.frobenius()
    elif a.op == "V":
        z = x.verschiebung()
    else:
        z = -x
    cfg = {"p": a.p, "algebra": A.name, "op": a.op, "x": a.x, "y": a.y}
    return True, cfg, {"entries": z.to_json(), "formatted": [A.format(e) for e in z.entries]}


def cmd_pair_check(a):
    from .wittcore import (HatWittElement, WittVec, cartier_pairing, pairing_teichmuller_expansion,
                           restricted_kernels)

    A = _algebra(a.p, a.algebra)
    if A.nil_index < 2:
        kernels = list(restricted_kernels(A, a.n, a.m))
        ok = kernels == [1, 1]
        return ok, {"p": a.p, "algebra": A.name, "n": a.n, "m": a.m},\
            {"kernels": kernels, "samples": 0, "failures": 0}
    rng = random.Random(a.seed)
    nil = A.nilpotents(a.p**a.n)
    failures = 0
    for _ in range(a.samples):
        x, x2 = (WittVec(a.p, A, [rng.randrange(A.size) for _ in range(a.n)]) for _ in range(2))
        y, y2 = (HatWittElement.from_entries(a.p, A, [rng.choice(nil) for _ in range(2)], a.n)
                 for _ in range(2))
        v = cartier_pairing(x, y)
        good = (v == pairing_teichmuller_expansion(x, y)
                and cartier_pairing(x + x2, y) == A.mul(v, cartier_pairing(x2, y))
                and cartier_pairing(x, y + y2) == A.mul(v, cartier_pairing(x, y2))
                and cartier_pairing(x.frobenius(), y) == cartier_pairing(x, y.verschiebung())
                and cartier_pairing(x.verschiebung(), y) == cartier_pairing(x, y.frobenius()))
        failures += not good
    kernels = list(restricted_kernels(A, a.n, a.m))
    ok = failures == 0 and kernels == [1, 1]
    cfg = {"p": a.p, "algebra": A.name, "n": a.n, "m": a.m, "seed": a.seed, "samples": a.samples}
    return ok, cfg, {"kernels": kernels, "samples": a.samples, "failures": failures}


def cmd_display_random(a):
    from .semidisplay import DisplayDatum, dual_display, semidisplay_of_display

    _check_dims(a)
    D = DisplayDatum.random(a.seed, a.p, a.n, a.d, a.dprime)
    S = semidisplay_of_display(D)
    axioms = S.check_axioms()
    ok = all(axioms.values()) and dual_display(dual_display(D)) == D
    cfg = {"p": a.p, "n": a.n, "d": a.d, "dprime": a.dprime, "seed": a.seed}
    return ok, cfg, {"datum": D, "semidisplay": S, "axioms": axioms, "hasse_block": D.hasse_block()}


def _lau_cfg(a):
    return {"p": a.p, "n": a.n, "d": a.d, "dprime": a.dprime, "matrix": a.matrix,
            "seed": a.seed, "U": a.U}


def cmd_lau_analyze(a):
    from .laupipe import analyze_lau, dual_is_etale, eliminate_to_g1, lau_dual_adjoint

    D = _datum(a)
    an = analyze_lau(D, _algebras(a))
    out = an.to_json()
    out["dual_etale"] = dual_is_etale(eliminate_to_g1(lau_dual_adjoint(D)))
    return an.passed, _lau_cfg(a), out


def cmd_lau_routes(a):
    from .laupipe import compare_routes

    D = _datum(a)
    routes = compare_routes(D, _algebras(a))
    return routes["agree"], _lau_cfg(a), {"datum": D, "routes": routes}


def cmd_lau_equivariance(a):
    from .laupipe import bp_sample, equivariance_check
    from .semidisplay import DisplayDatum

    _check_dims(a)
    rows = []
    for s in range(a.samples):
        D = DisplayDatum.random(a.seed + s, a.p, a.n, a.d, a.dprime)
        pair = bp_sample(a.seed + 800 + s, a.p, a.d, a.dprime, a.n)
        res = equivariance_check(D, pair, _algebras(a), a.direction)
        rows.append({"datum_seed": a.seed + s, "pair": pair, **res})
    ok = all(r["equivariant"] and r["member"] for r in rows)
    cfg = {"p": a.p, "n": a.n, "d": a.d, "dprime": a.dprime, "seed": a.seed, "samples": a.samples,
           "direction": a.direction}
    return ok, cfg, {"cases": rows}


def cmd_zink_coker(a):
    from .laupipe import zink_complex_truncated, zink_dual_grouplike_count
    from .semidisplay import Semidisplay, random_semidisplay, unit_semidisplay

    A = _algebra(a.p, a.algebra)
    if a.kind == "unit":
        S = unit_semidisplay(a.n, a.p)
    elif a.kind == "alpha":
        S = Semidisplay(a.p, a.n, 1, 1, [[0]])
    else:
        _check_dims(a)
        S = random_semidisplay(a.seed, a.p, a.n, a.d, a.dprime)
    res = zink_complex_truncated(S, A, a.M, budget=a.budget)
    dual = zink_dual_grouplike_count(S, A)
    ok = res.kernel_size == 1 and res.stabilized and res.coker_size == dual
    cfg = {"p": a.p, "n": a.n, "algebra": A.name, "kind": a.kind, "M": a.M, "seed": a.seed,
           "budget": a.budget}
    return ok, cfg, {"semidisplay": S, "complex": res, "dual_points": dual}


def cmd_suite_acceptance(a):
    from .acceptance import run_suite

    only = set(a.only) if a.only else None
    if only and not only <= set(range(1, 13)):
        raise UsageError("--only takes criterion numbers 1-12")

    def progress(res):
        print(res.line(), file=sys.stderr, flush=True)

    results = run_suite(a.profile, only, progress)
    ok = all(r.passed for r in results)
    cfg = {"profile": a.profile, "only": sorted(only) if only else None}
    timings = {str(r.number): round(r.seconds, 3) for r in results}
    body = {"criteria": [{k: v for k, v in r.to_json().items() if k != "seconds"} for r in results],
            "lines": [r.line().rsplit(" (", 1)[0] for r in results]}
    return ok, cfg, body, timings


COMMANDS = {
    ("witt", "gen"): cmd_witt_gen,
    ("witt", "eval"): cmd_witt_eval,
    ("pair", "check"): cmd_pair_check,
    ("display", "random"): cmd_display_random,
    ("lau", "analyze"): cmd_lau_analyze,
    ("lau", "routes"): cmd_lau_routes,
    ("lau", "equivariance"): cmd_lau_equivariance,
    ("zink", "coker"): cmd_zink_coker,
    ("suite", "acceptance"): cmd_suite_acceptance,
}


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="directory for the JSON report")
    common.add_argument("--cache-dir", default=None, help="Witt law cache (overrides WITTDISP_CACHE)")

    def field_args(sp, n_default=1):
        sp.add_argument("--p", type=_prime, default=2)
        sp.add_argument("--n", type=_positive, default=n_default)

    def dims(sp, d=2, k=1):
        sp.add_argument("--d", type=_positive, default=d)
        sp.add_argument("--dprime", type=int, default=k)

    parser = _Parser(prog="wittdisp", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"wittdisp {__version__}")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    witt = groups.add_parser("witt").add_subparsers(dest="command", required=True, parser_class=_Parser)
    sp = witt.add_parser("gen", parents=[common], help="generate and cache Witt structure polynomials")
    field_args(sp)
    sp = witt.add_parser("eval", parents=[common], help="evaluate one Witt operation")
    sp.add_argument("--p", type=_prime, default=2)
    sp.add_argument("--algebra", default="Fp")
    sp.add_argument("--op", choices=("add", "mul", "F", "V", "neg"), required=True)
    sp.add_argument("--x", type=_ints, required=True, help="components as algebra element codes")
    sp.add_argument("--y", type=_ints, default=None)

    pair = groups.add_parser("pair").add_subparsers(dest="command", required=True, parser_class=_Parser)
    sp = pair.add_parser("check", parents=[common], help="pairing laws and restricted nondegeneracy")
    field_args(sp)
    sp.add_argument("--m", type=_positive, default=1)
    sp.add_argument("--algebra", default="eps2")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=50)

    disp = groups.add_parser("display").add_subparsers(dest="command", required=True, parser_class=_Parser)
    sp = disp.add_parser("random", parents=[common], help="a random display datum and its semidisplay")
    field_args(sp)
    dims(sp)
    sp.add_argument("--seed", type=int, default=0)

    lau = groups.add_parser("lau").add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (("analyze", "full Lau dual report"), ("routes", "compare the three presentations")):
        sp = lau.add_parser(name, parents=[common], help=help_text)
        field_args(sp)
        dims(sp)
        sp.add_argument("--matrix", choices=("identity", "antidiagonal", "random"), default="random")
        sp.add_argument("--U", default=None, help="explicit matrix as JSON rows")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--algebras", default=None, help="comma-separated zoo kinds (default: all)")
    sp = lau.add_parser("equivariance", parents=[common], help="BP_n transport of solution sets")
    field_args(sp)
    dims(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=_positive, default=10)
    sp.add_argument("--direction", choices=("h", "h_inverse"), default="h")
    sp.add_argument("--algebras", default=None)

    zink = groups.add_parser("zink").add_subparsers(dest="command", required=True, parser_class=_Parser)
    sp = zink.add_parser("coker", parents=[common], help="truncated Zink complex against the dual")
    field_args(sp)
    dims(sp, 1, 1)
    sp.add_argument("--kind", choices=("unit", "alpha", "random"), default="unit")
    sp.add_argument("--algebra", default="eps2")
    sp.add_argument("--M", type=_positive, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=_positive, default=200_000)

    suite = groups.add_parser("suite").add_subparsers(dest="command", required=True, parser_class=_Parser)
    sp = suite.add_parser("acceptance", parents=[common], help="run acceptance criteria 1-12")
    sp.add_argument("--profile", choices=("desk", "quick"), default="desk")
    sp.add_argument("--only", type=_ints, default=None)
    return parser


def _artifact_path(out_dir: Path, name: str, config: dict) -> Path:
    digest = hashlib.sha256(json.dumps(_jsonable(config), sort_keys=True).encode()).hexdigest()[:12]
    return out_dir / f"{name}-{digest}.json"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except UsageError as exc:
        print(f"wittdisp: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if a.cache_dir:
        os.environ["WITTDISP_CACHE"] = a.cache_dir
    name = f"{a.group}-{a.command}"
    t0 = time.perf_counter()
    timings = {}
    try:
        out = COMMANDS[(a.group, a.command)](a)
        passed, config, results = out[:3]
        if len(out) > 3:
            timings = out[3]
    except UsageError as exc:
        print(f"wittdisp: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"wittdisp: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except WittDispError as exc:
        print(f"wittdisp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    timings["total"] = round(time.perf_counter() - t0, 3)
    report = {
        "schema_version": SCHEMA_VERSION,
        "versions": {"wittdisp": __version__, "python": platform.python_version(), "numpy": np.__version__},
        "command": f"{a.group} {a.command}",
        "config": config,
        "results": results,
        "summary": {"passed": bool(passed)},
        "timings": timings,
    }
    out_dir = Path(a.out or os.environ.get("WITTDISP_OUT", "wittdisp-runs"))
    out_dir.mkdir(parents=True, exist_ok=True)
    path = _artifact_path(out_dir, name, config)
    path.write_text(_dumps(report) + "\n")
    # summary.json indexes every report in the directory by file name
    index_path = out_dir / "summary.json"
    try:
        index = json.loads(index_path.read_text())
    except (OSError, ValueError):
        index = {}
    index[path.name] = {"command": report["command"], "config": _jsonable(config), "passed": bool(passed)}
    index_path.write_text(json.dumps(index, sort_keys=True, indent=1) + "\n")
    print(json.dumps({"command": report["command"], "passed": bool(passed), "report": str(path)}))
    return EXIT_OK if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
