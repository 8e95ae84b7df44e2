"""Command-line interface.  Every command prints one JSON document.

Exit codes: 0 success, 2 validation error (JSON error object on stdout),
64 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import congruence as cg
from . import fiber as fb
from . import solutions as sol
from . import trilinear as tl
from . import webdiag as wd
from .errors import WebcatError
from .qscalar import DEFAULT_EPS, FieldElement, QContext, parse_complex
from .serialize import (
    format_scalar,
    linmap_to_json,
    parse_scalar,
    spec_from_json,
    tensor_from_json,
)

EXIT_OK, EXIT_ERROR, EXIT_USAGE = 0, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class InputError(WebcatError):
    code = "bad_input"


# context and inputs ------------------------------------------------------------------


def _eps(args) -> float:
    if args.eps is not None:
        return args.eps
    env = os.environ.get("WEBCAT_EPS")
    return float(env) if env else DEFAULT_EPS


def make_context(args) -> QContext:
    q = (args.q or "generic").strip()
    mode = args.mode or ("exact" if q == "generic" else "numeric")
    eps = _eps(args)
    if mode == "exact":
        if q == "generic":
            return QContext("exact", None, eps)
        qv = parse_scalar(q, QContext.generic())
        if not qv.is_constant():
            raise InputError(f"q={q!r} is not a number", "--q")
        root = FieldElement.from_rational(qv.constant_value()).sqrt()
        if root is None:
            raise InputError(f"q={q} has no rational square root; use --mode numeric", "--q")
        return QContext("exact", root, eps)
    if q == "generic":
        raise InputError("numeric mode needs a value for --q", "--q")
    ctx = QContext.numeric_q(parse_complex(q), eps)
    return ctx


def _load(path: str | None, label: str = "--in"):
    if path is None:
        raise InputError(f"missing input file ({label})", label)
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"cannot open {path}", label) from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}", label) from exc


def default_spec(category: str, ctx: QContext) -> fb.FiberSpec:
    if category == "sl2":
        return fb.sl2_standard_spec(ctx)
    if category == "so3":
        return fb.sym2_standard_pair(ctx)
    M = fb.standard_bilinear("gl2", ctx)
    return fb.gl2_standard_triple(2, M, ctx)


def load_spec(args, ctx: QContext) -> fb.FiberSpec:
    if getattr(args, "spec", None):
        return spec_from_json(_load(args.spec, "--spec"), ctx)
    return default_spec(args.category, ctx)


def load_matrix(path: str | None, ctx: QContext, label: str = "--in") -> list:
    obj = _load(path, label)
    rows = obj.get("M") if isinstance(obj, dict) else obj
    if not isinstance(rows, list) or not rows or any(not isinstance(r, list) or len(r) != len(rows) for r in rows):
        raise InputError("matrix must be a square list of rows", label)
    return [[parse_scalar(x, ctx) for x in row] for row in rows]


def _mode_of(ctx: QContext) -> str:
    return "exact" if ctx.exact else "numeric"


# commands ---------------------------------------------------------------------------


def cmd_eval(args):
    ctx = make_context(args)
    d = wd.LayeredDiagram.from_json(_load(args.infile))
    d.validate()
    spec = load_spec(argparse.Namespace(**{**vars(args), "category": d.category}), ctx)
    return linmap_to_json(fb.evaluate(spec, d))


def cmd_relations(args):
    ctx = make_context(args)
    spec = load_spec(args, ctx)
    report = fb.check_all_relations(spec)
    return {"pass": fb.all_pass(report), "relations": [r.to_json() for r in report]}


def cmd_basis(args):
    if args.category == "gl2" and (args.domain is not None or args.codomain is not None):
        dom = tuple(args.domain or "")
        cod = tuple(args.codomain or "")
        diagrams = wd.gl2_basis(dom, cod)
    else:
        if args.k is None or args.l is None:
            raise UsageError("basis needs --k and --l (or --domain/--codomain for gl2)")
        if args.count_only and args.category != "gl2":
            return {"count": wd.basis_count(args.category, args.k, args.l)}
        diagrams = wd.basis(args.category, args.k, args.l)
    if args.count_only:
        return {"count": len(diagrams)}
    return {"count": len(diagrams), "diagrams": [d.to_json() for d in diagrams]}


def cmd_trace(args):
    ctx = make_context(args)
    M = load_matrix(args.infile, ctx)
    tr = cg.quantum_trace(M, ctx)
    out = {"trace": format_scalar(tr)}
    if args.category:
        target = fb.trace_target(args.category, ctx)
        out["target"] = format_scalar(target)
        out["pass"] = ctx.is_zero(tr - target)
    return out


def cmd_canonical(args):
    ctx = make_context(args)
    M = load_matrix(args.infile, ctx)
    form = cg.canonical_form(M, _mode_of(ctx), ctx, ctx.eps)
    return form.to_json()


def cmd_congruent(args):
    ctx = make_context(args)
    A = load_matrix(args.a, ctx, "A")
    B = load_matrix(args.b, ctx, "B")
    return {"congruent": cg.congruent(A, B, _mode_of(ctx), ctx, ctx.eps)}


def _q_value(args):
    q = (args.q or "generic").strip()
    if q == "generic":
        return "generic"
    try:
        return sol.parse_q(q)
    except ValueError as exc:
        raise InputError(f"cannot read q={q!r}", "--q") from exc


def cmd_enumerate(args):
    fams = sol.enumerate_solutions(args.category, args.n, _q_value(args))
    return {"category": args.category, "n": args.n, "families": [f.to_json() for f in fams]}


def cmd_witness(args):
    w = sol.existence_witness(args.category, args.n, _q_value(args))
    out = w.to_json()
    out["trace"] = format_scalar(sol.witness_trace(w, None))
    return out


def _tensor(path, label):
    obj = _load(path, label)
    if isinstance(obj, dict) and "T" in obj:
        obj = obj["T"]
    if isinstance(obj, dict):
        return tensor_from_json(obj, QContext.generic())
    return obj


def cmd_tri_classify(args):
    T = _tensor(args.file, "file")
    inv = tl.invariants(T)
    out = inv.to_json()
    out["cubics"] = [str(tl.slice_cubic(T, a).expr) for a in tl.AXES]
    return out


def cmd_tri_equiv(args):
    return {"equivalent": tl.equivalent(_tensor(args.a, "A"), _tensor(args.b, "B"))}


def cmd_flip(args):
    ctx = make_context(args)
    spec = load_spec(args, ctx)
    return {"flip": fb.flip_test(spec)}


def cmd_faithful(args):
    ctx = make_context(args)
    spec = load_spec(args, ctx)
    images = fb.basis_images(spec, args.k, args.l)
    return {"faithful": fb.faithfulness_check(spec, args.k, args.l), "count": len(images)}


# parser --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--category", choices=wd.CATEGORIES)
    common.add_argument("--mode", choices=("exact", "numeric"))
    common.add_argument("--q", default="generic")
    common.add_argument("--eps", type=float)
    common.add_argument("--in", dest="infile")
    common.add_argument("--out", dest="outfile")
    common.add_argument("--spec")

    p = _Parser(prog="webcat", description="Evaluate web diagrams and classify fiber data.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    sub.add_parser("eval", parents=[common]).set_defaults(func=cmd_eval)
    sub.add_parser("relations", parents=[common]).set_defaults(func=cmd_relations, need_category=True)
    b = sub.add_parser("basis", parents=[common])
    b.add_argument("--k", type=int)
    b.add_argument("--l", type=int)
    b.add_argument("--domain")
    b.add_argument("--codomain")
    b.add_argument("--count-only", action="store_true")
    b.set_defaults(func=cmd_basis, need_category=True)
    sub.add_parser("trace", parents=[common]).set_defaults(func=cmd_trace)
    sub.add_parser("canonical", parents=[common]).set_defaults(func=cmd_canonical)
    c = sub.add_parser("congruent", parents=[common])
    c.add_argument("a")
    c.add_argument("b")
    c.set_defaults(func=cmd_congruent)
    for name, fn in (("enumerate", cmd_enumerate), ("witness", cmd_witness)):
        e = sub.add_parser(name, parents=[common])
        e.add_argument("--n", type=int, required=True)
        e.set_defaults(func=fn, need_category=True)
    tc = sub.add_parser("trilinear-classify", parents=[common])
    tc.add_argument("file")
    tc.set_defaults(func=cmd_tri_classify)
    te = sub.add_parser("trilinear-equiv", parents=[common])
    te.add_argument("a")
    te.add_argument("b")
    te.set_defaults(func=cmd_tri_equiv)
    tri = sub.add_parser("trilinear", parents=[common])
    trisub = tri.add_subparsers(dest="tricommand", parser_class=_Parser)
    x = trisub.add_parser("classify")
    x.add_argument("file")
    x.set_defaults(func=cmd_tri_classify)
    x = trisub.add_parser("equiv")
    x.add_argument("a")
    x.add_argument("b")
    x.set_defaults(func=cmd_tri_equiv)
    sub.add_parser("flip-test", parents=[common]).set_defaults(func=cmd_flip, need_category=True)
    f = sub.add_parser("faithful", parents=[common])
    f.add_argument("--k", type=int, required=True)
    f.add_argument("--l", type=int, required=True)
    f.set_defaults(func=cmd_faithful, need_category=True)
    return p


def run(argv=None) -> tuple[int, str]:
    """Run the CLI; returns (exit code, stdout text)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("missing command")
        if getattr(args, "need_category", False) and not args.category:
            raise UsageError(f"{args.command} needs --category")
        result = args.func(args)
        code = EXIT_OK
    except UsageError as exc:
        return EXIT_USAGE, json.dumps({"error": {"code": "usage", "message": str(exc), "location": None}}) + "\n"
    except WebcatError as exc:
        result, code = {"error": exc.to_json()}, EXIT_ERROR
    except (ValueError, ZeroDivisionError) as exc:
        result, code = {"error": {"code": "invalid", "message": str(exc), "location": None}}, EXIT_ERROR
    text = json.dumps(result) + "\n"
    outfile = getattr(args, "outfile", None) if code == EXIT_OK else None
    if outfile:
        with open(outfile, "w") as fh:
            fh.write(text)
    return code, text


def main(argv=None) -> int:
    code, text = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
