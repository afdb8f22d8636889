"""Command-line client: thin argument handling over the service handlers.

Exit codes: 0 success, 2 expression syntax error, 3 domain error,
4 usage error, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import resolve_config
from .errors import (
    ArityMismatch,
    BadDimension,
    ExprSyntaxError,
    NotInSymDomain,
    QuadratureNotConverged,
    SpectrumOutOfDomain,
    UnknownIdentity,
)
from .service import (
    ApplyRequest,
    BchRequest,
    DeriveRequest,
    ParseRequest,
    SCHEMA_VERSION,
    TaylorRequest,
    VerifyRequest,
    handle_apply,
    handle_bch,
    handle_derive,
    handle_parse,
    handle_taylor,
    handle_verify,
)

EXIT_OK = 0
EXIT_SYNTAX = 2
EXIT_DOMAIN = 3
EXIT_USAGE = 4
EXIT_VERIFY = 5


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="hyperderiv", description=__doc__)
    top.add_argument("--config", default="", help="key=value config file")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse an expression and print its canonical form")
    p.add_argument("expr")
    p.add_argument("--json", action="store_true", help="emit the serialized term list")

    p = sub.add_parser("apply", help="apply a hyperoperator to an expression")
    p.add_argument("--op", required=True,
                   help="delta[expr], deltaarrow[X->Y] or darrow[X->Y]")
    p.add_argument("--to", required=True)

    p = sub.add_parser("derive", help="print the n-th derivative hyperoperator")
    p.add_argument("--f", required=True, help='series text, e.g. "x^3" or "exp"')
    p.add_argument("--order", "--n", dest="order", type=int, default=1)

    p = sub.add_parser("taylor", help="expansion coefficients of f(A + x B)")
    p.add_argument("--f", required=True)
    p.add_argument("--order", type=int, required=True)

    p = sub.add_parser("bch", help="exponential-product logarithm")
    p.add_argument("--variant", choices=("symmetric", "product"), required=True)
    p.add_argument("--inputs", required=True, help="JSON file with matrices")
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--out", default="", help="write the result JSON here")

    p = sub.add_parser("verify", help="run identity suites against the matrix oracle")
    p.add_argument("--suite", default="all")
    p.add_argument("--dim", type=int, action="append", default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--nodes", type=int, default=None, help="quadrature nodes")
    p.add_argument("--report", default="", help="write the report JSON here")
    return top


def _caret(e: ExprSyntaxError) -> str:
    lines = [f"syntax error: {e.message}"]
    if e.text:
        lines.append(f"  {e.text}")
        lines.append("  " + " " * e.offset + "^")
    else:
        lines.append(f"  at offset {e.offset}")
    return "\n".join(lines)


def _load_matrices(path: str):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data["matrices"]
    return data


def _cmd_parse(args) -> int:
    resp = handle_parse(ParseRequest(text=args.expr))
    if args.json:
        print(json.dumps({"terms": [t.model_dump() for t in resp.poly.terms]}, indent=2))
    else:
        print(resp.poly.pretty)
    return EXIT_OK


def _cmd_apply(args) -> int:
    resp = handle_apply(ApplyRequest(op=args.op, to=args.to))
    print(resp.result.pretty)
    return EXIT_OK


def _cmd_derive(args, cfg) -> int:
    resp = handle_derive(
        DeriveRequest(f=args.f, order=args.order, truncation=cfg.truncation_degree)
    )
    print(f"hyper: {resp.hyper}")
    print(f"expanded: {resp.expanded.pretty}")
    return EXIT_OK


def _cmd_taylor(args, cfg) -> int:
    resp = handle_taylor(
        TaylorRequest(f=args.f, order=args.order, truncation=cfg.truncation_degree)
    )
    for n, coef in enumerate(resp.coefficients):
        print(f"x^{n}: {coef.pretty}")
    return EXIT_OK


def _cmd_bch(args, cfg) -> int:
    nodes = args.nodes if args.nodes is not None else cfg.quad_nodes
    resp = handle_bch(
        BchRequest(variant=args.variant, matrices=_load_matrices(args.inputs), nodes=nodes)
    )
    payload = resp.model_dump()
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(f"residual vs matrix-log oracle: {resp.residual:.3e}")
    if not args.out:
        print(text)
    return EXIT_OK


def _cmd_verify(args, cfg) -> int:
    resp = handle_verify(
        VerifyRequest(
            suite=args.suite,
            dims=args.dim,
            trials=args.trials,
            seed=args.seed,
            tol=args.tol,
            quad_nodes=args.nodes,
        ),
        cfg,
    )
    for r in resp.reports:
        status = "pass" if r.passed else "FAIL"
        print(
            f"{status}  {r.identity:20s} dim={r.dim} trials={r.trials} "
            f"max_residual={r.max_residual:.3e} tol={r.tol:.1e}"
        )
    report_obj = json.loads(resp.model_dump_json(by_alias=True))
    report_text = json.dumps(report_obj, indent=2)
    target = args.report or cfg.report_path
    if target:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(report_text + "\n")
    print(("all identities passed" if resp.all_pass else "verification FAILED")
          + f" ({len(resp.reports)} reports, schema {SCHEMA_VERSION})")
    return EXIT_OK if resp.all_pass else EXIT_VERIFY


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(args.config)
        if args.command == "parse":
            return _cmd_parse(args)
        if args.command == "apply":
            return _cmd_apply(args)
        if args.command == "derive":
            return _cmd_derive(args, cfg)
        if args.command == "taylor":
            return _cmd_taylor(args, cfg)
        if args.command == "bch":
            return _cmd_bch(args, cfg)
        if args.command == "verify":
            return _cmd_verify(args, cfg)
        raise _UsageError(f"unknown command {args.command!r}")
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ExprSyntaxError as e:
        print(_caret(e), file=sys.stderr)
        return EXIT_SYNTAX
    except NotInSymDomain as e:
        print(f"domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except UnknownIdentity as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, ArityMismatch, BadDimension,
            SpectrumOutOfDomain, QuadratureNotConverged) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
