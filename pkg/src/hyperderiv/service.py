"""HTTP service wrapping the engine, plus the in-process handlers the CLI
delegates to.

Every operation is a pure function of its request, so the endpoints are
stateless POSTs. Matrices travel as row-major arrays of [re, im] pairs.
"""

from __future__ import annotations

import re
from typing import List, Literal, Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import bch as bchmod
from .config import Config, resolve_config
from .errors import (
    ArityMismatch,
    BadDimension,
    ExprSyntaxError,
    NotInSymDomain,
    QuadratureNotConverged,
    SpectrumOutOfDomain,
    UnknownIdentity,
)
from .freealg import NcPoly
from .hyperops import d_arrow, delta_arrow, inner_derivation
from .parser import format_poly, parse
from .qderiv import derivative_hyper, nth_differential, taylor
from .series import parse_series
from .suites import run_suite, suite_names

SCHEMA_VERSION = "hyperderiv/1"


class TermModel(BaseModel):
    word: List[str]
    coeff: str


class PolyModel(BaseModel):
    pretty: str
    terms: List[TermModel]

    @classmethod
    def from_poly(cls, p: NcPoly) -> "PolyModel":
        return cls(pretty=format_poly(p), terms=[TermModel(**t) for t in p.to_obj()["terms"]])


class ParseRequest(BaseModel):
    text: str


class ParseResponse(BaseModel):
    poly: PolyModel


class ApplyRequest(BaseModel):
    op: str = Field(description="delta[expr], deltaarrow[X->Y] or darrow[X->Y]")
    to: str


class ApplyResponse(BaseModel):
    result: PolyModel


class DeriveRequest(BaseModel):
    f: str
    order: int = 1
    truncation: int = 8


class DeriveResponse(BaseModel):
    hyper: str
    expanded: PolyModel


class TaylorRequest(BaseModel):
    f: str
    order: int
    truncation: int = 8


class TaylorResponse(BaseModel):
    coefficients: List[PolyModel]


ComplexPair = List[float]
MatrixModel = List[List[ComplexPair]]


def matrix_from_model(m: MatrixModel) -> np.ndarray:
    rows = len(m)
    out = np.zeros((rows, rows), dtype=complex)
    for i, row in enumerate(m):
        if len(row) != rows:
            raise ValueError("matrices must be square")
        for j, pair in enumerate(row):
            if len(pair) != 2:
                raise ValueError("entries must be [re, im] pairs")
            out[i, j] = complex(pair[0], pair[1])
    return out


def matrix_to_model(a: np.ndarray) -> MatrixModel:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a, complex)]


class BchRequest(BaseModel):
    variant: Literal["symmetric", "product"]
    matrices: List[MatrixModel]
    nodes: int = 32


class BchResponse(BaseModel):
    variant: str
    nodes: int
    result: MatrixModel
    residual: float


class VerifyRequest(BaseModel):
    suite: str = "all"
    dims: Optional[List[int]] = None
    trials: Optional[int] = None
    seed: Optional[int] = None
    tol: Optional[float] = None
    quad_nodes: Optional[int] = None


class ReportModel(BaseModel):
    identity: str
    trials: int
    dim: int
    seed: int
    max_residual: float
    tol: float
    passed: bool = Field(alias="pass")
    runtime_ms: float

    model_config = {"populate_by_name": True}


class VerifyResponse(BaseModel):
    schema_version: str = Field(default=SCHEMA_VERSION, alias="schema")
    all_pass: bool
    reports: List[ReportModel]

    model_config = {"populate_by_name": True}


# in-process handlers (the CLI is a thin client of these)

_OP_RE = re.compile(r"^\s*(delta|deltaarrow|darrow)\s*\[(.+)\]\s*$", re.DOTALL)
_ARROW_RE = re.compile(r"^\s*([A-Za-z][A-Za-z0-9_]*)\s*->\s*([A-Za-z][A-Za-z0-9_]*)\s*$")


def handle_parse(req: ParseRequest) -> ParseResponse:
    return ParseResponse(poly=PolyModel.from_poly(parse(req.text)))


def handle_apply(req: ApplyRequest) -> ApplyResponse:
    m = _OP_RE.match(req.op)
    if not m:
        raise ValueError(
            f"bad operator spec {req.op!r}: want delta[expr], deltaarrow[X->Y] or darrow[X->Y]"
        )
    kind, inner = m.group(1), m.group(2)
    operand = parse(req.to)
    if kind == "delta":
        result = inner_derivation(parse(inner), operand)
    else:
        arrow = _ARROW_RE.match(inner)
        if not arrow:
            raise ValueError(f"bad arrow spec {inner!r}: want X->Y")
        x, y = arrow.group(1), arrow.group(2)
        result = delta_arrow(x, y, operand) if kind == "deltaarrow" else d_arrow(x, y, operand)
    return ApplyResponse(result=PolyModel.from_poly(result))


def handle_derive(req: DeriveRequest) -> DeriveResponse:
    f = parse_series(req.f, req.truncation)
    hyper = derivative_hyper(f, req.order)
    expanded = nth_differential(f, req.order, "A", "dA")
    return DeriveResponse(hyper=hyper.pretty(), expanded=PolyModel.from_poly(expanded))


def handle_taylor(req: TaylorRequest) -> TaylorResponse:
    f = parse_series(req.f, req.truncation)
    coefs = taylor(f, "A", "B", req.order)
    return TaylorResponse(coefficients=[PolyModel.from_poly(c) for c in coefs])


def handle_bch(req: BchRequest) -> BchResponse:
    mats = [matrix_from_model(m) for m in req.matrices]
    if len({m.shape for m in mats}) > 1:
        raise ValueError("matrices must share one dimension")
    quad = bchmod.QuadratureRule(req.nodes)
    if req.variant == "symmetric":
        if len(mats) != 2:
            raise ValueError("symmetric variant takes exactly two matrices [A, B]")
        result = bchmod.bch_symmetric(mats[0], mats[1], quad)
        oracle = bchmod.log_oracle([mats[0], mats[1], mats[0]])
    else:
        result = bchmod.bch_product(mats, quad)
        oracle = bchmod.log_oracle(mats)
    from .matproof import rel_residual

    return BchResponse(
        variant=req.variant,
        nodes=req.nodes,
        result=matrix_to_model(result),
        residual=rel_residual(result, oracle),
    )


def handle_verify(req: VerifyRequest, cfg: Config | None = None) -> VerifyResponse:
    cfg = cfg or resolve_config()
    overrides = {}
    if req.seed is not None:
        overrides["seed"] = req.seed
    if req.quad_nodes is not None:
        overrides["quad_nodes"] = req.quad_nodes
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides).validate()
    reports = run_suite(
        req.suite, cfg, dims=req.dims, trials=req.trials, seed=req.seed, tol=req.tol
    )
    models = [ReportModel(**r.to_obj()) for r in reports]
    return VerifyResponse(all_pass=all(r.passed for r in reports), reports=models)


# FastAPI surface

app = FastAPI(
    title="hyperderiv",
    version="0.1.0",
    description="Noncommutative derivative engine with a matrix verification oracle",
)


def _http(fn, req, *args):
    try:
        return fn(req, *args)
    except ExprSyntaxError as e:
        raise HTTPException(422, detail={"error": "syntax", "offset": e.offset,
                                         "message": e.message}) from e
    except NotInSymDomain as e:
        raise HTTPException(422, detail={"error": "domain", "message": str(e)}) from e
    except UnknownIdentity as e:
        raise HTTPException(404, detail={"error": "unknown", "message": str(e)}) from e
    except (ValueError, ArityMismatch, BadDimension, SpectrumOutOfDomain,
            QuadratureNotConverged) as e:
        raise HTTPException(400, detail={"error": "bad_request", "message": str(e)}) from e


@app.get("/health")
def health():
    return {"status": "ok", "schema": SCHEMA_VERSION}


@app.get("/suites")
def suites():
    return {"suites": suite_names()}


@app.post("/parse", response_model=ParseResponse)
def parse_endpoint(req: ParseRequest):
    return _http(handle_parse, req)


@app.post("/apply", response_model=ApplyResponse)
def apply_endpoint(req: ApplyRequest):
    return _http(handle_apply, req)


@app.post("/derive", response_model=DeriveResponse)
def derive_endpoint(req: DeriveRequest):
    return _http(handle_derive, req)


@app.post("/taylor", response_model=TaylorResponse)
def taylor_endpoint(req: TaylorRequest):
    return _http(handle_taylor, req)


@app.post("/bch", response_model=BchResponse)
def bch_endpoint(req: BchRequest):
    return _http(handle_bch, req)


@app.post("/verify", response_model=VerifyResponse, response_model_by_alias=True)
def verify_endpoint(req: VerifyRequest):
    return _http(handle_verify, req)
