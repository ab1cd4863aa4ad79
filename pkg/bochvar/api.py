"""
╔══════════════════════════════════════════════════════════════════╗
║         Bochvar workbench — HTTP API                             ║
║                                                                  ║
║  • Evaluates terms and checks quasi-identities on algebras       ║
║  • Decides consequence in ⟨A, {1}⟩                               ║
║  • Classifies and decomposes finite algebras                     ║
║  • Lists and runs the claim corpus                               ║
╚══════════════════════════════════════════════════════════════════╝

Algebras are referenced by built-in name (wke, b2, b4, b4+b2) or passed
inline in the algebra file format.

Run:
    uv run uvicorn bochvar.api:app --reload --port 8000
"""

from __future__ import annotations

import logging
from contextlib import asynccontextmanager
from importlib.metadata import PackageNotFoundError, version
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from bochvar.algebra_core import BUILTIN_ALGEBRAS, FiniteAlgebra, builtin, evaluate, holds_quasi_identity, parse_algebra
from bochvar.classify import classify
from bochvar.config import configure_logging
from bochvar.corpus import load_claims, run_corpus
from bochvar.matrix_logic import consequence, matrix_of, witness_passivity
from bochvar.plonka import decompose, verify_decomposition_conditions
from bochvar.reports import (
    AlgebraSummary,
    CheckResult,
    ClassificationResult,
    ConsequenceResult,
    CorpusReport,
    DecompositionResult,
    EvalResult,
    PassivityResult,
)
from bochvar.terms import parse_quasi_identity, parse_rule, parse_term, render_term

log = logging.getLogger(__name__)

try:
    VERSION = version("bochvar-workbench")
except PackageNotFoundError:
    VERSION = "0.0.0"


@asynccontextmanager
async def lifespan(app: FastAPI):
    configure_logging()
    log.info(f"Bochvar workbench API {VERSION} starting")
    yield


app = FastAPI(title="Bochvar workbench", version=VERSION, lifespan=lifespan)


# ──────────────────────────────────────────────────────────────────
# REQUEST MODELS
# ──────────────────────────────────────────────────────────────────

class AlgebraRef(BaseModel):
    algebra:      str = "wke"               # built-in name
    algebra_text: Optional[str] = None      # inline algebra file, wins over `algebra`

    def load(self) -> FiniteAlgebra:
        if self.algebra_text:
            return parse_algebra(self.algebra_text, "<request>")
        return builtin(self.algebra)


class EvalRequest(AlgebraRef):
    term:      str
    valuation: dict[str, str] = {}


class CheckRequest(AlgebraRef):
    statement: str
    passivity: bool = False


class ConsequenceRequest(AlgebraRef):
    query: str                               # "x, x -> y |- y"


class CorpusRequest(BaseModel):
    size:   Optional[int] = None
    claims: list[str] = []


def _fail(e: Exception) -> HTTPException:
    if isinstance(e, LookupError):
        return HTTPException(status_code=404, detail=str(e))
    return HTTPException(status_code=422, detail=str(e))


# ──────────────────────────────────────────────────────────────────
# ROUTES
# ──────────────────────────────────────────────────────────────────

@app.get("/health")
def health():
    return {"status": "ok", "version": VERSION}


@app.get("/algebras")
def list_algebras() -> list[AlgebraSummary]:
    return [AlgebraSummary.of(builtin(name)) for name in BUILTIN_ALGEBRAS]


@app.get("/algebras/{name}")
def get_algebra(name: str):
    try:
        A = builtin(name)
    except LookupError as e:
        raise _fail(e)
    return {"summary": AlgebraSummary.of(A), "text": A.to_text()}


@app.post("/eval")
def eval_term(req: EvalRequest) -> EvalResult:
    try:
        A = req.load()
        t = parse_term(req.term)
        v = {name: A.index(label) for name, label in req.valuation.items()}
        value = evaluate(A, t, v)
    except (ValueError, LookupError) as e:
        raise _fail(e)
    return EvalResult(algebra=A.name, term=render_term(t), valuation=dict(sorted(req.valuation.items())),
                      value=A.label(value))


@app.post("/check")
def check_statement(req: CheckRequest) -> CheckResult | PassivityResult:
    try:
        A = req.load()
        q = parse_quasi_identity(req.statement)
    except (ValueError, LookupError) as e:
        raise _fail(e)
    if req.passivity:
        verdict = witness_passivity(q, A)
        return PassivityResult(algebra=A.name, statement=str(q), witnessed=verdict.holds,
                               realized=verdict.labelled())
    return CheckResult.of(str(q), holds_quasi_identity(A, q))


@app.post("/consequence")
def decide_consequence(req: ConsequenceRequest) -> ConsequenceResult:
    try:
        M = matrix_of(req.load())
        rule = parse_rule(req.query)
    except (ValueError, LookupError) as e:
        raise _fail(e)
    verdict = consequence(M, rule.premises, rule.conclusion)
    return ConsequenceResult(
        matrix=M.describe(), premises=[render_term(p) for p in rule.premises],
        conclusion=render_term(rule.conclusion), holds=verdict.holds, counterexample=verdict.labelled(),
    )


@app.post("/classify")
def classify_algebra(req: AlgebraRef) -> ClassificationResult:
    try:
        return ClassificationResult.of(classify(req.load()))
    except (ValueError, LookupError) as e:
        raise _fail(e)


@app.post("/decompose")
def decompose_algebra(req: AlgebraRef) -> DecompositionResult:
    try:
        d = decompose(req.load())
    except (ValueError, LookupError) as e:
        raise _fail(e)
    return DecompositionResult.of(d, verify_decomposition_conditions(d))


@app.get("/claims")
def list_claims():
    return [c.model_dump(by_alias=True, exclude_none=True) for c in load_claims()]


@app.post("/corpus/run")
def run_claims(req: CorpusRequest) -> CorpusReport:
    log.info(f"corpus run requested: size={req.size}, claims={req.claims or 'all'}")
    try:
        return run_corpus(req.size, req.claims or None)
    except (ValueError, LookupError) as e:
        raise _fail(e)
