"""
╔══════════════════════════════════════════════════════════════════╗
║         Bochvar workbench — Claim Corpus Runner                  ║
║                                                                  ║
║  Runs every claim from claims.json against wke and the           ║
║  enumerated Bochvar algebras, and compares the verdicts with     ║
║  the recorded expectations.                                      ║
║                                                                  ║
║  Run:                                                            ║
║      bochvar verify-corpus                                       ║
║      bochvar verify-corpus --size 6 --claim derived-ii.2-stated  ║
║      bochvar verify-corpus --basis                               ║
╚══════════════════════════════════════════════════════════════════╝
"""

from __future__ import annotations

import json
import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import StrEnum
from functools import lru_cache
from pathlib import Path
from typing import Callable, Literal, Optional

from pydantic import BaseModel, Field, ValidationError, model_validator
from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from bochvar.algebra_core import (
    FiniteAlgebra,
    builtin,
    direct_product,
    find_isomorphism,
    holds_quasi_identity,
    is_embedding,
    separates_into,
)
from bochvar.classify import (
    ABSORPTION,
    ChainVerdict,
    bca_axiom_failure,
    build_retraction,
    classify,
    short_basis_failure,
)
from bochvar.config import load_settings
from bochvar.errors import (
    BochvarError,
    ClassificationError,
    DecompositionError,
    FormatError,
    RetractionError,
    UnknownNameError,
)
from bochvar.matrix_logic import (
    EFJ,
    NF,
    bochvar_matrix,
    is_theorem,
    nonparaconsistent_matrix,
    rule_derivable,
    witness_passivity,
)
from bochvar.plonka import PlonkaDecomposition, attach_J, decompose, enumerate_bca, verify_decomposition_conditions
from bochvar.reports import BasisReport, ClaimResult, CorpusReport, MembershipRow
from bochvar.terms import QuasiIdentity, parse_quasi_identity, parse_term

log = logging.getLogger(__name__)

CLAIMS_FILE = Path(__file__).parent / "claims.json"
FIXPOINT_FORM = parse_quasi_identity("x = ~x => y = z")


class Expectation(StrEnum):
    HOLDS       = "holds"
    FAILS       = "fails"
    DISCREPANCY = "discrepancy"      # printed statement expected to fail; reported as an erratum candidate


class Claim(BaseModel):
    id:         str
    group:      str
    kind:       Literal["identity", "quasi-identity", "property"]
    statements: list[str] = []
    prop:       Optional[str] = Field(default=None, alias="property")
    condition:  Optional[str] = None
    scope:      Literal["corpus", "global"] = "corpus"
    expect:     Expectation
    source:     str

    @model_validator(mode="after")
    def _payload(self) -> Claim:
        if self.kind == "property":
            if not self.prop:
                raise ValueError(f"{self.id}: property claims name a property")
        elif not self.statements:
            raise ValueError(f"{self.id}: no statements")
        return self

    @property
    def parsed(self) -> list[QuasiIdentity]:
        return _parsed(tuple(self.statements))


@lru_cache(maxsize=None)
def _parsed(statements: tuple[str, ...]) -> list[QuasiIdentity]:
    return [parse_quasi_identity(s) for s in statements]


def load_claims(path: Path = CLAIMS_FILE) -> list[Claim]:
    try:
        raw = json.loads(path.read_text())
        claims = [Claim.model_validate(item) for item in raw]
    except (json.JSONDecodeError, ValidationError) as e:
        raise FormatError(str(e), str(path)) from None
    seen: set[str] = set()
    for c in claims:
        if c.id in seen:
            raise FormatError(f"duplicate claim id {c.id!r}", str(path))
        seen.add(c.id)
        if c.kind == "property":
            if c.prop not in ALGEBRA_PROPERTIES and c.prop not in GLOBAL_PROPERTIES:
                raise FormatError(f"{c.id}: unknown property {c.prop!r}", str(path))
        else:
            _parsed(tuple(c.statements))
    return claims


# ──────────────────────────────────────────────────────────────────
# SCOPE
# ──────────────────────────────────────────────────────────────────

@dataclass
class Scope:
    size:           int
    algebras:       list[FiniteAlgebra]
    decompositions: dict[str, PlonkaDecomposition | DecompositionError] = field(default_factory=dict)

    def decomposition(self, A: FiniteAlgebra) -> PlonkaDecomposition:
        d = self.decompositions[A.name]
        if isinstance(d, DecompositionError):
            raise d
        return d


def build_scope(size: Optional[int] = None, workers: Optional[int] = None) -> Scope:
    """wke plus one representative of every Bochvar algebra up to `size` elements."""
    size = size or load_settings().corpus_size
    wke = builtin("wke")
    algebras = [wke] + [A for A in enumerate_bca(size, workers) if find_isomorphism(A, wke) is None]
    scope = Scope(size, algebras)
    for A in algebras:
        if A.size == 1:
            continue
        try:
            scope.decompositions[A.name] = decompose(A)
        except DecompositionError as e:
            scope.decompositions[A.name] = e
    log.info(f"corpus scope: {len(algebras)} algebra(s) up to size {size}")
    return scope


# ──────────────────────────────────────────────────────────────────
# PROPERTIES
# Each returns None when the property holds, else a failure detail
# ──────────────────────────────────────────────────────────────────

AlgebraProperty = Callable[[FiniteAlgebra, Claim, Scope], Optional[str]]
GlobalProperty  = Callable[[Claim], Optional[str]]

ALGEBRA_PROPERTIES: dict[str, AlgebraProperty] = {}
GLOBAL_PROPERTIES:  dict[str, GlobalProperty]  = {}


def algebra_property(name: str):
    def register(fn: AlgebraProperty) -> AlgebraProperty:
        ALGEBRA_PROPERTIES[name] = fn
        return fn
    return register


def global_property(name: str):
    def register(fn: GlobalProperty) -> GlobalProperty:
        GLOBAL_PROPERTIES[name] = fn
        return fn
    return register


@algebra_property("decomposition")
def _decomposition_condition(A: FiniteAlgebra, claim: Claim, scope: Scope) -> Optional[str]:
    if A.size == 1:
        return None
    try:
        d = scope.decomposition(A)
    except DecompositionError as e:
        return str(e)
    for c in verify_decomposition_conditions(d):
        if c.check == claim.condition:
            return None if c.passed else c.detail or c.check
    raise UnknownNameError(f"no decomposition condition {claim.condition!r}")


@algebra_property("nf-equivalence")
def _nf_equivalence(A: FiniteAlgebra, claim: Claim, scope: Scope) -> Optional[str]:
    if A.size == 1:
        return None
    nf = holds_quasi_identity(A, NF).holds
    fixpoint_form = holds_quasi_identity(A, FIXPOINT_FORM).holds
    free = not A.fixpoints()
    if nf == fixpoint_form == free:
        return None
    return f"separating quasi-identity {nf}, fixpoint form {fixpoint_form}, fixpoint-free {free}"


@algebra_property("nf-fixpoint-free")
def _nf_fixpoint_free(A: FiniteAlgebra, claim: Claim, scope: Scope) -> Optional[str]:
    if A.size == 1:
        return None
    verdict = classify(A).verdict
    nbca = verdict in (ChainVerdict.JBA, ChainVerdict.NBCA_PROPER)
    nf = holds_quasi_identity(A, NF).holds
    return None if nbca == nf else f"{verdict} but separating quasi-identity {'holds' if nf else 'fails'}"


@algebra_property("classification")
def _classification(A: FiniteAlgebra, claim: Claim, scope: Scope) -> Optional[str]:
    try:
        c = classify(A)
    except ClassificationError as e:
        return str(e)
    match c.verdict:
        case ChainVerdict.NOT_BCA:
            return f"not a Bochvar algebra: {c.reason}"
        case ChainVerdict.BCA_PROPER | ChainVerdict.NBCA_PROPER:
            expected = "wke" if c.verdict == ChainVerdict.BCA_PROPER else "b4+b2"
            if c.witness is None or c.witness.source.name != expected or not is_embedding(c.witness):
                return f"{c.verdict} without a verified {expected} embedding"
        case ChainVerdict.JBA:
            if not holds_quasi_identity(A, ABSORPTION).holds:
                return "JBA but absorption fails"
    return None


@algebra_property("retraction")
def _retraction(A: FiniteAlgebra, claim: Claim, scope: Scope) -> Optional[str]:
    free = not A.fixpoints()
    try:
        build_retraction(A)
        built = True
    except RetractionError:
        built = False
    if built == free:
        return None
    return "retraction built despite a fixpoint" if built else "no retraction on a fixpoint-free algebra"


@algebra_property("roundtrip")
def _roundtrip(A: FiniteAlgebra, claim: Claim, scope: Scope) -> Optional[str]:
    if A.size == 1:
        return None
    try:
        rebuilt = attach_J(scope.decomposition(A).system)
    except BochvarError as e:
        return str(e)
    return None if find_isomorphism(A, rebuilt) is not None else "rebuilt algebra is not isomorphic"


@global_property("efj-bochvar")
def _efj_bochvar(claim: Claim) -> Optional[str]:
    v = rule_derivable(bochvar_matrix(), EFJ)
    return None if v.holds else f"counterexample {v.describe()}"


@global_property("efj-nonparaconsistent")
def _efj_nonparaconsistent(claim: Claim) -> Optional[str]:
    v = rule_derivable(nonparaconsistent_matrix(), EFJ)
    return None if v.holds else f"counterexample {v.describe()}"


@global_property("excluded-middle")
def _excluded_middle(claim: Claim) -> Optional[str]:
    phi = parse_term("x | ~x")
    theorems = [M.name for M in (bochvar_matrix(), nonparaconsistent_matrix()) if is_theorem(M, phi).holds]
    return f"theorem of {', '.join(theorems)}" if theorems else None


@global_property("external-excluded-middle")
def _external_excluded_middle(claim: Claim) -> Optional[str]:
    phi = parse_term("J2 x | ~J2 x")
    missing = [M.name for M in (bochvar_matrix(), nonparaconsistent_matrix()) if not is_theorem(M, phi).holds]
    return f"not a theorem of {', '.join(missing)}" if missing else None


@global_property("nf-passive")
def _nf_passive(claim: Claim) -> Optional[str]:
    v = witness_passivity(NF, builtin("b4+b2"))
    return None if v.holds else f"antecedent realized at {v.describe()}"


@global_property("b4b2-product")
def _b4b2_product(claim: Claim) -> Optional[str]:
    product = direct_product(builtin("wke"), builtin("b2"))
    return None if find_isomorphism(builtin("b4+b2"), product) is not None else "no isomorphism"


# ──────────────────────────────────────────────────────────────────
# RUNNER
# ──────────────────────────────────────────────────────────────────

@dataclass
class Failure:
    detail:         str
    algebra:        Optional[str] = None
    statement:      Optional[str] = None
    counterexample: Optional[dict[str, str]] = None


def first_failure(claim: Claim, scope: Scope) -> tuple[int, Optional[Failure]]:
    """(algebras checked, first failure or None)."""
    if claim.kind == "property":
        if claim.scope == "global":
            detail = GLOBAL_PROPERTIES[claim.prop](claim)
            return 0, None if detail is None else Failure(detail)
        prop = ALGEBRA_PROPERTIES[claim.prop]
        for A in scope.algebras:
            detail = prop(A, claim, scope)
            if detail is not None:
                return len(scope.algebras), Failure(detail, A.name)
        return len(scope.algebras), None

    for A in scope.algebras:
        for text, q in zip(claim.statements, claim.parsed):
            v = holds_quasi_identity(A, q)
            if not v.holds:
                return len(scope.algebras), Failure(
                    f"{text} fails in {A.name} at {v.describe()}", A.name, text, v.labelled()
                )
    return len(scope.algebras), None


def run_claim(claim: Claim, scope: Scope) -> ClaimResult:
    t0 = time.monotonic()
    base = dict(id=claim.id, group=claim.group, kind=claim.kind, source=claim.source, expect=str(claim.expect))
    try:
        checked, failure = first_failure(claim, scope)
    except Exception as e:
        log.exception(f"claim {claim.id} raised")
        return ClaimResult(**base, observed="error", grade="ERROR", scope=0,
                           detail=f"{type(e).__name__}: {e}", elapsed_sec=round(time.monotonic() - t0, 3))

    observed = "holds" if failure is None else "fails"
    passed = (observed == "holds") == (claim.expect == Expectation.HOLDS)
    found = {}
    if failure is not None:
        detail = failure.detail
        if claim.expect == Expectation.DISCREPANCY:
            detail = f"erratum candidate: {detail}"
        found = dict(algebra=failure.algebra, statement=failure.statement,
                     counterexample=failure.counterexample, detail=detail)
    return ClaimResult(**base, observed=observed, grade="PASS" if passed else "FAIL", scope=checked,
                       elapsed_sec=round(time.monotonic() - t0, 3), **found)


def run_corpus(
    size:      Optional[int] = None,
    claim_ids: Optional[list[str]] = None,
    workers:   Optional[int] = None,
    scope:     Optional[Scope] = None,
) -> CorpusReport:
    """Evaluate every (or the selected) claim on the scope; results in inventory order."""
    claims = load_claims()
    if claim_ids:
        wanted = set(claim_ids)
        unknown = wanted - {c.id for c in claims}
        if unknown:
            raise UnknownNameError(f"unknown claim id(s): {', '.join(sorted(unknown))}")
        claims = [c for c in claims if c.id in wanted]
    scope = scope or build_scope(size, workers)
    workers = workers or load_settings().workers

    results: dict[str, ClaimResult] = {}
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(run_claim, c, scope): c.id for c in claims}
        for future in as_completed(futures):
            r = future.result()
            results[r.id] = r
            log.debug(f"{r.id}: {r.grade} ({r.observed})")

    ordered = [results[c.id] for c in claims]
    report = CorpusReport(
        run_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        size=scope.size,
        algebras=[A.name for A in scope.algebras],
        claims=len(ordered),
        passed=sum(r.grade == "PASS" for r in ordered),
        failed=sum(r.grade == "FAIL" for r in ordered),
        errors=sum(r.grade == "ERROR" for r in ordered),
        results=ordered,
    )
    log.info(f"corpus: {report.passed}/{report.claims} claims as expected")
    return report


# ──────────────────────────────────────────────────────────────────
# BASIS EQUIVALENCE
# ──────────────────────────────────────────────────────────────────

def membership_row(A: FiniteAlgebra, mutated: bool = False) -> MembershipRow:
    axioms = bca_axiom_failure(A)
    short = short_basis_failure(A)
    sep = separates_into(A, builtin("wke"))
    detail = axioms or short or ("" if sep.separated else sep.describe())
    return MembershipRow(algebra=A.name, mutated=mutated, axioms=axioms is None,
                         short_basis=short is None, separation=sep.separated, detail=detail)


def mutate(A: FiniteAlgebra, rng: random.Random, tag: str) -> FiniteAlgebra:
    """Copy of A with one randomly chosen table entry changed."""
    op = rng.choice(A.operation_names)
    shape = A.op(op).shape
    position = tuple(rng.randrange(n) for n in shape)
    current = int(A.op(op)[position])
    value = rng.choice([v for v in range(A.size) if v != current])
    return A.with_entry(op, position, value, name=f"{A.name}~{tag}")


def basis_equivalence_check(
    max_size:  int = 6,
    mutations: Optional[int] = None,
    seed:      Optional[int] = None,
    workers:   Optional[int] = None,
) -> BasisReport:
    """Three membership tests on every enumerated algebra and on randomly mutated tables."""
    settings = load_settings()
    mutations = settings.mutations if mutations is None else mutations
    seed = settings.seed if seed is None else seed
    algebras = enumerate_bca(max_size, workers)
    rng = random.Random(seed)
    parents = [A for A in algebras if A.size > 1]
    mutants = [mutate(rng.choice(parents), rng, str(n)) for n in range(mutations)]
    jobs = [(A, False) for A in algebras] + [(A, True) for A in mutants]

    with ThreadPoolExecutor(max_workers=workers or settings.workers) as executor:
        rows = list(executor.map(lambda job: membership_row(*job), jobs))

    report = BasisReport(
        max_size=max_size, mutations=mutations, seed=seed, checked=len(rows),
        members=sum(r.axioms for r in rows),
        disagreements=[r for r in rows if not r.agrees],
        rows=rows,
    )
    log.info(f"basis equivalence: {report.checked} tables, {len(report.disagreements)} disagreement(s)")
    return report


# ──────────────────────────────────────────────────────────────────
# REPORT
# ──────────────────────────────────────────────────────────────────

GRADE_COLOR = {"PASS": "green", "FAIL": "red", "ERROR": "red"}
GROUP_STYLE = {
    "bca":        "cyan",
    "basis":      "cyan",
    "ibsl":       "blue",
    "fiber":      "yellow",
    "hom":        "yellow",
    "interval":   "yellow",
    "designated": "yellow",
    "derived-i":  "magenta",
    "derived-ii": "magenta",
    "nf":         "green",
    "chain":      "green",
}


def print_corpus_report(report: CorpusReport, console: Optional[Console] = None) -> None:
    console = console or Console()
    console.print(Panel(
        f"[bold cyan]Bochvar workbench — Claim Corpus[/bold cyan]\n"
        f"[bold]{report.claims}[/bold] claim(s) over [bold]{len(report.algebras)}[/bold] algebra(s) "
        f"up to size {report.size}: {', '.join(report.algebras)}",
        border_style="cyan",
    ))

    for group in dict.fromkeys(r.group for r in report.results):
        style = GROUP_STYLE.get(group, "white")
        t = Table(box=box.SIMPLE, show_header=True, header_style=f"bold {style}",
                  title=f"[{style}]{group}[/{style}]", title_style="bold")
        t.add_column("Claim", min_width=28)
        t.add_column("Expect", min_width=11)
        t.add_column("Observed", min_width=8)
        t.add_column("Result", min_width=6)
        t.add_column("Detail")
        for r in (r for r in report.results if r.group == group):
            gc = GRADE_COLOR[r.grade]
            detail = r.detail or r.source
            t.add_row(r.id, r.expect, r.observed, f"[{gc}]{r.grade}[/{gc}]",
                      Text(detail, style="dim", overflow="fold"))
        console.print(t)

    console.print(Panel(
        f"[bold]CORPUS SUMMARY[/bold]\n\n"
        f"  Claims run : {report.claims}\n"
        f"  PASS       : [green]{report.passed}[/green]\n"
        f"  FAIL       : [red]{report.failed}[/red]\n"
        f"  ERROR      : [red]{report.errors}[/red]",
        border_style="cyan",
        title="Results",
    ))
    failures = [r for r in report.results if r.grade != "PASS"]
    if failures:
        console.print("\n[bold yellow]Unexpected verdicts:[/bold yellow]")
        for r in failures:
            console.print(f"  [red]✗[/red] [{r.id}] expected {r.expect}, observed {r.observed}: {r.detail}")


def print_basis_report(report: BasisReport, console: Optional[Console] = None) -> None:
    console = console or Console()
    t = Table(box=box.ROUNDED, title="Membership tests", title_style="bold")
    t.add_column("Algebra", style="bold cyan")
    t.add_column("Mutated", justify="center")
    t.add_column("Axioms", justify="center")
    t.add_column("Short basis", justify="center")
    t.add_column("Separation", justify="center")
    t.add_column("Detail")
    mark = {True: "[green]✓[/green]", False: "[red]✗[/red]"}
    for r in report.rows if len(report.rows) <= 40 else report.rows[:20] + report.disagreements:
        t.add_row(r.algebra, "yes" if r.mutated else "", mark[r.axioms], mark[r.short_basis],
                  mark[r.separation], Text(r.detail, style="dim", overflow="fold"))
    console.print(t)
    color = "green" if report.ok else "red"
    console.print(Panel(
        f"[bold]BASIS EQUIVALENCE[/bold]\n\n"
        f"  Tables checked : {report.checked} ({report.mutations} mutated, seed {report.seed})\n"
        f"  Members        : {report.members}\n"
        f"  Disagreements  : [{color}]{len(report.disagreements)}[/{color}]",
        border_style=color,
    ))
