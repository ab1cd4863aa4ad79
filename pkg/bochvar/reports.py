"""
reports.py — Machine-readable result models shared by the CLI and the API.

Every command builds one of these and either dumps it as JSON or renders
it with rich; both views carry the same fields.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from bochvar.algebra_core import FiniteAlgebra, Homomorphism, Verdict
from bochvar.classify import Classification
from bochvar.hilbert import DerivationVerdict, SoundnessReport
from bochvar.matrix_logic import AgreementReport, DeductionReport
from bochvar.plonka import ConditionCheck, PlonkaDecomposition
from bochvar.terms import render_term


# ──────────────────────────────────────────────────────────────────
# BUILDING BLOCKS
# ──────────────────────────────────────────────────────────────────

class AlgebraSummary(BaseModel):
    name:      str
    size:      int
    signature: str
    elements:  list[str]
    fixpoint:  Optional[str] = None

    @classmethod
    def of(cls, A: FiniteAlgebra) -> AlgebraSummary:
        fixed = A.fixpoints()
        return cls(
            name=A.name, size=A.size, signature=str(A.signature),
            elements=list(A.elements), fixpoint=A.label(fixed[0]) if len(fixed) == 1 else None,
        )


class MapModel(BaseModel):
    source:  str
    target:  str
    mapping: dict[str, str]

    @classmethod
    def of(cls, h: Homomorphism) -> MapModel:
        return cls(source=h.source.name, target=h.target.name, mapping=h.as_dict())


class Check(BaseModel):
    check:  str
    passed: bool
    detail: str = ""

    @classmethod
    def of(cls, c: ConditionCheck) -> Check:
        return cls(check=c.check, passed=c.passed, detail=c.detail)


# ──────────────────────────────────────────────────────────────────
# SINGLE-ALGEBRA COMMANDS
# ──────────────────────────────────────────────────────────────────

class EvalResult(BaseModel):
    algebra:   str
    term:      str
    valuation: dict[str, str]
    value:     str


class CheckResult(BaseModel):
    algebra:        str
    statement:      str
    holds:          bool
    counterexample: Optional[dict[str, str]] = None

    @classmethod
    def of(cls, statement: str, verdict: Verdict) -> CheckResult:
        return cls(algebra=verdict.algebra.name, statement=statement,
                   holds=verdict.holds, counterexample=verdict.labelled())


class PassivityResult(BaseModel):
    algebra:   str
    statement: str
    witnessed: bool
    realized:  Optional[dict[str, str]] = None     # least valuation meeting every antecedent


class ConsequenceResult(BaseModel):
    matrix:         str
    premises:       list[str]
    conclusion:     str
    holds:          bool
    counterexample: Optional[dict[str, str]] = None


class DeductionResult(BaseModel):
    matrix:   str
    premises: list[str]
    psi:      str
    phi:      str
    agrees:   bool


class DerivationResult(BaseModel):
    name:       str
    valid:      bool
    conclusion: Optional[str] = None
    step:       Optional[int] = None
    reason:     str = ""
    notes:      list[str] = Field(default_factory=list)

    @classmethod
    def of(cls, v: DerivationVerdict) -> DerivationResult:
        return cls(
            name=v.name, valid=v.valid,
            conclusion=render_term(v.conclusion) if v.conclusion is not None else None,
            step=v.step, reason=v.reason, notes=list(v.notes),
        )


class FiberModel(BaseModel):
    index:      str
    elements:   list[str]
    designated: str


class DecompositionResult(BaseModel):
    algebra:    str
    fibers:     list[FiberModel]
    join:       dict[str, dict[str, str]]
    conditions: list[Check]

    @classmethod
    def of(cls, d: PlonkaDecomposition, conditions: list[ConditionCheck]) -> DecompositionResult:
        A, S = d.algebra, d.system
        fibers = [
            FiberModel(
                index=S.indices[i],
                elements=[A.label(x) for x in block],
                designated=A.label(d.designated_element(i)),
            )
            for i, block in enumerate(d.members)
        ]
        join = {S.indices[i]: {S.indices[j]: S.indices[S.join[i][j]] for j in range(len(S.indices))}
                for i in range(len(S.indices))}
        return cls(algebra=A.name, fibers=fibers, join=join, conditions=[Check.of(c) for c in conditions])


class ClassificationResult(BaseModel):
    algebra:     str
    verdict:     str
    exit_code:   int
    reason:      str = ""
    witness:     Optional[MapModel] = None
    axioms:      Optional[str] = None               # first failing axiom, None when all hold
    short_basis: Optional[str] = None
    separation:  str

    @classmethod
    def of(cls, c: Classification) -> ClassificationResult:
        return cls(
            algebra=c.algebra.name, verdict=str(c.verdict), exit_code=c.exit_code, reason=c.reason,
            witness=MapModel.of(c.witness) if c.witness else None,
            axioms=c.evidence.axioms, short_basis=c.evidence.short_basis,
            separation=c.evidence.separation.describe(),
        )


class RetractionResult(BaseModel):
    algebra: str
    atom:    str
    r:       MapModel
    iota:    MapModel


class ComposeResult(BaseModel):
    system:       str
    algebra:      AlgebraSummary
    conditions:   list[Check]
    algebra_text: str


class AmalgamResult(BaseModel):
    cls:          Literal["bca", "nbca"]
    valid:        bool
    pairs:        int = 0
    reason:       str = ""
    amalgam:      Optional[AlgebraSummary] = None
    h:            Optional[MapModel] = None
    k:            Optional[MapModel] = None
    algebra_text: str = ""


class EnumeratedAlgebra(BaseModel):
    name:    str
    size:    int
    verdict: str


class EnumerationResult(BaseModel):
    max_size:  int
    count:     int
    by_size:   dict[int, int]
    algebras:  list[EnumeratedAlgebra]


# ──────────────────────────────────────────────────────────────────
# SWEEPS
# ──────────────────────────────────────────────────────────────────

class ClassVerdictModel(BaseModel):
    representative: str
    terms:          int
    theorem:        list[bool]


class AgreementResult(BaseModel):
    matrices:      list[str]
    max_depth:     int
    variables:     list[str]
    classes:       int
    terms:         int
    theorems:      list[int]
    agrees:        bool
    discrepancies: list[ClassVerdictModel]

    @classmethod
    def of(cls, r: AgreementReport) -> AgreementResult:
        return cls(
            matrices=list(r.matrices), max_depth=r.max_depth, variables=list(r.variables),
            classes=r.classes, terms=r.terms, theorems=list(r.theorems), agrees=r.agrees,
            discrepancies=[ClassVerdictModel(representative=v.representative, terms=v.terms,
                                             theorem=list(v.theorem)) for v in r.discrepancies],
        )


class DeductionSweepResult(BaseModel):
    matrix:     str
    max_depth:  int
    variables:  list[str]
    classes:    int
    triples:    int
    instances:  int
    mismatches: int
    holds:      bool
    violations: list[dict[str, Optional[str]]]

    @classmethod
    def of(cls, r: DeductionReport) -> DeductionSweepResult:
        return cls(
            matrix=r.matrix, max_depth=r.max_depth, variables=list(r.variables), classes=r.classes,
            triples=r.triples, instances=r.instances, mismatches=r.mismatches, holds=r.holds,
            violations=[{"premise": v.premise, "psi": v.psi, "phi": v.phi} for v in r.violations],
        )


class SchemaScanModel(BaseModel):
    schema_id:  str
    instances:  int
    violations: list[str]


class SoundnessResult(BaseModel):
    max_depth:  int
    variables:  list[str]
    per_schema: int
    seed:       int
    instances:  int
    violations: int
    schemas:    list[SchemaScanModel]

    @classmethod
    def of(cls, r: SoundnessReport) -> SoundnessResult:
        return cls(
            max_depth=r.max_depth, variables=list(r.variables), per_schema=r.per_schema, seed=r.seed,
            instances=r.instances, violations=r.violations,
            schemas=[SchemaScanModel(schema_id=s.schema, instances=s.instances, violations=list(s.violations))
                     for s in r.schemas],
        )


class ClaimResult(BaseModel):
    id:             str
    group:          str
    kind:           str
    source:         str
    expect:         str
    observed:       Literal["holds", "fails", "error"]
    grade:          Literal["PASS", "FAIL", "ERROR"]
    scope:          int                              # algebras the claim was evaluated on
    algebra:        Optional[str] = None             # first algebra where it failed
    statement:      Optional[str] = None
    counterexample: Optional[dict[str, str]] = None
    detail:         str = ""
    elapsed_sec:    float = 0.0


class CorpusReport(BaseModel):
    run_at:   str
    size:     int
    algebras: list[str]
    claims:   int
    passed:   int
    failed:   int
    errors:   int
    results:  list[ClaimResult]

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.errors == 0


class MembershipRow(BaseModel):
    algebra:     str
    mutated:     bool
    axioms:      bool
    short_basis: bool
    separation:  bool
    detail:      str = ""

    @property
    def agrees(self) -> bool:
        return self.axioms == self.short_basis == self.separation


class BasisReport(BaseModel):
    max_size:      int
    mutations:     int
    seed:          int
    checked:       int
    members:       int
    disagreements: list[MembershipRow]
    rows:          list[MembershipRow]

    @property
    def ok(self) -> bool:
        return not self.disagreements


class CongruenceExtensionReport(BaseModel):
    theta:              str                 # principal congruence of b4 generated by (1, na)
    quotient_is_b2:     bool
    quotient_in_nbca:   bool
    congruences:        int                 # all congruences of b4+b2
    relative:           list[str]           # those with an NBCA quotient
    containing_pair:    list[str]           # relative ones containing (na, 1)
    proper_containing:  int
    bruteforce_agrees:  bool
    extension_fails:    bool
