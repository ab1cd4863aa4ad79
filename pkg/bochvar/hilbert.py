"""
hilbert.py — Checker for the Hilbert calculus of the external logic.

Axiom schemas A1–A29 plus modus ponens. Schemas written with ≡ are stored
already expanded into the object language, so derivations only ever contain
¬ ∨ ∧ J0 J1 J2 0 1. Metavariables phi / psi / chi range over all formulas,
alpha / beta / gamma over external formulas only.

Derivation file:
    derive <name>
    hyp <term>                      (any number, referenced as 1, 2, …)
    <n> axiom <A-id> : <term>
    <n> hyp <h> : <term>
    <n> mp <i> <j> : <term>         (step j must read: step i -> term)
    end
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from bochvar.errors import FormatError, TermSyntaxError
from bochvar.matrix_logic import bochvar_matrix, is_theorem
from bochvar.terms import (
    Binary,
    Const,
    Term,
    Unary,
    Var,
    enumerate_terms,
    expand_equiv,
    implies,
    is_external,
    parse_term,
    render_term,
    substitute,
)

log = logging.getLogger(__name__)

GENERAL  = ("phi", "psi", "chi")
EXTERNAL = ("alpha", "beta", "gamma")
GREEK    = {"alpha": "α", "beta": "β", "gamma": "γ", "phi": "φ", "psi": "ψ", "chi": "χ"}


# ──────────────────────────────────────────────────────────────────
# SCHEMAS
# ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Schema:
    id:        str
    text:      str
    patterns:  tuple[tuple[str, Term], ...]     # (instance label, pattern)

    @property
    def metavariables(self) -> tuple[str, ...]:
        names = set()
        for _, p in self.patterns:
            names |= _metavars(p)
        return tuple(m for m in (*GENERAL, *EXTERNAL) if m in names)


def _metavars(t: Term) -> set[str]:
    match t:
        case Var(name):
            return {name} if name in GENERAL or name in EXTERNAL else set()
        case Const():
            return set()
        case Unary(_, child):
            return _metavars(child)
        case Binary(_, left, right):
            return _metavars(left) | _metavars(right)
    return set()


def _equiv(lhs: str, rhs: str) -> Term:
    return expand_equiv(parse_term(lhs), parse_term(rhs))


def _plain(text: str) -> tuple[tuple[str, Term], ...]:
    return (("", parse_term(text)),)


def _eq(lhs: str, rhs: str) -> tuple[tuple[str, Term], ...]:
    return (("", _equiv(lhs, rhs)),)


def _build_schemas() -> dict[str, Schema]:
    s: list[Schema] = [
        Schema("A1",  "(φ∨φ) ≡ φ",                   _eq("phi | phi", "phi")),
        Schema("A2",  "(φ∨ψ) ≡ (ψ∨φ)",               _eq("phi | psi", "psi | phi")),
        Schema("A3",  "((φ∨ψ)∨χ) ≡ (φ∨(ψ∨χ))",       _eq("(phi | psi) | chi", "phi | (psi | chi)")),
        Schema("A4",  "φ∧(ψ∨χ) ≡ (φ∧ψ)∨(φ∧χ)",       _eq("phi & (psi | chi)", "(phi & psi) | (phi & chi)")),
        Schema("A5",  "¬¬φ ≡ φ",                     _eq("~~phi", "phi")),
        Schema("A6",  "¬1 ≡ 0",                      _eq("~1", "0")),
        Schema("A7",  "¬(φ∨ψ) ≡ ¬φ∧¬ψ",              _eq("~(phi | psi)", "~phi & ~psi")),
        Schema("A8",  "0∨φ ≡ φ",                     _eq("0 | phi", "phi")),
        Schema("A9",  "J2 α ≡ α",                    _eq("J2 alpha", "alpha")),
        Schema("A10", "J0 α ≡ ¬α",                   _eq("J0 alpha", "~alpha")),
        Schema("A11", "J1 α ≡ 0",                    _eq("J1 alpha", "0")),
        Schema("A12", "J_i ¬φ ≡ J_{2-i} φ",
               tuple((f"i={i}", _equiv(f"J{i} ~phi", f"J{2 - i} phi")) for i in range(3))),
        Schema("A13", "J_i φ ≡ ¬(J_j φ ∨ J_k φ)",
               tuple((f"i={i},j={j},k={k}", _equiv(f"J{i} phi", f"~(J{j} phi | J{k} phi)"))
                     for i, j, k in itertools.permutations(range(3)))),
        Schema("A14", "(J_i φ ∨ ¬J_i φ) ≡ 1",
               tuple((f"i={i}", _equiv(f"J{i} phi | ~J{i} phi", "1")) for i in range(3))),
        Schema("A15", "((J_i φ ∨ J_k ψ) ∧ J_i φ) ≡ J_i φ",
               tuple((f"i={i},k={k}", _equiv(f"(J{i} phi | J{k} psi) & J{i} phi", f"J{i} phi"))
                     for i in range(3) for k in range(3))),
        Schema("A16", "(φ ∨ J_i φ) ≡ φ",
               tuple((f"i={i}", _equiv(f"phi | J{i} phi", "phi")) for i in (1, 2))),
        Schema("A17", "J0(φ∨ψ) ≡ J0 φ ∧ J0 ψ",       _eq("J0 (phi | psi)", "J0 phi & J0 psi")),
        Schema("A18", "J2(φ∨ψ) ≡ (J2φ∧J2ψ) ∨ (J2φ∧J2¬ψ) ∨ (J2¬φ∧J2ψ)",
               _eq("J2 (phi | psi)",
                   "(J2 phi & J2 psi) | (J2 phi & J2 ~psi) | (J2 ~phi & J2 psi)")),
        Schema("A19", "α → (β → α)",                  _plain("alpha -> (beta -> alpha)")),
        Schema("A20", "(α → (β → γ)) → ((α → β) → (α → γ))",
               _plain("(alpha -> (beta -> gamma)) -> ((alpha -> beta) -> (alpha -> gamma))")),
        Schema("A21", "α ∧ β → α",                    _plain("alpha & beta -> alpha")),
        Schema("A22", "α ∧ β → β",                    _plain("alpha & beta -> beta")),
        Schema("A23", "(α → β) → ((α → γ) → (α → β ∧ γ))",
               _plain("(alpha -> beta) -> ((alpha -> gamma) -> (alpha -> beta & gamma))")),
        Schema("A24", "α → α ∨ β",                    _plain("alpha -> alpha | beta")),
        Schema("A25", "β → α ∨ β",                    _plain("beta -> alpha | beta")),
        Schema("A26", "(α → γ) → ((β → γ) → (α ∨ β → γ))",
               _plain("(alpha -> gamma) -> ((beta -> gamma) -> (alpha | beta -> gamma))")),
        Schema("A27", "(α → β) → ((α → ¬β) → ¬α)",
               _plain("(alpha -> beta) -> ((alpha -> ~beta) -> ~alpha)")),
        Schema("A28", "α → (¬α → β)",                 _plain("alpha -> (~alpha -> beta)")),
        Schema("A29", "¬¬α → α",                      _plain("~~alpha -> alpha")),
    ]
    return {schema.id: schema for schema in s}


SCHEMAS = _build_schemas()


@dataclass(frozen=True)
class SchemaMatch:
    matched:      bool
    schema:       str
    substitution: dict[str, Term] = field(default_factory=dict)
    instance:     str = ""
    reason:       str = ""

    def __bool__(self) -> bool:
        return self.matched

    def describe(self) -> str:
        if not self.matched:
            return self.reason
        binds = ", ".join(f"{GREEK[m]}↦{render_term(t)}" for m, t in self.substitution.items())
        where = f" [{self.instance}]" if self.instance else ""
        return f"{self.schema}{where}: {binds}"


def _match(pattern: Term, term: Term, sigma: dict[str, Term]) -> bool:
    match pattern:
        case Var(name) if name in GENERAL or name in EXTERNAL:
            bound = sigma.get(name)
            if bound is None:
                sigma[name] = term
                return True
            return bound == term
        case Var() | Const():
            return pattern == term
        case Unary(op, child):
            return isinstance(term, Unary) and term.op == op and _match(child, term.child, sigma)
        case Binary(op, left, right):
            return (isinstance(term, Binary) and term.op == op
                    and _match(left, term.left, sigma) and _match(right, term.right, sigma))
    return False


def match_schema(schema_id: str, phi: Term) -> SchemaMatch:
    """First-order match of phi against the schema's patterns, then the external-formula guard."""
    schema = SCHEMAS.get(schema_id)
    if schema is None:
        return SchemaMatch(False, schema_id, reason=f"unknown schema {schema_id}")
    guard_failure: Optional[str] = None
    for label, pattern in schema.patterns:
        sigma: dict[str, Term] = {}
        if not _match(pattern, phi, sigma):
            continue
        ordered = {m: sigma[m] for m in (*GENERAL, *EXTERNAL) if m in sigma}
        bad = [m for m in EXTERNAL if m in ordered and not is_external(ordered[m])]
        if bad:
            guard_failure = guard_failure or f"{GREEK[bad[0]]} not external"
            continue
        return SchemaMatch(True, schema_id, ordered, label)
    return SchemaMatch(False, schema_id, reason=guard_failure or f"formula does not have the shape of {schema_id}")


def instantiate(schema_id: str, sigma: dict[str, Term], instance: int = 0) -> Term:
    return substitute(SCHEMAS[schema_id].patterns[instance][1], sigma)


# ──────────────────────────────────────────────────────────────────
# DERIVATIONS
# ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class AxiomStep:
    number:  int
    schema:  str
    formula: Term


@dataclass(frozen=True)
class HypothesisStep:
    number:     int
    hypothesis: int
    formula:    Term


@dataclass(frozen=True)
class ModusPonensStep:
    number:  int
    minor:   int       # proves φ
    major:   int       # proves φ → ψ
    formula: Term      # ψ


Step = Union[AxiomStep, HypothesisStep, ModusPonensStep]


@dataclass
class Derivation:
    name:       str
    hypotheses: tuple[Term, ...]
    steps:      tuple[Step, ...]

    @property
    def conclusion(self) -> Optional[Term]:
        return self.steps[-1].formula if self.steps else None


@dataclass
class DerivationVerdict:
    valid:      bool
    name:       str
    conclusion: Optional[Term] = None
    step:       Optional[int] = None
    reason:     str = ""
    notes:      list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.valid

    def describe(self) -> str:
        if self.valid:
            return f"valid: {render_term(self.conclusion)}"
        return f"invalid at step {self.step}: {self.reason}"


def check_derivation(d: Derivation) -> DerivationVerdict:
    formulas: list[Term] = []
    notes: list[str] = []
    for position, step in enumerate(d.steps, 1):
        match step:
            case AxiomStep(_, schema, formula):
                m = match_schema(schema, formula)
                if not m.matched:
                    return DerivationVerdict(False, d.name, step=position, reason=m.reason, notes=notes)
                notes.append(f"{position}: {m.describe()}")
            case HypothesisStep(_, h, formula):
                if not 1 <= h <= len(d.hypotheses):
                    return DerivationVerdict(False, d.name, step=position, reason=f"no hypothesis {h}", notes=notes)
                if d.hypotheses[h - 1] != formula:
                    return DerivationVerdict(False, d.name, step=position, reason="hypothesis mismatch", notes=notes)
            case ModusPonensStep(_, i, j, formula):
                if not (1 <= i < position and 1 <= j < position):
                    return DerivationVerdict(False, d.name, step=position, reason="step index refers forward", notes=notes)
                if formulas[j - 1] != implies(formulas[i - 1], formula):
                    return DerivationVerdict(False, d.name, step=position,
                                             reason="major premise shape mismatch", notes=notes)
        formulas.append(step.formula)
    if not formulas:
        return DerivationVerdict(False, d.name, reason="empty derivation")
    return DerivationVerdict(True, d.name, formulas[-1], notes=notes)


def parse_derivation(text: str, source: str = "<text>") -> Derivation:
    lines = [(n, raw.split("#", 1)[0].strip()) for n, raw in enumerate(text.splitlines(), 1)]
    lines = [(n, line) for n, line in lines if line]
    if not lines:
        raise FormatError("empty derivation file", source)
    number, line = lines[0]
    head = line.split()
    if len(head) != 2 or head[0] != "derive":
        raise FormatError("expected `derive <name>`", source, number)
    name = head[1]
    hypotheses: list[Term] = []
    steps: list[Step] = []

    def term(text: str, at: int) -> Term:
        try:
            return parse_term(text)
        except TermSyntaxError as e:
            raise FormatError(str(e), source, at) from None

    finished = False
    for number, line in lines[1:]:
        if finished:
            raise FormatError("trailing content after `end`", source, number)
        if line == "end":
            finished = True
            continue
        if line.startswith("hyp ") and ":" not in line:
            hypotheses.append(term(line[4:], number))
            continue
        head, sep, body = line.partition(":")
        words = head.split()
        if not sep or not words:
            raise FormatError(f"unrecognised line {line!r}", source, number)
        try:
            n = int(words[0])
        except ValueError:
            raise FormatError(f"step number expected, got {words[0]!r}", source, number) from None
        if n != len(steps) + 1:
            raise FormatError(f"step {n} out of sequence", source, number)
        formula = term(body, number)
        match words[1:]:
            case ["axiom", schema]:
                steps.append(AxiomStep(n, schema, formula))
            case ["hyp", h] if h.isdigit():
                steps.append(HypothesisStep(n, int(h), formula))
            case ["mp", i, j] if i.isdigit() and j.isdigit():
                steps.append(ModusPonensStep(n, int(i), int(j), formula))
            case _:
                raise FormatError(f"unrecognised step {head.strip()!r}", source, number)
    if not finished:
        raise FormatError("missing `end`", source)
    return Derivation(name, tuple(hypotheses), tuple(steps))


def load_derivation(path: str) -> Derivation:
    p = Path(path)
    if not p.is_file():
        bundled = Path(__file__).parent / "data" / p.name
        if not bundled.is_file():
            raise FormatError("no such derivation file", path)
        p = bundled
    return parse_derivation(p.read_text(encoding="utf-8"), str(p))


# ──────────────────────────────────────────────────────────────────
# SOUNDNESS SCAN
# ──────────────────────────────────────────────────────────────────

@dataclass
class SchemaScan:
    schema:     str
    instances:  int
    violations: list[str] = field(default_factory=list)


@dataclass
class SoundnessReport:
    max_depth:  int
    variables:  tuple[str, ...]
    per_schema: int
    seed:       int
    schemas:    list[SchemaScan] = field(default_factory=list)

    @property
    def instances(self) -> int:
        return sum(s.instances for s in self.schemas)

    @property
    def violations(self) -> int:
        return sum(len(s.violations) for s in self.schemas)


def soundness_scan(max_depth: int = 2, var_count: int = 2, per_schema: int = 50, seed: int = 0) -> SoundnessReport:
    """Sampled instances of every schema, each checked to be a theorem of the external matrix."""
    names = tuple("xyzuvw"[:var_count])
    pool = list(enumerate_terms(names, max_depth))
    external = [t for t in pool if is_external(t)]
    rng = random.Random(seed)
    M = bochvar_matrix()
    report = SoundnessReport(max_depth, names, per_schema, seed)
    for schema in SCHEMAS.values():
        scan = SchemaScan(schema.id, 0)
        for n in range(per_schema):
            _, pattern = schema.patterns[n % len(schema.patterns)]
            sigma = {m: rng.choice(external if m in EXTERNAL else pool) for m in sorted(_metavars(pattern))}
            instance = substitute(pattern, sigma)
            scan.instances += 1
            if not is_theorem(M, instance).holds:
                scan.violations.append(render_term(instance))
        report.schemas.append(scan)
    log.info(f"soundness scan: {report.instances} instances, {report.violations} violations")
    return report
