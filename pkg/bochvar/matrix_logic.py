"""
matrix_logic.py — Consequence relations of finite logical matrices.

The two matrices of interest are the three-element external weak Kleene
algebra with {1} designated and the six-element fixpoint-free algebra b4+b2
with {1} designated. Everything is decided by exhaustive evaluation over
valuations; bounded sweeps over all terms are computed on semantic term
classes (terms with the same value table share every verdict) while the
reports count the syntactic terms those classes cover.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from bochvar.algebra_core import (
    FiniteAlgebra,
    Verdict,
    builtin,
    evaluate_all,
    valuation_at,
    valuation_grid,
)
from bochvar.terms import (
    BINARY_OPS,
    UNARY_OPS,
    Binary,
    QuasiIdentity,
    Rule,
    Term,
    Unary,
    atoms,
    implies,
    j,
    parse_quasi_identity,
    parse_rule,
    render_term,
    sorted_variables,
    tau,
)

log = logging.getLogger(__name__)

NF  = parse_quasi_identity("J1(x) = 1 => y = 1")
EFJ = parse_rule("J1(x) |- y")


@dataclass(frozen=True)
class LogicalMatrix:
    algebra:    FiniteAlgebra
    designated: frozenset[int]
    name:       str = ""

    def __post_init__(self):
        if not self.designated:
            raise ValueError("a logical matrix needs at least one designated element")
        if any(not 0 <= d < self.algebra.size for d in self.designated):
            raise ValueError("designated element outside the carrier")

    def designates(self, values: np.ndarray) -> np.ndarray:
        return np.isin(values, sorted(self.designated))

    def describe(self) -> str:
        labels = ",".join(self.algebra.label(d) for d in sorted(self.designated))
        return f"⟨{self.algebra.name}, {{{labels}}}⟩"


def matrix_of(A: FiniteAlgebra, name: str = "") -> LogicalMatrix:
    """A with {1} designated."""
    return LogicalMatrix(A, frozenset({A.one}), name or A.name)


def bochvar_matrix() -> LogicalMatrix:
    return matrix_of(builtin("wke"), "external")


def nonparaconsistent_matrix() -> LogicalMatrix:
    return matrix_of(builtin("b4+b2"), "nonparaconsistent")


# ──────────────────────────────────────────────────────────────────
# CONSEQUENCE
# ──────────────────────────────────────────────────────────────────

def consequence(M: LogicalMatrix, premises: Iterable[Term], phi: Term) -> Verdict:
    """Holds iff every valuation designating all premises designates phi."""
    premises = tuple(premises)
    A = M.algebra
    names = sorted_variables(*premises, phi)
    grid = valuation_grid(A.size, len(names))
    memo: dict = {}
    ok = np.ones(grid.shape[1], dtype=bool)
    for p in premises:
        ok &= M.designates(evaluate_all(A, p, names, grid, memo))
    failing = np.flatnonzero(ok & ~M.designates(evaluate_all(A, phi, names, grid, memo)))
    if failing.size == 0:
        return Verdict(True, algebra=A)
    return Verdict(False, valuation_at(grid, names, int(failing[0])), A)


def is_theorem(M: LogicalMatrix, phi: Term) -> Verdict:
    return consequence(M, (), phi)


def check_deduction_instance(M: LogicalMatrix, premises: Sequence[Term], psi: Term, phi: Term) -> bool:
    """Γ, ψ ⊢ φ agrees with Γ ⊢ J2ψ → J2φ."""
    left = consequence(M, (*premises, psi), phi)
    right = consequence(M, premises, implies(j(2, psi), j(2, phi)))
    return left.holds == right.holds


def rule_derivable(M: LogicalMatrix, rule: Rule) -> Verdict:
    return consequence(M, rule.premises, rule.conclusion)


def witness_passivity(q: QuasiIdentity | Rule, A: FiniteAlgebra) -> Verdict:
    """
    Holds when no valuation into A satisfies every antecedent; otherwise the
    counterexample is the least valuation that does. Rules are read through
    their premises t ≈ 1.
    """
    antecedents = tuple(tau(p) for p in q.premises) if isinstance(q, Rule) else q.antecedents
    names = sorted_variables(q)
    grid = valuation_grid(A.size, len(names))
    if not antecedents:
        return Verdict(False, valuation_at(grid, names, 0), A)
    memo: dict = {}
    realized = np.ones(grid.shape[1], dtype=bool)
    for eq in antecedents:
        realized &= evaluate_all(A, eq.lhs, names, grid, memo) == evaluate_all(A, eq.rhs, names, grid, memo)
    hits = np.flatnonzero(realized)
    if hits.size == 0:
        return Verdict(True, algebra=A)
    return Verdict(False, valuation_at(grid, names, int(hits[0])), A)


# ──────────────────────────────────────────────────────────────────
# SEMANTIC TERM CLASSES
# ──────────────────────────────────────────────────────────────────

@dataclass
class TermClasses:
    """
    Terms up to `max_depth` over `names`, grouped by their joint value table
    on every algebra in `algebras`. counts[c] is the number of syntactic
    terms of depth ≤ max_depth in class c; representatives[c] is the first
    term found for it.
    """

    algebras:        tuple[FiniteAlgebra, ...]
    names:           tuple[str, ...]
    max_depth:       int
    values:          np.ndarray
    segments:        list[slice]
    representatives: list[Term]
    counts:          list[int]

    def __len__(self) -> int:
        return len(self.representatives)

    @property
    def total_terms(self) -> int:
        return sum(self.counts)

    def segment(self, k: int) -> np.ndarray:
        return self.values[:, self.segments[k]]


CHUNK_ROWS = 200_000


def _unique_rows(block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First index and inverse of each distinct row."""
    block = np.ascontiguousarray(block)
    keys = block.view(np.dtype((np.void, block.shape[1]))).ravel()
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    return first, inverse.ravel()


def term_classes(algebras: Sequence[FiniteAlgebra], names: Sequence[str], max_depth: int) -> TermClasses:
    algebras = tuple(algebras)
    names = tuple(names)
    grids = [valuation_grid(A.size, len(names)) for A in algebras]
    widths = [g.shape[1] for g in grids]
    starts = np.cumsum([0, *widths])
    segments = [slice(int(starts[k]), int(starts[k + 1])) for k in range(len(algebras))]
    width = int(starts[-1])

    index: dict[bytes, int] = {}
    rows: list[np.ndarray] = []
    reps: list[Term] = []

    def lookup(row: np.ndarray, term: Term) -> int:
        key = row.tobytes()
        c = index.get(key)
        if c is None:
            c = index[key] = len(reps)
            rows.append(row.copy())
            reps.append(term)
        return c

    base_counts: dict[int, int] = {}
    for t in atoms(names):
        row = np.concatenate(
            [evaluate_all(A, t, names, g).astype(np.uint8) for A, g in zip(algebras, grids)]
        )
        c = lookup(row, t)
        base_counts[c] = base_counts.get(c, 0) + 1

    def absorb(block: np.ndarray, weights: np.ndarray, make_term, fresh: dict[int, int]) -> None:
        first, inverse = _unique_rows(block)
        sums = np.zeros(len(first), dtype=np.int64)
        np.add.at(sums, inverse, weights)
        for u, f in enumerate(first.tolist()):
            c = lookup(block[f], make_term(f))
            fresh[c] = fresh.get(c, 0) + int(sums[u])

    counts = dict(base_counts)
    for d in range(1, max_depth + 1):
        known = len(reps)
        V = np.stack(rows[:known])
        weight = np.asarray([counts.get(c, 0) for c in range(known)], dtype=np.int64)
        fresh = dict(base_counts)

        for op in UNARY_OPS:
            out = np.empty_like(V)
            for A, seg in zip(algebras, segments):
                out[:, seg] = A.op(op).astype(np.uint8)[V[:, seg]]
            absorb(out, weight, lambda f, op=op: Unary(op, reps[f]), fresh)

        step = max(1, CHUNK_ROWS // known)
        for op in BINARY_OPS:
            tables = [A.op(op).astype(np.uint8) for A in algebras]
            for lo in range(0, known, step):
                hi = min(known, lo + step)
                block = np.empty((hi - lo, known, width), dtype=np.uint8)
                for table, seg in zip(tables, segments):
                    block[:, :, seg] = table[V[lo:hi, None, seg], V[None, :, seg]]
                weights = (weight[lo:hi, None] * weight[None, :]).ravel()
                absorb(
                    block.reshape(-1, width), weights,
                    lambda f, op=op, lo=lo: Binary(op, reps[lo + f // known], reps[f % known]),
                    fresh,
                )
        counts = fresh
        log.debug(f"depth {d}: {len(reps)} classes, {sum(counts.values())} terms")

    return TermClasses(
        algebras, names, max_depth, np.stack(rows), segments,
        reps, [counts.get(c, 0) for c in range(len(reps))],
    )


# ──────────────────────────────────────────────────────────────────
# BOUNDED SWEEPS
# ──────────────────────────────────────────────────────────────────

@dataclass
class ClassVerdict:
    representative: str
    terms:          int
    theorem:        tuple[bool, ...]


@dataclass
class AgreementReport:
    matrices:      tuple[str, ...]
    max_depth:     int
    variables:     tuple[str, ...]
    classes:       int
    terms:         int
    theorems:      tuple[int, ...]
    discrepancies: list[ClassVerdict] = field(default_factory=list)
    verdicts:      list[ClassVerdict] = field(default_factory=list)

    @property
    def agrees(self) -> bool:
        return not self.discrepancies


def theoremhood_agreement(
    max_depth: int = 3,
    var_count: int = 2,
    matrices: Optional[Sequence[LogicalMatrix]] = None,
) -> AgreementReport:
    """Terms that are theorems of some but not all of the matrices (none expected for the default pair)."""
    matrices = tuple(matrices or (bochvar_matrix(), nonparaconsistent_matrix()))
    names = tuple("xyzuvw"[:var_count])
    classes = term_classes([M.algebra for M in matrices], names, max_depth)
    theorem = np.stack(
        [M.designates(classes.segment(k)).all(axis=1) for k, M in enumerate(matrices)], axis=1
    )
    verdicts = [
        ClassVerdict(render_term(classes.representatives[c]), classes.counts[c],
                     tuple(bool(v) for v in theorem[c]))
        for c in range(len(classes))
    ]
    split = [v for v in verdicts if len(set(v.theorem)) > 1]
    report = AgreementReport(
        matrices=tuple(M.describe() for M in matrices),
        max_depth=max_depth,
        variables=names,
        classes=len(classes),
        terms=classes.total_terms,
        theorems=tuple(
            sum(classes.counts[c] for c in range(len(classes)) if theorem[c, k])
            for k in range(len(matrices))
        ),
        discrepancies=split,
        verdicts=verdicts,
    )
    log.info(f"theoremhood agreement d={max_depth} k={var_count}: "
             f"{report.classes} classes, {report.terms} terms, {len(split)} discrepancies")
    return report


@dataclass
class DeductionViolation:
    premise:    Optional[str]
    psi:        str
    phi:        str


@dataclass
class DeductionReport:
    matrix:      str
    max_depth:   int
    variables:   tuple[str, ...]
    classes:     int
    triples:     int               # class-level (premise or none, ψ, φ) combinations checked
    instances:   int               # syntactic instances those combinations cover
    mismatches:  int = 0            # class triples where the two sides disagree
    violations:  list[DeductionViolation] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.mismatches == 0


def deduction_sweep(
    M: Optional[LogicalMatrix] = None,
    max_depth: int = 3,
    var_count: int = 2,
    limit: int = 20,
) -> DeductionReport:
    """
    check_deduction_instance over every (Γ, ψ, φ) with |Γ| ≤ 1. Premises only
    matter through the set of valuations they designate, so they are grouped
    by designation mask.
    """
    M = M or bochvar_matrix()
    A = M.algebra
    names = tuple("xyzuvw"[:var_count])
    classes = term_classes([A], names, max_depth)
    values = classes.values.astype(np.intp)
    width = values.shape[1]
    weights = 1 << np.arange(width, dtype=np.int64)

    def masks(vals: np.ndarray) -> np.ndarray:
        return (M.designates(vals) * weights).sum(axis=-1)

    full = (1 << width) - 1
    designated = masks(values)
    j2 = A.op("J2")[values]
    not_j2 = A.op("neg")[j2]

    premise_rep: dict[int, Optional[Term]] = {full: None}
    for c, g in enumerate(designated.tolist()):
        premise_rep.setdefault(g, classes.representatives[c])
    gammas = [full, *sorted(g for g in premise_rep if g != full)]
    G = np.asarray(gammas, dtype=np.int64)[:, None]

    violations: list[DeductionViolation] = []
    mismatches = 0
    table_or = A.op("or")
    for p in range(len(classes)):
        psi = designated[p]
        implication = masks(table_or[not_j2[p][None, :], j2])
        left = (G & psi & ~designated[None, :]) == 0
        right = (G & ~implication[None, :] & full) == 0
        bad = np.argwhere(left != right)
        mismatches += len(bad)
        for gi, phi in bad[: max(0, limit - len(violations))]:
            g = gammas[int(gi)]
            rep = None if g == full else premise_rep[g]
            violations.append(DeductionViolation(
                render_term(rep) if rep is not None else None,
                render_term(classes.representatives[p]),
                render_term(classes.representatives[int(phi)]),
            ))
    total = classes.total_terms
    report = DeductionReport(
        matrix=M.describe(),
        max_depth=max_depth,
        variables=names,
        classes=len(classes),
        triples=len(gammas) * len(classes) ** 2,
        instances=(total + 1) * total * total,
        mismatches=mismatches,
        violations=violations,
    )
    log.info(f"deduction sweep on {report.matrix}: {report.triples} class triples, "
             f"{report.instances} instances, {len(violations)} violations")
    return report
