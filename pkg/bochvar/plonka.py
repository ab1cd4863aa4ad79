"""
plonka.py — Semilattice direct systems of Boolean algebras and their sums.

    plonka_sum      glue the fibers along the transition maps
    attach_J        rebuild J0 / J1 / J2 on a sum from designated elements
    decompose       split a finite algebra back into its direct system
    enumerate_bca   all finite Bochvar algebras up to a size, one per iso class

Fibers are stored in the Boolean signature and transitions as plain index
maps; the sum tags every element with its fiber, so fiber carriers never
overlap whatever labels the input files use.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from bochvar.algebra_core import (
    FiniteAlgebra,
    Homomorphism,
    Signature,
    _strip,
    element_invariants,
    find_isomorphism,
    holds_quasi_identity,
    load_algebra,
    read_algebra_block,
    trivial_algebra,
)
from bochvar.config import load_settings
from bochvar.errors import DecompositionError, DirectSystemError, FormatError, SizeGuardError
from bochvar.terms import QuasiIdentity, parse_equation

log = logging.getLogger(__name__)

BOOLEAN_IDENTITIES = [
    "x | y = y | x",
    "x & y = y & x",
    "x | (y | z) = (x | y) | z",
    "x & (y & z) = (x & y) & z",
    "x & (x | y) = x",
    "x | (x & y) = x",
    "x & (y | z) = (x & y) | (x & z)",
    "x | ~x = 1",
    "x & ~x = 0",
    "~(x | y) = ~x & ~y",
]

INVOLUTIVE_BISEMILATTICE_IDENTITIES = [
    "x | x = x",
    "x | y = y | x",
    "x | (y | z) = (x | y) | z",
    "~~x = x",
    "x & y = ~(~x | ~y)",
    "x & (~x | y) = x & y",
    "0 | x = x",
    "1 = ~0",
]


def _identities(texts: Sequence[str]) -> list[QuasiIdentity]:
    return [QuasiIdentity((), parse_equation(t)) for t in texts]


def _first_failing(A: FiniteAlgebra, texts: Sequence[str]) -> Optional[str]:
    for text, q in zip(texts, _identities(texts)):
        verdict = holds_quasi_identity(A, q)
        if not verdict.holds:
            return f"{text} fails at {verdict.describe()}"
    return None


@dataclass(frozen=True)
class ConditionCheck:
    check:  str
    passed: bool
    detail: str = ""


# ──────────────────────────────────────────────────────────────────
# DIRECT SYSTEMS
# ──────────────────────────────────────────────────────────────────

@dataclass
class SemilatticeDirectSystem:
    """
    Index semilattice (join table over index positions, least index `bottom`),
    one Boolean fiber per index and a transition map for every pair i < j.
    `designated` optionally fixes a_i as a bottom-fiber element per index.
    """

    name:        str
    indices:     tuple[str, ...]
    join:        tuple[tuple[int, ...], ...]
    bottom:      int
    fibers:      tuple[FiniteAlgebra, ...]
    transitions: dict[tuple[int, int], tuple[int, ...]]
    designated:  dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        self.fibers = tuple(
            f.reduct(Signature.BOOLEAN) if f.has_j else f for f in self.fibers
        )
        self.join = tuple(tuple(row) for row in self.join)

    def leq(self, i: int, j: int) -> bool:
        return self.join[i][j] == j

    def strictly_below(self, i: int, j: int) -> bool:
        return i != j and self.leq(i, j)

    def transition(self, i: int, j: int) -> tuple[int, ...]:
        if i == j:
            return tuple(range(self.fibers[i].size))
        return self.transitions[(i, j)]

    def hom(self, i: int, j: int) -> Homomorphism:
        return Homomorphism(self.fibers[i], self.fibers[j], self.transition(i, j))

    @property
    def size(self) -> int:
        return sum(f.size for f in self.fibers)

    def offsets(self) -> list[int]:
        return list(itertools.accumulate((f.size for f in self.fibers), initial=0))[:-1]

    def validate(self) -> None:
        """Raise DirectSystemError naming the first violated condition."""
        k = len(self.indices)
        J = self.join
        if len(J) != k or any(len(row) != k for row in J):
            raise DirectSystemError("join table shape", f"expected {k}x{k}")
        for i in range(k):
            if J[i][i] != i:
                raise DirectSystemError("join not idempotent", self.indices[i])
            if J[self.bottom][i] != i:
                raise DirectSystemError("bottom is not least", self.indices[i])
            for j in range(k):
                if J[i][j] != J[j][i]:
                    raise DirectSystemError("join not commutative", f"{self.indices[i]}, {self.indices[j]}")
                for m in range(k):
                    if J[J[i][j]][m] != J[i][J[j][m]]:
                        raise DirectSystemError("join not associative")
        for i, fiber in enumerate(self.fibers):
            failure = _first_failing(fiber, BOOLEAN_IDENTITIES)
            if failure:
                raise DirectSystemError("fiber is not a Boolean algebra", f"{self.indices[i]}: {failure}")
        for i in range(k):
            for j in range(k):
                if not self.strictly_below(i, j):
                    continue
                if (i, j) not in self.transitions:
                    raise DirectSystemError("missing transition", f"{self.indices[i]} → {self.indices[j]}")
                reason = self.hom(i, j).check()
                if reason:
                    raise DirectSystemError(
                        "transition is not a homomorphism", f"{self.indices[i]} → {self.indices[j]}: {reason}"
                    )
        for i in range(k):
            for j in range(k):
                for m in range(k):
                    if not (self.leq(i, j) and self.leq(j, m)):
                        continue
                    p_ij, p_jm, p_im = self.transition(i, j), self.transition(j, m), self.transition(i, m)
                    if any(p_jm[p_ij[x]] != p_im[x] for x in range(self.fibers[i].size)):
                        raise DirectSystemError(
                            "transitions do not compose",
                            f"{self.indices[i]} → {self.indices[j]} → {self.indices[m]}",
                        )

    def element_labels(self) -> list[str]:
        """Bottom-fiber labels are kept; a clashing label elsewhere gets `@index`."""
        counts: dict[str, int] = {}
        for fiber in self.fibers:
            for label in fiber.elements:
                counts[label] = counts.get(label, 0) + 1
        labels = []
        for i, fiber in enumerate(self.fibers):
            for label in fiber.elements:
                keep = i == self.bottom or counts[label] == 1
                labels.append(label if keep else f"{label}@{self.indices[i]}")
        return labels


# ── System file format ────────────────────────────────────────────

def parse_system(text: str, source: str = "<text>", base_dir: Optional[Path] = None) -> SemilatticeDirectSystem:
    lines = _strip(text)
    if not lines:
        raise FormatError("empty system file", source)
    number, line = lines[0]
    head = line.split()
    if len(head) != 2 or head[0] != "system":
        raise FormatError("expected `system <name>`", source, number)
    name = head[1]
    indices: Optional[list[str]] = None
    bottom_label: Optional[str] = None
    join_rows: Optional[list[list[str]]] = None
    fibers: dict[str, FiniteAlgebra] = {}
    hom_lines: list[tuple[int, str, str, str]] = []
    designate: dict[str, str] = {}

    def need_indices(at: int) -> list[str]:
        if indices is None:
            raise FormatError("`index` must come first", source, at)
        return indices

    pos = 1
    while pos < len(lines):
        number, line = lines[pos]
        words = line.split()
        pos += 1
        match words:
            case ["end"]:
                break
            case ["index", *labels] if labels:
                indices = labels
            case ["bottom", label]:
                bottom_label = label
            case ["join"]:
                k = len(need_indices(number))
                if pos + k > len(lines):
                    raise FormatError(f"join: expected {k} rows", source, number)
                join_rows = [lines[pos + r][1].split() for r in range(k)]
                if any(len(row) != k for row in join_rows):
                    raise FormatError(f"join: rows need {k} entries", source, number)
                pos += k
            case ["fiber", index, "inline"]:
                if pos >= len(lines):
                    raise FormatError("fiber: missing algebra block", source, number)
                fibers[index], pos = read_algebra_block(lines, pos, source)
            case ["fiber", index, "file", ref]:
                path = (base_dir / ref) if base_dir is not None else Path(ref)
                fibers[index] = load_algebra(str(path) if path.is_file() else ref)
            case ["hom", i, j, ":", *pairs]:
                hom_lines.append((number, i, j, " ".join(pairs)))
            case ["designate", index, element]:
                designate[index] = element
            case _:
                raise FormatError(f"unrecognised line {line!r}", source, number)
    else:
        raise FormatError("missing `end`", source, number)
    if pos != len(lines):
        raise FormatError("trailing content after `end`", source, lines[pos][0])

    indices = need_indices(number)
    position = {label: k for k, label in enumerate(indices)}

    def ix(label: str, at: Optional[int] = None) -> int:
        try:
            return position[label]
        except KeyError:
            raise FormatError(f"unknown index {label!r}", source, at) from None

    if join_rows is None:
        raise FormatError("missing `join` table", source)
    if bottom_label is None:
        raise FormatError("missing `bottom`", source)
    missing = [label for label in indices if label not in fibers]
    if missing:
        raise FormatError(f"no fiber for index {', '.join(missing)}", source)
    fiber_list = tuple(fibers[label] for label in indices)

    transitions: dict[tuple[int, int], tuple[int, ...]] = {}
    for at, i_label, j_label, pairs in hom_lines:
        i, j = ix(i_label, at), ix(j_label, at)
        source_fiber, target_fiber = fiber_list[i], fiber_list[j]
        image: dict[int, int] = {}
        for item in pairs.replace(",", " ").split():
            left, sep, right = item.partition("->")
            if not sep:
                raise FormatError(f"expected `<e>-><e'>`, got {item!r}", source, at)
            try:
                image[source_fiber.index(left)] = target_fiber.index(right)
            except LookupError as e:
                raise FormatError(str(e), source, at) from None
        if len(image) != source_fiber.size:
            raise FormatError(f"hom {i_label} {j_label} is not total", source, at)
        transitions[(i, j)] = tuple(image[x] for x in range(source_fiber.size))

    bottom = ix(bottom_label)
    designated = {}
    for label, element in designate.items():
        try:
            designated[ix(label)] = fiber_list[bottom].index(element)
        except LookupError as e:
            raise FormatError(str(e), source) from None

    return SemilatticeDirectSystem(
        name, tuple(indices),
        tuple(tuple(ix(v) for v in row) for row in join_rows),
        bottom, fiber_list, transitions, designated,
    )


def load_system(path: str) -> SemilatticeDirectSystem:
    p = Path(path)
    if not p.is_file():
        bundled = Path(__file__).parent / "data" / p.name
        if not bundled.is_file():
            raise FormatError("no such system file", path)
        p = bundled
    return parse_system(p.read_text(encoding="utf-8"), str(p), p.parent)


def system_to_text(S: SemilatticeDirectSystem) -> str:
    lines = [
        f"system {S.name}",
        "index " + " ".join(S.indices),
        f"bottom {S.indices[S.bottom]}",
        "join",
    ]
    lines.extend(" ".join(S.indices[v] for v in row) for row in S.join)
    for i, fiber in enumerate(S.fibers):
        lines.append(f"fiber {S.indices[i]} inline")
        lines.extend(fiber.to_text().splitlines())
    for (i, j), mp in sorted(S.transitions.items()):
        src, dst = S.fibers[i].elements, S.fibers[j].elements
        pairs = " ".join(f"{src[x]}->{dst[y]}" for x, y in enumerate(mp))
        lines.append(f"hom {S.indices[i]} {S.indices[j]} : {pairs}")
    bottom_labels = S.fibers[S.bottom].elements
    for i, a in sorted(S.designated.items()):
        lines.append(f"designate {S.indices[i]} {bottom_labels[a]}")
    lines.append("end")
    return "\n".join(lines) + "\n"


# ──────────────────────────────────────────────────────────────────
# SUM AND J-RECONSTRUCTION
# ──────────────────────────────────────────────────────────────────

def plonka_sum(S: SemilatticeDirectSystem, validate: bool = True) -> FiniteAlgebra:
    """Disjoint union of the fibers; operations are computed at the join index."""
    if validate:
        S.validate()
    offsets = S.offsets()
    tagged = [(i, a) for i, f in enumerate(S.fibers) for a in range(f.size)]
    n = len(tagged)
    neg = [offsets[i] + S.fibers[i].rows("neg")[a] for i, a in tagged]
    tables = {op: np.zeros((n, n), dtype=np.intp) for op in ("or", "and")}
    for x, (i, a) in enumerate(tagged):
        for y, (j, b) in enumerate(tagged):
            k = S.join[i][j]
            pa, pb = S.transition(i, k)[a], S.transition(j, k)[b]
            for op, table in tables.items():
                table[x, y] = offsets[k] + S.fibers[k].rows(op)[pa][pb]
    base = S.fibers[S.bottom]
    return FiniteAlgebra(
        S.name, S.element_labels(),
        neg=neg, join=tables["or"], meet=tables["and"],
        zero=offsets[S.bottom] + base.zero, one=offsets[S.bottom] + base.one,
    )


def _leq_in(B: FiniteAlgebra, x: int, y: int) -> bool:
    return B.rows("and")[x][y] == x


def _meet_all(B: FiniteAlgebra, xs: Sequence[int]) -> int:
    out = B.one
    for x in xs:
        out = B.rows("and")[out][x]
    return out


def kernel_filter_generator(S: SemilatticeDirectSystem, i: int) -> tuple[int, bool]:
    """(meet of p⁻¹(1_i), whether p⁻¹(1_i) is exactly the principal filter it generates)."""
    B = S.fibers[S.bottom]
    p = S.transition(S.bottom, i)
    top = S.fibers[i].one
    filt = {x for x in range(B.size) if p[x] == top}
    g = _meet_all(B, sorted(filt))
    principal = filt == {x for x in range(B.size) if _leq_in(B, g, x)}
    return g, principal


def interval_is_isomorphic(S: SemilatticeDirectSystem, i: int, a: int) -> bool:
    """Whether p_{bottom,i} maps the interval [0, a] bijectively onto fiber i."""
    B = S.fibers[S.bottom]
    p = S.transition(S.bottom, i)
    interval = [x for x in range(B.size) if _leq_in(B, x, a)]
    return sorted(p[x] for x in interval) == list(range(S.fibers[i].size))


def resolved_designated(S: SemilatticeDirectSystem) -> dict[int, int]:
    out = {}
    for i in range(len(S.indices)):
        out[i] = S.designated.get(i, kernel_filter_generator(S, i)[0])
    return out


def system_conditions(S: SemilatticeDirectSystem) -> list[ConditionCheck]:
    """Conditions under which the sum carries a (unique) Bochvar structure."""
    k, b = len(S.indices), S.bottom
    B = S.fibers[b]
    name = S.indices
    checks: list[ConditionCheck] = []

    not_onto = [f"{name[i]} → {name[j]}" for i in range(k) for j in range(k)
                if S.strictly_below(i, j) and not S.hom(i, j).is_surjective]
    checks.append(ConditionCheck("transitions surjective", not not_onto,
                                 "not onto: " + ", ".join(not_onto) if not_onto else ""))

    injective = [f"{name[b]} → {name[i]}" for i in range(k) if i != b and S.hom(b, i).is_injective]
    checks.append(ConditionCheck("bottom transitions not injective", not injective,
                                 "injective: " + ", ".join(injective) if injective else ""))

    generators = {i: kernel_filter_generator(S, i) for i in range(k)}
    not_principal = [name[i] for i in range(k) if not generators[i][1]]
    checks.append(ConditionCheck("kernel filters principal", not not_principal,
                                 "not principal: " + ", ".join(not_principal) if not_principal else ""))

    not_iso = [name[i] for i in range(k) if not interval_is_isomorphic(S, i, generators[i][0])]
    checks.append(ConditionCheck("interval isomorphisms", not not_iso,
                                 "not bijective: " + ", ".join(not_iso) if not_iso else ""))

    disagree = [name[i] for i in range(k)
                if generators[i][1] != interval_is_isomorphic(S, i, generators[i][0])]
    checks.append(ConditionCheck("principal filter iff interval isomorphism", not disagree,
                                 "disagree at: " + ", ".join(disagree) if disagree else ""))

    a = resolved_designated(S)
    wrong = [name[i] for i, x in S.designated.items() if x != generators[i][0]]
    checks.append(ConditionCheck("designated elements generate kernel filters", not wrong,
                                 "mismatch at: " + ", ".join(wrong) if wrong else ""))

    order_bad = []
    if a[b] != B.one:
        order_bad.append(f"a_{name[b]} is not 1")
    for i in range(k):
        for j in range(k):
            if S.strictly_below(i, j) and not (_leq_in(B, a[j], a[i]) and a[j] != a[i]):
                order_bad.append(f"a_{name[j]} not below a_{name[i]}")
    checks.append(ConditionCheck("designated elements strictly antitone", not order_bad,
                                 "; ".join(order_bad)))

    meet = B.rows("and")
    meet_bad = [f"a_{name[S.join[i][j]]} is not a_{name[i]} ∧ a_{name[j]}"
                for i in range(k) for j in range(i + 1, k)
                if a[S.join[i][j]] != meet[a[i]][a[j]]]
    checks.append(ConditionCheck("designated elements meet at joins", not meet_bad,
                                 "; ".join(meet_bad)))
    return checks


def attach_J(S: SemilatticeDirectSystem, designated: Optional[Mapping[int, int]] = None) -> FiniteAlgebra:
    """
    Full-signature algebra on the sum: J2 sends an element of fiber i to its
    preimage in [0, a_i]; J0 x = J2 ¬x and J1 x = ¬(J2 x ∨ J2 ¬x).
    """
    if designated is not None:
        S = SemilatticeDirectSystem(S.name, S.indices, S.join, S.bottom, S.fibers,
                                    S.transitions, dict(designated))
    S.validate()
    for c in system_conditions(S):
        if not c.passed:
            raise DirectSystemError(c.check, c.detail)
    a = resolved_designated(S)
    base = plonka_sum(S, validate=False)
    offsets = S.offsets()
    B = S.fibers[S.bottom]
    j2 = []
    for i, fiber in enumerate(S.fibers):
        p = S.transition(S.bottom, i)
        preimage = {p[x]: x for x in range(B.size) if _leq_in(B, x, a[i])}
        j2.extend(offsets[S.bottom] + preimage[e] for e in range(fiber.size))
    reduced = FiniteAlgebra(
        S.name, base.elements,
        neg=base.op("neg"), join=base.op("or"), meet=base.op("and"),
        zero=base.zero, one=base.one, j2=j2,
    )
    log.debug(f"attached J to {S.name} ({reduced.size} elements, {len(S.indices)} fibers)")
    return FiniteAlgebra.from_tables(
        S.name, reduced.elements, reduced.tables, reduced.zero, reduced.one, Signature.FULL
    )


# ──────────────────────────────────────────────────────────────────
# DECOMPOSITION
# ──────────────────────────────────────────────────────────────────

@dataclass
class PlonkaDecomposition:
    algebra:    FiniteAlgebra
    system:     SemilatticeDirectSystem
    fiber_of:   tuple[tuple[int, int], ...]        # carrier position → (index, local element)
    members:    tuple[tuple[int, ...], ...]        # index → carrier positions of its fiber
    designated: dict[int, int]                     # index → a_i as a bottom-fiber local element

    def to_global(self, i: int, local: int) -> int:
        return self.members[i][local]

    def fiber_index(self, x: int) -> int:
        return self.fiber_of[x][0]

    def top_of(self, i: int) -> int:
        return self.to_global(i, self.system.fibers[i].one)

    def designated_element(self, i: int) -> int:
        return self.to_global(self.system.bottom, self.designated[i])

    def upper_bound(self) -> int:
        """Join of all indices."""
        u = self.system.bottom
        for i in range(len(self.system.indices)):
            u = self.system.join[u][i]
        return u

    def describe(self) -> str:
        A, S = self.algebra, self.system
        parts = []
        for i, block in enumerate(self.members):
            labels = ",".join(A.label(x) for x in block)
            parts.append(f"{S.indices[i]}={{{labels}}} a={A.label(self.designated_element(i))}")
        return " ".join(parts)


def same_fiber(A: FiniteAlgebra, a: int, b: int) -> bool:
    meet, join = A.rows("and"), A.rows("or")
    return meet[a][join[a][b]] == a and meet[b][join[b][a]] == b


def decompose(A: FiniteAlgebra) -> PlonkaDecomposition:
    reduct = A.reduct(Signature.BOOLEAN) if A.has_j else A
    failure = _first_failing(reduct, INVOLUTIVE_BISEMILATTICE_IDENTITIES)
    if failure:
        raise DecompositionError("not an involutive bisemilattice", failure)
    if len(A.fixpoints()) > 1:
        labels = ", ".join(A.label(x) for x in A.fixpoints())
        raise DecompositionError("more than one negation fixpoint", labels)

    classes: list[list[int]] = []
    for x in range(A.size):
        for block in classes:
            if same_fiber(A, block[0], x):
                block.append(x)
                break
        else:
            classes.append([x])
    classes.sort(key=lambda block: (A.zero not in block, block[0]))
    k = len(classes)
    where = {x: (i, pos) for i, block in enumerate(classes) for pos, x in enumerate(block)}
    join_table = tuple(
        tuple(where[A.rows("or")[classes[i][0]][classes[j][0]]][0] for j in range(k))
        for i in range(k)
    )

    fibers = []
    for i, block in enumerate(classes):
        local = {x: pos for pos, x in enumerate(block)}
        try:
            neg = [local[A.rows("neg")[x]] for x in block]
            meet = [[local[A.rows("and")[x][y]] for y in block] for x in block]
            join = [[local[A.rows("or")[x][y]] for y in block] for x in block]
            x0 = block[0]
            one = local[A.rows("or")[x0][A.rows("neg")[x0]]]
            zero = local[A.rows("and")[x0][A.rows("neg")[x0]]]
        except KeyError:
            raise DecompositionError("fiber not closed under the operations", f"i{i}") from None
        fibers.append(FiniteAlgebra(
            f"{A.name}:i{i}", [A.label(x) for x in block],
            neg=neg, join=join, meet=meet, zero=zero, one=one,
        ))

    transitions = {}
    for i in range(k):
        for j in range(k):
            if i == j or join_table[i][j] != j:
                continue
            b = classes[j][0]
            mp = []
            for x in classes[i]:
                y = A.rows("and")[x][A.rows("or")[x][b]]
                fiber, pos = where[y]
                if fiber != j:
                    raise DecompositionError("transition leaves its target fiber", f"i{i} → i{j}")
                mp.append(pos)
            transitions[(i, j)] = tuple(mp)

    designated: dict[int, int] = {}
    if A.has_j:
        for i in range(k):
            top = classes[i][where_top(A, classes[i])]
            image = A.rows("J2")[top]
            fiber, pos = where[image]
            if fiber != 0:
                raise DecompositionError("J2 leaves the bottom fiber", A.label(image))
            designated[i] = pos

    S = SemilatticeDirectSystem(A.name, tuple(f"i{i}" for i in range(k)), join_table, 0,
                                tuple(fibers), transitions, designated)
    try:
        S.validate()
    except DirectSystemError as e:
        raise DecompositionError("invariant violated", str(e)) from None

    decomposition = PlonkaDecomposition(
        A, S,
        tuple(where[x] for x in range(A.size)),
        tuple(tuple(block) for block in classes),
        designated or resolved_designated(S),
    )
    if A.has_j:
        failing = [c for c in verify_decomposition_conditions(decomposition) if not c.passed]
        if failing:
            raise DecompositionError("invariant violated", f"{failing[0].check}: {failing[0].detail}")
    log.debug(f"decomposed {A.name}: {decomposition.describe()}")
    return decomposition


def where_top(A: FiniteAlgebra, block: Sequence[int]) -> int:
    """Position within the block of its top element 1_i."""
    x0 = block[0]
    top = A.rows("or")[x0][A.rows("neg")[x0]]
    return list(block).index(top)


def verify_decomposition_conditions(d: PlonkaDecomposition) -> list[ConditionCheck]:
    """Direct-system conditions plus the J laws of the original algebra, when it has J."""
    checks = system_conditions(d.system)
    A, S = d.algebra, d.system
    if not A.has_j:
        return checks
    J1, J2 = A.rows("J1"), A.rows("J2")
    name = S.indices

    right_inverse = []
    for x in range(A.size):
        i, local = d.fiber_of[x]
        j, under = d.fiber_of[J2[x]]
        if j != S.bottom or S.transition(S.bottom, i)[under] != local:
            right_inverse.append(A.label(x))
    checks.append(ConditionCheck("J2 is a right inverse of the bottom transitions", not right_inverse,
                                 "fails at: " + ", ".join(right_inverse) if right_inverse else ""))

    not_constant = [name[i] for i, block in enumerate(d.members) if len({J1[x] for x in block}) > 1]
    checks.append(ConditionCheck("J1 constant on fibers", not not_constant,
                                 ", ".join(not_constant)))

    bottom_bad = [A.label(x) for x in d.members[S.bottom] if J1[x] != A.zero]
    checks.append(ConditionCheck("J1 vanishes on the bottom fiber", not bottom_bad, ", ".join(bottom_bad)))

    fix_bad = [A.label(x) for x in A.fixpoints() if J1[x] != A.one]
    checks.append(ConditionCheck("J1 of the fixpoint is 1", not fix_bad, ", ".join(fix_bad)))

    generator_bad = []
    for i in range(len(name)):
        if d.designated[i] != kernel_filter_generator(S, i)[0]:
            generator_bad.append(name[i])
    checks.append(ConditionCheck("J2(1_i) generates the kernel filter", not generator_bad,
                                 ", ".join(generator_bad)))
    return checks


# ──────────────────────────────────────────────────────────────────
# BOOLEAN ALGEBRAS AND THE ENUMERATOR
# ──────────────────────────────────────────────────────────────────

def _submask_order(mask: int) -> list[int]:
    subs = [s for s in range(mask + 1) if s & mask == s]
    return [mask] + [s for s in subs if s != mask]


def interval_algebra(bits: int, mask: int, name: str) -> FiniteAlgebra:
    """Boolean algebra of the submasks of `mask` (in `bits` bits): top first, then ascending."""
    order = _submask_order(mask)
    pos = {s: k for k, s in enumerate(order)}

    def label(s: int) -> str:
        if s == mask:
            return "1"
        if s == 0:
            return "0"
        return "e" + format(s, f"0{bits}b")

    if mask == 0:
        return trivial_algebra(name, Signature.BOOLEAN)
    return FiniteAlgebra(
        name, [label(s) for s in order],
        neg=[pos[mask & ~s] for s in order],
        join=[[pos[s | t] for t in order] for s in order],
        meet=[[pos[s & t] for t in order] for s in order],
        zero=pos[0], one=pos[mask],
    )


def boolean_algebra(bits: int, with_j: bool = True) -> FiniteAlgebra:
    """The 2^bits-element Boolean algebra; with J2 = id, J1 = 0 and J0 = ¬ when `with_j`."""
    name = f"b{2 ** bits}"
    B = interval_algebra(bits, (1 << bits) - 1, name)
    if not with_j:
        return B
    if bits == 0:
        return trivial_algebra(name)
    n = B.size
    return FiniteAlgebra(
        name, B.elements, neg=B.op("neg"), join=B.op("or"), meet=B.op("and"),
        zero=B.zero, one=B.one,
        j2=list(range(n)), j1=[B.zero] * n, j0=B.op("neg"),
    )


def _semilattice_orders(masks: Sequence[int]) -> list[tuple[tuple[int, ...], ...]]:
    """
    Join tables over positions of `masks` (masks[0] is the full mask, the
    bottom) whose order i < j implies masks[j] ⊊ masks[i] and whose joins
    carry the meet of the masks.
    """
    k = len(masks)
    optional = [(i, j) for i in range(1, k) for j in range(1, k)
                if i != j and masks[j] & masks[i] == masks[j] and masks[j] != masks[i]]
    out = []
    for chosen in itertools.product((False, True), repeat=len(optional)):
        below = {(0, j) for j in range(k)} | {(i, i) for i in range(k)}
        below |= {pair for pair, take in zip(optional, chosen) if take}
        if any((i, m) not in below for (i, j) in below for (jj, m) in below if j == jj):
            continue
        table = []
        ok = True
        for i in range(k):
            row = []
            for j in range(k):
                uppers = [m for m in range(k) if (i, m) in below and (j, m) in below]
                least = [m for m in uppers if all((m, u) in below for u in uppers)]
                if len(least) != 1:
                    ok = False
                    break
                row.append(least[0])
            if not ok:
                break
            table.append(tuple(row))
        if ok and all(masks[table[i][j]] == masks[i] & masks[j] for i in range(k) for j in range(k)):
            out.append(tuple(table))
    return out


def _skeletons(max_size: int) -> list[tuple[int, tuple[int, ...], tuple[tuple[int, ...], ...]]]:
    """(bits, designated masks, index join table) for every sum of size ≤ max_size."""
    out = []
    bits = 0
    while 2 ** bits <= max_size:
        full = (1 << bits) - 1
        others = [m for m in range(full + 1) if m != full]
        if bits == 0:
            out.append((0, (0,), ((0,),)))
        else:
            for r in range(len(others) + 1):
                for extra in itertools.combinations(others, r):
                    masks = (full, *extra)
                    if sum(2 ** bin(m).count("1") for m in masks) > max_size:
                        continue
                    for table in _semilattice_orders(masks):
                        out.append((bits, masks, table))
        bits += 1
    return out


def skeleton_system(bits: int, masks: Sequence[int], table: Sequence[Sequence[int]]) -> SemilatticeDirectSystem:
    """
    Direct system whose fiber i is the interval [0, masks[i]] of 2^bits and
    whose transitions intersect with the target mask; index 0 is the bottom.
    """
    fibers = tuple(interval_algebra(bits, m, f"[0,{m}]") for m in masks)
    orders = [_submask_order(m) for m in masks]
    positions = [{s: k for k, s in enumerate(o)} for o in orders]
    transitions = {}
    for i in range(len(masks)):
        for j in range(len(masks)):
            if i != j and table[i][j] == j:
                transitions[(i, j)] = tuple(positions[j][s & masks[j]] for s in orders[i])
    name = "+".join(f"b{2 ** bin(m).count('1')}" for m in masks)
    return SemilatticeDirectSystem(name, tuple(f"i{i}" for i in range(len(masks))), table, 0,
                                   fibers, transitions)


def _build(skeleton) -> FiniteAlgebra:
    bits, masks, table = skeleton
    if bits == 0:
        return trivial_algebra()
    return attach_J(skeleton_system(bits, masks, table))


def _fingerprint(A: FiniteAlgebra) -> tuple:
    return (A.size, tuple(sorted(element_invariants(A))))


def enumerate_bca(max_size: int, workers: Optional[int] = None) -> list[FiniteAlgebra]:
    """One representative per isomorphism class of Bochvar algebras with ≤ max_size elements."""
    settings = load_settings()
    if max_size > settings.max_enum_size:
        raise SizeGuardError(f"enumeration size {max_size} exceeds the guard {settings.max_enum_size}")
    skeletons = _skeletons(max_size)
    log.info(f"enumerating Bochvar algebras up to size {max_size}: {len(skeletons)} skeletons")

    with ThreadPoolExecutor(max_workers=workers or settings.workers) as executor:
        candidates = list(executor.map(_build, skeletons))

    found: list[FiniteAlgebra] = []
    buckets: dict[tuple, list[FiniteAlgebra]] = {}
    for A in sorted(candidates, key=lambda a: a.size):
        bucket = buckets.setdefault(_fingerprint(A), [])
        if any(find_isomorphism(A, B) is not None for B in bucket):
            continue
        bucket.append(A)
        found.append(A)
    log.info(f"found {len(found)} Bochvar algebra(s) up to size {max_size}")
    return found
