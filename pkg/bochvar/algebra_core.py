"""
algebra_core.py — Finite algebras given by operation tables.

Covers evaluation of terms, exhaustive identity / quasi-identity checking,
direct products, generated subalgebras, homomorphism / embedding /
isomorphism search, congruences and quotients, and the semantic
ISP-membership test (separation of points by homomorphisms).

Tables are numpy arrays indexed by carrier position. Counterexamples,
homomorphism lists and congruence listings follow the declared carrier
order lexicographically.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from enum import StrEnum
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import numpy as np

from bochvar.errors import FormatError, SignatureError, UnknownNameError, ValuationError
from bochvar.terms import Binary, Const, QuasiIdentity, Term, Unary, Var, sorted_variables

log = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"

BUILTIN_ALGEBRAS = {
    "wke":   "wke.alg",
    "b2":    "b2.alg",
    "b4":    "b4.alg",
    "b4+b2": "b4+b2.alg",
}

LABEL_PATTERN = re.compile(r"[^\s#,=>]+\Z")

BOOLEAN_UNARY = ("neg",)
J_UNARY       = ("J0", "J1", "J2")
BINARY        = ("or", "and")


class Signature(StrEnum):
    FULL    = "full"       # ¬ ∨ ∧ J0 J1 J2 0 1
    REDUCED = "reduced"    # ¬ ∨ ∧ J2 0 1, J0 / J1 derived
    BOOLEAN = "boolean"    # ¬ ∨ ∧ 0 1


# ──────────────────────────────────────────────────────────────────
# FINITE ALGEBRA
# ──────────────────────────────────────────────────────────────────

class FiniteAlgebra:
    """
    An algebra in one of the three signatures, stored as numpy tables.

    Reduced-signature algebras synthesize J0 / J1 once at construction:
    J0 x = J2 ¬x and J1 x = ¬(J2 x ∨ J2 ¬x).
    """

    def __init__(
        self,
        name:     str,
        elements: Sequence[str],
        *,
        neg:  Sequence[int],
        join: Sequence[Sequence[int]],
        meet: Sequence[Sequence[int]],
        zero: int,
        one:  int,
        j2:   Optional[Sequence[int]] = None,
        j0:   Optional[Sequence[int]] = None,
        j1:   Optional[Sequence[int]] = None,
    ):
        self.name     = name
        self.elements = tuple(str(e) for e in elements)
        n = len(self.elements)
        if n < 1:
            raise FormatError("an algebra needs at least one element", name)
        if len(set(self.elements)) != n:
            raise FormatError("element labels must be distinct", name)
        for label in self.elements:
            if not LABEL_PATTERN.match(label):
                raise FormatError(f"invalid element label {label!r}", name)
        self._index = {label: i for i, label in enumerate(self.elements)}

        if j2 is None and (j0 is not None or j1 is not None):
            raise SignatureError(f"{name}: J0/J1 given without J2")
        if (j0 is None) != (j1 is None):
            raise SignatureError(f"{name}: J0 and J1 must be given together")

        self.zero = self._check_index(zero, "const 0")
        self.one  = self._check_index(one, "const 1")

        self.tables: dict[str, np.ndarray] = {
            "neg": self._unary_table(neg, "neg"),
            "or":  self._binary_table(join, "or"),
            "and": self._binary_table(meet, "and"),
        }
        if j2 is None:
            self.signature = Signature.BOOLEAN
        else:
            self.tables["J2"] = self._unary_table(j2, "J2")
            if j0 is None:
                self.signature = Signature.REDUCED
                t_neg, t_or, t_j2 = self.tables["neg"], self.tables["or"], self.tables["J2"]
                self.tables["J0"] = t_j2[t_neg]
                self.tables["J1"] = t_neg[t_or[t_j2, t_j2[t_neg]]]
            else:
                self.signature = Signature.FULL
                self.tables["J0"] = self._unary_table(j0, "J0")
                self.tables["J1"] = self._unary_table(j1, "J1")
        for table in self.tables.values():
            table.setflags(write=False)
        self._rows: dict[str, list] = {}

    # ── Construction helpers ──────────────────────────────────────

    def _check_index(self, value: int, what: str) -> int:
        value = int(value)
        if not 0 <= value < len(self.elements):
            raise FormatError(f"{what}: index {value} outside the carrier", self.name)
        return value

    def _unary_table(self, values, what: str) -> np.ndarray:
        table = np.asarray(values, dtype=np.intp)
        n = len(self.elements)
        if table.shape != (n,):
            raise FormatError(f"op {what}: expected {n} entries, got shape {table.shape}", self.name)
        if table.size and (table.min() < 0 or table.max() >= n):
            raise FormatError(f"op {what}: entry outside the carrier", self.name)
        return table

    def _binary_table(self, values, what: str) -> np.ndarray:
        table = np.asarray(values, dtype=np.intp)
        n = len(self.elements)
        if table.shape != (n, n):
            raise FormatError(f"op {what}: expected {n}x{n} entries, got shape {table.shape}", self.name)
        if table.min() < 0 or table.max() >= n:
            raise FormatError(f"op {what}: entry outside the carrier", self.name)
        return table

    @classmethod
    def from_tables(cls, name: str, elements: Sequence[str], tables: Mapping[str, np.ndarray],
                    zero: int, one: int, signature: Signature) -> FiniteAlgebra:
        has_j   = signature != Signature.BOOLEAN
        full    = signature == Signature.FULL
        return cls(
            name, elements,
            neg=tables["neg"], join=tables["or"], meet=tables["and"],
            zero=zero, one=one,
            j2=tables["J2"] if has_j else None,
            j0=tables["J0"] if full else None,
            j1=tables["J1"] if full else None,
        )

    # ── Access ────────────────────────────────────────────────────

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def has_j(self) -> bool:
        return self.signature != Signature.BOOLEAN

    @property
    def unary_names(self) -> tuple[str, ...]:
        return BOOLEAN_UNARY + (J_UNARY if self.has_j else ())

    @property
    def operation_names(self) -> tuple[str, ...]:
        return self.unary_names + BINARY

    def op(self, name: str) -> np.ndarray:
        try:
            return self.tables[name]
        except KeyError:
            raise SignatureError(f"{self.name} has no operation {name!r}") from None

    def rows(self, name: str) -> list:
        """Plain-list copy of a table for tight Python loops."""
        cached = self._rows.get(name)
        if cached is None:
            cached = self._rows[name] = self.op(name).tolist()
        return cached

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownNameError(f"{self.name} has no element {label!r}") from None

    def label(self, i: int) -> str:
        return self.elements[i]

    def fixpoints(self) -> list[int]:
        neg = self.rows("neg")
        return [x for x in range(self.size) if neg[x] == x]

    def key(self) -> bytes:
        parts = [self.signature.value.encode(), bytes([self.zero % 256, self.one % 256])]
        for name in sorted(self.tables):
            parts.append(name.encode())
            parts.append(self.tables[name].astype(np.int16).tobytes())
        return b"|".join(parts)

    # ── Derived algebras ──────────────────────────────────────────

    def reduct(self, signature: Signature) -> FiniteAlgebra:
        if signature == Signature.FULL and self.signature != Signature.FULL:
            raise SignatureError(f"{self.name}: cannot expand {self.signature} to full")
        if signature == Signature.REDUCED and not self.has_j:
            raise SignatureError(f"{self.name}: no J2 table to keep")
        return FiniteAlgebra.from_tables(
            self.name, self.elements, self.tables, self.zero, self.one, signature
        )

    def renamed(self, name: str) -> FiniteAlgebra:
        return FiniteAlgebra.from_tables(
            name, self.elements, self.tables, self.zero, self.one, self.signature
        )

    def with_entry(self, op: str, position: tuple[int, ...], value: int,
                   name: Optional[str] = None) -> FiniteAlgebra:
        """Copy with one table entry replaced (full signature kept explicit)."""
        tables = {k: v.copy() for k, v in self.tables.items()}
        tables[op][position] = value
        signature = Signature.FULL if self.has_j else Signature.BOOLEAN
        return FiniteAlgebra.from_tables(
            name or self.name, self.elements, tables, self.zero, self.one, signature
        )

    # ── Serialization ─────────────────────────────────────────────

    def to_text(self) -> str:
        lab = self.elements
        lines = [
            f"algebra {self.name}",
            "elements " + " ".join(lab),
            f"const 0 {lab[self.zero]}",
            f"const 1 {lab[self.one]}",
            "op neg " + " ".join(lab[v] for v in self.rows("neg")),
        ]
        if self.signature == Signature.FULL:
            for name in ("J0", "J1"):
                lines.append(f"op {name} " + " ".join(lab[v] for v in self.rows(name)))
        if self.has_j:
            lines.append("op J2 " + " ".join(lab[v] for v in self.rows("J2")))
        for name in BINARY:
            lines.append(f"op {name}")
            lines.extend(" ".join(lab[v] for v in row) for row in self.rows(name))
        lines.append("end")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"FiniteAlgebra({self.name!r}, size={self.size}, signature={self.signature.value})"


def trivial_algebra(name: str = "trivial", signature: Signature = Signature.FULL) -> FiniteAlgebra:
    has_j = signature != Signature.BOOLEAN
    full  = signature == Signature.FULL
    return FiniteAlgebra(
        name, ["0"], neg=[0], join=[[0]], meet=[[0]], zero=0, one=0,
        j2=[0] if has_j else None, j0=[0] if full else None, j1=[0] if full else None,
    )


# ── Algebra file format ───────────────────────────────────────────

def _strip(text: str) -> list[tuple[int, str]]:
    out = []
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((number, line))
    return out


def read_algebra_block(lines: list[tuple[int, str]], pos: int, source: str) -> tuple[FiniteAlgebra, int]:
    """Read one `algebra … end` block starting at lines[pos]; returns (algebra, next pos)."""
    number, line = lines[pos]
    head = line.split()
    if len(head) != 2 or head[0] != "algebra":
        raise FormatError("expected `algebra <name>`", source, number)
    name = head[1]
    pos += 1
    elements: Optional[list[str]] = None
    consts: dict[str, str] = {}
    unary: dict[str, list[str]] = {}
    binary: dict[str, list[list[str]]] = {}

    def need_elements(at: int) -> list[str]:
        if elements is None:
            raise FormatError("`elements` must come first", source, at)
        return elements

    while pos < len(lines):
        number, line = lines[pos]
        words = line.split()
        pos += 1
        match words:
            case ["end"]:
                break
            case ["elements", *labels]:
                elements = labels
            case ["const", ("0" | "1") as which, label]:
                consts[which] = label
            case ["op", ("neg" | "J0" | "J1" | "J2") as op, *outputs]:
                if len(outputs) != len(need_elements(number)):
                    raise FormatError(f"op {op}: expected {len(elements)} outputs", source, number)
                unary[op] = outputs
            case ["op", ("or" | "and") as op]:
                n = len(need_elements(number))
                if pos + n > len(lines):
                    raise FormatError(f"op {op}: expected {n} rows", source, number)
                rows = []
                for k in range(n):
                    row_number, row_line = lines[pos + k]
                    row = row_line.split()
                    if len(row) != n:
                        raise FormatError(f"op {op}: row needs {n} entries", source, row_number)
                    rows.append(row)
                binary[op] = rows
                pos += n
            case _:
                raise FormatError(f"unrecognised line {line!r}", source, number)
    else:
        raise FormatError("missing `end`", source, number)

    elements = need_elements(number)
    for required in ("neg",):
        if required not in unary:
            raise FormatError(f"missing op {required}", source)
    for required in BINARY:
        if required not in binary:
            raise FormatError(f"missing op {required}", source)
    if set(consts) != {"0", "1"}:
        raise FormatError("both `const 0` and `const 1` are required", source)

    index = {label: i for i, label in enumerate(elements)}

    def ix(label: str) -> int:
        try:
            return index[label]
        except KeyError:
            raise FormatError(f"unknown element {label!r}", source) from None

    def unary_table(op: str) -> Optional[list[int]]:
        return [ix(v) for v in unary[op]] if op in unary else None

    algebra = FiniteAlgebra(
        name, elements,
        neg=unary_table("neg"),
        join=[[ix(v) for v in row] for row in binary["or"]],
        meet=[[ix(v) for v in row] for row in binary["and"]],
        zero=ix(consts["0"]), one=ix(consts["1"]),
        j2=unary_table("J2"), j0=unary_table("J0"), j1=unary_table("J1"),
    )
    return algebra, pos


def parse_algebra(text: str, source: str = "<text>") -> FiniteAlgebra:
    lines = _strip(text)
    if not lines:
        raise FormatError("empty algebra file", source)
    algebra, pos = read_algebra_block(lines, 0, source)
    if pos != len(lines):
        raise FormatError("trailing content after `end`", source, lines[pos][0])
    return algebra


@lru_cache(maxsize=None)
def builtin(name: str) -> FiniteAlgebra:
    try:
        filename = BUILTIN_ALGEBRAS[name]
    except KeyError:
        raise UnknownNameError(
            f"unknown built-in algebra {name!r} (known: {', '.join(BUILTIN_ALGEBRAS)})"
        ) from None
    path = DATA_DIR / filename
    return parse_algebra(path.read_text(encoding="utf-8"), str(path))


def load_algebra(ref: str) -> FiniteAlgebra:
    """A built-in name, a path to an algebra file, or a missing path named after a built-in."""
    if ref in BUILTIN_ALGEBRAS:
        return builtin(ref)
    path = Path(ref)
    if path.is_file():
        return parse_algebra(path.read_text(encoding="utf-8"), str(path))
    if path.suffix == ".alg" and path.stem in BUILTIN_ALGEBRAS:
        return builtin(path.stem)
    raise UnknownNameError(f"no algebra file or built-in named {ref!r}")


# ──────────────────────────────────────────────────────────────────
# EVALUATION
# ──────────────────────────────────────────────────────────────────

Valuation = dict[str, int]


def valuation_grid(size: int, count: int) -> np.ndarray:
    """All valuations of `count` variables, shape (count, size**count), first variable slowest."""
    if count == 0:
        return np.zeros((0, 1), dtype=np.intp)
    return np.indices((size,) * count, dtype=np.intp).reshape(count, -1)


def evaluate(A: FiniteAlgebra, t: Term, v: Mapping[str, int]) -> int:
    match t:
        case Var(name):
            try:
                return int(v[name])
            except KeyError:
                raise ValuationError(f"no value for variable {name!r}") from None
        case Const(value):
            return A.one if value else A.zero
        case Unary(op, child):
            return A.rows(op)[evaluate(A, child, v)]
        case Binary(op, left, right):
            return A.rows(op)[evaluate(A, left, v)][evaluate(A, right, v)]
    raise TypeError(f"not a term: {t!r}")


def evaluate_all(
    A:     FiniteAlgebra,
    t:     Term,
    names: Sequence[str],
    grid:  Optional[np.ndarray] = None,
    memo:  Optional[dict] = None,
) -> np.ndarray:
    """Values of t under every valuation of `names`, in grid order."""
    if grid is None:
        grid = valuation_grid(A.size, len(names))
    columns = dict(zip(names, grid))
    width = grid.shape[1]
    memo = {} if memo is None else memo

    def walk(node: Term) -> np.ndarray:
        hit = memo.get(node)
        if hit is not None:
            return hit
        match node:
            case Var(name):
                try:
                    out = columns[name]
                except KeyError:
                    raise ValuationError(f"no value for variable {name!r}") from None
            case Const(value):
                out = np.full(width, A.one if value else A.zero, dtype=np.intp)
            case Unary(op, child):
                out = A.op(op)[walk(child)]
            case Binary(op, left, right):
                out = A.op(op)[walk(left), walk(right)]
            case _:
                raise TypeError(f"not a term: {node!r}")
        memo[node] = out
        return out

    return walk(t)


def valuation_at(grid: np.ndarray, names: Sequence[str], column: int) -> Valuation:
    return {name: int(grid[k, column]) for k, name in enumerate(names)}


def format_valuation(A: FiniteAlgebra, v: Mapping[str, int]) -> str:
    return " ".join(f"{name}={A.label(v[name])}" for name in sorted(v))


@dataclass(frozen=True)
class Verdict:
    """Outcome of an exhaustive check: holds, or the least counterexample."""

    holds:          bool
    counterexample: Optional[Valuation] = None
    algebra:        Optional[FiniteAlgebra] = field(default=None, compare=False, repr=False)

    def __bool__(self) -> bool:
        return self.holds

    def describe(self) -> str:
        if self.holds:
            return "holds"
        if self.algebra is None or self.counterexample is None:
            return "fails"
        return format_valuation(self.algebra, self.counterexample) or "(empty valuation)"

    def labelled(self) -> Optional[dict[str, str]]:
        if self.counterexample is None or self.algebra is None:
            return None
        return {name: self.algebra.label(i) for name, i in sorted(self.counterexample.items())}


def holds_quasi_identity(A: FiniteAlgebra, q: QuasiIdentity) -> Verdict:
    names = sorted_variables(q)
    grid  = valuation_grid(A.size, len(names))
    memo: dict = {}

    def values(t: Term) -> np.ndarray:
        return evaluate_all(A, t, names, grid, memo)

    satisfied = np.ones(grid.shape[1], dtype=bool)
    for eq in q.antecedents:
        satisfied &= values(eq.lhs) == values(eq.rhs)
    failing = np.flatnonzero(satisfied & (values(q.consequent.lhs) != values(q.consequent.rhs)))
    if failing.size == 0:
        return Verdict(True, algebra=A)
    return Verdict(False, valuation_at(grid, names, int(failing[0])), A)


def first_failure(A: FiniteAlgebra, quasi_identities: Iterable[QuasiIdentity]) -> Optional[tuple[QuasiIdentity, Verdict]]:
    for q in quasi_identities:
        verdict = holds_quasi_identity(A, q)
        if not verdict.holds:
            return q, verdict
    return None


# ──────────────────────────────────────────────────────────────────
# PRODUCTS AND SUBALGEBRAS
# ──────────────────────────────────────────────────────────────────

def _common_signature(A: FiniteAlgebra, B: FiniteAlgebra) -> Signature:
    if A.has_j != B.has_j:
        raise SignatureError(f"{A.name} ({A.signature}) and {B.name} ({B.signature}) differ in signature")
    if A.signature == B.signature:
        return A.signature
    return Signature.FULL if A.has_j else Signature.BOOLEAN


def direct_product(A: FiniteAlgebra, B: FiniteAlgebra, name: Optional[str] = None) -> FiniteAlgebra:
    """Componentwise product; the pair (a, b) sits at position a·|B| + b and is labelled `a.b`."""
    signature = _common_signature(A, B)
    m = B.size
    tables = {}
    for op in A.unary_names:
        tables[op] = (A.op(op)[:, None] * m + B.op(op)[None, :]).reshape(-1)
    for op in BINARY:
        tables[op] = (A.op(op)[:, None, :, None] * m + B.op(op)[None, :, None, :]).reshape(A.size * m, A.size * m)
    elements = [f"{a}.{b}" for a in A.elements for b in B.elements]
    return FiniteAlgebra.from_tables(
        name or f"{A.name}x{B.name}", elements, tables,
        A.zero * m + B.zero, A.one * m + B.one, signature,
    )


def product_projections(A: FiniteAlgebra, B: FiniteAlgebra, P: FiniteAlgebra) -> tuple[Homomorphism, Homomorphism]:
    m = B.size
    return (
        Homomorphism(P, A, tuple(x // m for x in range(P.size))),
        Homomorphism(P, B, tuple(x % m for x in range(P.size))),
    )


def closure(A: FiniteAlgebra, seed: Iterable[int]) -> list[int]:
    """Least subuniverse containing seed and both constants, in carrier order."""
    members = set(seed) | {A.zero, A.one}
    unary  = [A.rows(op) for op in A.unary_names]
    binary = [A.rows(op) for op in BINARY]
    frontier = set(members)
    while frontier:
        fresh: set[int] = set()
        for table in unary:
            fresh.update(table[x] for x in frontier)
        for table in binary:
            for x in frontier:
                row = table[x]
                for y in members:
                    fresh.add(row[y])
                    fresh.add(table[y][x])
        fresh -= members
        members |= fresh
        frontier = fresh
    return sorted(members)


def restrict(A: FiniteAlgebra, members: Sequence[int], name: Optional[str] = None) -> tuple[FiniteAlgebra, Homomorphism]:
    """Subalgebra on a closed subset, with its inclusion."""
    position = {x: k for k, x in enumerate(members)}
    sub = np.asarray(members, dtype=np.intp)
    remap = np.full(A.size, -1, dtype=np.intp)
    remap[sub] = np.arange(len(members))
    tables = {}
    for op in A.unary_names:
        tables[op] = remap[A.op(op)[sub]]
    for op in BINARY:
        tables[op] = remap[A.op(op)[np.ix_(sub, sub)]]
    if any((t < 0).any() for t in tables.values()):
        raise ValueError(f"subset of {A.name} is not closed under the operations")
    signature = Signature.FULL if A.has_j else Signature.BOOLEAN
    S = FiniteAlgebra.from_tables(
        name or f"{A.name}[{','.join(A.elements[x] for x in members)}]",
        [A.elements[x] for x in members], tables,
        position[A.zero], position[A.one], signature,
    )
    return S, Homomorphism(S, A, tuple(members))


def subalgebra_generated(A: FiniteAlgebra, seed: Iterable[int]) -> tuple[FiniteAlgebra, Homomorphism]:
    return restrict(A, closure(A, seed))


# ──────────────────────────────────────────────────────────────────
# HOMOMORPHISMS
# ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Homomorphism:
    source: FiniteAlgebra
    target: FiniteAlgebra
    map:    tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.map[x]

    @property
    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    @property
    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.size

    def check(self) -> Optional[str]:
        """None when the map preserves every operation, else the first violation."""
        return homomorphism_violation(self.source, self.target, self.map)

    def then(self, after: Homomorphism) -> Homomorphism:
        """after ∘ self."""
        return Homomorphism(self.source, after.target, tuple(after.map[y] for y in self.map))

    def kernel(self) -> Congruence:
        return Congruence.from_labels(self.source, self.map)

    def describe(self) -> str:
        s, t = self.source.elements, self.target.elements
        return " ".join(f"{s[x]}->{t[y]}" for x, y in enumerate(self.map))

    def as_dict(self) -> dict[str, str]:
        s, t = self.source.elements, self.target.elements
        return {s[x]: t[y] for x, y in enumerate(self.map)}


def identity_hom(A: FiniteAlgebra) -> Homomorphism:
    return Homomorphism(A, A, tuple(range(A.size)))


def parse_map(A: FiniteAlgebra, B: FiniteAlgebra, text: str) -> Homomorphism:
    """Read `a->b a'->b' …`; every element of A must be mapped."""
    image: dict[int, int] = {}
    for item in text.replace(",", " ").split():
        left, sep, right = item.partition("->")
        if not sep:
            raise FormatError(f"expected `<e>-><e'>`, got {item!r}", "map")
        image[A.index(left)] = B.index(right)
    missing = [A.label(x) for x in range(A.size) if x not in image]
    if missing:
        raise FormatError(f"map leaves {', '.join(missing)} unmapped", "map")
    return Homomorphism(A, B, tuple(image[x] for x in range(A.size)))


def homomorphism_violation(A: FiniteAlgebra, B: FiniteAlgebra, mapping: Sequence[int]) -> Optional[str]:
    _common_signature(A, B)
    h = np.asarray(mapping, dtype=np.intp)
    if h.shape != (A.size,) or h.min() < 0 or h.max() >= B.size:
        return "map is not total into the target"
    if h[A.zero] != B.zero:
        return "constant 0 not preserved"
    if h[A.one] != B.one:
        return "constant 1 not preserved"
    for op in A.unary_names:
        if not np.array_equal(B.op(op)[h], h[A.op(op)]):
            return f"{op} not preserved"
    for op in BINARY:
        if not np.array_equal(B.op(op)[np.ix_(h, h)], h[A.op(op)]):
            return f"{op} not preserved"
    return None


def is_homomorphism(A: FiniteAlgebra, B: FiniteAlgebra, mapping: Sequence[int]) -> bool:
    return homomorphism_violation(A, B, mapping) is None


def element_invariants(A: FiniteAlgebra) -> list[tuple[bool, ...]]:
    """Per-element properties kept (both ways) by every embedding."""
    neg = A.rows("neg")
    out = []
    for x in range(A.size):
        inv = [neg[x] == x, x == A.zero, x == A.one]
        if A.has_j:
            for op in J_UNARY:
                y = A.rows(op)[x]
                inv += [y == A.zero, y == A.one, y == x]
        out.append(tuple(inv))
    return out


def _search(
    A:          FiniteAlgebra,
    B:          FiniteAlgebra,
    constraint: Optional[Mapping[int, int]] = None,
    injective:  bool = False,
) -> Iterator[tuple[int, ...]]:
    """
    Backtracking over A's carrier with propagation through every table.

    Maps are produced in lexicographic order of their vectors: elements are
    fixed in carrier order and values tried in ascending order, and forced
    values only ever depend on elements fixed earlier.
    """
    _common_signature(A, B)
    n, m = A.size, B.size
    unary  = [(A.rows(op), B.rows(op)) for op in A.unary_names]
    binary = [(A.rows(op), B.rows(op)) for op in BINARY]
    allowed: Optional[list[set[int]]] = None
    if injective:
        inv_a, inv_b = element_invariants(A), element_invariants(B)
        allowed = [{y for y in range(m) if inv_b[y] == inv_a[x]} for x in range(n)]

    assign   = [-1] * n
    used     = [0] * m
    assigned: list[int] = []
    queue:    list[int] = []

    def put(x: int, y: int, trail: list[int]) -> bool:
        current = assign[x]
        if current != -1:
            return current == y
        if injective and used[y]:
            return False
        if allowed is not None and y not in allowed[x]:
            return False
        assign[x] = y
        used[y] += 1
        assigned.append(x)
        trail.append(x)
        queue.append(x)
        return True

    def undo(trail: list[int]) -> None:
        for x in reversed(trail):
            used[assign[x]] -= 1
            assign[x] = -1
            assigned.pop()
        queue.clear()

    def propagate(trail: list[int]) -> bool:
        while queue:
            x = queue.pop()
            hx = assign[x]
            for fa, fb in unary:
                if not put(fa[x], fb[hx], trail):
                    return False
            k = 0
            while k < len(assigned):
                z = assigned[k]
                hz = assign[z]
                for fa, fb in binary:
                    if not put(fa[x][z], fb[hx][hz], trail) or not put(fa[z][x], fb[hz][hx], trail):
                        return False
                k += 1
        return True

    root: list[int] = []
    seeds = [(A.zero, B.zero), (A.one, B.one), *sorted((constraint or {}).items())]
    if not all(put(x, y, root) for x, y in seeds) or not propagate(root):
        return

    def search(start: int) -> Iterator[tuple[int, ...]]:
        x = start
        while x < n and assign[x] != -1:
            x += 1
        if x == n:
            yield tuple(assign)
            return
        for y in range(m):
            trail: list[int] = []
            if put(x, y, trail) and propagate(trail):
                yield from search(x + 1)
            undo(trail)

    yield from search(0)


def enumerate_homomorphisms(
    A: FiniteAlgebra,
    B: FiniteAlgebra,
    constraint: Optional[Mapping[int, int]] = None,
) -> list[Homomorphism]:
    maps = sorted(set(_search(A, B, constraint)))
    log.debug(f"{len(maps)} homomorphism(s) {A.name} → {B.name}")
    return [Homomorphism(A, B, mp) for mp in maps]


def find_embedding(A: FiniteAlgebra, B: FiniteAlgebra) -> Optional[Homomorphism]:
    if A.size > B.size or A.has_j != B.has_j:
        return None
    for mp in _search(A, B, injective=True):
        if is_homomorphism(A, B, mp):
            return Homomorphism(A, B, mp)
    return None


def find_isomorphism(A: FiniteAlgebra, B: FiniteAlgebra) -> Optional[Homomorphism]:
    if A.size != B.size:
        return None
    return find_embedding(A, B)


def is_embedding(h: Homomorphism) -> bool:
    return h.is_injective and h.check() is None


@dataclass(frozen=True)
class Separation:
    separated:  bool
    witness:    Optional[tuple[int, int]]
    hom_count:  int
    algebra:    Optional[FiniteAlgebra] = field(default=None, compare=False, repr=False)

    def __bool__(self) -> bool:
        return self.separated

    def describe(self) -> str:
        if self.separated:
            return f"separated by {self.hom_count} homomorphism(s)"
        x, y = self.witness
        return f"{self.algebra.label(x)} and {self.algebra.label(y)} are not separated"


def separates_into(A: FiniteAlgebra, G: FiniteAlgebra) -> Separation:
    """
    Whether homomorphisms A → G separate points, i.e. A ∈ ISP(G) for finite A.
    The witness is the lexicographically least unseparated pair.
    """
    maps = [h.map for h in enumerate_homomorphisms(A, G)]
    for x in range(A.size):
        for y in range(x + 1, A.size):
            if all(mp[x] == mp[y] for mp in maps):
                return Separation(False, (x, y), len(maps), A)
    return Separation(True, None, len(maps), A)


# ──────────────────────────────────────────────────────────────────
# CONGRUENCES
# ──────────────────────────────────────────────────────────────────

def _canonical(labels: Sequence) -> tuple[int, ...]:
    seen: dict = {}
    return tuple(seen.setdefault(v, len(seen)) for v in labels)


@dataclass(frozen=True)
class Congruence:
    algebra: FiniteAlgebra
    blocks:  tuple[int, ...]     # block number per element, numbered by first occurrence

    @classmethod
    def from_labels(cls, algebra: FiniteAlgebra, labels: Sequence) -> Congruence:
        return cls(algebra, _canonical(labels))

    def related(self, a: int, b: int) -> bool:
        return self.blocks[a] == self.blocks[b]

    def block_lists(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(max(self.blocks) + 1)]
        for x, b in enumerate(self.blocks):
            out[b].append(x)
        return out

    @property
    def is_identity(self) -> bool:
        return len(set(self.blocks)) == len(self.blocks)

    @property
    def is_total(self) -> bool:
        return len(set(self.blocks)) == 1

    def refines(self, other: Congruence) -> bool:
        return all(other.related(x, y) for x, y in self.pairs())

    def pairs(self) -> list[tuple[int, int]]:
        return [(x, y) for x in range(len(self.blocks)) for y in range(x + 1, len(self.blocks))
                if self.blocks[x] == self.blocks[y]]

    def describe(self) -> str:
        lab = self.algebra.elements
        return " ".join("{" + ",".join(lab[x] for x in block) + "}" for block in self.block_lists())


def congruence_generated(A: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> Congruence:
    """Least congruence containing the pairs: union-find closed under every table."""
    n = A.size
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        parent[rb] = ra
        return True

    for a, b in pairs:
        union(a, b)

    unary  = [A.rows(op) for op in A.unary_names]
    binary = [A.rows(op) for op in BINARY]
    changed = True
    while changed:
        changed = False
        for x in range(n):
            r = find(x)
            if r == x:
                continue
            for table in unary:
                changed |= union(table[x], table[r])
            for table in binary:
                row_x, row_r = table[x], table[r]
                for z in range(n):
                    changed |= union(row_x[z], row_r[z])
                    changed |= union(table[z][x], table[z][r])
    return Congruence.from_labels(A, [find(x) for x in range(n)])


def principal_congruence(A: FiniteAlgebra, a: int, b: int) -> Congruence:
    return congruence_generated(A, [(a, b)])


def is_congruence(A: FiniteAlgebra, blocks: Sequence[int]) -> bool:
    labels = np.asarray(blocks, dtype=np.intp)
    first: dict[int, int] = {}
    for x, b in enumerate(blocks):
        first.setdefault(b, x)
    rep = np.asarray([first[b] for b in blocks], dtype=np.intp)
    for op in A.unary_names:
        table = A.op(op)
        if not np.array_equal(labels[table], labels[table[rep]]):
            return False
    for op in BINARY:
        table = A.op(op)
        if not np.array_equal(labels[table], labels[table[np.ix_(rep, rep)]]):
            return False
    return True


def quotient(A: FiniteAlgebra, theta: Congruence) -> tuple[FiniteAlgebra, Homomorphism]:
    """Blocks in order of first element; each block is labelled by its first element."""
    if not is_congruence(A, theta.blocks):
        raise ValueError(f"partition {theta.describe()} is not a congruence of {A.name}")
    blocks = np.asarray(theta.blocks, dtype=np.intp)
    reps = np.asarray([block[0] for block in theta.block_lists()], dtype=np.intp)
    tables = {}
    for op in A.unary_names:
        tables[op] = blocks[A.op(op)[reps]]
    for op in BINARY:
        tables[op] = blocks[A.op(op)[np.ix_(reps, reps)]]
    signature = Signature.FULL if A.has_j else Signature.BOOLEAN
    Q = FiniteAlgebra.from_tables(
        f"{A.name}/θ", [A.elements[r] for r in reps], tables,
        int(blocks[A.zero]), int(blocks[A.one]), signature,
    )
    return Q, Homomorphism(A, Q, theta.blocks)


def join_congruences(theta: Congruence, psi: Congruence) -> Congruence:
    return congruence_generated(theta.algebra, theta.pairs() + psi.pairs())


def all_congruences(A: FiniteAlgebra) -> list[Congruence]:
    """Every congruence, as joins of principal ones, sorted by block vector."""
    identity = Congruence.from_labels(A, range(A.size))
    principal = {
        principal_congruence(A, a, b).blocks
        for a in range(A.size) for b in range(a + 1, A.size)
    }
    found = {identity.blocks} | principal
    frontier = list(found)
    while frontier:
        fresh = []
        for blocks in frontier:
            for other in principal:
                joined = join_congruences(Congruence(A, blocks), Congruence(A, other)).blocks
                if joined not in found:
                    found.add(joined)
                    fresh.append(joined)
        frontier = fresh
    return [Congruence(A, blocks) for blocks in sorted(found)]


def set_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of length n."""
    if n == 0:
        yield ()
        return

    def grow(prefix: list[int], top: int) -> Iterator[tuple[int, ...]]:
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for b in range(top + 2):
            prefix.append(b)
            yield from grow(prefix, max(top, b))
            prefix.pop()

    yield from grow([0], 0)


def all_congruences_bruteforce(A: FiniteAlgebra) -> list[Congruence]:
    return [Congruence(A, p) for p in sorted(set_partitions(A.size)) if is_congruence(A, p)]
