"""
terms.py — The term language ⟨¬, ∨, ∧, J0, J1, J2, 0, 1⟩.

Terms are immutable trees shared by the logic side (formulas, derivations)
and the algebra side (identities, quasi-identities). The concrete syntax is

    ~ t          negation
    t & s        meet            (binds tighter than |)
    t | s        join
    J0 t, J1 t, J2 t             (parentheses optional around a single token)
    0, 1         constants
    t -> s       ~t | s                      (expanded while parsing)
    t <-> s      (t -> s) & (s -> t)         (expanded while parsing)

`->` and `<->` share the lowest precedence and associate to the right;
`&` and `|` associate to the left. Equations are written `t = s`,
quasi-identities `e1, e2 => e`, rules and consequence queries `t1, t2 |- s`.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput

from bochvar.errors import TermSyntaxError

log = logging.getLogger(__name__)

NAME_PATTERN = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
RESERVED     = frozenset({"J0", "J1", "J2"})

# enumeration order: ¬, J0, J1, J2, then ∧, ∨
UNARY_OPS  = ("neg", "J0", "J1", "J2")
BINARY_OPS = ("and", "or")
J_OPS      = ("J0", "J1", "J2")


# ──────────────────────────────────────────────────────────────────
# TERM NODES
# ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __post_init__(self):
        if not NAME_PATTERN.match(self.name) or self.name in RESERVED:
            raise ValueError(f"invalid variable name {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Const:
    value: int

    def __post_init__(self):
        if self.value not in (0, 1):
            raise ValueError(f"constant must be 0 or 1, got {self.value!r}")

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True, slots=True)
class Unary:
    op:    str
    child: Term

    def __post_init__(self):
        if self.op not in UNARY_OPS:
            raise ValueError(f"unknown unary operator {self.op!r}")

    def __str__(self) -> str:
        return render_term(self)


@dataclass(frozen=True, slots=True)
class Binary:
    op:    str
    left:  Term
    right: Term

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown binary operator {self.op!r}")

    def __str__(self) -> str:
        return render_term(self)


Term = Var | Const | Unary | Binary

ZERO = Const(0)
ONE  = Const(1)


@dataclass(frozen=True, slots=True)
class Equation:
    lhs: Term
    rhs: Term

    def variables(self) -> frozenset[str]:
        return variables(self.lhs) | variables(self.rhs)

    def __str__(self) -> str:
        return f"{render_term(self.lhs)} = {render_term(self.rhs)}"


@dataclass(frozen=True, slots=True)
class QuasiIdentity:
    """Antecedent equations ⇒ consequent; no antecedents means a plain identity."""

    antecedents: tuple[Equation, ...]
    consequent:  Equation

    @classmethod
    def identity(cls, lhs: Term, rhs: Term) -> QuasiIdentity:
        return cls((), Equation(lhs, rhs))

    @property
    def is_identity(self) -> bool:
        return not self.antecedents

    def variables(self) -> frozenset[str]:
        out = self.consequent.variables()
        for eq in self.antecedents:
            out |= eq.variables()
        return out

    def __str__(self) -> str:
        if not self.antecedents:
            return str(self.consequent)
        return ", ".join(str(e) for e in self.antecedents) + f" => {self.consequent}"


@dataclass(frozen=True, slots=True)
class Rule:
    premises:   tuple[Term, ...]
    conclusion: Term

    def variables(self) -> frozenset[str]:
        out = variables(self.conclusion)
        for p in self.premises:
            out |= variables(p)
        return out

    def __str__(self) -> str:
        lhs = ", ".join(render_term(p) for p in self.premises)
        return f"{lhs} |- {render_term(self.conclusion)}".lstrip()


# ── Constructors ──────────────────────────────────────────────────

def neg(t: Term) -> Term:
    return Unary("neg", t)


def j(k: int, t: Term) -> Term:
    return Unary(f"J{k}", t)


def meet(a: Term, b: Term) -> Term:
    return Binary("and", a, b)


def join(a: Term, b: Term) -> Term:
    return Binary("or", a, b)


def implies(a: Term, b: Term) -> Term:
    return Binary("or", Unary("neg", a), b)


def iff(a: Term, b: Term) -> Term:
    return Binary("and", implies(a, b), implies(b, a))


# ──────────────────────────────────────────────────────────────────
# PARSER
# ──────────────────────────────────────────────────────────────────

GRAMMAR = r"""
    term: arrow

    ?arrow: disj
          | disj "->" arrow      -> imp
          | disj "<->" arrow     -> iff

    ?disj: conj
         | disj "|" conj         -> or_

    ?conj: unary
         | conj "&" unary        -> and_

    ?unary: atom
          | "~" unary            -> neg
          | "J0" unary           -> j0
          | "J1" unary           -> j1
          | "J2" unary           -> j2

    ?atom: NAME                  -> var
         | "0"                   -> zero
         | "1"                   -> one
         | "(" arrow ")"

    equation: arrow "=" arrow
    quasi: (equation ("," equation)* "=>")? equation
    sequent: (arrow ("," arrow)*)? "|-" arrow

    NAME: /[A-Za-z][A-Za-z0-9_]*/

    %import common.WS
    %ignore WS
"""


@v_args(inline=True)
class _TermBuilder(Transformer):
    def var(self, token):
        return Var(str(token))

    def zero(self):
        return ZERO

    def one(self):
        return ONE

    def neg(self, t):
        return Unary("neg", t)

    def j0(self, t):
        return Unary("J0", t)

    def j1(self, t):
        return Unary("J1", t)

    def j2(self, t):
        return Unary("J2", t)

    def and_(self, a, b):
        return Binary("and", a, b)

    def or_(self, a, b):
        return Binary("or", a, b)

    def imp(self, a, b):
        return implies(a, b)

    def iff(self, a, b):
        return iff(a, b)

    def term(self, t):
        return t

    def equation(self, lhs, rhs):
        return Equation(lhs, rhs)

    def quasi(self, *equations):
        return QuasiIdentity(tuple(equations[:-1]), equations[-1])

    def sequent(self, *terms):
        return Rule(tuple(terms[:-1]), terms[-1])


@lru_cache(maxsize=1)
def _parser() -> Lark:
    return Lark(GRAMMAR, start=["term", "equation", "quasi", "sequent"], parser="lalr")


_APPLIED_NAME = re.compile(r"([A-Za-z][A-Za-z0-9_]*)\s*\(")


def _parse(text: str, start: str):
    try:
        tree = _parser().parse(text, start=start)
    except UnexpectedInput as exc:
        for m in _APPLIED_NAME.finditer(text):
            if m.group(1) not in RESERVED:
                line = text.count("\n", 0, m.start()) + 1
                column = m.start() - (text.rfind("\n", 0, m.start()) + 1) + 1
                raise TermSyntaxError(f"unknown operator {m.group(1)!r}", line, column) from None
        line   = max(getattr(exc, "line", 1) or 1, 1)
        column = max(getattr(exc, "column", 1) or 1, 1)
        raise TermSyntaxError(f"cannot parse {text!r}", line, column) from None
    return _TermBuilder().transform(tree)


def parse_term(text: str) -> Term:
    return _parse(text, "term")


def parse_equation(text: str) -> Equation:
    return _parse(text, "equation")


def parse_quasi_identity(text: str) -> QuasiIdentity:
    return _parse(text, "quasi")


def parse_rule(text: str) -> Rule:
    """Parse `premise, premise |- conclusion`; an empty left side is allowed."""
    return _parse(text, "sequent")


# ──────────────────────────────────────────────────────────────────
# PRINTER
# ──────────────────────────────────────────────────────────────────

_PRECEDENCE = {"or": 1, "and": 2}
_SYMBOL     = {"or": "|", "and": "&"}


def _precedence(t: Term) -> int:
    return _PRECEDENCE[t.op] if isinstance(t, Binary) else 3


def _wrapped(t: Term, minimum: int) -> str:
    text = render_term(t)
    return f"({text})" if _precedence(t) < minimum else text


def render_term(t: Term) -> str:
    match t:
        case Var(name):
            return name
        case Const(value):
            return str(value)
        case Unary("neg", child):
            return "~" + _wrapped(child, 3)
        case Unary(op, child):
            return f"{op}({render_term(child)})"
        case Binary(op, left, right):
            # right operands of the same precedence keep their parentheses
            p = _PRECEDENCE[op]
            return f"{_wrapped(left, p)} {_SYMBOL[op]} {_wrapped(right, p + 1)}"
    raise TypeError(f"not a term: {t!r}")


# ──────────────────────────────────────────────────────────────────
# STRUCTURE
# ──────────────────────────────────────────────────────────────────

def variables(t: Term) -> frozenset[str]:
    match t:
        case Var(name):
            return frozenset((name,))
        case Const():
            return frozenset()
        case Unary(_, child):
            return variables(child)
        case Binary(_, left, right):
            return variables(left) | variables(right)
    raise TypeError(f"not a term: {t!r}")


def sorted_variables(*items) -> tuple[str, ...]:
    """Variables of terms, equations, quasi-identities or rules in name order."""
    names: set[str] = set()
    for item in items:
        names |= variables(item) if isinstance(item, (Var, Const, Unary, Binary)) else item.variables()
    return tuple(sorted(names))


def depth(t: Term) -> int:
    match t:
        case Var() | Const():
            return 0
        case Unary(_, child):
            return 1 + depth(child)
        case Binary(_, left, right):
            return 1 + max(depth(left), depth(right))
    raise TypeError(f"not a term: {t!r}")


def substitute(t: Term, sigma: Mapping[str, Term]) -> Term:
    """Simultaneous substitution; names outside sigma stay put."""
    match t:
        case Var(name):
            return sigma.get(name, t)
        case Const():
            return t
        case Unary(op, child):
            return Unary(op, substitute(child, sigma))
        case Binary(op, left, right):
            return Binary(op, substitute(left, sigma), substitute(right, sigma))
    raise TypeError(f"not a term: {t!r}")


def covered_variables(t: Term) -> tuple[frozenset[str], frozenset[str]]:
    """
    Split the variables of t into (covered, open).

    A variable is open when at least one of its occurrences lies outside the
    scope of every J_k, covered otherwise.
    """
    inside: set[str] = set()
    outside: set[str] = set()

    def walk(node: Term, under_j: bool) -> None:
        match node:
            case Var(name):
                (inside if under_j else outside).add(name)
            case Const():
                pass
            case Unary(op, child):
                walk(child, under_j or op in J_OPS)
            case Binary(_, left, right):
                walk(left, under_j)
                walk(right, under_j)

    walk(t, False)
    return frozenset(inside - outside), frozenset(outside)


def is_external(t: Term) -> bool:
    return not covered_variables(t)[1]


# ──────────────────────────────────────────────────────────────────
# DERIVED CONNECTIVES AND TRANSFORMERS
# ──────────────────────────────────────────────────────────────────

def expand_equiv(lhs: Term, rhs: Term) -> Term:
    """(J0 lhs ↔ J0 rhs) ∧ (J1 lhs ↔ J1 rhs) ∧ (J2 lhs ↔ J2 rhs), grouped left to right."""
    parts = [iff(j(k, lhs), j(k, rhs)) for k in range(3)]
    return Binary("and", Binary("and", parts[0], parts[1]), parts[2])


def tau(phi: Term) -> Equation:
    return Equation(phi, ONE)


def rho(eq: Equation) -> Term:
    return expand_equiv(eq.lhs, eq.rhs)


def eliminate_J01(t: Term) -> Term:
    """Rewrite J0 φ as J2 ¬φ and J1 φ as ¬(J2 φ ∨ J2 ¬φ), bottom up."""
    match t:
        case Var() | Const():
            return t
        case Unary("J0", child):
            return Unary("J2", Unary("neg", eliminate_J01(child)))
        case Unary("J1", child):
            c = eliminate_J01(child)
            return Unary("neg", Binary("or", Unary("J2", c), Unary("J2", Unary("neg", c))))
        case Unary(op, child):
            return Unary(op, eliminate_J01(child))
        case Binary(op, left, right):
            return Binary(op, eliminate_J01(left), eliminate_J01(right))
    raise TypeError(f"not a term: {t!r}")


# ──────────────────────────────────────────────────────────────────
# ENUMERATION
# ──────────────────────────────────────────────────────────────────

def atoms(names: tuple[str, ...] | list[str]) -> list[Term]:
    return [Var(n) for n in names] + [ZERO, ONE]


def enumerate_terms(names: tuple[str, ...] | list[str], max_depth: int) -> Iterator[Term]:
    """
    Every term over `names` up to `max_depth`, ordered by depth, then arity,
    then operator (¬, J0, J1, J2, ∧, ∨), variables before constants.
    """
    level = atoms(names)
    below: list[Term] = list(level)
    yield from level
    for _ in range(max_depth):
        fresh_from = len(below) - len(level)
        current: list[Term] = []
        for op in UNARY_OPS:
            current.extend(Unary(op, t) for t in level)
        for op in BINARY_OPS:
            for a, left in enumerate(below):
                for b, right in enumerate(below):
                    if a >= fresh_from or b >= fresh_from:
                        current.append(Binary(op, left, right))
        yield from current
        below.extend(current)
        level = current
