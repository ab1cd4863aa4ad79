"""
classify.py — Where a finite algebra sits in the chain JBA ⊂ NBCA ⊂ BCA.

Membership in BCA is decided three ways that must agree: the long axiom
list, the short basis in the reduced signature, and separation of points by
homomorphisms into the three-element generator. Inside BCA a negation
fixpoint puts the algebra outside NBCA (witnessed by an embedding of wke),
absorption puts it in JBA, and everything else embeds b4+b2.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import StrEnum
from functools import lru_cache
from typing import Optional

import numpy as np

from bochvar.algebra_core import (
    FiniteAlgebra,
    Homomorphism,
    Separation,
    Signature,
    builtin,
    holds_quasi_identity,
    separates_into,
)
from bochvar.errors import ClassificationError, RetractionError, SignatureError
from bochvar.plonka import decompose
from bochvar.terms import QuasiIdentity, parse_quasi_identity

log = logging.getLogger(__name__)

BCA_AXIOMS: list[str] = [
    "x | x = x",
    "x | y = y | x",
    "(x | y) | z = x | (y | z)",
    "x & (y | z) = (x & y) | (x & z)",
    "~~x = x",
    "~1 = 0",
    "~(x | y) = ~x & ~y",
    "0 | x = x",
    *[f"J2 J{k} x = J{k} x" for k in range(3)],
    *[f"J0 J{k} x = ~J{k} x" for k in range(3)],
    *[f"J1 J{k} x = 0" for k in range(3)],
    *[f"J{k} ~x = J{2 - k} x" for k in range(3)],
    *[f"J{i} x = ~(J{j} x | J{k} x)" for i, j, k in itertools.permutations(range(3))],
    *[f"J{k} x | ~J{k} x = 1" for k in range(3)],
    *[f"(J{i} x | J{k} y) & J{i} x = J{i} x" for i in range(3) for k in range(3)],
    *[f"(J{i} x | J{k} x) & J{i} x = J{i} x" for i in range(3) for k in range(3)],
    *[f"x | J{k} x = x" for k in (1, 2)],
    "J0 (x | y) = J0 x & J0 y",
    "J2 (x | y) = (J2 x & J2 y) | (J2 x & J2 ~y) | (J2 ~x & J2 y)",
    "J0 x = J0 y, J1 x = J1 y, J2 x = J2 y => x = y",
]

SHORT_BASIS: list[str] = [
    "x | x = x",
    "x | y = y | x",
    "(x | y) | z = x | (y | z)",
    "x & (y | z) = (x & y) | (x & z)",
    "~~x = x",
    "~1 = 0",
    "~(x | y) = ~x & ~y",
    "0 | x = x",
    "J0 J2 x = ~J2 x",
    "J2 x = ~(J0 x | J1 x)",
    "J2 x | ~J2 x = 1",
    "J2 (x | y) = (J2 x & J2 y) | (J2 x & J2 ~y) | (J2 ~x & J2 y)",
    "J0 x = J0 y, J2 x = J2 y => x = y",
]

ABSORPTION = parse_quasi_identity("x & (x | y) = x")


@lru_cache(maxsize=None)
def _parsed(texts: tuple[str, ...]) -> tuple[QuasiIdentity, ...]:
    return tuple(parse_quasi_identity(t) for t in texts)


def _first_failure(A: FiniteAlgebra, texts: list[str]) -> Optional[str]:
    for text, q in zip(texts, _parsed(tuple(texts))):
        verdict = holds_quasi_identity(A, q)
        if not verdict.holds:
            return f"{text} fails at {verdict.describe()}"
    return None


def bca_axiom_failure(A: FiniteAlgebra) -> Optional[str]:
    """First failing item of the long axiom list, or None."""
    return _first_failure(A, BCA_AXIOMS)


def short_basis_failure(A: FiniteAlgebra) -> Optional[str]:
    """
    First failure of the short basis: J0 / J1 must equal their derived
    definitions, and the reduced-signature reduct must satisfy the basis.
    """
    reduced = A.reduct(Signature.REDUCED)
    for op in ("J0", "J1"):
        if not np.array_equal(A.op(op), reduced.op(op)):
            x = int(np.flatnonzero(A.op(op) != reduced.op(op))[0])
            return f"{op} differs from its derived definition at {A.label(x)}"
    return _first_failure(reduced, SHORT_BASIS)


class ChainVerdict(StrEnum):
    NOT_BCA     = "NotBCA"
    TRIVIAL     = "Trivial"
    JBA         = "JBA"
    NBCA_PROPER = "NBCA_proper"
    BCA_PROPER  = "BCA_proper"


EXIT_CODES = {
    ChainVerdict.NOT_BCA:     1,
    ChainVerdict.TRIVIAL:     3,
    ChainVerdict.JBA:         4,
    ChainVerdict.NBCA_PROPER: 5,
    ChainVerdict.BCA_PROPER:  6,
}


@dataclass(frozen=True)
class MembershipEvidence:
    axioms:       Optional[str]        # None = all items hold
    short_basis:  Optional[str]
    separation:   Separation

    @property
    def member(self) -> bool:
        return self.axioms is None


@dataclass(frozen=True)
class Classification:
    algebra:  FiniteAlgebra
    verdict:  ChainVerdict
    evidence: MembershipEvidence
    witness:  Optional[Homomorphism] = None
    reason:   str = ""

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]


def has_fixpoint(A: FiniteAlgebra) -> Optional[int]:
    fixed = A.fixpoints()
    if len(fixed) > 1:
        raise ClassificationError(
            f"{A.name} has {len(fixed)} negation fixpoints: {', '.join(A.label(x) for x in fixed)}"
        )
    return fixed[0] if fixed else None


def membership(A: FiniteAlgebra) -> MembershipEvidence:
    if not A.has_j:
        raise SignatureError(f"{A.name} has no J operations")
    evidence = MembershipEvidence(
        axioms=bca_axiom_failure(A),
        short_basis=short_basis_failure(A),
        separation=separates_into(A, builtin("wke")),
    )
    votes = {evidence.axioms is None, evidence.short_basis is None, evidence.separation.separated}
    if len(votes) != 1:
        raise ClassificationError(
            f"membership tests disagree on {A.name}: axioms={evidence.axioms or 'hold'}, "
            f"short basis={evidence.short_basis or 'holds'}, separation={evidence.separation.describe()}"
        )
    return evidence


def fixpoint_witness(A: FiniteAlgebra, fix: int) -> Homomorphism:
    """wke → A sending 1, 0, H to 1, 0 and the fixpoint."""
    wke = builtin("wke")
    image = {wke.index("1"): A.one, wke.index("0"): A.zero, wke.index("H"): fix}
    return Homomorphism(wke, A, tuple(image[x] for x in range(wke.size)))


def fiber_witness(A: FiniteAlgebra) -> Homomorphism:
    """b4+b2 → A through the first fiber above the bottom: top ↦ 1_i, a ↦ J2 1_i."""
    d = decompose(A)
    upper = [i for i in range(len(d.system.indices)) if i != d.system.bottom]
    if not upper:
        raise ClassificationError(f"{A.name} has a single fiber")
    top = d.top_of(upper[0])
    a = A.rows("J2")[top]
    neg = A.rows("neg")
    target = builtin("b4+b2")
    image = {"1": A.one, "0": A.zero, "a": a, "na": neg[a], "top": top, "bot": neg[top]}
    return Homomorphism(target, A, tuple(image[label] for label in target.elements))


def classify(A: FiniteAlgebra) -> Classification:
    evidence = membership(A)
    if not evidence.member:
        return Classification(A, ChainVerdict.NOT_BCA, evidence, reason=evidence.axioms)
    if A.size == 1:
        return Classification(A, ChainVerdict.TRIVIAL, evidence)

    fix = has_fixpoint(A)
    if fix is not None:
        witness = fixpoint_witness(A, fix)
        verdict = ChainVerdict.BCA_PROPER
    elif holds_quasi_identity(A, ABSORPTION).holds:
        return Classification(A, ChainVerdict.JBA, evidence)
    else:
        witness = fiber_witness(A)
        verdict = ChainVerdict.NBCA_PROPER
    reason = witness.check()
    if reason or not witness.is_injective:
        raise ClassificationError(f"{verdict} witness for {A.name} is not an embedding: {reason or 'not injective'}")
    log.debug(f"{A.name}: {verdict} via {witness.describe()}")
    return Classification(A, verdict, evidence, witness)


def in_nbca(A: FiniteAlgebra) -> bool:
    return classify(A).verdict in (ChainVerdict.JBA, ChainVerdict.NBCA_PROPER)


# ──────────────────────────────────────────────────────────────────
# RETRACTION ONTO b2
# ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Retraction:
    r:     Homomorphism      # A → b2
    iota:  Homomorphism      # b2 → A
    atom:  int               # bottom-fiber atom generating the filters


def build_retraction(A: FiniteAlgebra) -> Retraction:
    """
    r(x) = 1 iff x lies above p(t) in its fiber, t the least atom of the
    bottom fiber below a_u (u the join of all indices).
    """
    verdict = classify(A).verdict
    if verdict == ChainVerdict.NOT_BCA:
        raise RetractionError(f"{A.name} is not a Bochvar algebra")
    if verdict in (ChainVerdict.BCA_PROPER, ChainVerdict.TRIVIAL):
        raise RetractionError(f"{A.name}: fixpoint present, no homomorphism onto b2")

    d = decompose(A)
    S = d.system
    bottom = S.fibers[S.bottom]
    meet = bottom.rows("and")
    a_u = d.designated[d.upper_bound()]
    nonzero = [x for x in range(bottom.size) if x != bottom.zero]
    atoms = [x for x in nonzero if not any(y != x and meet[y][x] == y for y in nonzero)]
    below = [t for t in atoms if meet[t][a_u] == t]
    if not below:
        raise RetractionError(f"{A.name}: no atom below the top designated element")
    t = below[0]

    b2 = builtin("b2")
    r_map = []
    for x in range(A.size):
        i, local = d.fiber_of[x]
        fiber = S.fibers[i]
        f_i = S.transition(S.bottom, i)[t]
        r_map.append(b2.one if fiber.rows("and")[f_i][local] == f_i else b2.zero)
    r = Homomorphism(A, b2, tuple(r_map))
    iota = Homomorphism(b2, A, tuple(A.one if x == b2.one else A.zero for x in range(b2.size)))

    for h, what in ((r, "r"), (iota, "ι")):
        reason = h.check()
        if reason:
            raise RetractionError(f"{what} is not a homomorphism: {reason}")
    if iota.then(r).map != tuple(range(b2.size)):
        raise RetractionError("r ∘ ι is not the identity")
    return Retraction(r, iota, d.to_global(S.bottom, t))
