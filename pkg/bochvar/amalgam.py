"""
amalgam.py — Amalgamation of V-formations in BCA and NBCA over finite inputs.

Every member of the class embeds into a power of one generator G (wke for
BCA, b4+b2 for NBCA). An amalgam is therefore assembled from compatible
pairs (f: B → G, g: C → G) with f∘i = g∘j: D is the subalgebra of G^P
generated by the images of B and C, and h, k are the induced maps. The
construction works directly on tuples, so D is never larger than the
generated image.

Also holds the congruence-extension counterexample on b4+b2.
"""

from __future__ import annotations

import logging
import random
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from enum import StrEnum
from itertools import product
from typing import Optional, Sequence

import numpy as np

from bochvar.algebra_core import (
    BINARY,
    FiniteAlgebra,
    Homomorphism,
    Signature,
    all_congruences,
    all_congruences_bruteforce,
    builtin,
    enumerate_homomorphisms,
    find_isomorphism,
    principal_congruence,
    quotient,
)
from bochvar.classify import ChainVerdict, classify
from bochvar.config import load_settings
from bochvar.errors import AmalgamationError, ClassificationError
from bochvar.reports import CongruenceExtensionReport

log = logging.getLogger(__name__)


class AmalgamClass(StrEnum):
    BCA  = "bca"
    NBCA = "nbca"


GENERATORS = {
    AmalgamClass.BCA:  "wke",
    AmalgamClass.NBCA: "b4+b2",
}

ALLOWED = {
    AmalgamClass.BCA:  {ChainVerdict.JBA, ChainVerdict.NBCA_PROPER, ChainVerdict.BCA_PROPER},
    AmalgamClass.NBCA: {ChainVerdict.JBA, ChainVerdict.NBCA_PROPER},
}


# ──────────────────────────────────────────────────────────────────
# V-FORMATIONS
# ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class VFormation:
    A: FiniteAlgebra
    B: FiniteAlgebra
    C: FiniteAlgebra
    i: Homomorphism       # A → B
    j: Homomorphism       # A → C

    def __post_init__(self):
        for name, h, target in (("i", self.i, self.B), ("j", self.j, self.C)):
            if h.source is not self.A or h.target is not target:
                raise AmalgamationError(
                    f"{name} must map {self.A.name} → {target.name}, got {h.source.name} → {h.target.name}"
                )
            reason = h.check()
            if reason:
                raise AmalgamationError(f"{name} is not a homomorphism: {reason}")
            if not h.is_injective:
                raise AmalgamationError(f"{name} is not injective")


def require_class(v: VFormation, cls: AmalgamClass) -> None:
    """All three algebras must lie in the class; A may also be trivial."""
    for role, X in (("A", v.A), ("B", v.B), ("C", v.C)):
        verdict = classify(X).verdict
        allowed = ALLOWED[cls] | ({ChainVerdict.TRIVIAL} if role == "A" else set())
        if verdict not in allowed:
            raise AmalgamationError(f"{role} = {X.name} classifies as {verdict}, outside {cls.value.upper()}")


def embeddings(A: FiniteAlgebra, B: FiniteAlgebra) -> list[Homomorphism]:
    return [h for h in enumerate_homomorphisms(A, B) if h.is_injective]


# ──────────────────────────────────────────────────────────────────
# AMALGAMATION
# ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Amalgam:
    D:     FiniteAlgebra
    h:     Homomorphism     # B → D
    k:     Homomorphism     # C → D
    pairs: int              # compatible pairs used as coordinates


@dataclass(frozen=True)
class AmalgamFailure:
    side:   str             # "B" or "C"
    pair:   tuple[int, int]
    reason: str


def compatible_pairs(v: VFormation, G: FiniteAlgebra) -> list[tuple[Homomorphism, Homomorphism]]:
    """All (f, g) with f∘i = g∘j, one per joint kernel, in enumeration order."""
    homs_b = enumerate_homomorphisms(v.B, G)
    homs_c = enumerate_homomorphisms(v.C, G)
    by_restriction: dict[tuple[int, ...], list[Homomorphism]] = {}
    for g in homs_c:
        by_restriction.setdefault(v.j.then(g).map, []).append(g)

    pairs, kernels = [], set()
    for f in homs_b:
        for g in by_restriction.get(v.i.then(f).map, []):
            kernel = (f.kernel().blocks, g.kernel().blocks)
            if kernel not in kernels:
                kernels.add(kernel)
                pairs.append((f, g))
    log.debug(f"{len(homs_b)}×{len(homs_c)} homs into {G.name}, {len(pairs)} compatible pair(s)")
    return pairs


def _separating(pairs: list[tuple[Homomorphism, Homomorphism]], size_b: int, size_c: int):
    """Greedy subset of pairs that separates every point of B and of C, plus what stays unseparated."""
    open_b = {(x, y) for x in range(size_b) for y in range(x + 1, size_b)}
    open_c = {(x, y) for x in range(size_c) for y in range(x + 1, size_c)}
    chosen = []
    for f, g in pairs:
        cut_b = {(x, y) for x, y in open_b if f.map[x] != f.map[y]}
        cut_c = {(x, y) for x, y in open_c if g.map[x] != g.map[y]}
        if cut_b or cut_c:
            chosen.append((f, g))
            open_b -= cut_b
            open_c -= cut_c
    return chosen, open_b, open_c


def _image_closure(G: FiniteAlgebra, seed: set[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Subuniverse of G^P generated by seed, computed coordinatewise."""
    unary  = [G.op(op) for op in G.unary_names]
    binary = [G.op(op) for op in BINARY]
    members = set(seed)
    frontier = set(seed)
    while frontier:
        fresh: set[tuple[int, ...]] = set()
        for x in frontier:
            vx = np.asarray(x, dtype=np.intp)
            for table in unary:
                fresh.add(tuple(table[vx].tolist()))
            for y in members:
                vy = np.asarray(y, dtype=np.intp)
                for table in binary:
                    fresh.add(tuple(table[vx, vy].tolist()))
                    fresh.add(tuple(table[vy, vx].tolist()))
        fresh -= members
        members |= fresh
        frontier = fresh
    return sorted(members)


def _tuple_algebra(G: FiniteAlgebra, members: list[tuple[int, ...]], name: str) -> FiniteAlgebra:
    position = {x: n for n, x in enumerate(members)}
    rows = np.asarray(members, dtype=np.intp)          # |D| × |P|
    tables = {}
    for op in G.unary_names:
        images = G.op(op)[rows]
        tables[op] = np.asarray([position[tuple(r)] for r in images.tolist()], dtype=np.intp)
    for op in BINARY:
        images = G.op(op)[rows[:, None, :], rows[None, :, :]]
        tables[op] = np.asarray(
            [[position[tuple(cell)] for cell in row] for row in images.tolist()], dtype=np.intp
        )
    width = rows.shape[1]
    labels = [".".join(G.label(c) for c in x) for x in members]
    return FiniteAlgebra.from_tables(
        name, labels, tables,
        position[(G.zero,) * width], position[(G.one,) * width], Signature.FULL,
    )


def amalgamate(v: VFormation, cls: AmalgamClass) -> Amalgam | AmalgamFailure:
    """
    Build (D, h, k) from compatible pairs into the class generator, or report
    the first pair of B or C that no compatible pair separates.
    """
    cls = AmalgamClass(cls)
    require_class(v, cls)
    G = builtin(GENERATORS[cls])

    pairs = compatible_pairs(v, G)
    chosen, open_b, open_c = _separating(pairs, v.B.size, v.C.size)
    for side, X, pending in (("B", v.B, open_b), ("C", v.C, open_c)):
        if pending:
            x, y = min(pending)
            reason = f"{X.label(x)} and {X.label(y)} of {X.name} are identified by every compatible pair"
            log.warning(f"amalgamation failed: {reason}")
            return AmalgamFailure(side, (x, y), reason)

    image_b = [tuple(f.map[x] for f, _ in chosen) for x in range(v.B.size)]
    image_c = [tuple(g.map[x] for _, g in chosen) for x in range(v.C.size)]
    members = _image_closure(G, set(image_b) | set(image_c))
    D = _tuple_algebra(G, members, f"amalgam({v.B.name},{v.C.name})")
    position = {x: n for n, x in enumerate(members)}
    h = Homomorphism(v.B, D, tuple(position[x] for x in image_b))
    k = Homomorphism(v.C, D, tuple(position[x] for x in image_c))
    log.info(f"amalgam of {v.B.name} and {v.C.name} over {v.A.name}: |D| = {D.size} from {len(chosen)} pair(s)")
    return Amalgam(D, h, k, len(chosen))


# ──────────────────────────────────────────────────────────────────
# VERIFICATION
# ──────────────────────────────────────────────────────────────────

def verify_amalgam(v: VFormation, D: FiniteAlgebra, h: Homomorphism, k: Homomorphism,
                   cls: AmalgamClass) -> Optional[str]:
    """None when (D, h, k) is an amalgam in the class, else the reason."""
    cls = AmalgamClass(cls)
    for name, m, source in (("h", h, v.B), ("k", k, v.C)):
        if m.source is not source or m.target is not D:
            return f"{name} has the wrong source or target"
        reason = m.check()
        if reason:
            return f"not a homomorphism: {name}: {reason}"
        if not m.is_injective:
            return f"not an embedding: {name} is not injective"
    for x in range(v.A.size):
        if h(v.i(x)) != k(v.j(x)):
            return f"square broken at {v.A.label(x)}"
    verdict = classify(D).verdict
    if verdict not in ALLOWED[cls]:
        return f"class violation: {D.name} classifies as {verdict}"
    return None


# ──────────────────────────────────────────────────────────────────
# SWEEPS
# ──────────────────────────────────────────────────────────────────

def v_formations(members: Sequence[FiniteAlgebra], bases: Sequence[FiniteAlgebra]) -> list[VFormation]:
    """Every V-formation with A from bases and B, C from members, over all embedding pairs."""
    out = []
    for A in bases:
        for B, C in product(members, repeat=2):
            for i in embeddings(A, B):
                for j in embeddings(A, C):
                    out.append(VFormation(A, B, C, i, j))
    return out


@dataclass(frozen=True)
class SweepOutcome:
    formation: VFormation
    size:      Optional[int]
    problem:   Optional[str]


def amalgamation_sweep(
    formations: Sequence[VFormation],
    cls:        AmalgamClass,
    sample:     Optional[int] = None,
    seed:       Optional[int] = None,
    workers:    Optional[int] = None,
) -> list[SweepOutcome]:
    """Amalgamate and verify each formation (or a seeded sample of them)."""
    settings = load_settings()
    chosen = list(formations)
    if sample is not None and sample < len(chosen):
        rng = random.Random(settings.seed if seed is None else seed)
        picked = sorted(rng.sample(range(len(chosen)), sample))
        chosen = [chosen[n] for n in picked]

    def one(v: VFormation) -> SweepOutcome:
        result = amalgamate(v, cls)
        if isinstance(result, AmalgamFailure):
            return SweepOutcome(v, None, result.reason)
        return SweepOutcome(v, result.D.size, verify_amalgam(v, result.D, result.h, result.k, cls))

    outcomes: list[Optional[SweepOutcome]] = [None] * len(chosen)
    with ThreadPoolExecutor(max_workers=workers or settings.workers) as pool:
        futures = {pool.submit(one, v): n for n, v in enumerate(chosen)}
        for future in as_completed(futures):
            outcomes[futures[future]] = future.result()
    bad = sum(1 for o in outcomes if o.problem)
    log.info(f"amalgamation sweep ({cls.value}): {len(outcomes)} formation(s), {bad} problem(s)")
    return outcomes


# ──────────────────────────────────────────────────────────────────
# CONGRUENCE EXTENSION COUNTEREXAMPLE
# ──────────────────────────────────────────────────────────────────

def _quotient_in_nbca(A: FiniteAlgebra, theta) -> bool:
    Q, _ = quotient(A, theta)
    try:
        verdict = classify(Q).verdict
    except ClassificationError as e:
        log.warning(f"quotient {theta.describe()} of {A.name} is unclassifiable: {e}")
        return False
    return verdict in (ChainVerdict.TRIVIAL, ChainVerdict.JBA, ChainVerdict.NBCA_PROPER)


def congruence_extension_check() -> CongruenceExtensionReport:
    """
    θ = Cg(1, na) on b4 has an NBCA quotient, yet no proper NBCA-congruence
    of b4+b2 contains (na, 1): relative congruence extension fails for NBCA.
    """
    b4, big = builtin("b4"), builtin("b4+b2")
    theta = principal_congruence(b4, b4.index("1"), b4.index("na"))
    Q, _ = quotient(b4, theta)

    congruences = all_congruences(big)
    bruteforce = all_congruences_bruteforce(big)
    relative = [c for c in congruences if _quotient_in_nbca(big, c)]
    pair = (big.index("na"), big.index("1"))
    containing = [c for c in relative if c.related(*pair)]
    proper = [c for c in containing if not c.is_total]

    report = CongruenceExtensionReport(
        theta=theta.describe(),
        quotient_is_b2=find_isomorphism(Q, builtin("b2")) is not None,
        quotient_in_nbca=_quotient_in_nbca(b4, theta),
        congruences=len(congruences),
        relative=[c.describe() for c in relative],
        containing_pair=[c.describe() for c in containing],
        proper_containing=len(proper),
        bruteforce_agrees=[c.blocks for c in congruences] == [c.blocks for c in bruteforce],
        extension_fails=not proper and Q.size > 1,
    )
    log.info(f"congruence extension: {len(relative)}/{len(congruences)} relative congruences, "
             f"{len(proper)} proper containing (na, 1)")
    return report
