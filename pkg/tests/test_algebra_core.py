import itertools

import pytest

from bochvar.algebra_core import (
    BUILTIN_ALGEBRAS,
    Congruence,
    Homomorphism,
    Signature,
    all_congruences,
    all_congruences_bruteforce,
    builtin,
    direct_product,
    enumerate_homomorphisms,
    evaluate,
    find_embedding,
    find_isomorphism,
    holds_quasi_identity,
    identity_hom,
    is_congruence,
    is_homomorphism,
    load_algebra,
    parse_algebra,
    parse_map,
    principal_congruence,
    product_projections,
    quotient,
    separates_into,
    subalgebra_generated,
    trivial_algebra,
)
from bochvar.errors import FormatError, SignatureError, UnknownNameError, ValuationError
from bochvar.terms import enumerate_terms, parse_quasi_identity, parse_term, sorted_variables

WKE_WITHOUT_DERIVED_J = """
algebra wke-reduced
elements 1 0 H
const 0 0
const 1 1
op neg 0 1 H
op J2 1 0 0
op or
1 1 H
1 0 H
H H H
op and
1 0 H
0 0 H
H H H
end
"""


def naive_holds(A, text):
    """Reference check: loop over every valuation in carrier order."""
    q = parse_quasi_identity(text)
    names = sorted_variables(q)
    for values in itertools.product(range(A.size), repeat=len(names)):
        v = dict(zip(names, values))
        if all(evaluate(A, e.lhs, v) == evaluate(A, e.rhs, v) for e in q.antecedents):
            if evaluate(A, q.consequent.lhs, v) != evaluate(A, q.consequent.rhs, v):
                return False, {n: A.label(i) for n, i in v.items()}
    return True, None


# ──────────────────────────────────────────────────────────────────
# LOADING
# ──────────────────────────────────────────────────────────────────

def test_builtins_load(wke, b2, b4, b4b2):
    assert wke.elements == ("1", "0", "H")
    assert b2.elements == ("1", "0")
    assert b4.elements == ("1", "0", "a", "na")
    assert b4b2.elements == ("1", "0", "a", "na", "top", "bot")
    assert all(A.signature == Signature.FULL for A in (wke, b2, b4, b4b2))


def test_builtin_is_cached():
    assert builtin("wke") is builtin("wke")


def test_unknown_builtin():
    with pytest.raises(UnknownNameError):
        builtin("b16")
    with pytest.raises(UnknownNameError):
        load_algebra("no-such-algebra.alg")


def test_reduced_signature_synthesizes_j0_j1(wke):
    A = parse_algebra(WKE_WITHOUT_DERIVED_J)
    assert A.signature == Signature.REDUCED
    assert A.rows("J0") == wke.rows("J0")
    assert A.rows("J1") == wke.rows("J1")


def test_text_roundtrip(b4b2):
    again = parse_algebra(b4b2.to_text())
    assert again.elements == b4b2.elements
    for op in b4b2.operation_names:
        assert again.rows(op) == b4b2.rows(op)


@pytest.mark.parametrize("text, message", [
    ("algebra x\nelements 1 1\nconst 0 1\nconst 1 1\nop neg 1 1\nop or\n1 1\n1 1\nop and\n1 1\n1 1\nend\n",
     "distinct"),
    ("algebra x\nelements 1 0\nconst 0 0\nconst 1 1\nop neg 0 1\n", "missing `end`"),
    ("algebra x\nelements 1 0\nconst 0 0\nop neg 0 1\nop or\n1 1\n1 0\nop and\n1 0\n0 0\nend\n", "const"),
    ("algebra x\nelements 1 0\nconst 0 0\nconst 1 1\nop neg 0 2\nop or\n1 1\n1 0\nop and\n1 0\n0 0\nend\n",
     "unknown element"),
])
def test_malformed_algebra_files(text, message):
    with pytest.raises(FormatError, match=message):
        parse_algebra(text)


def test_j0_without_j2_is_rejected():
    text = WKE_WITHOUT_DERIVED_J.replace("op J2 1 0 0", "op J0 0 1 0\nop J1 0 0 1")
    with pytest.raises(SignatureError):
        parse_algebra(text)


# ──────────────────────────────────────────────────────────────────
# EVALUATION AND CHECKING
# ──────────────────────────────────────────────────────────────────

def test_evaluate_in_wke(wke):
    H, one, zero = wke.index("H"), wke.one, wke.zero
    assert wke.label(evaluate(wke, parse_term("~x"), {"x": H})) == "H"
    assert wke.label(evaluate(wke, parse_term("J1(x)"), {"x": H})) == "1"
    assert wke.label(evaluate(wke, parse_term("x | y"), {"x": one, "y": H})) == "H"
    assert wke.label(evaluate(wke, parse_term("J2(x) | y"), {"x": zero, "y": zero})) == "0"


def test_evaluate_missing_variable(wke):
    with pytest.raises(ValuationError):
        evaluate(wke, parse_term("x | y"), {"x": 0})


def test_absorption_fails_in_wke_at_least_counterexample(wke):
    verdict = holds_quasi_identity(wke, parse_quasi_identity("x & (x | y) = x"))
    assert not verdict.holds
    assert verdict.labelled() == {"x": "1", "y": "H"}


def test_separating_quasi_identity_fails_in_wke(wke):
    verdict = holds_quasi_identity(wke, parse_quasi_identity("J1(x) = 1 => y = 1"))
    assert verdict.labelled() == {"x": "H", "y": "0"}
    assert verdict.describe() == "x=H y=0"


def test_identity_without_variables(wke):
    assert holds_quasi_identity(wke, parse_quasi_identity("~1 = 0")).holds
    assert not holds_quasi_identity(wke, parse_quasi_identity("1 = 0")).holds


@pytest.mark.parametrize("name", list(BUILTIN_ALGEBRAS))
@pytest.mark.parametrize("statement", [
    "x & (x | y) = x",
    "J1(x) = 1 => y = 1",
    "J2 (x | y) = J2 x | J2 y",
    "x = ~x => y = z",
    "J0 x = J0 y, J2 x = J2 y => x = y",
])
def test_vectorized_check_matches_naive_loop(name, statement):
    A = builtin(name)
    verdict = holds_quasi_identity(A, parse_quasi_identity(statement))
    holds, counterexample = naive_holds(A, statement)
    assert verdict.holds == holds
    assert verdict.labelled() == counterexample


# ──────────────────────────────────────────────────────────────────
# PRODUCTS AND SUBALGEBRAS
# ──────────────────────────────────────────────────────────────────

def test_products(wke, b2, b4, b4b2):
    assert find_isomorphism(direct_product(b2, b2), b4) is not None
    assert find_isomorphism(direct_product(wke, b2), b4b2) is not None
    assert find_isomorphism(direct_product(wke, trivial_algebra()), wke) is not None


def test_product_labels_and_projections(wke, b2):
    P = direct_product(wke, b2)
    assert P.label(P.one) == "1.1"
    assert P.size == 6
    p, q = product_projections(wke, b2, P)
    assert p.check() is None and q.check() is None
    assert p.is_surjective and q.is_surjective


def test_generated_subalgebras(wke, b4b2):
    S, inclusion = subalgebra_generated(wke, [])
    assert S.size == 2
    assert inclusion.check() is None
    assert subalgebra_generated(wke, [wke.index("H")])[0].size == 3
    assert subalgebra_generated(b4b2, [b4b2.index("top")])[0].size == 6


# ──────────────────────────────────────────────────────────────────
# HOMOMORPHISMS
# ──────────────────────────────────────────────────────────────────

def test_no_homomorphism_from_wke_to_b2(wke, b2):
    assert enumerate_homomorphisms(wke, b2) == []


def test_wke_is_rigid(wke):
    homs = enumerate_homomorphisms(wke, wke)
    assert [h.map for h in homs] == [identity_hom(wke).map]


def test_b2_maps_uniquely_everywhere(b2):
    for name in BUILTIN_ALGEBRAS:
        assert len(enumerate_homomorphisms(b2, builtin(name))) == 1


def test_embeddings(wke, b2, b4b2):
    assert find_embedding(wke, b4b2) is None
    e = find_embedding(b4b2, direct_product(wke, b2))
    assert e is not None and e.is_injective and e.check() is None
    iso = find_isomorphism(b4b2, b4b2)
    assert iso.map == tuple(range(6))


def test_homomorphism_violation_is_named(wke, b2):
    h = Homomorphism(b2, wke, (wke.one, wke.one))
    assert h.check() == "constant 0 not preserved"
    assert not is_homomorphism(b2, wke, (wke.one, wke.one))


def test_parse_map(wke, b2):
    h = parse_map(b2, wke, "1->1 0->0")
    assert h.check() is None
    with pytest.raises(FormatError, match="unmapped"):
        parse_map(b2, wke, "1->1")


def test_homomorphisms_commute_with_evaluation(wke, b2, b4b2):
    P = direct_product(wke, b2)
    h = find_embedding(b4b2, P)
    for t in enumerate_terms(("x", "y"), 1):
        for a in range(b4b2.size):
            for b in range(b4b2.size):
                v = {"x": a, "y": b}
                image = {"x": h(a), "y": h(b)}
                assert h(evaluate(b4b2, t, v)) == evaluate(P, t, image)


def test_separation(wke, b2, b4b2):
    assert separates_into(b4b2, wke).separated
    assert separates_into(b2, wke).separated
    s = separates_into(wke, b2)
    assert not s.separated
    # Hom(wke, b2) is empty, so every pair is unseparated; the least one in carrier order 1 0 H is (1, 0)
    assert s.witness == (wke.index("1"), wke.index("0"))
    assert s.describe() == "1 and 0 are not separated"


# ──────────────────────────────────────────────────────────────────
# CONGRUENCES
# ──────────────────────────────────────────────────────────────────

def test_principal_congruence_on_b4(b4, b2):
    theta = principal_congruence(b4, b4.index("1"), b4.index("na"))
    assert theta.describe() == "{1,na} {0,a}"
    Q, projection = quotient(b4, theta)
    assert find_isomorphism(Q, b2) is not None
    assert projection.check() is None
    assert projection.is_surjective
    assert projection.kernel().blocks == theta.blocks


def test_principal_congruence_on_wke(wke):
    theta = principal_congruence(wke, wke.index("0"), wke.index("1"))
    assert theta.describe() == "{1,0} {H}"
    assert principal_congruence(wke, 2, 2).is_identity


def test_quotient_rejects_non_congruence(wke):
    assert not is_congruence(wke, (0, 1, 0))
    with pytest.raises(ValueError):
        quotient(wke, Congruence(wke, (0, 1, 0)))


@pytest.mark.parametrize("name", list(BUILTIN_ALGEBRAS))
def test_congruence_lattice_matches_partition_scan(name):
    A = builtin(name)
    fast = [c.blocks for c in all_congruences(A)]
    slow = [c.blocks for c in all_congruences_bruteforce(A)]
    assert fast == slow
    assert all(is_congruence(A, blocks) for blocks in fast)
