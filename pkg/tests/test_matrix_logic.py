import pytest

from bochvar.algebra_core import holds_quasi_identity
from bochvar.matrix_logic import (
    EFJ,
    NF,
    LogicalMatrix,
    bochvar_matrix,
    check_deduction_instance,
    consequence,
    deduction_sweep,
    is_theorem,
    matrix_of,
    nonparaconsistent_matrix,
    rule_derivable,
    theoremhood_agreement,
    witness_passivity,
)
from bochvar.terms import QuasiIdentity, enumerate_terms, parse_quasi_identity, parse_rule, parse_term, tau


def test_matrix_description(wke):
    assert matrix_of(wke).describe() == "⟨wke, {1}⟩"
    assert bochvar_matrix().algebra is wke


def test_matrix_needs_designated_elements(wke):
    with pytest.raises(ValueError):
        LogicalMatrix(wke, frozenset())


def test_truth_preservation():
    M = bochvar_matrix()
    assert consequence(M, [parse_term("x")], parse_term("J2 x")).holds
    assert consequence(M, [parse_term("x"), parse_term("x -> y")], parse_term("y")).holds


def test_explosion_from_j1_fails_in_wke():
    verdict = rule_derivable(bochvar_matrix(), EFJ)
    assert not verdict.holds
    assert verdict.labelled() == {"x": "H", "y": "0"}


def test_explosion_from_j1_holds_without_fixpoint():
    assert rule_derivable(nonparaconsistent_matrix(), EFJ).holds


def test_excluded_middle():
    phi = parse_term("x | ~x")
    assert is_theorem(bochvar_matrix(), phi).labelled() == {"x": "H"}
    assert is_theorem(nonparaconsistent_matrix(), phi).labelled() == {"x": "top"}


def test_external_excluded_middle():
    phi = parse_term("J2 x | ~J2 x")
    assert is_theorem(bochvar_matrix(), phi).holds
    assert is_theorem(nonparaconsistent_matrix(), phi).holds


def test_passivity(wke, b4b2):
    assert witness_passivity(NF, b4b2).holds
    realized = witness_passivity(NF, wke)
    assert not realized.holds
    assert realized.labelled() == {"x": "H", "y": "1"}
    assert not witness_passivity(parse_quasi_identity("x = x"), b4b2).holds


def test_passivity_of_a_rule(b4b2):
    assert witness_passivity(parse_rule("J1(x) |- y"), b4b2).holds


@pytest.mark.parametrize("premises, psi, phi", [
    ([], "x", "J2 x"),
    ([], "J1 x", "y"),
    (["x | y"], "~x", "y"),
    (["J2 x"], "y", "x & y"),
])
def test_deduction_instances(premises, psi, phi):
    assert check_deduction_instance(
        bochvar_matrix(), [parse_term(p) for p in premises], parse_term(psi), parse_term(phi)
    )


def test_consequence_matches_the_equational_translation(wke):
    """⟨A, {1}⟩ consequence is quasi-identity validity of the translated rule."""
    M = matrix_of(wke)
    terms = list(enumerate_terms(("x",), 1))
    for gamma in terms:
        for phi in terms:
            q = QuasiIdentity((tau(gamma),), tau(phi))
            assert consequence(M, [gamma], phi).holds == holds_quasi_identity(wke, q).holds


def test_theoremhood_agreement_small_bound():
    report = theoremhood_agreement(max_depth=1, var_count=1)
    assert report.agrees
    assert report.theorems[0] == report.theorems[1]
    assert report.classes > 0


def test_deduction_sweep_small_bound():
    report = deduction_sweep(bochvar_matrix(), max_depth=1, var_count=1)
    assert report.holds
    assert report.triples > 0


@pytest.mark.slow
def test_theoremhood_agreement_depth_three():
    assert theoremhood_agreement(3, 2).agrees


@pytest.mark.slow
def test_deduction_sweep_depth_two():
    assert deduction_sweep(bochvar_matrix(), 2, 2).holds
