import pytest

from bochvar.algebra_core import builtin, evaluate
from bochvar.errors import TermSyntaxError
from bochvar.terms import (
    ONE,
    ZERO,
    Binary,
    Equation,
    Unary,
    Var,
    covered_variables,
    depth,
    eliminate_J01,
    enumerate_terms,
    expand_equiv,
    implies,
    is_external,
    parse_equation,
    parse_quasi_identity,
    parse_rule,
    parse_term,
    render_term,
    rho,
    sorted_variables,
    substitute,
    tau,
)

x, y, z = Var("x"), Var("y"), Var("z")


# ──────────────────────────────────────────────────────────────────
# PARSING
# ──────────────────────────────────────────────────────────────────

def test_parse_operators():
    assert parse_term("J1(x)") == Unary("J1", x)
    assert parse_term("~x") == Unary("neg", x)
    assert parse_term("x & y | z") == Binary("or", Binary("and", x, y), z)
    assert parse_term("x | y & z") == Binary("or", x, Binary("and", y, z))
    assert parse_term("x | y | z") == Binary("or", Binary("or", x, y), z)


def test_j_without_parentheses_binds_to_one_token():
    assert parse_term("J2 x | ~J2 x") == Binary("or", Unary("J2", x), Unary("neg", Unary("J2", x)))


def test_arrow_expands_and_associates_right():
    assert parse_term("x -> y") == Binary("or", Unary("neg", x), y)
    assert parse_term("x -> y -> z") == implies(x, implies(y, z))


def test_biconditional_expands():
    assert parse_term("x <-> y") == Binary("and", implies(x, y), implies(y, x))


def test_constants():
    assert parse_term("0") == ZERO
    assert parse_term("1") == ONE


def test_parse_quasi_identity_and_rule():
    q = parse_quasi_identity("J1(x) = 1 => y = 1")
    assert q.antecedents == (Equation(Unary("J1", x), ONE),)
    assert q.consequent == Equation(y, ONE)
    assert parse_quasi_identity("x = x").is_identity

    rule = parse_rule("x, x -> y |- y")
    assert rule.premises == (x, implies(x, y))
    assert rule.conclusion == y
    assert parse_rule("|- x | ~x").premises == ()


def test_parse_equation():
    assert parse_equation("~~x = x") == Equation(Unary("neg", Unary("neg", x)), x)


def test_syntax_error_carries_position():
    with pytest.raises(TermSyntaxError) as exc:
        parse_term("x &")
    assert exc.value.line >= 1 and exc.value.column >= 1


def test_unknown_operator_is_named():
    with pytest.raises(TermSyntaxError, match="unknown operator 'K'"):
        parse_term("K(x)")


def test_reserved_names_are_not_variables():
    with pytest.raises(ValueError):
        Var("J2")


# ──────────────────────────────────────────────────────────────────
# PRINTING
# ──────────────────────────────────────────────────────────────────

def test_render_minimal_parentheses():
    assert render_term(Unary("J2", ONE)) == "J2(1)"
    assert render_term(Binary("and", x, Binary("or", y, z))) == "x & (y | z)"
    assert render_term(Binary("or", Binary("and", x, y), z)) == "x & y | z"
    assert render_term(Binary("or", x, Binary("or", y, z))) == "x | (y | z)"
    assert render_term(Unary("neg", Binary("or", x, y))) == "~(x | y)"


def test_render_parse_roundtrip():
    for t in enumerate_terms(("x", "y"), 2):
        assert parse_term(render_term(t)) == t


# ──────────────────────────────────────────────────────────────────
# STRUCTURE
# ──────────────────────────────────────────────────────────────────

def test_depth_and_variables():
    t = parse_term("J2(x & ~y) | 0")
    assert depth(t) == 4
    assert sorted_variables(t) == ("x", "y")
    assert sorted_variables(parse_quasi_identity("x = y => z = 1")) == ("x", "y", "z")


def test_substitute_is_simultaneous():
    t = parse_term("x | y")
    assert substitute(t, {"x": y, "y": x}) == parse_term("y | x")
    assert substitute(t, {"z": ONE}) == t


def test_covered_and_open_variables():
    covered, open_ = covered_variables(parse_term("J2(x) | y"))
    assert covered == {"x"}
    assert open_ == {"y"}

    covered, open_ = covered_variables(parse_term("J0(x) & x"))
    assert covered == frozenset()
    assert open_ == {"x"}


def test_is_external():
    assert is_external(parse_term("J2(x) -> J0(y)"))
    assert is_external(ONE)
    assert not is_external(x)
    assert not is_external(parse_term("J1(x) | x"))


def test_external_terms_take_classical_values(wke):
    classical = {wke.one, wke.zero}
    for t in enumerate_terms(("x",), 2):
        if is_external(t):
            assert {evaluate(wke, t, {"x": v}) for v in range(wke.size)} <= classical


def test_enumeration_counts():
    assert len(list(enumerate_terms(("x",), 0))) == 3
    assert len(list(enumerate_terms(("x",), 1))) == 33


# ──────────────────────────────────────────────────────────────────
# DERIVED CONNECTIVES
# ──────────────────────────────────────────────────────────────────

def test_expanded_equivalence_is_identity_test(wke):
    same = expand_equiv(x, x)
    assert all(evaluate(wke, same, {"x": v}) == wke.one for v in range(wke.size))
    assert evaluate(wke, expand_equiv(ZERO, ONE), {}) == wke.zero


def test_tau_and_rho():
    phi = parse_term("J2 x")
    assert tau(phi) == Equation(phi, ONE)
    assert rho(Equation(x, y)) == expand_equiv(x, y)


@pytest.mark.parametrize("name", ["wke", "b2", "b4", "b4+b2"])
def test_eliminating_j0_j1_preserves_values(name):
    A = builtin(name)
    for t in enumerate_terms(("x",), 2):
        reduced = eliminate_J01(t)
        for v in range(A.size):
            assert evaluate(A, t, {"x": v}) == evaluate(A, reduced, {"x": v})


def test_eliminated_terms_use_only_j2():
    reduced = eliminate_J01(parse_term("J0 x | J1 y"))
    assert "J0" not in render_term(reduced)
    assert "J1" not in render_term(reduced)
