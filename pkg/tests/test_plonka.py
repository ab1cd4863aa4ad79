import pytest

from bochvar.algebra_core import DATA_DIR, find_isomorphism
from bochvar.classify import bca_axiom_failure, short_basis_failure
from bochvar.errors import DecompositionError, DirectSystemError, SizeGuardError
from bochvar.plonka import (
    attach_J,
    boolean_algebra,
    decompose,
    enumerate_bca,
    kernel_filter_generator,
    load_system,
    parse_system,
    plonka_sum,
    same_fiber,
    skeleton_system,
    system_conditions,
    system_to_text,
    verify_decomposition_conditions,
)


# ──────────────────────────────────────────────────────────────────
# SUMS
# ──────────────────────────────────────────────────────────────────

def test_wke_is_the_sum_of_b2_and_a_point(wke):
    S = load_system("wke.sys")
    A = attach_J(S)
    assert A.elements == ("1", "0", "H")
    assert find_isomorphism(A, wke) is not None
    assert kernel_filter_generator(S, 1) == (S.fibers[0].index("0"), True)


def test_designated_system_rebuilds_b4b2(b4b2):
    A = attach_J(load_system("b4+b2.sys"))
    assert A.elements == b4b2.elements
    assert find_isomorphism(A, b4b2) is not None


def test_injective_transition_has_no_j():
    S = load_system("copy.sys")
    assert plonka_sum(S).size == 4
    failed = [c.check for c in system_conditions(S) if not c.passed]
    assert "bottom transitions not injective" in failed
    with pytest.raises(DirectSystemError, match="bottom transitions not injective"):
        attach_J(S)


def test_broken_transition_is_rejected():
    text = (DATA_DIR / "b4+b2.sys").read_text()
    text = text.replace("a->top na->bot", "a->bot na->bot")
    S = parse_system(text, "broken", DATA_DIR)
    with pytest.raises(DirectSystemError, match="transition is not a homomorphism"):
        plonka_sum(S)


def test_wrong_designated_element_is_reported():
    text = (DATA_DIR / "b4+b2.sys").read_text().replace("designate i1 a", "designate i1 na")
    S = parse_system(text, "wrong", DATA_DIR)
    failed = {c.check for c in system_conditions(S) if not c.passed}
    assert "designated elements generate kernel filters" in failed


# ──────────────────────────────────────────────────────────────────
# DECOMPOSITION
# ──────────────────────────────────────────────────────────────────

def test_decompose_wke(wke):
    d = decompose(wke)
    assert d.describe() == "i0={1,0} a=1 i1={H} a=0"
    assert d.system.bottom == 0


def test_decompose_b4b2(b4b2):
    d = decompose(b4b2)
    assert d.describe() == "i0={1,0,a,na} a=1 i1={top,bot} a=a"
    assert d.upper_bound() == 1
    assert all(c.passed for c in verify_decomposition_conditions(d))


def test_same_fiber(b4b2):
    assert same_fiber(b4b2, b4b2.index("1"), b4b2.index("a"))
    assert not same_fiber(b4b2, b4b2.index("1"), b4b2.index("top"))


def test_single_fiber_algebras(b2, b4):
    for A in (b2, b4):
        d = decompose(A)
        assert len(d.system.indices) == 1
        assert all(c.passed for c in verify_decomposition_conditions(d))


def test_non_bisemilattice_is_rejected(b2):
    broken = b2.with_entry("or", (b2.one, b2.zero), b2.zero, name="broken")
    with pytest.raises(DecompositionError, match="not an involutive bisemilattice"):
        decompose(broken)


def test_system_text_roundtrip(b4b2):
    S = decompose(b4b2).system
    again = parse_system(system_to_text(S), "roundtrip")
    assert find_isomorphism(attach_J(again), b4b2) is not None


def test_decompose_then_compose_on_enumerated(enumerated):
    for A in enumerated:
        if A.size == 1:
            continue
        d = decompose(A)
        assert all(c.passed for c in verify_decomposition_conditions(d)), A.name
        assert find_isomorphism(attach_J(d.system), A) is not None, A.name


# ──────────────────────────────────────────────────────────────────
# ENUMERATION
# ──────────────────────────────────────────────────────────────────

def test_boolean_algebras(b2, b4):
    assert find_isomorphism(boolean_algebra(1), b2) is not None
    assert find_isomorphism(boolean_algebra(2), b4) is not None
    assert boolean_algebra(3).size == 8


@pytest.mark.parametrize("max_size, count", [(1, 1), (3, 3), (4, 4), (6, 6)])
def test_enumeration_counts(max_size, count):
    assert len(enumerate_bca(max_size, workers=2)) == count


def test_enumeration_up_to_eight(enumerated, wke, b4b2):
    assert [A.name for A in enumerated] == [
        "trivial", "b2", "b2+b1", "b4", "b4+b1", "b4+b2", "b4+b1+b2", "b8",
    ]
    assert [A.size for A in enumerated] == list(range(1, 9))
    assert find_isomorphism(enumerated[2], wke) is not None
    assert find_isomorphism(enumerated[5], b4b2) is not None


def test_enumeration_size_guard():
    with pytest.raises(SizeGuardError):
        enumerate_bca(13)


# ──────────────────────────────────────────────────────────────────
# INCOMPARABLE INDICES
# ──────────────────────────────────────────────────────────────────

DIAMOND = [(0, 1, 2, 3), (1, 1, 3, 3), (2, 3, 2, 3), (3, 3, 3, 3)]


def test_designated_elements_must_meet_at_joins():
    S = skeleton_system(3, (0b111, 0b110, 0b011, 0b000), DIAMOND)
    failed = [c for c in system_conditions(S) if not c.passed]
    assert [c.check for c in failed] == ["designated elements meet at joins"]
    assert failed[0].detail == "a_i3 is not a_i1 ∧ a_i2"
    with pytest.raises(DirectSystemError, match="designated elements meet at joins"):
        attach_J(S)


def test_consistent_diamond_is_a_bochvar_algebra():
    A = attach_J(skeleton_system(2, (0b11, 0b10, 0b01, 0b00), DIAMOND))
    assert A.size == 9
    assert bca_axiom_failure(A) is None
    assert short_basis_failure(A) is None


def test_transitions_above_the_bottom_are_not_injective(enumerated):
    for A in enumerated:
        if A.size == 1:
            continue
        S = decompose(A).system
        k = len(S.indices)
        for i in range(k):
            for j in range(k):
                if S.strictly_below(i, j):
                    assert not S.hom(i, j).is_injective, (A.name, S.indices[i], S.indices[j])
