import pytest

from bochvar.algebra_core import Signature, trivial_algebra
from bochvar.classify import (
    ChainVerdict,
    bca_axiom_failure,
    build_retraction,
    classify,
    has_fixpoint,
    in_nbca,
    membership,
    short_basis_failure,
)
from bochvar.errors import ClassificationError, RetractionError, SignatureError

EXPECTED = {
    "trivial":  ChainVerdict.TRIVIAL,
    "b2":       ChainVerdict.JBA,
    "b2+b1":    ChainVerdict.BCA_PROPER,
    "b4":       ChainVerdict.JBA,
    "b4+b1":    ChainVerdict.BCA_PROPER,
    "b4+b2":    ChainVerdict.NBCA_PROPER,
    "b4+b1+b2": ChainVerdict.BCA_PROPER,
    "b8":       ChainVerdict.JBA,
}


def test_wke_is_proper_bca(wke):
    c = classify(wke)
    assert c.verdict == ChainVerdict.BCA_PROPER
    assert c.exit_code == 6
    assert c.witness.source.name == "wke"
    assert c.witness.is_injective and c.witness.check() is None


def test_b4b2_is_proper_nbca(b4b2):
    c = classify(b4b2)
    assert c.verdict == ChainVerdict.NBCA_PROPER
    assert c.exit_code == 5
    assert c.witness.map == tuple(range(6))


def test_boolean_members_are_jba(b2, b4):
    for A in (b2, b4):
        c = classify(A)
        assert c.verdict == ChainVerdict.JBA
        assert c.exit_code == 4
        assert c.witness is None


def test_trivial_algebra():
    c = classify(trivial_algebra())
    assert c.verdict == ChainVerdict.TRIVIAL
    assert c.exit_code == 3


def test_non_member_agrees_on_all_three_tests(wke):
    broken = wke.with_entry("J2", (wke.index("H"),), wke.index("H"), name="broken")
    evidence = membership(broken)
    assert evidence.axioms is not None
    assert evidence.short_basis is not None
    assert not evidence.separation.separated
    c = classify(broken)
    assert c.verdict == ChainVerdict.NOT_BCA
    assert c.exit_code == 1
    assert c.reason


def test_axiom_lists_hold_on_builtins(wke, b2, b4, b4b2):
    for A in (wke, b2, b4, b4b2):
        assert bca_axiom_failure(A) is None
        assert short_basis_failure(A) is None


def test_boolean_signature_cannot_be_classified(b2):
    with pytest.raises(SignatureError):
        classify(b2.reduct(Signature.BOOLEAN))


def test_two_fixpoints_are_rejected(b2):
    identity_neg = b2.with_entry("neg", (0,), 0).with_entry("neg", (1,), 1)
    with pytest.raises(ClassificationError):
        has_fixpoint(identity_neg)


def test_enumerated_chain(enumerated):
    assert {A.name: classify(A).verdict for A in enumerated} == EXPECTED


def test_fixpoint_free_members_are_in_nbca(enumerated):
    for A in enumerated:
        if A.size > 1:
            assert in_nbca(A) == (has_fixpoint(A) is None), A.name


# ──────────────────────────────────────────────────────────────────
# RETRACTION
# ──────────────────────────────────────────────────────────────────

def test_retraction_of_b4b2(b4b2):
    r = build_retraction(b4b2)
    assert b4b2.label(r.atom) == "a"
    assert r.r.as_dict() == {"1": "1", "0": "0", "a": "1", "na": "0", "top": "1", "bot": "0"}
    assert r.iota.then(r.r).map == (0, 1)


def test_retraction_of_boolean_algebra(b4):
    r = build_retraction(b4)
    assert r.r.check() is None
    assert r.r.is_surjective


def test_no_retraction_with_a_fixpoint(wke):
    with pytest.raises(RetractionError, match="fixpoint present, no homomorphism onto b2"):
        build_retraction(wke)


def test_retraction_on_every_fixpoint_free_member(enumerated):
    for A in enumerated:
        if A.size > 1 and has_fixpoint(A) is None:
            r = build_retraction(A)
            assert r.r.check() is None and r.iota.check() is None
