import pytest

from bochvar.algebra_core import Homomorphism, enumerate_homomorphisms
from bochvar.amalgam import (
    ALLOWED,
    Amalgam,
    AmalgamClass,
    VFormation,
    amalgamate,
    amalgamation_sweep,
    compatible_pairs,
    congruence_extension_check,
    embeddings,
    require_class,
    v_formations,
    verify_amalgam,
)
from bochvar.classify import classify
from bochvar.errors import AmalgamationError


def formation(A, B, C):
    return VFormation(A, B, C, embeddings(A, B)[0], embeddings(A, C)[0])


def test_formation_rejects_non_homomorphisms(b2, wke):
    bad = Homomorphism(b2, wke, (wke.one, wke.one))
    good = enumerate_homomorphisms(b2, wke)[0]
    with pytest.raises(AmalgamationError, match="i is not a homomorphism"):
        VFormation(b2, wke, wke, bad, good)


def test_formation_checks_source_and_target(b2, wke, b4):
    to_b4 = embeddings(b2, b4)[0]
    to_wke = embeddings(b2, wke)[0]
    with pytest.raises(AmalgamationError, match="must map"):
        VFormation(b2, wke, wke, to_b4, to_wke)


def test_nbca_rejects_a_fixpoint(b2, wke, b4):
    v = formation(b2, wke, b4)
    with pytest.raises(AmalgamationError, match="outside NBCA"):
        require_class(v, AmalgamClass.NBCA)


def test_amalgamate_wke_over_b2(b2, wke):
    v = formation(b2, wke, wke)
    result = amalgamate(v, AmalgamClass.BCA)
    assert isinstance(result, Amalgam)
    assert result.D.size == 3
    assert result.pairs == 1
    assert verify_amalgam(v, result.D, result.h, result.k, AmalgamClass.BCA) is None


def test_amalgamate_in_nbca(b2, b4, b4b2):
    v = formation(b2, b4b2, b4)
    assert compatible_pairs(v, b4b2)
    result = amalgamate(v, AmalgamClass.NBCA)
    assert isinstance(result, Amalgam)
    assert verify_amalgam(v, result.D, result.h, result.k, AmalgamClass.NBCA) is None
    assert classify(result.D).verdict in ALLOWED[AmalgamClass.NBCA]


def test_verify_rejects_broken_maps(b2, wke):
    v = formation(b2, wke, wke)
    result = amalgamate(v, AmalgamClass.BCA)
    collapsed = Homomorphism(wke, result.D, (result.D.one,) * 3)
    problem = verify_amalgam(v, result.D, collapsed, result.k, AmalgamClass.BCA)
    assert problem.startswith("not a homomorphism: h")


def test_v_formations_and_sweep(b2, wke, b4b2):
    formations = v_formations([wke, b4b2], [b2])
    assert len(formations) == 4
    outcomes = amalgamation_sweep(formations, AmalgamClass.BCA, workers=2)
    assert [o.formation for o in outcomes] == formations
    assert all(o.problem is None for o in outcomes)


def test_sweep_sample_is_seeded(b2, wke, b4b2):
    formations = v_formations([wke, b4b2], [b2])
    first = amalgamation_sweep(formations, AmalgamClass.BCA, sample=2, seed=3, workers=1)
    again = amalgamation_sweep(formations, AmalgamClass.BCA, sample=2, seed=3, workers=1)
    assert len(first) == 2
    assert [o.formation for o in first] == [o.formation for o in again]


@pytest.mark.slow
def test_amalgamation_over_small_nbca_members(enumerated):
    members = [A for A in enumerated if 1 < A.size <= 6 and classify(A).verdict in ALLOWED[AmalgamClass.NBCA]]
    bases = [A for A in enumerated if A.size <= 2]
    outcomes = amalgamation_sweep(v_formations(members, bases), AmalgamClass.NBCA, workers=2)
    assert all(o.problem is None for o in outcomes)


def test_congruence_extension_fails_for_nbca():
    report = congruence_extension_check()
    assert report.theta == "{1,na} {0,a}"
    assert report.quotient_is_b2
    assert report.quotient_in_nbca
    assert report.bruteforce_agrees
    assert report.proper_containing == 0
    assert report.extension_fails


@pytest.mark.slow
def test_amalgamation_over_small_bca_members(enumerated):
    members = [A for A in enumerated if 1 < A.size <= 6]
    assert "b4+b1" in [A.name for A in members]
    outcomes = amalgamation_sweep(v_formations(members, members), AmalgamClass.BCA, workers=2)
    assert outcomes
    assert all(o.problem is None for o in outcomes), [o.problem for o in outcomes if o.problem]
