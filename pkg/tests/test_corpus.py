import json
import random
from collections import Counter

import pytest

from bochvar.algebra_core import builtin
from bochvar.corpus import (
    CLAIMS_FILE,
    Claim,
    Expectation,
    basis_equivalence_check,
    build_scope,
    load_claims,
    membership_row,
    mutate,
    run_corpus,
)
from bochvar.errors import FormatError, UnknownNameError


@pytest.fixture(scope="module")
def small_scope():
    return build_scope(4, workers=2)


def test_claim_inventory():
    claims = load_claims()
    assert len(claims) == 103
    assert Counter(c.group for c in claims) == {
        "basis": 13, "bca": 20, "chain": 8, "derived-i": 9, "derived-ii": 15, "designated": 5,
        "fiber": 9, "hom": 8, "ibsl": 9, "interval": 2, "nf": 5,
    }
    assert Counter(c.expect for c in claims) == {
        Expectation.HOLDS: 97, Expectation.FAILS: 4, Expectation.DISCREPANCY: 2,
    }


def test_property_claims_need_a_property():
    with pytest.raises(ValueError):
        Claim.model_validate({"id": "p", "group": "g", "kind": "property", "expect": "holds", "source": "s"})


def test_duplicate_ids_are_rejected(tmp_path):
    raw = json.loads(CLAIMS_FILE.read_text())
    path = tmp_path / "claims.json"
    path.write_text(json.dumps(raw + raw[:1]))
    with pytest.raises(FormatError, match="duplicate claim id"):
        load_claims(path)


def test_unknown_property_is_rejected(tmp_path):
    path = tmp_path / "claims.json"
    path.write_text(json.dumps([{
        "id": "p", "group": "g", "kind": "property", "property": "nonsense", "expect": "holds", "source": "s",
    }]))
    with pytest.raises(FormatError, match="unknown property"):
        load_claims(path)


def test_scope_puts_wke_first(small_scope):
    assert small_scope.algebras[0].name == "wke"
    assert [A.name for A in small_scope.algebras] == ["wke", "trivial", "b2", "b4"]


def test_stated_identity_is_an_erratum_candidate(small_scope):
    report = run_corpus(claim_ids=["derived-ii.2-stated"], scope=small_scope, workers=1)
    (r,) = report.results
    assert r.observed == "fails"
    assert r.grade == "PASS"
    assert r.algebra == "wke"
    assert r.counterexample == {"x": "0"}
    assert r.detail.startswith("erratum candidate:")


def test_expected_failures_pass(small_scope):
    report = run_corpus(claim_ids=["remark.j2-join", "nf"], scope=small_scope, workers=2)
    assert [r.id for r in report.results] == ["remark.j2-join", "nf"]
    assert all(r.observed == "fails" and r.grade == "PASS" for r in report.results)
    assert report.results[1].counterexample == {"x": "H", "y": "0"}
    assert report.ok


def test_holding_claims_record_their_scope(small_scope):
    report = run_corpus(claim_ids=["derived-ii.2-proof"], scope=small_scope, workers=1)
    (r,) = report.results
    assert r.observed == "holds"
    assert r.scope == len(small_scope.algebras)


def test_unknown_claim_id(small_scope):
    with pytest.raises(UnknownNameError, match="no-such-claim"):
        run_corpus(claim_ids=["no-such-claim"], scope=small_scope)


def test_membership_row_agrees_on_members(wke, b4b2):
    for A in (wke, b4b2):
        row = membership_row(A)
        assert row.axioms and row.short_basis and row.separation
        assert row.agrees
        assert row.detail == ""


def test_mutation_changes_one_entry(wke):
    M = mutate(wke, random.Random(1), "t")
    assert M.name == "wke~t"
    changed = sum(
        int((M.op(op) != wke.op(op)).sum()) for op in wke.operation_names
    )
    assert changed == 1


def test_mutated_rows_still_agree(b4):
    rng = random.Random(5)
    for n in range(10):
        assert membership_row(mutate(b4, rng, str(n)), mutated=True).agrees


@pytest.mark.slow
def test_full_corpus():
    report = run_corpus(size=8, workers=2)
    assert report.claims == 103
    assert report.ok, [r.id for r in report.results if r.grade != "PASS"]


@pytest.mark.slow
def test_basis_equivalence():
    report = basis_equivalence_check(max_size=4, mutations=20, seed=11, workers=2)
    assert report.checked == 4 + 20
    assert report.ok
