import pytest
from httpx import ASGITransport, AsyncClient

from bochvar import api
from bochvar.algebra_core import builtin
from bochvar.api import app


@pytest.fixture
async def client():
    async with AsyncClient(transport=ASGITransport(app=app), base_url="http://test") as c:
        yield c


async def test_health(client):
    r = await client.get("/health")
    assert r.status_code == 200
    assert r.json()["status"] == "ok"


async def test_list_algebras(client):
    r = await client.get("/algebras")
    assert r.status_code == 200
    by_name = {a["name"]: a for a in r.json()}
    assert {"wke", "b2", "b4", "b4+b2"} <= set(by_name)
    assert by_name["wke"]["elements"] == ["1", "0", "H"]


async def test_get_algebra(client):
    r = await client.get("/algebras/wke")
    assert r.status_code == 200
    assert r.json()["text"].startswith("algebra wke")


async def test_unknown_algebra_is_404(client):
    r = await client.get("/algebras/nope")
    assert r.status_code == 404
    r = await client.post("/classify", json={"algebra": "nope"})
    assert r.status_code == 404


async def test_eval(client):
    r = await client.post("/eval", json={"term": "J1(x)", "valuation": {"x": "H"}})
    assert r.status_code == 200
    assert r.json()["value"] == "1"


async def test_bad_term_is_422(client):
    r = await client.post("/eval", json={"term": "x &", "valuation": {}})
    assert r.status_code == 422


async def test_check(client):
    r = await client.post("/check", json={"statement": "x & (x | y) = x"})
    body = r.json()
    assert body["holds"] is False
    assert body["counterexample"] == {"x": "1", "y": "H"}


async def test_check_passivity(client):
    r = await client.post("/check", json={"algebra": "b4+b2", "statement": "J1 x = 1 => y = 1",
                                          "passivity": True})
    assert r.json()["witnessed"] is True


async def test_consequence(client):
    r = await client.post("/consequence", json={"query": "J1(x) |- y"})
    body = r.json()
    assert body["holds"] is False
    assert body["counterexample"] == {"x": "H", "y": "0"}


async def test_classify_inline_algebra(client):
    r = await client.post("/classify", json={"algebra_text": builtin("b4+b2").to_text()})
    assert r.status_code == 200
    assert r.json()["verdict"] == "NBCA_proper"
    assert r.json()["exit_code"] == 5


async def test_decompose(client):
    r = await client.post("/decompose", json={"algebra": "wke"})
    fibers = r.json()["fibers"]
    assert [f["elements"] for f in fibers] == [["1", "0"], ["H"]]
    assert all(c["passed"] for c in r.json()["conditions"])


async def test_claims(client):
    r = await client.get("/claims")
    claims = r.json()
    assert len(claims) == 103
    assert any(c.get("property") == "decomposition" for c in claims)


async def test_corpus_run_rejects_unknown_claims(client):
    r = await client.post("/corpus/run", json={"size": 3, "claims": ["no-such-claim"]})
    assert r.status_code == 404


async def test_corpus_run_single_claim(client):
    r = await client.post("/corpus/run", json={"size": 3, "claims": ["remark.j2-join"]})
    assert r.status_code == 200
    (result,) = r.json()["results"]
    assert result["observed"] == "fails"
    assert result["grade"] == "PASS"


async def test_logging_is_configured_at_startup(monkeypatch):
    calls = []
    monkeypatch.setattr(api, "configure_logging", lambda: calls.append("configured"))
    async with api.lifespan(app):
        assert calls == ["configured"]
