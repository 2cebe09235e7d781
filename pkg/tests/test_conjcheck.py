import json
from types import SimpleNamespace

import pytest

from twistfact import conjcheck as cc
from twistfact import cyclo
from twistfact.curve import CurveQ, load_curve
from twistfact.errors import ConfigurationError, InvalidParameter, SchemaError

from conftest import DATA, cached_scriptL, chi11

FAMILY = ["5776.i1", "6400.a1", "7056.bg1", "16641.g1", "57600.ch1", "90601.c1",
          "215296.c1", "461041.h1", "499849.d1"]


def descent_entry(label):
    return {"source": "descent", "descent_fixture": str(DATA / "descent" / f"{label.replace('.', '_')}.json")}


def verdict(label, entry=None, **kw):
    v, _ = cc.conjecture_verify(load_curve(label), chi11(), 11, entry or descent_entry(label),
                                scriptL=cached_scriptL(label), **kw)
    return v


def test_7056_descent_verdict():
    v = verdict("7056.bg1")
    assert v.conjecture_holds
    assert 2 in v.survivors
    assert v.per_embedding[2]["lhs"] == "(11, z - 4)^1 * (11, z - 3)^1"
    assert v.per_embedding[2]["rhs"] == v.per_embedding[2]["lhs"]
    assert set(v.survivors) <= {1, 2, 3, 4}


def test_9450_visualization_all_embeddings():
    v = verdict("9450.du1", {"source": "visualization", "mw_fixture": str(DATA / "mw" / "9450_dr1.json")})
    assert v.survivors == [1, 2, 3, 4]
    assert sorted(v.alphas) == [3, 4, 5, 9]


def test_family_intersection_two_curves():
    a, b = verdict("7056.bg1"), verdict("6400.a1")
    assert a.alphas != b.alphas
    assert cc.family_survivors([a, b])


def test_embedding_pin():
    v = verdict("7056.bg1", embedding=2)
    assert list(v.per_embedding) == [2] and v.survivors == [2]
    with pytest.raises(InvalidParameter):
        verdict("7056.bg1", embedding=5)


def test_conjecture_failure_is_content():
    v = verdict("7056.bg1", {"source": "table", "h_theta_roots": [3, 3]})
    assert not v.conjecture_holds and v.per_embedding
    assert v.to_json()["conjecture_holds"] is False


def test_missing_source():
    with pytest.raises(ConfigurationError):
        cc.conjecture_verify(load_curve("7056.bg1"), chi11(), 11, {}, scriptL=cached_scriptL("7056.bg1"))
    with pytest.raises(ConfigurationError):
        verdict("7056.bg1", {"source": "descent"})


def test_vanishing_value_has_no_comparison():
    v, sl = cc.conjecture_verify(load_curve("9450.dr1"), chi11(), 11, {"source": "table", "h_theta_roots": [3]})
    assert sl.is_zero and v.per_embedding == {} and v.notes


@pytest.mark.parametrize("label", ["9450.du1", "7056.bg1", "6400.a1", "207025.by1"])
def test_galois_equivariance(label):
    sl = cached_scriptL(label)
    for k in (1, 2, 3, 4):
        direct = cyclo.part_above_p(sl.recognized.galois(pow(k, -1, 5)), 11)
        assert direct == cc.lhs_for_embedding(sl, k)


# -- BSD norm ---------------------------------------------------------------------------

def test_bsd_9450_and_7056():
    r = cc.bsd_norm_check(load_curve("9450.du1"), cached_scriptL("9450.du1"))
    assert r["status"] == "pass" and r["half_norm"] == 2 ** 2 * 5 * 11 ** 2 * 59
    r = cc.bsd_norm_check(load_curve("7056.bg1"), cached_scriptL("7056.bg1"))
    assert r["status"] == "pass" and abs(r["half_norm"]) == 11 * 31


def test_bsd_unit_case():
    E = CurveQ("unit", (0, -1, 1, -10, -20), 11, {11: "split"},
               extra={"torsion_Q": 1, "torsion_K": 1, "sha_an_Q": 1, "sha_an_K": 1,
                      "tamagawa_ratio_trivial": True})
    for u in (1, -1):
        assert cc.bsd_norm_check(E, SimpleNamespace(norm_plus=u, norm=1))["status"] == "pass"
    assert cc.bsd_norm_check(E, SimpleNamespace(norm_plus=11, norm=121))["status"] == "fail"


def test_bsd_skips_with_reason():
    E = CurveQ("bare", (0, -1, 1, -10, -20), 11, {11: "split"})
    r = cc.bsd_norm_check(E, SimpleNamespace(norm_plus=1, norm=1))
    assert r["status"] == "skipped" and r["reason"]


def test_bsd_all_complete_fixtures():
    for label in ["9450.du1", "7056.bg1"]:
        assert cc.bsd_norm_check(load_curve(label), cached_scriptL(label))["status"] == "pass"


# -- pipeline -------------------------------------------------------------------------

def test_empty_config():
    assert cc.run_pipeline({"entries": []})["entries"] == []


def test_unknown_label():
    cfg = {"character": chi11().to_spec(), "entries": [{"curve": "1.a1", "source": "table", "h_theta_roots": [3]}]}
    with pytest.raises(SchemaError):
        cc.run_pipeline(cfg)


def test_bad_config_file(tmp_path):
    bad = tmp_path / "c.json"
    bad.write_text("{not json")
    with pytest.raises(SchemaError):
        cc.run_pipeline(bad)


def test_pipeline_deterministic():
    cfg = {"p": 11, "character": chi11().to_spec(),
           "entries": [{"curve": "7056.bg1", **descent_entry("7056.bg1"), "bsd_check": True},
                       {"curve": "6400.a1", **descent_entry("6400.a1")}]}
    a = json.dumps(cc.run_pipeline(cfg), default=str)
    b = json.dumps(cc.run_pipeline(cfg), default=str)
    assert a == b
    rep = json.loads(a)
    assert rep["all_hold"] and rep["family_survivors"] == [2, 3]
    assert rep["entries"][0]["bsd"]["status"] == "pass"
    assert [e["verdict"]["curve"] for e in rep["entries"]] == ["7056.bg1", "6400.a1"]


def test_bundled_configs_parse():
    for name in ("cm_family.json", "worked_examples.json"):
        cfg = json.loads((DATA / "configs" / name).read_text())
        assert cfg["entries"]
        for e in cfg["entries"]:
            load_curve(e["curve"])
    fam = json.loads((DATA / "configs" / "cm_family.json").read_text())
    assert [e["curve"] for e in fam["entries"]] == FAMILY
