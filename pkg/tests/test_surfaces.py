import copy
import json

import pytest

from twistcheck import milnor, modelgen, ribbon, surfaces

CHECKS_PER_CURVE = {"inverse", "abelianization", "peripheral_conjugacy", "peripheral_fixed"}


def _data(name):
    return json.loads((surfaces.DATA_DIR / f"{name}.json").read_text())


def test_builtin_s13():
    m = surfaces.builtin("S_1_3")
    assert (m.genus, m.boundary_count, m.rank) == (1, 3, 4)
    assert sorted(m.curves) == sorted(["b", "g", "p", "r", "y", "b1", "b2", "b3"])
    assert len(m.graph.vertices) == 3 and len(m.graph.edges) == 6
    assert m.level == "exact"


def test_builtin_annulus_and_torus():
    a = surfaces.builtin("annulus")
    assert (a.genus, a.boundary_count, a.rank) == (0, 2, 1)
    assert sorted(a.curves) == ["b1", "b2", "core"]
    t = surfaces.builtin("S_1_1")
    assert (t.genus, t.boundary_count, t.rank) == (1, 1, 2)
    assert sorted(t.curves) == ["a", "b", "d"]


def test_builtin_unknown():
    with pytest.raises(surfaces.SurfaceError):
        surfaces.builtin("S_2_2")


@pytest.mark.parametrize("k,g", [(2, 0), (3, 1), (4, 3), (5, 6), (6, 10)])
def test_chain_surface_shapes(k, g):
    m = surfaces.chain_surface(k)
    assert (m.genus, m.boundary_count, m.rank) == (g, k, (k - 1) ** 2)
    assert all(m.has_curve(f"{i}_{j}") for i in range(1, k) for j in range(1, k))
    assert len(m.boundary_curves()) == k


def test_chain_surface_levels():
    assert surfaces.chain_surface(2, "exact").level == "exact"
    assert surfaces.chain_surface(3, "exact").level == "exact"
    assert surfaces.chain_surface(5).level == "homology"
    with pytest.raises(surfaces.UnsupportedLevel):
        surfaces.chain_surface(4, "exact")
    with pytest.raises(surfaces.SurfaceError):
        surfaces.chain_surface(1)


def test_chain_surface_generated_beyond_shipped():
    m = surfaces.chain_surface(7)
    assert m.rank == 36 and m.genus == 15
    assert surfaces.validate(m).ok


def test_get_resolves_names():
    assert surfaces.get("F_3_3").name == "S_1_3"
    assert surfaces.get("S_1_2").name == "S_1_2"
    with pytest.raises(surfaces.SurfaceError):
        surfaces.get("F_3_4")


@pytest.mark.parametrize("g,b,chi", [(0, 1, 1), (1, 3, -3), (3, 4, -8)])
def test_euler_characteristic(g, b, chi):
    assert surfaces.euler_characteristic(g, b) == chi


def test_euler_matches_milnor_bouquet():
    for k in range(1, 11):
        g = (k - 1) * (k - 2) // 2
        assert surfaces.euler_characteristic(g, k) == 1 - (k - 1) ** 2


def test_chain_rank_equals_milnor_number():
    for k in range(2, 7):
        p = milnor.brieskorn_pham(2, k)
        assert surfaces.chain_surface(k).rank == milnor.milnor_number(milnor.infer_weights(p))


@pytest.mark.parametrize("name", list(surfaces.BUILTIN_NAMES) + ["F_4_4", "F_5_5", "F_6_6"])
def test_shipped_models_validate(name):
    m = surfaces.load(surfaces.DATA_DIR / f"{name}.json")
    rep = surfaces.validate(m)
    assert rep.ok, rep.failures()[:3]
    names = {c.name for c in rep.checks}
    assert {"euler", "rank", "form_rank", "boundary_sum", "intersection_bound"} <= names
    if m.level == "exact":
        assert CHECKS_PER_CURVE <= names


def test_s13_oracles_cover_every_curve():
    rep = surfaces.validate(surfaces.builtin("S_1_3"))
    for check in ("abelianization", "inverse"):
        assert {c.subject for c in rep.checks if c.name == check} == set(surfaces.builtin("S_1_3").curves)
    pairs = [c for c in rep.checks if c.name in ("braid", "commutation")]
    assert pairs and all(c.ok for c in pairs)


def test_round_trip_gives_identical_report(tmp_path):
    for name in surfaces.BUILTIN_NAMES:
        m = surfaces.builtin(name)
        path = tmp_path / f"{name}.json"
        surfaces.save(m, path)
        again = surfaces.load(path)
        assert surfaces.to_dict(again) == surfaces.to_dict(m)
        assert surfaces.validate(again).checks == surfaces.validate(m).checks


def test_corrupted_table_fails_abelianization():
    data = _data("S_1_1")
    curve = next(c for c in data["curves"] if c["name"] == "a")
    curve["twist"]["b"] = "b a a"
    rep = surfaces.validate(surfaces.from_dict(data))
    assert not rep.ok
    assert "abelianization" in rep.failed_names()


def test_wrong_genus_fails_euler():
    data = _data("S_1_3")
    data["genus"] = 2
    rep = surfaces.validate(surfaces.from_dict(data))
    assert "euler" in rep.failed_names()


def test_wrong_intersection_declaration_fails_braid():
    data = _data("S_1_3")
    for c in data["curves"]:
        if c["name"] == "g":
            c["intersections"]["b"] = 0
        if c["name"] == "b":
            c["intersections"]["g"] = 0
    rep = surfaces.validate(surfaces.from_dict(data))
    assert "commutation" in rep.failed_names()


def test_malformed_definitions():
    data = _data("S_1_1")
    del data["edges"]
    with pytest.raises(surfaces.SurfaceError):
        surfaces.from_dict(data)
    data = _data("S_1_1")
    data["curves"][0]["twist"]["b"] = "b d2"
    with pytest.raises(surfaces.SurfaceError):
        surfaces.from_dict(data)


def test_load_errors(tmp_path):
    with pytest.raises(surfaces.SurfaceError):
        surfaces.load(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(surfaces.SurfaceError):
        surfaces.load(bad)


def test_shipped_files_regenerate_exactly():
    for spec in modelgen.builtin_specs():
        assert ribbon.build_surface_data(spec) == _data(spec.name), spec.name


def test_s13_schema_fields():
    data = _data("S_1_3")
    assert set(data) == {
        "name", "genus", "boundary_count", "vertices", "edges", "peripheral",
        "homology_basis", "intersection_form", "curves",
    }
    for c in data["curves"]:
        assert set(c) == {"name", "is_boundary", "homology", "twist", "twist_inverse", "intersections"}
    assert copy.deepcopy(data) == surfaces.to_dict(surfaces.from_dict(data))
