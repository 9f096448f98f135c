from dataclasses import replace

import pytest

from twistcheck import relations as rel
from twistcheck import surfaces
from twistcheck.dsl import format_expr, parse_expr, parse_script, substitute
from twistcheck.homology import abelianization_matrix
from twistcheck.relations import (
    BindError,
    RelationStatement,
    braid_check,
    chain_relation,
    corollary_relation,
    eval_exact,
    eval_homology,
    hkp_relation,
    mutations,
    star_relation,
    verify,
)

EXACT_SURFACES = ("annulus", "S_1_1", "S_1_2", "S_1_3")


def test_chain_relation_texts():
    assert chain_relation(2).text == "(D1*D2)^6 == Db"
    assert chain_relation(3).text == "(D1*D2*D3)^4 == Db1*Db2"
    assert chain_relation(3, "squared_first").text == "(D1^2*D2*D3)^3 == Db1*Db2"
    assert chain_relation(2, "squared_first").text == "(D1^2*D2)^4 == Db"
    assert chain_relation(1).text == "D1^2 == Db1*Db2"
    assert chain_relation(4).surface == "S_2_1"
    with pytest.raises(ValueError):
        chain_relation(0)
    with pytest.raises(ValueError):
        chain_relation(2, "cubed")


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("variant", ["standard", "squared_first"])
def test_chain_relations_verify(m, variant):
    r = verify(chain_relation(m, variant))
    assert (r.homology, r.exact, r.verdict) == ("pass", "pass", "verified")


def test_wrong_chain_exponent_refuted():
    st = rel.parse_relation("S_1_1", "(a * b)^5 == d")
    r = verify(st)
    assert r.refuted and r.homology == "fail" and r.exact == "not-run"
    assert r.witness.startswith("on ")


def test_star_relation():
    st = star_relation()
    assert st.surface == "S_1_3"
    syms = [x.name for x in rel.names(st.lhs)] + [x.name for x in rel.names(st.rhs)]
    assert len(set(syms)) == 7
    r = verify(st)
    assert (r.homology, r.exact) == ("pass", "pass")


def test_corollary_relation_and_mutations():
    st = corollary_relation()
    assert st.text == "(Dr*Dp*Db*Dg)^3 == Db1*Db2*Db3"
    r = verify(st)
    assert r.verdict == "verified"
    muts = mutations(st)
    assert {"exponent_up", "exponent_down", "drop_factor", "invert_factor"} <= set(muts)
    assert format_expr(muts["exponent_down"].lhs) == "(Dr*Dp*Db*Dg)^2"
    for name, m in muts.items():
        ex = verify(m, "exact")
        assert ex.exact == "fail" and ex.witness, name


def test_reversed_corollary_order_is_recorded():
    st = corollary_relation()
    base = st.lhs.base
    rev = RelationStatement(st.surface, rel.Power(rel.comp(*reversed(base.factors)), 3), st.rhs)
    r = verify(rev)
    # recorded outcome: the reversed order already fails on homology
    assert r.homology == "fail" and r.exact == "not-run"
    assert verify(rev, "exact").exact == "fail"


def test_hkp_relation_texts():
    assert hkp_relation(2).text == "D1_1^2 == Db1*Db2"
    assert hkp_relation(3, "typographic").text == "(D1_2*D2_2*D1_1*D2_1)^3 == Db1*Db2*Db3"
    assert hkp_relation(3).text == "(D2_1*D1_1*D2_2*D1_2)^3 == Db1*Db2*Db3"
    with pytest.raises(ValueError):
        hkp_relation(1)


@pytest.mark.parametrize("k", [2, 3])
def test_hkp_exact(k):
    assert verify(hkp_relation(k), "exact").exact == "pass"


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_hkp_homology(k):
    r = verify(hkp_relation(k))
    assert r.homology == "pass"
    assert r.exact == ("pass" if k <= 3 else "unsupported")
    assert r.verdict == ("verified" if k <= 3 else "passed (necessary condition only)")


def test_hkp_typographic_order_fails_from_k3():
    assert verify(hkp_relation(2, "typographic")).verdict == "verified"
    for k in (3, 4, 5):
        assert verify(hkp_relation(k, "typographic")).homology == "fail"


def test_hkp_exact_unsupported_beyond_three():
    with pytest.raises(surfaces.UnsupportedLevel):
        verify(hkp_relation(6), "exact")


def test_trivial_statement_passes():
    r = verify(rel.parse_relation("S_1_3", "x == x".replace("x", "Dg")))
    assert (r.homology, r.exact) == ("pass", "pass")


def test_homology_only_engine():
    r = verify(chain_relation(2), "homology")
    assert r.exact == "not-run" and r.verdict == "passed (necessary condition only)"


def test_braid_checks():
    assert braid_check("S_1_3", "g", "y").exact == "pass"
    assert braid_check("S_1_3", "y", "b").exact == "pass"
    assert braid_check("S_1_3", "y", "p").exact == "pass"
    assert braid_check("S_1_1", "a", "b").exact == "pass"
    assert braid_check("S_1_3", "r", "g").statement.label == "braid"
    with pytest.raises(surfaces.SurfaceError):
        braid_check("S_1_3", "g", "nosuch")
    with pytest.raises(surfaces.SurfaceError):
        braid_check("S_1_3", "g", "g")


def test_braid_check_rejects_other_intersections():
    m = surfaces.builtin("S_1_3")
    curves = dict(m.curves)
    curves["g"] = replace(curves["g"], intersections=dict(curves["g"].intersections, y=2))
    with pytest.raises(surfaces.SurfaceError):
        braid_check(replace(m, curves=curves), "g", "y")


def test_bind_error_reports_position():
    st = RelationStatement("S_1_3", parse_expr("Dg * Dq"), parse_expr("Dg"))
    with pytest.raises(BindError) as exc:
        verify(st)
    assert "column 6" in str(exc.value) and "Dq" in str(exc.value)


def test_resolution_order():
    m = surfaces.builtin("S_1_1")
    assert rel.resolve(rel.Name("a"), m) == "a"
    assert rel.resolve(rel.Name("Da"), m) == "a"
    assert rel.resolve(rel.Name("D1"), m, {"D1": "b"}) == "b"


def test_report_dict_fields():
    d = verify(corollary_relation()).as_dict()
    assert set(d) == {"surface", "statement", "source", "homology", "exact", "verdict", "witness", "seconds"}


def test_emitted_scripts_reparse_to_the_same_statement():
    for st in rel.catalogue().values():
        a = parse_script(st.to_script())[-1]
        table = {k: rel.Name(v) for k, v in st.bindings.items()}
        assert a.surface == st.surface
        assert (a.lhs, a.rhs) == (substitute(st.lhs, table), substitute(st.rhs, table))


def _random_word(rng, curves, length):
    return [(rng.choice(curves), rng.choice([-2, -1, 1, 2])) for _ in range(length)]


def _expr(word):
    return rel.comp(*(rel.Power(rel.Name(c), e) if e != 1 else rel.Name(c) for c, e in word))


def test_engine_soundness_on_random_words(rng):
    """Homology refutes only what the exact engine refutes; abelianization agrees."""
    for name in EXACT_SURFACES:
        m = surfaces.builtin(name)
        curves = list(m.curves)
        for _ in range(100):
            word = _random_word(rng, curves, rng.randint(1, 6))
            e = _expr(word)
            phi = eval_exact(e, m)
            assert abelianization_matrix(phi, m.basepoint, m.tree) == eval_homology(e, m)
            other = _expr(_random_word(rng, curves, rng.randint(1, 6)))
            r = verify(RelationStatement(name, e, other), "exact")
            h = verify(RelationStatement(name, e, other), "homology")
            if h.homology == "fail":
                assert r.exact == "fail"


def test_golden_suite_soundness():
    stmts = [st for st in rel.catalogue().values() if st.surface in EXACT_SURFACES + ("F_2_2", "F_3_3")]
    for st in (corollary_relation(), star_relation(), chain_relation(2), hkp_relation(3)):
        stmts += list(mutations(st).values())
    assert len(stmts) > 20
    for st in stmts:
        h = verify(st, "homology").homology
        x = verify(st, "exact").exact
        if h == "fail":
            assert x == "fail", st.text
        if x == "pass":
            assert h == "pass", st.text
