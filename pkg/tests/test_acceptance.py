"""The eight acceptance criteria, one test each.

Every test prints a single PASS/FAIL line; the lines are repeated in the
terminal summary under "acceptance criteria".
"""

import time

from dsl_gen import EXPR_ALPHABET, fuzz_text, random_expr, random_poly
from twistcheck import homology as hom
from twistcheck import milnor, surfaces
from twistcheck.derivation import check_derivation, final_equation, fmt_eq, parse_derivation
from twistcheck.dsl import DslError, Name, comp, format_expr, parse_expr, parse_script, pow_
from twistcheck.relations import (
    RelationStatement,
    braid_check,
    catalogue,
    chain_relation,
    eval_exact,
    eval_homology,
    from_assert,
    hkp_relation,
    mutations,
    parse_relation,
    star_relation,
    verify,
)

EXACT_SURFACES = ("annulus", "S_1_1", "S_1_2", "S_1_3")
SHIPPED = EXACT_SURFACES + ("F_4_4", "F_5_5", "F_6_6")


def test_criterion_1_corollary_exact(criterion, root):
    with criterion(1, "twelve-twist relation on S_1_3 verified exactly, mutations refuted"):
        t0 = time.perf_counter()
        directives = parse_script((root / "relations" / "corollary13.rel").read_text())
        st = from_assert(directives[-1])
        rep = verify(st, "exact")
        assert rep.exact == "pass"
        muts = mutations(st)
        for name in ("exponent_down", "drop_factor", "invert_factor"):
            bad = verify(muts[name], "exact")
            assert bad.exact == "fail" and bad.witness, name
        assert time.perf_counter() - t0 < 1.0


def test_criterion_2_star_and_derivation(criterion, root):
    with criterion(2, "star relation, braid/commutation facts and the derivation script"):
        t0 = time.perf_counter()
        assert verify(star_relation(), "exact").exact == "pass"
        assert braid_check("S_1_3", "y", "g").exact == "pass"
        assert braid_check("S_1_3", "y", "b").exact == "pass"
        assert braid_check("S_1_3", "y", "p").exact == "pass"
        m = surfaces.builtin("S_1_3")
        y = m.curve("y").intersections
        assert (y["g"], y["b"], y["p"]) == (1, 0, 0)
        script = parse_derivation((root / "derivations" / "cor13_to_star.dv").read_text())
        rep = check_derivation(script)
        assert rep.ok, rep.first_violation()
        assert fmt_eq(final_equation(script)) == star_relation().text
        assert time.perf_counter() - t0 < 1.0


def test_criterion_3_chain_relations(criterion):
    with criterion(3, "2-chain and 3-chain relations exact, wrong exponent refuted"):
        t0 = time.perf_counter()
        assert verify(chain_relation(2), "exact").exact == "pass"
        assert verify(chain_relation(3), "exact").exact == "pass"
        wrong = RelationStatement("S_1_1", pow_(comp(Name("D1"), Name("D2")), 5), Name("Db"),
                                  bindings={"D1": "a", "D2": "b", "Db": "d"})
        assert verify(wrong, "exact").exact == "fail"
        assert verify(wrong).refuted
        assert time.perf_counter() - t0 < 1.0


def test_criterion_4_hkp(criterion):
    with criterion(4, "fiber monodromy relation: exact for k = 2, 3, homology for k = 2..6"):
        t0 = time.perf_counter()
        assert hkp_relation(2).text == "D1_1^2 == Db1*Db2"
        for k in (2, 3):
            assert verify(hkp_relation(k), "exact").exact == "pass"
        for k in range(2, 7):
            assert surfaces.chain_surface(k).rank == (k - 1) ** 2
            assert verify(hkp_relation(k), "homology").homology == "pass"
        assert time.perf_counter() - t0 < 5.0


def test_criterion_5_formulas(criterion):
    with criterion(5, "twist counts, Milnor numbers and fiber topology"):
        for n in range(1, 6):
            for k in range(1, 11):
                assert milnor.twist_count(n, k) == k * (k - 1) ** n
                assert milnor.per_fiber_count(n, k) == (k - 1) ** n
                p = milnor.brieskorn_pham(n, k)
                assert milnor.milnor_number(milnor.WeightData.of((1,) * n, k)) == (k - 1) ** n
                assert milnor.milnor_number(milnor.infer_weights(p)) == (k - 1) ** n
            assert milnor.twist_count(n, 1) == 0
        assert milnor.twist_count(1, 2) == 2
        assert milnor.milnor_number(milnor.infer_weights(milnor.parse_poly("z0^2 + z1^3"))) == 2
        for k in range(1, 11):
            t = milnor.fiber_topology(k)
            assert t["euler"] == 1 - milnor.milnor_number(milnor.WeightData.of((1, 1), k))


def test_criterion_6_model_certification(criterion):
    with criterion(6, "every shipped surface model passes validation"):
        for name in SHIPPED:
            rep = surfaces.validate(surfaces.load(surfaces.DATA_DIR / f"{name}.json"))
            assert rep.ok, (name, rep.failures()[:3])
        rep = surfaces.validate(surfaces.builtin("S_1_3"))
        by_name = {}
        for c in rep.checks:
            by_name.setdefault(c.name, []).append(c)
        assert len(by_name["abelianization"]) == 8
        assert len(by_name["inverse"]) == 8
        assert len(by_name["peripheral_conjugacy"]) == 8 * 3
        assert by_name["braid"] and by_name["commutation"]


def test_criterion_7_engine_soundness(criterion, rng):
    with criterion(7, "homology refutation implies exact refutation; abelianization matches"):
        golden = [st for st in catalogue().values() if st.surface in EXACT_SURFACES + ("F_2_2", "F_3_3")]
        for st in list(golden):
            golden += list(mutations(st).values())
        golden.append(parse_relation("S_1_1", "(a * b)^5 == d"))
        for st in golden:
            h = verify(st, "homology").homology
            x = verify(st, "exact").exact
            assert not (h == "fail" and x != "fail"), st.text
        for name in EXACT_SURFACES:
            m = surfaces.builtin(name)
            curves = list(m.curves)
            for _ in range(100):
                word = [(rng.choice(curves), rng.choice([-2, -1, 1, 2])) for _ in range(rng.randint(1, 6))]
                e = comp(*(pow_(Name(c), x) for c, x in word))
                exact = eval_exact(e, m)
                assert hom.abelianization_matrix(exact, m.basepoint, m.tree) == eval_homology(e, m)
                other = comp(*(Name(rng.choice(curves)) for _ in range(rng.randint(1, 4))))
                st = RelationStatement(name, e, other)
                if verify(st, "homology").homology == "fail":
                    assert verify(st, "exact").exact == "fail"


def test_criterion_8_parsers(criterion, rng):
    with criterion(8, "parser round trips over random trees and fuzzed inputs"):
        t0 = time.perf_counter()
        for _ in range(1000):
            e = random_expr(rng)
            assert parse_expr(format_expr(e)) == e
            p = random_poly(rng)
            assert milnor.parse_poly(milnor.format_poly(p), nvars=p.nvars) == p
        for _ in range(10_000):
            data = fuzz_text(rng, EXPR_ALPHABET)
            for parse in (parse_expr, parse_script):
                try:
                    parse(data)
                except DslError:
                    pass
            try:
                milnor.parse_poly(data)
            except milnor.PolyError:
                pass
        assert time.perf_counter() - t0 < 30.0
