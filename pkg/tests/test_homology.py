import itertools

import pytest

from twistcheck import homology as hom
from twistcheck import surfaces

Q11 = ((0, -1), (1, 0))


def _m(rows):
    return tuple(tuple(r) for r in rows)


def test_zero_class_gives_identity():
    assert hom.transvection((0, 0), Q11) == hom.identity(2)


def test_one_holed_torus_transvection():
    # <x, y> = x^T Q y, so <b, a> = 1 and M(b) = b + a
    m = hom.transvection((1, 0), Q11)
    assert hom.matvec(m, (1, 0)) == (1, 0)
    assert hom.matvec(m, (0, 1)) == (1, 1)


def test_boundary_class_gives_identity():
    for k in range(2, 7):
        m = surfaces.chain_surface(k)
        for b in m.boundary_curves():
            assert hom.transvection(m.curve(b).homology, m.intersection_form) == hom.identity(m.rank)


def test_dimension_mismatch():
    with pytest.raises(hom.HomologyError):
        hom.transvection((1, 0, 0), Q11)


def test_transvection_invariants():
    m = surfaces.builtin("S_1_3")
    q = m.intersection_form
    r = m.rank
    ident = hom.identity(r)
    for c in itertools.product(range(-2, 3), repeat=r):
        t = hom.transvection(c, q)
        assert hom.determinant(t) == 1
        n = tuple(tuple(t[i][j] - ident[i][j] for j in range(r)) for i in range(r))
        assert hom.matmul(n, n) == tuple((0,) * r for _ in range(r))
        assert hom.transvection(c, q, 3) == hom.matpow(t, 3)
        assert hom.transvection(c, q, -1) == hom.matpow(t, -1)


def test_disjoint_classes_commute():
    m = surfaces.builtin("S_1_3")
    q = m.intersection_form
    for a, b in itertools.combinations(m.curves.values(), 2):
        if hom.pairing(a.homology, b.homology, q) == 0:
            ta, tb = hom.transvection(a.homology, q), hom.transvection(b.homology, q)
            assert hom.matmul(ta, tb) == hom.matmul(tb, ta)


def test_verify_homology_examples():
    s11 = surfaces.builtin("S_1_1")
    assert hom.verify_homology([("a", 1), ("b", 1)] * 6, [("d", 1)], s11)
    assert not hom.verify_homology([("a", 1), ("b", 1)] * 5, [("d", 1)], s11)
    f33 = surfaces.chain_surface(3)
    rhs = [("b1", 1), ("b2", 1), ("b3", 1)]
    monodromy = [("2_1", 1), ("1_1", 1), ("2_2", 1), ("1_2", 1)] * 3
    typographic = [("1_2", 1), ("2_2", 1), ("1_1", 1), ("2_1", 1)] * 3
    assert hom.verify_homology(monodromy, rhs, f33)
    # recorded outcome: the typographically ordered product is not the monodromy
    assert not hom.verify_homology(typographic, rhs, f33)
    with pytest.raises(hom.HomologyError):
        hom.verify_homology([("nosuch", 1)], [], s11)


def test_product_matches_matmul():
    q = Q11
    a, b = (1, 0), (0, 1)
    expect = hom.matmul(hom.transvection(a, q, 2), hom.transvection(b, q, -1))
    assert hom.product([(a, 2), (b, -1)], q) == expect


def test_abelianization_identity():
    for name in surfaces.BUILTIN_NAMES:
        m = surfaces.builtin(name)
        assert hom.abelianization_matrix(m.graph.identity(), m.basepoint, m.tree) == hom.identity(m.rank)


def test_abelianization_matches_transvection_for_every_builtin_curve():
    for name in surfaces.BUILTIN_NAMES:
        m = surfaces.builtin(name)
        for c in m.curves.values():
            a = hom.abelianization_matrix(c.twist, m.basepoint, m.tree)
            assert a == hom.transvection(c.homology, m.intersection_form), (name, c.name)
            assert hom.determinant(a) == 1


def test_abelianization_bad_tree():
    m = surfaces.builtin("S_1_3")
    with pytest.raises(hom.HomologyError):
        hom.abelianization_matrix(m.graph.identity(), m.basepoint, ["u"])


def test_inverse_unimodular_rejects_singular():
    with pytest.raises(hom.HomologyError):
        hom.inverse_unimodular(_m([[2, 0], [0, 1]]))


def test_first_difference():
    a = hom.identity(2)
    b = _m([[1, 1], [0, 1]])
    assert hom.first_difference(a, a) is None
    assert hom.first_difference(a, b) == (1, (0, 1), (1, 1))
