"""Dehn twists acting on first homology as integer transvections.

A class is an integer vector in the surface's ordered loop basis and the
intersection form ``Q`` is an antisymmetric integer matrix with
``<x, y> = x^T Q y``.  The right-handed twist along ``c`` acts by

    M(x) = x + <x, c> c

so ``M = I + c (Q c)^T`` read as a matrix acting on column vectors.  This
engine only sees H_1: boundary twists act trivially, so a pass here is a
necessary condition for a relation, never a proof of it.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple

import sympy

from .words import GroupoidMorphism, WordError, loop_basis

Matrix = Tuple[Tuple[int, ...], ...]
Vector = Tuple[int, ...]


class HomologyError(ValueError):
    pass


def identity(r: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(r)) for i in range(r))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def matvec(a: Matrix, v: Sequence[int]) -> Vector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def matpow(a: Matrix, n: int) -> Matrix:
    if n < 0:
        a, n = inverse_unimodular(a), -n
    out = identity(len(a))
    while n:
        if n & 1:
            out = matmul(out, a)
        a = matmul(a, a)
        n >>= 1
    return out


def pairing(x: Sequence[int], y: Sequence[int], q: Matrix) -> int:
    return sum(x[i] * q[i][j] * y[j] for i in range(len(x)) for j in range(len(y)) if q[i][j])


def _check_dims(c: Sequence[int], q: Matrix) -> None:
    r = len(q)
    if any(len(row) != r for row in q):
        raise HomologyError("intersection form is not square")
    if len(c) != r:
        raise HomologyError(f"class has length {len(c)}, expected {r}")


def transvection(c: Sequence[int], q: Matrix, power: int = 1) -> Matrix:
    """Matrix of the ``power``-th right-handed twist along class ``c``.

    Since ``(M - I)^2 = 0`` for a transvection, ``M^n = I + n (M - I)``.
    """
    _check_dims(c, q)
    r = len(q)
    qc = matvec(q, c)
    return tuple(
        tuple(int(i == j) + power * c[i] * qc[j] for j in range(r)) for i in range(r)
    )


def determinant(a: Matrix) -> int:
    return int(sympy.Matrix(a).det()) if a else 1


def inverse_unimodular(a: Matrix) -> Matrix:
    """Inverse of an integer matrix with determinant +-1 (exact)."""
    if determinant(a) not in (1, -1):
        raise HomologyError("matrix is not unimodular")
    inv = sympy.Matrix(a).inv()
    return tuple(tuple(int(inv[i, j]) for j in range(len(a))) for i in range(len(a)))


def product(factors: Iterable[Tuple[Sequence[int], int]], q: Matrix) -> Matrix:
    """Matrix of a twist word, factors listed left to right.

    The rightmost factor acts first, so the matrix is the left-to-right
    matrix product.
    """
    out = identity(len(q))
    for c, e in factors:
        out = matmul(out, transvection(c, q, e))
    return out


def first_difference(a: Matrix, b: Matrix) -> Optional[Tuple[int, Vector, Vector]]:
    """First basis vector on which two matrices disagree, with both images."""
    for j in range(len(a)):
        ca = tuple(row[j] for row in a)
        cb = tuple(row[j] for row in b)
        if ca != cb:
            return j, ca, cb
    return None


def verify_homology(lhs, rhs, surface) -> bool:
    """Compare two twist words ``[(curve, exponent), ...]`` on H_1."""
    q = surface.intersection_form
    try:
        left = product(((surface.curve(n).homology, e) for n, e in lhs), q)
        right = product(((surface.curve(n).homology, e) for n, e in rhs), q)
    except KeyError as exc:
        raise HomologyError(f"unknown curve {exc.args[0]!r}") from None
    return left == right


def abelianization_matrix(phi: GroupoidMorphism, basepoint: str, tree: Sequence[str]) -> Matrix:
    """Action of ``phi`` on the loop basis at ``basepoint``, letters counted with sign."""
    try:
        basis = loop_basis(phi.graph, basepoint, tree)
    except WordError as exc:
        raise HomologyError(str(exc)) from None
    tree_set = set(tree)
    loops = [e for e in phi.graph.edges if e not in tree_set]
    index = {e: i for i, e in enumerate(loops)}
    cols: List[List[int]] = []
    for w in basis:
        vec = [0] * len(loops)
        for name, x in phi(w).letters:
            if name in index:
                vec[index[name]] += x
        cols.append(vec)
    r = len(loops)
    return tuple(tuple(cols[j][i] for j in range(r)) for i in range(r))


def form_rank(q: Matrix) -> int:
    """Rank over the rationals."""
    return sympy.Matrix(q).rank() if q else 0
