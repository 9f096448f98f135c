"""Seeded generators shared by the parser property tests."""

import random

from twistcheck.dsl import Comp, Name, Power
from twistcheck.milnor import Poly

NAMES = ["Da", "Db", "Dg", "x", "y1", "D1_2", "core"]
EXPR_ALPHABET = "Dabgxy12_ *'^()-=#\n\t[]engine" + "\x00\xff∘"


def random_expr(rng: random.Random, depth: int = 3):
    """A normalized AST: Comp factors are never Comp and exponents are never 1."""
    roll = rng.random()
    if depth == 0 or roll < 0.3:
        return Name(rng.choice(NAMES))
    if roll < 0.65:
        factors = []
        for _ in range(rng.randint(2, 4)):
            f = random_expr(rng, depth - 1)
            while isinstance(f, Comp):
                f = random_expr(rng, depth - 1)
            factors.append(f)
        return Comp(tuple(factors))
    exp = rng.choice([e for e in range(-4, 7) if e != 1])
    return Power(random_expr(rng, depth - 1), exp)


def random_poly(rng: random.Random) -> Poly:
    nvars = rng.randint(1, 4)
    coeffs = {}
    for _ in range(rng.randint(1, 5)):
        exps = tuple(rng.randint(0, 4) for _ in range(nvars))
        coeffs[exps] = rng.choice([-3, -2, -1, 1, 2, 5])
    return Poly.from_dict(nvars, coeffs)


def fuzz_text(rng: random.Random, alphabet: str) -> bytes:
    """Random bytes, half raw and half drawn from a grammar-shaped alphabet."""
    n = rng.randint(0, 40)
    if rng.random() < 0.5:
        return bytes(rng.randrange(256) for _ in range(n))
    return "".join(rng.choice(alphabet) for _ in range(n)).encode("utf-8")
