import random
from fractions import Fraction

import pytest

from icis.errors import BudgetExceeded
from icis.groebner import (GBRing, buchberger, char2_equivalence_ideal, eliminate, format_cas,
                           is_groebner, normal_form, repro_char2_elimination)


def R(names, p=0, elim=0):
    return GBRing(tuple(names), p, elim)


def parse(ring, text):
    """Tiny helper: sums of c*x^e products with '+' and '-' (no parentheses)."""
    from icis.coeff import make_field
    from icis.parse import parse_poly

    F = make_field(ring.p)
    return ring.from_poly(parse_poly(text, F, ring.nvars, ring.names), ring.names)


def test_trivial_ideals():
    r = R("xy")
    G = buchberger(r, [parse(r, "x"), parse(r, "y")])
    assert sorted(r.to_str(g) for g in G) == ["x", "y"]
    G = buchberger(r, [parse(r, "2*x^2+4*y")])
    assert [r.to_str(g) for g in G] == ["x^2+2*y"]


def test_cyclic_example_membership():
    r = R("xy")
    G = buchberger(r, [parse(r, "x^2-y"), parse(r, "y^2-x")])
    assert is_groebner(r, G)
    assert normal_form(r, parse(r, "x^4-x"), G) == {}
    assert normal_form(r, parse(r, "x"), G) != {}


def test_eliminate_examples():
    r = R("xyz")
    kr, B = eliminate(r, [parse(r, "x-y^2"), parse(r, "y-z")], ["y"])
    assert [kr.to_str(g) for g in B] == ["z^2-x"]
    r2 = R("xy")
    kr, B = eliminate(r2, [parse(r2, "x-y")], ["x"])
    assert B == []


def test_permutation_invariance():
    rng = random.Random(0)
    r = R("xyz", 7)
    gens = [parse(r, s) for s in ("x^2+y*z-1", "y^2-x*z+2", "x*y*z-3*x")]
    ref = buchberger(r, gens)
    for _ in range(4):
        rng.shuffle(gens)
        assert buchberger(r, gens) == ref
        assert buchberger(r, gens, strategy="sugar") == ref


def test_normal_form_homomorphism():
    rng = random.Random(1)
    r = R("xy", 5)
    G = buchberger(r, [parse(r, "x^3-y^2"), parse(r, "x*y^2-y")])

    def rnd():
        return {(rng.randint(0, 3), rng.randint(0, 3)): rng.randint(1, 4) for _ in range(4)}

    def mul(f, g):
        out = {}
        for m, a in f.items():
            for n, b in g.items():
                k = (m[0] + n[0], m[1] + n[1])
                out[k] = (out.get(k, 0) + a * b) % 5
        return {k: v for k, v in out.items() if v}

    for _ in range(100):
        f, g = rnd(), rnd()
        lhs = normal_form(r, mul(f, g), G)
        rhs = normal_form(r, mul(normal_form(r, f, G), normal_form(r, g, G)), G)
        assert lhs == rhs


def test_budget_exceeded():
    ring, gens = char2_equivalence_ideal()
    with pytest.raises(BudgetExceeded):
        eliminate(ring, gens, ["m0", "m1", "n0", "n1", "o", "s", "t", "u", "v", "z"], max_pairs=5)
    with pytest.raises(BudgetExceeded):
        eliminate(ring, gens, ["m0", "m1", "n0", "n1", "o", "s", "t", "u", "v", "z"], max_basis=5)
    with pytest.raises(BudgetExceeded):
        eliminate(ring, gens, ["m0", "m1", "n0", "n1", "o", "s", "t", "u", "v", "z"], max_degree=4)


def test_rational_coefficients():
    r = R("xy")
    G = buchberger(r, [{(1, 0): Fraction(1, 3), (0, 1): Fraction(-1, 2)}])
    assert G == [{(1, 0): Fraction(1), (0, 1): Fraction(-3, 2)}]


def test_extraction_ideal_shape():
    ring, gens = char2_equivalence_ideal()
    assert ring.p == 2 and len(ring.names) == 15 and "u2" in ring.names
    # one generator per (x,y)-monomial of degree <= 3 that occurs, plus the two unit conditions
    assert len(gens) == 13


def test_repro_output():
    poly = repro_char2_elimination()
    text = format_cas(poly)
    assert text == "a^4*b^2*c^4*d+a^2*b^4*c^4*d+a^4*c^2*d^3+b^4*c^2*d^3"
    # vanishes on a = b
    for a in (0, 1):
        for c in (0, 1):
            for d in (0, 1):
                assert poly.evaluate([a, a, c, d]) == 0
    # symmetric in a <-> b
    swapped = {(m[1], m[0], m[2], m[3]): v for m, v in poly.terms.items()}
    assert swapped == poly.terms
