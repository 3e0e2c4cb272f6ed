import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from icis.coeff import (FieldElem, PrimeField, canonical_modulus, is_irreducible, make_field,
                        nth_root)
from icis.errors import NonPrimeCharacteristic, NoRoot

FIELDS = [make_field(0), make_field(2), make_field(3), make_field(7), make_field(2, 2),
          make_field(2, 3), make_field(3, 2)]


def test_make_field_basic():
    assert make_field(0).characteristic == 0
    assert make_field(0).order is None
    F7 = make_field(7)
    assert isinstance(F7, PrimeField) and F7.order == 7
    with pytest.raises(NonPrimeCharacteristic):
        make_field(6)
    with pytest.raises(ValueError):
        make_field(3, 0)


def test_gf8_modulus_irreducible():
    F = make_field(2, 3)
    mod = F.modulus
    assert len(mod) == 4 and mod[-1] == 1
    # a cubic is irreducible over GF(2) iff it has no root
    val = lambda x: sum(c * x ** i for i, c in enumerate(mod)) % 2
    assert all(val(x) != 0 for x in (0, 1))
    assert F.order == 8


def test_canonical_modulus_is_smallest():
    for p, k in [(2, 2), (2, 3), (3, 2), (5, 2)]:
        first = None
        for tail in itertools.product(range(p), repeat=k):   # sub-leading coefficients, high first
            cand = tuple(reversed(tail)) + (1,)
            if is_irreducible(cand, p):
                first = cand
                break
        assert canonical_modulus(p, k) == first


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_field_axioms(F):
    rng = random.Random(1)
    for _ in range(2000):
        a, b, c = (F.random(rng) for _ in range(3))
        assert F.add(a, F.neg(a)) == F.zero
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.mul(a, b) == F.mul(b, a)
        if a != F.zero:
            assert F.mul(a, F.inv(a)) == F.one


def test_gf7_square_roots():
    F = make_field(7)
    assert F.nth_root(2, 2) in (3, 4)
    with pytest.raises(NoRoot):
        F.nth_root(3, 2)
    assert F.nth_root(1, 5) == 1


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13])
def test_nth_root_exhaustive(p):
    F = make_field(p)
    for r in range(1, 7):
        for a in F.elements():
            roots = [x for x in F.elements() if pow(x, r, p) == a % p]
            if roots:
                got = F.nth_root(a, r)
                assert pow(got, r, p) == a
                assert got == min(roots)
            else:
                with pytest.raises(NoRoot):
                    F.nth_root(a, r)


def test_extension_roots():
    F = make_field(2, 2)
    for a in F.elements():
        s = F.nth_root(a, 2)      # squaring is bijective in characteristic 2
        assert F.mul(s, s) == a
    F9 = make_field(3, 2)
    for n in (1, 2):
        a = F9.from_int(n)
        s = F9.nth_root(a, 2)     # every element of GF(3) is a square in GF(9)
        assert F9.mul(s, s) == a


def test_rational_roots():
    Q = make_field(0)
    assert Q.nth_root(Fraction(9, 4), 2) == Fraction(3, 2)
    assert Q.nth_root(Fraction(-8, 27), 3) == Fraction(-2, 3)
    with pytest.raises(NoRoot):
        Q.nth_root(Fraction(2), 2)
    with pytest.raises(NoRoot):
        Q.nth_root(Fraction(-4), 2)


@settings(max_examples=200, deadline=None)
@given(st.integers(-(2 ** 70), 2 ** 70), st.integers(1, 2 ** 70), st.integers(-(2 ** 70), 2 ** 70),
       st.integers(1, 2 ** 70))
def test_rational_big_integers(a, b, c, d):
    Q = make_field(0)
    x, y = Fraction(a, b), Fraction(c, d)
    assert Q.sub(Q.add(x, y), y) == x
    if y:
        assert Q.mul(Q.div(x, y), y) == x


def test_field_elem_wrapper():
    F = make_field(5)
    a = F(3)
    assert isinstance(a, FieldElem)
    assert nth_root(F(4), 2).value in (2, 3)
    assert (a * a).value == 4
