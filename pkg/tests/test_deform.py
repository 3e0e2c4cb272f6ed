import random

import pytest

from helpers import GF2, GF3, GF5, QQ, nf
from icis import singtype as T
from icis.classify import classify_icis
from icis.coeff import make_field
from icis.deform import (Unfolding, build_unfolding, enumerate_fibers, case_tree_unfolding,
                         semicontinuity_probe)
from icis.errors import BudgetExceeded
from icis.jetalg import tjurina_sec
from icis.parse import parse_germ

GF4 = make_field(2, 2)


def test_evaluate_zero_is_base():
    for t, F in [(T.G7, GF5), (T.H(4), QQ), (T.F22_0, GF2)]:
        u = build_unfolding(nf(t, F))
        assert u.evaluate([F.zero] * u.dim) == u.base_germ
        assert u.dim == tjurina_sec(u.base_germ)


def test_g7_filtered_directions():
    u = build_unfolding(nf(T.G7, GF5), filter_order2=True)
    assert set(u.basis) == {((0, 2), 0), ((0, 3), 0), ((0, 2), 1), ((0, 3), 1), ((1, 1), 1),
                            ((1, 2), 1)}
    t = [GF5.from_int(v) for v in (1, 2, 3, 4, 1, 2)]
    g = u.evaluate(t)
    assert g.components[0].coeff((2, 0)) == 1


def test_f22_1_listed_direction():
    u = case_tree_unfolding(T.F22_1, GF2)
    assert u.dim == 1
    g = u.evaluate([1])
    assert g == parse_germ("x^2+y^2 ; x*y+y^2", GF2)


def test_zero_samples_empty():
    u = case_tree_unfolding(T.G5_0, GF3)
    h = enumerate_fibers(u, mode="random", samples=0)
    assert h.total == 0 and h.types() == []


def test_g5_0_gf3_exhaustive():
    u = case_tree_unfolding(T.G5_0, GF3)
    h = enumerate_fibers(u)
    assert h.total == 81
    for ty in h.types():
        assert ty.tag in ("F", "G5_0", "G5_1", "NotICIS")


def test_histogram_deterministic_and_csv():
    u = case_tree_unfolding(T.H(3), QQ)
    a = enumerate_fibers(u, mode="random", samples=5, seed=3)
    b = enumerate_fibers(u, mode="random", samples=5, seed=3)
    assert a.to_csv() == b.to_csv()
    assert a.to_csv().splitlines()[0] == "type,params,count,example_t"


def test_budget():
    u = case_tree_unfolding(T.G7, GF5)
    with pytest.raises(BudgetExceeded):
        enumerate_fibers(u, budget=1000)


@pytest.mark.parametrize("F", [GF2, GF3, GF5], ids=repr)
def test_fibres_are_simple_or_not_icis(F):
    p = F.characteristic
    types = [T.F(2, 3), T.H(3), T.I0_odd(4)] if p != 2 else [T.F(2, 3), T.F22_0]
    rng = random.Random(p)
    for t in types:
        u = build_unfolding(nf(t, F), filter_order2=True)
        h = enumerate_fibers(u, mode="random", samples=15, seed=p)
        for ty in h.types():
            assert ty.simple or ty.tag == "NotICIS", (t, ty)
        assert classify_icis(u.evaluate([F.zero] * u.dim), witness=False).type == t


def test_probe_trivial_point():
    u = case_tree_unfolding(T.H(3), QQ)
    assert semicontinuity_probe(u, 0, points=[tuple([QQ.zero] * u.dim)]) == []


def test_probe_skips_non_icis_fibre():
    # (x^2 + a xy, y^2 + b xy) with ab = 1 is not a complete intersection
    u = case_tree_unfolding(T.F22_0, GF4)
    a = GF4.generator() if hasattr(GF4, "generator") else 2
    b = GF4.inv(a)
    assert classify_icis(u.evaluate([a, b]), witness=False).type.tag == "NotICIS"
    assert semicontinuity_probe(u, 0, points=[(a, b)]) == []


def test_probe_random_h6():
    u = case_tree_unfolding(T.H(6), QQ)
    assert semicontinuity_probe(u, 10, seed=1) == []
