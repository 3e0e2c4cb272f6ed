import random

import pytest

from helpers import GF2, GF3, GF5, GF7, QQ, nf, rand_contact, type_grid
from icis import singtype as T
from icis.errors import CapExceeded, NotQuasiHomogeneous
from icis.jetalg import (determinacy_bound, deformation_determinacy_bound, format_monovec,
                         invariants, is_icis, quotient_dim, t1_graded_dims, t1sec_basis,
                         tjurina, tjurina_sec)
from icis.parse import parse_germ
from icis.poly import INF, MapGerm, Poly, WeightSystem


def G(s, F=QQ, n=None):
    return parse_germ(s, F, n)


def vec(F, *polys):
    return tuple(parse_germ(p, F, 2)[0] if p != "0" else Poly.zero(F, 2) for p in polys)


# -- quotient dimension --------------------------------------------------------------

def test_quotient_by_maximal_ideal():
    for F in (QQ, GF2, GF7):
        gens = [vec(F, "x", "0"), vec(F, "y", "0"), vec(F, "0", "x"), vec(F, "0", "y")]
        assert quotient_dim(gens).dim == 2


def test_quotient_diagonal_staircases():
    gens = [vec(QQ, "x", "0"), vec(QQ, "y^3", "0"), vec(QQ, "0", "x^2"), vec(QQ, "0", "y^2")]
    assert quotient_dim(gens).dim == 3 + 4


def test_quotient_infinite_and_strict():
    gens = [(Poly.monomial(QQ, (2, 0), 1),)]
    res = quotient_dim(gens, k_cap=12)
    assert res.dim == INF
    with pytest.raises(CapExceeded) as exc:
        quotient_dim(gens, k_cap=12, strict=True)
    assert exc.value.profile


# -- Tjurina numbers -----------------------------------------------------------------------

def test_tjurina_examples():
    assert tjurina(G("x^2 ; y^3", GF7)) == 7
    assert tjurina(G("x^2 ; x^2")) == INF
    for k in range(1, 8):
        F = GF7 if (k + 1) % 7 else QQ
        assert tjurina(parse_germ(f"x^{k + 1}", F, 1)) == k


def test_tjurina_sec_examples():
    assert tjurina_sec(G("x^2 ; y^3", GF7)) == 7
    assert tjurina_sec(G("x*y ; x^3+y^4")) == 7
    assert tjurina_sec(G("x^2 ; y^3", GF3)) == 8


def test_t1sec_basis_listed():
    b = t1sec_basis(G("x^2 ; y^3", GF7))
    want = {((1, 0), 0), ((0, 1), 0), ((0, 2), 0), ((1, 0), 1), ((0, 1), 1), ((1, 1), 1),
            ((0, 2), 1)}
    assert set(b) == want
    b = t1sec_basis(G("x^2 ; y^4", GF7))
    want = {((1, 0), 0), ((0, 1), 0), ((0, 2), 0), ((0, 3), 0), ((1, 0), 1), ((0, 1), 1),
            ((1, 1), 1), ((0, 2), 1), ((1, 2), 1), ((0, 3), 1)}
    assert set(b) == want
    # degree one survives whole; (y^2,0) and (x*y,0) agree modulo (x*y+y^2,0)
    b = t1sec_basis(G("x^2 ; x*y+y^2", GF2))
    assert set(b) == {((1, 0), 0), ((0, 1), 0), ((1, 1), 0), ((1, 0), 1), ((0, 1), 1)}


def test_basis_size_matches_tau_sec():
    for p, F in ((0, QQ), (3, GF3), (5, GF5)):
        for t in type_grid(p, small=True):
            f = nf(t, F)
            assert len(t1sec_basis(f)) == tjurina_sec(f)


def test_format_monovec():
    assert format_monovec(((1, 2), 1), 2) == "(0,x*y^2)"
    assert format_monovec(((0, 0), 0), 2) == "(1,0)"


# -- graded pieces --------------------------------------------------------------------------

def test_graded_char2():
    ws = WeightSystem((2, 2), (1, 1))
    for s in ("x^2 ; y^2", "x^2 ; x*y+y^2"):
        dims = t1_graded_dims(G(s, GF2), ws, range(1, 8))
        assert all(v == 0 for v in dims.values())


@pytest.mark.parametrize("s, ws", [("x^2+y^3 ; x*y^2", ((6, 7), (3, 2))),
                                   ("x^2+y^3 ; y^4", ((6, 8), (3, 2))),
                                   ("x*y ; x^3+y^4", ((7, 12), (4, 3))),
                                   ("x^2 ; y^3", ((2, 3), (1, 1)))])
def test_graded_sum_is_tau(s, ws):
    for F in (QQ, GF5, GF7):
        f = G(s, F)
        dims = t1_graded_dims(f, WeightSystem(*ws))
        assert sum(dims.values()) == tjurina(f)


def test_graded_needs_quasi_homogeneous():
    with pytest.raises(NotQuasiHomogeneous):
        t1_graded_dims(G("x^2+y^5 ; x*y"), WeightSystem((2, 2), (1, 1)))


# -- ICIS test and bounds ---------------------------------------------------------------------

def test_is_icis_examples():
    assert is_icis(G("x^2 ; y^3")).icis
    assert not is_icis(G("x*y ; x^2*y")).icis
    assert is_icis(G("x^2+y^3 ; x*y^3")).icis


@pytest.mark.parametrize("F", [QQ, GF2, GF3], ids=repr)
def test_icis_iff_tau_finite(F):
    from helpers import rand_poly

    rng = random.Random(4)
    for _ in range(25):
        f = MapGerm([rand_poly(F, 2, 2, 4, rng, 0.3) for _ in range(2)])
        if any(c.is_zero() for c in f.components):
            continue
        assert is_icis(f, 24).icis == (tjurina(f, 24) != INF)


def test_determinacy():
    f = G("x^2 ; y^3", GF7)
    assert determinacy_bound(f) == 14
    assert deformation_determinacy_bound(f) == 15
    inv = invariants(f)
    assert inv.icis and inv.tau == 7 and inv.determinacy == 14


@pytest.mark.parametrize("F", [QQ, GF3, GF7], ids=repr)
def test_tau_contact_invariant(F):
    rng = random.Random(7)
    for t in (T.F(2, 3), T.H(3), T.I0_odd(4), T.G5_0):
        f = nf(t, F)
        tau, ts = tjurina(f), tjurina_sec(f)
        for _ in range(5):
            g = rand_contact(f, rng, determinacy_bound(f, tau))
            assert (tjurina(g), tjurina_sec(g)) == (tau, ts)


def test_common_factor_proofs():
    from icis.coeff import make_field
    from icis.jetalg import common_factor_at_origin

    f = G("x*y ; x^2*y", GF5)
    assert common_factor_at_origin(list(f.components)) is True
    f = G("x^2 ; y^3", QQ)
    assert common_factor_at_origin(list(f.components)) is False
    # common factor away from the origin does not count
    f = G("(x-1)*x ; (x-1)*y", QQ)
    assert common_factor_at_origin(list(f.components)) is False
    GF4 = make_field(2, 2)
    assert common_factor_at_origin(list(G("x ; x", GF4).components)) is None


def test_non_icis_proven_over_extension_field():
    from icis.coeff import make_field

    GF4 = make_field(2, 2)
    cert = is_icis(G("x^2+x*y ; y^3+x^3", GF4))
    assert not cert.icis and cert.proven
    cert = is_icis(G("x^2+y^3 ; x*y^8"), k_cap=5)
    assert not cert.icis and not cert.proven
