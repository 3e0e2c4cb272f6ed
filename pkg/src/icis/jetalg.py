"""Degree-truncated module computations: Tjurina invariants and friends.

A submodule ``D`` of ``R^m`` (``R`` the power series ring) is handled through
its image in the jet space ``R^m / m^(k+1) R^m``.  That image is spanned by
the truncated products ``x^b * g`` of generators with monomials, so plain
linear algebra decides membership.  Once every monomial vector of degree
``k`` is a leading column, Nakayama's lemma gives ``m^k R^m`` inside ``D`` and
the jet-space cokernel equals the true one.

Columns are ordered by a local degree ordering: lower degree first, and
within a degree the monomial with the larger power of the *last* variable
first, then component index.  Leading columns of the row-reduced matrix are
then the lowest-order terms of module elements, and the remaining columns
form the monomial basis of the quotient (its "staircase").
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import CapExceeded, NotQuasiHomogeneous
from .linalg import echelon_pivots, pivot_columns
from .poly import INF, MapGerm, Poly, WeightSystem, is_quasi_homogeneous, jacobian, minors

Infinite = INF
DEFAULT_KCAP = 64

MonoVec = Tuple[Tuple[int, ...], int]  # (exponent tuple, component index)


def default_kcap() -> int:
    env = os.environ.get("ICIS_KCAP")
    return int(env) if env else DEFAULT_KCAP


@lru_cache(maxsize=None)
def monomials_upto(nvars: int, k: int) -> Tuple[Tuple[int, ...], ...]:
    out = []
    for d in range(k + 1):
        out.extend(monomials_of_degree(nvars, d))
    return tuple(out)


@lru_cache(maxsize=None)
def monomials_of_degree(nvars: int, d: int) -> Tuple[Tuple[int, ...], ...]:
    if nvars == 1:
        return ((d,),)
    out = []
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(nvars - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


def local_key(mv: MonoVec):
    mono, comp = mv
    return (sum(mono), tuple(-e for e in reversed(mono)), comp)


@lru_cache(maxsize=None)
def _columns(nvars: int, m: int, k: int, low: int):
    cols = [(mono, c) for mono in monomials_upto(nvars, k) if sum(mono) >= low for c in range(m)]
    cols.sort(key=local_key)
    return tuple(cols), {mv: i for i, mv in enumerate(cols)}


def _gen_order(g: Sequence[Poly]) -> int:
    return min((c.order() for c in g if not c.is_zero()), default=None)


def _rows(gens, nvars, m, k, index) -> List[dict]:
    rows = []
    for g in gens:
        o = _gen_order(g)
        if o is None or o > k:
            continue
        terms = [(mono, ci, c) for ci, comp in enumerate(g) for mono, c in comp.terms.items()
                 if sum(mono) <= k]
        for beta in monomials_upto(nvars, k - o):
            db = sum(beta)
            row = {}
            for mono, ci, c in terms:
                if sum(mono) + db > k:
                    continue
                key = (tuple(a + b for a, b in zip(mono, beta)), ci)
                j = index.get(key)
                if j is not None:
                    row[j] = c
            if row:
                rows.append(row)
    return rows


@dataclass
class JetQuotient:
    """Result of one truncated computation at degree ``k``."""

    k: int
    columns: Tuple[MonoVec, ...]
    pivots: frozenset
    certified: bool

    @property
    def dim(self) -> int:
        return len(self.columns) - len(self.pivots)

    def basis(self) -> List[MonoVec]:
        return [mv for i, mv in enumerate(self.columns) if i not in self.pivots]


def jet_quotient(gens, nvars: int, m: int, k: int, low: int = 0, reference: bool = False) -> JetQuotient:
    """Cokernel of ``span(gens)`` inside ``m^low R^m / m^(k+1) R^m``.

    ``reference=True`` uses the pure-Python elimination instead of FLINT.
    """
    gens = [tuple(g) for g in gens]
    field = gens[0][0].field
    cols, index = _columns(nvars, m, k, low)
    rows = _rows(gens, nvars, m, k, index)
    if reference:
        piv = echelon_pivots(field, rows, len(cols))
    else:
        piv = pivot_columns(field, rows, len(cols))
    pivots = frozenset(piv)
    top = [i for i, (mono, _) in enumerate(cols) if sum(mono) == k]
    certified = all(i in pivots for i in top)
    return JetQuotient(k, cols, pivots, certified)


@dataclass
class QuotientResult:
    dim: Union[int, float]
    stabilized_at: Optional[int]
    profile: Dict[int, int] = dc_field(default_factory=dict)
    quotient: Optional[JetQuotient] = None


def quotient_dim(gens, m: Optional[int] = None, k_cap: Optional[int] = None, low: int = 0,
                 start: Optional[int] = None, strict: bool = False) -> QuotientResult:
    """dim_K of ``m^low R^m / <gens>`` by jet stabilization.

    Returns ``dim = Infinite`` when no certificate appears up to ``k_cap``;
    with ``strict=True`` raises :class:`CapExceeded` instead.
    """
    gens = [tuple(g) for g in gens]
    m = m if m is not None else len(gens[0])
    nvars = gens[0][0].nvars
    k_cap = k_cap if k_cap is not None else default_kcap()
    orders = [o for o in (_gen_order(g) for g in gens) if o is not None]
    if not orders:
        if strict:
            raise CapExceeded("zero submodule has infinite colength", {})
        return QuotientResult(INF, None)
    k = max(start if start is not None else min(orders) + 1, low, 1)
    profile = {}
    while k <= k_cap:
        q = jet_quotient(gens, nvars, m, k, low)
        profile[k] = q.dim
        if q.certified:
            return QuotientResult(q.dim, k, profile, q)
        k += 1 if k < 8 else max(1, k // 6)
    if strict:
        raise CapExceeded(f"no stabilization up to degree {k_cap}", profile)
    return QuotientResult(INF, None, profile)


# -- generator sets ----------------------------------------------------------

def _unit_vector_multiples(f: MapGerm):
    m = f.m
    zero = Poly.zero(f.field, f.nvars)
    out = []
    for fj in f.components:
        for kcomp in range(m):
            vec = [zero] * m
            vec[kcomp] = fj.exact()
            out.append(tuple(vec))
    return out


def _jacobian_columns(f: MapGerm):
    J = jacobian(f.exact())
    return [tuple(J[i][j] for i in range(f.m)) for j in range(f.nvars)]


def tjurina_generators(f: MapGerm):
    return _unit_vector_multiples(f) + _jacobian_columns(f)


def tangent_image_generators(f: MapGerm):
    gens = _unit_vector_multiples(f)
    for col in _jacobian_columns(f):
        for i in range(f.nvars):
            x = Poly.var(f.field, f.nvars, i)
            gens.append(tuple(x * c for c in col))
    return gens


def _check_prec(f: MapGerm, res: QuotientResult):
    # Truncated inputs are only trustworthy if the certificate degree lies
    # within the known precision.
    return res


def tjurina_result(f: MapGerm, k_cap=None) -> QuotientResult:
    return quotient_dim(tjurina_generators(f), f.m, k_cap)


def tjurina(f: MapGerm, k_cap=None):
    """dim_K T^1(f); ``Infinite`` when the germ is not an ICIS."""
    return tjurina_result(f, k_cap).dim


def tjurina_sec_result(f: MapGerm, k_cap=None) -> QuotientResult:
    return quotient_dim(tangent_image_generators(f), f.m, k_cap, low=1)


def tjurina_sec(f: MapGerm, k_cap=None):
    return tjurina_sec_result(f, k_cap).dim


def t1sec_basis(f: MapGerm, k_cap=None) -> List[MonoVec]:
    """Monomial-vector basis of T^{1,sec}(f): the staircase complement."""
    res = quotient_dim(tangent_image_generators(f), f.m, k_cap, low=1, strict=True)
    return res.quotient.basis()


def t1_basis(f: MapGerm, k_cap=None) -> List[MonoVec]:
    res = quotient_dim(tjurina_generators(f), f.m, k_cap, strict=True)
    return res.quotient.basis()


def format_monovec(mv: MonoVec, m: int, names=None) -> str:
    from .poly import default_names

    mono, comp = mv
    names = names or default_names(len(mono))
    s = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, mono) if e) or "1"
    parts = ["0"] * m
    parts[comp] = s
    return "(" + ",".join(parts) + ")"


# -- graded pieces -------------------------------------------------------------

def _weighted_degree(mono, weights):
    return sum(a * e for a, e in zip(weights, mono))


def t1_graded_dims(f: MapGerm, ws: WeightSystem, nu_range=None, k_cap=None) -> Dict[int, int]:
    """dim of T^1_nu(f) for each nu in ``nu_range`` (all nonzero ones if None)."""
    if not is_quasi_homogeneous(f, ws):
        raise NotQuasiHomogeneous("germ is not quasi-homogeneous of the given type")
    gens = tjurina_generators(f)
    weights, degs = ws.weights, ws.degrees
    nvars, m = f.nvars, f.m
    # weighted degree of each generator as an element of G_nu
    gen_nu = []
    for g in gens:
        nus = {_weighted_degree(mono, weights) - degs[ci]
               for ci, comp in enumerate(g) for mono in comp.terms}
        if len(nus) > 1:
            raise NotQuasiHomogeneous("generator is not homogeneous")
        if nus:
            gen_nu.append((g, nus.pop()))
    if nu_range is None:
        res = tjurina_result(f, k_cap)
        if res.stabilized_at is None:
            raise CapExceeded("T^1 is infinite dimensional", res.profile)
        hi = max(weights) * res.stabilized_at - min(degs)
        nu_range = range(-max(degs), hi + 1)
    out = {}
    for nu in nu_range:
        cols = []
        for ci in range(m):
            target = degs[ci] + nu
            if target < 0:
                continue
            maxdeg = target // min(weights)
            for mono in monomials_upto(nvars, maxdeg):
                if _weighted_degree(mono, weights) == target:
                    cols.append((mono, ci))
        if not cols:
            out[nu] = 0
            continue
        index = {mv: i for i, mv in enumerate(cols)}
        rows = []
        for g, gnu in gen_nu:
            shift = nu - gnu
            if shift < 0:
                continue
            for beta in monomials_upto(nvars, shift // min(weights)):
                if _weighted_degree(beta, weights) != shift:
                    continue
                row = {}
                for ci, comp in enumerate(g):
                    for mono, c in comp.terms.items():
                        j = index.get((tuple(a + b for a, b in zip(mono, beta)), ci))
                        if j is not None:
                            row[j] = c
                if row:
                    rows.append(row)
        out[nu] = len(cols) - len(pivot_columns(f.field, rows, len(cols)))
    return out


# -- ICIS test and determinacy ---------------------------------------------------

@dataclass
class IcisCertificate:
    icis: bool
    k: Optional[int]
    reason: Optional[str] = None
    mng: Optional[int] = None
    proven: bool = True     # False: no stabilization up to the cap, but no proof of failure either


def _flint_poly(ctx, f: Poly, field):
    import flint

    if field.characteristic == 0:
        return ctx.from_dict({m: flint.fmpq(c.numerator, c.denominator) for m, c in f.terms.items()})
    return ctx.from_dict(dict(f.terms))


def common_factor_at_origin(polys: Sequence[Poly]) -> Optional[bool]:
    """Whether exact plane polynomials share a factor vanishing at 0.

    For two variables this decides non-isolatedness: the zero set of the
    polynomials contains a curve through the origin iff their gcd vanishes
    there.  Returns None when undecidable here (more variables, truncated
    input, or a non-prime finite field, which FLINT's mpoly does not cover).
    """
    import flint

    if not polys or polys[0].nvars != 2 or any(p.precision is not None for p in polys):
        return None
    field = polys[0].field
    if field.order is not None and field.order != field.characteristic:
        return None
    names = ("x", "y")
    if field.characteristic == 0:
        ctx = flint.fmpq_mpoly_ctx.get(names)
    else:
        ctx = flint.nmod_mpoly_ctx.get(names, modulus=field.characteristic)
    g = None
    for p in polys:
        q = _flint_poly(ctx, p, field)
        g = q if g is None else g.gcd(q)
    if g is None or g.is_zero():
        return True
    return g.to_dict().get((0, 0), 0) == 0


def _ideal_gens(polys, m_ambient=1):
    return [(p.exact(),) for p in polys if not p.is_zero()]


def minimal_generator_count(f: MapGerm, k: Optional[int] = None) -> int:
    """dim_K I/mI for I = <f_1..f_m>, computed in R/m^(k+1)."""
    field, n = f.field, f.nvars
    comps = [c.exact() for c in f.components if not c.is_zero()]
    if not comps:
        return 0
    if k is None:
        res = quotient_dim([(c,) for c in comps], 1, None)
        k = (res.stabilized_at + 1) if res.stabilized_at is not None else default_kcap()
    mI = [(Poly.var(field, n, i) * c,) for c in comps for i in range(n)]
    base = jet_quotient(mI, n, 1, k)
    full = jet_quotient(mI + [(c,) for c in comps], n, 1, k)
    return base.dim - full.dim


def is_icis(f: MapGerm, k_cap=None) -> IcisCertificate:
    m, n = f.m, f.nvars
    if m > n:
        return IcisCertificate(False, None, "more equations than variables")
    if any(c.constant_term() != 0 for c in f.components):
        return IcisCertificate(False, None, "component with nonzero constant term")
    if any(c.is_zero() for c in f.components):
        return IcisCertificate(False, None, "zero component")
    if n == 2 and m in (1, 2) and f.precision is None:
        # a common component through the origin is cheap to detect and
        # would otherwise only show up as a stabilization running to the cap
        polys = list(f.components)
        if m == 1:
            polys += [polys[0].derivative(0), polys[0].derivative(1)]
        if common_factor_at_origin(polys):
            reason = ("singular locus is not isolated" if m == 1
                      else "not a 0-dimensional complete intersection")
            return IcisCertificate(False, None, reason)
    J = jacobian(f.exact())
    mins = [q for q in minors(J, m) if not q.is_zero()]
    gens = [(c.exact(),) for c in f.components] + [(q,) for q in mins]
    sing = quotient_dim(gens, 1, k_cap)
    if sing.dim == INF:
        return _uncertified(f, "singular locus is not isolated", sing.profile)
    if m == n:
        ci = quotient_dim([(c.exact(),) for c in f.components], 1, k_cap)
        if ci.dim == INF:
            return _uncertified(f, "not a 0-dimensional complete intersection", ci.profile)
        mng = minimal_generator_count(f, ci.stabilized_at + 1)
    else:
        mng = minimal_generator_count(f, max(sing.stabilized_at + 1, 2 * f.order() + 2))
    if mng != m:
        return IcisCertificate(False, None, f"minimal number of generators is {mng}, not {m}", mng)
    return IcisCertificate(True, sing.stabilized_at, None, mng)


def _uncertified(f: MapGerm, reason: str, profile) -> IcisCertificate:
    """No stabilization up to the cap: try to prove the failure, else mark it unproven."""
    top = max(profile) if profile else None
    unproven = IcisCertificate(False, None, f"no stabilization up to degree {top}", proven=False)
    if f.nvars == 2 and f.m in (1, 2) and f.precision is None:
        polys = list(f.components)
        if f.m == 1:
            polys += [polys[0].derivative(0), polys[0].derivative(1)]
        proof = common_factor_at_origin(polys)
        if proof is not None:
            return IcisCertificate(False, None, reason) if proof else unproven
        if f.m == 2:
            # Bezout: without a common factor the colength is at most deg f1 * deg f2,
            # and then m^(deg f1 * deg f2) lies in the ideal
            B = f.components[0].degree() * f.components[1].degree()
            q = jet_quotient([(c,) for c in f.components], 2, 1, max(B, 1))
            return unproven if q.certified else IcisCertificate(False, None, reason)
    return unproven


def determinacy_bound(f: MapGerm, tau=None) -> int:
    """2*tau - ord + 2 (the finite determinacy bound for an ICIS)."""
    tau = tjurina(f) if tau is None else tau
    if tau == INF:
        raise CapExceeded("Tjurina number is infinite; no determinacy bound", {})
    return 2 * tau - f.order() + 2


def deformation_determinacy_bound(f: MapGerm, tau=None) -> int:
    tau = tjurina(f) if tau is None else tau
    return 2 * tau + 1


@dataclass
class InvariantReport:
    tau: Union[int, float]
    tau_sec: Union[int, float]
    corank_vector: Tuple[int, ...]
    icis: bool
    determinacy: Optional[int]


def invariants(f: MapGerm, k_cap=None) -> InvariantReport:
    from .poly import hessian_corank

    tau = tjurina(f, k_cap)
    tau_sec = tjurina_sec(f, k_cap) if tau != INF else INF
    cor = tuple(hessian_corank(c)[0] for c in f.components)
    det = determinacy_bound(f, tau) if tau != INF else None
    return InvariantReport(tau, tau_sec, cor, tau != INF, det)
