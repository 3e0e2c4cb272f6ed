"""Decision procedure for simple ICIS of two equations in two variables.

Pipeline: ICIS check, elimination of order-one components, the
non-simpleness screens, then the order-two case split on the quadratic
pencil ``span(j2 f1, j2 f2)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence

from . import singtype as T
from .coeff import Field, make_field
from .errors import (CapExceeded, InvalidParameters, NeedsExtension, NotApplicable,
                     PrecisionLoss)
from .jetalg import MonoVec, determinacy_bound, is_icis, tjurina, tjurina_sec
from .normalize import (ReductionTrace, degenerate_normalize, nondegenerate_member, pencil_rank,
                        quadratic_part, reduce_degenerate_shape, reduce_nondegenerate,
                        series_inverse)
from .poly import INF, MapGerm, Poly, substitute
from .singtype import SingularityType

log = logging.getLogger(__name__)

__all__ = ["SingularityType", "ClassifyReport", "classify_icis", "nonsimple_screen",
           "reduce_order_one", "normal_form_of", "expected_t1sec_basis"]


@dataclass
class ClassifyReport:
    type: SingularityType
    char: int
    ext: int
    tau: object
    tau_sec: object
    determinacy: Optional[int]
    witness: object = None          # ReductionTrace, "needs-extension" or None
    case_chain: List[str] = dc_field(default_factory=list)

    @property
    def simple(self) -> bool:
        return self.type.simple

    @property
    def reason(self):
        return self.type.reason

    def to_json(self, names=None) -> dict:
        w = self.witness
        if isinstance(w, ReductionTrace):
            w = w.to_json(names)
        return {
            "type": self.type.tag,
            "params": self.type.param_dict(),
            "char": self.char,
            "ext": self.ext,
            "tau": _num(self.tau),
            "tau_sec": _num(self.tau_sec),
            "determinacy": self.determinacy,
            "simple": self.simple,
            "reason": self.type.reason,
            "witness": w,
            "case_chain": list(self.case_chain),
        }


def _num(v):
    return None if v == INF else int(v)


def _ext(field: Field) -> int:
    order = field.order
    if order is None:
        return 1
    k, q = 0, 1
    while q < order:
        q *= field.characteristic
        k += 1
    return k


# -- normal forms ------------------------------------------------------------------

def _check(cond, msg):
    if not cond:
        raise InvalidParameters(msg)


def normal_form_of(t: SingularityType, field: Field) -> MapGerm:
    """The polynomial germ listed for ``t`` in characteristic ``field.characteristic``."""
    p = field.characteristic
    tag, prm = t.tag, t.param_dict()
    if tag == "A":
        k = prm["k"]
        _check(k >= 0, "A_k needs k >= 0")
        return MapGerm([Poly.monomial(field, (k + 1,), field.one)])
    X, Y = Poly.var(field, 2, 0), Poly.var(field, 2, 1)
    if tag == "F":
        m, n = prm["m"], prm["n"]
        _check(m >= 2 and n >= 2, "F(m,n) needs m, n >= 2")
        return MapGerm([X * Y, X ** m + Y ** n])
    if tag in ("F22_0", "F22_1"):
        _check(p == 2, f"{tag} exists only in characteristic 2")
        return MapGerm([X * X, Y * Y if tag == "F22_0" else X * Y + Y * Y])
    _check(p != 2, f"{tag} is not a characteristic-2 type")
    if tag == "G5_0":
        return MapGerm([X * X, Y ** 3])
    if tag == "G5_1":
        _check(p == 3, "G5_1 exists only in characteristic 3")
        return MapGerm([X * X, X * Y * Y + Y ** 3])
    if tag == "G7":
        return MapGerm([X * X, Y ** 4])
    if tag == "H":
        n = prm["n"]
        _check(n >= 3, "H(n) needs n >= 3")
        return MapGerm([X * X + Y ** n, X * Y * Y])
    if tag in ("I0_odd", "I1_odd"):
        t_ = prm["t"]
        _check(t_ >= 4, f"{tag} needs t >= 4")
        if tag == "I0_odd":
            return MapGerm([X * X + Y ** 3, Y ** t_])
        _check(p != 0 and t_ % p == 0, "I1_odd needs p | t")
        return MapGerm([X * X + Y ** 3, Y ** t_ + X * Y ** (t_ - 1)])
    if tag in ("I0_even", "I1_even"):
        q = prm["q"]
        _check(q >= 3, f"{tag} needs q >= 3")
        if tag == "I0_even":
            return MapGerm([X * X + Y ** 3, X * Y ** q])
        _check(p != 0 and (2 * q + 3) % p == 0, "I1_even needs p | 2q+3")
        return MapGerm([X * X + Y ** 3, X * Y ** q + Y ** (q + 2)])
    raise InvalidParameters(f"no normal form for {tag}")


def _mv(x, y, comp) -> MonoVec:
    return ((x, y), comp)


def expected_t1sec_basis(t: SingularityType, p: int) -> List[MonoVec]:
    """Monomial basis of T^{1,sec} as listed for the normal form of ``t``.

    Vectors are ``((i, j), c)`` for ``x^i y^j`` in component ``c``.
    """
    normal_form_of(t, make_field(p) if p else make_field(0))   # validates
    tag, prm = t.tag, t.param_dict()
    e = _mv
    if tag == "A":
        raise InvalidParameters("the basis tables cover two-variable germs only")
    if tag == "F":
        m, n = prm["m"], prm["n"]
        out = [e(1, 0, 0), e(0, 1, 0)]
        both = p != 0 and m % p == 0 and n % p == 0
        if not both:
            out += [e(i, 0, 1) for i in range(1, m)] + [e(0, j, 1) for j in range(1, n)]
        elif m >= n:
            out += [e(i, 0, 1) for i in range(1, m + 1)] + [e(0, j, 1) for j in range(1, n)]
        else:
            out += [e(i, 0, 1) for i in range(1, m)] + [e(0, j, 1) for j in range(1, n + 1)]
        return out
    if tag == "F22_0":
        return [e(1, 0, 0), e(0, 1, 0), e(1, 1, 0), e(1, 0, 1), e(0, 1, 1), e(1, 1, 1)]
    if tag == "F22_1":
        return [e(1, 0, 0), e(0, 1, 0), e(0, 2, 0)]
    if tag == "G5_0":
        out = [e(1, 0, 0), e(0, 1, 0), e(0, 2, 0), e(1, 0, 1), e(0, 1, 1), e(1, 1, 1), e(0, 2, 1)]
        return out + ([e(1, 2, 1)] if p == 3 else [])
    if tag == "G5_1":
        return [e(1, 0, 0), e(0, 1, 0), e(0, 2, 0), e(1, 0, 1), e(0, 1, 1), e(1, 1, 1), e(0, 2, 1)]
    if tag == "G7":
        return [e(1, 0, 0), e(0, 1, 0), e(0, 2, 0), e(0, 3, 0),
                e(1, 0, 1), e(0, 1, 1), e(1, 1, 1), e(0, 2, 1), e(1, 2, 1), e(0, 3, 1)]
    if tag == "H":
        n = prm["n"]
        return ([e(1, 0, 0)] + [e(0, j, 0) for j in range(1, n)]
                + [e(1, 0, 1), e(0, 1, 1), e(1, 1, 1), e(0, 2, 1), e(0, 3, 1)])
    head = [e(1, 0, 0), e(0, 1, 0), e(0, 2, 0), e(1, 0, 1)]
    if tag in ("I0_odd", "I1_odd"):
        t_ = prm["t"]
        top = t_ - 1 if (tag == "I0_odd" and p and t_ % p == 0) else t_ - 2
        return head + [e(0, j, 1) for j in range(1, t_)] + [e(1, j, 1) for j in range(1, top + 1)]
    if tag in ("I0_even", "I1_even"):
        q = prm["q"]
        top = q + 2 if (tag == "I0_even" and p and (2 * q + 3) % p == 0) else q + 1
        return head + [e(0, j, 1) for j in range(1, top + 1)] + [e(1, j, 1) for j in range(1, q)]
    raise InvalidParameters(f"no basis list for {tag}")


# -- pipeline pieces ---------------------------------------------------------------

def _drop_var(g: Poly, j: int) -> Poly:
    n = g.nvars
    terms = {m[:j] + m[j + 1:]: c for m, c in g.terms.items()}
    return Poly(g.field, n - 1, terms, g.precision)


def reduce_order_one(f: MapGerm, k: Optional[int] = None) -> MapGerm:
    """Eliminate one order-one component with the implicit function theorem.

    The component is solved for a variable with non-zero linear coefficient,
    ``x_j = xi(other variables)``, by Newton iteration to degree ``k``; the
    solution is substituted into the remaining components.
    """
    field, n = f.field, f.nvars
    hit = None
    for i, c in enumerate(f.components):
        for j in range(n):
            mono = tuple(1 if v == j else 0 for v in range(n))
            if c.terms.get(mono, 0) != 0:
                hit = (i, j)
                break
        if hit:
            break
    if hit is None:
        raise NotApplicable("no component of order one")
    i, j = hit
    fi = f[i]
    if k is None:
        k = f.precision if f.precision is not None else max(2, max(c.degree() for c in f) * 2)
    dfi = fi.derivative(j)
    xi = Poly.zero(field, n, 0)
    prec = 0
    while prec < k:
        prec = min(2 * prec + 1, k)
        xi = xi.with_precision(prec)
        phi = [Poly.var(field, n, v) for v in range(n)]
        phi[j] = xi
        val = substitute(fi, phi, prec)
        der = substitute(dfi, phi, prec)
        xi = xi - val.mul_trunc(series_inverse(der, prec), prec)
        xi = Poly(field, n, {m: c for m, c in xi.terms.items() if m[j] == 0}, prec)
    phi = [Poly.var(field, n, v) for v in range(n)]
    phi[j] = xi
    rest = [substitute(c, phi, k) for v, c in enumerate(f.components) if v != i]
    if not rest:
        return MapGerm([])  # pragma: no cover - callers stop at one component
    return MapGerm([_drop_var(c, j) for c in rest])


def nonsimple_screen(f: MapGerm) -> Optional[SingularityType]:
    """NotSimple for ord >= 3 (n >= 2) or n >= 3 with ord 2; None otherwise."""
    n = f.nvars
    o = f.order()
    if n >= 2 and o >= 3:
        return T.NotSimple("order>=3")
    if n >= 3 and o == 2:
        return T.NotSimple("n>=3 and order 2")
    return None


def _order_lower(f: MapGerm):
    return min(min((sum(m) for m in c.terms), default=INF) for c in f.components)


def _classify_char2(g: MapGerm, chain):
    """Order-two germs of two equations in characteristic 2."""
    field = g.field
    qs = [quadratic_part(c) for c in g.components]
    if any(q[1] != 0 for q in qs):
        chain.append("xy-branch: non-degenerate quadric")
        m, n, trace = reduce_nondegenerate(g)
        if (m, n) == (2, 2):
            chain.append("(x^2, xy+y^2)")
            return T.F22_1, trace
        return T.F(m, n), trace
    rank = pencil_rank(g)
    if rank == 2:
        chain.append("both quadrics squares, independent: (x^2, y^2)")
        return T.F22_0, None
    chain.append("(x^2 + h1, h) with ord h >= 3")
    return T.NotSimple("(x^2+a*xy, h) with ord(h)>=3"), None


def _witness_complete(trace, t: SingularityType, field) -> None:
    if trace is None or not trace.complete:
        return
    try:
        nf = normal_form_of(t, field)
    except InvalidParameters:
        return
    got = trace.result
    prec = trace.precision
    same = all(a.exact().jet(prec) == b.jet(prec).exact() for a, b in zip(got, nf))
    if not same:
        trace.complete = False
        trace.missing = trace.missing or "remaining normal-form transformations"


def classify_icis(f: MapGerm, k_cap=None, witness: bool = True) -> ClassifyReport:
    """Classify ``f`` (m equations in m variables) up to contact equivalence."""
    field = f.field
    p, ext = field.characteristic, _ext(field)
    if f.m != f.nvars:
        raise NotApplicable("classification needs as many equations as variables")
    chain: List[str] = []
    cert = is_icis(f, k_cap)
    if not cert.icis and not cert.proven:
        raise CapExceeded(f"ICIS test inconclusive: {cert.reason}", {})
    if not cert.icis:
        return ClassifyReport(T.NotICIS(cert.reason or "not an ICIS"), p, ext, INF, INF, None, None,
                              ["not an ICIS"])
    tau = tjurina(f, k_cap)
    tau_sec = tjurina_sec(f, k_cap)
    if tau == INF:
        raise CapExceeded("Tjurina number not certified below the cap", {})
    N = determinacy_bound(f, tau)
    if f.precision is not None and f.precision < N:
        raise PrecisionLoss(f"input known to degree {f.precision}; determinacy needs {N}")
    g = f.exact().jet(N).exact()
    report = lambda t, w=None: ClassifyReport(t, p, ext, tau, tau_sec, N, w, chain)
    # order-one components
    while g.m >= 1 and _order_lower(g) == 1:
        chain.append("eliminate order-one component")
        if g.m == 1:
            return report(T.A(0))
        g = MapGerm([c.exact() for c in reduce_order_one(g.with_precision(N), N)])
    if g.m == 1:
        c = g[0]
        o = c.jet(N).order() if c.terms else INF
        if o == INF:
            raise PrecisionLoss("residual hypersurface vanishes to the determinacy bound")
        chain.append("one equation: A_k")
        return report(T.A(o - 1))
    screened = nonsimple_screen(g)
    if screened is not None:
        chain.append(screened.reason)
        return report(screened)
    # n = 2, ord = 2
    if p == 2:
        t, trace = _classify_char2(g, chain)
        return report(t, _finish_witness(trace, t, field) if witness else None)
    if nondegenerate_member(g) is not None:
        chain.append("non-degenerate quadric: (xy, x^m+y^n)")
        m, n, trace = reduce_nondegenerate(g)
        t = T.F(m, n)
        return report(t, _finish_witness(trace, t, field) if witness else None)
    chain.append("degenerate pencil")
    W = min(N, tau + 4)
    while True:
        try:
            shape = reduce_degenerate_shape(g, W, normalize=False, final=W >= N)
            t, trace = degenerate_normalize(shape)
            break
        except PrecisionLoss:
            if W >= N:
                raise
            W = min(N, 2 * W)
            log.debug("raising working precision to %d", W)
    chain.extend(trace.chain if trace is not None else [])
    w = None
    if witness and t.simple:
        try:
            wshape = reduce_degenerate_shape(g, W, normalize=True, final=W >= N)
            w = _finish_witness(wshape.trace, t, field)
        except NeedsExtension:
            w = "needs-extension"
    return report(t, w)


def _finish_witness(trace, t, field):
    if trace is None:
        return None
    if not trace.complete and trace.missing and "not in the field" in trace.missing:
        return "needs-extension"
    _witness_complete(trace, t, field)
    return trace
