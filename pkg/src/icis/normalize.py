"""Normal-form reductions for germs of two equations in two variables.

Every transformation is recorded as a :class:`Step`, a pair ``(U, phi)``
acting by ``g -> U * g(phi(x))``.  Computations happen modulo
``m^(W+1)`` for a working precision ``W``; substitutions with images in
``m``, unit multiplications and division by a germ regular in ``x`` all
preserve ``m^(W+1)``, so every coefficient of degree <= W is exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, List, Optional, Sequence, Tuple

from .errors import (DerivativeNotUnit, NeedsExtension, NoRoot, NotApplicable,
                     PrecisionLoss)
from .poly import INF, MapGerm, Poly, WeightSystem, apply_unit, divide_by_x2_plus, dw_order, substitute

# -- traces ---------------------------------------------------------------------


@dataclass
class Step:
    kind: str
    label: str
    phi: Optional[Tuple[Poly, ...]] = None
    U: Optional[Tuple[Tuple[Poly, ...], ...]] = None

    def apply(self, g: MapGerm, k: Optional[int]) -> MapGerm:
        if self.phi is not None:
            g = MapGerm([substitute(c, self.phi, k) for c in g.components])
        if self.U is not None:
            g = apply_unit(self.U, g, k)
        elif k is not None:
            g = g.jet(min(k, g.precision) if g.precision is not None else k)
        return g

    def describe(self, names=None) -> dict:
        out = {"kind": self.kind, "label": self.label}
        if self.phi is not None:
            out["phi"] = [p.to_str(names) for p in self.phi]
        if self.U is not None:
            out["U"] = [[u.to_str(names) for u in row] for row in self.U]
        return out


@dataclass
class ReductionTrace:
    source: MapGerm
    precision: Optional[int]
    steps: List[Step] = dc_field(default_factory=list)
    result: Optional[MapGerm] = None
    complete: bool = True
    missing: Optional[str] = None
    chain: List[str] = dc_field(default_factory=list)

    def __post_init__(self):
        if self.result is None:
            self.result = self.source if self.precision is None else self.source.jet(self.precision)

    def push(self, step: Step) -> MapGerm:
        self.result = step.apply(self.result, self.precision)
        self.steps.append(step)
        return self.result

    def replay(self, f: Optional[MapGerm] = None) -> MapGerm:
        g = self.source if f is None else f
        if self.precision is not None:
            g = g.jet(self.precision)
        for st in self.steps:
            g = st.apply(g, self.precision)
        return g

    def labels(self) -> List[str]:
        return [s.label for s in self.steps]

    def to_json(self, names=None) -> dict:
        return {"precision": self.precision, "complete": self.complete,
                "missing": self.missing, "steps": [s.describe(names) for s in self.steps],
                "result": [c.to_str(names) for c in self.result.components]}


def _identity_map(field, n, k=None):
    return tuple(Poly.var(field, n, i, k) for i in range(n))


def _unit_matrix(field, n, m, entries):
    """m x m matrix of constants/polys from nested lists (raw values allowed)."""
    rows = []
    for r in entries:
        row = []
        for e in r:
            row.append(e if isinstance(e, Poly) else Poly.constant(field, n, e))
        rows.append(tuple(row))
    return tuple(rows)


# -- univariate series helpers (series in y inside K[[x, y]]) ---------------------

def series_inverse(u: Poly, k: int) -> Poly:
    """Inverse of a unit power series modulo m^(k+1) (Newton iteration)."""
    field, n = u.field, u.nvars
    c = u.constant_term()
    if c == 0:
        raise ValueError("not a unit")
    v = Poly.constant(field, n, field.inv(c), k)
    two = Poly.constant(field, n, field.from_int(2), k)
    prec = 0
    while prec < k:
        prec = min(2 * prec + 1, k)
        v = v.with_precision(prec)
        v = v.mul_trunc(two - u.with_precision(prec).mul_trunc(v, prec), prec)
    return v.with_precision(k)


def series_root(u: Poly, r: int, k: int) -> Poly:
    """r-th root of a unit series (needs p not dividing r and a root of u(0))."""
    field, n = u.field, u.nvars
    p = field.characteristic
    if p and r % p == 0:
        raise ValueError("root order divisible by the characteristic")
    c0 = field.nth_root(u.constant_term(), r)
    z = Poly.constant(field, n, c0, k)
    rinv = field.inv(field.from_int(r))
    prec = 0
    while prec < k:
        prec = min(2 * prec + 1, k)
        z = z.with_precision(prec)
        zr1 = z ** (r - 1)
        num = zr1.mul_trunc(z, prec) - u.with_precision(prec)
        den = series_inverse(zr1, prec)
        z = (z - num.mul_trunc(den, prec).scale(rinv)).with_precision(prec)
    return z.with_precision(k)


def newton_unit_solve(F: Callable[[Poly, int], Poly], dF: Callable[[Poly, int], Poly],
                      field, k: int, nvars: int = 1, start=None) -> Poly:
    """Unit series z with z(0) = start (default 1) and F(z) = 0 mod m^(k+1).

    ``F`` and ``dF`` map a series ``z`` (and a precision) to F(z) and F'(z).
    Raises :class:`DerivativeNotUnit` when F'(z0) is not a unit.
    """
    z = Poly.constant(field, nvars, field.one if start is None else start, k)
    d0 = dF(z.with_precision(0), 0).constant_term()
    if d0 == 0:
        raise DerivativeNotUnit("derivative of the functional vanishes at the start value")
    if F(z.with_precision(0), 0).constant_term() != 0:
        raise ValueError("start value is not a root of the functional modulo m")
    prec = 0
    while prec < k:
        prec = min(2 * prec + 1, k)
        zp = z.with_precision(prec)
        step = F(zp, prec).mul_trunc(series_inverse(dF(zp, prec), prec), prec)
        z = (zp - step).with_precision(prec)
    return z.with_precision(k)


def lemma5_functional(b: Poly, s: int, q: int, t: int):
    """The unit equation ``z^(s+2q-2t) * sum_j b_j y^(j-q) z^(2(j-q)) = b_q``.

    ``b`` holds ``sum_j b_j y^(j-q)`` as a series in the last variable.
    Returns ``(F, dF)`` suitable for :func:`newton_unit_solve`.
    """
    field, n = b.field, b.nvars
    e = s + 2 * q - 2 * t
    if e < 0:
        raise NotApplicable("negative exponent in the unit equation")
    bq = b.constant_term()
    yi = n - 1

    def parts(z, k):
        # sum_j b_j y^i z^(2i) and its derivative in z
        z2 = z.mul_trunc(z, k)
        total = Poly.zero(field, n, k)
        dtotal = Poly.zero(field, n, k)
        zpow = Poly.constant(field, n, 1, k)
        zpow_prev = Poly.zero(field, n, k)  # z^(2i-1)
        deg = max((m[yi] for m in b.terms), default=0)
        for i in range(0, min(deg, k) + 1):
            c = b.coeff(tuple(i if j == yi else 0 for j in range(n)))
            if c != 0:
                mono = Poly.monomial(field, tuple(i if j == yi else 0 for j in range(n)), c, k)
                total = total + mono.mul_trunc(zpow, k)
                if i:
                    dtotal = dtotal + mono.mul_trunc(zpow_prev, k).scale(field.from_int(2 * i))
            zpow_prev = zpow.mul_trunc(z, k)
            zpow = zpow.mul_trunc(z2, k)
        return total, dtotal

    def F(z, k):
        tot, _ = parts(z, k)
        return (z.with_precision(k) ** e).mul_trunc(tot, k) - Poly.constant(field, n, bq, k)

    def dF(z, k):
        tot, dtot = parts(z, k)
        ze = z.with_precision(k) ** e
        first = Poly.zero(field, n, k)
        if e:
            first = (z.with_precision(k) ** (e - 1)).mul_trunc(tot, k).scale(field.from_int(e))
        return first + ze.mul_trunc(dtot, k)

    return F, dF


# -- splitting lemmas ---------------------------------------------------------------

def _quadratic_coeffs(f: Poly):
    n = f.nvars
    Q = {}
    for mono, c in f.terms.items():
        if sum(mono) == 2:
            idx = tuple(i for i in range(n) for _ in range(mono[i]))
            Q[idx] = c
    return Q


def _kill_terms(g: Poly, partners, lambdas, trace, k, label):
    """Degree-by-degree removal of terms involving the split variables.

    ``partners[i]`` is the variable whose substitution cancels ``x_i * M``:
    ``i`` itself for a square ``lambda_i x_i^2`` and ``j`` for a pair ``x_i x_j``.
    """
    field, n = g.field, g.nvars
    for d in range(3, k + 1):
        shifts = {}
        for mono, c in list(g.terms.items()):
            if sum(mono) != d:
                continue
            hit = next((i for i in sorted(partners) if mono[i] > 0), None)
            if hit is None:
                continue
            rest = list(mono)
            rest[hit] -= 1
            tgt = partners[hit]
            coef = field.neg(c)
            if tgt == hit:
                coef = field.div(coef, field.mul(field.from_int(2), lambdas[hit]))
            else:
                coef = field.div(coef, lambdas[hit])
            term = Poly.monomial(field, tuple(rest), coef)
            shifts[tgt] = shifts.get(tgt, Poly.zero(field, n)) + term
        if shifts:
            phi = list(_identity_map(field, n))
            for i, s in shifts.items():
                phi[i] = phi[i] + s
            step = Step("substitute", label, tuple(phi), None)
            g = substitute(g, step.phi, k)
            trace.append(step)
    return g


def split_quadratic(f: Poly, k: Optional[int] = None, normalize: bool = True):
    """Splitting lemma for p != 2.

    Returns ``(g, trace)`` where ``g`` is the residual in the first ``c``
    variables (``c`` = corank, ``g`` in m^3) and ``trace.result`` holds the
    full split form ``g + sum x_i^2`` (or ``sum lambda_i x_i^2`` when
    ``normalize`` is False).  The trace records right equivalences only.
    """
    field, n = f.field, f.nvars
    if field.characteristic == 2:
        raise NotApplicable("use split_quadratic_char2 in characteristic 2")
    if f.order() < 2:
        raise NotApplicable("f must lie in m^2")
    k = k if k is not None else (f.precision if f.precision is not None else max(2 * f.degree(), 4))
    steps: List[Step] = []
    g = f.jet(k)
    # linear diagonalization
    lambdas = {}
    remaining = list(range(n))
    while True:
        Q = _quadratic_coeffs(g)
        diag = [i for i in remaining if Q.get((i, i), 0) != 0]
        if not diag:
            off = [(i, j) for (i, j) in Q if i != j and i in remaining and j in remaining]
            if not off:
                break
            i, j = off[0]
            phi = list(_identity_map(field, n))
            phi[j] = phi[j] + Poly.var(field, n, i)
            g = _push_linear(g, phi, steps, k)
            continue
        i = diag[0]
        lam = Q[(i, i)]
        # x_i -> x_i - (sum_j q_ij x_j) / (2 lam) clears the mixed terms
        phi = list(_identity_map(field, n))
        for (a, b), c in Q.items():
            if a != b and i in (a, b):
                j = b if a == i else a
                phi[i] = phi[i] + Poly.monomial(
                    field, tuple(1 if t == j else 0 for t in range(n)),
                    field.neg(field.div(c, field.mul(field.from_int(2), lam))))
        if any(not p.is_zero() and p != Poly.var(field, n, t) for t, p in enumerate(phi)):
            g = _push_linear(g, phi, steps, k)
        lambdas[i] = lam
        remaining.remove(i)
    partners = {i: i for i in lambdas}
    g = _kill_terms(g, partners, lambdas, steps, k, "complete square")
    if normalize and lambdas:
        phi = list(_identity_map(field, n))
        for i, lam in lambdas.items():
            try:
                r = field.nth_root(lam, 2)
            except NoRoot:
                raise NeedsExtension(f"square root of {field.format(lam)} is not in the field") from None
            phi[i] = phi[i].scale(field.inv(r))
        st = Step("substitute", "scale squares", tuple(phi), None)
        g = substitute(g, st.phi, k)
        steps.append(st)
    # move corank variables to the front
    order = remaining + sorted(lambdas)
    if order != list(range(n)):
        inv = [0] * n
        for new, old in enumerate(order):
            inv[old] = new
        phi = tuple(Poly.var(field, n, inv[i]) for i in range(n))
        st = Step("substitute", "permute", phi, None)
        g = substitute(g, st.phi, k)
        steps.append(st)
    c = len(remaining)
    residual = Poly(field, c, {m[:c]: v for m, v in g.terms.items() if all(e == 0 for e in m[c:])}, k)
    trace = ReductionTrace(MapGerm([f]), k, steps, MapGerm([g]))
    return residual, trace


def split_quadratic_char2(f: Poly, k: Optional[int] = None):
    """Splitting lemma for p = 2: ``f ~ x1x2 + ... + x_{2l-1}x_{2l} + g``.

    Returns ``(l, g, trace)``; ``g`` lives in the remaining ``n - 2l``
    variables and is either in m^3 or of the form ``x^2 + h`` with h in m^3
    (up to a nonzero constant on the square).  Making a binary form
    ``a x^2 + b xy + c y^2`` hyperbolic needs a root of an Artin-Schreier
    equation ``z^2 + z = ac/b^2``; if that root is missing
    :class:`NeedsExtension` is raised.
    """
    field, n = f.field, f.nvars
    if field.characteristic != 2:
        raise NotApplicable("characteristic must be 2")
    k = k if k is not None else (f.precision if f.precision is not None else max(2 * f.degree(), 4))
    steps: List[Step] = []
    g = f.jet(k)
    pairs = []
    remaining = list(range(n))
    while True:
        Q = _quadratic_coeffs(g)
        off = [(i, j) for (i, j) in sorted(Q) if i != j and i in remaining and j in remaining]
        if not off:
            break
        i, j = off[0]
        b = Q[(i, j)]
        a = Q.get((i, i), 0)
        c = Q.get((j, j), 0)
        # hyperbolic pair on (x_i, x_j): a X^2 + b XY + c Y^2 -> b XY
        if a != 0:
            z = _quadratic_root_char2(field, a, b, c)
            phi = list(_identity_map(field, n))
            phi[i] = phi[i] + Poly.var(field, n, j).scale(z)
            g = _push_linear(g, phi, steps, k)
            phi = list(_identity_map(field, n))
            phi[j] = phi[j] + Poly.var(field, n, i).scale(field.div(a, b))
            g = _push_linear(g, phi, steps, k)
        elif c != 0:
            phi = list(_identity_map(field, n))
            phi[i] = phi[i] + Poly.var(field, n, j).scale(field.div(c, b))
            g = _push_linear(g, phi, steps, k)
        Q = _quadratic_coeffs(g)
        # clear cross terms of x_i, x_j with the other variables
        phi = list(_identity_map(field, n))
        b = Q[(i, j)]
        changed = False
        for (u, v), cval in Q.items():
            if u == v or {u, v} == {i, j}:
                continue
            if i in (u, v) or j in (u, v):
                mine = u if u in (i, j) else v
                other = v if mine == u else u
                partner = j if mine == i else i
                phi[partner] = phi[partner] + Poly.var(field, n, other).scale(field.neg(field.div(cval, b)))
                changed = True
        if changed:
            g = _push_linear(g, phi, steps, k)
        # scale to x_i x_j
        if b != field.one:
            phi = list(_identity_map(field, n))
            phi[i] = phi[i].scale(field.inv(b))
            g = _push_linear(g, phi, steps, k)
        pairs.append((i, j))
        remaining.remove(i)
        remaining.remove(j)
    partners, lambdas = {}, {}
    for i, j in pairs:
        partners[i], partners[j] = j, i
        lambdas[i] = lambdas[j] = field.one
    if partners:
        g = _kill_terms(g, partners, lambdas, steps, k, "hyperbolic pair")
    # remaining quadratic part is a square (sum c_u x_u^2 = (sum sqrt(c_u) x_u)^2)
    Q = _quadratic_coeffs(g)
    sq = {u: Q[(u, u)] for u in remaining if Q.get((u, u), 0) != 0}
    if sq:
        u0 = min(sq)
        roots = {u: field.nth_root(c, 2) for u, c in sq.items()}
        phi = list(_identity_map(field, n))
        img = Poly.var(field, n, u0)
        for u, r in roots.items():
            if u != u0:
                img = img + Poly.var(field, n, u).scale(r)
        phi[u0] = img.scale(field.inv(roots[u0]))
        g = _push_linear(g, phi, steps, k)
        remaining.remove(u0)
        remaining.insert(0, u0)
    order = [v for pr in pairs for v in pr] + remaining
    if order != list(range(n)):
        inv = [0] * n
        for new, old in enumerate(order):
            inv[old] = new
        phi = tuple(Poly.var(field, n, inv[i]) for i in range(n))
        st = Step("substitute", "permute", phi, None)
        g = substitute(g, st.phi, k)
        steps.append(st)
    l = len(pairs)
    rest = n - 2 * l
    residual = Poly(field, rest, {m[2 * l:]: v for m, v in g.terms.items() if all(e == 0 for e in m[:2 * l])}, k)
    trace = ReductionTrace(MapGerm([f]), k, steps, MapGerm([g]))
    return l, residual, trace


def _push_linear(g, phi, steps, k):
    st = Step("substitute", "linear", tuple(phi), None)
    steps.append(st)
    return substitute(g, st.phi, k)


def _quadratic_root_char2(field, a, b, c):
    """Root z of a z^2 + b z + c = 0 with b != 0 in characteristic 2."""
    for z in field.elements():
        if field.add(field.add(field.mul(a, field.mul(z, z)), field.mul(b, z)), c) == 0:
            return z
    raise NeedsExtension("quadratic factor needs an Artin-Schreier root outside the field")


# -- Merle absorption --------------------------------------------------------------

def merle_absorb(f: MapGerm, g: MapGerm, ws: WeightSystem) -> bool:
    """True certifies ``f + g ~ f`` (f quasi-homogeneous ICIS of type ws)."""
    from .jetalg import t1_graded_dims

    v = dw_order(g, ws)
    if v == INF:
        return True
    dims = t1_graded_dims(f, ws)
    top = max((nu for nu, d in dims.items() if d), default=0)
    return v > max(0, top)


# -- order-two germs of two equations in two variables -------------------------------

def quadratic_part(f: Poly):
    """Coefficients ``(a, b, c)`` of ``a x^2 + b xy + c y^2`` in ``j^2 f``."""
    z = f.field.zero
    return (f.terms.get((2, 0), z), f.terms.get((1, 1), z), f.terms.get((0, 2), z))


def is_nondegenerate(field, abc) -> bool:
    a, b, c = abc
    if field.characteristic == 2:
        return b != 0
    four = field.from_int(4)
    return field.sub(field.mul(b, b), field.mul(four, field.mul(a, c))) != 0


def nondegenerate_member(f: MapGerm):
    """``(mu, lam)`` with ``j^2(mu f1 + lam f2)`` non-degenerate, or None.

    A binary quadratic pencil whose members are all degenerate is spanned by
    one square, so testing ``f1``, ``f2`` and three combinations suffices.
    """
    field = f.field
    q1, q2 = quadratic_part(f[0]), quadratic_part(f[1])
    one, zero = field.one, field.zero
    cands = [(one, zero), (zero, one)] + [(one, field.from_int(l)) for l in (1, 2, 3)]
    for mu, lam in cands:
        if mu == 0 and lam == 0:
            continue
        abc = tuple(field.add(field.mul(mu, u), field.mul(lam, v)) for u, v in zip(q1, q2))
        if any(abc) and is_nondegenerate(field, abc):
            return mu, lam
    return None


def pencil_rank(f: MapGerm) -> int:
    from .linalg import matrix_rank
    return matrix_rank(f.field, [list(quadratic_part(c)) for c in f.components])


def hilbert_increments(f: MapGerm, upto: int) -> List[int]:
    """``dim m^d / (I + m^(d+1)) ∩ m^d`` for d = 0..upto, I the ideal of f."""
    from .jetalg import jet_quotient
    gens = [(c.exact(),) for c in f.components]
    dims = [jet_quotient(gens, f.nvars, 1, d).dim for d in range(upto + 1)]
    return [dims[0]] + [dims[d] - dims[d - 1] for d in range(1, upto + 1)]


def f_type_parameters(f: MapGerm, colength: Optional[int] = None) -> Tuple[int, int]:
    """``(m, n)`` with ``m <= n`` for a germ contact equivalent to ``(xy, x^m+y^n)``.

    The Hilbert function of ``K[[x,y]]/<xy, x^m+y^n>`` drops from 2 to 1
    in degree m; the colength is m + n.  Both are contact invariants.
    """
    from .jetalg import jet_quotient, quotient_dim
    if colength is None:
        res = quotient_dim([(c.exact(),) for c in f.components], m=1, strict=True)
        colength = int(res.dim)
    d = 1
    gens = [(c.exact(),) for c in f.components]
    prev = jet_quotient(gens, 2, 1, 0).dim
    while d <= colength:
        cur = jet_quotient(gens, 2, 1, d).dim
        if cur - prev <= 1:
            break
        prev, d = cur, d + 1
    m = d
    n = colength - m
    if m < 2 or n < m:
        raise NotApplicable("germ is not of type (xy, x^m+y^n)")
    return m, n


def _const(field, c):
    return Poly.constant(field, 2, c)


def _swap_rows(field):
    return ((_const(field, field.zero), _const(field, field.one)),
            (_const(field, field.one), _const(field, field.zero)))


def reduce_nondegenerate(f: MapGerm, k: Optional[int] = None):
    """Parameters ``(m, n)`` (m <= n) of the F-type germ f plus a witness trace.

    The parameters come from contact invariants.  The trace brings f1 to
    ``xy`` and f2 to ``u(x) + v(y)``; it is marked complete only when the
    last step, rescaling the two branches, is not needed.
    """
    if f.m != 2 or f.nvars != 2:
        raise NotApplicable("two equations in two variables required")
    if f.order() != 2:
        raise NotApplicable("order must be 2")
    pair = nondegenerate_member(f)
    if pair is None:
        raise NotApplicable("no non-degenerate quadric in the pencil")
    m, n = f_type_parameters(f)
    field = f.field
    k = k if k is not None else (f.precision if f.precision is not None else m + n + 2)
    trace = ReductionTrace(f, k)
    mu, lam = pair
    one, zero = field.one, field.zero
    if mu != 0:
        U = ((_const(field, mu), _const(field, lam)), (_const(field, zero), _const(field, one)))
        if (mu, lam) != (one, zero):
            trace.push(Step("unit", "non-degenerate member first", None, U))
    else:
        trace.push(Step("unit", "swap components", None, _swap_rows(field)))
    g = trace.result
    a, b, c = quadratic_part(g[0])
    try:
        phi = _hyperbolic_change(field, a, b, c)
    except NeedsExtension as exc:
        trace.complete, trace.missing = False, str(exc)
        return m, n, trace
    if phi is not None:
        trace.push(Step("substitute", "quadric to xy", phi, None))
    g = trace.result
    b = quadratic_part(g[0])[1]
    if b != one:
        U = ((_const(field, field.inv(b)), _const(field, zero)), (_const(field, zero), _const(field, one)))
        trace.push(Step("unit", "scale", None, U))
    # Morse lemma for xy + h.o.t.
    steps: List[Step] = []
    lambdas = {0: one, 1: one}
    _kill_terms(trace.result[0], {0: 1, 1: 0}, lambdas, steps, k, "hyperbolic pair")
    for st in steps:
        trace.push(st)
    g = trace.result
    # f2 -= Q * xy for the mixed part of f2
    mixed = {(e[0] - 1, e[1] - 1): v for e, v in g[1].terms.items() if e[0] and e[1]}
    if mixed:
        Q = Poly(field, 2, mixed)
        U = ((_const(field, one), _const(field, zero)), (-Q, _const(field, one)))
        trace.push(Step("unit", "remove xy-multiples", None, U))
    g = trace.result
    if dict(g[1].terms) != {(m, 0): one, (0, n): one}:
        trace.complete = False
        trace.missing = "rescaling of the branches x^m*e1(x), y^n*e2(y)"
    return m, n, trace


def _hyperbolic_change(field, a, b, c):
    """Linear substitution taking ``a x^2 + b xy + c y^2`` to a multiple of ``xy``."""
    if a == 0 and c == 0:
        return None
    n = 2
    X, Y = Poly.var(field, n, 0), Poly.var(field, n, 1)
    if a == 0:
        # b xy + c y^2 = y (b x + c y): x -> x - (c/b) y
        return (X - Y.scale(field.div(c, b)), Y)
    if c == 0:
        return (X, Y - X.scale(field.div(a, b)))
    # factor a (x - r1 y)(x - r2 y) with roots of a r^2 + b r + c
    roots = _binary_roots(field, a, b, c)
    r1, r2 = roots
    # x -> x + r1 y', ... use x = r1 u + r2 v, y = u + v
    return (X.scale(r1) + Y.scale(r2), X + Y)


def _binary_roots(field, a, b, c):
    if field.characteristic == 2:
        z = _quadratic_root_char2(field, a, b, c)
        return z, field.add(z, field.div(b, a))
    disc = field.sub(field.mul(b, b), field.mul(field.from_int(4), field.mul(a, c)))
    try:
        r = field.nth_root(disc, 2)
    except NoRoot:
        raise NeedsExtension(f"square root of {field.format(disc)} is not in the field") from None
    two_a = field.mul(field.from_int(2), a)
    return (field.div(field.sub(r, b), two_a), field.div(field.neg(field.add(r, b)), two_a))


# -- the degenerate pencil (p != 2) ---------------------------------------------

def prepare_x2(f: Poly, k: int):
    """Weierstrass preparation of ``f`` (x-regular of order 2 with x^2 coefficient 1).

    Returns ``(G, r0, r1)`` with ``G`` a unit and
    ``G * f = x^2 + r1(y) x + r0(y)`` modulo m^(k+1).
    """
    field = f.field
    f = f.jet(k) if f.precision is None or f.precision > k else f
    V = Poly(field, 2, {(e[0] - 2, e[1]): c for e, c in f.terms.items() if e[0] >= 2}, k - 2)
    low = Poly(field, 2, {e: c for e, c in f.terms.items() if e[0] < 2}, k)
    Vinv = series_inverse(V, k - 2)
    G = Poly.zero(field, 2, k - 2)
    rem = Poly.zero(field, 2, k)
    cur = Poly.monomial(field, (2, 0), field.one, k)
    for _ in range(k + 2):
        if cur.is_zero():
            break
        hi = Poly(field, 2, {(e[0] - 2, e[1]): c for e, c in cur.terms.items() if e[0] >= 2}, k - 2)
        rem = rem + Poly(field, 2, {e: c for e, c in cur.terms.items() if e[0] < 2}, k)
        gv = hi.mul_trunc(Vinv, k - 2)
        G = G + gv
        cur = -(gv.mul_trunc(low, k))
    else:
        raise PrecisionLoss("Weierstrass preparation did not converge")
    r0 = Poly(field, 2, {e: field.neg(c) for e, c in rem.terms.items() if e[0] == 0}, k)
    r1 = Poly(field, 2, {(0, e[1]): field.neg(c) for e, c in rem.terms.items() if e[0] == 1}, k - 1)
    # x^2 = G f + rem, so G f = x^2 - rem
    return G, r0, r1


@dataclass
class DegenerateShape:
    """``(x^2 + h(y), A(y) + x B(y))`` with ``h = y^s e(y)``.

    After normalization ``e = 1`` (alpha = 1) or ``h = 0`` (alpha = 0).
    Orders are ``INF`` for series that vanish.
    """
    s: object
    alpha: int
    a_series: Poly
    b_series: Poly
    t: object
    q: object
    h: Poly
    precision: int
    final: bool = True
    trace: Optional[ReductionTrace] = None
    field: object = None

    def germ(self) -> MapGerm:
        field = self.field or self.h.field
        x2 = Poly.monomial(field, (2, 0), field.one)
        X = Poly.var(field, 2, 0)
        return MapGerm([x2 + self.h, self.a_series + X * self.b_series]).jet(self.precision)


def _series_order(g: Poly, final: bool):
    try:
        return g.order()
    except PrecisionLoss:
        if final:
            return INF
        raise


def reduce_degenerate_shape(f: MapGerm, k: Optional[int] = None, normalize: bool = True,
                            final: bool = True) -> DegenerateShape:
    """Bring an order-2 germ with degenerate quadric pencil to the lemma shape.

    Only readings of degree <= k are trusted; with ``final`` a series that
    vanishes to precision k is taken to be zero, otherwise
    :class:`PrecisionLoss` is raised so the caller can retry with a larger k.
    """
    field = f.field
    if field.characteristic == 2:
        raise NotApplicable("characteristic 2 uses the char-2 path")
    if f.m != 2 or f.nvars != 2:
        raise NotApplicable("two equations in two variables required")
    if nondegenerate_member(f) is not None:
        raise NotApplicable("the quadric pencil has a non-degenerate member")
    if k is None:
        k = f.precision if f.precision is not None else max(2 * max(c.degree() for c in f), 6)
    trace = ReductionTrace(f, k)
    one, zero = field.one, field.zero
    q1, q2 = quadratic_part(f[0]), quadratic_part(f[1])
    if not any(q1):
        if not any(q2):
            raise NotApplicable("order must be 2")
        trace.push(Step("unit", "swap components", None, _swap_rows(field)))
        q1, q2 = q2, q1
    if any(q2):
        piv = next(i for i in range(3) if q1[i] != 0)
        lam = field.div(q2[piv], q1[piv])
        U = ((_const(field, one), _const(field, zero)), (_const(field, field.neg(lam)), _const(field, one)))
        trace.push(Step("unit", "clear second quadric", None, U))
    a, b, c = q1
    X, Y = Poly.var(field, 2, 0), Poly.var(field, 2, 1)
    if a != 0:
        if b != 0:
            shift = field.div(b, field.mul(field.from_int(2), a))
            trace.push(Step("substitute", "complete the square", (X - Y.scale(shift), Y), None))
    else:
        trace.push(Step("substitute", "swap variables", (Y, X), None))
        a = c
    if a != one:
        U = ((_const(field, field.inv(a)), _const(field, zero)), (_const(field, zero), _const(field, one)))
        trace.push(Step("unit", "scale", None, U))
    G, r0, r1 = prepare_x2(trace.result[0], k)
    trace.push(Step("unit", "Weierstrass preparation", None,
                    ((G, _const(field, zero)), (_const(field, zero), _const(field, one)))))
    if not r1.is_zero():
        half = field.inv(field.from_int(2))
        trace.push(Step("substitute", "Tschirnhaus shift", (X - r1.scale(half).exact(), Y), None))
    g1 = trace.result[0]
    h = Poly(field, 2, {e: v for e, v in g1.terms.items() if e != (2, 0)}, k)
    if any(e[0] for e in h.terms):
        raise PrecisionLoss("preparation left x-terms in the first component")
    s = _series_order(h, final)
    alpha = 0 if s == INF else 1
    if s == INF:
        h = Poly.zero(field, 2, None if final else k)
    elif normalize:
        # h = y^s e(y); x -> sqrt(e) x and f1 / e give x^2 + y^s
        e = Poly(field, 2, {(0, v[1] - s): c for v, c in h.terms.items()}, k - s)
        try:
            r = series_root(e.with_precision(k), 2, k)
        except NoRoot:
            raise NeedsExtension(f"square root of {field.format(e.constant_term())} is not in the field") from None
        einv = series_inverse(e.with_precision(k), k)
        trace.push(Step("substitute", "normalize unit of h", (X * r, Y), None))
        trace.push(Step("unit", "normalize unit of h",
                        None, ((einv, _const(field, zero)), (_const(field, zero), _const(field, one)))))
        h = Poly(field, 2, {(0, s): one}, None if final else k)
    g2 = trace.result[1]
    A, B, Q = divide_by_x2_plus(g2, h.with_precision(k), k)
    if not Q.is_zero():
        trace.push(Step("unit", "Weierstrass division", None,
                        ((_const(field, one), _const(field, zero)), (-Q.exact(), _const(field, one)))))
    g2 = trace.result[1]
    A = Poly(field, 2, {e: v for e, v in g2.terms.items() if e[0] == 0}, k)
    B = Poly(field, 2, {(0, e[1]): v for e, v in g2.terms.items() if e[0] == 1}, k - 1)
    if any(e[0] >= 2 for e in g2.terms):
        raise PrecisionLoss("division left terms divisible by x^2")
    t = _series_order(A, final)
    q = _series_order(B, final)
    if t == INF:
        A = Poly.zero(field, 2, None if final else k)
    if q == INF:
        B = Poly.zero(field, 2, None if final else k - 1)
    return DegenerateShape(s, alpha, A, B, t, q, h, k, final, trace, field)


def _shift_down(g: Poly, j: int) -> Poly:
    """``g / y^j`` for a series in y divisible by y^j."""
    prec = None if g.precision is None else g.precision - j
    return Poly(g.field, g.nvars, {(e[0], e[1] - j): c for e, c in g.terms.items()}, prec)


def _h_index(shape: DegenerateShape) -> object:
    """Order of ``c^2 + h`` with ``c = A/B``; the germ is then of type H."""
    t, q = shape.t, shape.q
    a1 = _shift_down(shape.a_series, t)
    b1 = _shift_down(shape.b_series, q)
    kb = b1.precision if b1.precision is not None else shape.precision
    binv = series_inverse(b1, kb)
    c = a1.mul_trunc(binv, None).mul_monomial((0, t - q))
    return _series_order(c * c + shape.h, shape.final)


def degenerate_normalize(shape: DegenerateShape):
    """Type of the germ ``(x^2 + h, A + xB)`` read off ``s, t, q`` and p.

    Returns ``(SingularityType, trace)``; the trace is the one that produced
    the shape, with the traversed case labels in ``trace.chain``.
    Raises :class:`PrecisionLoss` when a needed order is not yet readable.
    """
    from . import singtype as T

    s, t, q = shape.s, shape.t, shape.q
    p = shape.field.characteristic
    chain = [f"shape s={_fmt(s)} t={_fmt(t)} q={_fmt(q)}"]

    def pure(s, t):
        if s == INF or t <= s:
            chain.append("(x^2, y^t)")
            if t == 3:
                return T.G5_0
            if t == 4:
                return T.G7
            return T.NotSimple("s>=4, t>=5, q>=3")
        chain.append("(x^2+y^s, y^t), s<t")
        return T.I0_odd(t) if s == 3 else T.NotSimple("s>=4, t>=5, q>=3")

    if t == INF and q == INF:
        res = T.NotICIS("second component vanishes on the curve")
    elif q == INF or t <= q:
        chain.append("x*B absorbed (t<=q)")
        res = pure(s, t)
    elif t == INF:
        chain.append("(x^2+y^s, x*y^q)")
        if s == INF:
            res = T.NotICIS("(x^2, x*y^q) is not a complete intersection")
        elif q == 2:
            res = T.H(s)
        elif s == 3:
            res = T.I0_even(q)
        else:
            res = T.NotSimple("s>=4, t>=5, q>=3")
    elif t == q + 1:
        chain.append("t=q+1")
        if p == 0 or t % p:
            chain.append("p does not divide t: unit solve removes x*B")
            res = pure(s, t)
        else:
            chain.append("p divides t")
            if s == INF:
                res = T.G5_1 if (p == 3 and t == 3) else T.NotSimple("s>=4, t>=5, q>=3")
            elif s == 3:
                res = T.G5_1 if t == 3 else T.I1_odd(t)
            elif t == 3:
                res = T.G5_1
            else:
                res = T.NotSimple("s>=4, t>=5, q>=3")
    else:
        chain.append("t>=q+2")
        if q == 2:
            n = _h_index(shape)
            chain.append(f"x -> x - A/B, h-order {_fmt(n)}")
            res = T.H(n) if n != INF else T.NotICIS("the two components share a branch")
        elif s == 3:
            if t == q + 2 and p and (2 * q + 3) % p == 0:
                res = T.I1_even(q)
            else:
                res = T.I0_even(q)
        else:
            moduli = s != INF and 2 * t - 2 * q - s == 0
            res = T.NotSimple("moduli" if moduli else "s>=4, t>=5, q>=3", moduli=moduli)
    trace = shape.trace
    if trace is not None:
        trace.chain = chain
    return res, trace


def _fmt(v):
    return "inf" if v == INF else str(v)
