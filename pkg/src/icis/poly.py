"""Sparse exact multivariate polynomials and truncated power series.

A :class:`Poly` is a map from exponent tuples to nonzero raw field values
together with a *precision*: ``None`` means an exact polynomial, an integer
``k`` means a power series known modulo ``m^(k+1)`` (terms of degree > k are
unknown and never stored).  Arithmetic between series of different precision
yields the smaller precision.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .coeff import Field, PrimeField, RationalField
from .errors import PrecisionLoss
from .linalg import matrix_rank

Monomial = Tuple[int, ...]
INF = float("inf")
MAX_VARS = 8


def _min_prec(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _low_order(p: "Poly"):
    if p.terms:
        return min(sum(m) for m in p.terms)
    return INF if p.precision is None else p.precision + 1


def _prod_prec(a: "Poly", b: "Poly") -> Optional[int]:
    """Degree up to which ``a*b`` is known: an error of degree > prec(a) in
    ``a`` is multiplied by ``b`` of order >= ord(b)."""
    bounds = []
    if a.precision is not None:
        bounds.append(a.precision + _low_order(b))
    if b.precision is not None:
        bounds.append(b.precision + _low_order(a))
    v = min(bounds, default=INF)
    return None if v == INF else int(v)


def degrevlex_key(mono: Monomial):
    """Sort key: larger key means larger monomial in degrevlex (x1 > ... > xn)."""
    return (sum(mono), tuple(-e for e in reversed(mono)))


def default_names(n: int) -> List[str]:
    if n <= 2:
        return ["x", "y"][:n]
    if n <= 4:
        return ["x", "y", "z", "w"][:n]
    return [f"x{i + 1}" for i in range(n)]


class Poly:
    __slots__ = ("field", "nvars", "terms", "precision")

    def __init__(self, field: Field, nvars: int, terms=None, precision: Optional[int] = None):
        self.field = field
        self.nvars = nvars
        self.precision = precision
        clean: Dict[Monomial, object] = {}
        if terms:
            for mono, c in terms.items():
                if c != 0 and (precision is None or sum(mono) <= precision):
                    clean[tuple(mono)] = c
        self.terms = clean

    # -- constructors --------------------------------------------------------
    @classmethod
    def _raw(cls, field, nvars, terms, precision):
        obj = cls.__new__(cls)
        obj.field, obj.nvars, obj.terms, obj.precision = field, nvars, terms, precision
        return obj

    @classmethod
    def zero(cls, field, nvars, precision=None):
        return cls._raw(field, nvars, {}, precision)

    @classmethod
    def constant(cls, field, nvars, c, precision=None):
        c = c if _is_raw(field, c) else field.convert(c)
        return cls(field, nvars, {(0,) * nvars: c}, precision)

    @classmethod
    def var(cls, field, nvars, i, precision=None):
        mono = [0] * nvars
        mono[i] = 1
        return cls(field, nvars, {tuple(mono): field.one}, precision)

    @classmethod
    def monomial(cls, field, mono: Monomial, coeff=None, precision=None):
        c = field.one if coeff is None else (coeff if _is_raw(field, coeff) else field.convert(coeff))
        return cls(field, len(mono), {tuple(mono): c}, precision)

    def _like(self, terms, precision):
        return Poly._raw(self.field, self.nvars, terms, precision)

    # -- basic queries -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def coeff(self, mono: Monomial):
        return self.terms.get(tuple(mono), self.field.zero)

    def constant_term(self):
        return self.coeff((0,) * self.nvars)

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def order(self):
        """Total-degree order; ``INF`` for the zero series."""
        return self.a_order((1,) * self.nvars)

    def a_order(self, weights: Sequence[int]):
        if len(weights) != self.nvars or any(w <= 0 for w in weights):
            raise ValueError("weights must be positive, one per variable")
        if not self.terms:
            if self.precision is not None:
                raise PrecisionLoss("series vanishes up to its precision; order unknown")
            return INF
        return min(sum(w * e for w, e in zip(weights, m)) for m in self.terms)

    def sorted_terms(self, reverse=True):
        """Terms in degrevlex order, largest first by default."""
        return sorted(self.terms.items(), key=lambda t: degrevlex_key(t[0]), reverse=reverse)

    def leading_monomial(self) -> Monomial:
        return max(self.terms, key=degrevlex_key)

    def homogeneous_part(self, d: int) -> "Poly":
        return self._like({m: c for m, c in self.terms.items() if sum(m) == d}, None)

    def weighted_part(self, weights, d: int) -> "Poly":
        return self._like(
            {m: c for m, c in self.terms.items() if sum(w * e for w, e in zip(weights, m)) == d},
            self.precision,
        )

    def jet(self, k: int) -> "Poly":
        if self.precision is not None and k > self.precision:
            raise PrecisionLoss(f"cannot take the {k}-jet of a series known to degree {self.precision}")
        return self._like({m: c for m, c in self.terms.items() if sum(m) <= k}, k)

    def with_precision(self, precision: Optional[int]) -> "Poly":
        if precision is None:
            return self._like(dict(self.terms), None)
        return self._like({m: c for m, c in self.terms.items() if sum(m) <= precision}, precision)

    def exact(self) -> "Poly":
        """Forget the precision bound (treat the stored jet as a polynomial)."""
        return self._like(dict(self.terms), None)

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other):
        if self.nvars != other.nvars or self.field != other.field:
            raise ValueError("incompatible polynomials")

    def _coerce(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.constant(self.field, self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        prec = _min_prec(self.precision, other.precision)
        out = dict(self.terms)
        add = self.field.add
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = add(v, c)
                if v == 0:
                    del out[m]
                else:
                    out[m] = v
        if prec is not None:
            out = {m: c for m, c in out.items() if sum(m) <= prec}
        return self._like(out, prec)

    __radd__ = __add__

    def __neg__(self):
        neg = self.field.neg
        return self._like({m: neg(c) for m, c in self.terms.items()}, self.precision)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Poly":
        c = self.field.convert(c) if not _is_raw(self.field, c) else c
        if c == 0:
            return self._like({}, self.precision)
        mul = self.field.mul
        return self._like({m: mul(v, c) for m, v in self.terms.items()}, self.precision)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(self.field.convert(other))
        self._check(other)
        prec = _prod_prec(self, other)
        return self._like(_mul_terms(self.field, self.terms, other.terms, prec), prec)

    __rmul__ = __mul__

    def mul_trunc(self, other: "Poly", k: Optional[int]) -> "Poly":
        prec = _min_prec(_prod_prec(self, other), k)
        return self._like(_mul_terms(self.field, self.terms, other.terms, prec), prec)

    def __pow__(self, e: int):
        result = Poly.constant(self.field, self.nvars, 1, self.precision)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def mul_monomial(self, mono: Monomial, c=None) -> "Poly":
        prec = self.precision
        if c is None:
            terms = {tuple(a + b for a, b in zip(m, mono)): v for m, v in self.terms.items()}
        else:
            mul = self.field.mul
            terms = {tuple(a + b for a, b in zip(m, mono)): mul(v, c) for m, v in self.terms.items()}
        if prec is not None:
            terms = {m: v for m, v in terms.items() if sum(m) <= prec}
        return self._like({m: v for m, v in terms.items() if v != 0}, prec)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return (self.nvars == other.nvars and self.field == other.field
                    and self.terms == other.terms)
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def equal_up_to(self, other: "Poly", k: int) -> bool:
        return self.exact().jet(k) == other.exact().jet(k)

    # -- calculus ------------------------------------------------------------
    def derivative(self, i: int) -> "Poly":
        """Formal partial derivative; exponents divisible by p vanish."""
        f = self.field
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e == 0:
                continue
            v = f.mul(c, f.from_int(e))
            if v == 0:
                continue
            nm = list(m)
            nm[i] -= 1
            out[tuple(nm)] = v
        prec = None if self.precision is None else self.precision - 1
        return self._like(out, prec)

    def substitute(self, phi: Sequence["Poly"], k: Optional[int] = None) -> "Poly":
        """Return ``self(phi_1, ..., phi_n)`` truncated at degree ``k``.

        The ``phi_i`` may live in a different number of variables than
        ``self``; the result lives where the ``phi_i`` live.
        """
        return substitute(self, phi, k)

    def evaluate(self, point: Sequence):
        f = self.field
        total = f.zero
        for m, c in self.terms.items():
            v = c
            for x, e in zip(point, m):
                if e:
                    v = f.mul(v, f.pow(x, e))
            total = f.add(total, v)
        return total

    def only_variables(self, keep: Sequence[int]) -> bool:
        keep = set(keep)
        return all(e == 0 for m in self.terms for i, e in enumerate(m) if i not in keep)

    # -- display -------------------------------------------------------------
    def to_str(self, names: Optional[Sequence[str]] = None) -> str:
        names = list(names) if names else default_names(self.nvars)
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(
                (names[i] if e == 1 else f"{names[i]}^{e}") for i, e in enumerate(m) if e
            )
            cs = self.field.format(c)
            neg = isinstance(c, Fraction) and c < 0
            if neg:
                cs = self.field.format(-c)
            if not mono:
                body = cs
            elif cs == "1":
                body = mono
            else:
                body = f"{cs}*{mono}"
            parts.append(("-" if neg else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        suffix = "" if self.precision is None else f" + O({self.precision + 1})"
        return f"Poly({self.to_str()}{suffix} over {self.field!r})"


def _is_raw(field, c):
    if isinstance(field, RationalField):
        return isinstance(c, Fraction)
    return isinstance(c, int) and 0 <= c < (field.order or 0)


def _mul_terms(field: Field, a: dict, b: dict, prec: Optional[int]) -> dict:
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    bl = sorted(((sum(m), m, c) for m, c in b.items()), key=lambda t: t[0])
    out: dict = {}
    get = out.get
    if isinstance(field, PrimeField):
        for ma, ca in a.items():
            da = sum(ma)
            for db, mb, cb in bl:
                if prec is not None and da + db > prec:
                    break
                m = tuple(x + y for x, y in zip(ma, mb))
                out[m] = get(m, 0) + ca * cb
        p = field.p
        return {m: v % p for m, v in out.items() if v % p}
    if isinstance(field, RationalField):
        # clear denominators so the inner loop runs on machine-friendly ints
        la = lcm(*(c.denominator for c in a.values()))
        lb = lcm(*(c.denominator for _, _, c in bl))
        ai = [(ma, sum(ma), c.numerator * (la // c.denominator)) for ma, c in a.items()]
        bi = [(db, mb, c.numerator * (lb // c.denominator)) for db, mb, c in bl]
        for ma, da, ca in ai:
            for db, mb, cb in bi:
                if prec is not None and da + db > prec:
                    break
                m = tuple(x + y for x, y in zip(ma, mb))
                out[m] = get(m, 0) + ca * cb
        den = la * lb
        return {m: Fraction(v, den) for m, v in out.items() if v != 0}
    add, mul = field.add, field.mul
    for ma, ca in a.items():
        da = sum(ma)
        for db, mb, cb in bl:
            if prec is not None and da + db > prec:
                break
            m = tuple(x + y for x, y in zip(ma, mb))
            out[m] = add(get(m, 0), mul(ca, cb))
    return {m: v for m, v in out.items() if v != 0}


def substitute(f: Poly, phi: Sequence[Poly], k: Optional[int] = None) -> Poly:
    if len(phi) != f.nvars:
        raise ValueError("need one image per variable")
    field = f.field
    nv = phi[0].nvars
    prec = k
    for p in phi:
        prec = _min_prec(prec, p.precision)
    if f.precision is not None:
        # f is only known modulo m^(precision+1); images lie in m, so the
        # composite is known to the same degree.
        prec = _min_prec(prec, f.precision)
    powers: List[List[Poly]] = []
    for i, p in enumerate(phi):
        maxe = max((m[i] for m in f.terms), default=0)
        pw = [Poly.constant(field, nv, 1, prec)]
        for _ in range(maxe):
            pw.append(pw[-1].mul_trunc(p, prec))
        powers.append(pw)
    out: dict = {}
    add, mul = field.add, field.mul
    # group by the first variable's exponent to share partial products
    for m, c in f.terms.items():
        term = None
        for i, e in enumerate(m):
            if e:
                term = powers[i][e] if term is None else term.mul_trunc(powers[i][e], prec)
        if term is None:
            term = Poly.constant(field, nv, 1, prec)
        for mm, v in term.terms.items():
            nvv = add(out.get(mm, field.zero), mul(c, v))
            if nvv == 0:
                out.pop(mm, None)
            else:
                out[mm] = nvv
    return Poly(field, nv, out, prec)


@dataclass(frozen=True)
class WeightSystem:
    """Degrees ``d`` of the components and weights ``a`` of the variables."""

    degrees: Tuple[int, ...]
    weights: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(self.degrees))
        object.__setattr__(self, "weights", tuple(self.weights))
        if any(d <= 0 for d in self.degrees) or any(a <= 0 for a in self.weights):
            raise ValueError("degrees and weights must be positive")


class MapGerm:
    """A tuple ``(f_1, ..., f_m)`` of series in the same ring."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[Poly]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a germ needs at least one component")
        f0 = comps[0]
        for c in comps[1:]:
            if c.field != f0.field or c.nvars != f0.nvars:
                raise ValueError("components must share field and variables")
        if f0.nvars > MAX_VARS:
            raise ValueError(f"at most {MAX_VARS} variables are supported")
        prec = None
        for c in comps:
            prec = _min_prec(prec, c.precision)
        if prec is not None:
            comps = tuple(c.with_precision(prec) for c in comps)
        self.components = comps

    @property
    def field(self) -> Field:
        return self.components[0].field

    @property
    def nvars(self) -> int:
        return self.components[0].nvars

    @property
    def m(self) -> int:
        return len(self.components)

    @property
    def precision(self):
        return self.components[0].precision

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __len__(self):
        return len(self.components)

    def __eq__(self, other):
        return isinstance(other, MapGerm) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def is_zero(self):
        return all(c.is_zero() for c in self.components)

    def order(self):
        return min(c.order() for c in self.components)

    def jet(self, k: int) -> "MapGerm":
        return MapGerm([c.jet(k) for c in self.components])

    def exact(self) -> "MapGerm":
        return MapGerm([c.exact() for c in self.components])

    def with_precision(self, k) -> "MapGerm":
        return MapGerm([c.with_precision(k) for c in self.components])

    def __add__(self, other: "MapGerm") -> "MapGerm":
        return MapGerm([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "MapGerm") -> "MapGerm":
        return MapGerm([a - b for a, b in zip(self.components, other.components)])

    def to_str(self, names=None) -> str:
        return " ; ".join(c.to_str(names) for c in self.components)

    def __str__(self):
        return "(" + ", ".join(c.to_str() for c in self.components) + ")"

    def __repr__(self):
        return f"MapGerm{self} over {self.field!r}"


def germ(field: Field, *components, nvars: int = 2, precision=None) -> MapGerm:
    """Build a germ from strings or polynomials (convenience for tests/CLI)."""
    from .parse import parse_poly

    comps = []
    for c in components:
        if isinstance(c, str):
            c = parse_poly(c, field, nvars)
        comps.append(c if precision is None else c.with_precision(precision))
    return MapGerm(comps)


# -- orders and graded pieces ---------------------------------------------

def a_order(f: Poly, a: Sequence[int]):
    return f.a_order(a)


def dw_order(f: MapGerm, ws: WeightSystem):
    if len(ws.degrees) != f.m or len(ws.weights) != f.nvars:
        raise ValueError("weight system does not match the germ")
    best = INF
    for comp, d in zip(f.components, ws.degrees):
        if comp.is_zero() and comp.precision is None:
            continue
        best = min(best, comp.a_order(ws.weights) - d)
    return best


def jet(f: MapGerm, k: int) -> MapGerm:
    return f.jet(k)


def qh_part(f: MapGerm, ws: WeightSystem, nu: int) -> MapGerm:
    if len(ws.degrees) != f.m or len(ws.weights) != f.nvars:
        raise ValueError("weight system does not match the germ")
    return MapGerm([c.weighted_part(ws.weights, d + nu).exact()
                    for c, d in zip(f.components, ws.degrees)])


def is_quasi_homogeneous(f: MapGerm, ws: WeightSystem) -> bool:
    return qh_part(f, ws, 0) == f.exact()


def substitute_germ(f: MapGerm, phi: Sequence[Poly], k: Optional[int] = None) -> MapGerm:
    return MapGerm([substitute(c, phi, k) for c in f.components])


def apply_unit(U: Sequence[Sequence[Poly]], f: MapGerm, k: Optional[int] = None) -> MapGerm:
    """Matrix action ``U . f`` truncated at ``k``."""
    out = []
    for row in U:
        acc = Poly.zero(f.field, f.nvars, k)
        for u, c in zip(row, f.components):
            if u.is_zero():
                continue
            acc = acc + u.mul_trunc(c, k)
        out.append(acc if k is None else acc.with_precision(_min_prec(acc.precision, k)))
    return MapGerm(out)


# -- Weierstrass reduction ----------------------------------------------------

def divide_by_x2_plus(g: Poly, h: Poly, k: Optional[int] = None):
    """Divide ``g`` by ``x^2 + h(y)`` as a polynomial in ``x`` (variables x, y).

    Returns ``(A, B, Q)`` with ``g = Q*(x^2+h) + A(y) + x*B(y)`` modulo
    ``m^(k+1)`` (exactly when ``k`` is None and ``g`` is exact).
    """
    if g.nvars != 2:
        raise ValueError("Weierstrass reduction is implemented for two variables")
    if any(m[0] for m in h.terms):
        raise ValueError("h must depend on y only")
    field = g.field
    prec = _min_prec(_min_prec(g.precision, h.precision), k)
    rem = dict(g.with_precision(prec).terms)
    quot: dict = {}
    add, mul, neg = field.add, field.mul, field.neg
    while True:
        high = [m for m in rem if m[0] >= 2]
        if not high:
            break
        top = max(m[0] for m in high)
        for m in [m for m in high if m[0] == top]:
            c = rem.pop(m)
            qm = (m[0] - 2, m[1])
            quot[qm] = add(quot.get(qm, field.zero), c)
            for hm, hc in h.terms.items():
                nm = (qm[0], qm[1] + hm[1])
                if prec is not None and sum(nm) > prec:
                    continue
                v = add(rem.get(nm, field.zero), neg(mul(c, hc)))
                if v == 0:
                    rem.pop(nm, None)
                else:
                    rem[nm] = v
    A = Poly(field, 2, {m: c for m, c in rem.items() if m[0] == 0}, prec)
    B = Poly(field, 2, {(0, m[1]): c for m, c in rem.items() if m[0] == 1},
             None if prec is None else prec - 1)
    Q = Poly(field, 2, quot, None if prec is None else prec - 2)
    return A, B, Q


def weierstrass_reduce(g: Poly, s: int, alpha, k: Optional[int] = None):
    """Remainder of ``g`` modulo ``x^2 + alpha*y^s`` in the shape ``A(y) + x*B(y)``.

    Returns ``(A, B, Q)``; ``Q`` is the quotient, kept so that callers can
    check ``g == Q*(x^2 + alpha*y^s) + A + x*B``.
    """
    field = g.field
    alpha = field.convert(alpha)
    h = Poly(field, 2, {(0, s): alpha} if alpha != 0 else {})
    return divide_by_x2_plus(g, h, k)


# -- Jacobians and minors -----------------------------------------------------

def jacobian(f: MapGerm) -> List[List[Poly]]:
    return [[c.derivative(j) for j in range(f.nvars)] for c in f.components]


def determinant(M: Sequence[Sequence[Poly]], k: Optional[int] = None) -> Poly:
    n = len(M)
    if n == 1:
        return M[0][0]
    field, nv = M[0][0].field, M[0][0].nvars
    total = Poly.zero(field, nv)
    for j in range(n):
        if M[0][j].is_zero():
            continue
        sub = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j].mul_trunc(determinant(sub, k), k)
        total = total + term if j % 2 == 0 else total - term
    return total


def minors(M: Sequence[Sequence[Poly]], r: int) -> List[Poly]:
    """All ``r x r`` minors, rows and columns in lexicographic order."""
    m, n = len(M), len(M[0])
    if not 1 <= r <= min(m, n):
        raise ValueError("minor size out of range")
    out = []
    for rows in itertools.combinations(range(m), r):
        for cols in itertools.combinations(range(n), r):
            out.append(determinant([[M[i][j] for j in cols] for i in rows]))
    return out


def hessian(f: Poly):
    field, n = f.field, f.nvars
    H = [[field.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            mono = [0] * n
            mono[i] += 1
            mono[j] += 1
            c = f.coeff(tuple(mono))
            H[i][j] = field.mul(c, field.from_int(2)) if i == j else c
    return H


def hessian_corank(f: Poly):
    """Return ``(corank, H)`` with ``H`` the Hessian at the origin."""
    H = hessian(f)
    return f.nvars - matrix_rank(f.field, H), H


def linear_part(f: Poly) -> List:
    n = f.nvars
    return [f.coeff(tuple(1 if j == i else 0 for j in range(n))) for i in range(n)]
