"""A small Buchberger engine over GF(p) and QQ.

Polynomials are dicts ``{exponent tuple: coefficient}`` with coefficients
as ints mod p or Fractions.  Orders: ``degrevlex`` and block elimination
(degrevlex on the eliminated block first, then degrevlex on the rest).
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import BudgetExceeded

log = logging.getLogger(__name__)

Mono = Tuple[int, ...]
GPoly = Dict[Mono, object]

DEFAULT_MAX_PAIRS = 200_000
DEFAULT_MAX_BASIS = 5_000
DEFAULT_MAX_DEGREE = 64


def _revlex_key(m: Mono):
    return (sum(m), tuple(-e for e in reversed(m)))


@dataclass
class GBRing:
    """Polynomial ring for Gröbner computations.

    ``p`` is the characteristic (0 for QQ).  ``elim`` is the number of
    leading variables forming the eliminated block (0 = plain degrevlex).
    """
    names: Tuple[str, ...]
    p: int = 0
    elim: int = 0
    _keys: Dict[Mono, tuple] = dc_field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.names = tuple(self.names)
        if len(self.names) > 32:
            raise ValueError("at most 32 variables")

    @property
    def nvars(self) -> int:
        return len(self.names)

    def key(self, m: Mono):
        k = self._keys.get(m)
        if k is None:
            if self.elim:
                k = _revlex_key(m[:self.elim]) + _revlex_key(m[self.elim:])
            else:
                k = _revlex_key(m)
            self._keys[m] = k
        return k

    # -- coefficients ------------------------------------------------------------
    def c(self, v):
        if self.p:
            return int(v) % self.p
        return Fraction(v)

    def inv(self, v):
        return pow(v, -1, self.p) if self.p else 1 / v

    def norm(self, v):
        return v % self.p if self.p else v

    # -- polynomials ---------------------------------------------------------------
    def var(self, name: str) -> GPoly:
        i = self.names.index(name)
        return {tuple(1 if j == i else 0 for j in range(self.nvars)): self.c(1)}

    def lm(self, f: GPoly) -> Mono:
        return max(f, key=self.key)

    def monic(self, f: GPoly) -> GPoly:
        if not f:
            return f
        lc = f[self.lm(f)]
        if lc == 1:
            return f
        s = self.inv(lc)
        return {m: self.norm(v * s) for m, v in f.items()}

    def to_str(self, f: GPoly) -> str:
        """Terms in decreasing order, Singular style: ``a^4*b^2+c``."""
        if not f:
            return "0"
        out = []
        for m in sorted(f, key=self.key, reverse=True):
            v = f[m]
            if not self.p and v < 0:
                sign, v = "-", -v
            else:
                sign = "+"
            parts = [n if e == 1 else f"{n}^{e}" for n, e in zip(self.names, m) if e]
            if v != 1 or not parts:
                parts.insert(0, str(v))
            out.append((sign, "*".join(parts)))
        text = "".join(s + t for s, t in out)
        return text[1:] if text.startswith("+") else text

    def from_poly(self, poly, names: Sequence[str]) -> GPoly:
        """Convert an :class:`icis.poly.Poly` over GF(p)/QQ with variables ``names``."""
        idx = [self.names.index(n) if n in self.names else None for n in names]
        out: GPoly = {}
        for m, v in poly.terms.items():
            e = [0] * self.nvars
            for i, k in zip(idx, m):
                if i is None:
                    if k:
                        raise ValueError("polynomial uses a variable outside the ring")
                    continue
                e[i] += k
            out[tuple(e)] = self.c(v)
        return {m: v for m, v in out.items() if v != 0}


def _sub_mul(ring: GBRing, f: GPoly, c, shift: Mono, g: GPoly) -> None:
    """f -= c * x^shift * g, in place."""
    p = ring.p
    for m, v in g.items():
        mm = tuple(a + b for a, b in zip(m, shift))
        nv = f.get(mm, 0) - c * v
        if p:
            nv %= p
        if nv:
            f[mm] = nv
        else:
            f.pop(mm, None)


def _divides(a: Mono, b: Mono) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Mono, b: Mono) -> Mono:
    return tuple(max(x, y) for x, y in zip(a, b))


def normal_form(ring: GBRing, f: GPoly, basis: Sequence[GPoly], lms: Optional[Sequence[Mono]] = None) -> GPoly:
    """Fully reduced remainder of ``f`` modulo ``basis``."""
    if lms is None:
        lms = [ring.lm(g) for g in basis]
    f = dict(f)
    rem: GPoly = {}
    key = ring.key
    while f:
        m = max(f, key=key)
        c = f[m]
        for g, gm in zip(basis, lms):
            if _divides(gm, m):
                shift = tuple(x - y for x, y in zip(m, gm))
                _sub_mul(ring, f, ring.norm(c * ring.inv(g[gm])), shift, g)
                break
        else:
            rem[m] = c
            del f[m]
    return rem


def _spoly(ring, f, fm, g, gm):
    L = _lcm(fm, gm)
    s: GPoly = {}
    _sub_mul(ring, s, ring.norm(-ring.inv(f[fm])), tuple(x - y for x, y in zip(L, fm)), f)
    _sub_mul(ring, s, ring.inv(g[gm]), tuple(x - y for x, y in zip(L, gm)), g)
    return s


def buchberger(ring: GBRing, gens: Sequence[GPoly], max_pairs: int = DEFAULT_MAX_PAIRS,
               max_basis: int = DEFAULT_MAX_BASIS, max_degree: int = DEFAULT_MAX_DEGREE,
               strategy: str = "normal") -> List[GPoly]:
    """Reduced Gröbner basis (monic, sorted by leading monomial).

    ``strategy`` picks the next critical pair: ``normal`` takes the smallest
    lcm in the monomial order, ``sugar`` the smallest sugar degree first.
    """
    if strategy not in ("normal", "sugar"):
        raise ValueError(f"unknown strategy {strategy!r}")
    use_sugar = strategy == "sugar"
    G: List[GPoly] = []
    lms: List[Mono] = []
    sugar: List[int] = []
    pairs: list = []
    counter = 0
    processed = 0

    def push_pairs(k):
        nonlocal counter
        hk = lms[k]
        new = []
        for i in range(k):
            if G[i] is None:
                continue
            new.append((_lcm(lms[i], hk), i))
        # Gebauer-Moeller: drop (i, k) when some (j, k) has lcm dividing it strictly
        keep = []
        for L, i in new:
            coprime = all(a == 0 or b == 0 for a, b in zip(lms[i], hk))
            if coprime:
                continue
            if any(L2 != L and _divides(L2, L) for L2, _ in new):
                continue
            if any(L2 == L and j < i for L2, j in new):
                continue
            keep.append((L, i))
        # old pairs (i, j) made redundant by hk
        nonlocal pairs
        filtered = []
        for item in pairs:
            _, _, L, i, j = item
            if _divides(hk, L) and _lcm(lms[i], hk) != L and _lcm(lms[j], hk) != L:
                continue
            filtered.append(item)
        pairs = filtered
        heapq.heapify(pairs)
        for L, i in keep:
            counter += 1
            sg = max(sugar[i] + sum(L) - sum(lms[i]), sugar[k] + sum(L) - sum(hk))
            heapq.heappush(pairs, ((sg if use_sugar else 0, ring.key(L)), counter, L, i, k))

    def add(h, sg):
        k = len(G)
        hm = ring.lm(h)
        G.append(ring.monic(h))
        lms.append(hm)
        sugar.append(max(sg, max(sum(m) for m in h)))
        push_pairs(k)

    for g in gens:
        g = {m: ring.norm(v) for m, v in g.items() if ring.norm(v) != 0}
        if not g:
            continue
        live = [i for i in range(len(G)) if G[i] is not None]
        h = normal_form(ring, g, [G[i] for i in live], [lms[i] for i in live])
        if h:
            add(h, 0)
    while pairs:
        (sg, _), _, L, i, j = heapq.heappop(pairs)
        if G[i] is None or G[j] is None:
            continue
        processed += 1
        if processed > max_pairs:
            raise BudgetExceeded(f"more than {max_pairs} critical pairs")
        if sum(L) > max_degree:
            raise BudgetExceeded(f"pair degree {sum(L)} above the cap {max_degree}")
        s = _spoly(ring, G[i], lms[i], G[j], lms[j])
        live = [t for t in range(len(G)) if G[t] is not None]
        h = normal_form(ring, s, [G[t] for t in live], [lms[t] for t in live])
        if h:
            if len(live) + 1 > max_basis:
                raise BudgetExceeded(f"basis larger than {max_basis}")
            add(h, sg)
    return _reduce_basis(ring, [g for g in G if g is not None])


def _reduce_basis(ring: GBRing, G: List[GPoly]) -> List[GPoly]:
    G = [ring.monic(g) for g in G if g]
    lms = [ring.lm(g) for g in G]
    keep = [i for i in range(len(G))
            if not any(j != i and _divides(lms[j], lms[i]) and (lms[j] != lms[i] or j < i)
                       for j in range(len(G)))]
    G = [G[i] for i in keep]
    out = []
    for i, g in enumerate(G):
        others = G[:i] + G[i + 1:]
        out.append(ring.monic(normal_form(ring, g, others)))
    out.sort(key=lambda g: ring.key(ring.lm(g)))
    return out


def is_groebner(ring: GBRing, G: Sequence[GPoly]) -> bool:
    """Buchberger criterion: every S-polynomial reduces to zero."""
    lms = [ring.lm(g) for g in G]
    for i in range(len(G)):
        for j in range(i + 1, len(G)):
            if normal_form(ring, _spoly(ring, G[i], lms[i], G[j], lms[j]), G, lms):
                return False
    return True


def eliminate(ring: GBRing, gens: Sequence[GPoly], drop: Sequence[str], strategy: str = "sugar",
              **budget) -> Tuple[GBRing, List[GPoly]]:
    """Generators of ``I ∩ K[kept variables]``.

    Returns the ring of kept variables (degrevlex) and the reduced basis of
    the elimination ideal expressed in it.  Block orders are badly served by
    the normal strategy, so pairs are taken by sugar degree by default.
    """
    unknown = set(drop) - set(ring.names)
    if unknown:
        raise ValueError(f"not ring variables: {sorted(unknown)}")
    drop = [n for n in ring.names if n in set(drop)]
    kept = [n for n in ring.names if n not in set(drop)]
    order = drop + kept
    er = GBRing(tuple(order), ring.p, elim=len(drop))
    perm = [ring.names.index(n) for n in order]
    moved = [{tuple(m[i] for i in perm): v for m, v in g.items()} for g in gens]
    G = buchberger(er, moved, strategy=strategy, **budget)
    kr = GBRing(tuple(kept), ring.p)
    out = [{m[len(drop):]: v for m, v in g.items()} for g in G if all(not any(m[:len(drop)]) for m in g)]
    return kr, _reduce_basis(kr, out)


# -- the characteristic-2 reproduction ---------------------------------------------

REPRO_PARAMS = ("a", "b", "c", "d", "m0", "m1", "n0", "n1", "o", "s", "t", "u", "v", "u2", "z")
REPRO_ELIMINATE = ("m0", "m1", "n0", "n1", "o", "s", "t", "u", "v", "z")


def char2_equivalence_ideal():
    """Coefficient ideal of ``phi(f) - s h - t k`` and ``phi(g) - u h - v k``.

    ``f = x^2 + a xy``, ``g = c xy^2 + d y^3``, ``h = x^2 + b xy``, ``k = g``
    and ``phi: x -> m0 y + m1 x, y -> n0 y + n1 x``, plus the two
    invertibility conditions.  Returns ``(ring, generators)``.
    """
    from .coeff import make_field
    from .parse import parse_poly

    field = make_field(2)
    names = ("x", "y") + REPRO_PARAMS
    P = lambda s: parse_poly(s, field, len(names), names)
    f, g = P("x^2+a*x*y"), P("c*x*y^2+d*y^3")
    h, k = P("x^2+b*x*y"), P("c*x*y^2+d*y^3")
    phi = [P("m0*y+m1*x"), P("n0*y+n1*x")] + [P(n) for n in REPRO_PARAMS]
    F = f.substitute(phi) - P("s") * h - P("t") * k
    G = g.substitute(phi) - P("u") * h - P("v") * k
    ring = GBRing(REPRO_PARAMS, 2)
    gens = []
    for poly in (F, G):
        coeffs: Dict[Mono, GPoly] = {}
        for m, v in poly.terms.items():
            xy, rest = m[:2], m[2:]
            coeffs.setdefault(xy, {})[rest] = ring.c(v)
        for xy in sorted(coeffs, key=_revlex_key, reverse=True):
            c = {m: v for m, v in coeffs[xy].items() if v}
            if c:
                gens.append(c)
    extra = [
        ring.from_poly(P("(m0*n1-n0*m1)*o-1"), names),
        ring.from_poly(P("(s*v-u*t)*z-1"), names),
    ]
    return ring, gens + extra


REPRO_NAMES = ("a", "b", "c", "d")


def to_poly(ring: GBRing, g: GPoly, names: Sequence[str]):
    """An :class:`icis.poly.Poly` in the variables ``names`` of ``ring``."""
    from .coeff import make_field
    from .poly import Poly

    idx = [ring.names.index(n) for n in names]
    terms = {}
    for m, v in g.items():
        if any(e for i, e in enumerate(m) if i not in idx):
            raise ValueError("polynomial involves variables outside the requested set")
        terms[tuple(m[i] for i in idx)] = v
    field = make_field(ring.p)
    return Poly(field, len(names), terms)


def format_cas(poly, names: Sequence[str] = REPRO_NAMES) -> str:
    """Degrevlex-descending terms without spaces, e.g. ``a^4*b^2+c``."""
    ring = GBRing(tuple(names), poly.field.characteristic)
    return ring.to_str({m: ring.c(v) for m, v in poly.terms.items()})


def repro_char2_elimination(**budget):
    """Generator of the elimination ideal in GF(2)[a, b, c, d]."""
    ring, gens = char2_equivalence_ideal()
    kr, basis = eliminate(ring, gens, REPRO_ELIMINATE, **budget)
    keep = [g for g in basis
            if all(not e for m in g for n, e in zip(kr.names, m) if n not in REPRO_NAMES)]
    if len(keep) != 1:
        raise ValueError(f"expected a principal elimination ideal, got {len(keep)} generators")
    return to_poly(kr, keep[0], REPRO_NAMES)
