"""Random germs and contact transformations shared by the tests."""
import random

from icis.classify import normal_form_of
from icis.coeff import make_field
from icis.jetalg import monomials_upto
from icis.linalg import matrix_rank
from icis.poly import MapGerm, Poly, apply_unit, substitute
from icis import singtype as T

QQ = make_field(0)
GF2, GF3, GF5, GF7 = (make_field(p) for p in (2, 3, 5, 7))


def rand_poly(F, n, lo, hi, rng, density=0.5, height=5):
    terms = {}
    for m in monomials_upto(n, hi):
        if sum(m) >= lo and rng.random() < density:
            c = F.random(rng, height) if F.order is None else F.random(rng)
            if c != 0:
                terms[m] = c
    return Poly(F, n, terms)


def rand_invertible(F, n, rng):
    while True:
        M = [[F.random(rng) if F.order else F.random(rng, 5) for _ in range(n)] for _ in range(n)]
        if matrix_rank(F, M) == n:
            return M


def rand_contact(f, rng, k, hi=3):
    """``U * (f o phi)`` for a random unit matrix ``U`` and automorphism ``phi``, cut at ``k``."""
    F, n, m = f.field, f.nvars, f.m
    L = rand_invertible(F, n, rng)
    phi = []
    for i in range(n):
        lin = Poly(F, n, {tuple(int(v == j) for v in range(n)): L[i][j]
                          for j in range(n) if L[i][j] != 0})
        phi.append(lin + rand_poly(F, n, 2, hi, rng))
    C = rand_invertible(F, m, rng)
    U = [[Poly.constant(F, n, C[i][j]) + rand_poly(F, n, 1, hi - 1, rng) for j in range(m)]
         for i in range(m)]
    g = MapGerm([substitute(c, phi, k) for c in f.components])
    g = apply_unit(U, g, k)
    return MapGerm([c.exact() for c in g.components])


def type_grid(p, small=False):
    """The simple types valid in characteristic ``p`` (parameters as in the tables)."""
    top = 5 if small else 8
    if p == 2:
        out = [T.F(m, n) for m in range(2, top + 1) for n in range(m, top + 1) if (m, n) != (2, 2)]
        return out + [T.F22_0, T.F22_1]
    out = [T.F(m, n) for m in range(2, top + 1) for n in range(m, top + 1)]
    out += [T.G5_0, T.G7] + ([T.G5_1] if p == 3 else [])
    out += [T.H(n) for n in range(3, top + 1)]
    out += [T.I0_odd(t) for t in range(4, top + 1)]
    out += [T.I1_odd(t) for t in range(4, top + 1) if p and t % p == 0]
    out += [T.I0_even(q) for q in range(3, top + 1)]
    out += [T.I1_even(q) for q in range(3, top + 1) if p and (2 * q + 3) % p == 0]
    return out


def nf(t, F):
    return normal_form_of(t, F)


# -- acceptance bookkeeping ----------------------------------------------------

CRITERIA = {}


class criterion:
    """Record one PASS/FAIL line for an acceptance criterion."""

    def __init__(self, num, title):
        self.num, self.title = num, title
        self.notes = []

    def note(self, text):
        self.notes.append(str(text))

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        extra = "; ".join(self.notes)
        if exc is not None:
            msg = str(exc).splitlines()[0] if str(exc) else exc_type.__name__
            extra = f"{extra}; {msg[:300]}" if extra else msg[:300]
        line = f"{status} criterion {self.num}: {self.title}" + (f" [{extra}]" if extra else "")
        CRITERIA[self.num] = line
        print(line)
        return False
