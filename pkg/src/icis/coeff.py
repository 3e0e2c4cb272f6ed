"""Exact coefficient fields: the rationals and finite fields GF(p^k).

Elements are stored as plain Python values so that the polynomial kernels can
work on them without wrapper overhead:

* ``Q``        -- :class:`fractions.Fraction`
* ``GF(p)``    -- ``int`` in ``range(p)``
* ``GF(p^k)``  -- ``int`` in ``range(p**k)`` whose base-``p`` digits are the
  coefficients of the residue polynomial (digit ``i`` is the coefficient of
  ``X^i``) modulo the field's irreducible modulus.

:class:`FieldElem` wraps a value together with its field for callers that
prefer operator syntax.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional, Sequence, Tuple

from .errors import NonPrimeCharacteristic, NoRoot


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# --- polynomials over GF(p) as coefficient lists, lowest degree first -------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, m, p):
    a = list(a)
    inv_lead = pow(m[-1], p - 2, p)
    dm = len(m) - 1
    while len(_trim(a)) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
    return a


def _pmulmod(a, b, m, p):
    out = [0] * (len(a) + len(b) - 1 if a and b else 0)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pmod(out, m, p)


def _ppowmod(a, e, m, p):
    result = [1]
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _trim(_pmod(a, b, p))
    return a


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Rabin's irreducibility test for a monic polynomial over GF(p).

    ``modulus`` lists coefficients lowest degree first.
    """
    k = len(modulus) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    x = [0, 1]
    if _trim(_pmod(_ppowmod(x, p ** k, modulus, p), modulus, p)) != _trim(_pmod(x, modulus, p)):
        return False
    for r in {q for q in range(2, k + 1) if k % q == 0 and is_prime(q)}:
        h = _ppowmod(x, p ** (k // r), modulus, p)
        h = h + [0] * max(0, 2 - len(h))
        h[1] = (h[1] - 1) % p
        g = _pgcd(modulus, h, p)
        if len(g) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def canonical_modulus(p: int, k: int) -> Tuple[int, ...]:
    """Lexicographically smallest monic irreducible polynomial of degree k.

    Candidates are ordered by the tuple (c_{k-1}, ..., c_0) of their non-leading
    coefficients.
    """
    for tail in itertools.product(range(p), repeat=k):
        coeffs = tuple(reversed(tail)) + (1,)
        if coeffs[0] == 0:
            continue
        if is_irreducible(coeffs, p):
            return coeffs
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class Field:
    """Common interface; see the concrete subclasses."""

    characteristic: int
    degree: int
    modulus: Optional[Tuple[int, ...]]
    zero = 0
    one = 1

    @property
    def order(self) -> Optional[int]:
        return None

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def elem(self, value) -> "FieldElem":
        return FieldElem(self, self.convert(value))

    def __call__(self, value) -> "FieldElem":
        return self.elem(value)

    def sort_key(self, a):
        return a

    def nth_root(self, a, r: int):
        """Canonical r-th root of ``a`` (raw value); raises :class:`NoRoot`."""
        raise NotImplementedError


class RationalField(Field):
    characteristic = 0
    degree = 1
    modulus = None
    zero = Fraction(0)
    one = Fraction(1)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def convert(self, value):
        if isinstance(value, FieldElem):
            value = value.value
        return Fraction(value)

    def from_int(self, n: int):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def div(self, a, b):
        return a / b

    def random(self, rng: random.Random, height: int = 1000):
        num = rng.randint(-height, height)
        den = rng.randint(1, height)
        return Fraction(num, den)

    def format(self, a) -> str:
        return str(a)

    def sort_key(self, a):
        return (abs(a), a < 0)

    def nth_root(self, a, r: int):
        a = Fraction(a)
        if r < 1:
            raise ValueError("root order must be positive")
        if a == 0:
            return Fraction(0)
        if a < 0 and r % 2 == 0:
            raise NoRoot(f"{a} has no real square-type root of order {r}")
        sign = -1 if a < 0 else 1
        num = _int_root(abs(a.numerator), r)
        den = _int_root(a.denominator, r)
        if num is None or den is None:
            raise NoRoot(f"{a} is not an exact {r}-th power in QQ")
        return Fraction(sign * num, den)


def _int_root(n: int, r: int) -> Optional[int]:
    if n < 2:
        return n
    lo, hi = 1, 1 << (n.bit_length() // r + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** r < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** r == n else None


class PrimeField(Field):
    degree = 1
    modulus = None

    def __init__(self, p: int):
        self.characteristic = p
        self.p = p

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p, 1))

    @property
    def order(self):
        return self.p

    def convert(self, value):
        if isinstance(value, FieldElem):
            value = value.value
        if isinstance(value, Fraction):
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    def from_int(self, n: int):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def elements(self) -> Iterator[int]:
        return iter(range(self.p))

    def random(self, rng: random.Random, height=None):
        return rng.randrange(self.p)

    def format(self, a) -> str:
        return str(a)

    def nth_root(self, a, r: int):
        return _finite_root(self, a, r)


class ExtensionField(Field):
    """GF(p^k) for k >= 2, presented by the canonical modulus.

    Multiplication uses exponential/logarithm tables over a primitive element
    for fields of order up to 2**16; larger fields multiply residues directly.
    """

    TABLE_LIMIT = 1 << 16

    def __init__(self, p: int, k: int):
        self.characteristic = p
        self.p = p
        self.degree = k
        self.modulus = canonical_modulus(p, k)
        self.q = p ** k
        self._exp = self._log = None
        if self.q <= self.TABLE_LIMIT:
            self._build_tables()

    def __repr__(self):
        return f"GF({self.p}^{self.degree})"

    def __eq__(self, other):
        return (isinstance(other, ExtensionField) and other.p == self.p
                and other.degree == self.degree)

    def __hash__(self):
        return hash(("GF", self.p, self.degree))

    @property
    def order(self):
        return self.q

    # encoding helpers
    def _digits(self, a: int):
        out = []
        for _ in range(self.degree):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def _undigits(self, ds) -> int:
        v = 0
        for d in reversed(list(ds)[: self.degree]):
            v = v * self.p + d
        return v

    def _slow_mul(self, a, b):
        prod = _pmulmod(self._digits(a), self._digits(b), list(self.modulus), self.p)
        return self._undigits(prod + [0] * (self.degree - len(prod)))

    def _build_tables(self):
        q = self.q
        for g in range(2, q):
            exp = [1] * (q - 1)
            cur = 1
            ok = True
            for i in range(1, q - 1):
                cur = self._slow_mul(cur, g)
                if cur == 1:
                    ok = False
                    break
                exp[i] = cur
            if ok:
                log = [0] * q
                for i, v in enumerate(exp):
                    log[v] = i
                self._exp, self._log = exp, log
                return
        raise AssertionError("no primitive element")  # pragma: no cover

    def convert(self, value):
        if isinstance(value, FieldElem):
            value = value.value
        if isinstance(value, Fraction):
            return self.div(self.from_int(value.numerator), self.from_int(value.denominator))
        if isinstance(value, (tuple, list)):
            return self._undigits([c % self.p for c in value])
        return self.from_int(int(value))

    def from_int(self, n: int):
        return n % self.p

    def generator(self) -> int:
        """The residue class of X."""
        return self.p

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        p, out, place = self.p, 0, 1
        while a or b:
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            out += ((ra + rb) % p) * place
            place *= p
        return out

    def neg(self, a):
        if self.p == 2:
            return a
        return self._undigits([-d % self.p for d in self._digits(a)])

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return self._slow_mul(a, b)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self._exp is not None:
            return self._exp[(-self._log[a]) % (self.q - 1)]
        return self.pow(a, self.q - 2)

    def elements(self) -> Iterator[int]:
        return iter(range(self.q))

    def random(self, rng: random.Random, height=None):
        return rng.randrange(self.q)

    def format(self, a) -> str:
        if a < self.p:
            return str(a)
        terms = []
        for i, d in reversed(list(enumerate(self._digits(a)))):
            if d == 0:
                continue
            mono = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            if not mono:
                terms.append(str(d))
            else:
                terms.append(mono if d == 1 else f"{d}*{mono}")
        return "(" + "+".join(terms) + ")"

    def nth_root(self, a, r: int):
        return _finite_root(self, a, r)


def _finite_root(field: Field, a, r: int):
    if r < 1:
        raise ValueError("root order must be positive")
    if a == 0:
        return 0
    q = field.order
    if q <= 1 << 16:
        for b in field.elements():
            if field.pow(b, r) == a:
                return b
        raise NoRoot(f"{field.format(a)} has no {r}-th root in {field!r}")
    # Large fields: only the coprime-exponent case is solved in closed form.
    from math import gcd
    if gcd(r, q - 1) == 1 and r % field.characteristic != 0:
        return field.pow(a, pow(r, -1, q - 1))
    raise NoRoot(f"root extraction not supported in {field!r} for r={r}")


QQ = RationalField()


@lru_cache(maxsize=None)
def make_field(p: int, k: int = 1) -> Field:
    """Return the field of characteristic ``p`` (0 means QQ) and degree ``k``.

    >>> make_field(2, 3).modulus
    (1, 1, 0, 1)
    """
    if p < 0 or k < 1:
        raise ValueError("need p >= 0 and k >= 1")
    if p == 0:
        return QQ
    if not is_prime(p):
        raise NonPrimeCharacteristic(f"characteristic {p} is not prime")
    if k == 1:
        return PrimeField(p)
    return ExtensionField(p, k)


# Alias matching the FieldSpec naming used in reports.
FieldSpec = Field


@dataclass(frozen=True)
class FieldElem:
    """A field value tagged with its field; supports the usual operators."""

    field: Field
    value: object

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other.value
        return self.field.convert(other)

    def __add__(self, other):
        return FieldElem(self.field, self.field.add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElem(self.field, self.field.sub(self.value, self._coerce(other)))

    def __rsub__(self, other):
        return FieldElem(self.field, self.field.sub(self._coerce(other), self.value))

    def __mul__(self, other):
        return FieldElem(self.field, self.field.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElem(self.field, self.field.div(self.value, self._coerce(other)))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.pow(self.value, e))

    def inverse(self):
        return FieldElem(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field.convert(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return self.field.format(self.value)


def nth_root(a: FieldElem, r: int) -> FieldElem:
    """Canonical ``r``-th root of ``a`` inside its field.

    Among all roots the smallest one in the field's canonical ordering is
    returned (integer encoding for finite fields, positive before negative
    over QQ). Raises :class:`NoRoot` when no root exists.
    """
    return FieldElem(a.field, a.field.nth_root(a.value, r))
