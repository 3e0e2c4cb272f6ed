"""Exact linear algebra over the coefficient fields.

Three routes are provided:

* :func:`echelon_pivots` -- sparse row reduction written against the generic
  field interface. Works for every field, and is the reference route.
* :func:`pivot_columns` -- the fast route: sparse elimination specialised to
  machine integers mod p, and fraction-free integer rows over QQ.  The jet
  matrices are very sparse and banded, where this beats dense elimination.
* :func:`flint_pivots` -- dense elimination in FLINT (``nmod_mat`` /
  ``fmpq_mat``), used as an independent cross-check.

Rows are given as ``dict`` objects mapping column index to a nonzero value.
The pivot set returned by both routes is the set of leading columns of the
reduced row echelon form, i.e. leftmost columns win.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Dict, Iterable, List, Sequence

import flint

from .coeff import Field, PrimeField, RationalField

Row = Dict[int, object]


def echelon_pivots(field: Field, rows: Iterable[Row], ncols: int | None = None) -> List[int]:
    """Leading columns of the row space of ``rows`` (sorted)."""
    pivots: Dict[int, Row] = {}
    add, mul, neg, inv = field.add, field.mul, field.neg, field.inv
    for row in rows:
        row = {c: v for c, v in row.items() if v != 0}
        while row:
            c = min(row)
            prow = pivots.get(c)
            if prow is None:
                s = inv(row[c])
                pivots[c] = {k: mul(v, s) for k, v in row.items()}
                break
            factor = neg(row[c])
            for k, v in prow.items():
                nv = add(row.get(k, 0), mul(factor, v))
                if nv == 0:
                    row.pop(k, None)
                else:
                    row[k] = nv
    return sorted(pivots)


def echelon_rank(field: Field, rows: Iterable[Row], ncols: int | None = None) -> int:
    return len(echelon_pivots(field, rows, ncols))


def _to_flint(field: Field, rows: Sequence[Row], ncols: int):
    nrows = len(rows)
    if isinstance(field, PrimeField):
        flat = [0] * (nrows * ncols)
        for i, row in enumerate(rows):
            base = i * ncols
            for c, v in row.items():
                flat[base + c] = v
        return flint.nmod_mat(nrows, ncols, flat, field.p)
    flat = [flint.fmpq(0)] * (nrows * ncols)
    for i, row in enumerate(rows):
        base = i * ncols
        for c, v in row.items():
            v = Fraction(v)
            flat[base + c] = flint.fmpq(v.numerator, v.denominator)
    return flint.fmpq_mat(nrows, ncols, flat)


def _pivots_mod_p(p: int, rows: Iterable[Row]) -> List[int]:
    pivots: Dict[int, Row] = {}
    for row in rows:
        row = {c: v % p for c, v in row.items() if v % p}
        while row:
            c = min(row)
            prow = pivots.get(c)
            if prow is None:
                s = pow(row[c], -1, p)
                pivots[c] = {k: v * s % p for k, v in row.items()}
                break
            factor = p - row[c]
            for k, v in prow.items():
                nv = (row.get(k, 0) + factor * v) % p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return sorted(pivots)


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    return {k: v // g for k, v in row.items()}


def _pivots_rational(rows: Iterable[Row]) -> List[int]:
    """Fraction-free elimination: rows are scaled to primitive integer vectors."""
    pivots: Dict[int, Dict[int, int]] = {}
    for row in rows:
        den = lcm(*(Fraction(v).denominator for v in row.values())) if row else 1
        row = {c: int(Fraction(v) * den) for c, v in row.items() if v != 0}
        row = _primitive(row)
        while row:
            c = min(row)
            prow = pivots.get(c)
            if prow is None:
                pivots[c] = row
                break
            a, b = prow[c], row[c]
            g = gcd(a, b)
            a, b = a // g, b // g
            new = {k: a * v for k, v in row.items()}
            for k, v in prow.items():
                nv = new.get(k, 0) - b * v
                if nv:
                    new[k] = nv
                else:
                    new.pop(k, None)
            row = _primitive(new)
    return sorted(pivots)


def flint_pivots(field: Field, rows: Sequence[Row], ncols: int) -> List[int]:
    """Leading columns via dense FLINT elimination (prime fields and QQ)."""
    rows = [r for r in rows if r]
    if not rows or ncols == 0:
        return []
    if not isinstance(field, (PrimeField, RationalField)):
        return echelon_pivots(field, rows, ncols)
    mat = _to_flint(field, rows, ncols)
    red, rank = mat.rref()
    pivots = []
    col = 0
    for i in range(rank):
        while red[i, col] == 0:
            col += 1
        pivots.append(col)
        col += 1
    return pivots


def pivot_columns(field: Field, rows: Sequence[Row], ncols: int) -> List[int]:
    """Same contract as :func:`echelon_pivots`, specialised per field."""
    rows = [r for r in rows if r]
    if not rows or ncols == 0:
        return []
    if isinstance(field, PrimeField):
        return _pivots_mod_p(field.p, rows)
    if isinstance(field, RationalField):
        return _pivots_rational(rows)
    return echelon_pivots(field, rows, ncols)


def rank(field: Field, rows: Sequence[Row], ncols: int) -> int:
    rows = [r for r in rows if r]
    if not rows or ncols == 0:
        return 0
    return len(pivot_columns(field, rows, ncols))


def matrix_rank(field: Field, matrix: Sequence[Sequence[object]]) -> int:
    """Rank of a small dense matrix given as nested lists of raw values."""
    rows = [{j: v for j, v in enumerate(r) if v != 0} for r in matrix]
    return echelon_rank(field, rows)


def solve_unique(field: Field, matrix, rhs):
    """Solve a square nonsingular system exactly by Gauss-Jordan elimination."""
    n = len(matrix)
    aug = [list(matrix[i]) + [rhs[i]] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        aug[col], aug[piv] = aug[piv], aug[col]
        s = field.inv(aug[col][col])
        aug[col] = [field.mul(v, s) for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [field.sub(a, field.mul(f, b)) for a, b in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]
