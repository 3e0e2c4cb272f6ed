import random
from fractions import Fraction

import flint
import pytest

from helpers import GF2, GF3, GF7, QQ
from icis.coeff import make_field
from icis.linalg import echelon_pivots, flint_pivots, matrix_rank, pivot_columns, rank

GF4 = make_field(2, 2)


def _rand_rows(F, nrows, ncols, rng, density=0.3):
    rows = []
    for _ in range(nrows):
        r = {}
        for j in range(ncols):
            if rng.random() < density:
                v = F.random(rng, 7) if F.order is None else F.random(rng)
                if v != 0:
                    r[j] = v
        rows.append(r)
    return rows


@pytest.mark.parametrize("F", [QQ, GF2, GF3, GF7, GF4], ids=repr)
def test_three_routes_agree(F):
    rng = random.Random(3)
    for _ in range(60):
        nr, nc = rng.randint(1, 14), rng.randint(1, 14)
        rows = _rand_rows(F, nr, nc, rng)
        ref = echelon_pivots(F, rows, nc)
        assert pivot_columns(F, rows, nc) == ref
        if F.order is None or F.order == F.characteristic:
            assert flint_pivots(F, rows, nc) == ref


def test_rank_against_flint_dense():
    rng = random.Random(9)
    for _ in range(40):
        nr, nc = rng.randint(1, 10), rng.randint(1, 10)
        rows = _rand_rows(GF7, nr, nc, rng, 0.5)
        M = flint.nmod_mat([[r.get(j, 0) for j in range(nc)] for r in rows], 7)
        assert rank(GF7, rows, nc) == M.rank()
        rows_q = _rand_rows(QQ, nr, nc, rng, 0.5)
        v = lambda q: flint.fmpq(q.numerator, q.denominator)
        Mq = flint.fmpq_mat([[v(r.get(j, Fraction(0))) for j in range(nc)] for r in rows_q])
        assert rank(QQ, rows_q, nc) == Mq.rank()


def test_pivots_are_leftmost_greedy():
    # pivots = columns that are not combinations of earlier columns
    rows = [{0: 1, 1: 1}, {1: 1, 2: 1}]
    assert pivot_columns(GF2, rows, 3) == [0, 1]
    assert pivot_columns(QQ, [{1: Fraction(2)}, {1: Fraction(4)}], 3) == [1]


def test_matrix_rank_dense():
    assert matrix_rank(GF3, [[1, 2], [2, 1]]) == 1
    assert matrix_rank(QQ, [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(1)]]) == 2
    assert matrix_rank(GF2, [[0, 0], [0, 0]]) == 0
