import pytest

from helpers import GF2, GF5, QQ
from icis.errors import ParseError, WrongVariableCount
from icis.parse import parse_germ, parse_poly
from icis.poly import Poly


def test_basic_expression():
    f = parse_poly("x^2 + y^3 - 2*x*y^4", QQ)
    assert f.coeff((2, 0)) == 1 and f.coeff((0, 3)) == 1 and f.coeff((1, 4)) == -2
    assert parse_poly("  x ^ 2+y^3 ", QQ) == parse_poly("x^2+y^3", QQ)


def test_aliases():
    assert parse_poly("x1^2 + x2", QQ) == parse_poly("x^2 + y", QQ)
    f = parse_poly("x3*x1", QQ, 3)
    assert f.terms == {(1, 0, 1): 1}


def test_reduction_mod_p():
    assert parse_poly("x^2 - 2*x*y^4", GF2) == parse_poly("x^2", GF2)
    assert parse_poly("7*x", GF5) == parse_poly("2*x", GF5)


def test_germ_components():
    g = parse_germ("x^2 + y^3 ; x*y^3", QQ)
    assert g.m == 2 and g.nvars == 2
    assert g[1] == Poly.monomial(QQ, (1, 3), 1)


@pytest.mark.parametrize("bad, pos", [("x^^2", 2), ("3x2y", 1), ("x+", 2), ("x^-1", 2)])
def test_parse_errors(bad, pos):
    with pytest.raises(ParseError) as exc:
        parse_poly(bad, QQ)
    assert exc.value.position == pos


def test_germ_error_offsets_are_global():
    with pytest.raises(ParseError) as exc:
        parse_germ("x^2 ; y^^3", QQ)
    assert exc.value.position == 8


def test_wrong_variable_count():
    with pytest.raises(WrongVariableCount):
        parse_germ("x^2 + z ; y", QQ, 2)


def test_parentheses_and_powers():
    assert parse_poly("(x+y)^2", QQ) == parse_poly("x^2+2*x*y+y^2", QQ)
    assert parse_poly("-(x-y)", QQ) == parse_poly("y-x", QQ)
