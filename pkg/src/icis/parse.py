"""Parser for the polynomial text grammar.

Variables are ``x``, ``y`` (also ``z``, ``w``) or ``x1`` ... ``x8``; integer
literals; operators ``+ - * ^`` and parentheses.  Factors must be joined
with ``*``: ``3x2y`` is rejected.  Germ components are separated by ``;``.
"""
from __future__ import annotations

import re
from typing import List, Optional, Sequence

from .coeff import Field
from .errors import ParseError, WrongVariableCount
from .poly import MAX_VARS, MapGerm, Poly

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\S))")
_ALIASES = {"x": 0, "y": 1, "z": 2, "w": 3}


def _var_index(name: str, names: Optional[Sequence[str]]) -> Optional[int]:
    if names is not None:
        return names.index(name) if name in names else None
    if name in _ALIASES:
        return _ALIASES[name]
    m = re.fullmatch(r"x([1-8])", name)
    if m:
        return int(m.group(1)) - 1
    return None


class _Parser:
    def __init__(self, text, field, nvars, names):
        self.text, self.field, self.nvars, self.names = text, field, nvars, names
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                break
            if m.group(0).strip():
                start = m.start(m.lastindex)
                kind = ("int", "name", "op")[m.lastindex - 1]
                self.tokens.append((kind, m.group(m.lastindex), start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> Poly:
        if not self.tokens:
            raise ParseError("empty expression", 0)
        p = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", pos)
        return p

    def expr(self) -> Poly:
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.factor()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "*":
                self.take()
                p = p * self.factor()
            elif kind in ("int", "name") or (kind == "op" and val == "("):
                raise ParseError("missing '*' between factors", pos)
            else:
                return p

    def factor(self) -> Poly:
        kind, val, pos = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            f = self.factor()
            return -f if val == "-" else f
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "int":
                raise ParseError("exponent must be a non-negative integer", pos)
            base = base ** int(val)
        return base

    def atom(self) -> Poly:
        kind, val, pos = self.take()
        if kind == "int":
            return Poly.constant(self.field, self.nvars, self.field.from_int(int(val)))
        if kind == "name":
            idx = _var_index(val, self.names)
            if idx is None:
                raise ParseError(f"unknown variable {val!r}", pos)
            if idx >= self.nvars:
                raise WrongVariableCount(f"variable {val!r} needs at least {idx + 1} variables")
            return Poly.var(self.field, self.nvars, idx)
        if kind == "op" and val == "(":
            p = self.expr()
            kind, val2, pos2 = self.take()
            if val2 != ")":
                raise ParseError("expected ')'", pos2)
            return p
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected {val!r}", pos)


def parse_poly(text: str, field: Field, nvars: int = 2, names: Optional[Sequence[str]] = None) -> Poly:
    """Parse one polynomial; coefficients are reduced into ``field``."""
    if nvars > MAX_VARS and names is None:
        raise WrongVariableCount(f"at most {MAX_VARS} variables")
    return _Parser(text, field, nvars, names).parse()


def infer_nvars(text: str) -> int:
    """Smallest variable count that covers every variable named in ``text``."""
    best = 1
    for m in re.finditer(r"[A-Za-z][A-Za-z0-9_]*", text):
        idx = _var_index(m.group(0), None)
        if idx is not None:
            best = max(best, idx + 1)
    return best


def parse_germ(text: str, field: Field, nvars: Optional[int] = None) -> MapGerm:
    """Parse ``"f1 ; f2 ; ..."``; ``nvars`` defaults to the number of components.

    Offsets in :class:`ParseError` refer to positions in the full text.
    """
    pieces: List[tuple] = []
    start = 0
    for chunk in text.split(";"):
        pieces.append((chunk, start))
        start += len(chunk) + 1
    if nvars is None:
        nvars = max(len(pieces), infer_nvars(text))
    comps = []
    for chunk, offset in pieces:
        try:
            comps.append(parse_poly(chunk, field, nvars))
        except ParseError as exc:
            raise ParseError(str(exc).rsplit(" at offset", 1)[0], exc.position + offset) from None
    if any(infer_nvars(c) > nvars for c, _ in pieces):
        raise WrongVariableCount("expression uses more variables than allowed")
    return MapGerm(comps)
