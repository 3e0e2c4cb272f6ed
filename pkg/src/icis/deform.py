"""Unfoldings with section and classification of their fibres."""
from __future__ import annotations

import csv
import io
import itertools
import json
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .classify import classify_icis
from .coeff import RationalField
from .errors import BudgetExceeded, InvalidParameters
from .jetalg import MonoVec, format_monovec, is_icis, t1sec_basis, tjurina_sec_result
from .poly import MapGerm, Poly
from .singtype import SingularityType

DEFAULT_BUDGET = 10 ** 6


@dataclass
class Unfolding:
    """``F_t = f + sum t_i g_i`` for monomial vectors ``g_i``."""

    base_germ: MapGerm
    basis: List[MonoVec]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def field(self):
        return self.base_germ.field

    def evaluate(self, t: Sequence) -> MapGerm:
        if len(t) != self.dim:
            raise ValueError(f"expected {self.dim} parameters, got {len(t)}")
        comps = [dict(c.terms) for c in self.base_germ.components]
        add = self.field.add
        for (mono, comp), ti in zip(self.basis, t):
            if ti == 0:
                continue
            v = add(comps[comp].get(mono, self.field.zero), ti)
            if v == 0:
                comps[comp].pop(mono, None)
            else:
                comps[comp][mono] = v
        n = self.base_germ.nvars
        return MapGerm([Poly(self.field, n, c) for c in comps])

    def describe(self, names=None) -> List[str]:
        return [format_monovec(mv, self.base_germ.m, names) for mv in self.basis]


def build_unfolding(f: MapGerm, filter_order2: bool = False,
                    basis: Optional[Sequence[MonoVec]] = None, k_cap=None) -> Unfolding:
    """Unfolding along a T^{1,sec} basis (or an explicitly given one).

    With ``filter_order2`` members of order one are dropped: deformations
    along them have an order-one component and reduce to hypersurfaces.
    """
    b = list(basis) if basis is not None else t1sec_basis(f, k_cap)
    if filter_order2:
        b = [mv for mv in b if sum(mv[0]) >= 2]
    return Unfolding(f, b)


def _e(x, y, c) -> MonoVec:
    return ((x, y), c)


def case_tree_unfolding(t: SingularityType, field) -> Unfolding:
    """The order-two unfoldings used in the simplicity proofs."""
    from .classify import normal_form_of

    f = normal_form_of(t, field)
    p = field.characteristic
    if t.tag == "F22_1":
        return Unfolding(f, [_e(0, 2, 0)])
    if t.tag == "F22_0":
        return Unfolding(f, [_e(1, 1, 0), _e(1, 1, 1)])
    if t.tag == "G5_0":
        b = [_e(0, 2, 0), _e(0, 2, 1), _e(1, 1, 1)]
        return Unfolding(f, b + ([_e(1, 2, 1)] if p == 3 else []))
    if t.tag == "G5_1":
        return Unfolding(f, [_e(0, 2, 0), _e(0, 2, 1), _e(1, 1, 1)])
    if t.tag == "G7":
        return Unfolding(f, [_e(0, 2, 0), _e(0, 3, 0), _e(0, 2, 1), _e(0, 3, 1), _e(1, 1, 1), _e(1, 2, 1)])
    return build_unfolding(f, filter_order2=True)


# -- fibre histograms ----------------------------------------------------------------

@dataclass
class HistogramEntry:
    type: SingularityType
    count: int
    example_t: tuple


@dataclass
class Histogram:
    entries: Dict[str, HistogramEntry] = dc_field(default_factory=dict)
    field: object = None

    def add(self, t: SingularityType, point) -> None:
        key = t.label()
        if key in self.entries:
            self.entries[key].count += 1
        else:
            self.entries[key] = HistogramEntry(t, 1, tuple(point))

    @property
    def total(self) -> int:
        return sum(e.count for e in self.entries.values())

    def types(self) -> List[SingularityType]:
        return [e.type for e in self.entries.values()]

    def rows(self):
        fmt = self.field.format if self.field is not None else str
        for key in sorted(self.entries):
            e = self.entries[key]
            yield (e.type.tag, json.dumps(e.type.param_dict(), sort_keys=True), e.count,
                   " ".join(fmt(v) for v in e.example_t))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["type", "params", "count", "example_t"])
        for row in self.rows():
            w.writerow(row)
        return buf.getvalue()

    def to_json(self) -> list:
        return [{"type": t, "params": json.loads(p), "count": c, "example_t": ex}
                for t, p, c, ex in self.rows()]


def _points_exhaustive(field, d, budget):
    if field.order is None:
        raise InvalidParameters("exhaustive enumeration needs a finite field")
    if field.order ** d > budget:
        raise BudgetExceeded(f"{field.order}^{d} fibres exceed the budget {budget}")
    return itertools.product(list(field.elements()), repeat=d)


def random_point(field, d, rng, height=1000):
    if isinstance(field, RationalField):
        return tuple(Fraction(rng.randint(-height, height), rng.randint(1, height)) for _ in range(d))
    return tuple(field.random(rng) for _ in range(d))


def enumerate_fibers(u: Unfolding, mode: str = "exhaustive", samples: int = 0, seed: int = 0,
                     budget: int = DEFAULT_BUDGET, k_cap=None) -> Histogram:
    """Classify every fibre (``exhaustive``) or ``samples`` random fibres."""
    field = u.field
    if mode == "exhaustive":
        points = _points_exhaustive(field, u.dim, budget)
    elif mode == "random":
        rng = random.Random(seed)
        points = (random_point(field, u.dim, rng) for _ in range(samples))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    hist = Histogram(field=field)
    for t in points:
        rep = classify_icis(u.evaluate(t), k_cap=k_cap, witness=False)
        hist.add(rep.type, t)
    return hist


@dataclass
class Violation:
    t: tuple
    tau_sec: int
    base: int


def semicontinuity_probe(u: Unfolding, samples: int, seed: int = 0, height: int = 1000,
                         points=None) -> List[Violation]:
    """Fibres with ``tau_sec(F_t) > tau_sec(f)``, each confirmed twice.

    Non-ICIS fibres are skipped.  A hit is recomputed with the reference
    elimination before it is reported.
    """
    from .jetalg import jet_quotient, tangent_image_generators

    base = tjurina_sec_result(u.base_germ).dim
    rng = random.Random(seed)
    if points is None:
        points = [random_point(u.field, u.dim, rng, height) for _ in range(samples)]
    out = []
    for t in points:
        g = u.evaluate(t)
        if not is_icis(g).icis:
            continue
        res = tjurina_sec_result(g)
        if res.dim <= base:
            continue
        q = jet_quotient(tangent_image_generators(g), g.nvars, g.m, res.stabilized_at, low=1,
                         reference=True)
        if q.dim > base:
            out.append(Violation(tuple(t), q.dim, base))
    return out
