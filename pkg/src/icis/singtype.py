"""Tagged classification outcomes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

SIMPLE_TAGS = ("A", "F", "F22_0", "F22_1", "G5_0", "G5_1", "G7", "H",
               "I0_odd", "I1_odd", "I0_even", "I1_even")
TAGS = SIMPLE_TAGS + ("NotSimple", "NotICIS")

PARAM_NAMES = {"A": ("k",), "F": ("m", "n"), "H": ("n",), "I0_odd": ("t",), "I1_odd": ("t",),
               "I0_even": ("q",), "I1_even": ("q",)}


@dataclass(frozen=True)
class SingularityType:
    tag: str
    params: Tuple[Tuple[str, int], ...] = ()
    reason: Optional[str] = field(default=None, compare=False)
    moduli: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown type tag {self.tag!r}")

    @property
    def simple(self) -> bool:
        return self.tag in SIMPLE_TAGS

    def param_dict(self) -> Dict[str, int]:
        return dict(self.params)

    def __getitem__(self, name):
        return self.param_dict()[name]

    def label(self) -> str:
        if not self.params:
            return self.tag
        return f"{self.tag}({','.join(str(v) for _, v in self.params)})"

    def __str__(self):
        if self.tag in ("NotSimple", "NotICIS") and self.reason:
            return f"{self.tag}: {self.reason}"
        return self.label()


def _p(tag, **kw):
    names = PARAM_NAMES.get(tag, ())
    return SingularityType(tag, tuple((n, int(kw[n])) for n in names))


def A(k): return _p("A", k=k)
def F(m, n): return _p("F", m=min(m, n), n=max(m, n))
def H(n): return _p("H", n=n)
def I0_odd(t): return _p("I0_odd", t=t)
def I1_odd(t): return _p("I1_odd", t=t)
def I0_even(q): return _p("I0_even", q=q)
def I1_even(q): return _p("I1_even", q=q)


G5_0 = SingularityType("G5_0")
G5_1 = SingularityType("G5_1")
G7 = SingularityType("G7")
F22_0 = SingularityType("F22_0")
F22_1 = SingularityType("F22_1")


def NotSimple(reason: str, moduli: bool = False) -> SingularityType:
    return SingularityType("NotSimple", (), reason, moduli)


def NotICIS(reason: str) -> SingularityType:
    return SingularityType("NotICIS", (), reason)


def from_label(text: str) -> SingularityType:
    """Parse labels such as ``F(3,4)``, ``G5_0``, ``I1_odd(6)`` or ``NotSimple``."""
    text = text.strip()
    if "(" in text:
        tag, rest = text.split("(", 1)
        vals = [int(v) for v in rest.rstrip(")").split(",") if v.strip()]
    else:
        tag, vals = text, []
    tag = tag.strip()
    if tag in ("NotSimple", "NotICIS"):
        return SingularityType(tag, (), None)
    names = PARAM_NAMES.get(tag, ())
    if len(vals) != len(names):
        raise ValueError(f"type {tag} takes {len(names)} parameter(s)")
    if tag == "F":
        return F(*vals)
    return SingularityType(tag, tuple(zip(names, vals)))
