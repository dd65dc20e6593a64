"""Chern characters, Mukai vectors, and the Euler pairing on a K3 surface.

A Chern character is a triple (r, f, t): integer rank, divisor class f in the
Neron-Severi lattice, and rational degree-four part t whose denominator
divides 2.  The Mukai vector of (r, f, t) is (r, f, t + r); the sign and
normalization conventions used here are pinned by two anchor facts,

    euler_chi(ch(O), ch(O)) = 2          and
    mukai vector of (2, l, -5)  = (2, l, -3),

both exercised in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .lattice import DivisorClass, NSLattice, intersect

__all__ = [
    "ChernCharacter",
    "MukaiVector",
    "ch_to_mukai",
    "mukai_to_ch",
    "mukai_pairing",
    "euler_chi",
    "chi_sheaf",
    "twist",
    "frac_str",
    "sign_normalized",
    "line_bundle_ch",
    "point_ch",
    "ideal_sheaf_ch",
    "twisted_ideal_ch",
    "extension_ch",
    "standard_ch",
    "STANDARD_KINDS",
]


def _half_rational(value, what: str) -> Fraction:
    q = Fraction(value)
    if q.denominator not in (1, 2):
        raise ValueError(f"{what} must have denominator 1 or 2, got {q}")
    return q


@dataclass(frozen=True)
class ChernCharacter:
    """Exact Chern character (r, f, t) of a class on a K3 surface."""

    r: int
    f: DivisorClass
    t: Fraction

    def __post_init__(self):
        if not isinstance(self.r, int):
            raise ValueError(f"rank must be an integer, got {self.r!r}")
        object.__setattr__(self, "t", _half_rational(self.t, "ch_2"))

    @property
    def lattice(self) -> NSLattice:
        return self.f.lattice

    def __repr__(self) -> str:
        return f"ch({self.r}, {list(self.f.coords)}, {self.t})"


@dataclass(frozen=True)
class MukaiVector:
    """Mukai vector (r, f, s) with s = ch_2 + r."""

    r: int
    f: DivisorClass
    s: Fraction

    def __post_init__(self):
        if not isinstance(self.r, int):
            raise ValueError(f"rank must be an integer, got {self.r!r}")
        object.__setattr__(self, "s", _half_rational(self.s, "Mukai degree-four part"))

    @property
    def lattice(self) -> NSLattice:
        return self.f.lattice

    def __neg__(self) -> MukaiVector:
        return MukaiVector(-self.r, -self.f, -self.s)

    def __repr__(self) -> str:
        return f"v({self.r}, {list(self.f.coords)}, {self.s})"


def ch_to_mukai(c: ChernCharacter) -> MukaiVector:
    """Multiply by the square root of the Todd class: (r, f, t) -> (r, f, t + r)."""
    return MukaiVector(c.r, c.f, c.t + c.r)


def mukai_to_ch(v: MukaiVector) -> ChernCharacter:
    return ChernCharacter(v.r, v.f, v.s - v.r)


def mukai_pairing(v: MukaiVector, w: MukaiVector) -> Fraction:
    """The Mukai pairing <v, w> = f_v.f_w - r_v s_w - r_w s_v."""
    if v.lattice != w.lattice:
        raise ValueError("Mukai vectors live on different lattices")
    return Fraction(intersect(v.f, w.f)) - v.r * w.s - w.r * v.s


def euler_chi(a: ChernCharacter, b: ChernCharacter) -> Fraction:
    """chi(A, B) = sum (-1)^i dim Ext^i(A, B) = -<v(A), v(B)>."""
    return -mukai_pairing(ch_to_mukai(a), ch_to_mukai(b))


def chi_sheaf(c: ChernCharacter) -> Fraction:
    """Global Euler characteristic chi(F) = 2r + ch_2 on a K3 surface."""
    return 2 * c.r + c.t


def twist(c: ChernCharacter, x: DivisorClass) -> ChernCharacter:
    """Chern character of F tensored with the line bundle O(x)."""
    new_t = c.t + intersect(c.f, x) + c.r * (intersect(x, x) // 2)
    return ChernCharacter(c.r, c.f + c.r * x, new_t)


def frac_str(value) -> str:
    """Serialize an exact rational as "p/q" with q > 0 in lowest terms."""
    q = Fraction(value)
    return f"{q.numerator}/{q.denominator}"


def sign_normalized(v: MukaiVector) -> MukaiVector:
    """v or -v, whichever has its first nonzero entry of (r, f, s) positive."""
    for entry in (v.r, *v.f.coords, v.s):
        if entry > 0:
            return v
        if entry < 0:
            return -v
    return v


# ---------------------------------------------------------------------------
# standard classes


def line_bundle_ch(l: DivisorClass) -> ChernCharacter:
    """ch of the line bundle O(l): (1, l, l.l/2)."""
    return ChernCharacter(1, l, Fraction(l.square, 2))


def point_ch(lattice: NSLattice) -> ChernCharacter:
    """ch of the structure sheaf of a point: (0, 0, 1)."""
    return ChernCharacter(0, lattice.zero(), Fraction(1))


def ideal_sheaf_ch(lattice: NSLattice, n: int) -> ChernCharacter:
    """ch of the ideal sheaf of n points: (1, 0, -n)."""
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"number of points must be a non-negative integer, got {n!r}")
    return ChernCharacter(1, lattice.zero(), Fraction(-n))


def twisted_ideal_ch(l: DivisorClass, n: int) -> ChernCharacter:
    """ch of O(l) tensor I_Z for a length-n subscheme Z: (1, l, l.l/2 - n)."""
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"subscheme length must be a non-negative integer, got {n!r}")
    return ChernCharacter(1, l, Fraction(l.square, 2) - n)


def extension_ch(m: DivisorClass, l: DivisorClass, n: int) -> ChernCharacter:
    """ch of a rank-2 extension of O(l) I_Z by O(m): (2, m + l, m.m/2 + l.l/2 - n)."""
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"subscheme length must be a non-negative integer, got {n!r}")
    t = Fraction(m.square, 2) + Fraction(l.square, 2) - n
    ch = ChernCharacter(2, m + l, t)
    assert ch.t.denominator == 1, "sheaf classes have integral ch_2"
    return ch


STANDARD_KINDS = ("line_bundle", "twisted_ideal", "point", "ideal", "extension")


def standard_ch(kind: str, **params) -> ChernCharacter:
    """Dispatch to the named standard-class constructor.

    Kinds and their parameters:
      line_bundle(l), twisted_ideal(l, n), point(lattice), ideal(lattice, n),
      extension(m, l, n).
    """
    try:
        if kind == "line_bundle":
            return line_bundle_ch(params.pop("l"))
        if kind == "twisted_ideal":
            return twisted_ideal_ch(params.pop("l"), params.pop("n"))
        if kind == "point":
            return point_ch(params.pop("lattice"))
        if kind == "ideal":
            return ideal_sheaf_ch(params.pop("lattice"), params.pop("n"))
        if kind == "extension":
            return extension_ch(params.pop("m"), params.pop("l"), params.pop("n"))
    except KeyError as missing:
        raise ValueError(f"standard_ch kind {kind!r} is missing parameter {missing}") from None
    raise ValueError(f"unknown standard class kind {kind!r}; expected one of {STANDARD_KINDS}")
