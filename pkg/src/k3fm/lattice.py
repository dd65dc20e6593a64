"""Exact intersection arithmetic on even lattices.

This module models the Neron-Severi lattice of a K3 surface: a free Z-module
of finite rank with an even symmetric integer Gram matrix.  Divisor classes
are integer coordinate vectors in the implied basis.  Everything is computed
in exact integer arithmetic; there are no floats anywhere in this package.

Geometric properties (ampleness, effectivity, vanishing of cohomology) are
never inferred from the numbers here.  They enter the package only as
declarations attached to a surface description, and the operations that need
them check their numeric necessary conditions and otherwise trust the
declarations.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "LatticeMismatchError",
    "NSLattice",
    "DivisorClass",
    "intersect",
    "degree",
    "chi_line",
]


class LatticeMismatchError(ValueError):
    """Raised when an operation mixes classes from incompatible lattices."""


def _check_int(value, what: str) -> int:
    # bool is an int subclass; accept it silently, reject floats and strings.
    if not isinstance(value, int):
        raise ValueError(f"{what} must be an integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class NSLattice:
    """A free Z-module with an even symmetric bilinear form, given by its Gram matrix.

    Even means every diagonal entry is even, so every class has even
    self-intersection.  No signature or definiteness condition is imposed.
    """

    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(
            tuple(_check_int(e, f"gram entry ({i},{j})") for j, e in enumerate(row))
            for i, row in enumerate(self.gram)
        )
        object.__setattr__(self, "gram", rows)
        n = len(rows)
        if n == 0:
            raise ValueError("gram matrix must have positive rank")
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError(f"gram matrix is not square: row {i} has length {len(row)}, expected {n}")
        for i in range(n):
            if rows[i][i] % 2 != 0:
                raise ValueError(
                    f"gram diagonal entry ({i},{i}) = {rows[i][i]} is odd; an even lattice is required"
                )
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"gram matrix is not symmetric at ({i},{j})")

    @property
    def rank(self) -> int:
        return len(self.gram)

    def zero(self) -> DivisorClass:
        return DivisorClass(self, (0,) * self.rank)

    def basis(self, i: int) -> DivisorClass:
        coords = [0] * self.rank
        coords[i] = 1
        return DivisorClass(self, tuple(coords))

    def cls(self, coords) -> DivisorClass:
        return DivisorClass(self, tuple(coords))

    def __repr__(self) -> str:
        return f"NSLattice({[list(r) for r in self.gram]})"


@dataclass(frozen=True)
class DivisorClass:
    """An integral divisor class: integer coordinates in a fixed NSLattice basis."""

    lattice: NSLattice
    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(_check_int(c, "divisor coordinate") for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) != self.lattice.rank:
            raise LatticeMismatchError(
                f"coordinate vector has length {len(coords)}, lattice rank is {self.lattice.rank}"
            )

    def _require_same_lattice(self, other: DivisorClass) -> None:
        if self.lattice != other.lattice:
            raise LatticeMismatchError("classes belong to different lattices")

    def __add__(self, other: DivisorClass) -> DivisorClass:
        self._require_same_lattice(other)
        return DivisorClass(self.lattice, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: DivisorClass) -> DivisorClass:
        self._require_same_lattice(other)
        return DivisorClass(self.lattice, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> DivisorClass:
        return DivisorClass(self.lattice, tuple(-a for a in self.coords))

    def __mul__(self, scalar: int) -> DivisorClass:
        if not isinstance(scalar, int):
            return NotImplemented
        return DivisorClass(self.lattice, tuple(scalar * a for a in self.coords))

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coords)

    @property
    def square(self) -> int:
        return intersect(self, self)

    def __repr__(self) -> str:
        return f"DivisorClass({list(self.coords)})"


def intersect(x: DivisorClass, y: DivisorClass) -> int:
    """Intersection number x.y computed from the Gram matrix."""
    x._require_same_lattice(y)
    gram = x.lattice.gram
    total = 0
    for i, xi in enumerate(x.coords):
        if xi == 0:
            continue
        row = gram[i]
        total += xi * sum(g * yj for g, yj in zip(row, y.coords))
    return total


def degree(x: DivisorClass, h: DivisorClass) -> int:
    """Degree of x against the polarization h, i.e. the intersection number x.h."""
    return intersect(x, h)


def chi_line(x: DivisorClass) -> int:
    """Euler characteristic of the line bundle O(x) on a K3 surface: 2 + x.x/2.

    Always an integer because the lattice is even.
    """
    sq = intersect(x, x)
    # even lattice: diagonal even and off-diagonal terms counted twice
    assert sq % 2 == 0, "self-intersection must be even in an even lattice"
    return 2 + sq // 2
