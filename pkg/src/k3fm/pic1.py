"""Rank-2 transforms over a rank-1 ample lattice: existence and solver.

Existence requires the generator's square to be 4 mod 8; writing it as
4(2n+1) fixes z = 2n+3 and the transform matrix in scalar coordinates
(r, coefficient of the generator, ch2) is

    [[z,     -lsq,   2  ],
     [c,      x,    -1  ],
     [alpha,  y*lsq, z-4]]

subject to four integer constraints: the matrix sends (2, 1, z-4) to
(0, 0, 1) (rows two and three; row one is an identity), the self-pairing
of the image of the trivial class is preserved (eq_oo below), and the
rank of the round trip of the trivial class is 1.  solve_constraints
derives both closed-form solutions; brute_force_oracle re-finds them by
scanning c and solving the remaining unknowns exactly, then checking
every constraint, so the two paths share no algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .lattice import NSLattice
from .mukai import frac_str
from .transform import CohTransform

__all__ = [
    "Pic1Solution",
    "ExclusionWitness",
    "existence_test",
    "residuals",
    "solve_constraints",
    "select_physical",
    "exclusion_witness",
    "brute_force_oracle",
    "transform_from_solution",
]


def _det3(m) -> int:
    (a, b, c), (d, e, f), (g, h, i) = m
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _matrix_for(lsq: int, z: int, c: int, x: int, alpha: int, y: int):
    return (
        (z, -lsq, 2),
        (c, x, -1),
        (alpha, y * lsq, z - 4),
    )


@dataclass(frozen=True)
class Pic1Solution:
    """One integer solution of the rank-1 constraint system.

    Invariants checked on construction: x, alpha, y match their closed
    forms in c, (z+2c)^2 = 1, all four constraint residuals vanish, and
    the matrix sends (2, 1, z-4) to (0, 0, 1).
    """

    n: int
    lsq: int
    z: int
    c: int
    x: int
    alpha: int
    y: int
    matrix: tuple[tuple[int, ...], ...]
    det: int

    def __post_init__(self):
        if self.lsq != 4 * (2 * self.n + 1) or self.z != 2 * self.n + 3:
            raise ValueError("lsq and z do not match n")
        if (self.z + 2 * self.c) ** 2 != 1:
            raise ValueError(f"(z+2c)^2 = {(self.z + 2 * self.c) ** 2}, expected 1")
        if self.x != self.z - 4 - 2 * self.c:
            raise ValueError("x does not satisfy x = z-4-2c")
        if self.alpha != 2 * self.c * (2 + self.c):
            raise ValueError("alpha does not satisfy alpha = 2c(2+c)")
        if self.y != self.c + 2:
            raise ValueError("y does not satisfy y = c+2")
        if any(r != 0 for r in residuals(self.n, self.c, self.x, self.alpha, self.y)):
            raise ValueError("constraint residuals do not vanish")
        if self.matrix != _matrix_for(self.lsq, self.z, self.c, self.x, self.alpha, self.y):
            raise ValueError("matrix entries do not match the scalar coordinates")
        if self.det != _det3(self.matrix):
            raise ValueError("stored determinant is wrong")
        image = tuple(
            row[0] * 2 + row[1] * 1 + row[2] * (self.z - 4) for row in self.matrix
        )
        if image != (0, 0, 1):
            raise ValueError(f"matrix maps (2, 1, z-4) to {image}, expected (0, 0, 1)")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "lsq": self.lsq,
            "z": self.z,
            "c": self.c,
            "x": self.x,
            "alpha": self.alpha,
            "y": self.y,
            "matrix": [list(row) for row in self.matrix],
            "det": self.det,
        }


@dataclass(frozen=True)
class ExclusionWitness:
    """Slope obstruction against the determinant -1 solution.

    The excluded transform would force a locally-free object of slope
    (n+2)/(2n+3) * lsq sitting inside objects of slope lsq/2, violating
    stability of exceptional bundles over a rank-1 Picard lattice.
    """

    slope: Fraction
    threshold: Fraction
    excluded: bool

    def to_dict(self) -> dict:
        return {
            "slope": frac_str(self.slope),
            "threshold": frac_str(self.threshold),
            "excluded": self.excluded,
        }


def existence_test(lsq: int) -> int | None:
    """n with lsq = 4(2n+1) when lsq is 4 mod 8, else None.

    The generator of a rank-1 ample even lattice has positive even square;
    anything else is an input error, not a negative answer.
    """
    if not isinstance(lsq, int) or isinstance(lsq, bool):
        raise ValueError("lsq must be an integer")
    if lsq <= 0 or lsq % 2 != 0:
        raise ValueError(f"lsq must be a positive even integer, got {lsq}")
    if lsq % 8 != 4:
        return None
    return (lsq - 4) // 8


def residuals(n: int, c: int, x: int, alpha: int, y: int, oo_rhs: int = 2):
    """The four constraint residuals; all zero exactly at a solution.

    oo_rhs parametrizes the right-hand side of the pairing constraint so
    that tests can verify the perturbed system is inconsistent.
    """
    lsq = 4 * (2 * n + 1)
    z = 2 * n + 3
    row2 = 2 * c + x - (z - 4)
    row3 = 2 * alpha + y * lsq + (z - 4) ** 2 - 1
    oo = 2 * z * alpha - 4 * c * c * (z - 2) + 2 * z * z - oo_rhs
    rank_rt = 2 * alpha + 4 * c * (z - 2) + z * (z - 4) + 4 * z - 1
    return (row2, row3, oo, rank_rt)


def _solution(n: int, c: int) -> Pic1Solution:
    lsq = 4 * (2 * n + 1)
    z = 2 * n + 3
    x = z - 4 - 2 * c
    alpha = 2 * c * (2 + c)
    y = c + 2
    matrix = _matrix_for(lsq, z, c, x, alpha, y)
    return Pic1Solution(
        n=n, lsq=lsq, z=z, c=c, x=x, alpha=alpha, y=y, matrix=matrix, det=_det3(matrix)
    )


def solve_constraints(n: int) -> tuple[Pic1Solution, Pic1Solution]:
    """Both closed-form solutions, c = -n-1 first, then c = -n-2."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n}")
    return (_solution(n, -n - 1), _solution(n, -n - 2))


def select_physical(pair: tuple[Pic1Solution, Pic1Solution]) -> Pic1Solution:
    """The determinant +1 solution; the other is excluded by stability."""
    for sol in pair:
        if sol.det == 1:
            return sol
    raise ValueError("no determinant +1 solution in the pair")


def exclusion_witness(pair: tuple[Pic1Solution, Pic1Solution]) -> ExclusionWitness:
    """Rational slope witness excluding the determinant -1 solution."""
    n = pair[0].n
    lsq = pair[0].lsq
    slope = Fraction(n + 2, 2 * n + 3) * lsq
    threshold = Fraction(lsq, 2)
    return ExclusionWitness(slope=slope, threshold=threshold, excluded=slope > threshold)


def brute_force_oracle(n: int, bound: int, oo_rhs: int = 2) -> list[Pic1Solution]:
    """Independent search for all constraint solutions.

    Scans c over [-bound, bound] (descending, matching solve_constraints
    order) and, for each c, derives x linearly, alpha by exact division
    from the pairing constraint and y by exact division from the third
    image row, discarding candidates with non-integral steps or |x| above
    the bound; every surviving candidate is re-checked against all four
    residuals.  alpha and y are derived rather than scanned because they
    grow quadratically in n while the interesting range of c and x is
    linear; the derivation is exact, so no solution with |c|, |x| within
    the bound can be missed.
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n}")
    if bound < 4 * n + 8:
        raise ValueError(
            f"bound {bound} is inconclusive for n = {n}; need at least {4 * n + 8}"
        )
    lsq = 4 * (2 * n + 1)
    z = 2 * n + 3
    found = []
    for c in range(bound, -bound - 1, -1):
        x = z - 4 - 2 * c
        if abs(x) > bound:
            continue
        num_alpha = oo_rhs - 2 * z * z + 4 * c * c * (z - 2)
        if num_alpha % (2 * z) != 0:
            continue
        alpha = num_alpha // (2 * z)
        num_y = 1 - (z - 4) ** 2 - 2 * alpha
        if num_y % lsq != 0:
            continue
        y = num_y // lsq
        if any(r != 0 for r in residuals(n, c, x, alpha, y, oo_rhs)):
            continue
        matrix = _matrix_for(lsq, z, c, x, alpha, y)
        found.append(
            Pic1Solution(
                n=n, lsq=lsq, z=z, c=c, x=x, alpha=alpha, y=y,
                matrix=matrix, det=_det3(matrix),
            )
        )
    return found


def transform_from_solution(sol: Pic1Solution) -> CohTransform:
    """Lift a scalar solution to a transform over the rank-1 lattice."""
    lattice = NSLattice(((sol.lsq,),))
    return CohTransform(
        source=lattice,
        target=lattice,
        matrix=tuple(tuple(Fraction(v) for v in row) for row in sol.matrix),
        labels=(("n", sol.n),),
    )
