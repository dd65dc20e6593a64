"""Rank-2 transform kernels and their existence conditions.

A kernel is described by four divisor classes (a, b, c, d) on a common
lattice.  The induced map on Chern characters is well defined for any such
quadruple, but the transform only arises from an actual equivalence when
the quadruple satisfies arithmetic constraints:

  (1) a + b == c + d,
  (2) (a - c)^2 == -4  (equivalently chi of the line bundle a-c is 0),
  (3) the class a - c (up to sign) carries a declared cohomology-vanishing
      assumption,
  (4) the same facts for b - d, which follow from (1)-(3).

check_sufficient evaluates these and reports a verdict.  Conditions (1)
and (2) are decidable from the lattice alone; (3) is geometric input that
must be declared on the surface, so the verdict distinguishes "sufficient"
(all four) from "numerically-consistent" (lattice conditions hold, no
declaration) and "fails".
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lattice import DivisorClass, chi_line
from .surface import SurfaceSpec

__all__ = [
    "KernelSpec",
    "ValidityReport",
    "vanishing_covers",
    "check_sufficient",
    "check_necessary_det",
    "normalize_twist",
    "check_phiO_identity",
]


@dataclass(frozen=True)
class KernelSpec:
    """The four classes cutting out a rank-2 kernel, plus optional context.

    declared_vanishing lists classes whose line bundles are declared to have
    no cohomology; it feeds condition (3) of check_sufficient.
    """

    a: DivisorClass
    b: DivisorClass
    c: DivisorClass
    d: DivisorClass
    declared_vanishing: tuple[DivisorClass, ...] = ()
    source: SurfaceSpec | None = field(default=None, compare=False)
    target: SurfaceSpec | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "declared_vanishing", tuple(self.declared_vanishing))
        lat = self.a.lattice
        for name, dc in (("b", self.b), ("c", self.c), ("d", self.d)):
            if dc.lattice != lat:
                raise ValueError(f"kernel class {name} lives on a different lattice")
        for dc in self.declared_vanishing:
            if dc.lattice != lat:
                raise ValueError("declared vanishing class lives on a different lattice")

    @property
    def lattice(self):
        return self.a.lattice

    def to_dict(self) -> dict:
        return {
            "a": list(self.a.coords),
            "b": list(self.b.coords),
            "c": list(self.c.coords),
            "d": list(self.d.coords),
        }


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of the existence check for a kernel quadruple."""

    ab_equals_cd: bool
    ab: tuple[int, ...]
    cd: tuple[int, ...]
    ac: tuple[int, ...]
    ac_square: int
    chi_ac: int
    ac_square_ok: bool
    vanishing_declared: bool
    bd: tuple[int, ...]
    bd_square: int
    chi_bd: int
    verdict: str

    def to_dict(self) -> dict:
        return {
            "sum_condition": {
                "holds": self.ab_equals_cd,
                "a_plus_b": list(self.ab),
                "c_plus_d": list(self.cd),
            },
            "difference_condition": {
                "holds": self.ac_square_ok,
                "a_minus_c": list(self.ac),
                "square": self.ac_square,
                "chi": self.chi_ac,
            },
            "vanishing_declared": self.vanishing_declared,
            "dual_difference": {
                "b_minus_d": list(self.bd),
                "square": self.bd_square,
                "chi": self.chi_bd,
            },
            "verdict": self.verdict,
        }


def vanishing_covers(kernel: KernelSpec, x: DivisorClass) -> bool:
    """Whether x or -x carries a declared cohomology-vanishing assumption.

    Vanishing of all cohomology of a line bundle is preserved under
    dualizing on a surface with trivial canonical class, so a declaration
    for either sign covers both.
    """
    return any(v == x or v == -x for v in kernel.declared_vanishing)


def check_sufficient(kernel: KernelSpec) -> ValidityReport:
    """Evaluate the existence conditions for a kernel quadruple."""
    ab = kernel.a + kernel.b
    cd = kernel.c + kernel.d
    ac = kernel.a - kernel.c
    bd = kernel.b - kernel.d
    sum_ok = ab == cd
    ac_sq = ac.square
    ac_ok = ac_sq == -4
    declared = vanishing_covers(kernel, ac)
    if sum_ok and ac_ok and declared:
        verdict = "sufficient"
    elif sum_ok and ac_ok:
        verdict = "numerically-consistent"
    else:
        verdict = "fails"
    return ValidityReport(
        ab_equals_cd=sum_ok,
        ab=ab.coords,
        cd=cd.coords,
        ac=ac.coords,
        ac_square=ac_sq,
        chi_ac=chi_line(ac),
        ac_square_ok=ac_ok,
        vanishing_declared=declared,
        bd=bd.coords,
        bd_square=bd.square,
        chi_bd=chi_line(bd),
        verdict=verdict,
    )


def check_necessary_det(kernel: KernelSpec) -> bool:
    """Determinant constraint every valid kernel satisfies.

    (chi(c) - 1) * d == c - chi(a) * b, as classes.  This is a necessary
    condition; it does not by itself certify existence.
    """
    lhs = (chi_line(kernel.c) - 1) * kernel.d
    rhs = kernel.c - chi_line(kernel.a) * kernel.b
    return lhs == rhs


def normalize_twist(kernel: KernelSpec) -> KernelSpec:
    """Twist away the first line bundle so that a and b become trivial.

    Twisting both sides by the inverse of the first summand sends
    (a, b, c, d) to (0, 0, c - a, d - b) and does not change validity or
    the induced transform up to composition with line-bundle twists.
    """
    zero = kernel.lattice.zero()
    return KernelSpec(
        a=zero,
        b=zero,
        c=kernel.c - kernel.a,
        d=kernel.d - kernel.b,
        declared_vanishing=kernel.declared_vanishing,
        source=kernel.source,
        target=kernel.target,
    )


def check_phiO_identity(kernel: KernelSpec) -> bool:
    """Whether the kernel has the exact shape (0, 0, m, -m) with m^2 == -4
    and declared vanishing for m.

    Kernels of this shape send the structure sheaf to a sheaf with the
    Chern character of a line bundle and are the model case for transforms
    fixing the trivial class.
    """
    return (
        kernel.a.is_zero
        and kernel.b.is_zero
        and (kernel.c + kernel.d).is_zero
        and kernel.c.square == -4
        and vanishing_covers(kernel, kernel.c)
    )
