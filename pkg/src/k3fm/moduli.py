"""Slope stratification predicates and Hilbert-scheme vector bookkeeping.

Slopes are degrees against a declared polarization h.  The chain report
evaluates the five-member inequality chain

    0 < mu(M) < mu(L)/2 < mu(L M^*) < mu(L) <= h^2

exactly, the destabilizing-gap predicate

    a < mu(M) < mu(L) - a  implies  l.m - m^2 > z

for a caller-supplied window bound a and stratum length z, and whether
l and m are independent in the lattice.  The length z is always an
explicit argument: it counts points on strata the lattice cannot see.

hilb_moduli_vector sends the ideal sheaf of n points through a kernel
transform and checks the resulting Mukai vector against the closed-form
family predicted for that kernel flavor.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import RejectionError
from .lattice import DivisorClass, degree, intersect
from .mukai import MukaiVector, ch_to_mukai, frac_str, ideal_sheaf_ch, sign_normalized
from .surface import SurfaceSpec
from .transform import CohTransform

__all__ = [
    "LemmaReport",
    "StrataReport",
    "es_relation",
    "strata_chain",
    "check_ample_primitive",
    "hilb_moduli_vector",
    "HILB_FLAVORS",
]

HILB_FLAVORS = ("no-cohomology", "reflexive")


@dataclass(frozen=True)
class LemmaReport:
    """Destabilizing-gap predicate at window bound a.

    predicate_ok is the implication value: vacuously true outside the
    window, and equal to gap_holds inside it.
    """

    a: Fraction
    in_window: bool
    gap: int
    gap_holds: bool
    predicate_ok: bool

    def to_dict(self) -> dict:
        return {
            "a": frac_str(self.a),
            "in_window": self.in_window,
            "gap": self.gap,
            "gap_holds": self.gap_holds,
            "predicate_ok": self.predicate_ok,
        }


@dataclass(frozen=True)
class StrataReport:
    """Exact slope chain evaluation for classes l, m against polarization h."""

    l: DivisorClass
    m: DivisorClass
    h: DivisorClass
    z: int
    slopes: tuple[Fraction, Fraction, Fraction, Fraction, Fraction]
    verdicts: tuple[bool, bool, bool, bool, bool]
    independent: bool
    lemma: LemmaReport | None = None

    @property
    def chain_holds(self) -> bool:
        return all(self.verdicts)

    def to_dict(self) -> dict:
        names = ("mu_m", "half_mu_l", "mu_l_minus_m", "mu_l", "h_square")
        comparisons = (
            "0 < mu(m)",
            "mu(m) < mu(l)/2",
            "mu(l)/2 < mu(l-m)",
            "mu(l-m) < mu(l)",
            "mu(l) <= h^2",
        )
        data = {
            "l": list(self.l.coords),
            "m": list(self.m.coords),
            "h": list(self.h.coords),
            "z": self.z,
            "l_square": self.l.square,
            "m_square": self.m.square,
            "slopes": {name: frac_str(value) for name, value in zip(names, self.slopes)},
            "verdicts": dict(zip(comparisons, self.verdicts)),
            "chain_holds": self.chain_holds,
            "independent": self.independent,
        }
        if self.lemma is not None:
            data["lemma"] = self.lemma.to_dict()
        return data


def es_relation(lsq: int) -> int:
    """Forced zero-locus length of a rank-2 section: z = (lsq + 8) / 4.

    Defined only for lsq divisible by 4 and at least -8; outside that
    range no section configuration is compatible.
    """
    if not isinstance(lsq, int) or isinstance(lsq, bool):
        raise ValueError(f"class square must be an integer, got {lsq!r}")
    if lsq % 4 != 0:
        raise ValueError(f"class square {lsq} is not divisible by 4; no zero-locus length fits")
    if lsq < -8:
        raise ValueError(f"class square {lsq} would force a negative zero-locus length")
    return (lsq + 8) // 4


def _independent(l: DivisorClass, m: DivisorClass) -> bool:
    """Whether alpha*m = beta*l has only the zero integer solution.

    Integer vectors admit a nonzero relation exactly when all of their
    2x2 coordinate minors vanish, so the test is exact with no search.
    """
    coords_l, coords_m = l.coords, m.coords
    k = len(coords_l)
    return any(
        coords_m[i] * coords_l[j] - coords_m[j] * coords_l[i] != 0
        for i in range(k)
        for j in range(i + 1, k)
    )


def strata_chain(
    l: DivisorClass,
    m: DivisorClass,
    h: DivisorClass,
    z: int,
    *,
    surface: SurfaceSpec,
    a=None,
) -> StrataReport:
    """Evaluate the slope chain, independence, and the optional gap predicate."""
    if not isinstance(z, int) or isinstance(z, bool):
        raise ValueError(f"stratum length z must be an integer, got {z!r}")
    if not surface.declares("ample", h):
        raise RejectionError(
            "h is not declared ample on this surface; slopes need a polarization"
        )
    mu_m = Fraction(degree(m, h))
    mu_l = Fraction(degree(l, h))
    half = mu_l / 2
    mu_diff = mu_l - mu_m
    hsq = Fraction(h.square)
    slopes = (mu_m, half, mu_diff, mu_l, hsq)
    verdicts = (
        0 < mu_m,
        mu_m < half,
        half < mu_diff,
        mu_diff < mu_l,
        mu_l <= hsq,
    )
    lemma = None
    if a is not None:
        bound = Fraction(a)
        in_window = bound < mu_m < mu_l - bound
        gap = intersect(l, m) - m.square
        gap_holds = gap > z
        lemma = LemmaReport(
            a=bound,
            in_window=in_window,
            gap=gap,
            gap_holds=gap_holds,
            predicate_ok=(not in_window) or gap_holds,
        )
    return StrataReport(
        l=l, m=m, h=h, z=z, slopes=slopes, verdicts=verdicts,
        independent=_independent(l, m), lemma=lemma,
    )


def check_ample_primitive(l: DivisorClass, n: int, h: DivisorClass, *, surface: SurfaceSpec) -> bool:
    """Exclusion test for a polarization that is a proper multiple l = n*h.

    Substitutes m = h into the destabilizing gap l.m - m^2 > z with z the
    forced zero-locus length for l^2.  Returns True when the system is
    inconsistent, i.e. the configuration is excluded.
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ValueError(f"multiplier n must be an integer >= 2, got {n!r}")
    if l != n * h:
        raise ValueError("l is not the stated multiple of h")
    if not surface.declares("ample", h):
        raise RejectionError(
            "h is not declared ample on this surface; the test applies to polarizations"
        )
    lsq = l.square
    if lsq % 4 != 0 or lsq < -8:
        return True
    z = es_relation(lsq)
    gap = intersect(l, h) - h.square
    return not gap > z


def hilb_moduli_vector(T: CohTransform, n: int, flavor: str) -> MukaiVector:
    """Mukai vector of the transformed ideal sheaf of n points, sign-normalized.

    The kernel's b+d column determines the expected vector family:
    flavor "no-cohomology" expects a square -4 difference class m with
    output ±(2n-1, n*m, -n-1); flavor "reflexive" expects a square -12
    class g with output ±(1+2n, n*g, 1-3n).  A transform whose kernel
    does not fit the flavor, or whose output leaves the family, is
    rejected.  n = 0 is the structure sheaf, expected at ±(1, 0, 1).
    """
    if flavor not in HILB_FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}; expected one of {HILB_FLAVORS}")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ValueError(f"number of points must be a non-negative integer, got {n!r}")
    if T.kernel is None:
        raise ValueError("transform carries no kernel data; the flavor check needs b and d")

    g = T.kernel.b + T.kernel.d
    if flavor == "no-cohomology":
        pattern = -g
        if pattern.square != -4:
            raise RejectionError(
                f"kernel difference class has square {pattern.square}, "
                "but the no-cohomology family needs -4"
            )
    else:
        pattern = g
        if pattern.square != -12:
            raise RejectionError(
                f"kernel pattern class has square {pattern.square}, "
                "but the reflexive family needs -12"
            )

    out = T.apply(ideal_sheaf_ch(T.source, n))
    v = sign_normalized(ch_to_mukai(out))

    if n == 0:
        expected_rs = (1, Fraction(1))
        f_ok = v.f.is_zero
    elif flavor == "no-cohomology":
        expected_rs = (2 * n - 1, Fraction(-n - 1))
        f_ok = v.f in (n * pattern, -(n * pattern))
    else:
        expected_rs = (1 + 2 * n, Fraction(1 - 3 * n))
        f_ok = v.f in (n * pattern, -(n * pattern))
    if (v.r, v.s) != expected_rs or not f_ok:
        raise RejectionError(
            f"transformed ideal sheaf gives {v!r}, outside the predicted "
            f"{flavor} family for n = {n}"
        )
    return v
