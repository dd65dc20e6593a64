"""Surfaces carrying classes h, l with h^2 = 2, l^2 = -12, h.l = 0.

The distinguished combination l+2h has square -4 and degree 4 against h;
whether it is effective (the degenerate case) is declared input, as are
its irreducible rational components.  The decomposition procedure
decompose_l2h implements a complete case analysis over the declared
components (two to four curves, possibly with one repeated), producing
d1 + d2 = l + 2h with d1^2 = d2^2 = -2 and d1.d2 = 0, and rejecting the
configurations the analysis shows impossible by naming the violated
identity.  decompose_brute_force is the independent oracle: it tries
every sub-multiset sum and keeps those meeting the same invariants.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import RejectionError
from .kernel import KernelSpec
from .lattice import DivisorClass, NSLattice, chi_line, degree, intersect
from .surface import Assumption, SurfaceSpec
from .transform import CohTransform, from_kernel

__all__ = [
    "ReflexiveViolation",
    "DecompositionError",
    "ReflexiveSurface",
    "Decomposition",
    "TypeReport",
    "validate_reflexive",
    "hat_classes",
    "decompose_l2h",
    "decompose_brute_force",
    "classify_type",
    "build_kernel",
    "transform_for",
    "standard_spec",
    "component_surface",
    "KERNEL_VARIANTS",
]

KERNEL_VARIANTS = ("nondegenerate", "type-i", "type-ii")


class ReflexiveViolation(RejectionError):
    """A required intersection-number relation fails."""


class DecompositionError(RejectionError):
    """The declared component configuration admits no valid decomposition."""


@dataclass(frozen=True)
class ReflexiveSurface:
    """A surface together with its resolved h, l classes and declared data.

    Normally produced by validate_reflexive; constructing it directly
    bypasses the intersection-number checks (useful only for probing the
    decomposition rejections on deliberately inconsistent data).
    """

    spec: SurfaceSpec
    h: DivisorClass
    l: DivisorClass
    degenerate: bool
    curves: tuple[DivisorClass, ...] = ()

    @property
    def l2h(self) -> DivisorClass:
        return self.l + 2 * self.h


@dataclass(frozen=True)
class Decomposition:
    d1: DivisorClass
    d2: DivisorClass

    def to_dict(self) -> dict:
        return {"d1": list(self.d1.coords), "d2": list(self.d2.coords)}


@dataclass(frozen=True)
class TypeReport:
    """Degree classification of a decomposition, ordered deg(d1) <= deg(d2).

    Pattern (2, 2) is type I; (1, 3) is type II, which additionally forces
    h = d1 + e for a degree-1 curve class e with e^2 = -2 and d1.e = 3.
    """

    surface_type: str
    d1: DivisorClass
    d2: DivisorClass
    deg_d1: int
    deg_d2: int
    e: DivisorClass | None = None

    def to_dict(self) -> dict:
        data = {
            "type": self.surface_type,
            "d1": list(self.d1.coords),
            "d2": list(self.d2.coords),
            "deg_d1": self.deg_d1,
            "deg_d2": self.deg_d2,
        }
        if self.e is not None:
            data["e"] = list(self.e.coords)
        return data


def validate_reflexive(spec: SurfaceSpec, h_name: str = "h", l_name: str = "l") -> ReflexiveSurface:
    """Check the defining relations and collect the declared geometry.

    Degeneracy cannot be computed from the lattice; it is read from an
    effectivity declaration on l+2h or from declared irreducible rational
    components (which imply effectivity of their sum).
    """
    h = spec.cls(h_name)
    l = spec.cls(l_name)
    hs = h.square
    if hs != 2:
        raise ReflexiveViolation(f'"{h_name}^2 = 2" fails: got {hs}')
    ls = l.square
    if ls != -12:
        raise ReflexiveViolation(f'"{l_name}^2 = -12" fails: got {ls}')
    hl = intersect(h, l)
    if hl != 0:
        raise ReflexiveViolation(f'"{h_name}.{l_name} = 0" fails: got {hl}')

    l2h = l + 2 * h
    curves = spec.declared("irreducible_rational")
    for i, c in enumerate(curves, start=1):
        if c.square != -2:
            raise ReflexiveViolation(
                f"declared component {i} has square {c.square}; a rational curve needs -2"
            )
        if degree(c, h) < 1:
            raise ReflexiveViolation(
                f"declared component {i} has degree {degree(c, h)}; "
                f"an irreducible curve on a polarized surface needs degree >= 1"
            )
    if curves:
        if not 2 <= len(curves) <= 4:
            raise ReflexiveViolation(
                f"{len(curves)} components declared; deg(l+2h) = 4 allows between 2 and 4"
            )
        total = spec.lattice.zero()
        for c in curves:
            total = total + c
        if total != l2h:
            raise ReflexiveViolation(
                f"declared components sum to {list(total.coords)}, "
                f"but l+2h = {list(l2h.coords)}"
            )
    degenerate = bool(curves) or spec.declares("effective", l2h)
    return ReflexiveSurface(spec=spec, h=h, l=l, degenerate=degenerate, curves=curves)


def hat_classes(rs: ReflexiveSurface) -> tuple[DivisorClass, DivisorClass]:
    """The dual pair (lhat, hhat) = (5l+12h, 2l+5h).

    They satisfy the same three relations as (l, h); this is implied by
    the defining relations and re-checked here as a consistency guard.
    """
    lhat = 5 * rs.l + 12 * rs.h
    hhat = 2 * rs.l + 5 * rs.h
    if hhat.square != 2 or lhat.square != -12 or intersect(hhat, lhat) != 0:
        raise ReflexiveViolation("hat classes fail the defining relations")
    return lhat, hhat


def _check_components(rs: ReflexiveSurface):
    if not rs.curves:
        raise DecompositionError(
            "no irreducible rational components are declared; "
            "decomposition requires the degenerate case data"
        )
    curves = rs.curves
    for i, c in enumerate(curves, start=1):
        if c.square != -2:
            raise DecompositionError(
                f"component {i} has square {c.square}; a rational curve needs -2"
            )
    total = rs.spec.lattice.zero()
    for c in curves:
        total = total + c
    if total != rs.l2h:
        raise DecompositionError(
            f"components sum to {list(total.coords)}, but l+2h = {list(rs.l2h.coords)}"
        )
    return curves


def _finish(rs: ReflexiveSurface, d1: DivisorClass, d2: DivisorClass) -> Decomposition:
    if d1 + d2 != rs.l2h or d1.square != -2 or d2.square != -2 or intersect(d1, d2) != 0:
        raise DecompositionError(
            "case analysis produced an invalid decomposition; the declared "
            "intersection data is inconsistent"
        )
    return Decomposition(d1=d1, d2=d2)


def decompose_l2h(rs: ReflexiveSurface) -> Decomposition:
    """Split l+2h into d1 + d2 with d1^2 = d2^2 = -2 and d1.d2 = 0.

    Case analysis on the number n of declared components, using that
    (l+2h)^2 = -4 forces the pairwise products to sum to n-2:

      n=2: the two components are disjoint; take them as d1, d2.
      n=3: a repeated component would force a half-integer product, so
           the components are distinct and exactly one pair meets once;
           d1 is the remaining component, d2 the sum of the pair.
      n=4: a component repeated three times is impossible; each two-set
           sum must have square <= -2, capping pairwise products at 1.
           One repeated pair forces products (1,1,0) against the rest,
           giving (u+v, u+w); four distinct components either pair up
           into two disjoint meeting pairs or leave one component
           disjoint from all others, which is taken alone.
    """
    curves = _check_components(rs)
    n = len(curves)

    def p(i, j):
        return intersect(curves[i], curves[j])

    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    total = sum(p(i, j) for i, j in pairs)

    if n == 2:
        if total != 0:
            raise DecompositionError(
                f'"c_1.c_2 = 0" fails: got {total}; (l+2h)^2 = -4 forces disjoint halves'
            )
        return _finish(rs, curves[0], curves[1])

    if n == 3:
        if len(set(curves)) < 3:
            raise DecompositionError(
                'a repeated component among three forces "c.c\' = 3/2", '
                "which no integer pairing satisfies"
            )
        if total != 1:
            raise DecompositionError(
                f'"c_1.c_2 + c_2.c_3 + c_3.c_1 = 1" fails: got {total}'
            )
        negatives = [(i, j) for i, j in pairs if p(i, j) < 0]
        if negatives:
            i, j = negatives[0]
            raise DecompositionError(
                f"distinct components {i + 1} and {j + 1} meet in {p(i, j)} < 0"
            )
        (i, j) = next((i, j) for i, j in pairs if p(i, j) == 1)
        k = ({0, 1, 2} - {i, j}).pop()
        return _finish(rs, curves[k], curves[i] + curves[j])

    if n == 4:
        counts: dict[DivisorClass, int] = {}
        for c in curves:
            counts[c] = counts.get(c, 0) + 1
        if max(counts.values()) >= 3:
            raise DecompositionError(
                'a component repeated three times forces "3c_1.c_4 = 8", '
                "which no integer pairing satisfies"
            )
        repeated = [c for c, k in counts.items() if k == 2]
        if len(repeated) == 2:
            raise DecompositionError(
                'two doubled components force "c_1.c_3 = 3/2", '
                "which no integer pairing satisfies"
            )
        for i, j in pairs:
            sq = (curves[i] + curves[j]).square
            if sq > -2:
                raise DecompositionError(
                    f'"(c_i+c_j)^2 <= -2" fails for components {i + 1}, {j + 1}: got {sq}'
                )
        if total != 2:
            raise DecompositionError(
                f'"sum of c_i.c_j over i<j = 2" fails: got {total}'
            )
        negatives = [(i, j) for i, j in pairs if curves[i] != curves[j] and p(i, j) < 0]
        if negatives:
            i, j = negatives[0]
            raise DecompositionError(
                f"distinct components {i + 1} and {j + 1} meet in {p(i, j)} < 0"
            )
        if repeated:
            u = repeated[0]
            rest = [c for c in curves if c != u]
            u_products = sorted(intersect(u, v) for v in rest)
            vw = intersect(rest[0], rest[1])
            if u_products != [1, 1] or vw != 0:
                raise DecompositionError(
                    "a doubled component must meet each remaining component once "
                    f"with the rest disjoint; got products {u_products} and {vw}"
                )
            return _finish(rs, u + rest[0], u + rest[1])
        edges = [(i, j) for i, j in pairs if p(i, j) == 1]
        if len(edges) == 2 and not set(edges[0]) & set(edges[1]):
            (i, j), (k, m) = edges
            return _finish(rs, curves[i] + curves[j], curves[k] + curves[m])
        isolated = [
            i for i in range(4) if all(p(min(i, j), max(i, j)) == 0 for j in range(4) if j != i)
        ]
        if isolated:
            i = isolated[0]
            rest = rs.spec.lattice.zero()
            for j in range(4):
                if j != i:
                    rest = rest + curves[j]
            return _finish(rs, curves[i], rest)
        raise DecompositionError(
            "four distinct components meet in a pattern outside the two admissible "
            "cases (two disjoint meeting pairs, or one component disjoint from all)"
        )

    raise DecompositionError(f"{n} components declared; expected between 2 and 4")


def decompose_brute_force(rs: ReflexiveSurface) -> list[Decomposition]:
    """All valid decompositions by exhaustive sub-multiset search."""
    curves = _check_components(rs)
    n = len(curves)
    seen = set()
    found = []
    for mask in range(1, 1 << n):
        if mask == (1 << n) - 1:
            continue
        d1 = rs.spec.lattice.zero()
        d2 = rs.spec.lattice.zero()
        for i in range(n):
            if mask & (1 << i):
                d1 = d1 + curves[i]
            else:
                d2 = d2 + curves[i]
        if d1.square != -2 or d2.square != -2 or intersect(d1, d2) != 0:
            continue
        key = tuple(sorted((d1.coords, d2.coords)))
        if key in seen:
            continue
        seen.add(key)
        a, b = sorted((d1, d2), key=lambda dc: dc.coords)
        found.append(Decomposition(d1=a, d2=b))
    found.sort(key=lambda dec: (dec.d1.coords, dec.d2.coords))
    return found


def classify_type(rs: ReflexiveSurface, dec: Decomposition) -> TypeReport:
    """Order the halves by degree and classify the pattern (2,2) or (1,3)."""
    d1, d2 = dec.d1, dec.d2
    if degree(d1, rs.h) > degree(d2, rs.h):
        d1, d2 = d2, d1
    deg1, deg2 = degree(d1, rs.h), degree(d2, rs.h)
    if deg1 < 1:
        raise ReflexiveViolation(
            f"deg(d_1) = {deg1}; an effective component needs positive degree"
        )
    if (deg1, deg2) == (2, 2):
        return TypeReport("I", d1, d2, deg1, deg2)
    if (deg1, deg2) == (1, 3):
        e = rs.h - d1
        if e.square != -2:
            raise ReflexiveViolation(f'"e^2 = -2" fails for e = h - d_1: got {e.square}')
        if degree(e, rs.h) != 1:
            raise ReflexiveViolation(f'"h.e = 1" fails: got {degree(e, rs.h)}')
        if intersect(d1, e) != 3:
            raise ReflexiveViolation(f'"d_1.e = 3" fails: got {intersect(d1, e)}')
        return TypeReport("II", d1, d2, deg1, deg2, e=e)
    raise ReflexiveViolation(
        f"degree pattern ({deg1}, {deg2}) is impossible: deg(l+2h) = 4 "
        "splits only as 2+2 or 1+3"
    )


def build_kernel(rs: ReflexiveSurface, variant: str, dec: Decomposition | None = None) -> KernelSpec:
    """The kernel quadruple for the requested transform family.

    nondegenerate: (-h, 3l+7h, l+h, 2l+5h); requires a surface not
    declared degenerate, since it rests on l+2h having no cohomology.
    type-i / type-ii: built from the decomposition halves ordered by
    degree; the variant must match the surface's degree pattern.
    """
    if variant not in KERNEL_VARIANTS:
        raise ValueError(f"unknown kernel variant {variant!r}; expected {KERNEL_VARIANTS}")
    vanishing = rs.spec.declared("no_cohomology")
    if variant == "nondegenerate":
        if rs.degenerate:
            raise ReflexiveViolation(
                "the non-degenerate kernel requires l+2h without cohomology, "
                "but the surface declares it effective"
            )
        return KernelSpec(
            a=-rs.h,
            b=3 * rs.l + 7 * rs.h,
            c=rs.l + rs.h,
            d=2 * rs.l + 5 * rs.h,
            declared_vanishing=vanishing,
            source=rs.spec,
            target=rs.spec,
        )
    if dec is None:
        dec = decompose_l2h(rs)
    report = classify_type(rs, dec)
    wanted = "I" if variant == "type-i" else "II"
    if report.surface_type != wanted:
        raise ReflexiveViolation(
            f"surface decomposes with degree pattern ({report.deg_d1}, {report.deg_d2}), "
            f"type {report.surface_type}; the {variant} kernel does not apply"
        )
    d1, d2, h = report.d1, report.d2, rs.h
    if variant == "type-i":
        return KernelSpec(
            a=d1 - h, b=h - d1, c=d2 - h, d=h - d2,
            declared_vanishing=vanishing, source=rs.spec, target=rs.spec,
        )
    return KernelSpec(
        a=d1 - h, b=d2 - 2 * d1 + h, c=d2 - h, d=h - d1,
        declared_vanishing=vanishing, source=rs.spec, target=rs.spec,
    )


def transform_for(rs: ReflexiveSurface, variant: str, dec: Decomposition | None = None) -> CohTransform:
    """Kernel transform with the surface's named classes attached as labels."""
    kernel = build_kernel(rs, variant, dec)
    lhat, hhat = hat_classes(rs)
    labels = [("h", rs.h), ("l", rs.l), ("lhat", lhat), ("hhat", hhat)]
    if variant != "nondegenerate":
        if dec is None:
            dec = decompose_l2h(rs)
        report = classify_type(rs, dec)
        labels += [("d1", report.d1), ("d2", report.d2)]
    return from_kernel(kernel, labels=tuple(labels))


def standard_spec() -> SurfaceSpec:
    """The minimal non-degenerate model: basis (h, l), no effective l+2h."""
    lattice = NSLattice(((2, 0), (0, -12)))
    named = (
        ("h", DivisorClass(lattice, (1, 0))),
        ("l", DivisorClass(lattice, (0, 1))),
        ("l2h", DivisorClass(lattice, (2, 1))),
    )
    assumptions = (Assumption("ample", "h"), Assumption("no_cohomology", "l2h"))
    return SurfaceSpec(lattice, named, assumptions)


def component_surface(
    occurrences: tuple[str, ...],
    degrees: dict[str, int],
    products: dict[tuple[str, str], int] | None = None,
) -> ReflexiveSurface:
    """Degenerate surface built from a declared component configuration.

    occurrences lists component names in order, with repetition meaning a
    repeated class; degrees gives each distinct component's degree against
    h; products gives pairwise intersection numbers between distinct
    components (unordered name pairs, default 0).  The basis is (h, the
    distinct components); l is defined as the occurrence sum minus 2h, so
    the configuration is reflexive-consistent exactly when the occurrence
    sum has square -4 and degree 4.
    """
    products = dict(products or {})
    names: list[str] = []
    for name in occurrences:
        if name not in names:
            names.append(name)
    missing = [name for name in names if name not in degrees]
    if missing:
        raise ValueError(f"missing degrees for components {missing}")

    def product(u: str, v: str) -> int:
        return products.get((u, v), products.get((v, u), 0))

    k = len(names)
    gram = [[0] * (k + 1) for _ in range(k + 1)]
    gram[0][0] = 2
    for i, u in enumerate(names, start=1):
        gram[0][i] = gram[i][0] = degrees[u]
        gram[i][i] = -2
        for j, v in enumerate(names, start=1):
            if i < j:
                gram[i][j] = gram[j][i] = product(u, v)
    lattice = NSLattice(tuple(tuple(row) for row in gram))

    h = DivisorClass(lattice, (1,) + (0,) * k)
    classes = {name: lattice.basis(i) for i, name in enumerate(names, start=1)}
    total = lattice.zero()
    for name in occurrences:
        total = total + classes[name]
    l = total - 2 * h

    named = [("h", h), ("l", l), ("l2h", total)]
    named += [(name, classes[name]) for name in names]
    assumptions = [Assumption("ample", "h"), Assumption("effective", "l2h")]
    assumptions += [Assumption("irreducible_rational", name) for name in occurrences]
    spec = SurfaceSpec(lattice, tuple(named), tuple(assumptions))
    curves = tuple(classes[name] for name in occurrences)
    return ReflexiveSurface(spec=spec, h=h, l=l, degenerate=True, curves=curves)
