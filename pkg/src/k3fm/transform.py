"""The induced linear action of a rank-2 kernel on Chern characters.

The normative computation is the pushforward formula

    ch(Phi F) = chi(F*A) ch(B) + chi(F*C) ch(D) - ch(F*C*D),

evaluated term by term with exact twist formulas.  Every specialized
closed-form block for a particular kernel family is implemented separately
and compared against this engine by crosscheck_specialized; where a block
disagrees, the difference is reported, never patched into either side.

Transforms are stored as exact rational matrices acting on coordinate
vectors (rank, NS-basis coefficients, ch2).  The Euler pairing in these
coordinates has Gram matrix

    [[2, 0, 1],
     [0, -G, 0],
     [1, 0, 0]]

and a transform is an equivalence-induced map only if it preserves it;
is_mukai_isometry checks this exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .kernel import KernelSpec
from .lattice import DivisorClass, NSLattice, intersect
from .mukai import ChernCharacter

__all__ = [
    "Matrix",
    "euler_gram",
    "CohTransform",
    "identity_transform",
    "kernel_action_vector",
    "from_kernel",
    "compose",
    "is_mukai_isometry",
    "DiffEntry",
    "DiffReport",
    "CLOSED_FORMS",
    "crosscheck_specialized",
    "default_grid",
]

Matrix = tuple[tuple[Fraction, ...], ...]


def _freeze(rows) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def _mat_vec(m: Matrix, v) -> tuple[Fraction, ...]:
    return tuple(sum((row[j] * v[j] for j in range(len(v))), Fraction(0)) for row in m)


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    inner = len(b)
    return tuple(
        tuple(
            sum((a_row[k] * b[k][j] for k in range(inner)), Fraction(0))
            for j in range(len(b[0]))
        )
        for a_row in a
    )


def _identity(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n)) for i in range(n)
    )


def _det(m: Matrix) -> Fraction:
    n = len(m)
    rows = [list(row) for row in m]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        inv = 1 / rows[col][col]
        for r in range(col + 1, n):
            factor = rows[r][col] * inv
            if factor == 0:
                continue
            for c in range(col, n):
                rows[r][c] -= factor * rows[col][c]
    return det


def _inverse(m: Matrix) -> Matrix:
    n = len(m)
    rows = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [x * inv for x in rows[col]]
        for r in range(n):
            if r == col or rows[r][col] == 0:
                continue
            factor = rows[r][col]
            rows[r] = [x - factor * y for x, y in zip(rows[r], rows[col])]
    return tuple(tuple(row[n:]) for row in rows)


def euler_gram(lattice: NSLattice) -> Matrix:
    """Gram matrix of the Euler pairing in coordinates (r, f, ch2)."""
    k = lattice.rank
    n = k + 2
    rows = [[Fraction(0)] * n for _ in range(n)]
    rows[0][0] = Fraction(2)
    rows[0][n - 1] = Fraction(1)
    rows[n - 1][0] = Fraction(1)
    for i in range(k):
        for j in range(k):
            rows[1 + i][1 + j] = Fraction(-lattice.gram[i][j])
    return tuple(tuple(row) for row in rows)


@dataclass(frozen=True)
class CohTransform:
    """An exact linear map on (r, f, ch2) coordinate vectors.

    shift_parity records whether the underlying functor carries an odd
    homological shift; the matrix already contains any resulting signs.
    numerically_valid is False when the originating kernel fails the
    lattice-level existence conditions (the action is still well defined).
    kernel and labels are provenance for reporting and closed-form lookups
    and do not take part in equality.
    """

    source: NSLattice
    target: NSLattice
    matrix: Matrix
    shift_parity: int = 0
    numerically_valid: bool = True
    kernel: KernelSpec | None = field(default=None, compare=False)
    labels: tuple[tuple[str, object], ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", _freeze(self.matrix))
        object.__setattr__(self, "labels", tuple(self.labels))
        rows, cols = self.target.rank + 2, self.source.rank + 2
        if len(self.matrix) != rows or any(len(r) != cols for r in self.matrix):
            raise ValueError(f"transform matrix must be {rows}x{cols} for these lattices")

    @property
    def label_map(self) -> dict:
        return dict(self.labels)

    def determinant(self) -> Fraction:
        if self.source != self.target:
            raise ValueError("determinant requires equal source and target lattices")
        return _det(self.matrix)

    def inverse(self) -> "CohTransform":
        return CohTransform(
            source=self.target,
            target=self.source,
            matrix=_inverse(self.matrix),
            shift_parity=self.shift_parity,
            numerically_valid=self.numerically_valid,
        )

    def shifted(self, k: int = 1) -> "CohTransform":
        """Compose with a homological shift [k]: odd k negates the action."""
        if k % 2 == 0:
            return self
        neg = tuple(tuple(-x for x in row) for row in self.matrix)
        return CohTransform(
            source=self.source,
            target=self.target,
            matrix=neg,
            shift_parity=(self.shift_parity + 1) % 2,
            numerically_valid=self.numerically_valid,
            kernel=self.kernel,
            labels=self.labels,
        )

    def apply_vector(self, vec) -> tuple[Fraction, ...]:
        if len(vec) != self.source.rank + 2:
            raise ValueError("coordinate vector has the wrong length for the source lattice")
        return _mat_vec(self.matrix, tuple(Fraction(x) for x in vec))

    def apply(self, c: ChernCharacter) -> ChernCharacter:
        if c.lattice != self.source:
            raise ValueError("character does not live on the transform's source lattice")
        out = self.apply_vector(ch_vector(c))
        return vector_to_ch(self.target, out)


def ch_vector(c: ChernCharacter) -> tuple[Fraction, ...]:
    return (Fraction(c.r), *(Fraction(x) for x in c.f.coords), c.t)


def vector_to_ch(lattice: NSLattice, vec) -> ChernCharacter:
    vec = tuple(Fraction(x) for x in vec)
    r = vec[0]
    if r.denominator != 1:
        raise ValueError(f"rank component {r} is not an integer")
    coords = vec[1:-1]
    if any(x.denominator != 1 for x in coords):
        raise ValueError("first-Chern-class coordinates are not integral")
    return ChernCharacter(
        int(r), DivisorClass(lattice, tuple(int(x) for x in coords)), vec[-1]
    )


def identity_transform(lattice: NSLattice) -> CohTransform:
    return CohTransform(lattice, lattice, _identity(lattice.rank + 2))


def _frac_dot(lattice: NSLattice, fcoords, dc: DivisorClass) -> Fraction:
    """f . x for f given by (possibly fractional) coordinates."""
    k = lattice.rank
    total = Fraction(0)
    for i in range(k):
        if fcoords[i] == 0:
            continue
        total += fcoords[i] * sum(lattice.gram[i][j] * dc.coords[j] for j in range(k))
    return total


def kernel_action_vector(kernel: KernelSpec, vec) -> tuple[Fraction, ...]:
    """Image of the coordinate vector (r, f, t) under the kernel's map.

    Direct evaluation of chi(F*A) ch(B) + chi(F*C) ch(D) - ch(F*C*D): the
    Euler characteristics come from chi = 2r + t after twisting, the last
    term is the twist of F by c+d.  No intermediate rounding occurs.
    """
    lat = kernel.lattice
    k = lat.rank
    vec = tuple(Fraction(x) for x in vec)
    if len(vec) != k + 2:
        raise ValueError("coordinate vector has the wrong length for the kernel lattice")
    r, t = vec[0], vec[-1]
    f = vec[1:-1]
    a, b, c, d = kernel.a, kernel.b, kernel.c, kernel.d

    chi_fa = 2 * r + t + _frac_dot(lat, f, a) + r * Fraction(a.square, 2)
    chi_fc = 2 * r + t + _frac_dot(lat, f, c) + r * Fraction(c.square, 2)
    e = c + d
    ch0 = chi_fa + chi_fc - r
    ch1 = tuple(
        chi_fa * b.coords[i] + chi_fc * d.coords[i] - (f[i] + r * e.coords[i])
        for i in range(k)
    )
    ch2 = (
        chi_fa * Fraction(b.square, 2)
        + chi_fc * Fraction(d.square, 2)
        - (t + _frac_dot(lat, f, e) + r * Fraction(e.square, 2))
    )
    return (ch0, *ch1, ch2)


def from_kernel(
    kernel: KernelSpec,
    labels: tuple = (),
    *,
    target: NSLattice | None = None,
    phi: Matrix | None = None,
) -> CohTransform:
    """Build the transform matrix by evaluating the kernel action on a basis.

    phi, when given, is an isometry matrix taking source NS coordinates to
    target NS coordinates (phi^T G_target phi = G_source) and is applied as
    the block-diagonal extension fixing the rank and ch2 coordinates.  The
    kernel's four classes are auto-attached as labels a, b, c, d when no
    relattice identification is involved.
    """
    lat = kernel.lattice
    n = lat.rank + 2
    cols = []
    for j in range(n):
        basis_vec = tuple(Fraction(int(i == j)) for i in range(n))
        cols.append(kernel_action_vector(kernel, basis_vec))
    matrix = tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))

    tgt = lat
    if phi is not None:
        if target is None:
            raise ValueError("phi requires an explicit target lattice")
        tgt = target
        phi = _freeze(phi)
        if len(phi) != tgt.rank or any(len(row) != lat.rank for row in phi):
            raise ValueError("phi has the wrong shape for the given lattices")
        gs = _freeze(lat.gram)
        gt = _freeze(tgt.gram)
        phit = tuple(tuple(phi[r][c] for r in range(len(phi))) for c in range(len(phi[0])))
        if _mat_mul(_mat_mul(phit, gt), phi) != gs:
            raise ValueError("phi is not an isometry of the divisor lattices")
        m = tgt.rank + 2
        big = [[Fraction(0)] * n for _ in range(m)]
        big[0][0] = Fraction(1)
        big[m - 1][n - 1] = Fraction(1)
        for i in range(tgt.rank):
            for j in range(lat.rank):
                big[1 + i][1 + j] = phi[i][j]
        matrix = _mat_mul(tuple(tuple(row) for row in big), matrix)
    elif target is not None:
        if target != lat:
            raise ValueError("target lattice differs from the kernel lattice; supply phi")
        tgt = target

    auto = ()
    if phi is None:
        auto = (("a", kernel.a), ("b", kernel.b), ("c", kernel.c), ("d", kernel.d))
    valid = (
        kernel.a + kernel.b == kernel.c + kernel.d
        and (kernel.a - kernel.c).square == -4
    )
    return CohTransform(
        source=lat,
        target=tgt,
        matrix=matrix,
        numerically_valid=valid,
        kernel=kernel,
        labels=auto + tuple(labels),
    )


def compose(outer: CohTransform, inner: CohTransform) -> CohTransform:
    """outer after inner."""
    if inner.target != outer.source:
        raise ValueError("inner transform's target lattice differs from outer's source")
    return CohTransform(
        source=inner.source,
        target=outer.target,
        matrix=_mat_mul(outer.matrix, inner.matrix),
        shift_parity=(outer.shift_parity + inner.shift_parity) % 2,
        numerically_valid=outer.numerically_valid and inner.numerically_valid,
        labels=outer.labels,
    )


def is_mukai_isometry(t: CohTransform) -> bool:
    """Whether the transform preserves the Euler pairing exactly.

    Checked as M^T E_target M = E_source, which is equivalent to agreement
    of euler_chi on all pairs by bilinearity.
    """
    m = t.matrix
    mt = tuple(tuple(m[r][c] for r in range(len(m))) for c in range(len(m[0])))
    lhs = _mat_mul(_mat_mul(mt, euler_gram(t.target)), m)
    return lhs == euler_gram(t.source)


# Closed-form blocks.  Each evaluates a specialized displayed formula for a
# particular kernel family on a raw coordinate vector, pulling the classes
# it mentions from the transform's labels.  They are crosscheck targets
# only; the engine above is never defined through them.


def _require_labels(t: CohTransform, *names: str) -> list:
    found = t.label_map
    missing = [n for n in names if n not in found]
    if missing:
        raise ValueError(f"transform is missing labels {missing} required by this formula")
    return [found[n] for n in names]


def _split(lattice: NSLattice, vec):
    vec = tuple(Fraction(x) for x in vec)
    if len(vec) != lattice.rank + 2:
        raise ValueError("coordinate vector has the wrong length")
    return vec[0], vec[1:-1], vec[-1]


def closed_form_general(t: CohTransform, vec) -> tuple[Fraction, ...]:
    """Fully general block in the four kernel classes."""
    a, b, c, d = _require_labels(t, "a", "b", "c", "d")
    lat = t.source
    r, f, tt = _split(lat, vec)
    fa = _frac_dot(lat, f, a)
    fc = _frac_dot(lat, f, c)
    fd = _frac_dot(lat, f, d)
    asq, bsq, csq, dsq = a.square, b.square, c.square, d.square
    ch0 = r * (asq + csq + 6) / 2 + fa + fc + 2 * tt
    ch1 = tuple(
        r * ((asq + 4) * b.coords[i] + (csq + 2) * d.coords[i] - 2 * c.coords[i]) / 2
        + fa * b.coords[i]
        + fc * d.coords[i]
        - f[i]
        + tt * (b.coords[i] + d.coords[i])
        for i in range(lat.rank)
    )
    ch2 = (
        r * (asq * bsq + 4 * bsq + csq * dsq - 2 * csq + 2 * dsq - 4 * intersect(c, d)) / 4
        + ((dsq - 2) * fc + bsq * fa - 2 * fd) / 2
        + tt * (bsq + dsq - 2) / 2
    )
    return (ch0, *ch1, ch2)


def closed_form_no_cohomology(t: CohTransform, vec) -> tuple[Fraction, ...]:
    """Block for the kernel (0, 0, m, -m) built on a no-cohomology class m."""
    (m,) = _require_labels(t, "m")
    lat = t.source
    r, f, tt = _split(lat, vec)
    fm = _frac_dot(lat, f, m)
    ch0 = r + fm + 2 * tt
    ch1 = tuple(-(fm + tt) * m.coords[i] - f[i] for i in range(lat.rank))
    ch2 = -2 * fm - 3 * tt
    return (ch0, *ch1, ch2)


def closed_form_reflexive_nondegenerate(t: CohTransform, vec) -> tuple[Fraction, ...]:
    """Block for the non-degenerate reflexive kernel, in the hat classes."""
    l, h, lhat, hhat = _require_labels(t, "l", "h", "lhat", "hhat")
    lat = t.source
    r, f, tt = _split(lat, vec)
    fl = _frac_dot(lat, f, l)
    fh = _frac_dot(lat, f, h)
    ch0 = -r + fl + 2 * tt
    ch1 = tuple(
        -f[i] + (fl + 2 * fh) * hhat.coords[i] + (fh - tt) * lhat.coords[i]
        for i in range(lat.rank)
    )
    ch2 = -2 * fl - 5 * tt
    return (ch0, *ch1, ch2)


def closed_form_reflexive_type_i(t: CohTransform, vec) -> tuple[Fraction, ...]:
    """Block for the type I degenerate kernel, in l, h and the components."""
    l, h, d1, d2 = _require_labels(t, "l", "h", "d1", "d2")
    lat = t.source
    r, f, tt = _split(lat, vec)
    fl = _frac_dot(lat, f, l)
    fh = _frac_dot(lat, f, h)
    fd1 = _frac_dot(lat, f, d1)
    fd2 = _frac_dot(lat, f, d2)
    ch0 = -r + fl + 2 * tt
    ch1 = tuple(
        -f[i]
        - tt * l.coords[i]
        - fh * (l.coords[i] + 2 * h.coords[i])
        + fl * l.coords[i]
        - fd1 * d1.coords[i]
        - fd2 * d2.coords[i]
        for i in range(lat.rank)
    )
    ch2 = -2 * fl - 5 * tt
    return (ch0, *ch1, ch2)


def closed_form_reflexive_type_ii(t: CohTransform, vec) -> tuple[Fraction, ...]:
    """Block for the type II degenerate kernel; deg(d1) = 1 is assumed."""
    l, h, d1, d2 = _require_labels(t, "l", "h", "d1", "d2")
    lat = t.source
    r, f, tt = _split(lat, vec)
    fl = _frac_dot(lat, f, l)
    fd1 = _frac_dot(lat, f, d1)
    f2d1d2 = _frac_dot(lat, f, 2 * d1 + d2)
    ch0 = -r + fl + 2 * tt
    ch1 = tuple(
        -f[i]
        + fl * h.coords[i]
        + fd1 * d2.coords[i]
        - f2d1d2 * d1.coords[i]
        + tt * (d2.coords[i] - 3 * d1.coords[i] + 2 * h.coords[i])
        for i in range(lat.rank)
    )
    ch2 = -2 * fl - 5 * tt
    return (ch0, *ch1, ch2)


def closed_form_picard_rank_one(t: CohTransform, vec) -> tuple[Fraction, ...]:
    """Rank-1 block in scalar coordinates (r, coefficient of l, ch2)."""
    (n,) = _require_labels(t, "n")
    lat = t.source
    if lat.rank != 1:
        raise ValueError("this formula applies to rank-1 lattices only")
    lsq = lat.gram[0][0]
    r, f, tt = _split(lat, vec)
    c = f[0]
    ch0 = (2 * n + 3) * r + c * lsq + 2 * tt
    ch1 = (n + 1) * r + c * (4 * n + 1) + tt
    ch2 = 2 * (n * n - 1) * r + (n - 1) * c * lsq + (2 * n - 1) * tt
    return (ch0, ch1, ch2)


CLOSED_FORMS = {
    "general": (closed_form_general, ("a", "b", "c", "d")),
    "no_cohomology": (closed_form_no_cohomology, ("m",)),
    "reflexive_nondegenerate": (
        closed_form_reflexive_nondegenerate,
        ("l", "h", "lhat", "hhat"),
    ),
    "reflexive_type_i": (closed_form_reflexive_type_i, ("l", "h", "d1", "d2")),
    "reflexive_type_ii": (closed_form_reflexive_type_ii, ("l", "h", "d1", "d2")),
    "picard_rank_one": (closed_form_picard_rank_one, ("n",)),
}


@dataclass(frozen=True)
class DiffEntry:
    input: tuple[Fraction, ...]
    engine: tuple[Fraction, ...]
    closed_form: tuple[Fraction, ...]
    delta: tuple[Fraction, ...]
    delta_hat: tuple[Fraction, Fraction] | None = None


@dataclass(frozen=True)
class DiffReport:
    formula_id: str
    points: int
    entries: tuple[DiffEntry, ...]

    @property
    def agree(self) -> bool:
        return not self.entries


def _hat_coordinates(t: CohTransform, delta_f) -> tuple[Fraction, Fraction] | None:
    """Express the divisor part of a difference in the (hhat, lhat) basis.

    Returns None when the labels are absent or the difference is not in
    their span.
    """
    labels = t.label_map
    if "hhat" not in labels or "lhat" not in labels:
        return None
    hhat, lhat = labels["hhat"], labels["lhat"]
    k = t.target.rank
    rows = [
        [Fraction(hhat.coords[i]), Fraction(lhat.coords[i]), Fraction(delta_f[i])]
        for i in range(k)
    ]
    pivots = []
    col = 0
    for want in (0, 1):
        pivot = next((r for r in range(col, k) if rows[r][want] != 0), None)
        if pivot is None:
            continue
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = 1 / rows[col][want]
        rows[col] = [x * inv for x in rows[col]]
        for r in range(k):
            if r != col and rows[r][want] != 0:
                factor = rows[r][want]
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[col])]
        pivots.append(want)
        col += 1
    if pivots != [0, 1]:
        return None
    if any(rows[r][2] != 0 for r in range(col, k)):
        return None
    return (rows[0][2], rows[1][2])


def default_grid(lattice: NSLattice) -> tuple[tuple[int, ...], ...]:
    """Small deterministic grid of (r, f, t) coordinate vectors."""
    span = {1: 2, 2: 2}.get(lattice.rank, 1)
    fspan = {1: 3, 2: 2}.get(lattice.rank, 1)
    rs = range(-span, span + 1)
    ts = range(-span, span + 1)
    fvals = range(-fspan, fspan + 1)
    grid = []
    def rec(prefix, depth):
        if depth == lattice.rank:
            for r in rs:
                for t in ts:
                    grid.append((r, *prefix, t))
            return
        for v in fvals:
            rec(prefix + (v,), depth + 1)
    rec((), 0)
    return tuple(grid)


def crosscheck_specialized(t: CohTransform, formula_id: str, grid=None) -> DiffReport:
    """Compare the transform's action against a named closed-form block.

    Evaluates both sides on every grid point and records each disagreement
    with its componentwise difference; for reflexive formulas the divisor
    part of the difference is additionally expressed in the hat basis when
    possible.  An empty entry list means exact agreement on the grid.
    """
    if formula_id not in CLOSED_FORMS:
        raise ValueError(
            f"unknown formula id {formula_id!r}; known: {sorted(CLOSED_FORMS)}"
        )
    func, _ = CLOSED_FORMS[formula_id]
    if grid is None:
        grid = default_grid(t.source)
    entries = []
    for point in grid:
        vec = tuple(Fraction(x) for x in point)
        engine = t.apply_vector(vec)
        closed = func(t, vec)
        if engine == closed:
            continue
        delta = tuple(x - y for x, y in zip(closed, engine))
        delta_hat = _hat_coordinates(t, delta[1:-1])
        entries.append(
            DiffEntry(
                input=vec,
                engine=engine,
                closed_form=closed,
                delta=delta,
                delta_hat=delta_hat,
            )
        )
    return DiffReport(formula_id=formula_id, points=len(grid), entries=tuple(entries))
