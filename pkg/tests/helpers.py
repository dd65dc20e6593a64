"""Shared strategies and fixture builders for the test suite."""

from fractions import Fraction

from hypothesis import strategies as st

from k3fm import ChernCharacter, DivisorClass, KernelSpec, NSLattice


@st.composite
def lattices(draw, max_rank=4, entry_bound=4):
    """Random even symmetric Gram matrices of rank 1..max_rank."""
    rank = draw(st.integers(1, max_rank))
    diag = [2 * draw(st.integers(-entry_bound // 2 - 1, entry_bound // 2 + 1)) for _ in range(rank)]
    off = {}
    for i in range(rank):
        for j in range(i + 1, rank):
            off[(i, j)] = draw(st.integers(-entry_bound, entry_bound))
    gram = tuple(
        tuple(diag[i] if i == j else off[(min(i, j), max(i, j))] for j in range(rank))
        for i in range(rank)
    )
    return NSLattice(gram)


def class_on(lattice, bound=3):
    return st.tuples(*(st.integers(-bound, bound) for _ in range(lattice.rank))).map(
        lambda coords: DivisorClass(lattice, coords)
    )


@st.composite
def lattice_with_classes(draw, count, max_rank=4, bound=3):
    lat = draw(lattices(max_rank=max_rank))
    cls = [draw(class_on(lat, bound=bound)) for _ in range(count)]
    return (lat, *cls)


@st.composite
def characters_on(draw, lattice, r_bound=3, t_bound=5):
    r = draw(st.integers(-r_bound, r_bound))
    f = draw(class_on(lattice))
    t = Fraction(draw(st.integers(-2 * t_bound, 2 * t_bound)), 2)
    return ChernCharacter(r, f, t)


@st.composite
def kernels(draw, max_rank=3, bound=3):
    lat = draw(lattices(max_rank=max_rank))
    a, b, c, d = (draw(class_on(lat, bound=bound)) for _ in range(4))
    return KernelSpec(a=a, b=b, c=c, d=d)


# Lattices that contain a square -4 class, for kernel-shape tests.
SQUARE_MINUS_4 = [
    (NSLattice(((-4,),)), (1,)),
    (NSLattice(((2, 0), (0, -12))), (2, 1)),
    (NSLattice(((2, 1), (1, -4))), (0, 1)),
    (NSLattice(((0, 2), (2, 0))), (1, -1)),
]


def grid_vectors(lattice, r_bound=3, f_bound=3, t_bound=5):
    """Deterministic exhaustive (r, f, t) integer grid for small ranks."""
    rs = range(-r_bound, r_bound + 1)
    ts = range(-t_bound, t_bound + 1)
    fs = [()]
    for _ in range(lattice.rank):
        fs = [prefix + (v,) for prefix in fs for v in range(-f_bound, f_bound + 1)]
    return [(r, *f, t) for r in rs for f in fs for t in ts]
