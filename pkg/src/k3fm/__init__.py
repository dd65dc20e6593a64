"""Exact rank-2 kernel transforms on the cohomology of K3 surfaces.

Everything is integer / Fraction arithmetic: lattices and divisor classes,
Chern characters and Mukai vectors, kernel existence checks, the induced
transform matrices with their Euler-pairing isometry test, the rank-1
constraint solver, reflexive-surface decomposition, and Hilbert-scheme
vector bookkeeping.  The command-line entry point lives in k3fm.cli.
"""

from .errors import RejectionError
from .kernel import (
    KernelSpec,
    ValidityReport,
    check_necessary_det,
    check_phiO_identity,
    check_sufficient,
    normalize_twist,
    vanishing_covers,
)
from .lattice import (
    DivisorClass,
    LatticeMismatchError,
    NSLattice,
    chi_line,
    degree,
    intersect,
)
from .moduli import (
    StrataReport,
    check_ample_primitive,
    es_relation,
    hilb_moduli_vector,
    strata_chain,
)
from .mukai import (
    ChernCharacter,
    MukaiVector,
    ch_to_mukai,
    chi_sheaf,
    euler_chi,
    extension_ch,
    frac_str,
    ideal_sheaf_ch,
    line_bundle_ch,
    mukai_pairing,
    mukai_to_ch,
    point_ch,
    sign_normalized,
    standard_ch,
    twist,
    twisted_ideal_ch,
)
from .pic1 import (
    ExclusionWitness,
    Pic1Solution,
    brute_force_oracle,
    exclusion_witness,
    existence_test,
    select_physical,
    solve_constraints,
    transform_from_solution,
)
from .reflexive import (
    Decomposition,
    DecompositionError,
    ReflexiveSurface,
    ReflexiveViolation,
    TypeReport,
    build_kernel,
    classify_type,
    component_surface,
    decompose_brute_force,
    decompose_l2h,
    hat_classes,
    standard_spec,
    transform_for,
    validate_reflexive,
)
from .surface import (
    Assumption,
    SurfaceSpec,
    SurfaceSpecError,
    load_surface_spec,
    parse_class_expr,
    surface_spec_from_dict,
)
from .transform import (
    CohTransform,
    compose,
    crosscheck_specialized,
    euler_gram,
    from_kernel,
    identity_transform,
    is_mukai_isometry,
    kernel_action_vector,
)

__version__ = "0.1.0"

__all__ = [
    "RejectionError",
    "KernelSpec",
    "ValidityReport",
    "check_necessary_det",
    "check_phiO_identity",
    "check_sufficient",
    "normalize_twist",
    "vanishing_covers",
    "DivisorClass",
    "LatticeMismatchError",
    "NSLattice",
    "chi_line",
    "degree",
    "intersect",
    "StrataReport",
    "check_ample_primitive",
    "es_relation",
    "hilb_moduli_vector",
    "strata_chain",
    "ChernCharacter",
    "MukaiVector",
    "ch_to_mukai",
    "chi_sheaf",
    "euler_chi",
    "extension_ch",
    "frac_str",
    "ideal_sheaf_ch",
    "line_bundle_ch",
    "mukai_pairing",
    "mukai_to_ch",
    "point_ch",
    "sign_normalized",
    "standard_ch",
    "twist",
    "twisted_ideal_ch",
    "ExclusionWitness",
    "Pic1Solution",
    "brute_force_oracle",
    "exclusion_witness",
    "existence_test",
    "select_physical",
    "solve_constraints",
    "transform_from_solution",
    "Decomposition",
    "DecompositionError",
    "ReflexiveSurface",
    "ReflexiveViolation",
    "TypeReport",
    "build_kernel",
    "classify_type",
    "component_surface",
    "decompose_brute_force",
    "decompose_l2h",
    "hat_classes",
    "standard_spec",
    "transform_for",
    "validate_reflexive",
    "Assumption",
    "SurfaceSpec",
    "SurfaceSpecError",
    "load_surface_spec",
    "parse_class_expr",
    "surface_spec_from_dict",
    "CohTransform",
    "compose",
    "crosscheck_specialized",
    "euler_gram",
    "from_kernel",
    "identity_transform",
    "is_mukai_isometry",
    "kernel_action_vector",
    "__version__",
]
