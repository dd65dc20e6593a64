"""Command-line interface: surface ingestion, dispatch, machine-readable reports.

Every command emits a single report, JSON by default (keys sorted,
rationals serialized as "p/q" in lowest terms with positive denominator)
or aligned text via --format / the K3FM_FORMAT environment variable.
Exit status: 0 on success, 1 on mathematical rejection, 2 on input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .errors import RejectionError
from .kernel import (
    KernelSpec,
    check_necessary_det,
    check_phiO_identity,
    check_sufficient,
    normalize_twist,
)
from .lattice import DivisorClass, NSLattice, chi_line, degree
from .moduli import (
    HILB_FLAVORS,
    check_ample_primitive,
    es_relation,
    hilb_moduli_vector,
    strata_chain,
)
from .mukai import ChernCharacter, ch_to_mukai, frac_str, mukai_pairing
from .pic1 import (
    brute_force_oracle,
    exclusion_witness,
    existence_test,
    select_physical,
    solve_constraints,
    transform_from_solution,
)
from .reflexive import (
    KERNEL_VARIANTS,
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
    load_surface_spec,
    parse_class_expr,
)
from .transform import (
    CLOSED_FORMS,
    CohTransform,
    crosscheck_specialized,
    from_kernel,
    is_mukai_isometry,
)

__all__ = ["main", "BUILDERS"]

BUILDERS = (
    "no-cohomology",
    "reflexive-nondegenerate",
    "reflexive-type-i",
    "reflexive-type-ii",
    "pic1",
)

_BUILDER_FORMULA = {
    "no-cohomology": "no_cohomology",
    "reflexive-nondegenerate": "reflexive_nondegenerate",
    "reflexive-type-i": "reflexive_type_i",
    "reflexive-type-ii": "reflexive_type_ii",
    "pic1": "picard_rank_one",
}


# ---------------------------------------------------------------------------
# serialization helpers


def _ch_dict(c: ChernCharacter) -> dict:
    return {"r": c.r, "f": list(c.f.coords), "t": frac_str(c.t)}


def _mukai_dict(v) -> dict:
    return {"r": v.r, "f": list(v.f.coords), "s": frac_str(v.s)}


def _vec_strs(vec) -> list[str]:
    return [frac_str(x) for x in vec]


def _matrix_json(matrix) -> list[list]:
    return [
        [int(x) if Fraction(x).denominator == 1 else frac_str(x) for x in row]
        for row in matrix
    ]


def _render_text(payload) -> str:
    pairs: list[tuple[str, str]] = []

    def walk(value, path: str):
        if isinstance(value, dict):
            if not value:
                pairs.append((path, "{}"))
                return
            for key in sorted(value):
                walk(value[key], f"{path}.{key}" if path else str(key))
        elif isinstance(value, list) and any(isinstance(x, (dict, list)) for x in value):
            for i, item in enumerate(value):
                walk(item, f"{path}[{i}]")
        else:
            pairs.append((path, json.dumps(value)))

    walk(payload, "")
    width = max((len(lhs) for lhs, _ in pairs), default=0)
    return "\n".join(f"{lhs.ljust(width)}  {rhs}" for lhs, rhs in pairs)


def _emit(payload: dict, fmt: str):
    if fmt == "text":
        print(_render_text(payload))
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# input helpers


def _load_surface(args) -> SurfaceSpec:
    if getattr(args, "surface", None) is None:
        raise ValueError("this command requires --surface")
    return load_surface_spec(args.surface)


def _parse_ch(lattice: NSLattice, text: str) -> ChernCharacter:
    parts = [p.strip() for p in text.split(",")]
    want = lattice.rank + 2
    if len(parts) != want:
        raise ValueError(
            f"--ch needs {want} comma-separated values (rank, {lattice.rank} divisor "
            f"coordinates, ch2) for this surface, got {len(parts)}"
        )
    try:
        r = int(parts[0])
        coords = tuple(int(p) for p in parts[1:-1])
        t = Fraction(parts[-1])
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse --ch value {text!r}: {exc}") from None
    return ChernCharacter(r, DivisorClass(lattice, coords), t)


def _default_no_cohomology_spec() -> SurfaceSpec:
    """Rank-1 stand-in surface whose generator is a declared no-cohomology
    class of square -4; gives the no-cohomology builder a zero-setup home."""
    lattice = NSLattice(((-4,),))
    named = (("m", DivisorClass(lattice, (1,))),)
    return SurfaceSpec(lattice, named, (Assumption("no_cohomology", "m"),))


def _no_cohomology_transform(args) -> CohTransform:
    if getattr(args, "surface", None) is not None:
        spec = load_surface_spec(args.surface)
    else:
        spec = _default_no_cohomology_spec()
    m = parse_class_expr(spec, getattr(args, "m_class", None) or "m")
    kernel = KernelSpec(
        a=spec.lattice.zero(),
        b=spec.lattice.zero(),
        c=m,
        d=-m,
        declared_vanishing=spec.declared("no_cohomology"),
        source=spec,
        target=spec,
    )
    return from_kernel(kernel, labels=(("m", m),))


def _reflexive_surface(args, variant: str):
    if getattr(args, "surface", None) is not None:
        spec = load_surface_spec(args.surface)
        return validate_reflexive(spec, h_name=args.h_name, l_name=args.l_name)
    if variant == "nondegenerate":
        return validate_reflexive(standard_spec())
    if variant == "type-i":
        return component_surface(("c1", "c2"), {"c1": 2, "c2": 2})
    return component_surface(("c1", "c2"), {"c1": 1, "c2": 3})


def _builder_transform(args) -> CohTransform:
    name = args.builder
    if name == "no-cohomology":
        return _no_cohomology_transform(args)
    if name == "pic1":
        lsq = getattr(args, "lsq", None)
        if lsq is None:
            raise ValueError("builder pic1 requires --lsq")
        n = existence_test(lsq)
        if n is None:
            raise RejectionError(
                f"no transform exists for generator square {lsq}: it is not 4 mod 8"
            )
        return transform_from_solution(select_physical(solve_constraints(n)))
    variant = name.removeprefix("reflexive-")
    rs = _reflexive_surface(args, variant)
    return transform_for(rs, variant)


def _kernel_from_exprs(spec: SurfaceSpec, args, extra_vanishing=()) -> KernelSpec:
    classes = {}
    for field in ("a", "b", "c", "d"):
        expr = getattr(args, field)
        classes[field] = parse_class_expr(spec, expr)
    vanishing = list(spec.declared("no_cohomology"))
    for expr in extra_vanishing:
        vanishing.append(parse_class_expr(spec, expr))
    return KernelSpec(
        a=classes["a"],
        b=classes["b"],
        c=classes["c"],
        d=classes["d"],
        declared_vanishing=tuple(vanishing),
        source=spec,
        target=spec,
    )


# ---------------------------------------------------------------------------
# command handlers: each returns (exit_status, payload)


def _cmd_surface_validate(args):
    spec = _load_surface(args)
    payload = {"ok": True, "surface": spec.to_dict()}
    if args.reflexive:
        rs = validate_reflexive(spec, h_name=args.h_name, l_name=args.l_name)
        lhat, hhat = hat_classes(rs)
        payload["reflexive"] = {
            "h": list(rs.h.coords),
            "l": list(rs.l.coords),
            "degenerate": rs.degenerate,
            "curves": [list(c.coords) for c in rs.curves],
            "l2h": list(rs.l2h.coords),
            "chi_l2h": chi_line(rs.l2h),
            "deg_l2h": degree(rs.l2h, rs.h),
            "lhat": list(lhat.coords),
            "hhat": list(hhat.coords),
        }
    return 0, payload


def _cmd_chi(args):
    spec = _load_surface(args)
    dc = parse_class_expr(spec, args.class_expr)
    return 0, {
        "ok": True,
        "expr": args.class_expr,
        "class": list(dc.coords),
        "square": dc.square,
        "chi": chi_line(dc),
    }


def _cmd_kernel_check(args):
    spec = _load_surface(args)
    kernel = _kernel_from_exprs(spec, args, extra_vanishing=args.vanishing or ())
    report = check_sufficient(kernel)
    normalized = normalize_twist(kernel)
    payload = {
        "kernel": kernel.to_dict(),
        "report": report.to_dict(),
        "determinant_condition": check_necessary_det(normalized),
        "phi_o_identity": check_phiO_identity(normalized),
        "normalized": normalized.to_dict(),
    }
    if report.verdict == "fails":
        payload["ok"] = False
        payload["error"] = {
            "kind": "rejection",
            "message": "kernel fails the existence conditions",
        }
        return 1, payload
    payload["ok"] = True
    return 0, payload


def _cmd_transform_apply(args):
    t = _builder_transform(args)
    ch_in = _parse_ch(t.source, args.ch)
    ch_out = t.apply(ch_in)
    payload = {
        "ok": True,
        "builder": args.builder,
        "input": _ch_dict(ch_in),
        "output": _ch_dict(ch_out),
        "mukai": _mukai_dict(ch_to_mukai(ch_out)),
        "numerically_valid": t.numerically_valid,
        "isometry": is_mukai_isometry(t),
    }
    return 0, payload


def _cmd_transform_crosscheck(args):
    t = _builder_transform(args)
    formula = args.formula or _BUILDER_FORMULA[args.builder]
    report = crosscheck_specialized(t, formula)
    shown = report.entries[: args.max_entries]
    payload = {
        "ok": True,
        "builder": args.builder,
        "formula": report.formula_id,
        "points": report.points,
        "agree": report.agree,
        "mismatches": len(report.entries),
        "truncated": len(shown) < len(report.entries),
        "entries": [
            {
                "input": _vec_strs(e.input),
                "engine": _vec_strs(e.engine),
                "closed_form": _vec_strs(e.closed_form),
                "delta": _vec_strs(e.delta),
                "delta_hat": None if e.delta_hat is None else _vec_strs(e.delta_hat),
            }
            for e in shown
        ],
    }
    return 0, payload


def _cmd_pic1(args):
    n = existence_test(args.lsq)
    if n is None:
        raise RejectionError(
            f"no transform exists for generator square {args.lsq}: it is not 4 mod 8"
        )
    pair = solve_constraints(n)
    selected = select_physical(pair)
    witness = exclusion_witness(pair)
    payload = {
        "ok": True,
        "lsq": args.lsq,
        "n": n,
        "z": selected.z,
        "solutions": [sol.to_dict() for sol in pair],
        "selected": selected.to_dict(),
        "matrix": [list(row) for row in selected.matrix],
        "det": selected.det,
        "isometry": is_mukai_isometry(transform_from_solution(selected)),
        "exclusion": witness.to_dict(),
    }
    if args.oracle:
        bound = args.bound if args.bound is not None else 4 * n + 20
        found = brute_force_oracle(n, bound)
        closed = {(s.c, s.x, s.alpha, s.y) for s in pair}
        scanned = {(s.c, s.x, s.alpha, s.y) for s in found}
        payload["oracle"] = {
            "bound": bound,
            "solutions": [s.to_dict() for s in found],
            "agrees": closed == scanned,
        }
    return 0, payload


def _cmd_reflexive_decompose(args):
    spec = _load_surface(args)
    rs = validate_reflexive(spec, h_name=args.h_name, l_name=args.l_name)
    dec = decompose_l2h(rs)
    payload = {"ok": True, "d1": list(dec.d1.coords), "d2": list(dec.d2.coords)}
    if args.oracle:
        all_decs = decompose_brute_force(rs)
        key = tuple(sorted((dec.d1.coords, dec.d2.coords)))
        contained = any(
            tuple(sorted((d.d1.coords, d.d2.coords))) == key for d in all_decs
        )
        payload["oracle"] = {
            "decompositions": [d.to_dict() for d in all_decs],
            "contains_result": contained,
        }
    return 0, payload


def _cmd_reflexive_classify(args):
    spec = _load_surface(args)
    rs = validate_reflexive(spec, h_name=args.h_name, l_name=args.l_name)
    report = classify_type(rs, decompose_l2h(rs))
    return 0, {"ok": True, **report.to_dict()}


def _cmd_reflexive_kernel(args):
    variant = args.variant
    rs = _reflexive_surface(args, variant)
    t = transform_for(rs, variant)
    kernel = t.kernel
    report = check_sufficient(kernel)
    unit = ChernCharacter(1, t.source.zero(), Fraction(0))
    payload = {
        "ok": True,
        "variant": variant,
        "kernel": kernel.to_dict(),
        "declared_vanishing": [list(v.coords) for v in kernel.declared_vanishing],
        "report": report.to_dict(),
        "matrix": _matrix_json(t.matrix),
        "isometry": is_mukai_isometry(t),
        "structure_sheaf_image": _ch_dict(t.apply(unit)),
    }
    return 0, payload


def _cmd_hilb_moduli(args):
    if args.flavor == "no-cohomology":
        t = _no_cohomology_transform(args)
    else:
        variant = args.variant or "nondegenerate"
        rs = _reflexive_surface(args, variant)
        t = transform_for(rs, variant)
    v = hilb_moduli_vector(t, args.n, args.flavor)
    return 0, {
        "ok": True,
        "n": args.n,
        "flavor": args.flavor,
        "vector": _mukai_dict(v),
        "self_pairing": frac_str(mukai_pairing(v, v)),
    }


def _cmd_strata(args):
    spec = _load_surface(args)
    l = parse_class_expr(spec, args.l)
    m = parse_class_expr(spec, args.m)
    h = parse_class_expr(spec, args.h)
    a = Fraction(args.a) if args.a is not None else None
    report = strata_chain(l, m, h, args.z, surface=spec, a=a)
    return 0, {"ok": True, **report.to_dict()}


def _cmd_primitive_check(args):
    spec = _load_surface(args)
    h = parse_class_expr(spec, args.h)
    l = parse_class_expr(spec, args.l) if args.l else args.n * h
    excluded = check_ample_primitive(l, args.n, h, surface=spec)
    lsq = l.square
    payload = {
        "ok": True,
        "n": args.n,
        "h": list(h.coords),
        "l": list(l.coords),
        "lsq": lsq,
        "z": es_relation(lsq) if lsq % 4 == 0 and lsq >= -8 else None,
        "excluded": excluded,
    }
    return 0, payload


# ---------------------------------------------------------------------------
# parser


def _add_format(sub):
    sub.add_argument(
        "--format",
        choices=("json", "text"),
        default=None,
        help="output format (default: $K3FM_FORMAT or json)",
    )


def _add_surface(sub, required=True):
    sub.add_argument("--surface", required=required, help="path to a surface JSON file")


def _add_h_l_names(sub):
    sub.add_argument("--h-name", default="h", help="declared name of the degree-2 class")
    sub.add_argument("--l-name", default="l", help="declared name of the square -12 class")


def _add_builder(sub):
    sub.add_argument("--builder", choices=BUILDERS, required=True)
    _add_surface(sub, required=False)
    _add_h_l_names(sub)
    sub.add_argument(
        "--m-class",
        default=None,
        help="class expression for the no-cohomology builder (default: m)",
    )
    sub.add_argument("--lsq", type=int, default=None, help="generator square for builder pic1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="k3fm",
        description="Exact computations with rank-2 kernel transforms on K3 lattices.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("surface-validate", help="load and validate a surface file")
    _add_surface(sub)
    sub.add_argument("--reflexive", action="store_true", help="also check the h, l relations")
    _add_h_l_names(sub)
    _add_format(sub)
    sub.set_defaults(handler=_cmd_surface_validate)

    sub = subs.add_parser("chi", help="Euler characteristic of a line bundle class")
    _add_surface(sub)
    sub.add_argument("--class", dest="class_expr", required=True, help="class expression")
    _add_format(sub)
    sub.set_defaults(handler=_cmd_chi)

    sub = subs.add_parser("kernel-check", help="existence conditions for a kernel quadruple")
    _add_surface(sub)
    for field in ("a", "b", "c", "d"):
        sub.add_argument(f"--{field}", required=True, help=f"class expression for {field}")
    sub.add_argument(
        "--vanishing",
        action="append",
        default=[],
        help="extra declared no-cohomology class (repeatable)",
    )
    _add_format(sub)
    sub.set_defaults(handler=_cmd_kernel_check)

    sub = subs.add_parser("transform-apply", help="apply a built transform to a character")
    _add_builder(sub)
    sub.add_argument("--ch", required=True, help="input character: r,f...,t")
    _add_format(sub)
    sub.set_defaults(handler=_cmd_transform_apply)

    sub = subs.add_parser(
        "transform-crosscheck", help="compare a transform against its closed-form block"
    )
    _add_builder(sub)
    sub.add_argument("--formula", choices=sorted(CLOSED_FORMS), default=None)
    sub.add_argument("--max-entries", type=int, default=5, help="mismatch entries to show")
    _add_format(sub)
    sub.set_defaults(handler=_cmd_transform_crosscheck)

    sub = subs.add_parser("pic1", help="rank-1 existence test and constraint solver")
    sub.add_argument("--lsq", type=int, required=True, help="square of the ample generator")
    sub.add_argument("--oracle", action="store_true", help="run the brute-force search")
    sub.add_argument("--bound", type=int, default=None, help="oracle scan bound")
    _add_format(sub)
    sub.set_defaults(handler=_cmd_pic1)

    sub = subs.add_parser("reflexive-decompose", help="split l+2h into two -2 classes")
    _add_surface(sub)
    _add_h_l_names(sub)
    sub.add_argument("--oracle", action="store_true", help="also run the exhaustive search")
    _add_format(sub)
    sub.set_defaults(handler=_cmd_reflexive_decompose)

    sub = subs.add_parser("reflexive-classify", help="degree pattern of the decomposition")
    _add_surface(sub)
    _add_h_l_names(sub)
    _add_format(sub)
    sub.set_defaults(handler=_cmd_reflexive_classify)

    sub = subs.add_parser("reflexive-kernel", help="kernel and transform for a variant")
    sub.add_argument("--variant", choices=KERNEL_VARIANTS, required=True)
    _add_surface(sub, required=False)
    _add_h_l_names(sub)
    _add_format(sub)
    sub.set_defaults(handler=_cmd_reflexive_kernel)

    sub = subs.add_parser("hilb-moduli", help="Mukai vector of a transformed ideal sheaf")
    sub.add_argument("--n", type=int, required=True, help="number of points")
    sub.add_argument("--flavor", choices=HILB_FLAVORS, required=True)
    _add_surface(sub, required=False)
    _add_h_l_names(sub)
    sub.add_argument("--variant", choices=KERNEL_VARIANTS, default=None)
    sub.add_argument("--m-class", default=None, help="no-cohomology class expression")
    _add_format(sub)
    sub.set_defaults(handler=_cmd_hilb_moduli)

    sub = subs.add_parser("strata", help="slope inequality chain report")
    _add_surface(sub)
    sub.add_argument("--l", required=True, help="class expression for l")
    sub.add_argument("--m", required=True, help="class expression for m")
    sub.add_argument("--h", required=True, help="class expression for the polarization")
    sub.add_argument("--z", type=int, required=True, help="stratum length")
    sub.add_argument("--a", default=None, help="window bound for the gap predicate")
    _add_format(sub)
    sub.set_defaults(handler=_cmd_strata)

    sub = subs.add_parser("primitive-check", help="exclusion test for l = n*h polarizations")
    _add_surface(sub)
    sub.add_argument("--h", required=True, help="class expression for the ample generator")
    sub.add_argument("--n", type=int, required=True, help="multiplier, at least 2")
    sub.add_argument("--l", default=None, help="class expression for l (default n*h)")
    _add_format(sub)
    sub.set_defaults(handler=_cmd_primitive_check)

    return parser


def _resolve_format(args) -> str:
    fmt = args.format or os.environ.get("K3FM_FORMAT") or "json"
    if fmt not in ("json", "text"):
        raise ValueError(f"unsupported output format {fmt!r}; expected json or text")
    return fmt


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        fmt = _resolve_format(args)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    command = args.command
    try:
        status, payload = args.handler(args)
    except RejectionError as exc:
        _emit(
            {
                "command": command,
                "ok": False,
                "error": {"kind": "rejection", "message": str(exc)},
            },
            fmt,
        )
        return 1
    except (ValueError, OSError) as exc:
        _emit(
            {
                "command": command,
                "ok": False,
                "error": {"kind": "input", "message": str(exc)},
            },
            fmt,
        )
        return 2
    _emit({"command": command, **payload}, fmt)
    return status


if __name__ == "__main__":
    sys.exit(main())
