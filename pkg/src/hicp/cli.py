"""Command-line entry point: validate | solve | render | demo | roundtrip.

Exit codes: 0 success/feasible, 1 usage or malformed input, 2 infeasible,
3 feasible under partial enumeration only, 4 solver failure, 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys

from . import geometry as geo
from .complexes import build_complex, edge_key, triangulate
from .errors import HicpError, IoError
from .fixtures import fixture_spec, reference_pattern
from .geometry import EUCLIDEAN, GEOMETRIES, EdgeRadii
from .layout import (
    delaunay_report,
    develop,
    export_json,
    export_svg,
    gauss_bonnet_check,
    layout_to_dict,
    merge_redundant,
)
from .polytope import (
    FEASIBLE,
    INFEASIBLE,
    PARTIAL,
    check_feasibility,
    single_star_check,
)
from .solver import (
    CONVERGED,
    SolveOptions,
    extract_angles,
    make_target,
    reference_coords,
    solve,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_PARTIAL = 3
EXIT_SOLVER = 4
EXIT_IO = 5


def _apply_thread_cap():
    cap = os.environ.get("HICP_THREADS")
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ.setdefault(var, cap)


def _edge_from_key(s):
    try:
        i, j = s.split("-")
        return edge_key(int(i), int(j))
    except ValueError:
        raise IoError(f"bad edge key {s!r}; expected 'i-j'")


def _ekey(e):
    return f"{e[0]}-{e[1]}"


def load_input(path, geometry=None):
    """Read a problem description from a JSON file or a 'fixture:NAME'
    reference.  Returns (spec dict, geometry, theta or None, Theta or
    None)."""
    if path.startswith("fixture:"):
        spec = fixture_spec(path[len("fixture:"):])
        return spec, geometry or EUCLIDEAN, None, None
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(str(exc))
    except json.JSONDecodeError as exc:
        raise HicpError(f"malformed JSON input: {exc}")
    spec = {
        "vertices": data["vertices"],
        "faces": data["faces"],
        "tangent_edges": data.get("tangent_edges", []),
    }
    g = geometry or data.get("geometry", EUCLIDEAN)
    theta = data.get("theta")
    if theta is not None:
        theta = {_edge_from_key(k): float(v) for k, v in theta.items()}
    Theta = data.get("Theta")
    if Theta is not None:
        Theta = {int(k): float(v) for k, v in Theta.items()}
    return spec, g, theta, Theta


def _target_from_input(cc, g, theta, Theta):
    """Angle data from explicit input, or the reference pattern's angles
    when the input carries none."""
    if theta is None and Theta is None:
        T, er = reference_pattern(cc, g)
        tc = geo.psi_inv_surface(T, er, g)
        return extract_angles(T, tc, g)
    return make_target(cc, g, theta or {}, Theta or {})


def _emit(obj, path=None):
    text = json.dumps(obj, sort_keys=True, indent=1) + "\n"
    if path:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoError(str(exc))
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Commands


def cmd_validate(args):
    spec, g, theta, Theta = load_input(args.input, args.geometry)
    cc = build_complex(spec)
    t = _target_from_input(cc, g, theta, Theta)
    rep = check_feasibility(cc, t, cap=args.enum_cap)
    _emit(rep.to_dict(), args.output)
    if rep.verdict == FEASIBLE:
        return EXIT_OK
    if rep.verdict == PARTIAL:
        return EXIT_PARTIAL
    return EXIT_INFEASIBLE


def _solution_dict(spec, g, T, sol):
    out = {
        "solution_version": 1,
        "geometry": g,
        "input": {"geometry": g, "vertices": spec["vertices"],
                  "faces": [list(f) for f in spec["faces"]],
                  "tangent_edges": [list(e) for e in
                                    spec.get("tangent_edges", [])]},
        "status": sol.status,
        "iterations": sol.iterations,
        "residual_norm": (sol.residual_norm
                          if math.isfinite(sol.residual_norm) else None),
        "trace": [list(row) for row in sol.trace],
    }
    if sol.coords is not None:
        er = geo.psi_surface(T, sol.coords, g)
        out["coords"] = {
            "a": {_ekey(e): v for e, v in sol.coords.a.items()},
            "b": {str(k): v for k, v in sol.coords.b.items()},
        }
        out["lengths"] = {
            "l": {_ekey(e): v for e, v in er.l.items()},
            "r": {str(k): v for k, v in er.r.items()},
        }
    if sol.realized_angles is not None:
        out["realized"] = {
            "theta": {_ekey(e): v
                      for e, v in sol.realized_angles.theta.items()},
            "Theta": {str(k): v
                      for k, v in sol.realized_angles.Theta.items()},
        }
    if sol.report is not None:
        out["feasibility"] = sol.report.to_dict()
    return out


def cmd_solve(args):
    spec, g, theta, Theta = load_input(args.input, args.geometry)
    cc = build_complex(spec)
    t = _target_from_input(cc, g, theta, Theta)
    T = triangulate(cc)
    opts = SolveOptions(grad_tol=args.tol, max_iter=args.max_iter)
    sol = solve(T, t, opts)
    out = _solution_dict(spec, g, T, sol)
    _emit(out, args.output)
    if sol.status == CONVERGED:
        return EXIT_OK
    if sol.status == INFEASIBLE:
        return EXIT_INFEASIBLE
    return EXIT_SOLVER


def cmd_render(args):
    try:
        with open(args.input) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(str(exc))
    except json.JSONDecodeError as exc:
        raise HicpError(f"malformed solution JSON: {exc}")
    if "coords" not in data:
        raise HicpError("solution carries no coordinates to render")
    g = data["geometry"]
    cc = build_complex(data["input"])
    T = triangulate(cc)
    a = {_edge_from_key(k): float(v)
         for k, v in data["coords"]["a"].items()}
    b = {int(k): float(v) for k, v in data["coords"]["b"].items()}
    tc = geo.TetraCoords(a=a, b=b)
    sl = develop(T, tc, g)
    try:
        sl = merge_redundant(sl)
    except HicpError:
        pass  # render the triangulated development as-is
    if args.svg:
        export_svg(sl, args.svg)
    if args.output:
        export_json(sl, args.output)
    if not args.svg and not args.output:
        _emit(layout_to_dict(sl))
    return EXIT_OK


def cmd_demo(args):
    spec, g, _theta, _Theta = load_input(args.input, args.geometry)
    cc = build_complex(spec)
    T, er = reference_pattern(cc, g)
    tc = geo.psi_inv_surface(T, er, g)
    target = extract_angles(T, tc, g)
    sl = merge_redundant(develop(T, tc, g))
    rep = delaunay_report(sl)
    out = {
        "demo_version": 1,
        "geometry": g,
        "angles": {
            "theta": {_ekey(e): v for e, v in target.theta.items()},
            "Theta": {str(k): v for k, v in target.Theta.items()},
        },
        "delaunay": {_ekey(e): r for e, r in rep.items()},
        "gauss_bonnet": gauss_bonnet_check(sl),
        "layout": layout_to_dict(sl),
    }
    _emit(out, args.output)
    if args.svg:
        export_svg(sl, args.svg)
    return EXIT_OK


def sample_er(T, er0, g, rng, frac=0.1):
    """One random (l, r) in a sub-box around er0: each coordinate moves
    uniformly within frac of the smallest constraint slack at er0."""
    cc = T.base
    slack = math.inf
    for tri in T.triangles:
        l3, r3 = geo.tri_er(T, er0, tri)
        tags = geo.triangle_tags(T, tri)
        for m in range(3):
            u, v = geo.CORNERS_OF_EDGE[m]
            if tags.ec[m] != 0:
                slack = min(slack, l3[m] - (r3[u] + r3[v]))
            slack = min(slack, l3[(m + 1) % 3] + l3[(m + 2) % 3] - l3[m])
    d = frac * slack
    while True:
        r = {k: (v + rng.uniform(-d / 2, d / 2) if v > 0 else 0.0)
             for k, v in er0.r.items()}
        l = {}
        for e, v in er0.l.items():
            if e in cc.e0:
                l[e] = r[e[0]] + r[e[1]]  # tangency is an equality
            else:
                l[e] = v + rng.uniform(-d, d)
        er = EdgeRadii(l=l, r=r)
        try:
            geo.check_er_surface(T, er, g)
            return er
        except HicpError:
            continue


def cmd_roundtrip(args):
    spec, g, _theta, _Theta = load_input(args.input, args.geometry)
    cc = build_complex(spec)
    T = triangulate(cc)
    if T.e_pi:
        # identifiability sampling is only well-posed when every edge
        # angle is free: fan diagonals of a sampled (l, r) are not
        # redundant, so run on the triangle refinement (same edges and
        # triangles, diagonals promoted to free edges).  The class
        # lengths then give an interior base point; the original
        # complex's reference pattern would anchor the diagonals at
        # theta = pi, the boundary of the angle ranges.
        spec = {"vertices": spec["vertices"],
                "faces": [list(t.verts) for t in T.triangles],
                "tangent_edges": spec.get("tangent_edges", [])}
        cc = build_complex(spec)
        T = triangulate(cc)
    tc0 = reference_coords(T, g)
    er0 = geo.psi_surface(T, tc0, g)
    rng = random.Random(args.seed)
    opts = SolveOptions(grad_tol=args.tol, max_iter=args.max_iter)
    errors = []
    statuses = []
    frac = 0.1
    for _ in range(args.samples):
        # resample (shrinking the box) until the extracted angles are in
        # the admissible ranges: ER contains non-Delaunay points whose
        # realized theta leaves (0, pi)
        for _attempt in range(500):
            er = sample_er(T, er0, g, rng, frac)
            tc = geo.project_gauge(T, geo.psi_inv_surface(T, er, g), g)
            target = extract_angles(T, tc, g)
            if all(0.0 < v < math.pi for v in target.theta.values()) \
                    and not single_star_check(cc, target):
                break
            frac *= 0.7
        else:
            raise HicpError("could not sample angle-admissible (l, r)")
        sol = solve(T, target, opts)
        statuses.append(sol.status)
        if sol.status != CONVERGED:
            errors.append(math.inf)
            continue
        got = geo.project_gauge(T, sol.coords, g)
        err = max(max(abs(got.a[e] - tc.a[e]) for e in tc.a),
                  max(abs(got.b[k] - tc.b[k]) for k in tc.b)
                  if tc.b else 0.0)
        errors.append(err)
    max_err = max(errors)
    out = {
        "roundtrip_version": 1,
        "geometry": g,
        "seed": args.seed,
        "samples": args.samples,
        "statuses": statuses,
        "errors": errors,
        "max_error": max_err,
    }
    _emit(out, args.output)
    print(f"max recovery error: {max_err:.3e}")
    return EXIT_OK if max_err < 1e-6 else EXIT_SOLVER


# ---------------------------------------------------------------------------
# Parser


def build_parser():
    p = argparse.ArgumentParser(
        prog="hicp",
        description="Hyper-ideal circle patterns on closed surfaces: "
                    "feasibility, solving, and rendering.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, need_input=True):
        sp.add_argument("--input", required=need_input,
                        help="JSON file or fixture:NAME")
        sp.add_argument("--output", help="output JSON path (default stdout)")
        sp.add_argument("--geometry", choices=sorted(GEOMETRIES),
                        help="overrides the input's geometry")
        sp.add_argument("--tol", type=float, default=1e-10)
        sp.add_argument("--max-iter", type=int, default=100)
        sp.add_argument("--enum-cap", type=int, default=22)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--svg", help="SVG output path")

    sp = sub.add_parser("validate", help="angle-polytope membership check")
    common(sp)
    sp.set_defaults(fn=cmd_validate)
    sp = sub.add_parser("solve", help="solve for the circle pattern")
    common(sp)
    sp.set_defaults(fn=cmd_solve)
    sp = sub.add_parser("render", help="render a solution JSON")
    common(sp)
    sp.set_defaults(fn=cmd_render)
    sp = sub.add_parser("demo", help="reference pattern for a complex")
    common(sp)
    sp.set_defaults(fn=cmd_demo)
    sp = sub.add_parser("roundtrip",
                        help="sample, extract angles, re-solve, compare")
    common(sp)
    sp.add_argument("--samples", type=int, default=20)
    sp.set_defaults(fn=cmd_roundtrip)
    return p


def main(argv=None):
    _apply_thread_cap()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.fn(args)
    except IoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except HicpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
