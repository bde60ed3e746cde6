"""Membership test for target angle data in the angle-data polytope.

The conditions, checked in order:
  1 (E1/H1): theta strictly inside (0, pi) on free edges.
  2 (E2/H2): Theta strictly positive on positive-circle vertices; point
     vertices carry the derived value Theta_k = sum(pi - theta_ik).
  3 (E3): Euclidean total angle identity sum(2 pi - Theta) = 2 pi chi(S)
     within tolerance; (H3): strictly greater for hyperbolic.
  4 (E4/H4): for every strict admissible domain Omega (excluding the
     open star of a point vertex, whose inequality degenerates to the
     condition-2 identity):
         sum over boundary dual edges (pi - theta_ij)
         + sum over vertices inside (2 pi - Theta_k)
         > 2 pi chi(Omega) - pi |boundary ∩ V|,
     with theta extended by 0 on tangency edges (which realizes the
     tangency-corrected variant of the inequality automatically).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .complexes import (
    admissible_domains,
    boundary_counts,
    euler_char,
    hat_complex,
)
from .errors import IndexMismatch
from .geometry import EUCLIDEAN, check_geometry

FEASIBLE = "Feasible"
INFEASIBLE = "Infeasible"
PARTIAL = "FeasibleUnderPartialCheck"


@dataclass(frozen=True)
class AngleData:
    """Target angles: theta on free (E1) edges, Theta on positive-circle
    (V1) vertices.  Values on E0/V0 are derived, never stored."""

    geometry: str
    theta: dict  # edge -> radians in (0, pi)
    Theta: dict  # vertex -> radians > 0


def make_angle_data(cc, geometry, theta, Theta):
    """Validate index sets against the complex."""
    check_geometry(geometry)
    theta = {tuple(sorted(e)): float(v) for e, v in theta.items()}
    Theta = {k: float(v) for k, v in Theta.items()}
    if set(theta) != set(cc.e1):
        missing = set(cc.e1) - set(theta)
        extra = set(theta) - set(cc.e1)
        raise IndexMismatch(
            f"theta keys do not match the free edges: missing {sorted(missing)},"
            f" unexpected {sorted(extra)}")
    for k in Theta:
        if k in cc.v0:
            raise IndexMismatch(
                f"Theta given for point vertex {k}: that value is derived")
    if set(Theta) != set(cc.v1):
        missing = set(cc.v1) - set(Theta)
        raise IndexMismatch(f"Theta missing for vertices {sorted(missing)}")
    return AngleData(geometry=geometry, theta=theta, Theta=Theta)


def theta_extended(cc, t):
    """theta on every base edge: stored on E1, zero on E0."""
    full = dict(t.theta)
    for e in cc.e0:
        full[e] = 0.0
    return full


def Theta_full(cc, t):
    """Theta on every vertex: stored on V1, derived on V0."""
    th = theta_extended(cc, t)
    full = dict(t.Theta)
    for k in cc.v0:
        full[k] = sum(math.pi - th[e] for e in cc.edges if k in e)
    return full


@dataclass(frozen=True)
class FeasibilityReport:
    verdict: str
    violations: tuple  # of (condition id, witness, lhs, rhs)
    gauss_bonnet_residual: float
    partial: bool = False

    @property
    def feasible(self):
        return self.verdict in (FEASIBLE, PARTIAL)

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "violations": [
                {"condition": c, "witness": w, "lhs": lhs, "rhs": rhs}
                for c, w, lhs, rhs in self.violations
            ],
            "gauss_bonnet_residual": self.gauss_bonnet_residual,
            "partial": self.partial,
        }


def _domain_witness(d):
    return sorted([list(g) for g in d.generators])


def domain_inequality(cc, h, d, theta_ext, ThetaF, e0_duals):
    """(lhs, rhs) of the condition-4 inequality for one strict domain."""
    dual_mult, n_v, _n_e0 = boundary_counts(h, d, e0_duals)
    lhs = sum((math.pi - theta_ext[e]) * m for e, m in dual_mult.items())
    lhs += sum(2 * math.pi - ThetaF[g[1]]
               for g in d.generators if g[0] == "v")
    rhs = 2 * math.pi * euler_char(d) - math.pi * n_v
    return lhs, rhs


def check_feasibility(cc, t, domains=None, cap=22, require_exhaustive=False):
    """Decide polytope membership of the angle data on the complex.

    ``domains``: pre-enumerated strict admissible domains (from the
    combinatorics module); enumerated here when omitted.
    """
    if not isinstance(t, AngleData):
        raise IndexMismatch("expected AngleData")
    check_geometry(t.geometry)
    if set(t.theta) != set(cc.e1) or set(t.Theta) != set(cc.v1):
        raise IndexMismatch("angle data index sets do not match the complex")

    violations = []
    euclidean = t.geometry == EUCLIDEAN

    for e in sorted(cc.e1):
        v = t.theta[e]
        if not 0.0 < v < math.pi:
            violations.append(("E1" if euclidean else "H1",
                               {"edge": list(e)}, v, None))
    for k in sorted(cc.v1):
        v = t.Theta[k]
        if not v > 0.0:
            violations.append(("E2" if euclidean else "H2",
                               {"vertex": k}, v, 0.0))

    ThetaF = Theta_full(cc, t)
    total = sum(2 * math.pi - ThetaF[k] for k in ThetaF)
    target = 2 * math.pi * cc.chi
    gb_residual = total - target
    nv = len(cc.v0) + len(cc.v1)
    tol = 1e-12 * (1 + nv)
    if euclidean:
        if abs(gb_residual) > tol:
            violations.append(("E3", {"surface": True}, total, target))
    else:
        if not gb_residual > tol:
            violations.append(("H3", {"surface": True}, total, target))

    partial = False
    if not violations:
        theta_ext = theta_extended(cc, t)
        if domains is None:
            h = hat_complex(cc)
            domains = admissible_domains(h, strict=True, cap=cap,
                                         require_exhaustive=require_exhaustive)
        else:
            h = None
        partial = getattr(domains, "partial", False)
        cond = "E4" if euclidean else "H4"
        e0_duals = None
        for d in domains:
            if h is None:
                h = d.hat
            if e0_duals is None:
                e0_duals = _e0_dual_indices(h, cc)
            star_of = d.is_open_star_of()
            if star_of is not None and star_of[0] == "v" \
                    and star_of[1] in cc.v0:
                continue  # condition-2 identity, not a constraint
            lhs, rhs = domain_inequality(cc, h, d, theta_ext, ThetaF,
                                         e0_duals)
            if not lhs > rhs + tol:
                violations.append((cond, {"domain": _domain_witness(d)},
                                   lhs, rhs))

    violations.sort(key=lambda v: (v[0], str(v[1])))
    if violations:
        verdict = INFEASIBLE
    elif partial:
        verdict = PARTIAL
    else:
        verdict = FEASIBLE
    return FeasibilityReport(verdict=verdict, violations=tuple(violations),
                             gauss_bonnet_residual=gb_residual,
                             partial=partial)


def _e0_dual_indices(h, cc):
    return {h.eindex[("dual", e)] for e in cc.e0}


def single_star_check(cc, t):
    """The condition-4 inequalities over open stars of positive-circle
    vertices only (a cheap necessary subset used by the solver's
    pre-check): for OStar(k), k in V1 the inequality reads
    sum over incident edges (pi - theta_ik) + (2 pi - Theta_k) > 2 pi."""
    th = theta_extended(cc, t)
    bad = []
    for k in sorted(cc.v1):
        lhs = sum(math.pi - th[e] for e in cc.edges if k in e)
        lhs += 2 * math.pi - t.Theta[k]
        rhs = 2 * math.pi
        if not lhs > rhs + 1e-12 * (1 + cc.degree(k)):
            bad.append((("E4" if t.geometry == EUCLIDEAN else "H4"),
                        {"domain": [["v", k]]}, lhs, rhs))
    return bad
