"""Damped Newton minimization of the angle functional over the gauge
section of the tetrahedral coordinate space, plus the reference-pattern
initialization (face-circle radius solve omega)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .complexes import edge_key
from .errors import DomainError, IndexMismatch
from .geometry import (
    EUCLIDEAN,
    HYPERBOLIC,
    EdgeRadii,
    TetraCoords,
    check_geometry,
)
from .polytope import (
    AngleData,
    Theta_full,
    make_angle_data,
    single_star_check,
)

CONVERGED = "Converged"
INFEASIBLE = "Infeasible"
MAXITER = "MaxIter"
BOUNDARY = "BoundaryDegeneration"


@dataclass(frozen=True)
class SolveOptions:
    grad_tol: float = 1e-10
    max_iter: int = 100
    line_search_ratio: float = 0.5
    armijo: float = 1e-4
    te_margin: float = 1e-12

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise DomainError("grad_tol must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")


@dataclass(frozen=True)
class Solution:
    coords: TetraCoords
    residual_norm: float
    iterations: int
    realized_angles: AngleData | None
    status: str
    trace: tuple = ()
    report: object = None  # FeasibilityReport when pre-check failed


# ---------------------------------------------------------------------------
# Reference coordinates (uniform class-length base point)


def reference_coords(T, g):
    """Tetrahedral coordinates of the uniform-edge-length reference
    configuration, projected to the gauge section.  Free-edge lengths
    are shrunk where the class lengths would break a triangle
    inequality (possible when tangency and free edges share a
    triangle)."""
    check_geometry(g)
    rc, ec = geo.reference_constants(g)
    cc = T.base
    l = {}
    for e in T.edges:
        l[e] = 2 * rc if e in cc.e0 else 2 * (rc + ec)
    r = {v: (rc if v in cc.v1 else 0.0) for v in cc.vertices}

    tri_edges = [[edge_key(t.verts[m], t.verts[(m + 1) % 3])
                  for m in range(3)] for t in T.triangles]
    for _ in range(100):
        changed = False
        for es in tri_edges:
            for m in range(3):
                cap = l[es[(m + 1) % 3]] + l[es[(m + 2) % 3]]
                if l[es[m]] >= cap and es[m] not in cc.e0:
                    floor = r[es[m][0]] + r[es[m][1]]
                    l[es[m]] = max(0.9 * cap, 0.5 * (floor + cap))
                    changed = True
        if not changed:
            break
    er = EdgeRadii(l=l, r=r)
    geo.check_er_surface(T, er, g, exc=DomainError)
    tc = geo.psi_inv_surface(T, er, g)
    return geo.project_gauge(T, tc, g)


# ---------------------------------------------------------------------------
# Face-circle radius solve (omega)


def _vertex_distance(g, vclass, x, rc):
    """Distance from the face-circle center to a face vertex, as a
    function of the positive-circle vertex distance x."""
    if vclass == 1:
        return x
    # point vertices sit on the face circle: distance = R with
    # orthogonality R from the positive-circle distance x
    if g == EUCLIDEAN:
        y2 = x * x - rc * rc
        if y2 <= 0:
            raise DomainError("x below the orthogonality bound")
        return math.sqrt(y2)
    c = math.cosh(x) / math.cosh(rc)
    if c <= 1.0:
        raise DomainError("x below the orthogonality bound")
    return math.acosh(c)


def _chord_angle(g, du, dv, L):
    """Angle subtended at the face-circle center by a chord of length L
    whose endpoints are at distances du, dv."""
    if g == EUCLIDEAN:
        c = (du * du + dv * dv - L * L) / (2 * du * dv)
    else:
        c = ((math.cosh(du) * math.cosh(dv) - math.cosh(L))
             / (math.sinh(du) * math.sinh(dv)))
    if c >= 1.0:
        return 0.0
    if c <= -1.0:
        return math.pi
    return math.acos(c)


def omega_value(vclasses, eclasses, g, x):
    """Total angle at the face-circle center of the reference polygon,
    as a function of the vertex distance x."""
    rc, ec = geo.reference_constants(g)
    n = len(vclasses)
    total = 0.0
    for t in range(n):
        cu, cv = vclasses[t], vclasses[(t + 1) % n]
        L = 2 * rc if eclasses[t] == 0 else 2 * (rc + ec)
        du = _vertex_distance(g, cu, x, rc)
        dv = _vertex_distance(g, cv, x, rc)
        total += _chord_angle(g, du, dv, L)
    return total


def _omega_floor(vclasses, eclasses, g):
    """chi_0: the largest x at which some edge chord degenerates (the
    subtended angle reaches pi)."""
    rc, ec = geo.reference_constants(g)
    n = len(vclasses)
    floor = rc + 1e-15 if any(c == 0 for c in vclasses) else 1e-15
    for t in range(n):
        cu, cv = vclasses[t], vclasses[(t + 1) % n]
        L = 2 * rc if eclasses[t] == 0 else 2 * (rc + ec)

        def slack(x):
            du = _vertex_distance(g, cu, x, rc)
            dv = _vertex_distance(g, cv, x, rc)
            return du + dv - L

        lo, hi = floor, floor + 1.0
        while slack(hi) < 0:
            hi += 1.0
        if slack(lo) > 0:
            continue
        for _ in range(200):
            mid = (lo + hi) / 2
            if slack(mid) < 0:
                lo = mid
            else:
                hi = mid
        floor = max(floor, hi)
    return floor


def omega_bisect(vclasses, eclasses, g):
    """The unique x with omega(x) = 2 pi, by bisection on the strictly
    decreasing omega over (chi_0, infinity)."""
    lo = _omega_floor(vclasses, eclasses, g)
    hi = lo + 1.0
    while omega_value(vclasses, eclasses, g, hi) > 2 * math.pi:
        lo = hi
        hi += 1.0
    for _ in range(200):
        mid = (lo + hi) / 2
        if omega_value(vclasses, eclasses, g, mid) > 2 * math.pi:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * (1 + hi):
            break
    return (lo + hi) / 2


def omega_solve(vclasses, eclasses, g):
    """Positive-circle vertex distance x* of the reference polygon's
    face circle.  vclasses: per-vertex class around the face; eclasses:
    per-edge class (edge t joins vertices t, t+1).

    Special cases: the quadrilateral with four tangency edges returns
    its closed form; triangles are solved directly from the reference
    triangle's face circle."""
    check_geometry(g)
    n = len(vclasses)
    if n < 3 or len(eclasses) != n:
        raise IndexMismatch("face class lists must have equal length >= 3")
    if n == 4 and all(c == 0 for c in eclasses):
        if g == EUCLIDEAN:
            return math.sqrt(2.0)
        return math.asinh(math.sqrt(2.0) / 8.0)
    if n == 3:
        rc, _ec = geo.reference_constants(g)
        tags = geo.TriangleTags(vc=tuple(vclasses), ec=tuple(eclasses))
        fc = geo.face_circle(geo.reference_er_triangle(tags, g), g)
        return geo.vertex_dual_length(fc.R, rc, g)
    return omega_bisect(vclasses, eclasses, g)


# ---------------------------------------------------------------------------
# Functional gradient / Hessian


def free_variables(T):
    """Canonical ordering of the optimization variables."""
    return ([("a", e) for e in T.free_edges]
            + [("b", k) for k in T.v1_vertices])


def pack(T, tc):
    return np.array([tc.a[e] if kind == "a" else tc.b[e]
                     for kind, e in free_variables(T)])


def unpack(T, x):
    a, b = {}, {}
    for val, (kind, key) in zip(x, free_variables(T)):
        if kind == "a":
            a[key] = float(val)
        else:
            b[key] = float(val)
    return TetraCoords(a=a, b=b)


def lifted_targets(T, target):
    """(theta target per free edge of T, Theta target per V1 vertex):
    stored values on E1, pi on the fan diagonals, derived on V0."""
    cc = T.base
    theta = {}
    for e in T.free_edges:
        theta[e] = math.pi if e in T.e_pi else target.theta[e]
    return theta, dict(target.Theta)


def realized_sums(T, tc, g):
    """(sum of alpha per edge, sum of beta per vertex) over all
    triangles; raises NotInTE outside the domain."""
    alpha_sum = {e: 0.0 for e in T.edges}
    beta_sum = {v: 0.0 for v in T.base.vertices}
    for tri in T.triangles:
        tags = geo.triangle_tags(T, tri)
        ta = geo.tetra_angles(geo.tri_coords(T, tc, tri), tags, g)
        i, j, k = tri.verts
        for m, (u, v) in enumerate(((i, j), (j, k), (k, i))):
            alpha_sum[edge_key(u, v)] += ta.alpha[m]
        for c, v in enumerate((i, j, k)):
            beta_sum[v] += ta.beta[c]
    return alpha_sum, beta_sum


def grad_U(T, tc, target, g):
    """Gradient of the angle functional: realized minus target angles,
    one entry per free variable."""
    theta_t, Theta_t = (target if isinstance(target, tuple)
                        else lifted_targets(T, target))
    alpha_sum, beta_sum = realized_sums(T, tc, g)
    vals = []
    for kind, key in free_variables(T):
        if kind == "a":
            vals.append(alpha_sum[key] - theta_t[key])
        else:
            vals.append(beta_sum[key] - Theta_t[key])
    return np.array(vals)


def hessian_U(T, tc, g, target=None, scheme="central", symmetrize=True):
    """Finite-difference Hessian of the functional (Jacobian of grad_U),
    symmetrized unless ``symmetrize`` is false.  The target shifts the
    gradient by a constant and does not affect the Hessian; a zero
    target is used.  ``scheme``: "central" (default, more accurate) or
    "forward" (half the cost, used inside the Newton loop)."""
    if target is None:
        zero = ({e: 0.0 for e in T.free_edges},
                {k: 0.0 for k in T.base.v1})
    else:
        zero = (target if isinstance(target, tuple)
                else lifted_targets(T, target))
    x = pack(T, tc)
    n = len(x)
    H = np.empty((n, n))
    g0 = None
    if scheme == "forward":
        g0 = grad_U(T, unpack(T, x), zero, g)
    for m in range(n):
        h = 1e-5 * (1 + abs(x[m]))
        xp = x.copy(); xp[m] += h
        gp = grad_U(T, unpack(T, xp), zero, g)
        if scheme == "forward":
            H[:, m] = (gp - g0) / h
        else:
            xm = x.copy(); xm[m] -= h
            gm = grad_U(T, unpack(T, xm), zero, g)
            H[:, m] = (gp - gm) / (2 * h)
    return (H + H.T) / 2 if symmetrize else H


def gauge_vector(T):
    """The gauge direction in packed coordinates."""
    da, db = geo.gauge_direction(T)
    return np.array([da[key] if kind == "a" else db[key]
                     for kind, key in free_variables(T)])


# ---------------------------------------------------------------------------
# Newton solver


def extract_angles(T, tc, g):
    """Realized angle data of a coordinate point."""
    alpha_sum, beta_sum = realized_sums(T, tc, g)
    cc = T.base
    theta = {e: alpha_sum[e] for e in cc.e1}
    Theta = {k: beta_sum[k] for k in cc.v1}
    return AngleData(geometry=g, theta=theta, Theta=Theta)


def _pre_check(cc, target):
    """Cheap necessary feasibility conditions (ranges, total-angle
    identity, single-star inequalities)."""
    import math as _m
    g = target.geometry
    euclid = g == EUCLIDEAN
    viols = []
    for e in sorted(cc.e1):
        v = target.theta[e]
        if not 0.0 < v < _m.pi:
            viols.append(("E1" if euclid else "H1", {"edge": list(e)}, v, None))
    for k in sorted(cc.v1):
        if not target.Theta[k] > 0:
            viols.append(("E2" if euclid else "H2", {"vertex": k},
                          target.Theta[k], 0.0))
    if not viols:
        ThetaF = Theta_full(cc, target)
        total = sum(2 * _m.pi - ThetaF[k] for k in ThetaF)
        tgt = 2 * _m.pi * cc.chi
        tol = 1e-12 * (1 + len(ThetaF))
        if euclid and abs(total - tgt) > tol:
            viols.append(("E3", {"surface": True}, total, tgt))
        if not euclid and not total - tgt > tol:
            viols.append(("H3", {"surface": True}, total, tgt))
    if not viols:
        viols.extend(single_star_check(cc, target))
    return viols


def solve(T, target, opts=None):
    """Newton solve for the coordinates realizing the target angles."""
    if opts is None:
        opts = SolveOptions()
    g = target.geometry
    check_geometry(g)
    cc = T.base
    if set(target.theta) != set(cc.e1) or set(target.Theta) != set(cc.v1):
        raise IndexMismatch("target angle data does not match the complex")

    viols = _pre_check(cc, target)
    if viols:
        from .polytope import FeasibilityReport
        ThetaF = Theta_full(cc, target)
        gb = (sum(2 * math.pi - ThetaF[k] for k in ThetaF)
              - 2 * math.pi * cc.chi)
        rep = FeasibilityReport(verdict=INFEASIBLE,
                                violations=tuple(viols),
                                gauss_bonnet_residual=gb)
        return Solution(coords=None, residual_norm=math.inf, iterations=0,
                        realized_angles=None, status=INFEASIBLE,
                        report=rep)

    targets = lifted_targets(T, target)
    x = pack(T, reference_coords(T, g))
    n = len(x)

    if g == EUCLIDEAN:
        c = gauge_vector(T)
        c = c / np.linalg.norm(c)
        # orthonormal basis of the section tangent (complement of c)
        q, _r = np.linalg.qr(np.eye(n) - np.outer(c, c))
        # keep n-1 independent columns
        basis = []
        for col in q.T:
            col = col - c * (c @ col)
            for b_ in basis:
                col = col - b_ * (b_ @ col)
            nrm = np.linalg.norm(col)
            if nrm > 1e-8:
                basis.append(col / nrm)
        N = np.array(basis).T
    else:
        N = np.eye(n)

    def in_te(xv):
        return geo.in_te(T, unpack(T, xv), g, margin=opts.te_margin)

    gvec = grad_U(T, unpack(T, x), targets, g)
    gnorm = float(np.max(np.abs(gvec)))
    mu = 0.0
    collapses = 0
    trace = []
    status = MAXITER
    it = 0
    for it in range(1, opts.max_iter + 1):
        if gnorm <= opts.grad_tol:
            status = CONVERGED
            it -= 1
            break
        H = hessian_U(T, unpack(T, x), g, scheme="forward")
        Hr = N.T @ H @ N
        gr = N.T @ gvec
        accepted = False
        for _attempt in range(30):
            try:
                delta = np.linalg.solve(
                    Hr + mu * np.eye(Hr.shape[0]), -gr)
            except np.linalg.LinAlgError:
                delta = None
            if delta is not None:
                step = N @ delta
                s = 1.0
                while s > 1e-14:
                    x_new = x + s * step
                    if in_te(x_new):
                        g_new = grad_U(T, unpack(T, x_new), targets, g)
                        gn_new = float(np.max(np.abs(g_new)))
                        if gn_new <= (1 - opts.armijo * s) * gnorm:
                            break
                    s *= opts.line_search_ratio
                else:
                    s = 0.0
                if s > 0.0:
                    if float(np.max(np.abs(s * step))) < 1e-12:
                        collapses += 1
                    else:
                        collapses = 0
                    x, gvec, gnorm = x_new, g_new, gn_new
                    mu *= 0.1
                    accepted = True
                    trace.append((it, gnorm, s))
                    break
            # rejected: increase damping
            mu = 10 * mu if mu > 0 else 1e-8 * (1 + np.linalg.norm(H))
        if not accepted:
            collapses += 1
            trace.append((it, gnorm, 0.0))
        if collapses >= 5 and gnorm > 1e3 * opts.grad_tol:
            status = BOUNDARY
            break
    else:
        if gnorm <= opts.grad_tol:
            status = CONVERGED
    if gnorm <= opts.grad_tol:
        status = CONVERGED

    tc = geo.project_gauge(T, unpack(T, x), g)
    realized = extract_angles(T, tc, g) if status == CONVERGED else None
    return Solution(coords=tc, residual_norm=gnorm, iterations=it,
                    realized_angles=realized, status=status,
                    trace=tuple(trace))


def make_target(cc, geometry, theta, Theta):
    """Convenience validator (delegates to the polytope module)."""
    return make_angle_data(cc, geometry, theta, Theta)
