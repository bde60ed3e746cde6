"""Metric kernel: conversions among tetrahedral coordinates (a, b),
edge-lengths/radii (l, r), and decorated-triangle angles (alpha, beta);
face circles; dual lengths; Schlaefli volume.

Per-triangle data is passed as plain 3-tuples in the fixed order
``edges = (ij, jk, ki)``, ``corners = (i, j, k)``; corner ``v`` touches
the edges ``EDGES_AT_CORNER[v]``.  Class tags: vertex class 1 for a
positive-radius circle, 0 for a point circle; edge class 0 for forced
tangency (E0), 1 for a free angle, 2 for a fan diagonal (metrically
identical to 1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    InvariantViolation,
    NotInTE,
    PathLeavesDomain,
)

EUCLIDEAN = "euclidean"
HYPERBOLIC = "hyperbolic"
GEOMETRIES = (EUCLIDEAN, HYPERBOLIC)

EDGES_AT_CORNER = ((0, 2), (0, 1), (1, 2))
CORNERS_OF_EDGE = ((0, 1), (1, 2), (2, 0))


def check_geometry(g):
    if g not in GEOMETRIES:
        raise DomainError(f"unknown geometry {g!r}")


@dataclass(frozen=True)
class TriangleTags:
    """Class tags of one triangle: vc[corner] in {0,1}, ec[edge] in
    {0,1,2}."""

    vc: tuple
    ec: tuple

    def __post_init__(self):
        for m, c in enumerate(self.ec):
            if c == 0:
                u, v = CORNERS_OF_EDGE[m]
                if self.vc[u] == 0 or self.vc[v] == 0:
                    raise InvariantViolation(
                        "tangency edge with a point-circle endpoint"
                    )


@dataclass(frozen=True)
class TriangleAngles:
    alpha: tuple  # per edge, in [0, pi)
    beta: tuple  # per corner, in (0, pi)


@dataclass(frozen=True)
class FaceCircleData:
    R: float  # face-circle radius (geodesic)
    dist: tuple  # center-to-vertex distances, per corner


# ---------------------------------------------------------------------------
# Psi: tetrahedral coordinates -> edge lengths and radii


def vertex_radius(g, vclass, b):
    if vclass == 0:
        return 0.0
    if g == EUCLIDEAN:
        return math.exp(-b)
    if b <= 0.0:
        raise DomainError(f"hyperbolic b must be positive, got {b}")
    return math.asinh(1.0 / math.sinh(b))


def edge_length(g, eclass, cu, cv, a, bu, bv):
    """Geodesic length of one edge from the tetrahedral coordinates of
    its endpoints."""
    if g == EUCLIDEAN:
        if eclass == 0:
            return math.exp(-bu) + math.exp(-bv)
        if cu == 1 and cv == 1:
            s = (math.exp(-2 * bu) + math.exp(-2 * bv)
                 + 2 * math.exp(-bu - bv) * math.cosh(a))
            return math.sqrt(s)
        if cu == 0 and cv == 0:
            return math.exp(a / 2)
        b = bv if cu == 0 else bu
        return math.sqrt(math.exp(-2 * b) + math.exp(a - b))
    # hyperbolic
    if eclass == 0:
        return vertex_radius(g, 1, bu) + vertex_radius(g, 1, bv)
    if cu == 1 and cv == 1:
        if bu <= 0 or bv <= 0:
            raise DomainError("hyperbolic b must be positive")
        x = ((math.cosh(a) + math.cosh(bu) * math.cosh(bv))
             / (math.sinh(bu) * math.sinh(bv)))
        return math.acosh(x)
    if cu == 0 and cv == 0:
        return 2 * math.asinh(math.exp(a / 2))
    b = bv if cu == 0 else bu
    if b <= 0:
        raise DomainError("hyperbolic b must be positive")
    return math.acosh((math.exp(a) + math.cosh(b)) / math.sinh(b))


def psi(tc_tri, tags, g):
    """((a_ij, a_jk, a_ki), (b_i, b_j, b_k)) -> ((l...), (r...)).
    Slots fixed by class (a on E0, b on point corners) are ignored."""
    check_geometry(g)
    a3, b3 = tc_tri
    r3 = tuple(vertex_radius(g, tags.vc[v], b3[v]) for v in range(3))
    l3 = []
    for m in range(3):
        u, v = CORNERS_OF_EDGE[m]
        l3.append(edge_length(g, tags.ec[m], tags.vc[u], tags.vc[v],
                              a3[m], b3[u], b3[v]))
    return tuple(l3), r3


def inv_radius(g, vclass, r):
    if vclass == 0:
        return 0.0
    if r <= 0:
        raise InvariantViolation(f"positive-circle vertex with r = {r}")
    if g == EUCLIDEAN:
        return -math.log(r)
    return math.asinh(1.0 / math.sinh(r))


def inv_edge(g, eclass, cu, cv, l, ru, rv, bu, bv):
    if eclass == 0:
        return 0.0
    if g == EUCLIDEAN:
        if cu == 1 and cv == 1:
            return math.acosh((l * l - ru * ru - rv * rv) / (2 * ru * rv))
        if cu == 0 and cv == 0:
            return 2 * math.log(l)
        r = rv if cu == 0 else ru
        return math.log((l * l - r * r) / r)
    if cu == 1 and cv == 1:
        x = (math.cosh(l) * math.sinh(bu) * math.sinh(bv)
             - math.cosh(bu) * math.cosh(bv))
        return math.acosh(x)
    if cu == 0 and cv == 0:
        return 2 * math.log(math.sinh(l / 2))
    b = bv if cu == 0 else bu
    return math.log(math.cosh(l) * math.sinh(b) - math.cosh(b))


def psi_inv(er_tri, tags, g):
    """Inverse of psi on one triangle; validates the edge-radius
    invariants first."""
    check_geometry(g)
    l3, r3 = er_tri
    check_er_triangle(er_tri, tags, g)
    b3 = tuple(inv_radius(g, tags.vc[v], r3[v]) for v in range(3))
    a3 = []
    for m in range(3):
        u, v = CORNERS_OF_EDGE[m]
        a3.append(inv_edge(g, tags.ec[m], tags.vc[u], tags.vc[v],
                           l3[m], r3[u], r3[v], b3[u], b3[v]))
    return tuple(a3), b3


def check_er_triangle(er_tri, tags, g, margin=0.0, exc=InvariantViolation):
    """Edge-radius invariants on one triangle: positive lengths, strict
    triangle inequalities, l = r_u + r_v on E0 and l > r_u + r_v
    otherwise, r > 0 exactly on positive-circle corners."""
    l3, r3 = er_tri
    for v in range(3):
        if tags.vc[v] == 1 and r3[v] <= margin:
            raise exc(f"corner {v}: radius {r3[v]} not positive")
        if tags.vc[v] == 0 and r3[v] != 0.0:
            raise exc(f"corner {v}: point circle with radius {r3[v]}")
    scale = 1.0 + max(l3)
    for m in range(3):
        u, v = CORNERS_OF_EDGE[m]
        if not l3[m] > 0:
            raise exc(f"edge {m}: length {l3[m]} not positive")
        s = r3[u] + r3[v]
        if tags.ec[m] == 0:
            if abs(l3[m] - s) > 1e-9 * scale:
                raise exc(f"edge {m}: tangency edge with l != r_u + r_v")
        elif not l3[m] > s + margin:
            raise exc(f"edge {m}: l = {l3[m]} <= r_u + r_v = {s}")
    for m in range(3):
        if not l3[m] < l3[(m + 1) % 3] + l3[(m + 2) % 3] - margin:
            raise exc(f"edge {m}: triangle inequality fails for {l3}")


# ---------------------------------------------------------------------------
# Planar placements and face circles


def place_euclidean(l3):
    lij, ljk, lki = l3
    xk = (lij * lij + lki * lki - ljk * ljk) / (2 * lij)
    yk2 = lki * lki - xk * xk
    if yk2 <= 0:
        raise InvariantViolation(f"degenerate triangle {l3}")
    return (0.0, 0.0), (lij, 0.0), (xk, math.sqrt(yk2))


def place_hyperbolic(l3):
    """Poincare-disk placement: i at the origin, j on the positive real
    axis, k in the upper half disk."""
    lij, ljk, lki = l3
    cb = ((math.cosh(lij) * math.cosh(lki) - math.cosh(ljk))
          / (math.sinh(lij) * math.sinh(lki)))
    if not -1.0 < cb < 1.0:
        raise InvariantViolation(f"degenerate hyperbolic triangle {l3}")
    beta_i = math.acos(cb)
    zi = 0.0 + 0.0j
    zj = complex(math.tanh(lij / 2), 0.0)
    zk = math.tanh(lki / 2) * cmath.exp(1j * beta_i)
    return zi, zj, zk


def disk_circle_rep(z, r):
    """Euclidean (center, radius) representation in the Poincare disk of
    the hyperbolic circle with center z and radius r >= 0."""
    rho = 2 * math.atanh(abs(z))
    t1 = math.tanh((rho - r) / 2)
    t2 = math.tanh((rho + r) / 2)
    u = z / abs(z) if abs(z) > 0 else 1.0 + 0.0j
    return u * ((t1 + t2) / 2), (t2 - t1) / 2


def disk_distance(z, w):
    num = abs(z - w)
    den = abs(1 - z.conjugate() * w)
    return 2 * math.atanh(num / den)


def radical_center(points, radii):
    """Center and squared radius of the circle orthogonal to three
    circles (points given as complex or 2-tuples)."""
    ps = [complex(*p) if isinstance(p, tuple) else complex(p) for p in points]
    p0 = ps[0]
    n0 = p0.real * p0.real + p0.imag * p0.imag
    a11 = 2 * (ps[1].real - p0.real)
    a12 = 2 * (ps[1].imag - p0.imag)
    a21 = 2 * (ps[2].real - p0.real)
    a22 = 2 * (ps[2].imag - p0.imag)
    b1 = (ps[1].real ** 2 + ps[1].imag ** 2 - n0
          - radii[1] ** 2 + radii[0] ** 2)
    b2 = (ps[2].real ** 2 + ps[2].imag ** 2 - n0
          - radii[2] ** 2 + radii[0] ** 2)
    det = a11 * a22 - a12 * a21
    if det == 0.0:
        raise InvariantViolation("vertex-circle centers are collinear")
    o = complex((b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det)
    r2 = abs(o - p0) ** 2 - radii[0] ** 2
    return o, r2


def _disk_face_circle(l3, r3):
    """Euclidean rep of the face circle in the canonical disk placement,
    plus the vertex positions."""
    zs = place_hyperbolic(l3)
    reps = [disk_circle_rep(z, r) for z, r in zip(zs, r3)]
    o, R2 = radical_center([c for c, _ in reps], [rr for _, rr in reps])
    if R2 <= 0:
        raise InvariantViolation("no real orthogonal circle")
    Re = math.sqrt(R2)
    if abs(o) + Re >= 1.0:
        raise InvariantViolation("face circle leaves the hyperbolic plane")
    return zs, o, Re


def face_circle(er_tri, g):
    """The unique circle orthogonal to the three vertex circles:
    radius R and center-to-vertex distances."""
    check_geometry(g)
    l3, r3 = er_tri
    if g == EUCLIDEAN:
        pts = place_euclidean(l3)
        o, R2 = radical_center(pts, r3)
        if R2 <= 0:
            raise InvariantViolation("no real orthogonal circle")
        dist = tuple(abs(complex(*p) - o) for p in pts)
        return FaceCircleData(R=math.sqrt(R2), dist=dist)
    zs, o, Re = _disk_face_circle(l3, r3)
    d = abs(o)
    rho_far = 2 * math.atanh(d + Re)
    rho_near = 2 * math.atanh(d - Re)
    Rh = (rho_far - rho_near) / 2
    c_rho = (rho_far + rho_near) / 2
    u = o / d if d > 0 else 1.0 + 0.0j
    center = u * math.tanh(c_rho / 2)
    dist = tuple(disk_distance(center, z) for z in zs)
    return FaceCircleData(R=Rh, dist=dist)


# ---------------------------------------------------------------------------
# Decorated-triangle angles


def _euclidean_alphas(l3, r3):
    pts = [complex(*p) for p in place_euclidean(l3)]
    o, R2 = radical_center(pts, r3)
    if R2 <= 0:
        raise InvariantViolation("no real orthogonal circle")
    R = math.sqrt(R2)
    alphas = []
    for m in range(3):
        u, v = CORNERS_OF_EDGE[m]
        w = 3 - u - v
        p, q, third = pts[u], pts[v], pts[w]
        t = (q - p) / abs(q - p)
        n = complex(-t.imag, t.real)
        # make n point towards the third vertex (triangle interior side)
        if n.real * (third - p).real + n.imag * (third - p).imag < 0:
            n = -n
        d_int = n.real * (o - p).real + n.imag * (o - p).imag
        alphas.append(math.acos(max(-1.0, min(1.0, d_int / R))))
    return alphas


def _hyperbolic_alphas(l3, r3):
    alphas = []
    for m in range(3):
        # re-place so that edge m runs along the real axis from the origin
        lr = (l3[m], l3[(m + 1) % 3], l3[(m + 2) % 3])
        u, v = CORNERS_OF_EDGE[m]
        w = 3 - u - v
        rr = (r3[u], r3[v], r3[w])
        _zs, o, Re = _disk_face_circle(lr, rr)
        alphas.append(math.acos(max(-1.0, min(1.0, o.imag / Re))))
    return alphas


def _betas(g, l3):
    betas = []
    for v in range(3):
        m1, m2 = EDGES_AT_CORNER[v]
        opp = 3 - m1 - m2
        if g == EUCLIDEAN:
            c = ((l3[m1] ** 2 + l3[m2] ** 2 - l3[opp] ** 2)
                 / (2 * l3[m1] * l3[m2]))
        else:
            c = ((math.cosh(l3[m1]) * math.cosh(l3[m2]) - math.cosh(l3[opp]))
                 / (math.sinh(l3[m1]) * math.sinh(l3[m2])))
        if not -1.0 < c < 1.0:
            raise InvariantViolation("degenerate corner angle")
        betas.append(math.acos(c))
    return betas


def triangle_angles(er_tri, tags, g):
    """Angles (alpha per edge, beta per corner) of the decorated
    triangle.  alpha is the angle at the circle-edge intersection
    between the edge and the face circle, measured inside the face
    circle on the far side of the triangle; exactly 0 on E0 edges."""
    check_geometry(g)
    l3, r3 = er_tri
    check_er_triangle(er_tri, tags, g)
    if g == EUCLIDEAN:
        alphas = _euclidean_alphas(l3, r3)
    else:
        alphas = _hyperbolic_alphas(l3, r3)
    for m in range(3):
        if tags.ec[m] == 0:
            alphas[m] = 0.0
    return TriangleAngles(alpha=tuple(alphas), beta=tuple(_betas(g, l3)))


def tetra_angles(tc_tri, tags, g):
    """triangle_angles after psi; raises NotInTE when the coordinates
    leave the tetrahedral domain."""
    er = psi(tc_tri, tags, g)
    check_er_triangle(er, tags, g, exc=NotInTE)
    return triangle_angles(er, tags, g)


def angles_valid(ta, tags, g, margin=0.0):
    """Membership of (alpha, beta) in the admissible angle region of the
    class: interior inequalities strict, class-forced equalities within
    1e-9."""
    for m in range(3):
        a = ta.alpha[m]
        if tags.ec[m] == 0:
            if abs(a) > 1e-9:
                return False
        elif not margin < a < math.pi - margin:
            return False
    for v in range(3):
        if not margin < ta.beta[v] < math.pi - margin:
            return False
        m1, m2 = EDGES_AT_CORNER[v]
        s = ta.beta[v] + ta.alpha[m1] + ta.alpha[m2]
        if tags.vc[v] == 0:
            if abs(s - math.pi) > 1e-9:
                return False
        elif not s < math.pi - margin:
            return False
    sb = sum(ta.beta)
    if g == EUCLIDEAN:
        if abs(sb - math.pi) > 1e-9:
            return False
    elif not sb < math.pi - margin:
        return False
    return True


# ---------------------------------------------------------------------------
# Dual lengths


def dual_edge_length(R, Rp, theta, g):
    """Distance between the centers of two adjacent face circles
    intersecting at angle theta."""
    check_geometry(g)
    # half-angle forms avoid the theta -> pi cancellation
    c2 = math.cos(theta / 2) ** 2
    if g == EUCLIDEAN:
        return math.sqrt((R - Rp) ** 2 + 4 * R * Rp * c2)
    s = (math.sinh((R - Rp) / 2) ** 2
         + math.sinh(R) * math.sinh(Rp) * c2)
    return 2 * math.asinh(math.sqrt(max(0.0, s)))


def vertex_dual_length(R, r, g):
    """Distance from a face-circle center to a vertex of the face
    (orthogonality relation)."""
    check_geometry(g)
    if g == EUCLIDEAN:
        return math.sqrt(R * R + r * r)
    return math.acosh(math.cosh(R) * math.cosh(r))


# ---------------------------------------------------------------------------
# Reduced angle coordinates and the Schlaefli volume


def reference_constants(g):
    """(r_check, eps_check): radius and separation of the reference
    pattern construction."""
    if g == EUCLIDEAN:
        return 1.0, 0.25
    return math.asinh(0.1), math.asinh(0.125)


def reference_er_triangle(tags, g):
    rc, ec_ = reference_constants(g)
    l3 = tuple(2 * rc if tags.ec[m] == 0 else 2 * (rc + ec_) for m in range(3))
    r3 = tuple(rc if tags.vc[v] == 1 else 0.0 for v in range(3))
    return l3, r3


def reference_angles(tags, g):
    return triangle_angles(reference_er_triangle(tags, g), tags, g)


def free_angle_indices(tags, g):
    """(free alpha edge indices, free beta corner indices, dependent
    slots) of the reduced angle chart of the class."""
    free_a = [m for m in range(3) if tags.ec[m] != 0]
    free_b = [v for v in range(3) if tags.vc[v] == 1]
    dep_a = None
    dep_b = None
    if g == EUCLIDEAN:
        if free_b:
            dep_b = free_b[0]
            free_b = free_b[1:]
        else:
            dep_a = free_a[-1]
            free_a = free_a[:-1]
    return tuple(free_a), tuple(free_b), dep_a, dep_b


def reduce_angles(ta, tags, g):
    free_a, free_b, _da, _db = free_angle_indices(tags, g)
    return np.array([ta.alpha[m] for m in free_a]
                    + [ta.beta[v] for v in free_b])


def expand_angles(x, tags, g):
    """Inverse of reduce_angles: fill in the class-forced equalities."""
    free_a, free_b, dep_a, dep_b = free_angle_indices(tags, g)
    alpha = [0.0, 0.0, 0.0]
    beta = [None, None, None]
    na = len(free_a)
    for t, m in enumerate(free_a):
        alpha[m] = float(x[t])
    for t, v in enumerate(free_b):
        beta[v] = float(x[na + t])
    if dep_a is not None:
        alpha[dep_a] = math.pi - sum(alpha[m] for m in free_a)
    for v in range(3):
        if tags.vc[v] == 0:
            m1, m2 = EDGES_AT_CORNER[v]
            beta[v] = math.pi - alpha[m1] - alpha[m2]
    if dep_b is not None:
        beta[dep_b] = math.pi - sum(b for v, b in enumerate(beta)
                                    if v != dep_b)
    return TriangleAngles(alpha=tuple(alpha), beta=tuple(beta))


def _section_project(tc_tri, tags, g):
    """Project one triangle's (a, b) onto the volume section of its
    class: hyperbolic identity; Euclidean with a positive-radius corner
    rescales so the first such b vanishes; the all-point-circle
    Euclidean class rescales so the last a vanishes."""
    a3, b3 = [list(t) for t in tc_tri]
    if g == HYPERBOLIC:
        return tuple(a3), tuple(b3)
    free_a, _fb, dep_a, dep_b = free_angle_indices(tags, g)
    if dep_b is not None:
        t = b3[dep_b]
    else:
        t = -a3[dep_a] / 2
    for m in range(3):
        u, v = CORNERS_OF_EDGE[m]
        a3[m] += t * ((tags.vc[u] == 0) + (tags.vc[v] == 0))
    for v in range(3):
        if tags.vc[v] == 1:
            b3[v] -= t
    return tuple(a3), tuple(b3)


def _euclidean_angles_to_er(ta, tags):
    """Closed-form inverse of triangle_angles for Euclidean classes:
    reconstruct the triangle from its support lines around the unit
    face circle."""
    # outward normal azimuths advance by the exterior angles
    phi = [-math.pi / 2]
    phi.append(phi[0] + (math.pi - ta.beta[1]))
    phi.append(phi[1] + (math.pi - ta.beta[2]))
    lines = []  # (unit outward normal, offset): points x with n.x = c
    for m in range(3):
        n = cmath.exp(1j * phi[m])
        lines.append((n, math.cos(ta.alpha[m])))

    def intersect(m1, m2):
        (n1, c1), (n2, c2) = lines[m1], lines[m2]
        det = n1.real * n2.imag - n1.imag * n2.real
        if abs(det) < 1e-14:
            raise PathLeavesDomain("support lines are parallel")
        x = (c1 * n2.imag - c2 * n1.imag) / det
        y = (n1.real * c2 - n2.real * c1) / det
        return complex(x, y)

    # corner v is the intersection of its two edge lines
    pts = [intersect(*EDGES_AT_CORNER[v]) for v in range(3)]
    l3 = tuple(abs(pts[CORNERS_OF_EDGE[m][1]] - pts[CORNERS_OF_EDGE[m][0]])
               for m in range(3))
    r3 = []
    for v in range(3):
        lam2 = abs(pts[v]) ** 2 - 1.0
        if tags.vc[v] == 0:
            r3.append(0.0)
        else:
            if lam2 <= 0:
                raise PathLeavesDomain("corner fell inside the face circle")
            r3.append(math.sqrt(lam2))
    return l3, tuple(r3)


def _hyperbolic_phi_inv(x, tags, start, J0=None):
    """Newton inversion of the reduced angle map for hyperbolic
    classes: find free (a, b) whose reduced tetra_angles equal x.
    ``J0``: optional Jacobian from a nearby solve, used until it stops
    contracting the residual."""
    free_a = [m for m in range(3) if tags.ec[m] != 0]
    free_b = [v for v in range(3) if tags.vc[v] == 1]
    n = len(free_a) + len(free_b)

    def unpack(z):
        a3 = [0.0, 0.0, 0.0]
        b3 = [0.0, 0.0, 0.0]
        for t, m in enumerate(free_a):
            a3[m] = z[t]
        for t, v in enumerate(free_b):
            b3[v] = z[len(free_a) + t]
        return tuple(a3), tuple(b3)

    def F(z):
        try:
            ta = tetra_angles(unpack(z), tags, HYPERBOLIC)
        except (NotInTE, DomainError, InvariantViolation):
            return None
        return reduce_angles(ta, tags, HYPERBOLIC) - x

    z = np.array(start, dtype=float)
    f = F(z)
    if f is None:
        raise PathLeavesDomain("start point outside the tetrahedral domain")
    J = J0
    fresh = False
    for _ in range(80):
        fnorm = np.max(np.abs(f))
        if fnorm < 1e-13:
            break
        if J is None:
            fresh = True
            # forward-difference Jacobian, reused while steps contract
            J = np.empty((n, n))
            for m in range(n):
                h = 1e-7 * (1 + abs(z[m]))
                zp = z.copy(); zp[m] += h
                fp = F(zp)
                if fp is None:
                    raise PathLeavesDomain(
                        "finite difference left the domain")
                J[:, m] = (fp - f) / h
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            raise PathLeavesDomain("singular Jacobian in angle inversion")
        s = 1.0
        while s > 1e-14:
            f_new = F(z + s * step)
            if f_new is not None and np.max(np.abs(f_new)) < fnorm:
                z = z + s * step
                f = f_new
                break
            s *= 0.5
        else:
            if not fresh:
                J = None  # stale Jacobian: rebuild and retry
                continue
            raise PathLeavesDomain("angle inversion stalled")
        if s < 1.0 or np.max(np.abs(f)) > 0.3 * fnorm:
            J = None
            fresh = False
    else:
        raise PathLeavesDomain("angle inversion did not converge")
    return unpack(z), z, J


def phi_inv(ta, tags, g, warm=None):
    """Tetrahedral coordinates (on the volume section) realizing the
    given decorated-triangle angles."""
    check_geometry(g)
    if not angles_valid(ta, tags, g):
        raise PathLeavesDomain(f"angles {ta} outside the admissible region")
    if g == EUCLIDEAN:
        er = _euclidean_angles_to_er(ta, tags)
        try:
            tc = psi_inv(er, tags, g)
        except InvariantViolation as exc:
            raise PathLeavesDomain(str(exc))
        return _section_project(tc, tags, g)
    x = reduce_angles(ta, tags, g)
    if warm is None:
        warm = _hyp_start(tags)
    tc, _z, _J = _hyperbolic_phi_inv(x, tags, warm)
    return tc


def lobachevsky(theta):
    """The Lobachevsky function -int_0^theta log|2 sin t| dt, via its
    standard power series after reduction to |theta| <= pi/2 (odd,
    pi-periodic)."""
    theta = math.fmod(theta, math.pi)
    if theta > math.pi / 2:
        theta -= math.pi
    elif theta < -math.pi / 2:
        theta += math.pi
    if theta == 0.0:
        return 0.0
    sign = 1.0
    if theta < 0:
        theta, sign = -theta, -1.0
    from scipy.special import zeta
    s = theta * (1.0 - math.log(2 * theta))
    q = (theta / math.pi) ** 2
    qn = q
    n = 1
    while True:
        term = zeta(2 * n) / (n * (2 * n + 1)) * qn * theta
        s += term
        if term < 1e-17 * (1 + abs(s)):
            break
        qn *= q
        n += 1
        if n > 400:
            break
    return sign * s


_GAUSS_CACHE = {}


def _gauss_nodes(n):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    if n not in _GAUSS_CACHE:
        t, w = np.polynomial.legendre.leggauss(n)
        _GAUSS_CACHE[n] = ((t + 1) / 2, w / 2)
    return _GAUSS_CACHE[n]


IDEAL_REGULAR_VOLUME_ANCHOR = None  # computed lazily


def _ideal_anchor():
    global IDEAL_REGULAR_VOLUME_ANCHOR
    if IDEAL_REGULAR_VOLUME_ANCHOR is None:
        IDEAL_REGULAR_VOLUME_ANCHOR = 3 * lobachevsky(math.pi / 3)
    return IDEAL_REGULAR_VOLUME_ANCHOR


def tetra_volume(ta, tags, g):
    """Volume of the truncated tetrahedron over the decorated triangle,
    by quadrature of the Schlaefli form along a straight segment in the
    reduced angle chart, relative to the per-class reference
    configuration.  The all-point-circle Euclidean class is reported
    absolutely, anchored at the regular ideal tetrahedron."""
    check_geometry(g)
    if not angles_valid(ta, tags, g):
        raise PathLeavesDomain("angles outside the admissible region")
    free_a, free_b, _da, _db = free_angle_indices(tags, g)
    x1 = reduce_angles(ta, tags, g)
    x0 = reduce_angles(reference_angles(tags, g), tags, g)
    dx = x1 - x0
    if not np.any(dx):
        total = 0.0
    else:
        warm_cache = {}

        def integrand(t):
            x = x0 + t * dx
            if g == HYPERBOLIC:
                warm = warm_cache.get("last", _hyp_start(tags))
                (a3, b3), z, J = _hyperbolic_phi_inv(
                    x, tags, warm, warm_cache.get("J"))
                warm_cache["last"] = z
                warm_cache["J"] = J
            else:
                a3, b3 = phi_inv(expand_angles(x, tags, g), tags, g)
            s = sum(a3[m] * dx[i] for i, m in enumerate(free_a))
            s += sum(b3[v] * dx[len(free_a) + i]
                     for i, v in enumerate(free_b))
            return -0.5 * s

        # the integrand is analytic in t, so fixed Gauss-Legendre
        # converges spectrally; the increasing node order also feeds the
        # Newton warm start
        total = sum(w * integrand(t)
                    for t, w in zip(*_gauss_nodes(16)))
    if g == EUCLIDEAN and all(c == 0 for c in tags.vc):
        return total + _ideal_anchor()
    return total


def _hyp_start(tags):
    tc = psi_inv(reference_er_triangle(tags, HYPERBOLIC), tags, HYPERBOLIC)
    free_a = [m for m in range(3) if tags.ec[m] != 0]
    free_b = [v for v in range(3) if tags.vc[v] == 1]
    return [tc[0][m] for m in free_a] + [tc[1][v] for v in free_b]


# ---------------------------------------------------------------------------
# Surface-level wrappers


@dataclass(frozen=True)
class TetraCoords:
    """Optimization variables on a whole triangulation: a on non-E0
    edges of T, b on positive-circle vertices."""

    a: dict
    b: dict


@dataclass(frozen=True)
class EdgeRadii:
    l: dict
    r: dict


def triangle_tags(T, tri):
    cc = T.base
    i, j, k = tri.verts
    vc = tuple(cc.vertex_class(v) for v in (i, j, k))
    from .complexes import edge_key
    ec = tuple(T.edge_class(edge_key(u, v))
               for u, v in ((i, j), (j, k), (k, i)))
    return TriangleTags(vc=vc, ec=ec)


def tri_coords(T, tc, tri):
    from .complexes import edge_key
    i, j, k = tri.verts
    a3 = tuple(tc.a.get(edge_key(u, v), 0.0)
               for u, v in ((i, j), (j, k), (k, i)))
    b3 = tuple(tc.b.get(v, 0.0) for v in (i, j, k))
    return a3, b3


def tri_er(T, er, tri):
    from .complexes import edge_key
    i, j, k = tri.verts
    l3 = tuple(er.l[edge_key(u, v)] for u, v in ((i, j), (j, k), (k, i)))
    r3 = tuple(er.r[v] for v in (i, j, k))
    return l3, r3


def psi_surface(T, tc, g):
    """Apply psi edge by edge over the whole triangulation."""
    check_geometry(g)
    cc = T.base
    r = {v: vertex_radius(g, cc.vertex_class(v), tc.b.get(v, 0.0))
         for v in cc.vertices}
    l = {}
    for e in T.edges:
        u, v = e
        ec = 0 if e in cc.e0 else 1
        l[e] = edge_length(g, ec, cc.vertex_class(u), cc.vertex_class(v),
                           tc.a.get(e, 0.0), tc.b.get(u, 0.0),
                           tc.b.get(v, 0.0))
    return EdgeRadii(l=l, r=r)


def psi_inv_surface(T, er, g):
    check_geometry(g)
    cc = T.base
    b = {v: inv_radius(g, 1, er.r[v]) for v in cc.v1}
    a = {}
    for e in T.edges:
        if e in cc.e0:
            continue
        u, v = e
        a[e] = inv_edge(g, 1, cc.vertex_class(u), cc.vertex_class(v),
                        er.l[e], er.r[u], er.r[v],
                        b.get(u, 0.0), b.get(v, 0.0))
    return TetraCoords(a=a, b=b)


def check_er_surface(T, er, g, margin=0.0, exc=InvariantViolation):
    for tri in T.triangles:
        check_er_triangle(tri_er(T, er, tri), triangle_tags(T, tri), g,
                          margin=margin, exc=exc)


def in_te(T, tc, g, margin=1e-12):
    """Membership of surface coordinates in the tetrahedral domain."""
    if g == HYPERBOLIC:
        if any(bk <= 0 for bk in tc.b.values()):
            return False
    try:
        er = psi_surface(T, tc, g)
        check_er_surface(T, er, g, margin=margin, exc=NotInTE)
    except (NotInTE, DomainError, InvariantViolation):
        return False
    return True


def gauge_direction(T):
    """Euclidean scaling action generator on the free coordinates:
    +(number of point endpoints) on each a, -1 on each b."""
    cc = T.base
    da = {}
    for e in T.edges:
        if e in cc.e0:
            continue
        u, v = e
        da[e] = float((cc.vertex_class(u) == 0) + (cc.vertex_class(v) == 0))
    db = {k: -1.0 for k in cc.v1}
    return da, db


def act(T, tc, t, g):
    """Gauge action: Euclidean rescaling by e^t; hyperbolic identity."""
    check_geometry(g)
    if g == HYPERBOLIC or t == 0.0:
        return TetraCoords(a=dict(tc.a), b=dict(tc.b))
    da, db = gauge_direction(T)
    a = {e: v + t * da[e] for e, v in tc.a.items()}
    b = {k: v + t * db[k] for k, v in tc.b.items()}
    return TetraCoords(a=a, b=b)


def project_gauge(T, tc, g):
    """Orthogonal projection onto the section
    sum(point-incident a) - sum(b) = 0 of the gauge action
    (hyperbolic: identity)."""
    if g == HYPERBOLIC:
        return TetraCoords(a=dict(tc.a), b=dict(tc.b))
    da, db = gauge_direction(T)
    num = (sum(tc.a[e] * da[e] for e in tc.a)
           + sum(tc.b[k] * db[k] for k in tc.b))
    den = sum(v * v for v in da.values()) + sum(v * v for v in db.values())
    if den == 0:
        return TetraCoords(a=dict(tc.a), b=dict(tc.b))
    t = -num / den
    return act(T, tc, t, EUCLIDEAN)
