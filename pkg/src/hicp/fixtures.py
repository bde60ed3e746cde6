"""Built-in test complexes and the reference-pattern builder (the
uniform-edge-length pattern whose face circles are solved per face)."""

from __future__ import annotations

import math

from . import geometry as geo
from .complexes import build_complex, edge_key, fan_triangles, triangulate
from .errors import DomainError
from .geometry import EUCLIDEAN, EdgeRadii, check_geometry
from .solver import omega_bisect, omega_solve


def grid_torus_spec(n=3, v1=(), e0=()):
    """n x n square-grid torus; v1 lists the disk vertices, e0 the
    tangency edges."""
    faces = []

    def v(r, c):
        return (r % n) * n + (c % n)

    for r in range(n):
        for c in range(n):
            faces.append([v(r, c), v(r, c + 1), v(r + 1, c + 1), v(r + 1, c)])
    verts = [{"id": i, "circle": "disk" if i in set(v1) else "point"}
             for i in range(n * n)]
    return {"vertices": verts, "faces": faces,
            "tangent_edges": [list(e) for e in e0]}


def triangulated_torus_spec(n=3, v1=()):
    """The grid torus with each quad split along the diagonal from its
    first corner; all faces are triangles."""
    faces = []

    def v(r, c):
        return (r % n) * n + (c % n)

    for r in range(n):
        for c in range(n):
            p, q, s, t = (v(r, c), v(r, c + 1), v(r + 1, c + 1), v(r + 1, c))
            faces.append([p, q, s])
            faces.append([p, s, t])
    verts = [{"id": i, "circle": "disk" if i in set(v1) else "point"}
             for i in range(n * n)]
    return {"vertices": verts, "faces": faces}


def genus2_spec(v1=()):
    """Genus-2 surface: two triangulated 3x3 tori, each with the face
    (0,1,4) removed, glued along the boundary triangle.  15 vertices,
    51 edges, 34 faces."""
    base = triangulated_torus_spec(3)["faces"]
    cut = [f for f in base if sorted(f) != [0, 1, 4]]
    # second copy: vertices 0,1,4 shared; remaining six relabeled 9..14
    relabel = {0: 0, 1: 1, 4: 4}
    nxt = 9
    for i in range(9):
        if i not in relabel:
            relabel[i] = nxt
            nxt += 1
    mirrored = [[relabel[i] for i in reversed(f)] for f in cut]
    faces = cut + mirrored
    verts = [{"id": i, "circle": "disk" if i in set(v1) else "point"}
             for i in range(15)]
    return {"vertices": verts, "faces": faces}


def dodecahedron_spec(v1=None):
    """Pentagonal dodecahedron boundary (sphere, 20 vertices, 12
    faces)."""
    faces = [
        [0, 1, 2, 3, 4],
        [0, 5, 10, 6, 1], [1, 6, 11, 7, 2], [2, 7, 12, 8, 3],
        [3, 8, 13, 9, 4], [4, 9, 14, 5, 0],
        [15, 16, 11, 6, 10], [16, 17, 12, 7, 11], [17, 18, 13, 8, 12],
        [18, 19, 14, 9, 13], [19, 15, 10, 5, 14],
        [19, 18, 17, 16, 15],
    ]
    ids = sorted({i for f in faces for i in f})
    if v1 is None:
        v1 = ids  # all disk vertices by default
    verts = [{"id": i, "circle": "disk" if i in set(v1) else "point"}
             for i in ids]
    return {"vertices": verts, "faces": faces}


def tetrahedron_spec(v1=None):
    faces = [[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]]
    ids = [0, 1, 2, 3]
    if v1 is None:
        v1 = ids
    verts = [{"id": i, "circle": "disk" if i in set(v1) else "point"}
             for i in ids]
    return {"vertices": verts, "faces": faces}


FIXTURES = {
    "grid-torus": lambda: grid_torus_spec(3),
    "grid-torus-v1": lambda: grid_torus_spec(3, v1=range(9)),
    "tri-torus": lambda: triangulated_torus_spec(3),
    "tri-torus-v1": lambda: triangulated_torus_spec(3, v1=range(9)),
    "genus2": lambda: genus2_spec(),
    "genus2-mixed": lambda: genus2_spec(v1=(2, 5, 7, 11, 14)),
    "dodecahedron": lambda: dodecahedron_spec(),
    "e0-torus": lambda: grid_torus_spec(
        3, v1=range(9),
        e0=[(v, (v + 1) % 3 + 3 * (v // 3)) for v in range(9)]
        + [(v, (v + 3) % 9) for v in range(9)]),
}


def fixture_spec(name):
    try:
        return FIXTURES[name]()
    except KeyError:
        raise DomainError(f"unknown fixture {name!r}; "
                          f"available: {', '.join(sorted(FIXTURES))}")


# ---------------------------------------------------------------------------
# Reference pattern construction


def _face_chord_angles(cc, f, g, x):
    """Per-edge central angles and per-vertex center distances of face f
    at positive-circle vertex distance x."""
    from .solver import _chord_angle, _vertex_distance
    rc, ec_ = geo.reference_constants(g)
    n = len(f)
    dists = []
    for v in f:
        dists.append(_vertex_distance(g, cc.vertex_class(v), x, rc))
    phis = []
    for t in range(n):
        e = edge_key(f[t], f[(t + 1) % n])
        L = 2 * rc if e in cc.e0 else 2 * (rc + ec_)
        phis.append(_chord_angle(g, dists[t], dists[(t + 1) % n], L))
    return phis, dists


def _face_xstar(cc, f, g):
    """Closure-consistent face-circle solve: the x at which the central
    angles sum to 2 pi (bisection; triangles directly)."""
    vclasses = [cc.vertex_class(v) for v in f]
    eclasses = [0 if edge_key(f[t], f[(t + 1) % len(f)]) in cc.e0 else 1
                for t in range(len(f))]
    if len(f) == 3:
        return omega_solve(vclasses, eclasses, g)
    return omega_bisect(vclasses, eclasses, g)


def reference_pattern(cc, g):
    """Edge lengths and radii of the uniform reference pattern on the
    triangulated complex: base edges carry the class length, fan
    diagonals are measured inside each face's circle geometry."""
    check_geometry(g)
    T = triangulate(cc)
    rc, ec_ = geo.reference_constants(g)
    l = {}
    for e in cc.edges:
        l[e] = 2 * rc if e in cc.e0 else 2 * (rc + ec_)
    r = {v: (rc if v in cc.v1 else 0.0) for v in cc.vertices}

    for f in cc.faces:
        n = len(f)
        if n == 3:
            continue
        x = _face_xstar(cc, f, g)
        phis, dists = _face_chord_angles(cc, f, g, x)
        total = sum(phis)
        if abs(total - 2 * math.pi) > 1e-9:
            raise DomainError(f"face {f}: circle solve did not close")
        # angular position of each face vertex around the face circle
        psi_ang = [0.0]
        for t in range(n - 1):
            psi_ang.append(psi_ang[-1] + phis[t])
        _tris, diags = fan_triangles(f)
        pos = {v: t for t, v in enumerate(f)}
        for d in diags:
            u, w = d
            du, dw = dists[pos[u]], dists[pos[w]]
            dpsi = abs(psi_ang[pos[u]] - psi_ang[pos[w]])
            if g == EUCLIDEAN:
                ld = math.sqrt(du * du + dw * dw
                               - 2 * du * dw * math.cos(dpsi))
            else:
                ld = math.acosh(math.cosh(du) * math.cosh(dw)
                                - math.sinh(du) * math.sinh(dw)
                                * math.cos(dpsi))
            l[d] = ld
    return T, EdgeRadii(l=l, r=r)
