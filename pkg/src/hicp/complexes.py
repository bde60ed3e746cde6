"""Combinatorial core: cell complexes on closed oriented surfaces, fan
triangulations, the corner subdivision of the dual complex, and the
admissible-domain machinery used by the angle-data feasibility checker.

Conventions
-----------
Vertices are integer ids.  An edge is a sorted pair ``(i, j)`` with
``i < j``.  A face is a cyclic tuple of distinct vertex ids; after
validation all face cycles are oriented consistently, so every edge is
traversed once in each direction.

Vertex classes: ``V1`` vertices carry a circle of positive radius,
``V0`` vertices carry a point circle.  Edge classes: ``E0`` edges force
tangency of the endpoint circles, ``E1`` edges carry a free
intersection angle, ``E_pi`` edges are the fan diagonals added by
``triangulate`` (target angle pi).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    CapExceeded,
    E0EndpointInV0,
    IndexMismatch,
    NotClosedSurface,
    RegularityViolation,
)

Edge = tuple  # (i, j) with i < j
HatVertex = tuple  # ("v", vertex_id) or ("f", face_index)


def edge_key(i, j):
    return (i, j) if i < j else (j, i)


def face_edges(face):
    n = len(face)
    return [edge_key(face[t], face[(t + 1) % n]) for t in range(n)]


# ---------------------------------------------------------------------------
# CellComplex


@dataclass(frozen=True)
class CellComplex:
    """A validated geodesic-cell-complex combinatorics on a closed
    oriented surface."""

    v1: frozenset
    v0: frozenset
    faces: tuple  # consistently oriented cyclic vertex tuples
    edges: tuple  # sorted edge pairs
    e0: frozenset
    e1: frozenset
    # edge -> (face index with the edge directed i->j, face index with j->i)
    edge_faces: Mapping[Edge, tuple] = field(hash=False)

    @property
    def vertices(self):
        return sorted(self.v0 | self.v1)

    @property
    def chi(self):
        return len(self.v0) + len(self.v1) - len(self.edges) + len(self.faces)

    @property
    def genus(self):
        return (2 - self.chi) // 2

    def vertex_class(self, v):
        return 0 if v in self.v0 else 1

    def edge_class(self, e):
        return 0 if e in self.e0 else 1

    def vertex_faces(self, v):
        """Face indices incident to v, in cyclic order around v."""
        return self._vertex_cycle(v)[1]

    def vertex_edges(self, v):
        """Edges at v, in cyclic order around v (aligned with vertex_faces:
        face t lies between edge t and edge t+1)."""
        return self._vertex_cycle(v)[0]

    def _vertex_cycle(self, v):
        # Walk around v using the orientation: inside face f with directed
        # edge (v -> w), the next face counterclockwise is across (u -> v).
        incident = [fi for fi, f in enumerate(self.faces) if v in f]
        if not incident:
            raise IndexMismatch(f"vertex {v} has no incident face")
        fi = min(incident)
        edges_cycle, faces_cycle = [], []
        start = fi
        while True:
            f = self.faces[fi]
            p = f.index(v)
            prev_v = f[p - 1]
            next_v = f[(p + 1) % len(f)]
            e_in = edge_key(prev_v, v)  # enter the face across this edge
            edges_cycle.append(e_in)
            faces_cycle.append(fi)
            # leave across (v, next_v): the other face of that edge
            e_out = edge_key(v, next_v)
            fa, fb = self.edge_faces[e_out]
            fi = fb if fa == fi else fa
            if fi == start:
                break
            if len(faces_cycle) > len(self.faces):
                raise RegularityViolation(f"vertex link of {v} does not close")
        # rotate so the cycle starts at the smallest edge (determinism)
        k = edges_cycle.index(min(edges_cycle))
        return edges_cycle[k:] + edges_cycle[:k], faces_cycle[k:] + faces_cycle[:k]

    def degree(self, v):
        return sum(1 for e in self.edges if v in e)


def build_complex(spec):
    """Validate a raw cell description (parsed JSON dict) and derive the
    edge set.  See the module docstring for the conventions."""
    try:
        raw_vertices = spec["vertices"]
        raw_faces = spec["faces"]
    except (KeyError, TypeError) as exc:
        raise IndexMismatch(f"malformed complex description: missing {exc}")
    tangent = spec.get("tangent_edges", [])

    v0, v1 = set(), set()
    seen = set()
    for item in raw_vertices:
        vid = item["id"]
        if vid in seen:
            raise RegularityViolation(f"duplicate vertex id {vid}")
        seen.add(vid)
        circle = item.get("circle", "disk")
        if circle == "disk":
            v1.add(vid)
        elif circle == "point":
            v0.add(vid)
        else:
            raise IndexMismatch(f"unknown circle tag {circle!r} on vertex {vid}")

    faces = []
    for f in raw_faces:
        f = tuple(f)
        if len(f) < 3:
            raise RegularityViolation(f"face {f} has fewer than 3 vertices")
        for a, b in zip(f, f[1:] + f[:1]):
            if a == b:
                raise RegularityViolation(f"loop edge at vertex {a} in face {f}")
        if len(set(f)) != len(f):
            raise RegularityViolation(f"face {f} revisits a vertex")
        for v in f:
            if v not in seen:
                raise IndexMismatch(f"face {f} uses unknown vertex {v}")
        faces.append(f)

    # Each unordered pair must be covered by exactly two face sides.
    side_count = {}
    for f in faces:
        for e in face_edges(f):
            side_count[e] = side_count.get(e, 0) + 1
    for e, c in side_count.items():
        if c != 2:
            if c > 2:
                raise RegularityViolation(
                    f"edge {e} appears {c} times: parallel edges are not allowed"
                )
            raise NotClosedSurface(f"edge {e} bounds {c} face side(s), expected 2")

    faces = _orient_faces(faces)

    edges = tuple(sorted(side_count))
    edge_faces = {}
    for fi, f in enumerate(faces):
        n = len(f)
        for t in range(n):
            a, b = f[t], f[(t + 1) % n]
            e = edge_key(a, b)
            pair = edge_faces.setdefault(e, [None, None])
            pair[0 if a < b else 1] = fi
    edge_faces = {e: tuple(p) for e, p in edge_faces.items()}

    # Pairwise face regularity.
    for fi in range(len(faces)):
        for fj in range(fi + 1, len(faces)):
            common = set(faces[fi]) & set(faces[fj])
            if len(common) < 2:
                continue
            shared = set(face_edges(faces[fi])) & set(face_edges(faces[fj]))
            if len(shared) > 1:
                raise RegularityViolation(
                    f"faces {faces[fi]} and {faces[fj]} share {len(shared)} edges"
                )
            if len(shared) == 1 and len(common) > 2:
                raise RegularityViolation(
                    f"faces {faces[fi]} and {faces[fj]} share an edge and "
                    f"{len(common)} vertices"
                )
            if not shared:
                raise RegularityViolation(
                    f"faces {faces[fi]} and {faces[fj]} share {len(common)} "
                    "vertices but no edge"
                )

    e0 = set()
    for pair in tangent:
        e = edge_key(*pair)
        if e not in side_count:
            raise IndexMismatch(f"tangent edge {e} is not an edge of the complex")
        for v in e:
            if v in v0:
                raise E0EndpointInV0(f"tangency edge {e} has point vertex {v}")
        e0.add(e)
    e1 = set(edges) - e0

    cc = CellComplex(
        v1=frozenset(v1),
        v0=frozenset(v0),
        faces=tuple(faces),
        edges=edges,
        e0=frozenset(e0),
        e1=frozenset(e1),
        edge_faces=edge_faces,
    )
    if cc.chi % 2 != 0 or cc.chi > 2:
        raise NotClosedSurface(f"Euler characteristic {cc.chi} is not that of "
                               "a closed oriented surface")
    _check_connected(cc)
    return cc


def _orient_faces(faces):
    """Flip face cycles so every edge is traversed once in each direction."""
    sides = {}  # edge -> list of (face index, direction is increasing?)
    for fi, f in enumerate(faces):
        n = len(f)
        for t in range(n):
            a, b = f[t], f[(t + 1) % n]
            sides.setdefault(edge_key(a, b), []).append((fi, a < b))
    flip = {}
    for root in range(len(faces)):
        if root in flip:
            continue
        flip[root] = False
        queue = [root]
        while queue:
            fi = queue.pop()
            f = faces[fi]
            n = len(f)
            for t in range(n):
                a, b = f[t], f[(t + 1) % n]
                e = edge_key(a, b)
                (f1, d1), (f2, d2) = sides[e]
                other, dthis, dother = (f2, d1, d2) if f1 == fi else (f1, d2, d1)
                if other == fi:
                    # same face on both sides: the two traversals must already
                    # be opposite, or the gluing is non-orientable
                    if d1 == d2:
                        raise NotClosedSurface(
                            f"non-orientable gluing along edge {e}"
                        )
                    continue
                # consistent orientation requires opposite traversal directions
                want = (dthis == dother) ^ flip[fi]
                if other in flip:
                    if flip[other] != want:
                        raise NotClosedSurface(
                            f"non-orientable gluing along edge {e}"
                        )
                else:
                    flip[other] = want
                    queue.append(other)
    return [tuple(reversed(f)) if flip[fi] else f for fi, f in enumerate(faces)]


def _check_connected(cc):
    if not cc.faces:
        raise NotClosedSurface("empty complex")
    seen = {0}
    queue = [0]
    while queue:
        fi = queue.pop()
        for e in face_edges(cc.faces[fi]):
            for g in cc.edge_faces[e]:
                if g not in seen:
                    seen.add(g)
                    queue.append(g)
    if len(seen) != len(cc.faces):
        raise NotClosedSurface("complex is not connected")


# ---------------------------------------------------------------------------
# Triangulation


def fan_triangles(face):
    """Fan triangulation of a single face from its least vertex id.
    Returns (triangles, diagonals); a face with n vertices yields n-2
    triangles and n-3 diagonals."""
    n = len(face)
    p = face.index(min(face))
    cyc = face[p:] + face[:p]
    apex = cyc[0]
    tris = [(apex, cyc[t], cyc[t + 1]) for t in range(1, n - 1)]
    diags = [edge_key(apex, cyc[t]) for t in range(2, n - 1)]
    return tris, diags


@dataclass(frozen=True)
class Triangle:
    face: int  # index of the parent face in the base complex
    verts: tuple  # (u, v, w), oriented like the parent face


@dataclass(frozen=True)
class Triangulation:
    base: CellComplex
    e_pi: frozenset
    triangles: tuple  # of Triangle
    edges: tuple  # all edges of T, sorted
    edge_triangles: Mapping[Edge, tuple] = field(hash=False)

    def edge_class(self, e):
        """0 for E0, 1 for E1, 2 for the fan diagonals."""
        if e in self.e_pi:
            return 2
        return self.base.edge_class(e)

    @property
    def free_edges(self):
        """Edges carrying an `a` coordinate, sorted: E1 then diagonals."""
        return tuple(e for e in self.edges if e not in self.base.e0)

    @property
    def v1_vertices(self):
        return tuple(sorted(self.base.v1))


def triangulate(cc):
    tris = []
    e_pi = set()
    base_edges = set(cc.edges)
    for fi, f in enumerate(cc.faces):
        ftris, fdiags = fan_triangles(f)
        for d in fdiags:
            if d in base_edges:
                raise RegularityViolation(
                    f"fan diagonal {d} of face {f} collides with a base edge"
                )
            if d in e_pi:
                raise RegularityViolation(f"fan diagonal {d} produced twice")
            e_pi.add(d)
        tris.extend(Triangle(face=fi, verts=t) for t in ftris)

    edges = tuple(sorted(base_edges | e_pi))
    edge_triangles = {}
    for ti, tri in enumerate(tris):
        u, v, w = tri.verts
        for e in (edge_key(u, v), edge_key(v, w), edge_key(w, u)):
            edge_triangles.setdefault(e, []).append(ti)
    for e, ts in edge_triangles.items():
        if len(ts) != 2:
            raise RegularityViolation(f"edge {e} lies in {len(ts)} triangles")
    edge_triangles = {e: tuple(ts) for e, ts in edge_triangles.items()}

    return Triangulation(
        base=cc,
        e_pi=frozenset(e_pi),
        triangles=tuple(tris),
        edges=edges,
        edge_triangles=edge_triangles,
    )


# ---------------------------------------------------------------------------
# Hat triangulation (corner subdivision of the dual complex)


@dataclass(frozen=True)
class HatFace:
    """Hat triangle with one base-vertex corner and two dual corners.
    ``across`` is the base edge the triangle straddles."""

    corner: int  # base vertex
    duals: tuple  # (face index, face index), sorted
    across: Edge


@dataclass
class HatTriangulation:
    base: CellComplex
    vertices: list  # hat vertices: ("v", id) then ("f", face index)
    edges: list  # ("dual", base_edge) and ("corner", (v, face index))
    hat_faces: list  # of HatFace
    # index lookups
    vindex: dict = field(repr=False, default_factory=dict)
    eindex: dict = field(repr=False, default_factory=dict)
    findex: dict = field(repr=False, default_factory=dict)
    # per hat vertex: (vmask, emask, fmask) of its open star
    stars: dict = field(repr=False, default_factory=dict)
    # per hat vertex: cyclic list of cells around it, alternating
    # ("e", idx) and ("t", idx)
    links: dict = field(repr=False, default_factory=dict)
    # overlap graph between open stars, as adjacency over hat vertices
    overlap: dict = field(repr=False, default_factory=dict)

    @property
    def n_cells(self):
        return len(self.vertices), len(self.edges), len(self.hat_faces)

    def full_masks(self):
        nv, ne, nf = self.n_cells
        return (1 << nv) - 1, (1 << ne) - 1, (1 << nf) - 1

    def base_vertex_mask(self):
        m = 0
        for i, hv in enumerate(self.vertices):
            if hv[0] == "v":
                m |= 1 << i
        return m


def hat_complex(cc):
    h = HatTriangulation(base=cc, vertices=[], edges=[], hat_faces=[])
    for v in cc.vertices:
        h.vindex[("v", v)] = len(h.vertices)
        h.vertices.append(("v", v))
    for fi in range(len(cc.faces)):
        h.vindex[("f", fi)] = len(h.vertices)
        h.vertices.append(("f", fi))

    for e in cc.edges:
        h.eindex[("dual", e)] = len(h.edges)
        h.edges.append(("dual", e))
    for fi, f in enumerate(cc.faces):
        for v in sorted(f):
            h.eindex[("corner", (v, fi))] = len(h.edges)
            h.edges.append(("corner", (v, fi)))

    for e in cc.edges:
        fa, fb = cc.edge_faces[e]
        duals = tuple(sorted((fa, fb)))
        for v in e:
            h.findex[(v, e)] = len(h.hat_faces)
            h.hat_faces.append(HatFace(corner=v, duals=duals, across=e))

    _build_stars_and_links(h)
    return h


def _build_stars_and_links(h):
    cc = h.base
    # open star of a base vertex k: the vertex itself, its corner edges,
    # and the hat triangle across each incident base edge
    for k in cc.vertices:
        vmask = 1 << h.vindex[("v", k)]
        emask = 0
        fmask = 0
        for fi in cc.vertex_faces(k):
            emask |= 1 << h.eindex[("corner", (k, fi))]
        for e in cc.vertex_edges(k):
            fmask |= 1 << h.findex[(k, e)]
        h.stars[("v", k)] = (vmask, emask, fmask)
    # open star of a dual vertex O_f: O_f, the corner edges of f, the dual
    # edges of f's base edges, and both hat triangles of each base edge of f
    for fi, f in enumerate(cc.faces):
        vmask = 1 << h.vindex[("f", fi)]
        emask = 0
        fmask = 0
        for v in f:
            emask |= 1 << h.eindex[("corner", (v, fi))]
        for e in face_edges(f):
            emask |= 1 << h.eindex[("dual", e)]
            for v in e:
                fmask |= 1 << h.findex[(v, e)]
        h.stars[("f", fi)] = (vmask, emask, fmask)

    # links: cyclic cell sequences around each hat vertex
    for k in cc.vertices:
        cycle = []
        edges_c = cc.vertex_edges(k)
        faces_c = cc.vertex_faces(k)
        # between corner(k, f_t) and corner(k, f_{t+1}) sits the hat
        # triangle across the shared base edge e_{t+1}
        n = len(faces_c)
        for t in range(n):
            cycle.append(("e", h.eindex[("corner", (k, faces_c[t]))]))
            cycle.append(("t", h.findex[(k, edges_c[(t + 1) % n])]))
        h.links[("v", k)] = cycle
    for fi, f in enumerate(cc.faces):
        cycle = []
        n = len(f)
        for t in range(n):
            v, w = f[t], f[(t + 1) % n]
            e = edge_key(v, w)
            cycle.append(("e", h.eindex[("corner", (v, fi))]))
            cycle.append(("t", h.findex[(v, e)]))
            cycle.append(("e", h.eindex[("dual", e)]))
            cycle.append(("t", h.findex[(w, e)]))
        h.links[("f", fi)] = cycle

    # overlap graph: two open stars are adjacent when they share a cell
    verts = list(h.stars)
    h.overlap = {v: set() for v in verts}
    for i, a in enumerate(verts):
        va, ea, fa = h.stars[a]
        for b in verts[i + 1:]:
            vb, eb, fb = h.stars[b]
            if (va & vb) or (ea & eb) or (fa & fb):
                h.overlap[a].add(b)
                h.overlap[b].add(a)


# ---------------------------------------------------------------------------
# Domains


@dataclass(frozen=True)
class Domain:
    hat: HatTriangulation = field(hash=False, compare=False)
    generators: frozenset  # of hat vertices
    vmask: int
    emask: int
    fmask: int

    @property
    def triangles(self):
        """Indices of the hat triangles realizing the domain."""
        return [i for i in range(len(self.hat.hat_faces)) if self.fmask >> i & 1]

    def contains_cell(self, kind, idx):
        mask = {"v": self.vmask, "e": self.emask, "t": self.fmask}[kind]
        return bool(mask >> idx & 1)

    def is_whole_surface(self):
        return (self.vmask, self.emask, self.fmask) == self.hat.full_masks()

    def meets_base_vertices(self):
        return bool(self.vmask & self.hat.base_vertex_mask())

    def boundary_touches(self, hv):
        """True when hat vertex hv lies on the topological boundary."""
        i = self.hat.vindex[hv]
        if self.vmask >> i & 1:
            return False
        for kind, idx in self.hat.links[hv]:
            if self.contains_cell(kind, idx):
                return True
        return False

    def is_strict(self):
        """No point vertex on the boundary (Def. of strict admissibility)."""
        for v in self.hat.base.v0:
            if self.boundary_touches(("v", v)):
                return False
        return True

    def is_open_star_of(self):
        """The hat vertex whose open star this is, or None."""
        if len(self.generators) == 1:
            return next(iter(self.generators))
        return None


def make_domain(h, generators):
    vmask = emask = fmask = 0
    for g in generators:
        vm, em, fm = h.stars[g]
        vmask |= vm
        emask |= em
        fmask |= fm
    return Domain(hat=h, generators=frozenset(generators),
                  vmask=vmask, emask=emask, fmask=fmask)


def open_star(h, hv):
    if hv not in h.stars:
        raise IndexMismatch(f"unknown hat vertex {hv}")
    return make_domain(h, [hv])


def euler_char(d):
    """Euler characteristic of the open domain by open-cell counting."""
    return (d.vmask.bit_count() - d.emask.bit_count() + d.fmask.bit_count())


def _generators_connected(h, gens):
    gens = set(gens)
    if not gens:
        return False
    seen = {next(iter(sorted(gens)))}
    queue = list(seen)
    while queue:
        g = queue.pop()
        for nb in h.overlap[g]:
            if nb in gens and nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return seen == gens


def is_admissible(d):
    """Conditions of an admissible domain: union of open stars by
    construction; connected; nonempty; not the whole surface; meets the
    base vertex set."""
    if not d.generators:
        return False
    if d.is_whole_surface():
        return False
    if not d.meets_base_vertices():
        return False
    return _generators_connected(d.hat, d.generators)


class DomainEnumeration:
    """Iterable over admissible domains; ``partial`` is True when the
    complex was too large for exhaustive enumeration."""

    def __init__(self, domains, partial):
        self._domains = domains
        self.partial = partial

    def __iter__(self):
        return iter(self._domains)

    def __len__(self):
        return len(self._domains)


def admissible_domains(h, strict=False, cap=22, require_exhaustive=False):
    """Enumerate admissible domains (strict ones when ``strict``).

    Exhaustive when the hat triangulation has at most ``cap`` vertices;
    otherwise the enumeration is flagged PARTIAL and covers all
    one-generator and two-generator connected domains."""
    nv = len(h.vertices)
    partial = nv > cap
    if partial and require_exhaustive:
        raise CapExceeded(f"{nv} hat vertices exceed the cap of {cap}")

    if partial:
        gen_sets = _small_generator_sets(h)
    else:
        gen_sets = _connected_generator_sets(h, strict_prune=strict)

    out = []
    for gens in gen_sets:
        d = make_domain(h, gens)
        if not is_admissible(d):
            continue
        if strict and not d.is_strict():
            continue
        out.append(d)
    out.sort(key=lambda d: sorted(d.generators))
    return DomainEnumeration(out, partial)


def _small_generator_sets(h):
    verts = sorted(h.stars)
    for v in verts:
        yield (v,)
    for i, a in enumerate(verts):
        for b in verts[i + 1:]:
            if b in h.overlap[a]:
                yield (a, b)


def _connected_generator_sets(h, strict_prune=False):
    """All connected vertex subsets of the star-overlap graph.  With
    strict_prune, branches that can never yield a strict domain (a dual
    generator whose point vertex can no longer join the set) are cut;
    this is an optimization only, the strictness filter stays
    authoritative."""
    verts = sorted(h.stars)
    order = {v: i for i, v in enumerate(verts)}
    v0 = h.base.v0

    def can_be_strict(x, current, banned, root_order):
        if x[0] != "f":
            return True
        for v in h.base.faces[x[1]]:
            if v not in v0:
                continue
            hv = ("v", v)
            if hv in current:
                continue
            if hv in banned or order[hv] <= root_order:
                return False
        return True

    def rec(current, frontier, banned):
        yield tuple(current)
        frontier = list(frontier)
        local_ban = set()
        root_order = order[current[0]]
        for x in frontier:
            if x in banned or x in local_ban:
                continue
            if strict_prune and not can_be_strict(
                    x, current, banned | local_ban, root_order):
                local_ban.add(x)
                continue
            new_frontier = [
                y for y in frontier if y != x and y not in local_ban
            ]
            for nb in sorted(h.overlap[x], key=order.get):
                if (nb not in current and nb not in banned
                        and nb not in local_ban and nb not in new_frontier
                        and order[nb] > order[current[0]]):
                    new_frontier.append(nb)
            current.append(x)
            yield from rec(current, new_frontier, banned | local_ban)
            current.pop()
            local_ban.add(x)

    for i, root in enumerate(verts):
        frontier = [v for v in sorted(h.overlap[root], key=order.get)
                    if order[v] > i]
        yield from rec([root], frontier, set())


# ---------------------------------------------------------------------------
# Boundary traces


@dataclass(frozen=True)
class BoundaryTrace:
    """Immersed boundary of an admissible domain.

    ``walks`` is a list of closed edge walks; each step is a tuple
    ``(edge_index, from_hat_vertex, to_hat_vertex)``.  ``punctures`` lists
    hat vertices that form isolated boundary points (degenerate walks).
    """

    walks: tuple
    punctures: tuple

    def edge_multiplicities(self):
        mult = {}
        for walk in self.walks:
            for ei, _a, _b in walk:
                mult[ei] = mult.get(ei, 0) + 1
        return mult

    def count_base_vertices(self):
        """|boundary ∩ V|: base-vertex occurrences along the walks, with
        multiplicity; punctures at base vertices count once."""
        n = 0
        for walk in self.walks:
            for _ei, _a, b in walk:
                if b[0] == "v":
                    n += 1
        n += sum(1 for p in self.punctures if p[0] == "v")
        return n


def boundary(h, d):
    """Boundary trace of an admissible domain as immersed closed walks."""
    # directed boundary incidences: (edge index, triangle index) with the
    # triangle inside the domain and the edge outside
    incidences = set()
    for ti, hf in enumerate(h.hat_faces):
        if not (d.fmask >> ti & 1):
            continue
        for ei in _triangle_edge_indices(h, hf):
            if not (d.emask >> ei & 1):
                incidences.add((ei, ti))

    def endpoints(ei):
        kind, data = h.edges[ei]
        if kind == "dual":
            fa, fb = h.base.edge_faces[data]
            return ("f", min(fa, fb)), ("f", max(fa, fb))
        v, fi = data
        return ("v", v), ("f", fi)

    # A directed step is identified with its incidence (ei, ti): for
    # multiplicity-2 edges the two incidences are traversed in opposite
    # directions, so (ei, ti) is a faithful key.  The traversal direction
    # keeps the domain on a fixed side: the head is the endpoint at whose
    # link the triangle ti immediately follows ei in cycle order, and the
    # next incidence is found by rotating at the head from ei through ti
    # to the first edge outside the domain.
    steps = {}
    for ei, ti in incidences:
        a, b = endpoints(ei)
        head = b if _first_step_is(h, b, ei, ti) else a
        tail = a if head == b else b
        nxt = _rotate_to_next(h, d, head, ei, ti)
        steps[(ei, ti)] = (tail, head, nxt)

    visited = set()
    walks = []
    for start in sorted(steps):
        if start in visited:
            continue
        walk = []
        cur = start
        while True:
            visited.add(cur)
            tail, head, nxt = steps[cur]
            walk.append((cur[0], tail, head))
            if nxt == start:
                break
            cur = nxt
        walks.append(tuple(walk))

    punctures = []
    for hv in h.stars:
        i = h.vindex[hv]
        if d.vmask >> i & 1:
            continue
        link = h.links[hv]
        if link and all(d.contains_cell(k, idx) for k, idx in link):
            punctures.append(hv)

    return BoundaryTrace(walks=tuple(walks), punctures=tuple(sorted(punctures)))


def _triangle_edge_indices(h, hf):
    fa, fb = hf.duals
    v = hf.corner
    return (
        h.eindex[("dual", hf.across)],
        h.eindex[("corner", (v, fa))],
        h.eindex[("corner", (v, fb))],
    )


def _first_step_is(h, hv, ei, ti):
    """At hat vertex hv, check that in the link cycle the triangle right
    after edge ei (in forward cycle direction) is ti."""
    link = h.links[hv]
    n = len(link)
    for p, cell in enumerate(link):
        if cell == ("e", ei):
            return link[(p + 1) % n] == ("t", ti)
    raise AssertionError(f"edge {ei} not in link of {hv}")


def _rotate_to_next(h, d, hv, ei, ti):
    """Rotate around hv starting at edge ei, stepping first onto triangle
    ti, and return the incidence (edge, triangle) of the first edge not in
    the domain.  Returns None when ti is not the immediate neighbor of ei
    in either rotation sense at hv."""
    link = h.links[hv]
    n = len(link)
    try:
        p = link.index(("e", ei))
    except ValueError:
        return None
    if link[(p + 1) % n] == ("t", ti):
        step = 1
    elif link[(p - 1) % n] == ("t", ti):
        step = -1
    else:
        return None
    q = p + step
    last_tri = ti
    for _ in range(n):
        cell = link[q % n]
        if cell[0] == "t":
            last_tri = cell[1]
        else:
            if not d.contains_cell("e", cell[1]):
                return (cell[1], last_tri)
        q += step
    raise AssertionError("link rotation did not terminate")


# ---------------------------------------------------------------------------
# Fast boundary statistics (no walk construction)


def boundary_counts(h, d, e0_dual_indices=None):
    """(dual-edge multiplicity map, |boundary ∩ V|, |boundary ∩ E0|)
    computed directly from the cell masks; agrees with the walk-based
    BoundaryTrace counts."""
    dual_mult = {}
    n_e0 = 0
    for ti, hf in enumerate(h.hat_faces):
        if not (d.fmask >> ti & 1):
            continue
        for ei in _triangle_edge_indices(h, hf):
            if d.emask >> ei & 1:
                continue
            kind, data = h.edges[ei]
            if kind == "dual":
                dual_mult[data] = dual_mult.get(data, 0) + 1
                if e0_dual_indices is not None and ei in e0_dual_indices:
                    n_e0 += 1

    n_v = 0
    for v in h.base.vertices:
        hv = ("v", v)
        i = h.vindex[hv]
        if d.vmask >> i & 1:
            continue
        link = h.links[hv]
        inside = [d.contains_cell(k, idx) for k, idx in link]
        if not any(inside):
            continue
        if all(inside):
            n_v += 1  # puncture
            continue
        # number of maximal runs of inside cells around the link
        runs = sum(
            1 for t in range(len(link)) if inside[t] and not inside[t - 1]
        )
        n_v += runs
    return dual_mult, n_v, n_e0
