import math

import pytest

from hicp import (
    CapExceeded,
    E0EndpointInV0,
    NotClosedSurface,
    RegularityViolation,
    admissible_domains,
    boundary,
    build_complex,
    euler_char,
    fan_triangles,
    hat_complex,
    open_star,
    triangulate,
)
from hicp.complexes import boundary_counts, edge_key, make_domain
from hicp.errors import DomainError
from hicp.fixtures import (
    dodecahedron_spec,
    fixture_spec,
    grid_torus_spec,
    tetrahedron_spec,
)


def test_edge_key_sorts():
    assert edge_key(3, 1) == (1, 3)
    assert edge_key(1, 3) == (1, 3)


class TestBuildComplex:
    def test_grid_torus_counts(self, grid_torus):
        cc = grid_torus
        assert len(cc.vertices) == 9
        assert len(cc.edges) == 18
        assert len(cc.faces) == 9
        assert cc.chi == 0
        assert cc.genus == 1

    def test_genus2_counts(self, genus2):
        assert (len(genus2.vertices), len(genus2.edges),
                len(genus2.faces)) == (15, 51, 34)
        assert genus2.chi == -2
        assert genus2.genus == 2

    def test_dodecahedron_counts(self, dodecahedron):
        assert (len(dodecahedron.vertices), len(dodecahedron.edges),
                len(dodecahedron.faces)) == (20, 30, 12)
        assert dodecahedron.chi == 2

    def test_orientation_consistent(self, genus2):
        # every edge is traversed once in each direction
        seen = {}
        for f in genus2.faces:
            n = len(f)
            for t in range(n):
                d = (f[t], f[(t + 1) % n])
                assert d not in seen
                seen[d] = True
        assert len(seen) == 2 * len(genus2.edges)

    def test_vertex_classes(self, genus2_mixed):
        assert genus2_mixed.v1 == frozenset({2, 5, 7, 11, 14})
        assert genus2_mixed.vertex_class(2) == 1
        assert genus2_mixed.vertex_class(0) == 0

    def test_e0_requires_disk_endpoints(self):
        spec = grid_torus_spec(3, v1=(0,), e0=[(0, 1)])
        with pytest.raises(E0EndpointInV0):
            build_complex(spec)

    def test_open_surface_rejected(self):
        spec = {"vertices": [{"id": i, "circle": "point"} for i in range(4)],
                "faces": [[0, 1, 2], [0, 2, 3]]}
        with pytest.raises(NotClosedSurface):
            build_complex(spec)

    def test_sphere_from_tetrahedron(self):
        cc = build_complex(tetrahedron_spec())
        assert cc.chi == 2
        assert cc.v1 == frozenset(range(4))

    def test_parallel_edges_rejected(self):
        # two triangles glued along two of their edges
        spec = {"vertices": [{"id": i, "circle": "point"} for i in range(3)],
                "faces": [[0, 1, 2], [2, 1, 0]]}
        with pytest.raises(RegularityViolation):
            build_complex(spec)

    def test_vertex_link_cycles(self, grid_torus):
        for v in grid_torus.vertices:
            es = grid_torus.vertex_edges(v)
            fs = grid_torus.vertex_faces(v)
            assert len(es) == len(fs) == 4
            assert grid_torus.degree(v) == 4


class TestFanTriangles:
    def test_quad(self):
        tris, diags = fan_triangles((4, 7, 2, 9))
        assert diags == [(2, 4)]
        assert [t for t in tris] == [(2, 9, 4), (2, 4, 7)]

    def test_hexagon(self):
        tris, diags = fan_triangles((0, 1, 2, 3, 4, 5))
        assert len(tris) == 4
        assert len(diags) == 3
        assert all(0 in t for t in tris)

    def test_triangle_passthrough(self):
        tris, diags = fan_triangles((5, 2, 8))
        assert diags == []
        assert len(tris) == 1


class TestTriangulate:
    def test_grid_torus(self, grid_torus):
        T = triangulate(grid_torus)
        assert len(T.triangles) == 18
        assert len(T.e_pi) == 9
        assert len(T.edges) == 27
        for e in T.edges:
            assert len(T.edge_triangles[e]) == 2

    def test_edge_classes(self, e0_torus):
        T = triangulate(e0_torus)
        for e in e0_torus.e0:
            assert T.edge_class(e) == 0
        for e in T.e_pi:
            assert T.edge_class(e) == 2
        assert set(T.free_edges) == set(T.e_pi)

    def test_triangulated_input_is_unchanged(self, tri_torus):
        T = triangulate(tri_torus)
        assert T.e_pi == frozenset()
        assert len(T.triangles) == len(tri_torus.faces)


class TestHatComplex:
    def test_cell_counts(self, grid_torus):
        h = hat_complex(grid_torus)
        # vertices: base + one center per face; edges: one dual per edge
        # plus one corner edge per face corner; triangles: one per side
        # of each base edge
        assert len(h.vertices) == 9 + 9
        assert len(h.edges) == 18 + 36
        assert len(h.hat_faces) == 36

    def test_star_sizes(self, grid_torus):
        h = hat_complex(grid_torus)
        d = open_star(h, ("v", 0))
        # a degree-4 base vertex: its 4 corner edges and 4 triangles
        # (dual edges touch face centers only)
        assert d.vmask.bit_count() == 1
        assert d.emask.bit_count() == 4
        assert d.fmask.bit_count() == 4
        df = open_star(h, ("f", 0))
        # a quad face center: 4 corner edges + 4 duals, 8 triangles
        assert df.emask.bit_count() == 8
        assert df.fmask.bit_count() == 8

    def test_links_are_cycles(self, grid_torus):
        h = hat_complex(grid_torus)
        for hv, link in h.links.items():
            assert len(link) % 2 == 0
            assert all(kind in ("e", "t") for kind, _ in link)


class TestDomains:
    def test_open_star_euler(self, grid_torus):
        h = hat_complex(grid_torus)
        assert euler_char(open_star(h, ("v", 3))) == 1
        assert euler_char(open_star(h, ("f", 2))) == 1

    def test_open_star_detection(self, grid_torus):
        h = hat_complex(grid_torus)
        d = open_star(h, ("v", 5))
        assert d.is_open_star_of() == ("v", 5)
        d2 = make_domain(h, [("v", 5), ("f", 0)])
        assert d2.is_open_star_of() is None

    def test_tetrahedron_enumeration(self):
        h = hat_complex(build_complex(tetrahedron_spec()))
        ds = admissible_domains(h, require_exhaustive=True)
        assert len(ds) == 196  # pinned: exhaustive run over 2^8 subsets
        assert not ds.partial
        # all vertices are disk vertices, so every domain is strict
        assert len(admissible_domains(h, strict=True,
                                      require_exhaustive=True)) == 196

    def test_grid_torus_strict_count(self, grid_torus):
        h = hat_complex(grid_torus)
        ds = admissible_domains(h, strict=True, require_exhaustive=True)
        assert len(ds) == 519  # pinned: exhaustive enumeration
        for d in ds:
            assert d.is_strict()
            assert not d.is_whole_surface()
            assert d.meets_base_vertices()

    def test_cap(self, genus2):
        h = hat_complex(genus2)
        with pytest.raises(CapExceeded):
            admissible_domains(h, cap=10, require_exhaustive=True)
        ds = admissible_domains(h, cap=10)
        assert ds.partial
        assert len(ds) > 0


@pytest.mark.slow
def test_grid_torus_full_enumeration(grid_torus):
    h = hat_complex(grid_torus)
    ds = admissible_domains(h, require_exhaustive=True)
    assert len(ds) == 199131  # pinned: exhaustive enumeration


class TestBoundary:
    def test_open_star_boundary_closed(self, grid_torus):
        h = hat_complex(grid_torus)
        d = open_star(h, ("v", 4))
        tr = boundary(h, d)
        assert len(tr.walks) == 1
        assert tr.punctures == ()
        walk = tr.walks[0]
        assert walk[0][1] == walk[-1][2]  # closed
        # alternating face centers and nothing else: no base vertices
        assert tr.count_base_vertices() == 0

    def test_face_star_boundary_hits_vertices(self, grid_torus):
        h = hat_complex(grid_torus)
        d = open_star(h, ("f", 3))
        tr = boundary(h, d)
        assert tr.count_base_vertices() == 4

    def test_counts_match_trace(self, grid_torus):
        h = hat_complex(grid_torus)
        for gens in ([("v", 0)], [("f", 1)], [("v", 0), ("f", 0)],
                     [("v", 0), ("v", 1), ("f", 0)]):
            d = make_domain(h, gens)
            tr = boundary(h, d)
            mult, n_v, n_e0 = boundary_counts(h, d)
            dual_mult = {}
            for ei, m in tr.edge_multiplicities().items():
                kind, key = h.edges[ei]
                if kind == "dual":
                    dual_mult[key] = dual_mult.get(key, 0) + m
            assert mult == dual_mult
            assert n_v == tr.count_base_vertices()
            assert n_e0 == 0

    def test_puncture(self, grid_torus):
        h = hat_complex(grid_torus)
        # all four faces and the four neighbors around vertex 4, but not
        # vertex 4 itself: its link is inside, leaving a puncture
        gens = [("f", fi) for fi in range(len(grid_torus.faces))]
        gens += [("v", v) for v in grid_torus.vertices if v != 4]
        d = make_domain(h, gens)
        tr = boundary(h, d)
        assert ("v", 4) in tr.punctures


def test_unknown_fixture():
    with pytest.raises(DomainError):
        fixture_spec("nope")


def test_all_fixtures_build():
    from hicp.fixtures import FIXTURES
    for name in FIXTURES:
        cc = build_complex(fixture_spec(name))
        assert cc.chi % 2 == 0
