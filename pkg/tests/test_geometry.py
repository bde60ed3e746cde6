import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracles
from hicp.errors import DomainError, InvariantViolation, NotInTE
from hicp.geometry import (
    CORNERS_OF_EDGE,
    EDGES_AT_CORNER,
    EUCLIDEAN,
    HYPERBOLIC,
    TriangleTags,
    _section_project,
    act,
    angles_valid,
    check_er_triangle,
    dual_edge_length,
    edge_length,
    face_circle,
    gauge_direction,
    in_te,
    lobachevsky,
    phi_inv,
    place_euclidean,
    project_gauge,
    psi,
    psi_inv,
    reference_angles,
    reference_er_triangle,
    tetra_angles,
    tetra_volume,
    tri_coords,
    triangle_angles,
    triangle_tags,
    vertex_dual_length,
    vertex_radius,
)

BOTH = (EUCLIDEAN, HYPERBOLIC)

# one representative per combinatorial class that can occur in a
# triangulated pattern (tangency edges need two positive endpoints)
TAG_CLASSES = (
    TriangleTags((1, 1, 1), (1, 1, 1)),
    TriangleTags((1, 1, 1), (0, 1, 1)),
    TriangleTags((0, 1, 1), (1, 1, 1)),
    TriangleTags((0, 1, 1), (1, 0, 1)),
    TriangleTags((0, 0, 1), (1, 1, 1)),
    TriangleTags((0, 0, 0), (1, 1, 1)),
    TriangleTags((1, 1, 1), (0, 0, 0)),
)


def perturbed_er(tags, g, deltas):
    """Reference edge-radius point of the class, nudged by relative
    amounts deltas[0:3] on radii and deltas[3:6] on free lengths."""
    l0, r0 = reference_er_triangle(tags, g)
    r = tuple(r0[v] * (1 + deltas[v]) if tags.vc[v] == 1 else 0.0
              for v in range(3))
    l = []
    for m in range(3):
        u, v = CORNERS_OF_EDGE[m]
        if tags.ec[m] == 0:
            l.append(r[u] + r[v])
        else:
            l.append(l0[m] * (1 + deltas[3 + m]))
    return tuple(l), r


deltas_st = st.lists(st.floats(-0.08, 0.08, allow_nan=False),
                     min_size=6, max_size=6)


# ---------------------------------------------------------------------------
# Psi and its inverse


class TestPsi:
    @settings(max_examples=80, deadline=None)
    @given(tags=st.sampled_from(TAG_CLASSES), g=st.sampled_from(BOTH),
           deltas=deltas_st)
    def test_psi_inv_roundtrip(self, tags, g, deltas):
        er = perturbed_er(tags, g, deltas)
        try:
            tc = psi_inv(er, tags, g)
        except (InvariantViolation, DomainError):
            assume(False)
        l3, r3 = psi(tc, tags, g)
        assert l3 == pytest.approx(er[0], rel=1e-12, abs=1e-12)
        assert r3 == pytest.approx(er[1], rel=1e-12, abs=1e-12)

    def test_reference_points_are_admissible(self):
        for tags in TAG_CLASSES:
            for g in BOTH:
                er = reference_er_triangle(tags, g)
                check_er_triangle(er, tags, g)
                ta = triangle_angles(er, tags, g)
                assert angles_valid(ta, tags, g)

    def test_hyperbolic_lengths_match_oracle(self):
        for a, bu, bv in ((0.3, 0.8, 1.1), (-0.2, 0.5, 0.5),
                          (1.0, 1.4, 0.7)):
            l = edge_length(HYPERBOLIC, 1, 1, 1, a, bu, bv)
            assert l == pytest.approx(oracles.hyp_v1v1_length(a, bu, bv),
                                      rel=1e-14)
            l = edge_length(HYPERBOLIC, 1, 0, 1, a, bu, bv)
            assert l == pytest.approx(oracles.hyp_v0v1_length(a, bv),
                                      rel=1e-14)
            l = edge_length(HYPERBOLIC, 1, 0, 0, a, bu, bv)
            assert l == pytest.approx(oracles.hyp_v0v0_length(a), rel=1e-14)
            assert vertex_radius(HYPERBOLIC, 1, bu) == pytest.approx(
                oracles.hyp_radius(bu), rel=1e-14)

    def test_point_vertex_radius_is_zero(self):
        assert vertex_radius(EUCLIDEAN, 0, 123.0) == 0.0
        assert vertex_radius(HYPERBOLIC, 0, 123.0) == 0.0

    def test_hyperbolic_b_must_be_positive(self):
        with pytest.raises(DomainError):
            vertex_radius(HYPERBOLIC, 1, -0.5)


class TestCheckErTriangle:
    tags = TriangleTags((1, 1, 1), (1, 1, 1))

    def test_triangle_inequality(self):
        with pytest.raises(InvariantViolation):
            check_er_triangle(((5.0, 1.0, 1.0), (0.4, 0.4, 0.4)),
                              self.tags, EUCLIDEAN)

    def test_nonpositive_length(self):
        with pytest.raises(InvariantViolation):
            check_er_triangle(((0.0, 1.0, 1.0), (0.1, 0.1, 0.1)),
                              self.tags, EUCLIDEAN)

    def test_overlapping_circles(self):
        # free edge must keep its endpoint circles disjoint
        with pytest.raises(InvariantViolation):
            check_er_triangle(((2.0, 2.5, 2.5), (1.2, 1.2, 1.2)),
                              self.tags, EUCLIDEAN)

    def test_tangency_length_pinned(self):
        tags = TriangleTags((1, 1, 1), (0, 1, 1))
        with pytest.raises(InvariantViolation):
            check_er_triangle(((2.1, 2.5, 2.5), (1.0, 1.0, 1.0)),
                              tags, EUCLIDEAN)

    def test_radius_class_consistency(self):
        with pytest.raises(InvariantViolation):
            check_er_triangle(((2.5, 2.5, 2.5), (1.0, 1.0, 0.0)),
                              self.tags, EUCLIDEAN)
        with pytest.raises(InvariantViolation):
            check_er_triangle(((2.5, 2.5, 2.5), (1.0, 1.0, 0.3)),
                              TriangleTags((1, 1, 0), (1, 1, 1)), EUCLIDEAN)


# ---------------------------------------------------------------------------
# Face circles and decorated angles


class TestFaceCircle:
    def test_equilateral_pinned(self):
        er = ((2.5, 2.5, 2.5), (1.0, 1.0, 1.0))
        tags = TriangleTags((1, 1, 1), (1, 1, 1))
        fc = face_circle(er, EUCLIDEAN)
        assert fc.R == pytest.approx(oracles.EQUILATERAL_25_R, abs=1e-12)
        ta = triangle_angles(er, tags, EUCLIDEAN)
        for m in range(3):
            assert ta.alpha[m] == pytest.approx(
                oracles.EQUILATERAL_25_ALPHA, abs=1e-9)

    def test_tangent_equilateral_pinned(self):
        er = ((2.0, 2.0, 2.0), (1.0, 1.0, 1.0))
        tags = TriangleTags((1, 1, 1), (0, 0, 0))
        fc = face_circle(er, EUCLIDEAN)
        assert fc.R == pytest.approx(oracles.TANGENT_EQUILATERAL_R, abs=1e-12)
        ta = triangle_angles(er, tags, EUCLIDEAN)
        assert ta.alpha == (0.0, 0.0, 0.0)
        for b in ta.beta:
            assert b == pytest.approx(math.pi / 3, abs=1e-12)

    def test_against_orthocircle_oracle(self):
        er = ((2.2, 2.7, 3.0), (0.9, 0.6, 1.1))
        fc = face_circle(er, EUCLIDEAN)
        pts = place_euclidean(er[0])
        _o, R = oracles.eucl_orthocircle(pts, er[1])
        assert fc.R == pytest.approx(R, rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(tags=st.sampled_from(TAG_CLASSES), g=st.sampled_from(BOTH),
           deltas=deltas_st)
    def test_orthogonality_distances(self, tags, g, deltas):
        # center-to-vertex distance equals the orthogonality relation
        # between the face circle and each vertex circle
        er = perturbed_er(tags, g, deltas)
        try:
            check_er_triangle(er, tags, g)
        except (InvariantViolation, DomainError):
            assume(False)
        fc = face_circle(er, g)
        for v in range(3):
            assert fc.dist[v] == pytest.approx(
                vertex_dual_length(fc.R, er[1][v], g), abs=1e-9)


class TestTriangleAngles:
    @settings(max_examples=50, deadline=None)
    @given(tags=st.sampled_from(TAG_CLASSES), g=st.sampled_from(BOTH),
           deltas=deltas_st)
    def test_angle_identities(self, tags, g, deltas):
        er = perturbed_er(tags, g, deltas)
        try:
            check_er_triangle(er, tags, g)
        except (InvariantViolation, DomainError):
            assume(False)
        ta = triangle_angles(er, tags, g)
        sb = sum(ta.beta)
        if g == EUCLIDEAN:
            assert sb == pytest.approx(math.pi, abs=1e-12)
        else:
            assert sb < math.pi
        for v in range(3):
            m1, m2 = EDGES_AT_CORNER[v]
            s = ta.beta[v] + ta.alpha[m1] + ta.alpha[m2]
            if tags.vc[v] == 0:
                assert s == pytest.approx(math.pi, abs=1e-9)
            else:
                assert s < math.pi
        for m in range(3):
            if tags.ec[m] == 0:
                assert ta.alpha[m] == 0.0

    def test_angles_valid_rejects_out_of_range(self):
        tags = TriangleTags((1, 1, 1), (1, 1, 1))
        ta = reference_angles(tags, EUCLIDEAN)
        bad = ta.__class__(alpha=(-0.1,) + ta.alpha[1:], beta=ta.beta)
        assert not angles_valid(bad, tags, EUCLIDEAN)


# ---------------------------------------------------------------------------
# Dual lengths


class TestDualLengths:
    def test_endpoints(self):
        for g in BOTH:
            for R, Rp in ((0.3, 0.8), (1.1, 0.05), (0.6, 0.6)):
                assert dual_edge_length(R, Rp, 0.0, g) == pytest.approx(
                    R + Rp, abs=1e-12)
            for R in (0.4, 1.3):
                assert dual_edge_length(R, R, math.pi, g) == pytest.approx(
                    0.0, abs=1e-12)

    def test_hyperbolic_against_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            R, Rp = rng.uniform(0.05, 1.5, 2)
            th = rng.uniform(0.0, math.pi)
            # the oracle carries the complementary-angle form
            assert dual_edge_length(R, Rp, th, HYPERBOLIC) == pytest.approx(
                oracles.hyp_dual_length(R, Rp, math.pi - th), rel=1e-12)
            assert dual_edge_length(R, Rp, th, EUCLIDEAN) == pytest.approx(
                oracles.eucl_dual_length(R, Rp, th), rel=1e-12)

    def test_vertex_dual_length(self):
        assert vertex_dual_length(3.0, 4.0, EUCLIDEAN) == pytest.approx(5.0)
        assert vertex_dual_length(0.7, 0.0, HYPERBOLIC) == pytest.approx(0.7)
        assert vertex_dual_length(0.5, 0.0, EUCLIDEAN) == 0.5


# ---------------------------------------------------------------------------
# Lobachevsky function and volumes


class TestLobachevsky:
    def test_against_clausen(self):
        for t in np.linspace(-3.0, 3.0, 61):
            assert lobachevsky(t) == pytest.approx(
                oracles.mp_lobachevsky(t), abs=1e-14)

    def test_odd_and_periodic(self):
        for t in (0.1, 0.7, 1.3):
            assert lobachevsky(-t) == pytest.approx(-lobachevsky(t),
                                                    abs=1e-15)
            assert lobachevsky(t + math.pi) == pytest.approx(
                lobachevsky(t), abs=1e-14)

    def test_zeros(self):
        assert lobachevsky(0.0) == 0.0
        assert lobachevsky(math.pi / 2) == pytest.approx(0.0, abs=1e-15)


class TestTetraVolume:
    def test_reference_is_zero(self):
        for tags in TAG_CLASSES:
            for g in BOTH:
                if g == EUCLIDEAN and all(c == 0 for c in tags.vc):
                    continue
                v = tetra_volume(reference_angles(tags, g), tags, g)
                assert v == pytest.approx(0.0, abs=1e-13)

    def test_regular_ideal_anchor(self):
        tags = TriangleTags((0, 0, 0), (1, 1, 1))
        er = reference_er_triangle(tags, EUCLIDEAN)
        ta = triangle_angles(er, tags, EUCLIDEAN)
        # reference of this class is equilateral, hence regular ideal
        assert tetra_volume(ta, tags, EUCLIDEAN) == pytest.approx(
            oracles.REGULAR_IDEAL_VOLUME, abs=1e-12)

    def test_generic_ideal_matches_lobachevsky_sum(self):
        tags = TriangleTags((0, 0, 0), (1, 1, 1))
        er = ((2.0, 2.5, 3.0), (0.0, 0.0, 0.0))
        ta = triangle_angles(er, tags, EUCLIDEAN)
        vol = tetra_volume(ta, tags, EUCLIDEAN)
        assert vol == pytest.approx(oracles.ideal_volume(ta.alpha), abs=1e-9)


# ---------------------------------------------------------------------------
# Angle chart inversion


class TestPhiInv:
    def test_roundtrip(self):
        rng = np.random.default_rng(11)
        for tags in TAG_CLASSES:
            for g in BOTH:
                for _ in range(3):
                    deltas = rng.uniform(-0.06, 0.06, 6)
                    er = perturbed_er(tags, g, deltas)
                    try:
                        tc = psi_inv(er, tags, g)
                    except (InvariantViolation, DomainError):
                        continue
                    ta = triangle_angles(er, tags, g)
                    a3, b3 = phi_inv(ta, tags, g)
                    pa, pb = _section_project(tc, tags, g)
                    for m in range(3):
                        if tags.ec[m] != 0:
                            assert a3[m] == pytest.approx(pa[m], abs=1e-9)
                    for v in range(3):
                        if tags.vc[v] == 1:
                            assert b3[v] == pytest.approx(pb[v], abs=1e-9)


# ---------------------------------------------------------------------------
# Gauge action on a surface


class TestGauge:
    def _ref(self, grid_torus_T):
        from hicp.solver import reference_coords
        return reference_coords(grid_torus_T, EUCLIDEAN)

    def test_angles_invariant_under_action(self, grid_torus_T):
        T = grid_torus_T
        tc = self._ref(T)
        tc2 = act(T, tc, 0.37, EUCLIDEAN)
        for tri in T.triangles:
            tags = triangle_tags(T, tri)
            ta = tetra_angles(tri_coords(T, tc, tri), tags, EUCLIDEAN)
            ta2 = tetra_angles(tri_coords(T, tc2, tri), tags, EUCLIDEAN)
            assert ta2.alpha == pytest.approx(ta.alpha, abs=1e-12)
            assert ta2.beta == pytest.approx(ta.beta, abs=1e-12)

    def test_project_gauge_idempotent(self, grid_torus_T):
        T = grid_torus_T
        tc = act(T, self._ref(T), 0.9, EUCLIDEAN)
        p = project_gauge(T, tc, EUCLIDEAN)
        da, db = gauge_direction(T)
        s = (sum(p.a[e] * da[e] for e in p.a)
             + sum(p.b[k] * db[k] for k in p.b))
        assert s == pytest.approx(0.0, abs=1e-12)
        p2 = project_gauge(T, p, EUCLIDEAN)
        for e in p.a:
            assert p2.a[e] == pytest.approx(p.a[e], abs=1e-12)

    def test_in_te(self, grid_torus_T):
        T = grid_torus_T
        tc = self._ref(T)
        assert in_te(T, tc, EUCLIDEAN)
        a = dict(tc.a)
        e = next(iter(a))
        a[e] = a[e] + 50.0
        assert not in_te(T, tc.__class__(a=a, b=dict(tc.b)), EUCLIDEAN)
