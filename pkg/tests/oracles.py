"""Independent high-precision oracles used to pin test values.

Everything here is computed with mpmath or with formulas deliberately
different from the ones in the package, so agreement is meaningful.
"""

import math

import mpmath as mp

mp.mp.dps = 40


def mp_lobachevsky(theta):
    """Lobachevsky function via the Clausen function: L(t) = Cl2(2t)/2."""
    return float(mp.clsin(2, 2 * theta) / 2)


def eucl_orthocircle(points, radii):
    """Center and radius of the circle orthogonal to three circles, via
    the normal equations of the power condition (different route from
    the package's Cramer solve): |o - p_i|^2 = R^2 + r_i^2."""
    (x1, y1), (x2, y2), (x3, y3) = points
    r1, r2, r3 = radii
    # subtract pairs: 2 o . (p_i - p_j) = |p_i|^2 - |p_j|^2 - r_i^2 + r_j^2
    A = mp.matrix([[2 * (x1 - x2), 2 * (y1 - y2)],
                   [2 * (x2 - x3), 2 * (y2 - y3)]])
    rhs = mp.matrix([
        x1 * x1 + y1 * y1 - x2 * x2 - y2 * y2 - r1 * r1 + r2 * r2,
        x2 * x2 + y2 * y2 - x3 * x3 - y3 * y3 - r2 * r2 + r3 * r3,
    ])
    o = mp.lu_solve(A, rhs)
    R2 = (o[0] - x1) ** 2 + (o[1] - y1) ** 2 - r1 * r1
    return (float(o[0]), float(o[1])), float(mp.sqrt(R2))


def eucl_alpha_arcsin(d, R):
    """alpha from the half-chord the edge line cuts out of the face
    circle: sin(alpha) = sqrt(R^2 - d^2)/R, with d the center-to-line
    distance (complementary route to the package's arccos(d/R))."""
    hc = mp.sqrt(R * R - d * d)
    return float(mp.asin(hc / R)) if d >= 0 else math.pi - float(
        mp.asin(hc / R))


def hyp_v1v1_length(a, bu, bv):
    """Distance between the two positive-circle centers of a
    hyper-ideal tetrahedron edge, via the perpendicular-chain
    derivation."""
    return float(mp.acosh((mp.cosh(a) + mp.cosh(bu) * mp.cosh(bv))
                          / (mp.sinh(bu) * mp.sinh(bv))))


def hyp_v0v1_length(a, bv):
    return float(mp.acosh((mp.e ** a + mp.cosh(bv)) / mp.sinh(bv)))


def hyp_v0v0_length(a):
    # cosh l = 1 + 2 e^a, an algebraic form of l = 2 asinh(e^(a/2))
    return float(mp.acosh(1 + 2 * mp.e ** a))


def hyp_radius(b):
    return float(mp.asinh(1 / mp.sinh(b)))


def hyp_dual_length(R1, R2, theta):
    return float(mp.acosh(mp.cosh(R1) * mp.cosh(R2)
                          - mp.sinh(R1) * mp.sinh(R2) * mp.cos(theta)))


def eucl_dual_length(R1, R2, theta):
    return float(mp.sqrt(R1 * R1 + R2 * R2 + 2 * R1 * R2 * mp.cos(theta)))


def ideal_volume(alphas):
    """Volume of an ideal tetrahedron with dihedral angles alpha_i at
    the base (classical formula: sum of Lobachevsky values)."""
    return sum(mp_lobachevsky(a) for a in alphas)


# ---------------------------------------------------------------------------
# Frozen [DERIVED] literals (mpmath / analytic; see the inline notes)

# 3 L(pi/3): volume of the regular ideal tetrahedron
REGULAR_IDEAL_VOLUME = 1.0149416064096537  # float(3*mp.clsin(2, 2*pi/3)/2)

# equilateral decorated triangle, l = 2.5, r = 1 everywhere:
# circumradius 2.5/sqrt(3), R = sqrt(25/12 - 1), alpha = asin(1.25/R)...
# resolved against the orthocircle construction
EQUILATERAL_25_R = 1.0408329997330663  # sqrt(25/12 - 1)
EQUILATERAL_25_ALPHA = 0.8046336771011123  # acos((2.5/(2*sqrt(3)))/R)

# tangent equilateral: l = 2, r = 1: R = sqrt(4/3 - 1) = 1/sqrt(3)
TANGENT_EQUILATERAL_R = 0.5773502691896258

# face-circle center distance solving the N=5 all-V1, all-free
# Euclidean closure: x = (l/2) / sin(pi/5) with l = 2.5
PENTAGON_XSTAR = 2.1266270208800998  # 1.25/sin(pi/5)

ASINH_SQRT2_8 = 0.17586869502163029  # float(mp.asinh(mp.sqrt(2)/8))
