"""Shared construction helpers for the test suite."""

import numpy as np

from smartpatch import BezierPatch, bs_solve, hs_twists

CORNER_SLOTS = ((0, 0), (0, 3), (3, 0), (3, 3))
NONCORNER_SLOTS = tuple(
    (i, j) for i in range(4) for j in range(4) if (i, j) not in CORNER_SLOTS
)


def bilinear_grid(c00, c01, c10, c11) -> np.ndarray:
    """Control grid exactly representing the bilinear blend of four corners.

    A degree-(1,1) function written as a bicubic patch has control values
    equal to the function at the Greville points (i/3, j/3).
    """
    g = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            u, v = i / 3.0, j / 3.0
            g[i, j] = (
                c00 * (1 - u) * (1 - v)
                + c01 * (1 - u) * v
                + c10 * u * (1 - v)
                + c11 * u * v
            )
    return g


def identity_plane_patch() -> BezierPatch:
    """The patch (u, v) -> (u, v, 0)."""
    gu = np.array([[i / 3.0] * 4 for i in range(4)])
    return BezierPatch(gu, gu.T, np.zeros((4, 4)))


def random_patch(rng, lo=-10.0, hi=10.0) -> BezierPatch:
    return BezierPatch(*rng.uniform(lo, hi, (3, 4, 4)))


def random_compliant_grid(rng, lo=-10.0, hi=10.0) -> np.ndarray:
    return bs_solve(rng.uniform(lo, hi, 4), rng.uniform(lo, hi, 7))


def random_compliant_patch(rng, lo=-10.0, hi=10.0) -> BezierPatch:
    return BezierPatch(*(random_compliant_grid(rng, lo, hi) for _ in range(3)))


def hs_consistent_grid(rng, lo=-10.0, hi=10.0) -> np.ndarray:
    """Hermite-layout grid satisfying all twist and tangent conditions.

    Twists come from the (alpha, beta) parameterization; the tangent
    entries h14, h13 and h31 are then solved so the three tangent sums
    take the values tied to those weights.
    """
    h = rng.uniform(lo, hi, (4, 4))
    phi = h[0, 0] - h[0, 1] - h[1, 0] + h[1, 1]
    alpha, beta = rng.uniform(-2.0, 2.0, 2)
    h[2, 2], h[2, 3], h[3, 2], h[3, 3] = hs_twists(phi, alpha, beta)
    a_t = -phi - 2.0 * phi * alpha
    b_t = -phi - 2.0 * phi * beta
    c_t = -4.0 * phi - a_t - b_t
    h[0, 3] = a_t + h[1, 3] - h[3, 0] + h[3, 1]  # a = h14 - h24 + h41 - h42
    h[0, 2] = b_t + h[1, 2] - h[3, 0] + h[3, 1]  # b = h13 - h23 + h41 - h42
    h[2, 0] = c_t + h[2, 1] + h[3, 0] - h[3, 1]  # c = h31 - h32 - h41 + h42
    return h


def shared_edge_pair(rng) -> tuple:
    """Two random patches whose U1/U0 edges carry identical control points."""
    a = random_patch(rng)
    b_grids = []
    for ga in a.grids:
        gb = rng.uniform(-10.0, 10.0, (4, 4))
        gb[0, :] = ga[3, :]
        b_grids.append(gb)
    return a, BezierPatch(*b_grids)
