"""Bicubic Bezier and Hermite patches: evaluation and exact conversion.

A patch stores one 4x4 grid of control values per coordinate.  Bezier
grids hold control points; Hermite grids hold the corner/tangent/twist
block layout (see :class:`HermitePatch`).  Conversion between the two
forms is a fixed congruence by a basis-change matrix that is derived
once, exactly, from the two cubic bases.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .linalg import RationalMatrix


class DomainError(ValueError):
    """Parameter outside the unit square in strict evaluation mode."""


# Cubic Bernstein basis in monomial form: basis_i(t) = row i . [t^3,t^2,t,1].
_BB_ROWS = ((-1, 3, -3, 1), (3, -6, 3, 0), (-3, 3, 0, 0), (1, 0, 0, 0))
# Substitution 1-t: monomial vector of (1-t) = T . monomial vector of t.
_T_ROWS = ((-1, 3, -3, 1), (0, 1, -2, 1), (0, 0, -1, 1), (0, 0, 0, 1))
# Cubic Hermite basis (value at 0, value at 1, slope at 0, slope at 1).
_HB_ROWS = ((2, -3, 0, 1), (-2, 3, 0, 0), (1, -2, 1, 0), (1, -1, 0, 0))

_BB = np.array(_BB_ROWS, dtype=float)
_BB.flags.writeable = False


def bezier_basis() -> np.ndarray:
    """Coefficient matrix of the cubic Bernstein basis (monomial form)."""
    return _BB.copy()


def reparam_T() -> np.ndarray:
    """Matrix T with monomials(1-u) == T @ monomials(u)."""
    out = np.array(_T_ROWS, dtype=float)
    return out


@functools.lru_cache(maxsize=1)
def _conversion_matrices_exact():
    # Equating u^T Mb^T Xb Mb v with u^T Mh^T Xh Mh v for all (u,v) gives
    # Xb = C^T Xh C with C = Mh Mb^-1, and Xh = D^T Xb D with D = C^-1.
    mb = RationalMatrix(_BB_ROWS)
    mh = RationalMatrix(_HB_ROWS)
    c = mh @ mb.inverse()
    return c, c.inverse()


@functools.lru_cache(maxsize=1)
def _conversion_matrices():
    c, d = _conversion_matrices_exact()
    return c.to_float(), d.to_float()


def as_grid(values) -> np.ndarray:
    """Copy ``values`` into a read-only 4x4 float grid, rejecting non-finite entries."""
    g = np.array(values, dtype=float)
    if g.shape != (4, 4):
        raise ValueError(f"grid must be 4x4, got {g.shape}")
    if not np.isfinite(g).all():
        raise ValueError("grid contains non-finite values")
    g.flags.writeable = False
    return g


@dataclass(frozen=True)
class BezierPatch:
    """Bicubic Bezier patch: one control-value grid per coordinate.

    Grid indexing is ``g[i][j]`` with ``i`` along u and ``j`` along v, so
    ``g[0][0]`` is the control point at (u,v) = (0,0) and ``g[3][0]`` the
    one at (1,0).
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, as_grid(getattr(self, name)))

    @property
    def grids(self):
        return (self.x, self.y, self.z)

    @functools.cached_property
    def as_array(self) -> np.ndarray:
        """(3,4,4) stacked view of the three coordinate grids."""
        a = np.stack(self.grids)
        a.flags.writeable = False
        return a

    def control_point(self, i: int, j: int) -> np.ndarray:
        return np.array([self.x[i, j], self.y[i, j], self.z[i, j]])


@dataclass(frozen=True)
class HermitePatch:
    """Bicubic Hermite patch, grids in corner/tangent/twist block layout.

    Per coordinate, with rows/cols written 1..4:

    * ``h11 h12 / h21 h22``  corner values P(0,0), P(0,1), P(1,0), P(1,1)
    * ``h13 h14 / h23 h24``  v-tangents at those corners
    * ``h31 h32 / h41 h42``  u-tangents at those corners
    * ``h33 h34 / h43 h44``  twists (mixed uv second derivatives)
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, as_grid(getattr(self, name)))

    @property
    def grids(self):
        return (self.x, self.y, self.z)


def _check_param(t: float, extrapolate: bool):
    if not extrapolate and not (0.0 <= t <= 1.0):
        raise DomainError(f"parameter {t} outside [0, 1] (pass extrapolate=True to allow)")


def bernstein_weights(t: float) -> np.ndarray:
    """The four cubic Bernstein values B_i(t)."""
    tt = t * t
    return _BB @ np.array([tt * t, tt, t, 1.0])


def bernstein_dweights(t: float) -> np.ndarray:
    """Derivatives B_i'(t)."""
    return _BB @ np.array([3.0 * t * t, 2.0 * t, 1.0, 0.0])


def bernstein_weights_many(ts: np.ndarray) -> np.ndarray:
    """Row k holds the Bernstein values at ts[k]; shape (len(ts), 4)."""
    ts = np.asarray(ts, dtype=float)
    mono = np.stack([ts ** 3, ts ** 2, ts, np.ones_like(ts)], axis=-1)
    return mono @ _BB.T


def eval_curve(p, t: float, extrapolate: bool = False) -> float:
    """Evaluate a cubic Bezier curve with control values ``p`` at ``t``."""
    _check_param(t, extrapolate)
    p = np.asarray(p, dtype=float)
    if p.shape != (4,):
        raise ValueError("curve needs exactly 4 control values")
    return float(p @ bernstein_weights(t))


def eval_grid(g, u: float, v: float, extrapolate: bool = False) -> float:
    _check_param(u, extrapolate)
    _check_param(v, extrapolate)
    return float(bernstein_weights(u) @ np.asarray(g, dtype=float) @ bernstein_weights(v))


def eval_patch(patch: BezierPatch, u: float, v: float, extrapolate: bool = False) -> np.ndarray:
    """Point on the patch at (u, v) as an xyz array."""
    _check_param(u, extrapolate)
    _check_param(v, extrapolate)
    wu = bernstein_weights(u)
    wv = bernstein_weights(v)
    return patch.as_array @ wv @ wu  # (3,4,4)@(4,)->(3,4), then @(4,)->(3,)


def eval_patch_partials(patch: BezierPatch, u: float, v: float, extrapolate: bool = False):
    """Return (point, dP/du, dP/dv) at (u, v)."""
    _check_param(u, extrapolate)
    _check_param(v, extrapolate)
    wu, wv = bernstein_weights(u), bernstein_weights(v)
    du, dv = bernstein_dweights(u), bernstein_dweights(v)
    a = patch.as_array
    return a @ wv @ wu, a @ wv @ du, a @ dv @ wu


def de_casteljau(points, t: float):
    """Reference Bezier evaluator by repeated linear interpolation.

    Kept as an independent cross-check for the matrix-form evaluation;
    works for scalar or vector control points of any count.
    """
    pts = [np.asarray(p, dtype=float) for p in points]
    while len(pts) > 1:
        pts = [(1.0 - t) * a + t * b for a, b in zip(pts[:-1], pts[1:])]
    out = pts[0]
    return float(out) if out.ndim == 0 else out


def hermite_to_bezier(h: HermitePatch) -> BezierPatch:
    """Convert corner/tangent/twist grids to Bezier control grids."""
    c, _ = _conversion_matrices()
    return BezierPatch(*(c.T @ g @ c for g in h.grids))


def bezier_to_hermite(b: BezierPatch) -> HermitePatch:
    """Convert Bezier control grids to corner/tangent/twist grids."""
    _, d = _conversion_matrices()
    return HermitePatch(*(d.T @ g @ d for g in b.grids))
