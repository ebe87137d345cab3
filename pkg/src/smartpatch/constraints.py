"""Cubic-diagonal constraints on bicubic Bezier control grids.

Substituting v=u (or v=1-u) into a bicubic patch collapses it to a
univariate polynomial of degree up to 6.  Requiring both domain diagonals
to stay cubic imposes linear conditions on the 16 control values of each
coordinate grid.  This module derives those conditions symbolically from
the basis matrices, certifies the rank of the resulting 6x16 system
exactly, and builds solving, projection, validation and reporting on top
of it.  A matching set of checks for the Hermite form (corner phi, twist
sums, the tangent condition and the alpha/beta twist parameters) lives
here as well.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from .linalg import RationalMatrix
from .patches import BezierPatch, HermitePatch, as_grid, bezier_basis, reparam_T

__all__ = [
    "DiagonalKind",
    "Poly",
    "ConstraintSystem",
    "ConstraintReport",
    "DiagonalResiduals",
    "HsReport",
    "InnerIdentityResolution",
    "DerivationError",
    "DEFAULT_TOL",
    "LAMBDA_REFERENCE",
    "diagonal_matrix",
    "collapse_diagonal",
    "build_omega",
    "build_lambda",
    "bs_residuals",
    "bs_solve",
    "bs_free_cells",
    "bs_project",
    "bs_inner_identity",
    "resolve_inner_identity",
    "hs_phi",
    "hs_twists",
    "hs_alpha_beta",
    "hs_validate",
    "repair_patches",
    "grid_scale",
]

DEFAULT_TOL = 1e-9
PHI_DEGENERACY_TOL = 1e-12


class DerivationError(RuntimeError):
    """The symbolically derived constraint system failed a structural check."""


class DiagonalKind(Enum):
    MAIN = "main"  # v = u
    ANTI = "anti"  # v = 1 - u


# Corner positions within the row-major 16-vector of a grid, and the
# remaining 12 positions in row-major order (x01, x02, x10, x11, ...).
CORNER_INDICES = (0, 3, 12, 15)
NONCORNER_INDICES = tuple(k for k in range(16) if k not in CORNER_INDICES)

# Independently tabulated copy of the 6x16 constraint matrix.  The build
# derives its own matrix from the basis matrices and must reproduce this
# table entry for entry; a mismatch on either side is a hard error.
LAMBDA_REFERENCE = (
    (1, -3, 3, -1, -3, 9, -9, 3, 3, -9, 9, -3, -1, 3, -3, 1),
    (-6, 15, -12, 3, 15, -36, 27, -6, -12, 27, -18, 3, 3, -6, 3, 0),
    (15, -30, 18, -3, -30, 54, -27, 3, 18, -27, 9, 0, -3, 3, 0, 0),
    (-1, 3, -3, 1, 3, -9, 9, -3, -3, 9, -9, 3, 1, -3, 3, -1),
    (3, -12, 15, -6, -6, 27, -36, 15, 3, -18, 27, -12, 0, 3, -6, 3),
    (-3, 18, -30, 15, 3, -27, 54, -30, 0, 9, -27, 18, 0, 0, 3, -3),
)


@dataclass(frozen=True)
class Poly:
    """Univariate real polynomial, coefficients stored highest degree first."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("polynomial needs at least one coefficient")

    @property
    def nominal_degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t: float) -> float:
        acc = 0.0
        for c in self.coeffs:
            acc = acc * t + c
        return acc

    def effective_degree(self, tol: float = DEFAULT_TOL) -> int:
        """Degree once leading coefficients below tol*scale are dropped."""
        scale = max(1.0, max(abs(c) for c in self.coeffs))
        for k, c in enumerate(self.coeffs):
            if abs(c) > tol * scale:
                return self.nominal_degree - k
        return 0


def grid_scale(g) -> float:
    """Relative-residual scale for a grid: max(1, max |value|)."""
    return max(1.0, float(np.max(np.abs(np.asarray(g, dtype=float)))))


def diagonal_matrix(g, kind: DiagonalKind) -> np.ndarray:
    """Quadratic-form matrix R of the diagonal curve: x(u) = u^T R u.

    R = Mb^T X Mb for the v=u diagonal; the v=1-u diagonal picks up the
    1-u substitution matrix on the right.
    """
    g = np.asarray(g, dtype=float)
    mb = bezier_basis()
    r = mb.T @ g @ mb
    if kind is DiagonalKind.ANTI:
        r = r @ reparam_T()
    return r


def collapse_diagonal(g, kind: DiagonalKind) -> Poly:
    """Degree-6 polynomial of the diagonal curve of one coordinate grid.

    Coefficient of u^d is the sum of R entries with i+j == 6-d (0-based),
    i.e. the anti-diagonals of R from the top-left corner down.
    """
    r = diagonal_matrix(g, kind)
    flipped = np.fliplr(r)
    coeffs = [float(np.trace(flipped, offset=3 - (6 - d))) for d in range(6, -1, -1)]
    return Poly(coeffs)


_MB_Q = RationalMatrix(((-1, 3, -3, 1), (3, -6, 3, 0), (-3, 3, 0, 0), (1, 0, 0, 0)))
_T_Q = RationalMatrix(((-1, 3, -3, 1), (0, 1, -2, 1), (0, 0, -1, 1), (0, 0, 0, 1)))


@functools.lru_cache(maxsize=None)
def _omega_exact(kind: DiagonalKind) -> RationalMatrix:
    """Exact 16x16 map from grid values (row-major) to R entries (row-major).

    Derived by pushing each basis grid E_ij through the R construction,
    never hand-typed: column 4i+j of the result is vec(R(E_ij)).
    """
    cols = []
    for i in range(4):
        for j in range(4):
            e = [[0] * 4 for _ in range(4)]
            e[i][j] = 1
            r = _MB_Q.transpose() @ RationalMatrix(e) @ _MB_Q
            if kind is DiagonalKind.ANTI:
                r = r @ _T_Q
            cols.append([r[a, b] for a in range(4) for b in range(4)])
    return RationalMatrix(list(zip(*cols)))


def build_omega(kind: DiagonalKind) -> np.ndarray:
    """Float view of the exact grid-to-R coefficient map (integer entries)."""
    return _omega_exact(kind).to_float()


# R-entry groups (0-based flat indices into vec(R)) whose sums form the
# u^6, u^5 and u^4 coefficients of the collapsed diagonal.
_LEADING_GROUPS = (
    ((0, 0),),
    ((0, 1), (1, 0)),
    ((0, 2), (1, 1), (2, 0)),
)


@functools.lru_cache(maxsize=1)
def _lambda_exact() -> RationalMatrix:
    rows = []
    for kind in (DiagonalKind.MAIN, DiagonalKind.ANTI):
        omega = _omega_exact(kind)
        for group in _LEADING_GROUPS:
            acc = [Fraction(0)] * 16
            for (a, b) in group:
                row = omega.row(4 * a + b)
                acc = [s + v for s, v in zip(acc, row)]
            rows.append(acc)
    return RationalMatrix(rows)


@dataclass(frozen=True)
class ConstraintSystem:
    """The 6x16 cubic-diagonal condition matrix with certified structure.

    ``lam1`` holds the four corner columns, ``lam2`` the remaining twelve
    (row-major grid order); ``rref``/``pivot_cols``/``free_cols`` describe
    the exact reduced form of the full matrix.
    """

    lam: np.ndarray
    lam1: np.ndarray
    lam2: np.ndarray
    rank: int
    rref: RationalMatrix
    pivot_cols: tuple
    free_cols: tuple


@dataclass(frozen=True)
class _Solver:
    """Exact reduced machinery shared by bs_solve and bs_project.

    ``reduced @ xi2 == rhs @ xi1`` is the full-rank (5-row) form of the
    constraint system with corners moved to the right-hand side.
    ``particular``/``homogeneous`` give the affine solution map used by
    bs_solve; ``gain`` is the least-squares correction map used by
    bs_project (gain = reduced^T (reduced reduced^T)^-1).
    """

    reduced: RationalMatrix     # 5 x 12
    rhs: RationalMatrix         # 5 x 4
    pivot_cols: tuple           # pivots of lam2, indices into the 12-vector
    free_cols: tuple            # the 7 free indices into the 12-vector
    particular: RationalMatrix  # 12 x 4: xi2 from corners with free values 0
    homogeneous: RationalMatrix # 12 x 7: contribution of the free values
    gain: RationalMatrix        # 12 x 5


@functools.lru_cache(maxsize=1)
def build_lambda() -> ConstraintSystem:
    """Derive the constraint system and certify its structure exactly."""
    lam_q = _lambda_exact()
    reference = RationalMatrix(LAMBDA_REFERENCE)
    if lam_q != reference:
        raise DerivationError("derived constraint matrix does not match the reference table")
    red, rank, pivots = lam_q.rref()
    if rank != 5:
        raise DerivationError(f"constraint matrix rank is {rank}, expected 5")
    lam = lam_q.to_float()
    return ConstraintSystem(
        lam=lam,
        lam1=lam_q.take_cols(CORNER_INDICES).to_float(),
        lam2=lam_q.take_cols(NONCORNER_INDICES).to_float(),
        rank=rank,
        rref=red,
        pivot_cols=pivots,
        free_cols=tuple(c for c in range(16) if c not in pivots),
    )


@functools.lru_cache(maxsize=1)
def _solver() -> _Solver:
    build_lambda()  # certify first
    lam_q = _lambda_exact()
    lam2 = lam_q.take_cols(NONCORNER_INDICES)
    lam1_neg = -lam_q.take_cols(CORNER_INDICES)
    aug, rank, pivots = lam2.hstack(lam1_neg).rref()
    # Pivots of the augmented reduction must live in the lam2 block: the
    # system lam2 xi2 = -lam1 xi1 is solvable for every corner choice.
    if rank != 5 or any(p >= 12 for p in pivots):
        raise DerivationError("reduced corner system is not solvable for all corners")
    reduced = aug.take_rows(range(rank)).take_cols(range(12))
    rhs = aug.take_rows(range(rank)).take_cols(range(12, 16))
    free = tuple(c for c in range(12) if c not in pivots)

    zero = Fraction(0)
    part = [[zero] * 4 for _ in range(12)]
    homo = [[zero] * 7 for _ in range(12)]
    for r, p in enumerate(pivots):
        part[p] = list(rhs.row(r))
        homo[p] = [-reduced[r, f] for f in free]
    for k, f in enumerate(free):
        homo[f][k] = Fraction(1)

    gram_inv = (reduced @ reduced.transpose()).inverse()
    gain = reduced.transpose() @ gram_inv
    return _Solver(
        reduced=reduced,
        rhs=rhs,
        pivot_cols=pivots,
        free_cols=free,
        particular=RationalMatrix(part),
        homogeneous=RationalMatrix(homo),
        gain=gain,
    )


def bs_free_cells() -> tuple:
    """Grid cells (i, j) owned by the 7 free parameters of bs_solve, in order."""
    s = _solver()
    return tuple(divmod(NONCORNER_INDICES[f], 4) for f in s.free_cols)


@dataclass(frozen=True)
class DiagonalResiduals:
    """Leading collapsed-diagonal coefficients that must vanish."""

    a6: float
    a5: float
    a4: float
    rel: tuple  # the same three magnitudes divided by the grid scale

    @property
    def max_rel(self) -> float:
        return max(self.rel)


@dataclass(frozen=True)
class ConstraintReport:
    per_diagonal: Mapping[DiagonalKind, DiagonalResiduals]
    max_residual: float
    compliant: bool
    tolerance_used: float


def bs_residuals(g, tol: float = DEFAULT_TOL) -> ConstraintReport:
    """Compliance report for one coordinate grid.

    The six leading diagonal coefficients are reported relative to
    max(1, max |grid value|); the grid complies when the largest relative
    magnitude stays within ``tol``.
    """
    g = np.asarray(g, dtype=float)
    scale = grid_scale(g)
    per = {}
    worst = 0.0
    for kind in DiagonalKind:
        poly = collapse_diagonal(g, kind)
        a6, a5, a4 = poly.coeffs[0], poly.coeffs[1], poly.coeffs[2]
        rel = tuple(abs(c) / scale for c in (a6, a5, a4))
        per[kind] = DiagonalResiduals(a6=a6, a5=a5, a4=a4, rel=rel)
        worst = max(worst, *rel)
    return ConstraintReport(
        per_diagonal=per, max_residual=worst, compliant=worst <= tol, tolerance_used=tol
    )


def _assemble(xi1, xi2) -> np.ndarray:
    flat = [0.0] * 16
    for k, c in zip(CORNER_INDICES, xi1):
        flat[k] = float(c)
    for k, v in zip(NONCORNER_INDICES, xi2):
        flat[k] = float(v)
    return as_grid(np.array(flat).reshape(4, 4))


def bs_solve(corners: Sequence[float], free: Sequence[float]) -> np.ndarray:
    """Construct a compliant grid from 4 corners and 7 free values.

    ``corners`` is (x00, x03, x30, x33); ``free`` feeds the non-pivot
    columns of the reduced system (grid cells given by bs_free_cells()).
    The solve runs in exact rational arithmetic and is rounded to float
    only on output.
    """
    if len(corners) != 4:
        raise ValueError("need exactly 4 corner values")
    if len(free) != 7:
        raise ValueError("need exactly 7 free values")
    s = _solver()
    xi1 = RationalMatrix.column(corners)
    f = RationalMatrix.column(free)
    xi2 = s.particular @ xi1 + s.homogeneous @ f
    residual = s.reduced @ xi2 + (-s.rhs @ xi1)
    if not residual.is_zero():
        raise DerivationError("exact solve left a nonzero residual")
    return _assemble(corners, [xi2[k, 0] for k in range(12)])


def bs_project(g) -> np.ndarray:
    """Closest compliant grid with the same corners (least squares).

    Minimizes the summed squared change of the 12 non-corner values
    subject to the reduced constraint system; corners pass through
    bit-exact.  Computed in exact rational arithmetic, so projecting an
    already-compliant grid returns it unchanged and projecting twice is
    the identity up to the final float rounding.
    """
    g = np.asarray(g, dtype=float)
    if g.shape != (4, 4):
        raise ValueError(f"grid must be 4x4, got {g.shape}")
    s = _solver()
    flat = g.reshape(-1)
    xi1 = RationalMatrix.column([flat[k] for k in CORNER_INDICES])
    xi2 = RationalMatrix.column([flat[k] for k in NONCORNER_INDICES])
    residual = s.reduced @ xi2 + (-s.rhs @ xi1)
    correction = s.gain @ residual
    projected = xi2 + (-correction)
    return _assemble(
        [xi1[k, 0] for k in range(4)], [projected[k, 0] for k in range(12)]
    )


def bs_inner_identity(g) -> float:
    """Residual of the certified inner-point identity.

    For every compliant grid, (x11 - x12 - x21 + x22) equals one ninth of
    (x00 - x03 - x30 + x33); see resolve_inner_identity() for the exact
    certification, including the rejected sign variant.
    """
    g = np.asarray(g, dtype=float)
    inner = g[1, 1] - g[1, 2] - g[2, 1] + g[2, 2]
    corner = g[0, 0] - g[0, 3] - g[3, 0] + g[3, 3]
    return float(inner - corner / 9.0)


@dataclass(frozen=True)
class InnerIdentityResolution:
    """Row-space membership of the two sign variants of the inner identity."""

    plus_variant_holds: bool   # x11 - x12 - x21 + x22 == (corner combo)/9
    minus_variant_holds: bool  # x11 - x12 - x21 - x22 == (corner combo)/9
    corner_coefficient: Fraction


def _in_row_space(lam_q: RationalMatrix, vec) -> bool:
    base = lam_q.transpose()
    augmented = base.hstack(RationalMatrix.column(vec))
    return augmented.rref()[1] == base.rref()[1]


@functools.lru_cache(maxsize=1)
def resolve_inner_identity() -> InnerIdentityResolution:
    """Certify which sign of the inner-point identity the system implies.

    A candidate identity holds for every compliant grid exactly when its
    coefficient vector lies in the row space of the constraint matrix;
    both membership tests run in exact rational arithmetic.
    """
    lam_q = _lambda_exact()
    ninth = Fraction(1, 9)

    def candidate(x22_sign: int):
        w = [Fraction(0)] * 16
        w[5], w[6], w[9], w[10] = Fraction(1), Fraction(-1), Fraction(-1), Fraction(x22_sign)
        w[0], w[3], w[12], w[15] = -ninth, ninth, ninth, -ninth
        return w

    return InnerIdentityResolution(
        plus_variant_holds=_in_row_space(lam_q, candidate(+1)),
        minus_variant_holds=_in_row_space(lam_q, candidate(-1)),
        corner_coefficient=ninth,
    )


# ---------------------------------------------------------------------------
# Hermite-form conditions


def hs_phi(h_grid) -> float:
    """Corner combination h11 - h12 - h21 + h22 of a Hermite-layout grid."""
    h = np.asarray(h_grid, dtype=float)
    return float(h[0, 0] - h[0, 1] - h[1, 0] + h[1, 1])


def hs_twists(phi: float, alpha: float, beta: float):
    """Twist block (h33, h34, h43, h44) from phi and the two twist weights."""
    return (
        2.0 * phi * (1.0 - alpha),
        2.0 * phi * (1.0 - beta),
        2.0 * phi * beta,
        2.0 * phi * alpha,
    )


def _hs_tangent_sums(h: np.ndarray):
    # a couples the v-tangents at (0,1)/(1,1) with the u-tangents at u=1;
    # b does the same for the v-tangents at (0,0)/(1,0); c is the pure
    # u-tangent combination entering the third twist equation.
    a = h[0, 3] - h[1, 3] + h[3, 0] - h[3, 1]
    b = h[0, 2] - h[1, 2] + h[3, 0] - h[3, 1]
    c = h[2, 0] - h[2, 1] - h[3, 0] + h[3, 1]
    return float(a), float(b), float(c)


def hs_alpha_beta(h_grid, degeneracy_tol: float = PHI_DEGENERACY_TOL) -> Optional[tuple]:
    """Twist weights (alpha, beta) implied by the boundary data.

    Returns None when phi is degenerate (|phi| <= tol * scale): the twist
    equations divide by 2*phi, so the weights are undetermined there.
    """
    h = np.asarray(h_grid, dtype=float)
    phi = hs_phi(h)
    if abs(phi) <= degeneracy_tol * grid_scale(h):
        return None
    a, b, _ = _hs_tangent_sums(h)
    return (-(a + phi) / (2.0 * phi), -(b + phi) / (2.0 * phi))


@dataclass(frozen=True)
class HsReport:
    """Residuals of the Hermite-form smoothness conditions for one grid."""

    phi: float
    twist_sum_residuals: tuple  # (h33 + h44 - 2 phi, h34 + h43 - 2 phi)
    tangent_residual: float     # tangent combination + 4 phi
    alpha: Optional[float]
    beta: Optional[float]
    degenerate_phi: bool
    compliant: bool


def _hs_report(h: np.ndarray, tol: float) -> HsReport:
    scale = grid_scale(h)
    phi = hs_phi(h)
    twist1 = float(h[2, 2] + h[3, 3] - 2.0 * phi)
    twist2 = float(h[2, 3] + h[3, 2] - 2.0 * phi)
    a, b, c = _hs_tangent_sums(h)
    tangent = a + b + c + 4.0 * phi
    ab = hs_alpha_beta(h)
    degenerate = ab is None
    compliant = max(abs(twist1), abs(twist2), abs(tangent)) <= tol * scale
    return HsReport(
        phi=phi,
        twist_sum_residuals=(twist1, twist2),
        tangent_residual=tangent,
        alpha=None if degenerate else ab[0],
        beta=None if degenerate else ab[1],
        degenerate_phi=degenerate,
        compliant=compliant,
    )


def hs_validate(h: HermitePatch, tol: float = DEFAULT_TOL) -> dict:
    """Per-coordinate Hermite-form reports, keyed 'x', 'y', 'z'."""
    return {name: _hs_report(g, tol) for name, g in zip("xyz", h.grids)}


# ---------------------------------------------------------------------------
# Joint repair of patch sets


@dataclass(frozen=True)
class PatchRepairStats:
    max_displacement: float
    corner_displacement: float


@dataclass(frozen=True)
class RepairResult:
    patches: list
    per_patch: list
    max_displacement: float
    residual: float  # worst post-repair constraint residual, relative


def _boundary_slots():
    return [(i, j) for i in range(4) for j in range(4) if i in (0, 3) or j in (0, 3)]


_BOUNDARY = _boundary_slots()
_INNER = [(i, j) for i in range(4) for j in range(4) if (i, j) not in _BOUNDARY]
_CORNER_SLOTS = {(0, 0), (0, 3), (3, 0), (3, 3)}


def repair_patches(patches: Sequence[BezierPatch]) -> RepairResult:
    """Minimally move control points so every patch becomes compliant.

    Works on the whole set at once: boundary control points that carry
    identical coordinates in several patches are treated as one shared
    variable, so exactly-shared edges stay exactly shared and the repair
    never opens a gap between adjacent patches.  Corner points are held
    fixed bit-exact.  Inner control points stay private to their patch.

    The per-patch projection bs_project() is the single-grid counterpart;
    it cannot preserve shared edges because each patch would pull the
    common boundary its own way.
    """
    if not patches:
        return RepairResult(patches=[], per_patch=[], max_displacement=0.0, residual=0.0)

    key_to_var: dict = {}
    slot_var = []  # per patch: dict slot -> var id
    coords = []    # per var id: (x, y, z)
    fixed = set()

    def var_for(key):
        if key not in key_to_var:
            key_to_var[key] = len(coords)
            coords.append(key)
        return key_to_var[key]

    for p in patches:
        mapping = {}
        for (i, j) in _BOUNDARY:
            key = (float(p.x[i, j]), float(p.y[i, j]), float(p.z[i, j]))
            v = var_for(key)
            mapping[(i, j)] = v
            if (i, j) in _CORNER_SLOTS:
                fixed.add(v)
        for (i, j) in _INNER:
            v = len(coords)
            coords.append((float(p.x[i, j]), float(p.y[i, j]), float(p.z[i, j])))
            mapping[(i, j)] = v
        slot_var.append(mapping)

    nvars = len(coords)
    free_ids = [v for v in range(nvars) if v not in fixed]
    free_pos = {v: k for k, v in enumerate(free_ids)}
    lam = build_lambda().lam

    rows = []
    fixed_part = []  # per row: list of (var, coeff) on fixed variables
    for mapping in slot_var:
        for lam_row in lam:
            entries_free = {}
            entries_fixed = []
            for k in range(16):
                c = lam_row[k]
                if c == 0.0:
                    continue
                v = mapping[divmod(k, 4)]
                if v in fixed:
                    entries_fixed.append((v, c))
                else:
                    pos = free_pos[v]
                    entries_free[pos] = entries_free.get(pos, 0.0) + c
            rows.append(entries_free)
            fixed_part.append(entries_fixed)

    nrows = len(rows)
    a = np.zeros((nrows, len(free_ids)))
    for r, entries in enumerate(rows):
        for pos, c in entries.items():
            a[r, pos] = c

    values = np.array(coords, dtype=float)  # (nvars, 3)
    scale = max(1.0, float(np.max(np.abs(values)))) if nvars else 1.0
    new_values = values.copy()
    worst_residual = 0.0
    for axis in range(3):
        v_free = values[free_ids, axis] if free_ids else np.zeros(0)
        b = np.zeros(nrows)
        for r, entries in enumerate(fixed_part):
            for v, c in entries:
                b[r] -= c * values[v, axis]
        current = v_free
        for _ in range(3):
            r = b - a @ current
            if np.max(np.abs(r), initial=0.0) <= 1e-13 * scale:
                break
            step, *_ = np.linalg.lstsq(a, r, rcond=None)
            current = current + step
        worst_residual = max(
            worst_residual, float(np.max(np.abs(b - a @ current), initial=0.0)) / scale
        )
        for v, val in zip(free_ids, current):
            new_values[v, axis] = val

    repaired = []
    per_patch = []
    overall = 0.0
    for p, mapping in zip(patches, slot_var):
        grids = [np.array(g) for g in p.grids]
        disp = 0.0
        corner_disp = 0.0
        for (i, j), v in mapping.items():
            old = np.array([g[i, j] for g in grids])
            new = new_values[v]
            d = float(np.max(np.abs(new - old)))
            if (i, j) in _CORNER_SLOTS:
                corner_disp = max(corner_disp, d)
            else:
                disp = max(disp, d)
            for axis in range(3):
                grids[axis][i, j] = new[axis]
        repaired.append(BezierPatch(*grids))
        per_patch.append(PatchRepairStats(max_displacement=disp, corner_displacement=corner_disp))
        overall = max(overall, disp)

    return RepairResult(
        patches=repaired,
        per_patch=per_patch,
        max_displacement=overall,
        residual=worst_residual,
    )
