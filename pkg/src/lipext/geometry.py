"""Distance-geometry primitives.

Bordered squared-distance determinants, simplex tests, barycentric and
convex-hull certificates, sphere-intersection solving in the affine hull of
the centers, and root extraction for the even quartic that the determinant
substitution produces.

All arithmetic is 64-bit floating point; determinants go through LAPACK's
partially pivoted LU factorization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateSimplex, NotInAffineHull

# Relative threshold deciding whether a bordered determinant is "nonzero";
# absolute thresholds fail across coordinate scales.
SIMPLEX_TOL = 1e-12

# Default relative tolerance for hull/affine residual checks.
HULL_TOL = 1e-9


@dataclass(frozen=True)
class SquaredDistanceMatrix:
    """Symmetric matrix of squared pairwise distances with zero diagonal."""

    d2: np.ndarray

    def __post_init__(self):
        d2 = np.asarray(self.d2, dtype=float)
        if d2.ndim != 2 or d2.shape[0] != d2.shape[1] or d2.shape[0] < 1:
            raise ValueError("squared distance matrix must be square, k >= 1")
        if not np.array_equal(d2, d2.T):
            raise ValueError("squared distance matrix must be symmetric")
        if np.any(np.diag(d2) != 0.0):
            raise ValueError("diagonal must be zero")
        if np.any(d2 < 0.0):
            raise ValueError("squared distances must be nonnegative")
        object.__setattr__(self, "d2", d2)

    @property
    def k(self) -> int:
        return self.d2.shape[0]

    @classmethod
    def from_points(cls, points) -> "SquaredDistanceMatrix":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        diff = pts[:, None, :] - pts[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        # exact symmetry and zero diagonal regardless of rounding
        d2 = 0.5 * (d2 + d2.T)
        np.fill_diagonal(d2, 0.0)
        return cls(d2)


class Biquadratic(NamedTuple):
    """Coefficients of a*lam**4 + b*lam**2 + c."""

    a: float
    b: float
    c: float


def _bordered(d2: np.ndarray) -> np.ndarray:
    """Bordered matrix: zero corner, row/column of ones, d2 block."""
    k = d2.shape[0]
    m = np.ones((k + 1, k + 1))
    m[0, 0] = 0.0
    m[1:, 1:] = d2
    return m


def cayley_menger(m: SquaredDistanceMatrix) -> float:
    """Determinant of the bordered squared-distance matrix of k points."""
    return float(np.linalg.det(_bordered(m.d2)))


def cayley_menger_points(points) -> float:
    """cayley_menger of the pairwise squared distances of the given points."""
    return cayley_menger(SquaredDistanceMatrix.from_points(points))


def is_simplex(points, tol: float = SIMPLEX_TOL) -> bool:
    """True iff the k points span a nondegenerate (k-1)-simplex.

    The test is |det| > tol * scale**(k-1) with scale the largest pairwise
    squared distance; the determinant of k points is homogeneous of degree
    k-1 in the squared distances, so this ratio is scale-free.  A single
    point always counts as a 0-simplex.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    k = pts.shape[0]
    if k == 1:
        return True
    sq = SquaredDistanceMatrix.from_points(pts)
    scale = float(sq.d2.max())
    if scale == 0.0:
        return False
    return abs(cayley_menger(sq)) > tol * scale ** (k - 1)


def barycentric_coordinates(vertices, y, tol: float = HULL_TOL,
                            simplex_tol: float = SIMPLEX_TOL) -> np.ndarray:
    """Coefficients t with sum(t) = 1 and t @ vertices = y.

    Raises DegenerateSimplex when the vertices fail the simplex test and
    NotInAffineHull when y cannot be reconstructed within tol (relative to
    the diameter of the configuration).
    """
    verts = np.atleast_2d(np.asarray(vertices, dtype=float))
    y = np.asarray(y, dtype=float)
    if not is_simplex(verts, simplex_tol):
        raise DegenerateSimplex(f"{verts.shape[0]} points do not span a simplex")
    k = verts.shape[0]
    base = verts[-1]
    shifted = verts - base
    yb = y - base
    if k == 1:
        t = np.array([1.0])
    else:
        # eliminate the constraint sum(t) = 1 by solving for t[:-1]
        head, *_ = np.linalg.lstsq(shifted[:-1].T, yb, rcond=None)
        t = np.append(head, 1.0 - head.sum())
    # residual in shifted coordinates: a large common offset of the inputs
    # must not drown the reconstruction error
    resid = float(np.linalg.norm(t @ shifted - yb))
    scale = _config_scale(verts, y)
    if resid > tol * scale:
        raise NotInAffineHull(f"reconstruction residual {resid:.3e} exceeds {tol:.1e} * {scale:.3e}")
    return t


def in_convex_hull(vertices, y, tol: float = HULL_TOL,
                   simplex_tol: float = SIMPLEX_TOL) -> bool:
    """Non-strict hull membership: all barycentric coordinates >= -tol."""
    try:
        t = barycentric_coordinates(vertices, y, tol, simplex_tol)
    except NotInAffineHull:
        return False
    return bool(np.all(t >= -tol))


def solve_sphere_intersection(centers, radii, tol: float = HULL_TOL,
                              simplex_tol: float = SIMPLEX_TOL):
    """Point of the affine hull of the centers at distance radii[l] from each.

    Subtracting the sphere equations pairwise leaves a linear system in
    affine coordinates; one radius residual is checked on the solution.
    Returns None when no such point exists.
    """
    ctr = np.atleast_2d(np.asarray(centers, dtype=float))
    rad = np.atleast_1d(np.asarray(radii, dtype=float))
    if ctr.shape[0] != rad.shape[0]:
        raise ValueError("need one radius per center")
    if not is_simplex(ctr, simplex_tol):
        raise DegenerateSimplex("sphere centers must span a simplex")
    k = ctr.shape[0]
    scale = max(_config_scale(ctr, ctr[0]), float(rad.max(initial=0.0)))
    if k == 1:
        return ctr[0].copy() if rad[0] <= tol * max(scale, 1e-300) else None
    base = ctr[0]
    b = ctr[1:] - base  # (k-1, m)
    gram = 2.0 * (b @ b.T)
    rhs = np.einsum("ij,ij->i", b, b) + rad[0] ** 2 - rad[1:] ** 2
    s = np.linalg.solve(gram, rhs)
    y = base + s @ b
    resid = abs(float(np.linalg.norm(y - base)) - float(rad[0]))
    if resid > tol * max(scale, 1e-300):
        return None
    return y


def biquadratic_coefficients(values, dists) -> Biquadratic:
    """Even-quartic coefficients of the substituted bordered determinant.

    The unknown point's squared distances to the k data values are replaced
    by mu * dists**2 with mu = lam**2; the resulting determinant is an exact
    quadratic in mu, recovered by evaluation at mu = 0, 1, 2.
    """
    vals = np.atleast_2d(np.asarray(values, dtype=float))
    d = np.asarray(dists, dtype=float)
    k = vals.shape[0]
    if k < 2:
        raise ValueError("need at least two values")
    if np.any(d <= 0.0):
        raise ValueError("distances must be positive")
    vsq = SquaredDistanceMatrix.from_points(vals).d2
    m = np.ones((k + 2, k + 2))
    m[0, 0] = 0.0
    m[1, 1] = 0.0
    m[2:, 2:] = vsq

    def det_at(mu: float) -> float:
        m[1, 2:] = mu * d**2
        m[2:, 1] = mu * d**2
        return float(np.linalg.det(m))

    d0, d1, d2 = det_at(0.0), det_at(1.0), det_at(2.0)
    a = 0.5 * (d2 - 2.0 * d1 + d0)
    return Biquadratic(a=a, b=d1 - d0 - a, c=d0)


def solve_biquadratic(bq: Biquadratic) -> list[float]:
    """Nonnegative real roots lam of a*lam**4 + b*lam**2 + c = 0, ascending.

    Handles the linear case a = 0 and double roots; an identically zero
    polynomial yields [0.0]. May be empty.
    """
    a, b, c = bq
    mus: list[float] = []
    if a == 0.0:
        if b == 0.0:
            return [0.0] if c == 0.0 else []
        mus.append(-c / b)
    else:
        disc = b * b - 4.0 * a * c
        # rescue discriminants that are zero up to rounding
        if disc < 0.0 and abs(disc) <= 1e-12 * (b * b + 4.0 * abs(a * c)):
            disc = 0.0
        if disc < 0.0:
            return []
        # stable quadratic roots: avoids the -b + sqrt(disc) cancellation
        # that destroys the small root when |4ac| << b*b
        q = -0.5 * (b + math.copysign(math.sqrt(disc), b if b != 0.0 else 1.0))
        if q == 0.0:
            mus.append(0.0)
        else:
            mus.extend((q / a, c / q))
    mu_scale = max(abs(mu) for mu in mus)
    roots: list[float] = []
    for mu in mus:
        if -1e-10 * mu_scale <= mu < 0.0:
            mu = 0.0
        if mu >= 0.0:
            lam = math.sqrt(mu)
            if not any(abs(lam - r) <= 1e-12 * max(lam, r) for r in roots):
                roots.append(lam)
    return sorted(roots)


def _config_scale(points: np.ndarray, y) -> float:
    """Largest pairwise distance among the points and the query."""
    all_pts = np.vstack([points, np.atleast_2d(y)])
    diff = all_pts[:, None, :] - all_pts[None, :, :]
    return float(np.sqrt(np.einsum("ijk,ijk->ij", diff, diff).max()))
