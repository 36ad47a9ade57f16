"""Pointwise minimax extension values for labeled samples.

Given samples p_i with values f_i and a query x, the kernel computes the
smallest ratio lam such that some point y satisfies ||y - f_i|| <= lam *
||x - p_i|| for every i, together with that optimal point.  The scalar case
has a closed form over pairs; the vector case enumerates candidate active
subsets, solving the substituted bordered determinant for lam and a sphere
system for the point, and certifies the first subset whose candidate
dominates every sample.  An independent convex-feasibility oracle is
provided for validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import minimize, nnls

from .errors import NoCertifiedSubset, QueryCoincidesWithSample
from .geometry import (
    HULL_TOL,
    SIMPLEX_TOL,
    Biquadratic,
    in_convex_hull,
    is_simplex,
    solve_biquadratic,
)

# Certificate tolerances, stated once: equality and domination are checked
# to CERT_TOL relative to lam * max distance, with an absolute floor of
# NOISE_TOL times the value magnitude (distances computed in floating point
# carry rounding error on that scale even when lam is tiny).
CERT_TOL = 1e-9
NOISE_TOL = 1e-13
# Value spread below this fraction of the value magnitude counts as constant.
CONSTANT_TOL = 1e-14


@dataclass(frozen=True)
class LabeledPointSet:
    """Finite sample set: positions p_i in R^n with values f_i in R^m."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        if pts.shape[0] != vals.shape[0] or pts.shape[0] < 1:
            raise ValueError("need one value per point, at least one point")
        for i in range(pts.shape[0]):
            for j in range(i + 1, pts.shape[0]):
                if np.array_equal(pts[i], pts[j]):
                    raise ValueError(f"points {i} and {j} coincide")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def value_dim(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class KPointResult:
    """Minimax value at a query point with its certificate data."""

    lam: float
    point: np.ndarray
    active: tuple[int, ...]
    max_violation: float
    hull_coords: np.ndarray | None


def lip_constant(s: LabeledPointSet) -> float:
    """Largest value-to-position distance ratio over sample pairs."""
    best = 0.0
    for i in range(s.size):
        for j in range(i + 1, s.size):
            num = float(np.linalg.norm(s.values[i] - s.values[j]))
            den = float(np.linalg.norm(s.points[i] - s.points[j]))
            best = max(best, num / den)
    return best


def pair_candidate(s: LabeledPointSet, i: int, j: int, x) -> tuple[np.ndarray, float]:
    """Distance-weighted average of f_i, f_j and its ratio at the query."""
    if i == j:
        raise ValueError("pair indices must differ")
    x = np.asarray(x, dtype=float)
    di = float(np.linalg.norm(x - s.points[i]))
    dj = float(np.linalg.norm(x - s.points[j]))
    if di == 0.0 or dj == 0.0:
        raise QueryCoincidesWithSample("query equals a sample position")
    point = (dj * s.values[i] + di * s.values[j]) / (di + dj)
    lam = float(np.linalg.norm(s.values[i] - s.values[j])) / (di + dj)
    return point, lam


def _distances(s: LabeledPointSet, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (s.points.shape[1],):
        raise ValueError(f"query dimension {x.shape} does not match positions")
    d = np.linalg.norm(s.points - x, axis=1)
    if np.any(d == 0.0):
        raise QueryCoincidesWithSample("query equals a sample position")
    return d


def _canonical_order(s: LabeledPointSet) -> list[int]:
    """Sample order that is stable under permutation of the input."""
    return sorted(range(s.size), key=lambda i: (tuple(s.points[i]), tuple(s.values[i])))


def _value_spread(values: np.ndarray) -> float:
    diff = values[:, None, :] - values[None, :, :]
    return float(np.sqrt(np.einsum("ijk,ijk->ij", diff, diff).max()))


def pairwise_optimum(values, dists) -> tuple[float, float, tuple[int, int]]:
    """Scalar closed form: the pair maximizing |u_i - u_j| / (d_i + d_j).

    Returns (value, ratio, (i, j)).  Plain-float loops: this sits in the
    inner loop of the graph solvers.
    """
    u = [float(v) for v in np.asarray(values, dtype=float).reshape(-1)]
    d = [float(v) for v in np.asarray(dists, dtype=float).reshape(-1)]
    n = len(u)
    if n == 1:
        return u[0], 0.0, (0, 0)
    best = -1.0
    bi, bj = 0, 0
    for i in range(n):
        ui, di = u[i], d[i]
        for j in range(i + 1, n):
            r = abs(ui - u[j]) / (di + d[j])
            if r > best:
                best, bi, bj = r, i, j
    point = (d[bj] * u[bi] + d[bi] * u[bj]) / (d[bi] + d[bj])
    return point, best, (bi, bj)


def kpoint_scalar(s: LabeledPointSet, x) -> KPointResult:
    """Minimax value for real-valued samples via the pair formula."""
    if s.value_dim != 1:
        raise ValueError("kpoint_scalar requires one-dimensional values")
    d = _distances(s, x)
    order = _canonical_order(s)
    u = s.values[order, 0]
    dd = d[order]
    point, lam, (bi, bj) = pairwise_optimum(u, dd)
    pt = np.array([point])
    if s.size == 1:
        return KPointResult(0.0, pt, (0,), 0.0, np.array([1.0]))
    viol = float(np.max(np.abs(pt[0] - s.values[:, 0]) - lam * d))
    i, j = order[bi], order[bj]
    active = tuple(sorted((i, j)))
    da, db = d[active[0]], d[active[1]]
    coords = np.array([db, da]) / (da + db)
    return KPointResult(lam, pt, active, viol, coords)


def minimax_kernel(values, dists, tol: float = CERT_TOL):
    """Subset enumeration on raw arrays, in the given sample order.

    Returns (lam, point, active_index_tuple, hull_coords, max_violation).
    Sizes ascend from 2 to min(m + 1, N); within a size subsets are tested
    lexicographically and the first certified candidate wins.  Raises
    NoCertifiedSubset if nothing certifies (numerical failure).
    """
    raw_values = np.atleast_2d(np.asarray(values, dtype=float))
    raw_dists = np.asarray(dists, dtype=float)
    vmag = float(np.abs(raw_values).max())
    spread = _value_spread(raw_values)
    if spread <= CONSTANT_TOL * max(vmag, spread):
        return 0.0, raw_values[0].copy(), (0,), np.array([1.0]), 0.0
    # center and rescale: the bordered determinants mix squared value
    # distances with squared sample distances, and mismatched scales drown
    # the small coefficients in cancellation noise
    center = raw_values.mean(axis=0)
    dscale = float(raw_dists.max())
    values = (raw_values - center) / spread
    dists = raw_dists / dscale
    n, m = values.shape
    dmax = float(dists.max())
    noise = NOISE_TOL  # rounding-noise floor on the unit value scale

    def denorm(lam, point, active, coords, viol):
        return (
            lam * spread / dscale,
            center + point * spread,
            active,
            coords,
            viol * spread,
        )

    # pair phase, vectorized: lam_ij, candidate points, worst violation
    diff = values[:, None, :] - values[None, :, :]
    vdist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    dsum = dists[:, None] + dists[None, :]
    lam_ij = vdist / dsum
    cand = (dists[None, :, None] * values[:, None, :] + dists[:, None, None] * values[None, :, :]) / dsum[:, :, None]
    gap = cand[:, :, None, :] - values[None, None, :, :]
    viol_ij = np.max(
        np.sqrt(np.einsum("ijkl,ijkl->ijk", gap, gap)) - lam_ij[:, :, None] * dists[None, None, :],
        axis=2,
    )
    ok = viol_ij <= tol * lam_ij * dmax + noise
    ok[np.tril_indices(n)] = False
    if ok.any():
        flat = int(np.flatnonzero(ok.ravel())[0])
        i, j = divmod(flat, n)
        lam = float(lam_ij[i, j])
        point = cand[i, j].copy()
        coords = np.array([dists[j], dists[i]]) / (dists[i] + dists[j])
        return denorm(lam, point, (i, j), coords, float(viol_ij[i, j]))

    # strict pass with the relative simplex threshold, then one relaxed pass
    # accepting any subset with exactly nonzero bordered determinant (near-
    # threshold simplices can carry the only certificate).  Determinants for
    # a whole size class go through one batched det call; the sphere system
    # is solved in affine coordinates whose coefficients are exactly the
    # hull coordinates of the candidate, so no separate hull solve is needed.
    vsq = vdist * vdist
    by_size: dict[int, tuple[list[tuple[int, ...]], np.ndarray]] = {}
    for size in range(3, min(m + 1, n) + 1):
        subsets = list(combinations(range(n), size))
        stack = np.zeros((len(subsets), 4, size + 2, size + 2))
        for si, subset in enumerate(subsets):
            js = list(subset)
            block = vsq[np.ix_(js, js)]
            dj2 = dists[js] ** 2
            # slot 0: bordered distance matrix of the values, padded with a
            # unit diagonal entry so all four determinants share one shape
            mm = stack[si, 0]
            mm[0, 1:-1] = 1.0
            mm[1:-1, 0] = 1.0
            mm[1:-1, 1:-1] = block
            mm[-1, -1] = 1.0
            # slots 1..3: the substituted matrix at mu = 0, 1, 2
            for slot, mu in ((1, 0.0), (2, 1.0), (3, 2.0)):
                mm = stack[si, slot]
                mm[0, 1:] = 1.0
                mm[1:, 0] = 1.0
                mm[1, 2:] = mu * dj2
                mm[2:, 1] = mu * dj2
                mm[2:, 2:] = block
        by_size[size] = (subsets, np.linalg.det(stack))

    for simplex_tol in (SIMPLEX_TOL, 0.0):
        for size in range(3, min(m + 1, n) + 1):
            subsets, dets = by_size[size]
            for si, subset in enumerate(subsets):
                js = list(subset)
                gamma, d0, d1, d2 = dets[si]
                scale = float(vsq[np.ix_(js, js)].max())
                if scale == 0.0 or not abs(gamma) > simplex_tol * scale ** (size - 1):
                    continue
                a = 0.5 * (d2 - 2.0 * d1 + d0)
                bq = Biquadratic(a=a, b=d1 - d0 - a, c=d0)
                vals_j = values[js]
                base = vals_j[0]
                bmat = vals_j[1:] - base
                gram = 2.0 * (bmat @ bmat.T)
                bnorm2 = np.einsum("ij,ij->i", bmat, bmat)
                dj = dists[js]
                for lam in solve_biquadratic(bq):
                    if lam <= 0.0:
                        continue
                    rad = lam * dj
                    rhs = bnorm2 + rad[0] ** 2 - rad[1:] ** 2
                    try:
                        coef = np.linalg.solve(gram, rhs)
                    except np.linalg.LinAlgError:
                        continue
                    y = base + coef @ bmat
                    lscale = max(float(rad.max()), math.sqrt(scale))
                    if abs(float(np.linalg.norm(y - base)) - rad[0]) > CERT_TOL * lscale:
                        continue
                    coords = np.concatenate([[1.0 - coef.sum()], coef])
                    if coords.min() < -HULL_TOL:
                        continue
                    viol = float(np.max(np.linalg.norm(y - values, axis=1) - lam * dists))
                    if viol <= tol * lam * dmax + noise:
                        return denorm(lam, y, subset, coords, viol)
    raise NoCertifiedSubset(f"no certified subset among {n} samples (m = {m})")


def kpoint_vector(s: LabeledPointSet, x, tol: float = CERT_TOL) -> KPointResult:
    """Minimax value for vector samples via certified subset enumeration."""
    d = _distances(s, x)
    order = _canonical_order(s)
    lam, point, active_local, coords, viol = minimax_kernel(
        s.values[order], d[order], tol
    )
    pairs = sorted(zip((order[a] for a in active_local), coords))
    active = tuple(p[0] for p in pairs)
    hull = np.array([p[1] for p in pairs])
    return KPointResult(lam, point, active, viol, hull)


def certificate_check(s: LabeledPointSet, x, lambda0: float, point0, subset, tol: float = CERT_TOL) -> bool:
    """Equality on the subset, domination everywhere, point in the hull."""
    subset = tuple(subset)
    if not subset:
        raise ValueError("subset must be nonempty")
    d = _distances(s, x)
    point0 = np.asarray(point0, dtype=float)
    thr = tol * lambda0 * float(d.max()) + NOISE_TOL * float(np.abs(s.values).max())
    vals = s.values[list(subset)]
    for j in subset:
        if abs(float(np.linalg.norm(point0 - s.values[j])) - lambda0 * d[j]) > thr:
            return False
    if float(np.max(np.linalg.norm(point0 - s.values, axis=1) - lambda0 * d)) > thr:
        return False
    if not is_simplex(vals):
        return False
    return in_convex_hull(vals, point0)


# ---------------------------------------------------------------------------
# independent oracle: bisection over lam with ball-intersection feasibility
# ---------------------------------------------------------------------------

# Knobs from the design notes: 80 bisection iterations, 10k projection
# cycles, convergence threshold tol/10.  The decay estimator abandons a
# feasibility test once the projected cycles to reach the threshold exceed
# the budget (cyclic projections converge sublinearly when active balls
# touch tangentially), a global cycle budget bounds the whole bisection,
# and bisection stops once the interval is below 1e-9 relative; the
# epigraph polish supplies the remaining accuracy.
BISECT_ITERS = 80
CYCLE_CAP = 10_000
CYCLE_BUDGET = 2_500
STALL_WINDOW = 20
STALL_PATIENCE = 500
INTERVAL_REL = 1e-9


def _project_cycles(lam, y, fvals, d, tol_lam, cap=CYCLE_CAP):
    """Cyclic projection of y onto the balls B(f_i, lam * d_i).

    Returns (feasible, point, cycles).  Pure floats in the inner loop, with
    squared-distance comparisons so square roots happen only on an actual
    projection (rare near convergence) and once per cycle for the residual.
    """
    y = list(y)
    m = len(y)
    n = len(fvals)
    r = [lam * di for di in d]
    r2 = [ri * ri for ri in r]
    d2 = [di * di for di in d]
    hist: list[float] = []
    for t in range(cap):
        for i in range(n):
            fi = fvals[i]
            sq = 0.0
            for k in range(m):
                dk = y[k] - fi[k]
                sq += dk * dk
            if sq > r2[i]:
                sc = r[i] / math.sqrt(sq)
                for k in range(m):
                    y[k] = fi[k] + (y[k] - fi[k]) * sc
        worst_ratio2 = 0.0
        for i in range(n):
            fi = fvals[i]
            sq = 0.0
            for k in range(m):
                dk = y[k] - fi[k]
                sq += dk * dk
            ratio2 = sq / d2[i]
            if ratio2 > worst_ratio2:
                worst_ratio2 = ratio2
        viol = math.sqrt(worst_ratio2) - lam
        if viol <= tol_lam:
            return True, y, t + 1
        hist.append(viol)
        if len(hist) > STALL_WINDOW:
            prev = hist[-STALL_WINDOW - 1]
            if prev <= viol:
                return False, y, t + 1
            rate = viol / prev
            need = STALL_WINDOW * math.log(max(viol / max(tol_lam, 1e-300), 1.0)) / max(-math.log(rate), 1e-12)
            if need > min(cap - t, STALL_PATIENCE):
                return False, y, t + 1
    return False, y, cap


def _max_ratio(y: np.ndarray, values: np.ndarray, d: np.ndarray) -> float:
    return float(np.max(np.linalg.norm(y - values, axis=1) / d))


def kpoint_oracle(s: LabeledPointSet, x, tol: float = 1e-7) -> KPointResult:
    """Minimax value by bisection on lam with ball-feasibility tests.

    The returned pair is polished by solving min t s.t. ||y - f_i|| <=
    t * d_i from the bisection point; the polish is kept only when it does
    not worsen the minimax ratio.
    """
    d = _distances(s, x)
    values = s.values
    n, m = values.shape
    spread = _value_spread(values)
    if n == 1 or spread <= CONSTANT_TOL * max(float(np.abs(values).max()), spread):
        point = values[0].copy()
        return KPointResult(0.0, point, (0,), 0.0, np.array([1.0]))
    lip = lip_constant(s)
    fvals = [tuple(row) for row in values]
    dl = [float(v) for v in d]
    lo, hi = 0.0, lip
    y = list(values.mean(axis=0))
    ybest = list(y)
    budget = CYCLE_BUDGET
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if budget <= 0 or mid <= lo or mid >= hi or (hi - lo) <= INTERVAL_REL * hi:
            break
        feas, ynew, used = _project_cycles(
            mid, y, fvals, dl, tol / 10.0 * mid, cap=min(CYCLE_CAP, budget)
        )
        budget -= used
        y = ynew
        if feas:
            hi = mid
            ybest = list(ynew)
        else:
            lo = mid
    yb = np.asarray(ybest)
    ratio_b = _max_ratio(yb, values, d)

    def con(z, i):
        return z[m] * d[i] - np.linalg.norm(z[:m] - values[i])

    def con_jac(z, i):
        diff = z[:m] - values[i]
        dist = np.linalg.norm(diff)
        g = np.zeros(m + 1)
        if dist > 0.0:
            g[:m] = -diff / dist
        g[m] = d[i]
        return g

    cons = [
        {"type": "ineq", "fun": (lambda z, i=i: con(z, i)), "jac": (lambda z, i=i: con_jac(z, i))}
        for i in range(n)
    ]
    obj_jac = np.zeros(m + 1)
    obj_jac[m] = 1.0
    # two passes: the restart converges much closer to the minimizer in the
    # nearly flat directions once the active constraints have settled
    z = np.concatenate([yb, [ratio_b]])
    for _ in range(2):
        res = minimize(lambda v: v[m], z, jac=lambda v: obj_jac, constraints=cons,
                       method="SLSQP", options={"maxiter": 120, "ftol": 1e-16})
        z = np.concatenate([res.x[:m], [_max_ratio(res.x[:m], values, d)]])
    yp = z[:m]
    ratio_p = _max_ratio(yp, values, d)
    if ratio_p <= ratio_b * (1.0 + 1e-9):
        lam, point = ratio_p, yp
    else:
        lam, point = ratio_b, yb

    ratios = np.linalg.norm(point - values, axis=1) / d
    active = tuple(int(i) for i in np.flatnonzero(ratios >= lam * (1.0 - 1e-6)))
    if not active:
        active = (int(np.argmax(ratios)),)
    viol = float(np.max(np.linalg.norm(point - values, axis=1) - lam * d))
    hull = _nnls_hull_coords(values[list(active)], point)
    return KPointResult(lam, point, active, viol, hull)


def _nnls_hull_coords(vertices: np.ndarray, y: np.ndarray) -> np.ndarray | None:
    """Nonnegative weights summing to one that best reconstruct y."""
    scale = max(float(np.abs(vertices).max()), 1e-300)
    a = np.vstack([vertices.T / scale, np.ones(vertices.shape[0])])
    b = np.concatenate([np.asarray(y, dtype=float) / scale, [1.0]])
    try:
        w, _ = nnls(a, b)
    except RuntimeError:
        return None
    return w
