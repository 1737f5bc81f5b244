"""Weighted point clouds as discrete measures: containers, CSV I/O,
reference generators, tuple sampling and Ahlfors-regularity probing.

CSV format: first line `dim=D`, then one row `c_1,...,c_D,weight` per
point.  Weights must be strictly positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

# Above this size the support diameter switches from the exact pairwise
# maximum to the centroid bound 2*max|x - centroid| (an upper bound).
EXACT_DIAMETER_LIMIT = 20000


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius < 0:
            raise ValueError("ball radius must be nonnegative")

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def blow(self, factor: float) -> "Ball":
        return Ball(self.center, factor * self.radius)

    def contains(self, points) -> np.ndarray:
        """Boolean mask for closed-ball membership."""
        V = np.asarray(points, dtype=float) - self.center
        return np.einsum("ij,ij->i", V, V) <= self.radius**2


class WeightedPointCloud:
    """Finite weighted point cloud mu = sum_i w_i delta_{p_i}."""

    def __init__(self, points, weights):
        points = np.ascontiguousarray(points, dtype=float)
        weights = np.ascontiguousarray(weights, dtype=float)
        if points.ndim != 2:
            raise ValueError("points must be (N, D)")
        if weights.shape != (len(points),):
            raise ValueError("need exactly one weight per point")
        if not np.all(np.isfinite(points)) or not np.all(np.isfinite(weights)):
            raise ValueError("points and weights must be finite")
        if len(points) == 0:
            raise ValueError("a cloud needs at least one point")
        if np.any(weights <= 0):
            raise ValueError("weights must be strictly positive")
        self.points = points
        self.weights = weights
        self._diameter: float | None = None
        self._diameter_exact: bool | None = None
        self._median_nn: float | None = None

    def __len__(self) -> int:
        return len(self.points)

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    def total_mass(self) -> float:
        return float(self.weights.sum())

    def in_ball(self, ball: Ball) -> np.ndarray:
        return np.nonzero(ball.contains(self.points))[0]

    def mass_in(self, ball: Ball) -> float:
        return float(self.weights[ball.contains(self.points)].sum())

    def subset(self, indices) -> "WeightedPointCloud":
        return WeightedPointCloud(self.points[indices], self.weights[indices])

    def support_diameter(self) -> float:
        if self._diameter is None:
            n = len(self.points)
            if n <= EXACT_DIAMETER_LIMIT:
                best = 0.0
                block = max(1, int(2**22 // max(n, 1)))
                for lo in range(0, n, block):
                    diff = self.points[lo : lo + block, None, :] - self.points[None, :, :]
                    d2 = np.einsum("ijk,ijk->ij", diff, diff)
                    best = max(best, float(d2.max()))
                self._diameter = float(np.sqrt(best))
                self._diameter_exact = True
            else:
                c = self.points.mean(axis=0)
                r = np.linalg.norm(self.points - c, axis=1).max()
                self._diameter = float(2.0 * r)
                self._diameter_exact = False
        return self._diameter

    @property
    def diameter_exact(self) -> bool:
        self.support_diameter()
        return bool(self._diameter_exact)

    def median_nn_distance(self) -> float:
        """Median distance to the nearest distinct-index neighbour."""
        if self._median_nn is None:
            if len(self.points) < 2:
                self._median_nn = 0.0
            else:
                tree = cKDTree(self.points)
                dist, _ = tree.query(self.points, k=2)
                self._median_nn = float(np.median(dist[:, 1]))
        return self._median_nn

    def bounding_ball(self) -> Ball:
        c = self.points.mean(axis=0)
        r = float(np.linalg.norm(self.points - c, axis=1).max())
        # sqrt/square round trips can push the extreme point a ulp outside
        # the closed ball; pad so the bounding ball really bounds.
        return Ball(c, r * (1.0 + 4.0 * np.finfo(float).eps))

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"dim={self.ambient_dim}\n")
            for p, w in zip(self.points, self.weights):
                fh.write(",".join(repr(float(c)) for c in p) + f",{float(w)!r}\n")

    @classmethod
    def from_csv(cls, path) -> "WeightedPointCloud":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if not header.startswith("dim="):
                raise ValueError("cloud CSV must start with a 'dim=D' header line")
            try:
                dim = int(header[4:])
            except ValueError as exc:
                raise ValueError(f"malformed dimension header {header!r}") from exc
            rows = []
            for lineno, line in enumerate(fh, start=2):
                line = line.strip()
                if not line:
                    continue
                fields = line.split(",")
                if len(fields) != dim + 1:
                    raise ValueError(f"line {lineno}: expected {dim + 1} fields, got {len(fields)}")
                rows.append([float(f) for f in fields])
        if not rows:
            raise ValueError("cloud CSV holds no points")
        arr = np.asarray(rows, dtype=float)
        return cls(arr[:, :dim], arr[:, dim])


def ball_mass(cloud: WeightedPointCloud, ball: Ball) -> float:
    """mu(B): total weight inside the closed ball."""
    return cloud.mass_in(ball)


def points_in_ball(cloud: WeightedPointCloud, ball: Ball) -> np.ndarray:
    """Indices of support points inside the closed ball."""
    return cloud.in_ball(ball)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def gen_plane_patch(d: int, D: int, n: int, seed=0) -> WeightedPointCloud:
    """Uniform sample of a unit d-cube patch of a d-plane embedded in R^D."""
    if not 1 <= d <= D:
        raise ValueError("need 1 <= d <= D")
    rng = _rng(seed)
    pts = np.zeros((n, D))
    pts[:, :d] = rng.uniform(-0.5, 0.5, size=(n, d))
    return WeightedPointCloud(pts, np.full(n, 1.0 / n))


def gen_sphere(D: int, n: int, seed=0) -> WeightedPointCloud:
    """Uniform sample of the unit sphere in R^D (D=2 gives the circle)."""
    rng = _rng(seed)
    g = rng.normal(size=(n, D))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return WeightedPointCloud(g, np.full(n, 1.0 / n))


def gen_lipschitz_graph(d: int, D: int, lip: float, n: int, seed=0) -> WeightedPointCloud:
    """Graph of an L-Lipschitz map R^d -> R^{D-d} over a unit cube patch.

    The map is a small sum of smooth waves with gradient bounded by 1,
    scaled so the full Jacobian has operator norm <= lip.
    """
    if not 1 <= d < D:
        raise ValueError("need 1 <= d < D")
    rng = _rng(seed)
    x = rng.uniform(-0.5, 0.5, size=(n, d))
    m_out = D - d
    scale = lip / np.sqrt(m_out)
    vals = np.zeros((n, m_out))
    for j in range(m_out):
        n_waves = 4
        dirs = rng.normal(size=(n_waves, d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        freqs = rng.uniform(1.0, 6.0, size=n_waves)
        phases = rng.uniform(0.0, 2 * np.pi, size=n_waves)
        coeffs = rng.uniform(0.2, 1.0, size=n_waves)
        coeffs /= np.abs(coeffs).sum()
        phase_arg = x @ dirs.T * freqs + phases
        vals[:, j] = scale * (np.sin(phase_arg) * (coeffs / freqs)).sum(axis=1)
    return WeightedPointCloud(np.hstack([x, vals]), np.full(n, 1.0 / n))


def gen_four_corner_cantor(level: int) -> WeightedPointCloud:
    """Level-n four-corner Cantor construction with contraction 1/4.

    The unit square is centred at the origin; each square spawns four
    corner squares of a quarter the side.  Level n yields 4^n cell centres
    with weight 4^-n each (a 1-regular measure in the limit).
    """
    if level < 0:
        raise ValueError("level must be nonnegative")
    centers = np.zeros((1, 2))
    side = 1.0
    offsets = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)
    for _ in range(level):
        shift = (3.0 / 8.0) * side
        centers = (centers[:, None, :] + shift * offsets[None, :, :]).reshape(-1, 2)
        side /= 4.0
    n = len(centers)
    return WeightedPointCloud(centers, np.full(n, 1.0 / n))


def sample_tuple(cloud: WeightedPointCloud, restriction: Ball | None, m: int, rng) -> np.ndarray:
    """Draw an m-tuple of support points i.i.d. proportional to mass,
    optionally restricted to a ball.  Returns the (m, D) point array."""
    rng = _rng(rng)
    if restriction is None:
        idx = np.arange(len(cloud))
    else:
        idx = cloud.in_ball(restriction)
        if len(idx) == 0:
            raise ValueError("restriction ball holds no support points")
    w = cloud.weights[idx]
    chosen = rng.choice(idx, size=m, p=w / w.sum())
    return cloud.points[chosen]


@dataclass(frozen=True)
class RegularityReport:
    """Empirical d-regularity constant with its probe table."""

    estimated_Cmu: float
    d: int
    samples: np.ndarray  # rows (center_index, radius, mass / r^d)
    degenerate: bool = False


def regularity_constant(
    cloud: WeightedPointCloud, d: int, n_centers: int = 32, n_radii: int = 12, seed=0
) -> RegularityReport:
    """Empirical C_mu: max over probed (x, r) of max(mu(B)/r^d, r^d/mu(B)).

    Centers are support points drawn by mass; radii run geometrically from
    the median nearest-neighbour distance to the support diameter.  The
    estimate is clipped below at 1.  A cloud too small to carry scales is
    flagged degenerate.
    """
    rng = _rng(seed)
    if len(cloud) < 2:
        return RegularityReport(1.0, d, np.zeros((0, 3)), degenerate=True)
    w = cloud.weights / cloud.total_mass()
    centers = rng.choice(len(cloud), size=min(n_centers, len(cloud)), replace=False, p=w)
    r_lo = max(cloud.median_nn_distance(), 1e-12)
    r_hi = max(cloud.support_diameter(), 2 * r_lo)
    radii = np.geomspace(r_lo, r_hi, n_radii)
    samples = []
    best = 1.0
    for ci in centers:
        for r in radii:
            mass = cloud.mass_in(Ball(cloud.points[ci], r))
            best = max(best, mass / r**d, r**d / mass)
            samples.append((ci, r, mass / r**d))
    return RegularityReport(float(best), d, np.asarray(samples))
