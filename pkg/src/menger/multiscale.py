"""Multiresolution nets, covering ball families, partitions, and the
Jones-type flatness functionals built on them.

Per scale n the construction is:
  E_n   a greedy alpha0^n-net of the support (pairwise > alpha0^n, covering
        within alpha0^n),
  B_n   the subfamily of {B(x, 4 alpha0^n)} whose quarter balls are maximal
        mutually disjoint (greedy scan in net order); B_n still covers,
  P_n   a partition of the support with
        supp /\\ (1/4)B_{n,j}  <=  P_{n,j}  <=  supp /\\ (3/4)B_{n,j},
        built by trimming the leftover quarter balls against the kept
        quarter balls and earlier leftovers, then assigning each leftover
        to the smallest kept index whose quarter ball it meets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .measure import Ball, WeightedPointCloud
from .planes import beta2

# Hard cap on how far below the nearest-neighbour floor level building may
# run; guards degenerate clouds with duplicated points.
MAX_LEVELS_BELOW_TOP = 64


def scale_index(diam: float, alpha0: float) -> int:
    """m(Q) = ceil(ln diam / ln alpha0), patched so that the defining
    sandwich alpha0^m <= diam < alpha0^{m-1} holds under floating point."""
    if diam <= 0:
        raise ValueError("scale index needs a positive diameter")
    if not 0.0 < alpha0 < 1.0:
        raise ValueError("alpha0 must lie in (0, 1)")
    m = math.ceil(math.log(diam) / math.log(alpha0))
    while alpha0**m > diam:
        m += 1
    while alpha0 ** (m - 1) <= diam:
        m -= 1
    return m


def m_of_Q(query: Ball, alpha0: float) -> int:
    """Scale of a ball: the m with alpha0^m <= diam(Q) < alpha0^{m-1}."""
    return scale_index(query.diameter, alpha0)


def build_net(points: np.ndarray, order: np.ndarray, r: float) -> np.ndarray:
    """Greedy r-separated net over `points`, scanned in `order`.

    Returns the selected indices (in admission order).  Admitted points are
    pairwise more than r apart and every point is within r of one of them.
    """
    selected: list[int] = []
    sel_pts = np.empty((0, points.shape[1]))
    for idx in order:
        p = points[idx]
        if len(selected):
            d2 = np.einsum("ij,ij->i", sel_pts - p, sel_pts - p)
            if d2.min() <= r * r:
                continue
        selected.append(int(idx))
        sel_pts = np.vstack([sel_pts, p[None, :]])
    return np.asarray(selected, dtype=int)


def build_ball_family(net_points: np.ndarray, quarter_radius: float) -> np.ndarray:
    """Greedy subfamily whose quarter balls (radius = quarter_radius) are
    maximal mutually disjoint.  Returns positions within the net list.

    Closed balls of radius q are disjoint iff their centers are more than
    2q apart, so a candidate is dropped exactly when some kept center is
    within 2q.
    """
    kept: list[int] = []
    kept_pts = np.empty((0, net_points.shape[1]))
    thr = (2.0 * quarter_radius) ** 2
    for pos, p in enumerate(net_points):
        if len(kept):
            d2 = np.einsum("ij,ij->i", kept_pts - p, kept_pts - p)
            if d2.min() <= thr:
                continue
        kept.append(pos)
        kept_pts = np.vstack([kept_pts, p[None, :]])
    return np.asarray(kept, dtype=int)


def build_partition(
    points: np.ndarray, net_points: np.ndarray, kept: np.ndarray, quarter_radius: float
) -> np.ndarray:
    """Assign every point to a kept ball index, realising the leftover
    construction.

    A point inside a kept quarter ball goes to that ball (smallest index on
    boundary ties; kept quarter balls are disjoint so ties only occur
    exactly on spheres).  Any other point lies in some leftover quarter
    ball B' (centered on a dropped net point); it is claimed by the first
    such B' in net order and routed to g(B') = the smallest kept index
    whose quarter ball meets B'.  Every dropped net point has a kept center
    within 2q, so g is total.
    """
    n = len(points)
    q2 = quarter_radius**2
    kept_centers = net_points[kept]
    assignment = np.full(n, -1, dtype=int)

    block = max(1, int(2**22 // max(len(kept_centers), 1)))
    for lo in range(0, n, block):
        chunk = points[lo : lo + block]
        diff = chunk[:, None, :] - kept_centers[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        inside = d2 <= q2
        has = inside.any(axis=1)
        assignment[lo : lo + block][has] = np.argmax(inside[has], axis=1)

    leftover_pos = np.asarray([p for p in range(len(net_points)) if p not in set(kept.tolist())], dtype=int)
    unassigned = np.nonzero(assignment < 0)[0]
    if len(unassigned) == 0:
        return assignment

    if len(leftover_pos) == 0:
        raise AssertionError("net covering violated: unassigned points but no leftover balls")
    leftover_centers = net_points[leftover_pos]
    # g(B'): smallest kept index whose quarter ball meets the leftover ball,
    # i.e. center distance <= 2q.  Guaranteed to exist by the drop rule.
    diff = leftover_centers[:, None, :] - kept_centers[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    meets = d2 <= (2.0 * quarter_radius) ** 2
    if not meets.any(axis=1).all():
        raise AssertionError("dropped net ball meets no kept quarter ball")
    g = np.argmax(meets, axis=1)

    diff = points[unassigned][:, None, :] - leftover_centers[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    inside = d2 <= q2
    if not inside.any(axis=1).all():
        raise AssertionError("net covering violated: point outside every quarter ball")
    first = np.argmax(inside, axis=1)
    assignment[unassigned] = g[first]
    return assignment


@dataclass(frozen=True)
class NetLevel:
    """One scale of the multiresolution construction."""

    n: int
    alpha0: float
    net: np.ndarray        # cloud indices of the net points, admission order
    kept: np.ndarray       # positions within `net` whose balls were kept
    partition: np.ndarray  # point index -> j in [0, len(kept))

    @property
    def radius(self) -> float:
        return 4.0 * self.alpha0**self.n

    @property
    def quarter_radius(self) -> float:
        return self.alpha0**self.n

    def centers(self, cloud: WeightedPointCloud) -> np.ndarray:
        return cloud.points[self.net[self.kept]]

    def ball(self, cloud: WeightedPointCloud, j: int) -> Ball:
        return Ball(cloud.points[self.net[self.kept[j]]], self.radius)

    def n_balls(self) -> int:
        return len(self.kept)


def build_level(cloud: WeightedPointCloud, n: int, alpha0: float, order: np.ndarray) -> NetLevel:
    r = alpha0**n
    net = build_net(cloud.points, order, r)
    net_points = cloud.points[net]
    kept = build_ball_family(net_points, r)
    partition = build_partition(cloud.points, net_points, kept, r)
    return NetLevel(n=n, alpha0=alpha0, net=net, kept=kept, partition=partition)


@dataclass
class FlatnessReport:
    """Value of a Jones-type flatness functional plus its per-term table."""

    total: float
    terms: list = field(default_factory=list)
    kind: str = "discrete"

    def to_dict(self) -> dict:
        return {"total": self.total, "terms": self.terms}


class MultiresolutionFamily:
    """Scales of nets/balls/partitions for one cloud, built on demand.

    The scan order is a seeded permutation fixed at construction so every
    level (and everything derived from it) is deterministic.  Levels finer
    than the resolution floor (alpha0^n below the median nearest-neighbour
    distance) are not built: their balls hold too few points to carry
    geometry and contribute 0 to the flatness sums.
    """

    def __init__(self, cloud: WeightedPointCloud, alpha0: float, order_seed: int = 0):
        if not 0.0 < alpha0 < 1.0:
            raise ValueError("alpha0 must lie in (0, 1)")
        self.cloud = cloud
        self.alpha0 = float(alpha0)
        self.order = np.random.default_rng(order_seed).permutation(len(cloud))
        self._levels: dict[int, NetLevel] = {}
        self._beta_cache: dict[tuple[int, int, int], float] = {}

        diam = max(cloud.support_diameter(), 1e-300)
        self.n_top = scale_index(diam, alpha0)
        floor = cloud.median_nn_distance()
        if floor <= 0:
            floor = 1e-9 * diam
        n = self.n_top
        while self.alpha0**n >= floor and n - self.n_top < MAX_LEVELS_BELOW_TOP:
            n += 1
        self.n_floor = n - 1  # deepest level built: alpha0^n >= resolution floor

    def level(self, n: int) -> NetLevel:
        if n not in self._levels:
            self._levels[n] = build_level(self.cloud, n, self.alpha0, self.order)
        return self._levels[n]

    def levels_for(self, query: Ball) -> range:
        """All built scales relevant to a query ball: n >= m(Q), down to the
        resolution floor."""
        m = scale_index(query.diameter, self.alpha0)
        return range(m, self.n_floor + 1)

    def beta2_sq(self, n: int, j: int, d: int) -> float:
        key = (n, j, d)
        if key not in self._beta_cache:
            ball = self.level(n).ball(self.cloud, j)
            self._beta_cache[key] = beta2(self.cloud, ball, d).value ** 2
        return self._beta_cache[key]


def local_family(family: MultiresolutionFamily, query: Ball) -> list[tuple[int, int, Ball]]:
    """D(Q): all family balls at scales n >= m(Q) that intersect Q,
    intersection decided by the center-distance rule |c_B - c_Q| <= r_B + r_Q."""
    out = []
    cq = np.asarray(query.center, dtype=float)
    for n in family.levels_for(query):
        lvl = family.level(n)
        centers = lvl.centers(family.cloud)
        d = np.linalg.norm(centers - cq, axis=1)
        hit = np.nonzero(d <= lvl.radius + query.radius)[0]
        for j in hit:
            out.append((n, int(j), lvl.ball(family.cloud, int(j))))
    return out


def jones_flatness_discrete(
    cloud: WeightedPointCloud, query: Ball, family: MultiresolutionFamily, d: int
) -> FlatnessReport:
    """J_d^D(mu|_Q) = sum over B in D(Q) of beta_2^2(B) mu(B)."""
    if family.cloud is not cloud:
        raise ValueError("family was built over a different cloud")
    terms = []
    total = 0.0
    for n, j, ball in local_family(family, query):
        b2 = family.beta2_sq(n, j, d)
        mass = cloud.mass_in(ball)
        if mass == 0.0:
            continue
        total += b2 * mass
        terms.append({"level": n, "j": j, "beta2sq": b2, "mass": mass})
    return FlatnessReport(total=total, terms=terms, kind="discrete")


def jones_flatness_continuous(
    cloud: WeightedPointCloud,
    query: Ball,
    d: int,
    rho: float = 0.5,
    x_cap: int = 256,
) -> FlatnessReport:
    """J_d(mu|_B) = int_0^{diam B} int_B beta_2^2(x, t) dmu(x) dt/t.

    Quadrature: geometric scale grid t_j = diam(B) rho^j with log weight
    ln(1/rho), truncated at the resolution floor; the x-integral is the
    weighted sum over support points in B, decimated to at most x_cap
    points (stride subsample, mass rescaled).
    """
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")
    from .planes import beta2 as _beta2  # local alias, mirrors the discrete path

    idx = cloud.in_ball(query)
    terms: list = []
    if len(idx) == 0:
        return FlatnessReport(total=0.0, terms=terms, kind="continuous")
    mass_b = float(cloud.weights[idx].sum())
    if len(idx) > x_cap:
        stride = int(np.ceil(len(idx) / x_cap))
        sub = idx[::stride]
    else:
        sub = idx
    w_sub = cloud.weights[sub]
    w_sub = w_sub * (mass_b / w_sub.sum())

    floor = max(cloud.median_nn_distance(), 1e-12 * max(query.diameter, 1e-300))
    log_w = math.log(1.0 / rho)
    total = 0.0
    t = query.diameter
    level = 0
    while t >= floor and level < MAX_LEVELS_BELOW_TOP:
        layer = 0.0
        for pi, wx in zip(sub, w_sub):
            b2 = _beta2(cloud, Ball(cloud.points[pi], t), d).value ** 2
            layer += wx * b2
            terms.append({"t": t, "x": int(pi), "beta2sq": b2, "weight": float(wx)})
        total += log_w * layer
        t *= rho
        level += 1
    return FlatnessReport(total=total, terms=terms, kind="continuous")
