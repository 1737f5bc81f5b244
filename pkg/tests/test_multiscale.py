import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from menger.measure import Ball, WeightedPointCloud, gen_plane_patch
from menger.multiscale import (
    MultiresolutionFamily,
    build_ball_family,
    build_net,
    build_partition,
    jones_flatness_continuous,
    jones_flatness_discrete,
    local_family,
    m_of_Q,
    scale_index,
)


def as_pts(xs):
    return np.asarray(xs, dtype=float)[:, None]


def test_scale_index_known_values():
    assert scale_index(1.0, 0.25) == 0
    assert scale_index(0.3, 0.25) == 1
    assert scale_index(0.25**3, 0.25) == 3  # exact power lands on its own level
    assert scale_index(5.0, 0.25) == -1
    with pytest.raises(ValueError):
        scale_index(0.0, 0.25)
    with pytest.raises(ValueError):
        scale_index(1.0, 1.5)


@given(st.floats(1e-6, 1e6), st.floats(0.05, 0.9))
def test_scale_index_sandwich(diam, alpha0):
    m = scale_index(diam, alpha0)
    assert alpha0**m <= diam < alpha0 ** (m - 1)


def test_m_of_q_uses_ball_diameter():
    assert m_of_Q(Ball(np.zeros(2), 0.5), 0.25) == 0  # diam 1.0
    assert m_of_Q(Ball(np.zeros(2), 0.125), 0.25) == 1  # diam 0.25


def test_build_net_on_a_line():
    pts = as_pts([0.0, 1.0, 2.0, 3.0])
    net = build_net(pts, np.arange(4), 1.5)
    assert net.tolist() == [0, 2]


def test_net_separation_and_covering(circle):
    r = 0.3
    order = np.random.default_rng(1).permutation(len(circle))
    net = build_net(circle.points, order, r)
    sel = circle.points[net]
    dist = np.linalg.norm(sel[:, None, :] - sel[None, :, :], axis=2)
    np.fill_diagonal(dist, np.inf)
    assert dist.min() > r
    cover = np.linalg.norm(circle.points[:, None, :] - sel[None, :, :], axis=2).min(axis=1)
    assert (cover <= r).all()


def test_ball_family_drop_rule_is_closed():
    # centers exactly 2q apart have touching quarter balls: dropped
    pts = as_pts([0.0, 0.6, 1.3])
    kept = build_ball_family(pts, 0.3)
    assert kept.tolist() == [0, 2]


def test_partition_hand_case_direct_assignment():
    pts = as_pts([0.0, 0.2, 1.0, 1.1, 2.5])
    net = build_net(pts, np.arange(5), 0.3)
    assert net.tolist() == [0, 2, 4]
    kept = build_ball_family(pts[net], 0.3)
    assert kept.tolist() == [0, 1, 2]
    part = build_partition(pts, pts[net], kept, 0.3)
    assert part.tolist() == [0, 0, 1, 1, 2]


def test_partition_hand_case_leftover_routing():
    # net point at 0.5 is dropped (within 2q of 0); the point it covers is
    # routed to the kept ball its quarter ball meets
    pts = as_pts([0.0, 0.5, 0.9])
    net = build_net(pts, np.arange(3), 0.3)
    assert net.tolist() == [0, 1, 2]
    kept = build_ball_family(pts[net], 0.3)
    assert kept.tolist() == [0, 2]
    part = build_partition(pts, pts[net], kept, 0.3)
    assert part.tolist() == [0, 0, 1]


def test_partition_sandwich_on_random_cloud(circle):
    fam = MultiresolutionFamily(circle, 0.25, order_seed=0)
    lvl = fam.level(fam.n_top + 1)
    q = lvl.quarter_radius
    centers = lvl.centers(circle)
    own = np.linalg.norm(circle.points - centers[lvl.partition], axis=1)
    # every point within its cell's 3q ball; quarter-ball points in their own cell
    assert (own <= 3.0 * q * (1.0 + 1e-12)).all()
    d_all = np.linalg.norm(circle.points[:, None, :] - centers[None, :, :], axis=2)
    inside = d_all.min(axis=1) <= q
    assert (lvl.partition[inside] == d_all.argmin(axis=1)[inside]).all()


def test_netlevel_radii():
    cloud = gen_plane_patch(1, 2, 50, seed=0)
    fam = MultiresolutionFamily(cloud, 0.25, order_seed=0)
    lvl = fam.level(2)
    assert lvl.radius == 4.0 * 0.25**2
    assert lvl.quarter_radius == 0.25**2
    assert lvl.n_balls() == len(lvl.kept)
    ball = lvl.ball(cloud, 0)
    assert ball.radius == lvl.radius


def test_family_is_deterministic(circle):
    a = MultiresolutionFamily(circle, 0.25, order_seed=7)
    b = MultiresolutionFamily(circle, 0.25, order_seed=7)
    la, lb = a.level(a.n_top + 2), b.level(b.n_top + 2)
    assert np.array_equal(la.net, lb.net)
    assert np.array_equal(la.kept, lb.kept)
    assert np.array_equal(la.partition, lb.partition)
    assert a.level(a.n_top + 2) is la  # cached


def test_levels_for_starts_at_query_scale(circle):
    fam = MultiresolutionFamily(circle, 0.25, order_seed=0)
    rng = fam.levels_for(Ball(np.zeros(2), 0.125))  # diam 0.25 -> m = 1
    assert rng.start == 1
    assert rng.stop == fam.n_floor + 1


def test_local_family_center_distance_rule(circle):
    fam = MultiresolutionFamily(circle, 0.25, order_seed=0)
    query = Ball(circle.points[0], 0.2)
    fam_balls = local_family(fam, query)
    assert fam_balls
    for n, j, ball in fam_balls:
        assert n >= m_of_Q(query, 0.25)
        gap = float(np.linalg.norm(ball.center - query.center))
        assert gap <= ball.radius + query.radius


def test_flatness_guard_rejects_foreign_cloud(circle, patch12):
    fam = MultiresolutionFamily(circle, 0.25, order_seed=0)
    with pytest.raises(ValueError):
        jones_flatness_discrete(patch12, circle.bounding_ball(), fam, 1)


def test_flatness_vanishes_on_flat_cloud(patch12):
    fam = MultiresolutionFamily(patch12, 0.25, order_seed=0)
    rep = jones_flatness_discrete(patch12, patch12.bounding_ball(), fam, 1)
    assert rep.total <= 1e-12
    assert rep.kind == "discrete"
    cont = jones_flatness_continuous(patch12, patch12.bounding_ball(), 1, x_cap=32)
    assert cont.total <= 1e-12


def test_flatness_positive_on_circle(circle):
    fam = MultiresolutionFamily(circle, 0.25, order_seed=0)
    rep = jones_flatness_discrete(circle, circle.bounding_ball(), fam, 1)
    assert rep.total > 1e-4
    d = rep.to_dict()
    assert set(d) == {"total", "terms"}
    assert set(d["terms"][0]) == {"level", "j", "beta2sq", "mass"}


def test_family_rejects_bad_alpha0(circle):
    with pytest.raises(ValueError):
        MultiresolutionFamily(circle, 1.0)
    with pytest.raises(ValueError):
        jones_flatness_continuous(circle, circle.bounding_ball(), 1, rho=1.5)
