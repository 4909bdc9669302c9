import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from globvert.contour import from_polyline, resample_uniform
from globvert.errors import BadWindow, ConfigError, DegenerateSegment, RhoTooSmall
from globvert.perturb import NoiseConfig, noising, noising_step, smooth
from globvert.shapes import ShapeSpec, fd_curvature, generate

import oracles

CIRCLE = ShapeSpec("circle", {"R": 1.0})


def square(n):
    return resample_uniform(from_polyline([[0, 0], [1, 0], [1, 1], [0, 1]]), n)


def polygon(pts):
    return from_polyline(np.asarray(pts, dtype=float))


def test_inserted_point_offset():
    c = polygon([[0, 0], [1, 0], [1, 1], [0, 1]])
    out = noising_step(c, NoiseConfig(rho=1.0, side_policy="exterior"))
    assert np.allclose(out.points[1], [0.5, -oracles.insertion_offset(1.0, 1.0)])
    assert oracles.insertion_offset(1.0, 1.0) == pytest.approx(math.sqrt(3) / 2)
    fine = square(16)
    inner = noising_step(fine, NoiseConfig(rho=1.0, side_policy="interior"))
    assert np.allclose(inner.points[1], [0.125, oracles.insertion_offset(1.0, 0.25)])


def test_inserted_points_sit_on_both_circles():
    c = generate(ShapeSpec("ellipse", {"a": 2, "b": 1}), 50)
    out = noising_step(c, NoiseConfig(rho=0.7))
    d = np.hypot(*(np.roll(c.points, -1, axis=0) - c.points).T)
    q = out.points[1::2]
    assert np.allclose(np.hypot(*(q - c.points).T), 0.7 * d)
    assert np.allclose(np.hypot(*(q - np.roll(c.points, -1, axis=0)).T), 0.7 * d)


def test_limit_rho_half_gives_midpoints():
    c = generate(CIRCLE, 16)
    out = noising_step(c, NoiseConfig(rho=0.5 + 1e-12))
    mid = 0.5 * (c.points + np.roll(c.points, -1, axis=0))
    assert np.allclose(out.points[1::2], mid, atol=1e-5)


def test_config_validation():
    with pytest.raises(RhoTooSmall):
        NoiseConfig(rho=0.5)
    with pytest.raises(ConfigError):
        NoiseConfig(iterations=0)
    with pytest.raises(ConfigError):
        NoiseConfig(side_policy="sideways")
    assert NoiseConfig(side_policy="alt").side_policy == "alternate"
    assert "seed=3" in NoiseConfig(side_policy="rand", seed=3).label


def test_degenerate_segment():
    c = generate(CIRCLE, 16)
    pts = c.points.copy()
    with pytest.raises(DegenerateSegment):
        from globvert.perturb import _step

        pts[1] = pts[0]
        _step(pts, NoiseConfig(), np.random.default_rng(0))


def test_iterations_double_the_count():
    c = generate(CIRCLE, 32)
    cfg = NoiseConfig(iterations=2)
    assert noising(c, cfg).n == 128
    assert noising(c, cfg, samples=32).n == 32
    once = NoiseConfig(iterations=1)
    assert np.array_equal(noising(c, once).points, noising_step(c, once).points)


def test_originals_kept_at_even_indices():
    c = generate(ShapeSpec("star", {"base": 1, "a": 0.3, "k": 5}), 64)
    for policy in ("alternate", "interior", "exterior", "random"):
        out = noising_step(c, NoiseConfig(rho=0.9, side_policy=policy, seed=5))
        assert np.allclose(out.points[0::2], c.points, atol=1e-12)


def test_random_policy_is_reproducible():
    c = generate(CIRCLE, 40)
    cfg = NoiseConfig(side_policy="random", seed=11, iterations=2)
    assert np.array_equal(noising(c, cfg).points, noising(c, cfg).points)
    other = noising(c, NoiseConfig(side_policy="random", seed=12, iterations=2))
    assert not np.array_equal(noising(c, cfg).points, other.points)


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=0, max_value=2 * np.pi), st.sampled_from(["alternate", "interior", "exterior"]))
def test_rotation_equivariance(angle, policy):
    c = generate(ShapeSpec("ellipse", {"a": 1.5, "b": 1}), 24)
    rot = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    cfg = NoiseConfig(rho=0.8, side_policy=policy)
    a = noising_step(polygon(c.points @ rot.T), cfg).points
    b = noising_step(c, cfg).points @ rot.T
    assert np.allclose(a, b, atol=1e-12)


def test_noising_raises_curvature_and_perimeter():
    c = generate(CIRCLE, 256)
    out = noising_step(c, NoiseConfig(rho=0.8))
    assert out.perimeter > c.perimeter
    before, after = np.abs(fd_curvature(c)), np.abs(fd_curvature(out))
    assert after.max() >= 10 * before.max()
    assert after.mean() > before.mean()


def test_direction_occupancy_does_not_drop():
    c = generate(ShapeSpec("rounded_rect", {"w": 2, "h": 1, "r": 0.1}), 200)
    out = noising_step(c, NoiseConfig(rho=0.8))

    def occupied(points):
        seg = np.roll(points, -1, axis=0) - points
        ang = np.arctan2(seg[:, 1], seg[:, 0]) % (2 * np.pi)
        return len(np.unique(np.floor(ang / (2 * np.pi) * 36)))

    assert occupied(out.points) > occupied(c.points)


# -- smoothing -------------------------------------------------------------------------

def test_smooth_shrinks_a_circle_slightly():
    n, window = 200, 5
    c = generate(CIRCLE, n)
    out = smooth(c, window)
    r = np.hypot(*out.points.T)
    shrink = 1 - r.mean()
    assert 0 < shrink < window**2 * (2 * np.pi / n) ** 2 / 8
    assert r.std() < 1e-9


def test_smooth_blunts_square_corners():
    c = square(400)
    before = np.abs(fd_curvature(c)).max()
    after = np.abs(fd_curvature(smooth(c, 5, passes=3))).max()
    assert after * 2 <= before


def test_smooth_identity_and_errors():
    c = generate(CIRCLE, 64)
    assert np.array_equal(smooth(c, 1).points, c.points)
    assert np.array_equal(smooth(c, 5, passes=0).points, c.points)
    for bad in (0, 4, -3):
        with pytest.raises(BadWindow):
            smooth(c, bad)
    assert smooth(c, 3, samples=40).n == 40
