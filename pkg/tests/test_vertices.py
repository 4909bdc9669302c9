import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from globvert.contour import from_polyline, locate
from globvert.descriptors import compute_profile
from globvert.errors import MismatchedN
from globvert.shapes import ShapeSpec, fd_curvature, generate, parse_shape, reference_points
from globvert.vertices import (
    CONCAVE,
    CONVEX,
    Vertex,
    VertexSet,
    default_window,
    detect,
    label,
    match,
    union_scenarios,
)

import oracles

ELLIPSE = ShapeSpec("ellipse", {"a": 2, "b": 1})
RRECT = ShapeSpec("rounded_rect", {"w": 2, "h": 1, "r": 0.1})
STAR = ShapeSpec("star", {"base": 1, "a": 0.3, "k": 5})


def vertices_of(spec, n, w=None):
    c = generate(spec, n)
    p = compute_profile(c)
    return c, p, label(detect(p, w), p)


def vset(positions, n=400, w=2, source="s", labels=None):
    labels = labels or [CONVEX] * len(positions)
    return VertexSet(tuple(Vertex(float(p), w, lab, sources=(source,)) for p, lab in zip(positions, labels)), n, w)


def test_default_window():
    assert default_window(400) == 8 and default_window(100) == 2 and default_window(20) == 1


def test_ellipse_has_four_convex_vertices_at_axis_ends():
    c, _, vs = vertices_of(ELLIPSE, 400, 2)
    truth = [locate(c, p) for p in oracles.ellipse_axis_points(2, 1)]
    pairs, missed, extra = match(vs.positions, truth, 400, 2)
    assert len(vs) == 4 and not missed and not extra
    assert vs.labels == [CONVEX] * 4
    assert all(vs.window == 2 for _ in vs)


def test_circle_has_no_vertices():
    _, _, vs = vertices_of(ShapeSpec("circle", {"R": 1}), 400)
    assert len(vs) == 0


def test_star_labels_follow_fd_curvature_sign():
    c, _, vs = vertices_of(STAR, 500)
    k = fd_curvature(c)
    truth = [locate(c, p) for p in reference_points(STAR)]
    pairs, missed, _ = match(vs.positions, truth, 500, 2)
    assert not missed
    for i, j, _ in pairs:
        expected = CONVEX if k[int(round(truth[j])) % 500] > 0 else CONCAVE
        assert vs.vertices[i].label == expected
    assert [vs.vertices[i].label for i, j, _ in pairs if j % 2] == [CONCAVE] * 5


def test_rounded_rect_corners_are_convex_vertices():
    c, _, vs = vertices_of(RRECT, 400)
    truth = [locate(c, p) for p in reference_points(RRECT)]
    pairs, missed, _ = match(vs.positions, truth, 400, 3)
    assert not missed
    assert all(vs.vertices[i].label == CONVEX for i, _, _ in pairs)


def test_label_requires_same_n():
    _, p, vs = vertices_of(ELLIPSE, 400, 2)
    other = compute_profile(generate(ELLIPSE, 200))
    with pytest.raises(MismatchedN):
        label(vs, other)


def test_slope_min_zero_is_the_default():
    _, p, _ = vertices_of(RRECT, 200)
    assert detect(p, 4, slope_min=0.0).positions.tolist() == detect(p, 4).positions.tolist()
    assert len(detect(p, 4, slope_min=np.inf)) == 0


def test_each_vertex_has_a_third_derivative_partner():
    _, p, vs = vertices_of(STAR, 300)
    for v in vs:
        assert oracles.circular_distance(v.position, v.d3_position, 300) <= vs.window
        assert v.d3_slope > 0


def test_union_merges_nearby_vertices():
    a = vset([10.2, 100], source="smooth")
    b = vset([10.8, 300], source="noise")
    u = union_scenarios([a, b])
    assert u.positions.tolist() == pytest.approx([10.5, 100, 300])
    assert u.vertices[0].sources == ("smooth", "noise")


def test_union_wraps_around_and_orders_sources():
    a = vset([399.5], source="smooth")
    b = vset([0.5], source="noise")
    u = union_scenarios([b, a])
    assert len(u) == 1 and oracles.circular_distance(u.positions[0], 0.0, 400) < 1e-12
    assert union_scenarios([a, b]).vertices[0].sources == ("smooth", "noise")


def test_union_identities():
    a = vset([5, 50, 250])
    assert union_scenarios([a]).positions.tolist() == a.positions.tolist()
    assert union_scenarios([a, a]).positions.tolist() == a.positions.tolist()
    empty = VertexSet((), 400, 2)
    assert union_scenarios([a, empty]).positions.tolist() == a.positions.tolist()
    assert len(union_scenarios([empty, empty])) == 0
    with pytest.raises(ValueError):
        union_scenarios([])
    with pytest.raises(MismatchedN):
        union_scenarios([a, vset([1], n=200)])


def test_union_majority_label():
    sets = [vset([10], source=s, labels=[lab]) for s, lab in (("a", CONCAVE), ("b", CONVEX), ("c", CONVEX))]
    assert union_scenarios(sets).labels == [CONVEX]


def test_match_is_one_to_one():
    pairs, missed, extra = match([1, 2, 50], [1.5, 49, 200], 400, 2)
    assert sorted((i, j) for i, j, _ in pairs) == [(0, 0), (2, 1)]
    assert missed == [2] and extra == [1]


@settings(max_examples=8, deadline=None)
@given(st.integers(min_value=0, max_value=199))
def test_detection_is_equivariant_under_start_shift(k):
    c = generate(ELLIPSE, 200)
    p, q = compute_profile(c), compute_profile(c.roll(k))
    base = detect(p, 2).positions
    moved = detect(q, 2).positions
    expected = (base - k) % 200
    assert len(moved) == len(base)
    gaps = [min(oracles.circular_distance(m, e, 200) for e in expected) for m in moved]
    assert max(gaps, default=0) < 1e-6


@settings(max_examples=8, deadline=None)
@given(st.floats(min_value=0, max_value=2 * np.pi))
def test_detection_count_invariant_under_rotation(angle):
    c = generate(STAR, 250)
    rot = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    p = compute_profile(c)
    q = compute_profile(from_polyline(c.points @ rot.T))
    assert detect(p).positions.tolist() == pytest.approx(detect(q).positions.tolist(), abs=1e-6)
