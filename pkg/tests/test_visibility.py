# tests/test_visibility.py
from itertools import combinations, islice

import pytest

from services.errors import InputOutsidePolygon, SegmentOutsidePolygon
from services.geometry_core import ConvexRegion, Segment
from services.oracle import oracle_sees, oracle_sees_segment, sample_inside
from services.polygon_io import corpus_names, load_corpus
from services.visibility import (
    complete_visibility_polygon,
    is_star_shaped_about,
    sees,
    visibility_polygon,
)
from tests.conftest import F, pt


# ---- 點對點 ----
def test_convex_polygon_everything_visible(square):
    assert sees(square, pt(0, 0), pt(1, 1))
    assert sees(square, pt(F(1, 3), F(2, 3)), pt(1, 0))


@pytest.mark.parametrize(
    "p, q, expected",
    [
        ((F(3, 2), F(1, 2)), (F(1, 2), F(7, 4)), False),  # 被反射頂點擋住
        ((F(3, 2), F(1, 2)), (1, 1), True),  # 看向反射頂點本身
        ((F(3, 2), F(1, 2)), (F(1, 2), F(3, 2)), True),  # 擦過 (1,1)
        ((2, 1), (0, 1), True),  # 沿著邊界前進
        ((2, 0), (0, 2), True),  # 穿過反射頂點的對角線
        ((2, 1), (1, 2), False),
    ],
)
def test_sees_in_lshape(lshape, p, q, expected):
    assert sees(lshape, pt(*p), pt(*q)) is expected
    assert sees(lshape, pt(*q), pt(*p)) is expected


def test_sees_rejects_outside_points(lshape):
    with pytest.raises(InputOutsidePolygon):
        sees(lshape, pt(3, 3), pt(F(1, 2), F(1, 2)))


# ---- VP(q) ----
def test_vp_of_convex_is_polygon(square):
    vp = visibility_polygon(square, pt(F(1, 3), F(1, 4)))
    assert vp.area == square.area


@pytest.mark.parametrize(
    "q, area",
    [
        ((F(1, 2), F(1, 2)), 3),  # kernel 內
        ((1, 1), 3),  # 反射頂點
        ((F(3, 2), F(1, 2)), F(5, 2)),  # x + y > 2 的三角形看不到
        ((0, 0), 3),
    ],
)
def test_vp_area_lshape(lshape, q, area):
    assert visibility_polygon(lshape, pt(*q)).area == area


def test_vp_is_star_shaped(lshape, comb3):
    for poly, q in [(lshape, pt(F(3, 2), F(1, 2))), (comb3, pt(F(5, 2), F(1, 2))), (comb3, pt(F(1, 2), 2))]:
        vp = visibility_polygon(poly, q)
        assert is_star_shaped_about(vp)
        assert vp.contains(q)


@pytest.mark.parametrize("name", ["lshape", "comb3"])
def test_vp_agrees_with_sampling_oracle(name, request):
    poly = request.getfixturevalue(name)
    viewpoints = sample_inside(poly, 4, seed=11).points
    targets = sample_inside(poly, 150, seed=12).points
    for q in viewpoints:
        vp = visibility_polygon(poly, q)
        for x in targets:
            assert vp.contains(x) == oracle_sees(poly, q, x), (q, x)


# ---- CVP(s) ----
def test_cvp_inside_kernel_is_whole_polygon(lshape):
    cvp = complete_visibility_polygon(lshape, Segment(pt(F(1, 4), F(1, 4)), pt(F(3, 4), F(1, 4))))
    assert cvp.area == lshape.area


def test_cvp_agrees_with_sampling_oracle(lshape):
    a, b = pt(F(3, 2), F(1, 4)), pt(F(3, 2), F(3, 4))
    cvp = complete_visibility_polygon(lshape, Segment(a, b))
    for x in sample_inside(lshape, 150, seed=5).points:
        assert cvp.contains(x) == oracle_sees_segment(lshape, x, a, b, count=9), x


@pytest.mark.parametrize("name", corpus_names())
def test_cvp_matches_oracle_on_random_segments(name):
    poly = load_corpus(name)
    ends = sample_inside(poly, 12, seed=21).points
    segments = list(islice(((a, b) for a, b in combinations(ends, 2) if oracle_sees(poly, a, b)), 3))
    assert segments
    queries = sample_inside(poly, 60, seed=22).points
    for a, b in segments:
        cvp = complete_visibility_polygon(poly, Segment(a, b))
        for x in queries:
            assert cvp.contains(x) == oracle_sees_segment(poly, x, a, b, count=9), (a, b, x)


def test_cvp_inside_each_endpoint_vp(lshape):
    a, b = pt(F(3, 2), F(1, 4)), pt(F(3, 2), F(3, 4))
    cvp = complete_visibility_polygon(lshape, Segment(a, b))
    assert cvp.area <= visibility_polygon(lshape, a).area
    assert cvp.area <= visibility_polygon(lshape, b).area
    for piece in cvp.pieces:
        assert visibility_polygon(lshape, a).contains(piece.centroid)
        assert visibility_polygon(lshape, b).contains(piece.centroid)


def test_cvp_covers(lshape):
    cvp = complete_visibility_polygon(lshape, Segment(pt(F(3, 2), F(1, 4)), pt(F(3, 2), F(3, 4))))
    assert cvp.covers(ConvexRegion.box(0, 0, 1, 1))
    assert not cvp.covers(ConvexRegion.box(0, 1, 1, 2))


def test_cvp_segment_must_stay_inside(lshape):
    with pytest.raises(SegmentOutsidePolygon):
        complete_visibility_polygon(lshape, Segment(pt(F(3, 2), F(1, 2)), pt(F(1, 2), F(7, 4))))
    with pytest.raises(SegmentOutsidePolygon):
        complete_visibility_polygon(lshape, Segment(pt(3, 3), pt(F(1, 2), F(1, 2))))
