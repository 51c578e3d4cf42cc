# tests/test_decomposition.py
from fractions import Fraction

import pytest
from pydantic import ValidationError

from services.decomposition import (
    DecompositionConfig,
    Strategy,
    build_sc_regions,
    decomposition_lines,
    projected_face_bound,
    reflex_chords,
    refine_once,
    trapezoid_cells,
    vertex_lines,
)
from services.errors import CellBudgetExceeded, ConfigError, validated
from services.geometry_core import ConvexRegion, Segment, arrangement_faces
from services.oracle import oracle_arrangement_count
from tests.conftest import F, pt


def _cfg(strategy, **kw):
    return DecompositionConfig(strategy=strategy, **kw)


def _assert_partition(poly, regions):
    """cell 面積和等於多邊形面積，且兩兩內部不重疊（以重心檢查）。"""
    assert sum((r.cell.area for r in regions), Fraction(0)) == poly.area
    for r in regions:
        assert poly.contains(r.cell.centroid)
        owners = [o.id for o in regions if o.cell.contains(r.cell.centroid, strict=True)]
        assert owners == [r.id]


# ---- 直線集合 ----
def test_vertex_lines_counts(square, triangle, lshape):
    assert len(vertex_lines(triangle)) == 3
    assert len(vertex_lines(square)) == 6
    # (2,0) (1,1) (0,2) 共線，三個頂點對合併成一條直線
    assert len(vertex_lines(lshape)) == 13


def test_projected_face_bound():
    assert projected_face_bound(0) == 1
    assert projected_face_bound(3) == 7
    assert projected_face_bound(6) == 22


# ---- PAPER1 / PAPER2 ----
def test_square_paper1(square):
    regions = build_sc_regions(square, _cfg(Strategy.PAPER1))
    assert len(regions) == 4
    _assert_partition(square, regions)


def test_square_refinement_is_stable(square):
    once = refine_once(vertex_lines(square), square, triangle_rule=False)
    assert once == vertex_lines(square)
    assert len(build_sc_regions(square, _cfg(Strategy.PAPER1, k=1))) == 4


def test_pentagon_paper1(pentagon):
    regions = build_sc_regions(pentagon, _cfg(Strategy.PAPER1))
    assert len(regions) == 11
    count, area = oracle_arrangement_count(vertex_lines(pentagon), pentagon)
    assert count == 11 and area == pentagon.area
    _assert_partition(pentagon, regions)


def test_lshape_paper1_matches_oracle(lshape):
    lines = vertex_lines(lshape)
    regions = build_sc_regions(lshape, _cfg(Strategy.PAPER1))
    count, area = oracle_arrangement_count(lines, lshape)
    assert len(regions) == count
    assert area == lshape.area
    _assert_partition(lshape, regions)


@pytest.mark.slow
def test_refinement_nests_cells(pentagon):
    coarse = build_sc_regions(pentagon, _cfg(Strategy.PAPER1))
    fine = build_sc_regions(pentagon, _cfg(Strategy.PAPER1, k=1))
    assert len(fine) > len(coarse)
    _assert_partition(pentagon, fine)
    for r in fine:
        parents = [c for c in coarse if all(c.cell.contains(v) for v in r.cell.vertices)]
        assert len(parents) == 1


def test_refinement_lines_superset(pentagon):
    base = vertex_lines(pentagon)
    assert base <= refine_once(base, pentagon, triangle_rule=False)


def test_triangle_rule_adds_medians(triangle):
    refined = refine_once(vertex_lines(triangle), triangle, triangle_rule=True)
    assert len(refined) == 6
    faces = arrangement_faces(refined, triangle)
    assert len(faces) == 6
    assert all(pt(2, 2) in f.vertices for f in faces)


def test_refinement_budget(pentagon):
    with pytest.raises(CellBudgetExceeded):
        decomposition_lines(pentagon, _cfg(Strategy.PAPER1, k=1, max_cells=50))


def test_cell_budget_on_build(lshape):
    with pytest.raises(CellBudgetExceeded):
        build_sc_regions(lshape, _cfg(Strategy.TRAPEZOID, max_cells=2))


# ---- TRAPEZOID ----
def test_lshape_trapezoids(lshape):
    cells = trapezoid_cells(lshape)
    assert cells == [ConvexRegion.box(0, 0, 1, 1), ConvexRegion.box(0, 1, 1, 2), ConvexRegion.box(1, 0, 2, 1)]


def test_lshape_reflex_chords(lshape):
    chords = reflex_chords(lshape)
    assert any(c.same_as(Segment(pt(1, 1), pt(0, 1))) for c in chords)
    assert any(c.same_as(Segment(pt(1, 1), pt(1, 0))) for c in chords)


def test_comb_trapezoids(comb3):
    regions = build_sc_regions(comb3, _cfg(Strategy.TRAPEZOID))
    assert len(regions) == 8
    _assert_partition(comb3, regions)
    prongs = [r for r in regions if r.cell.bbox[1] == 1]
    assert sorted(r.cell.bbox for r in prongs) == [
        (0, 1, 1, 3),
        (2, 1, 3, 3),
        (4, 1, 5, 3),
    ]


def test_trapezoid_of_convex_polygon(pentagon):
    regions = build_sc_regions(pentagon, _cfg(Strategy.TRAPEZOID))
    _assert_partition(pentagon, regions)
    assert len(regions) == 4  # 頂點 x 座標切出 4 個條帶


# ---- GRID ----
def test_grid_partition(lshape, comb3):
    for poly in (lshape, comb3):
        regions = build_sc_regions(poly, _cfg(Strategy.GRID, grid_resolution=2))
        _assert_partition(poly, regions)
    assert len(build_sc_regions(lshape, _cfg(Strategy.GRID, grid_resolution=2))) > 3


@pytest.mark.parametrize("strategy", list(Strategy))
def test_every_strategy_partitions(strategy, lshape):
    _assert_partition(lshape, build_sc_regions(lshape, _cfg(strategy, grid_resolution=3)))


def test_representative_is_inside(comb3):
    for r in build_sc_regions(comb3, _cfg(Strategy.TRAPEZOID)):
        assert r.cell.contains(r.representative, strict=True)


# ---- 設定驗證 ----
def test_config_rejects_bad_k():
    with pytest.raises(ValidationError):
        DecompositionConfig(k=4)
    with pytest.raises(ConfigError):
        validated(DecompositionConfig, {"k": -1})
    with pytest.raises(ConfigError):
        validated(DecompositionConfig, {"strategy": "voronoi"})
