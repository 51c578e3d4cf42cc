# tests/test_guarding.py
from fractions import Fraction

import pytest

from services.decomposition import DecompositionConfig, ScRegion, Strategy, build_sc_regions
from services.errors import EdgeNotOnSource, TsrSourceMismatch
from services.geometry_core import ConvexRegion, HalfLine, Segment
from services.guarding import (
    TempSubRegion,
    all_temp_sub_regions,
    build_all_guarding_regions,
    decompose_scr,
    findtsr,
    VertexVisibility,
    temp_sub_regions_for_cell,
)
from services.oracle import oracle_sees, oracle_visible_list, sample_cell
from services.polygon_io import load_corpus
from tests.conftest import pt


def _cells(poly, strategy=Strategy.TRAPEZOID, **kw):
    return build_sc_regions(poly, DecompositionConfig(strategy=strategy, **kw))


@pytest.fixture
def diagonal_halves():
    t1 = ScRegion(0, ConvexRegion.from_points([pt(0, 0), pt(1, 0), pt(1, 1)]), pt(1, 0))
    t2 = ScRegion(1, ConvexRegion.from_points([pt(0, 0), pt(1, 1), pt(0, 1)]), pt(0, 1))
    return t1, t2


# ---- findtsr ----
def test_findtsr_across_diagonal_is_whole_source(square, diagonal_halves):
    t1, t2 = diagonal_halves
    tsr = findtsr(square, Segment(pt(0, 0), pt(1, 1)), t1, t2)
    assert tsr is not None
    assert tsr.region == t1.cell
    assert (tsr.source_id, tsr.target_id) == (0, 1)


def test_findtsr_target_equals_source(square):
    whole = ScRegion(0, ConvexRegion.box(0, 0, 1, 1), pt(0, 0))
    tsr = findtsr(square, Segment(pt(0, 0), pt(1, 0)), whole, whole)
    assert tsr.region == whole.cell


def test_findtsr_rejects_foreign_edge(square, diagonal_halves):
    t1, t2 = diagonal_halves
    with pytest.raises(EdgeNotOnSource):
        findtsr(square, Segment(pt(0, 1), pt(1, 1)), t1, t2)


def test_findtsr_blocked_by_reflex_vertex(lshape):
    right, _, top = sorted(_cells(lshape), key=lambda r: (-r.cell.bbox[0], r.cell.bbox[1]))
    assert right.cell == ConvexRegion.box(1, 0, 2, 1)
    assert top.cell == ConvexRegion.box(0, 1, 1, 2)
    assert findtsr(lshape, Segment(pt(1, 0), pt(1, 1)), right, top) is None


def test_findtsr_target_on_wrong_side(square, diagonal_halves):
    t1, _ = diagonal_halves
    # t1 自己在對角線的同一側，換成另一個 id 的 t1 複本
    twin = ScRegion(7, t1.cell, t1.representative)
    assert findtsr(square, Segment(pt(0, 0), pt(1, 1)), t1, twin) is None


# ---- tsr 集合 ----
def test_convex_polygon_every_tsr_is_whole_cell(square):
    cells = _cells(square, Strategy.PAPER1)
    for c in cells:
        tsrs = temp_sub_regions_for_cell(square, c, cells)
        assert {t.target_id for t in tsrs} == {r.id for r in cells}
        assert all(t.region == c.cell for t in tsrs)


def test_tsr_always_inside_source(lshape, comb3):
    for poly in (lshape, comb3):
        cells = _cells(poly, Strategy.PAPER1) if poly is lshape else _cells(poly)
        by_cell = all_temp_sub_regions(poly, cells)
        for c in cells:
            for t in by_cell[c.id]:
                assert t.source_id == c.id
                assert all(c.cell.contains(v) for v in t.region.vertices)


# ---- guarding-region ----
def test_convex_polygon_visible_lists_are_full(square, pentagon):
    for poly in (square, pentagon):
        cells = _cells(poly, Strategy.PAPER1)
        grs = build_all_guarding_regions(poly, cells)
        assert len(grs) == len(cells)
        assert all(gr.visible_list == tuple(range(len(cells))) for gr in grs)


def test_lshape_visible_lists(lshape):
    cells = _cells(lshape)
    grs = build_all_guarding_regions(lshape, cells)
    by_source = {gr.source_id: gr.visible_list for gr in grs}
    # cell 0 = 角落正方形，看得到兩隻手臂
    assert by_source == {0: (0, 1, 2), 1: (0, 1), 2: (0, 2)}


def test_comb_prong_seen_only_from_below(comb3):
    cells = _cells(comb3)
    grs = build_all_guarding_regions(comb3, cells)
    for prong in (c for c in cells if c.cell.bbox[1] == 1):
        x0 = prong.cell.bbox[0]
        seers = {gr.source_id for gr in grs if prong.id in gr.visible_list}
        below = next(c.id for c in cells if c.cell == ConvexRegion.box(x0, 0, x0 + 1, 1))
        assert seers == {prong.id, below}


def test_guarding_regions_partition_each_cell(lshape):
    cells = _cells(lshape, Strategy.PAPER1)
    grs = build_all_guarding_regions(lshape, cells)
    assert [gr.id for gr in grs] == list(range(len(grs)))
    for c in cells:
        assert sum((gr.region.area for gr in grs if gr.source_id == c.id), Fraction(0)) == c.cell.area
    for gr in grs:
        assert gr.source_id in gr.visible_list


@pytest.mark.parametrize("name, strategy", [("lshape", Strategy.PAPER1), ("comb3", Strategy.TRAPEZOID)])
def test_visible_lists_are_sound(name, strategy, request):
    poly = request.getfixturevalue(name)
    cells = _cells(poly, strategy)
    for gr in build_all_guarding_regions(poly, cells):
        seen = oracle_visible_list(poly, gr.anchor, cells, per_cell_samples=6, seed=gr.id)
        assert set(gr.visible_list) <= seen, gr


def test_threads_do_not_change_result(comb3):
    cells = _cells(comb3)
    assert build_all_guarding_regions(comb3, cells, threads=1) == build_all_guarding_regions(comb3, cells, threads=3)


def test_decompose_rejects_foreign_tsr(square, diagonal_halves):
    t1, t2 = diagonal_halves
    tsr = findtsr(square, Segment(pt(0, 0), pt(1, 1)), t1, t2)
    with pytest.raises(TsrSourceMismatch):
        decompose_scr(t2, [tsr])


def _tsr(source, target_id, region):
    edge = source.cell.edges()[0]
    return TempSubRegion(source.id, target_id, edge, region, HalfLine.from_points(edge.a, edge.b), HalfLine.from_points(edge.b, edge.a))


def test_two_overlapping_tsrs_give_four_guarding_regions():
    source = ScRegion(0, ConvexRegion.box(0, 0, 4, 4), pt(2, 2))
    tsrs = [
        _tsr(source, 0, source.cell),
        _tsr(source, 1, ConvexRegion.box(0, 0, 2, 4)),
        _tsr(source, 2, ConvexRegion.box(0, 0, 4, 2)),
    ]
    grs = decompose_scr(source, tsrs, first_id=10)
    assert [g.id for g in grs] == [10, 11, 12, 13]
    assert sum(g.region.area for g in grs) == 16
    by_vl = {g.visible_list: g.region for g in grs}
    assert by_vl == {
        (0, 1, 2): ConvexRegion.box(0, 0, 2, 2),
        (0, 1): ConvexRegion.box(0, 2, 2, 4),
        (0, 2): ConvexRegion.box(2, 0, 4, 2),
        (0,): ConvexRegion.box(2, 2, 4, 4),
    }


# ---- 與取樣對照組比對 ----
@pytest.mark.parametrize("name", ["pentagon", "lshape", "comb3", "comb5"])
def test_visible_list_is_constant_inside_each_guarding_region(name):
    poly = load_corpus(name)
    cells = _cells(poly)
    for gr in build_all_guarding_regions(poly, cells):
        inner = sample_cell(gr.region, 3, seed=gr.id).points[len(gr.region.vertices):]
        seen = {frozenset(oracle_visible_list(poly, x, cells, per_cell_samples=6, seed=1)) for x in inner}
        assert seen == {frozenset(gr.visible_list)}, gr


_LSHAPE_SLOW = pytest.param("lshape", Strategy.PAPER1, marks=pytest.mark.slow)


@pytest.mark.parametrize("name, strategy", [_LSHAPE_SLOW, ("comb3", Strategy.TRAPEZOID)])
def test_every_tsr_point_sees_its_whole_target(name, strategy, request):
    poly = request.getfixturevalue(name)
    cells = _cells(poly, strategy)
    by_id = {c.id: c for c in cells}
    for source_id, tsrs in all_temp_sub_regions(poly, cells).items():
        for i, t in enumerate(tsrs):
            if t.target_id == source_id:
                continue
            here = sample_cell(t.region, 3, seed=source_id * 1000 + i).points
            there = sample_cell(by_id[t.target_id].cell, 4, seed=t.target_id).points
            for x in here:
                for y in there:
                    assert oracle_sees(poly, x, y), (t, x, y)


@pytest.mark.parametrize("name, strategy", [_LSHAPE_SLOW, ("comb3", Strategy.TRAPEZOID)])
def test_vertex_table_agrees_with_findtsr(name, strategy, request):
    poly = request.getfixturevalue(name)
    cells = _cells(poly, strategy)
    table = VertexVisibility(poly, cells)
    for source in cells:
        pending = [t for t in cells if t.id != source.id and not table.sees_cell(source, t)]
        pending_ids = {t.id for t in pending}
        fast = {
            (t.target_id, t.via_edge, t.region)
            for t in temp_sub_regions_for_cell(poly, source, cells, table)
            if t.target_id in pending_ids
        }
        expected = set()
        for edge in source.cell.edges():
            if poly.on_boundary(edge.midpoint):
                continue
            for target in pending:
                tsr = findtsr(poly, edge, source, target)
                if tsr is not None:
                    expected.add((tsr.target_id, tsr.via_edge, tsr.region))
        assert fast == expected, source


def test_vertex_table_is_symmetric(lshape):
    table = VertexVisibility(lshape, _cells(lshape, Strategy.PAPER1))
    assert (table.matrix == table.matrix.T).all()
    i, j = table.index[pt(2, 1)], table.index[pt(1, 2)]
    assert not table.matrix[i, j]
    assert table.matrix[table.index[pt(0, 0)], i]
