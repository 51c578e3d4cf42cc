# services/guarding.py
"""
Step 2–3：temp-sub-region（tsr）與 guarding-region（gr）。

tsr：source cell 中「經由某條邊可看見整個 target cell」的子區域，
由 target 的兩條切線穿過邊的端點往回延伸所夾出。
gr：把 source cell 以所有 tsr 邊界重疊切開，每個面帶一份 visible-list。
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app_utils import ordered_map
from services.decomposition import ScRegion
from services.errors import EdgeNotOnSource, TsrSourceMismatch
from services.geometry_core import (
    ConvexRegion,
    HalfLine,
    Orientation,
    Point,
    Segment,
    SimplePolygon,
    clip_convex_directed,
    cross,
    split_region_by_lines,
)
from services.visibility import CompleteVisibilityRegion, complete_visibility_polygon, sees


@dataclass(frozen=True)
class TempSubRegion:
    source_id: int
    target_id: int
    via_edge: Segment
    region: ConvexRegion
    shl: HalfLine
    ehl: HalfLine


@dataclass(frozen=True)
class GuardingRegion:
    id: int
    source_id: int
    region: ConvexRegion
    visible_list: Tuple[int, ...]

    @property
    def anchor(self) -> Point:
        return self.region.centroid


# ---------------- Findtsr ----------------
def _oriented_edge(cell: ConvexRegion, via_edge: Segment) -> Tuple[Point, Point]:
    """回傳 (a, b)，使 cell 位於 a→b 的右側。"""
    n = len(cell.vertices)
    for i in range(n):
        v0, v1 = cell.vertices[i], cell.vertices[(i + 1) % n]
        if {v0, v1} == {via_edge.a, via_edge.b}:
            return v1, v0
    raise EdgeNotOnSource(f"邊 {via_edge.a}-{via_edge.b} 不是 source cell 的邊")


def _extreme_vertex(pivot: Point, vertices: Sequence[Point], want_sign: int) -> Optional[Point]:
    """
    找 t ≠ pivot，使所有頂點 w 滿足 sign(cross(pivot, t, w)) ∈ {0, want_sign}；
    共線時取最遠者。
    """
    best: Optional[Point] = None
    for t in vertices:
        if t == pivot:
            continue
        if all(want_sign * cross(pivot, t, w) >= 0 for w in vertices):
            if best is None:
                best = t
            else:
                d_t = (t.x - pivot.x) ** 2 + (t.y - pivot.y) ** 2
                d_b = (best.x - pivot.x) ** 2 + (best.y - pivot.y) ** 2
                if d_t > d_b:
                    best = t
    return best


def _whole_cell_tsr(source: ScRegion, target_id: int) -> TempSubRegion:
    edge = source.cell.edges()[0]
    return TempSubRegion(
        source_id=source.id,
        target_id=target_id,
        via_edge=edge,
        region=source.cell,
        shl=HalfLine.from_points(edge.a, edge.b),
        ehl=HalfLine.from_points(edge.b, edge.a),
    )


def _beyond_edge(a: Point, b: Point, target: ScRegion) -> bool:
    # target 必須在邊的另一側（閉半平面）
    return all(cross(a, b, t) >= 0 for t in target.cell.vertices)


def _wedge_tsr(a: Point, b: Point, via_edge: Segment, source: ScRegion, target: ScRegion) -> Optional[TempSubRegion]:
    """target 的兩條切線穿過 a、b 往回延伸，在 source 內夾出的區域。"""
    verts = target.cell.vertices
    t_a = _extreme_vertex(a, verts, -1)
    t_b = _extreme_vertex(b, verts, +1)
    if t_a is None or t_b is None:
        return None

    region = clip_convex_directed(source.cell, a, t_a, keep=Orientation.CW)
    if region is not None:
        region = clip_convex_directed(region, b, t_b, keep=Orientation.CCW)
    if region is None:
        return None
    return TempSubRegion(
        source_id=source.id,
        target_id=target.id,
        via_edge=via_edge,
        region=region,
        shl=HalfLine(a, a.x - t_a.x, a.y - t_a.y),
        ehl=HalfLine(b, b.x - t_b.x, b.y - t_b.y),
    )


def findtsr(
    P: SimplePolygon,
    via_edge: Segment,
    source: ScRegion,
    target: ScRegion,
    cvp: Optional[CompleteVisibilityRegion] = None,
) -> Optional[TempSubRegion]:
    a, b = _oriented_edge(source.cell, via_edge)
    if target.id == source.id:
        return _whole_cell_tsr(source, source.id)
    if not _beyond_edge(a, b, target):
        return None

    if cvp is None:
        cvp = complete_visibility_polygon(P, via_edge)
    if not cvp.covers(target.cell):
        return None
    return _wedge_tsr(a, b, via_edge, source, target)


# ---------------- 頂點可視表 ----------------
class VertexVisibility:
    """
    所有 cell 頂點兩兩的 sees 結果，每一對只算一次。

    無洞多邊形中，凸集合 A 的每個頂點都看得見凸集合 B 的每個頂點時，
    A 的任一點都看得見 B 的任一點；因此「整個 cell 看得見整個 target」
    與「邊 ab 的 CVP 包含 target」都只需要查表。
    """

    def __init__(self, P: SimplePolygon, cells: Sequence[ScRegion]):
        points = sorted({v for c in cells for v in c.cell.vertices})
        self.index: Dict[Point, int] = {p: i for i, p in enumerate(points)}
        n = len(points)
        matrix = np.eye(n, dtype=bool)
        for i, j in combinations(range(n), 2):
            if sees(P, points[i], points[j]):
                matrix[i, j] = matrix[j, i] = True
        self.matrix = matrix
        self._cell_index = {c.id: np.array([self.index[v] for v in c.cell.vertices]) for c in cells}
        logging.info(f"頂點可視表：{n} 個頂點，{int(matrix.sum() - n) // 2} 對互相可見")

    def cell_vertices(self, cell: ScRegion) -> np.ndarray:
        found = self._cell_index.get(cell.id)
        if found is None:
            found = np.array([self.index[v] for v in cell.cell.vertices])
        return found

    def sees_cell(self, source: ScRegion, target: ScRegion) -> bool:
        return bool(self.matrix[np.ix_(self.cell_vertices(source), self.cell_vertices(target))].all())

    def seen_from_segment(self, a: Point, b: Point) -> np.ndarray:
        """a 與 b 都看得見的頂點（布林向量）。"""
        return self.matrix[self.index[a]] & self.matrix[self.index[b]]


def temp_sub_regions_for_cell(
    P: SimplePolygon,
    source: ScRegion,
    all_cells: Sequence[ScRegion],
    visibility: Optional[VertexVisibility] = None,
) -> List[TempSubRegion]:
    if visibility is None:
        visibility = VertexVisibility(P, [source, *all_cells])
    found = [_whole_cell_tsr(source, source.id)]
    pending: List[ScRegion] = []
    for target in all_cells:
        if target.id == source.id:
            continue
        if visibility.sees_cell(source, target):
            found.append(_whole_cell_tsr(source, target.id))
        else:
            pending.append(target)
    if not pending:
        return found

    for edge in source.cell.edges():
        # 落在多邊形邊界上的邊，視線無法由此穿出
        if P.on_boundary(edge.midpoint):
            continue
        a, b = _oriented_edge(source.cell, edge)
        seen = visibility.seen_from_segment(a, b)
        for target in pending:
            if not seen[visibility.cell_vertices(target)].all():
                continue
            if not _beyond_edge(a, b, target):
                continue
            tsr = _wedge_tsr(a, b, edge, source, target)
            if tsr is not None:
                found.append(tsr)
    return found


def all_temp_sub_regions(
    P: SimplePolygon, cells: Sequence[ScRegion], threads: int = 1
) -> Dict[int, List[TempSubRegion]]:
    visibility = VertexVisibility(P, cells)
    results = ordered_map(lambda c: temp_sub_regions_for_cell(P, c, cells, visibility), cells, threads)
    by_cell = {c.id: tsrs for c, tsrs in zip(cells, results)}
    logging.info(f"temp-sub-regions：{sum(len(v) for v in by_cell.values())} 個（含自身）")
    return by_cell


# ---------------- Decompose ----------------
def decompose_scr(source: ScRegion, tsrs: Sequence[TempSubRegion], first_id: int = 0) -> List[GuardingRegion]:
    for t in tsrs:
        if t.source_id != source.id:
            raise TsrSourceMismatch(f"tsr 的 source {t.source_id} 與 cell {source.id} 不符")

    # 整個 cell 的 tsr 不切割，也一定包含每個面
    whole = {t.target_id for t in tsrs if t.region == source.cell}
    partial = [t for t in tsrs if t.region != source.cell]
    lines = set()
    for t in partial:
        lines.update(t.region.edge_lines())
    faces = split_region_by_lines(source.cell, lines)

    out: List[GuardingRegion] = []
    for i, face in enumerate(faces):
        c = face.centroid
        vl = {source.id} | whole
        vl.update(t.target_id for t in partial if t.region.contains(c))
        out.append(GuardingRegion(id=first_id + i, source_id=source.id, region=face, visible_list=tuple(sorted(vl))))
    return out


def build_all_guarding_regions(
    P: SimplePolygon,
    cells: Sequence[ScRegion],
    tsrs_by_cell: Optional[Dict[int, List[TempSubRegion]]] = None,
    threads: int = 1,
) -> List[GuardingRegion]:
    if tsrs_by_cell is None:
        tsrs_by_cell = all_temp_sub_regions(P, cells, threads)
    per_cell = ordered_map(lambda c: decompose_scr(c, tsrs_by_cell.get(c.id, [])), cells, threads)

    grs: List[GuardingRegion] = []
    for local in per_cell:
        for gr in local:
            grs.append(GuardingRegion(id=len(grs), source_id=gr.source_id, region=gr.region, visible_list=gr.visible_list))
    logging.info(f"guarding-regions：{len(grs)} 個")
    return grs
