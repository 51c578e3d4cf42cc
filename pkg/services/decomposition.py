# services/decomposition.py
"""
Step 1：把多邊形切成 sc-region（spanning convex region）。

策略：
- PAPER1：所有頂點對的直線，再做 k 次 refine_once
- PAPER2：同上，但三角形 cell 另加中線
- TRAPEZOID：垂直梯形分解 + 反射頂點延長線
- GRID：座標格線 + 邊線 + 反射頂點與其他頂點的連線
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Iterable, List, Optional, Set

from pydantic import BaseModel, Field

from services.errors import CellBudgetExceeded
from services.geometry_core import (
    ConvexRegion,
    Line,
    Point,
    Segment,
    SimplePolygon,
    arrangement_faces,
    convex_or_none,
    cross,
    first_boundary_hit,
    midpoint,
    split_convex,
)

MAX_K = 3
DEFAULT_MAX_CELLS = 50_000


class Strategy(str, Enum):
    PAPER1 = "paper1"
    PAPER2 = "paper2"
    TRAPEZOID = "trapezoid"
    GRID = "grid"


class DecompositionConfig(BaseModel):
    strategy: Strategy = Strategy.TRAPEZOID
    k: int = Field(default=0, ge=0, le=MAX_K)
    grid_resolution: int = Field(default=4, ge=1)
    max_cells: int = Field(default=DEFAULT_MAX_CELLS, ge=1)


@dataclass(frozen=True)
class ScRegion:
    id: int
    cell: ConvexRegion
    representative: Point


# ---------------- 直線集合 ----------------
def vertex_lines(P: SimplePolygon) -> Set[Line]:
    return {Line.through(a, b) for a, b in combinations(P.vertices, 2)}


def projected_face_bound(line_count: int) -> int:
    """L 條直線的排列最多 1 + L + L(L−1)/2 個面。"""
    return 1 + line_count + line_count * (line_count - 1) // 2


def _median_lines(cell: ConvexRegion) -> Set[Line]:
    a, b, c = cell.vertices
    return {
        Line.through(midpoint(a, b), c),
        Line.through(midpoint(b, c), a),
        Line.through(midpoint(c, a), b),
    }


def refine_once(
    lines: Iterable[Line],
    P: SimplePolygon,
    triangle_rule: bool,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> Set[Line]:
    current = set(lines)
    faces = arrangement_faces(current, P, max_faces=max_cells)

    points = sorted({v for f in faces for v in f.vertices})
    refined = set(current)
    for a, b in combinations(points, 2):
        refined.add(Line.through(a, b))
    if triangle_rule:
        for f in faces:
            if len(f.vertices) == 3:
                refined |= _median_lines(f)

    bound = projected_face_bound(len(refined))
    if bound > max_cells:
        logging.warning(f"refine_once：{len(refined)} 條直線，預估面數 {bound} 超過上限 {max_cells}")
        raise CellBudgetExceeded(
            f"{len(refined)} 條直線的排列最多 {bound} 個面，超過 max_cells={max_cells}"
        )
    logging.info(f"refine_once：{len(faces)} 個 cell，{len(points)} 個頂點 → {len(refined)} 條直線")
    return refined


def _reflex_vertex_lines(P: SimplePolygon) -> Set[Line]:
    out: Set[Line] = set()
    for i in P.reflex_indices():
        v = P.vertices[i]
        for w in P.vertices:
            if w != v:
                out.add(Line.through(v, w))
    return out


def grid_lines(P: SimplePolygon, resolution: int) -> Set[Line]:
    x0, y0, x1, y1 = P.bbox
    out: Set[Line] = set(P.edge_lines())
    for i in range(resolution + 1):
        x = x0 + (x1 - x0) * Fraction(i, resolution)
        y = y0 + (y1 - y0) * Fraction(i, resolution)
        out.add(Line(1, 0, -x))
        out.add(Line(0, 1, -y))
    out |= _reflex_vertex_lines(P)
    return out


# ---------------- 梯形分解 ----------------
def _slab_trapezoids(P: SimplePolygon) -> List[ConvexRegion]:
    xs = sorted({v.x for v in P.vertices})
    edges = [e for e in P.edges() if e.a.x != e.b.x]
    cells: List[ConvexRegion] = []
    for xa, xb in zip(xs, xs[1:]):
        xm = (xa + xb) / 2
        crossing = []
        for e in edges:
            lo, hi = sorted((e.a.x, e.b.x))
            if lo <= xa and hi >= xb:
                line = e.line
                crossing.append((line.y_at(xm), line))
        crossing.sort(key=lambda item: item[0])
        # 由下往上兩兩配對：奇偶規則下每對之間是多邊形內部
        for (_, low), (_, high) in zip(crossing[0::2], crossing[1::2]):
            trap = convex_or_none([
                Point(xa, low.y_at(xa)),
                Point(xb, low.y_at(xb)),
                Point(xb, high.y_at(xb)),
                Point(xa, high.y_at(xa)),
            ])
            if trap is not None:
                cells.append(trap)
    return cells


def reflex_chords(P: SimplePolygon) -> List[Segment]:
    """每個反射頂點兩條鄰邊往內部的延長線段（到第一個邊界交點）。"""
    chords: List[Segment] = []
    n = P.n
    for i in P.reflex_indices():
        v = P.vertices[i]
        for other in (P.vertices[i - 1], P.vertices[(i + 1) % n]):
            dx, dy = v.x - other.x, v.y - other.y
            hit = first_boundary_hit(P, v, dx, dy)
            if hit is None:
                continue
            t, _ = hit
            chords.append(Segment(v, Point(v.x + dx * t, v.y + dy * t)))
    return chords


def _chord_crosses(cell: ConvexRegion, chord: Segment) -> bool:
    # Cyrus–Beck 裁切：弦在 cell 內的部分是否穿過內部
    t_lo, t_hi = Fraction(0), Fraction(1)
    n = len(cell.vertices)
    for i in range(n):
        a, b = cell.vertices[i], cell.vertices[(i + 1) % n]
        f0, f1 = cross(a, b, chord.a), cross(a, b, chord.b)
        if f0 < 0 and f1 < 0:
            return False
        if f0 < 0 <= f1:
            t_lo = max(t_lo, f0 / (f0 - f1))
        elif f1 < 0 <= f0:
            t_hi = min(t_hi, f0 / (f0 - f1))
        if t_lo >= t_hi:
            return False
    t = (t_lo + t_hi) / 2
    inner = Point(chord.a.x + (chord.b.x - chord.a.x) * t, chord.a.y + (chord.b.y - chord.a.y) * t)
    return cell.contains(inner, strict=True)


def trapezoid_cells(P: SimplePolygon) -> List[ConvexRegion]:
    cells = _slab_trapezoids(P)
    for chord in reflex_chords(P):
        line = chord.line
        nxt: List[ConvexRegion] = []
        for cell in cells:
            if _chord_crosses(cell, chord):
                left, right = split_convex(cell, line)
                nxt.extend(p for p in (left, right) if p is not None)
            else:
                nxt.append(cell)
        cells = nxt
    cells.sort(key=ConvexRegion.sort_key)
    return cells


# ---------------- Step 1 ----------------
def decomposition_lines(P: SimplePolygon, cfg: DecompositionConfig) -> Optional[Set[Line]]:
    """PAPER1 / PAPER2 / GRID 的最終直線集合；TRAPEZOID 不以直線排列表示，回傳 None。"""
    if cfg.strategy is Strategy.TRAPEZOID:
        return None
    if cfg.strategy is Strategy.GRID:
        return grid_lines(P, cfg.grid_resolution)
    lines = vertex_lines(P)
    triangle_rule = cfg.strategy is Strategy.PAPER2
    for step in range(cfg.k):
        lines = refine_once(lines, P, triangle_rule, cfg.max_cells)
        logging.info(f"{cfg.strategy.value} 第 {step + 1} 次細分：{len(lines)} 條直線")
    return lines


def build_sc_regions(P: SimplePolygon, cfg: DecompositionConfig) -> List[ScRegion]:
    lines = decomposition_lines(P, cfg)
    if lines is None:
        cells = trapezoid_cells(P)
    else:
        cells = arrangement_faces(lines, P, max_faces=cfg.max_cells)
    if len(cells) > cfg.max_cells:
        logging.warning(f"sc-region 數量 {len(cells)} 超過上限 {cfg.max_cells}")
        raise CellBudgetExceeded(f"sc-region 數量 {len(cells)} 超過 max_cells={cfg.max_cells}")
    logging.info(f"build_sc_regions：策略 {cfg.strategy.value}，{len(cells)} 個 sc-region")
    return [ScRegion(id=i, cell=c, representative=c.centroid) for i, c in enumerate(cells)]
