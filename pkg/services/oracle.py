# services/oracle.py
"""
暴力檢查用的獨立實作（取樣可視、VL 重建、直線排列計數）。

除了 orientation 與 Point 之外，不使用 geometry_core / visibility 的任何演算法，
測試才能拿它當作對照組。
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Sequence, Set, Tuple

import numpy as np

from config import SETTINGS
from services.geometry_core import Orientation, Point, orientation

DEFAULT_PER_CELL_SAMPLES = int(SETTINGS["oracle"]["per_cell_samples"])
DEFAULT_PAIR_SAMPLES = int(SETTINGS["oracle"]["pair_samples"])
DEFAULT_NUDGE = Fraction(str(SETTINGS["oracle"]["nudge"]))
_WEIGHT_RANGE = 1000
_LATTICE = 2**20


@dataclass(frozen=True)
class SampleSet:
    region: object
    points: Tuple[Point, ...]
    seed: int
    density: Fraction  # 每單位面積的點數


# ---- 點在多邊形內（winding number，邊界算在內）----
def _between(p: Point, a: Point, b: Point) -> bool:
    return min(a.x, b.x) <= p.x <= max(a.x, b.x) and min(a.y, b.y) <= p.y <= max(a.y, b.y)


def _on_boundary(vertices: Sequence[Point], p: Point) -> bool:
    n = len(vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        if orientation(a, b, p) is Orientation.COLLINEAR and _between(p, a, b):
            return True
    return False


def _winding(vertices: Sequence[Point], p: Point) -> int:
    wn = 0
    n = len(vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        if a.y <= p.y:
            if b.y > p.y and orientation(a, b, p) is Orientation.CCW:
                wn += 1
        elif b.y <= p.y and orientation(a, b, p) is Orientation.CW:
            wn -= 1
    return wn


def oracle_inside(P, p: Point) -> bool:
    verts = P.vertices
    return _on_boundary(verts, p) or _winding(verts, p) != 0


# ---- 可視 ----
def _contact_params(p: Point, q: Point, a: Point, b: Point) -> List[Fraction]:
    """線段 pq 與邊 ab 接觸處在 pq 上的參數。"""
    dx, dy = q.x - p.x, q.y - p.y
    ex, ey = b.x - a.x, b.y - a.y
    denom = dx * ey - dy * ex
    if denom == 0:
        if orientation(p, q, a) is not Orientation.COLLINEAR:
            return []
        # 共線：端點投影
        length2 = dx * dx + dy * dy
        out = []
        for v in (a, b):
            t = ((v.x - p.x) * dx + (v.y - p.y) * dy) / length2
            if 0 <= t <= 1:
                out.append(t)
        return out
    t = ((a.x - p.x) * ey - (a.y - p.y) * ex) / denom
    u = ((a.x - p.x) * dy - (a.y - p.y) * dx) / denom
    if 0 <= t <= 1 and 0 <= u <= 1:
        return [t]
    return []


def oracle_sees(P, p: Point, q: Point) -> bool:
    if not (oracle_inside(P, p) and oracle_inside(P, q)):
        return False
    if p == q:
        return True
    verts = P.vertices
    n = len(verts)
    params = {Fraction(0), Fraction(1)}
    for i in range(n):
        params.update(_contact_params(p, q, verts[i], verts[(i + 1) % n]))
    ordered = sorted(params)
    for t0, t1 in zip(ordered, ordered[1:]):
        t = (t0 + t1) / 2
        if not oracle_inside(P, Point(p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t)):
            return False
    return True


# ---- 取樣 ----
def _poly_area(vertices: Sequence[Point]) -> Fraction:
    n = len(vertices)
    return abs(sum((vertices[i].x * vertices[(i + 1) % n].y - vertices[(i + 1) % n].x * vertices[i].y for i in range(n)), Fraction(0))) / 2


def sample_cell(cell, count: int, seed: int, nudge: Fraction = DEFAULT_NUDGE) -> SampleSet:
    """凸 cell 內的樣本：count 個正權重凸組合 + 每個頂點往重心推 nudge。"""
    verts = cell.vertices
    rng = np.random.default_rng(seed)
    cx = sum((v.x for v in verts), Fraction(0)) / len(verts)
    cy = sum((v.y for v in verts), Fraction(0)) / len(verts)
    pts: List[Point] = [Point(v.x + (cx - v.x) * nudge, v.y + (cy - v.y) * nudge) for v in verts]
    weights = rng.integers(1, _WEIGHT_RANGE + 1, size=(count, len(verts)))
    for row in weights:
        total = int(row.sum())
        pts.append(Point(
            sum((v.x * int(w) for v, w in zip(verts, row)), Fraction(0)) / total,
            sum((v.y * int(w) for v, w in zip(verts, row)), Fraction(0)) / total,
        ))
    area = _poly_area(verts)
    return SampleSet(region=cell, points=tuple(pts), seed=seed, density=Fraction(len(pts)) / area)


def sample_segment(a: Point, b: Point, count: int = DEFAULT_PAIR_SAMPLES) -> List[Point]:
    """線段上等距的 count 個點（含兩端）。"""
    if count == 1:
        return [a]
    return [Point(a.x + (b.x - a.x) * Fraction(i, count - 1), a.y + (b.y - a.y) * Fraction(i, count - 1)) for i in range(count)]


def sample_inside(P, count: int, seed: int) -> SampleSet:
    rng = np.random.default_rng(seed)
    xs = [v.x for v in P.vertices]
    ys = [v.y for v in P.vertices]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    pts: List[Point] = []
    while len(pts) < count:
        for i, j in rng.integers(1, _LATTICE, size=(max(64, 2 * count), 2)):
            p = Point(x0 + (x1 - x0) * Fraction(int(i), _LATTICE), y0 + (y1 - y0) * Fraction(int(j), _LATTICE))
            if oracle_inside(P, p) and not _on_boundary(P.vertices, p):
                pts.append(p)
                if len(pts) == count:
                    break
    return SampleSet(region=P, points=tuple(pts), seed=seed, density=Fraction(len(pts)) / _poly_area(P.vertices))


def oracle_sees_segment(P, x: Point, a: Point, b: Point, count: int = DEFAULT_PAIR_SAMPLES) -> bool:
    """x 是否看得見線段 ab 上所有取樣點（CVP 對照）。"""
    return all(oracle_sees(P, x, w) for w in sample_segment(a, b, count))


def oracle_visible_list(
    P,
    p: Point,
    cells: Iterable,
    per_cell_samples: int = DEFAULT_PER_CELL_SAMPLES,
    seed: int = 0,
    nudge: Fraction = DEFAULT_NUDGE,
) -> Set[int]:
    visible: Set[int] = set()
    for cell in cells:
        samples = sample_cell(cell.cell, per_cell_samples, seed * 1_000_003 + cell.id, nudge)
        if all(oracle_sees(P, p, s) for s in samples.points):
            visible.add(cell.id)
    return visible


# ---- 直線排列計數：垂直條帶 + 符號向量 ----
def _coeffs(line) -> Tuple[Fraction, Fraction, Fraction]:
    return Fraction(line.A), Fraction(line.B), Fraction(line.C)


def _sign(v: Fraction) -> int:
    return (v > 0) - (v < 0)


def oracle_arrangement_count(lines: Iterable, clip) -> Tuple[int, Fraction]:
    coeffs = sorted({_coeffs(l) for l in lines})
    verts = clip.vertices
    xs_all = [v.x for v in verts]
    xmin, xmax = min(xs_all), max(xs_all)

    events = set(xs_all)
    for A, B, C in coeffs:
        if B == 0:
            events.add(-C / A)
    for (A1, B1, C1), (A2, B2, C2) in combinations(coeffs, 2):
        det = A1 * B2 - A2 * B1
        if det != 0:
            events.add((B1 * C2 - B2 * C1) / det)
    xs = sorted(x for x in events if xmin <= x <= xmax)

    sloped = [(A, B, C) for A, B, C in coeffs if B != 0]
    areas: Dict[Tuple[int, ...], Fraction] = {}
    for xa, xb in zip(xs, xs[1:]):
        xm = (xa + xb) / 2
        ys = sorted(sloped, key=lambda c: -(c[0] * xm + c[2]) / c[1])
        for low, high in zip(ys, ys[1:]):
            y_lo = -(low[0] * xm + low[2]) / low[1]
            y_hi = -(high[0] * xm + high[2]) / high[1]
            if y_lo == y_hi:
                continue
            mid = Point(xm, (y_lo + y_hi) / 2)
            if _winding(verts, mid) == 0:
                continue
            signature = tuple(_sign(A * mid.x + B * mid.y + C) for A, B, C in coeffs)
            h_a = (-(high[0] * xa + high[2]) / high[1]) - (-(low[0] * xa + low[2]) / low[1])
            h_b = (-(high[0] * xb + high[2]) / high[1]) - (-(low[0] * xb + low[2]) / low[1])
            areas[signature] = areas.get(signature, Fraction(0)) + (xb - xa) * (h_a + h_b) / 2
    return len(areas), sum(areas.values(), Fraction(0))
