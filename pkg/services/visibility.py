# services/visibility.py
"""
點的可視多邊形 VP(q) 與線段的完全可視區域 CVP(s)。

VP(q) 以 q 為中心的扇形三角剖分表示：把 q 到每個頂點的方向（加上四個座標軸方向）
依擬角度排序，相鄰兩方向之間的楔形內，第一條被射線擊中的邊固定不變，
因此每個楔形的可視部分正好是一個三角形。
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import List, Tuple

from services.errors import InputOutsidePolygon, SegmentOutsidePolygon
from services.geometry_core import (
    ConvexRegion,
    Point,
    Segment,
    SimplePolygon,
    convex_or_none,
    intersect_convex,
    point_on_segment,
    pseudo_angle,
    ray_segment_param,
    segments_properly_cross,
)

_AXES = ((1, 0), (0, 1), (-1, 0), (0, -1))


# ---------------- 型別 ----------------
@dataclass(frozen=True)
class VisibilityPolygon:
    viewpoint: Point
    region: SimplePolygon
    fan: Tuple[ConvexRegion, ...]  # 以 viewpoint 為頂點、內部互不重疊的三角形

    @cached_property
    def area(self) -> Fraction:
        return sum((t.area for t in self.fan), Fraction(0))

    def contains(self, x: Point) -> bool:
        if x == self.viewpoint:
            return True
        return any(t.contains(x) for t in self.fan)


@dataclass(frozen=True)
class CompleteVisibilityRegion:
    segment: Segment
    pieces: Tuple[ConvexRegion, ...]  # VP(a) ∩ VP(b) 的凸分片

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    @cached_property
    def area(self) -> Fraction:
        return sum((p.area for p in self.pieces), Fraction(0))

    def contains(self, x: Point) -> bool:
        return any(p.contains(x) for p in self.pieces)

    def covers(self, target: ConvexRegion) -> bool:
        """target ⊆ CVP：以精確面積判斷（分片內部互不重疊）。"""
        covered = Fraction(0)
        for piece in self.pieces:
            if not piece.bbox_overlaps(target):
                continue
            common = intersect_convex(target, piece)
            if common is not None:
                covered += common.area
        return covered == target.area


# ---------------- 點對點可視 ----------------
def _require_inside(P: SimplePolygon, *points: Point) -> None:
    for p in points:
        if not P.contains(p):
            raise InputOutsidePolygon(f"點 {p} 不在多邊形內")


def _param_on(p: Point, q: Point, v: Point) -> Fraction:
    if p.x != q.x:
        return (v.x - p.x) / (q.x - p.x)
    return (v.y - p.y) / (q.y - p.y)


def sees(P: SimplePolygon, p: Point, q: Point) -> bool:
    """
    開線段 pq 不經過 P 的外部即為可見；擦過反射頂點或沿邊行進仍算可見。
    """
    _require_inside(P, p, q)
    if p == q:
        return True
    for e in P.edges():
        if segments_properly_cross(p, q, e.a, e.b):
            return False
    # 在 pq 上的頂點把線段切成數段，每段中點都必須在 P 內
    params = {Fraction(0), Fraction(1)}
    for v in P.vertices:
        if point_on_segment(v, p, q):
            params.add(_param_on(p, q, v))
    ordered = sorted(params)
    for t0, t1 in zip(ordered, ordered[1:]):
        t = (t0 + t1) / 2
        mid = Point(p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t)
        if not P.contains(mid):
            return False
    return True


# ---------------- VP(q) ----------------
def _critical_directions(P: SimplePolygon, q: Point) -> List[Tuple[Fraction, Fraction]]:
    found = {}
    for v in P.vertices:
        if v == q:
            continue
        d = (v.x - q.x, v.y - q.y)
        found.setdefault(pseudo_angle(*d), d)
    for dx, dy in _AXES:
        d = (Fraction(dx), Fraction(dy))
        found.setdefault(pseudo_angle(*d), d)
    return [found[k] for k in sorted(found)]


def _ray_meets_line(q: Point, d: Tuple[Fraction, Fraction], a: Point, b: Point) -> Point:
    ex, ey = b.x - a.x, b.y - a.y
    denom = d[0] * ey - d[1] * ex
    t = ((a.x - q.x) * ey - (a.y - q.y) * ex) / denom
    return Point(q.x + d[0] * t, q.y + d[1] * t)


@lru_cache(maxsize=4096)
def visibility_polygon(P: SimplePolygon, q: Point) -> VisibilityPolygon:
    _require_inside(P, q)
    dirs = _critical_directions(P, q)
    edges = P.edges()
    fan: List[ConvexRegion] = []
    ring: List[Point] = []

    for i, d0 in enumerate(dirs):
        d1 = dirs[(i + 1) % len(dirs)]
        mid = (d0[0] + d1[0], d0[1] + d1[1])
        best_t, best_edge = None, None
        for e in edges:
            t = ray_segment_param(q, mid[0], mid[1], e.a, e.b)
            if t is not None and (best_t is None or t < best_t):
                best_t, best_edge = t, e
        if best_t is None:
            ring.append(q)
            continue
        inner = Point(q.x + mid[0] * best_t / 2, q.y + mid[1] * best_t / 2)
        if not P.contains(inner):
            ring.append(q)
            continue
        a = _ray_meets_line(q, d0, best_edge.a, best_edge.b)
        b = _ray_meets_line(q, d1, best_edge.a, best_edge.b)
        tri = convex_or_none([q, a, b])
        if tri is not None:
            fan.append(tri)
        ring.extend([a, b])

    # 相鄰重複點合併；邊界上的 q 只會出現在一段連續的空楔形
    cleaned: List[Point] = []
    for p in ring:
        if not cleaned or cleaned[-1] != p:
            cleaned.append(p)
    while len(cleaned) > 1 and cleaned[0] == cleaned[-1]:
        cleaned.pop()
    return VisibilityPolygon(viewpoint=q, region=SimplePolygon(tuple(cleaned)), fan=tuple(fan))


# ---------------- CVP(s) ----------------
@lru_cache(maxsize=4096)
def _cvp_pieces(P: SimplePolygon, a: Point, b: Point) -> Tuple[ConvexRegion, ...]:
    fan_a = visibility_polygon(P, a).fan
    fan_b = visibility_polygon(P, b).fan
    pieces = []
    for ta in fan_a:
        for tb in fan_b:
            common = intersect_convex(ta, tb)
            if common is not None:
                pieces.append(common)
    pieces.sort(key=ConvexRegion.sort_key)
    logging.debug(f"CVP {a}-{b}: {len(pieces)} 個分片")
    return tuple(pieces)


def complete_visibility_polygon(P: SimplePolygon, s: Segment) -> CompleteVisibilityRegion:
    """CVP(s) = VP(s.a) ∩ VP(s.b)（無洞簡單多邊形中成立）。"""
    try:
        inside = sees(P, s.a, s.b)
    except InputOutsidePolygon as exc:
        raise SegmentOutsidePolygon(f"線段 {s.a}-{s.b} 端點在多邊形外") from exc
    if not inside:
        raise SegmentOutsidePolygon(f"線段 {s.a}-{s.b} 經過多邊形外部")
    a, b = sorted((s.a, s.b))
    return CompleteVisibilityRegion(segment=s, pieces=_cvp_pieces(P, a, b))


def is_star_shaped_about(vp: VisibilityPolygon) -> bool:
    """VP 的每個頂點 v，線段 qv 上的點都在 VP 內（以中點檢查）。"""
    q = vp.viewpoint
    for v in vp.region.vertices:
        if v == q:
            continue
        m = Point((q.x + v.x) / 2, (q.y + v.y) / 2)
        if not vp.contains(m):
            return False
    return True
