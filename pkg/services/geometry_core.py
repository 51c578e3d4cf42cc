# services/geometry_core.py
"""
精確有理數幾何核心：所有座標皆為 fractions.Fraction，不使用任何 epsilon。

其他模組（visibility / decomposition / guarding / setcover）都建立在這裡的
型別與判斷式之上。
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from services.errors import (
    DegenerateInput,
    NotSimple,
    PreconditionViolated,
    TooFewVertices,
    CellBudgetExceeded,
)

Scalar = Fraction
Number = Union[int, str, Fraction]


def to_scalar(value: Number) -> Fraction:
    """int / Fraction / 十進位或 p/q 字串 → Fraction（十進位精確轉換）。"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool 不是座標")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # float 以其十進位表示轉換，避免二進位誤差進入計算
        return Fraction(repr(value))
    return Fraction(str(value).strip())


# ---------------- 基本型別 ----------------
class Orientation(Enum):
    CCW = 1
    CW = -1
    COLLINEAR = 0


class Side(Enum):
    LEFT = "left"  # 正規化直線 A·x + B·y + C >= 0 的一側
    RIGHT = "right"  # A·x + B·y + C <= 0 的一側


@dataclass(frozen=True, order=True)
class Point:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        if not isinstance(self.x, Fraction):
            object.__setattr__(self, "x", to_scalar(self.x))
        if not isinstance(self.y, Fraction):
            object.__setattr__(self, "y", to_scalar(self.y))

    @classmethod
    def of(cls, x: Number, y: Number) -> "Point":
        return cls(to_scalar(x), to_scalar(y))

    def __repr__(self) -> str:
        return f"Point({self.x}, {self.y})"


def cross(o: Point, a: Point, b: Point) -> Fraction:
    """(a − o) × (b − o)"""
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def sign(v: Fraction) -> int:
    return (v > 0) - (v < 0)


def orientation(p: Point, q: Point, r: Point) -> Orientation:
    s = sign(cross(p, q, r))
    if s > 0:
        return Orientation.CCW
    if s < 0:
        return Orientation.CW
    return Orientation.COLLINEAR


def midpoint(p: Point, q: Point) -> Point:
    return Point((p.x + q.x) / 2, (p.y + q.y) / 2)


def lerp(p: Point, q: Point, t: Fraction) -> Point:
    return Point(p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t)


def vertex_centroid(points: Sequence[Point]) -> Point:
    n = len(points)
    return Point(sum((p.x for p in points), Fraction(0)) / n,
                 sum((p.y for p in points), Fraction(0)) / n)


def signed_area(points: Sequence[Point]) -> Fraction:
    total = Fraction(0)
    n = len(points)
    for i in range(n):
        a, b = points[i], points[(i + 1) % n]
        total += a.x * b.y - b.x * a.y
    return total / 2


def pseudo_angle(dx: Fraction, dy: Fraction) -> Fraction:
    """
    方向 (dx, dy) 的有理「擬角度」，值域 [0, 4)，與真實角度同序。
    每個象限以 |dx| + |dy| 正規化，不需要開根號或三角函數。
    """
    if dx == 0 and dy == 0:
        raise DegenerateInput("零向量沒有方向")
    s = abs(dx) + abs(dy)
    if dx >= 0 and dy >= 0:
        return dy / s
    if dx < 0 and dy >= 0:
        return 1 + (-dx) / s
    if dx < 0 and dy < 0:
        return 2 + (-dy) / s
    return 3 + dx / s


def point_on_segment(p: Point, a: Point, b: Point) -> bool:
    if cross(a, b, p) != 0:
        return False
    return min(a.x, b.x) <= p.x <= max(a.x, b.x) and min(a.y, b.y) <= p.y <= max(a.y, b.y)


def segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """閉線段 ab 與 cd 是否相交（含端點接觸與共線重疊）。"""
    o1, o2 = sign(cross(a, b, c)), sign(cross(a, b, d))
    o3, o4 = sign(cross(c, d, a)), sign(cross(c, d, b))
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return (
        (o1 == 0 and point_on_segment(c, a, b))
        or (o2 == 0 and point_on_segment(d, a, b))
        or (o3 == 0 and point_on_segment(a, c, d))
        or (o4 == 0 and point_on_segment(b, c, d))
    )


def segments_properly_cross(a: Point, b: Point, c: Point, d: Point) -> bool:
    """兩線段在彼此內部點嚴格交叉（不含端點接觸）。"""
    return (
        sign(cross(a, b, c)) * sign(cross(a, b, d)) < 0
        and sign(cross(c, d, a)) * sign(cross(c, d, b)) < 0
    )


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    def __post_init__(self):
        if self.a == self.b:
            raise DegenerateInput(f"線段端點重合：{self.a}")

    def reversed(self) -> "Segment":
        return Segment(self.b, self.a)

    def same_as(self, other: "Segment") -> bool:
        """不分方向比較。"""
        return {self.a, self.b} == {other.a, other.b}

    def contains(self, p: Point) -> bool:
        return point_on_segment(p, self.a, self.b)

    @property
    def midpoint(self) -> Point:
        return midpoint(self.a, self.b)

    @property
    def line(self) -> "Line":
        return Line.through(self.a, self.b)


@dataclass(frozen=True, order=True)
class Line:
    """A·x + B·y + C = 0，建構時正規化（A, B 中第一個非零者縮放為 1）。"""

    A: Fraction
    B: Fraction
    C: Fraction

    def __post_init__(self):
        A, B, C = to_scalar(self.A), to_scalar(self.B), to_scalar(self.C)
        if A == 0 and B == 0:
            raise DegenerateInput("直線係數 (A, B) 不可同時為 0")
        lead = A if A != 0 else B
        object.__setattr__(self, "A", A / lead)
        object.__setattr__(self, "B", B / lead)
        object.__setattr__(self, "C", C / lead)

    @classmethod
    def through(cls, p: Point, q: Point) -> "Line":
        if p == q:
            raise DegenerateInput(f"兩點重合，無法決定直線：{p}")
        return cls(p.y - q.y, q.x - p.x, (q.y - p.y) * p.x - (q.x - p.x) * p.y)

    def evaluate(self, p: Point) -> Fraction:
        return self.A * p.x + self.B * p.y + self.C

    def side(self, p: Point) -> int:
        return sign(self.evaluate(p))

    def contains(self, p: Point) -> bool:
        return self.evaluate(p) == 0

    @property
    def is_vertical(self) -> bool:
        return self.B == 0

    def y_at(self, x: Fraction) -> Fraction:
        return -(self.A * x + self.C) / self.B


@dataclass(frozen=True)
class HalfLine:
    origin: Point
    dx: Fraction
    dy: Fraction

    def __post_init__(self):
        object.__setattr__(self, "dx", to_scalar(self.dx))
        object.__setattr__(self, "dy", to_scalar(self.dy))
        if self.dx == 0 and self.dy == 0:
            raise DegenerateInput("半直線方向不可為零向量")

    @classmethod
    def from_points(cls, origin: Point, toward: Point) -> "HalfLine":
        return cls(origin, toward.x - origin.x, toward.y - origin.y)

    def point_at(self, t: Fraction) -> Point:
        return Point(self.origin.x + self.dx * t, self.origin.y + self.dy * t)

    @property
    def line(self) -> Line:
        return Line.through(self.origin, self.point_at(Fraction(1)))


def line_intersection(l1: Line, l2: Line) -> Optional[Point]:
    det = l1.A * l2.B - l2.A * l1.B
    if det == 0:
        return None
    x = (l1.B * l2.C - l2.B * l1.C) / det
    y = (l1.C * l2.A - l2.C * l1.A) / det
    return Point(x, y)


# ---------------- 凸區域 ----------------
def _clean_ring(points: Iterable[Point]) -> List[Point]:
    """移除重複點與共線點，保留環狀順序。"""
    ring: List[Point] = []
    for p in points:
        if not ring or ring[-1] != p:
            ring.append(p)
    while len(ring) > 1 and ring[0] == ring[-1]:
        ring.pop()
    changed = True
    while changed and len(ring) >= 3:
        changed = False
        for i in range(len(ring)):
            if cross(ring[i - 1], ring[i], ring[(i + 1) % len(ring)]) == 0:
                del ring[i]
                changed = True
                break
    return ring


def _rotate_to_min(ring: List[Point]) -> Tuple[Point, ...]:
    k = ring.index(min(ring))
    return tuple(ring[k:] + ring[:k])


@dataclass(frozen=True)
class ConvexRegion:
    """逆時針、嚴格凸、正面積；頂點從字典序最小者開始。請用 from_points 建立。"""

    vertices: Tuple[Point, ...]

    @classmethod
    def from_points(cls, points: Iterable[Point]) -> "ConvexRegion":
        region = convex_or_none(points)
        if region is None:
            raise DegenerateInput("凸區域退化（面積為 0 或頂點不足）")
        return region

    @classmethod
    def box(cls, x0: Number, y0: Number, x1: Number, y1: Number) -> "ConvexRegion":
        x0, y0, x1, y1 = (to_scalar(v) for v in (x0, y0, x1, y1))
        return cls.from_points([Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)])

    @cached_property
    def area(self) -> Fraction:
        return signed_area(self.vertices)

    @cached_property
    def centroid(self) -> Point:
        return vertex_centroid(self.vertices)

    @cached_property
    def bbox(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def edges(self) -> List[Segment]:
        n = len(self.vertices)
        return [Segment(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def edge_lines(self) -> List[Line]:
        return [e.line for e in self.edges()]

    def contains(self, p: Point, strict: bool = False) -> bool:
        n = len(self.vertices)
        for i in range(n):
            c = cross(self.vertices[i], self.vertices[(i + 1) % n], p)
            if c < 0 or (strict and c == 0):
                return False
        return True

    def has_edge(self, seg: Segment) -> bool:
        return any(e.same_as(seg) for e in self.edges())

    def bbox_overlaps(self, other: "ConvexRegion") -> bool:
        ax0, ay0, ax1, ay1 = self.bbox
        bx0, by0, bx1, by1 = other.bbox
        return ax0 < bx1 and bx0 < ax1 and ay0 < by1 and by0 < ay1

    def sort_key(self):
        return self.vertices


def convex_or_none(points: Iterable[Point]) -> Optional[ConvexRegion]:
    ring = _clean_ring(points)
    if len(ring) < 3:
        return None
    if signed_area(ring) <= 0:
        return None
    n = len(ring)
    for i in range(n):
        if cross(ring[i - 1], ring[i], ring[(i + 1) % n]) <= 0:
            raise DegenerateInput("頂點序列不是嚴格凸的逆時針多邊形")
    return ConvexRegion(_rotate_to_min(ring))


def _clip_keep_nonnegative(vertices: Sequence[Point], values: Sequence[Fraction]) -> List[Point]:
    # Sutherland–Hodgman 的單一半平面版本
    out: List[Point] = []
    n = len(vertices)
    for i in range(n):
        p, fp = vertices[i], values[i]
        q, fq = vertices[(i + 1) % n], values[(i + 1) % n]
        if fp >= 0:
            out.append(p)
        if (fp > 0 > fq) or (fp < 0 < fq):
            out.append(lerp(p, q, fp / (fp - fq)))
    return out


def _clip_with_values(region: ConvexRegion, values: List[Fraction]) -> Optional[ConvexRegion]:
    if all(v >= 0 for v in values):
        return region
    if all(v <= 0 for v in values):
        return None
    return convex_or_none(_clip_keep_nonnegative(region.vertices, values))


def clip_convex_by_halfplane(region: ConvexRegion, boundary: Line, keep_side: Side) -> Optional[ConvexRegion]:
    factor = 1 if keep_side is Side.LEFT else -1
    values = [factor * boundary.evaluate(v) for v in region.vertices]
    return _clip_with_values(region, values)


def clip_convex_directed(region: ConvexRegion, p: Point, q: Point, keep: Orientation = Orientation.CCW) -> Optional[ConvexRegion]:
    """保留有向直線 p→q 的左側（CCW）或右側（CW），含邊界。"""
    factor = 1 if keep is Orientation.CCW else -1
    values = [factor * cross(p, q, v) for v in region.vertices]
    return _clip_with_values(region, values)


def intersect_convex(a: ConvexRegion, b: ConvexRegion) -> Optional[ConvexRegion]:
    if not a.bbox_overlaps(b):
        return None
    result: Optional[ConvexRegion] = a
    for edge in b.edges():
        result = clip_convex_directed(result, edge.a, edge.b, Orientation.CCW)
        if result is None:
            return None
    return result


def split_convex(region: ConvexRegion, line: Line) -> Tuple[Optional[ConvexRegion], Optional[ConvexRegion]]:
    """以直線切開凸區域，回傳 (LEFT 部分, RIGHT 部分)。未穿過內部時其中一邊為 None。"""
    values = [line.evaluate(v) for v in region.vertices]
    if all(v >= 0 for v in values):
        return region, None
    if all(v <= 0 for v in values):
        return None, region
    left = convex_or_none(_clip_keep_nonnegative(region.vertices, values))
    right = convex_or_none(_clip_keep_nonnegative(region.vertices, [-v for v in values]))
    return left, right


# ---------------- 簡單多邊形 ----------------
@dataclass(frozen=True)
class SimplePolygon:
    """逆時針簡單多邊形（無洞）。請用 from_points 建立以完成驗證。"""

    vertices: Tuple[Point, ...]

    @classmethod
    def from_points(cls, points: Iterable[Point], auto_orient: bool = True) -> "SimplePolygon":
        pts = list(points)
        if len(pts) < 3:
            raise TooFewVertices(f"多邊形至少需要 3 個頂點，收到 {len(pts)} 個")
        if len(set(pts)) != len(pts):
            raise NotSimple("多邊形含重複頂點")
        _check_simple(pts)
        area = signed_area(pts)
        if area == 0:
            raise DegenerateInput("多邊形面積為 0")
        if area < 0:
            if not auto_orient:
                raise DegenerateInput("多邊形必須為逆時針方向")
            pts.reverse()
        return cls(tuple(pts))

    @cached_property
    def area(self) -> Fraction:
        return signed_area(self.vertices)

    @cached_property
    def bbox(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def edges(self) -> List[Segment]:
        n = self.n
        return [Segment(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def edge_lines(self) -> List[Line]:
        seen = []
        for e in self.edges():
            line = e.line
            if line not in seen:
                seen.append(line)
        return seen

    def on_boundary(self, p: Point) -> bool:
        n = self.n
        return any(point_on_segment(p, self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n))

    def contains(self, p: Point) -> bool:
        """閉集合包含（邊界上的點視為在內）。"""
        if self.on_boundary(p):
            return True
        inside = False
        n = self.n
        for i in range(n):
            a, b = self.vertices[i], self.vertices[(i + 1) % n]
            if (a.y > p.y) != (b.y > p.y):
                x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
                if p.x < x_cross:
                    inside = not inside
        return inside

    def is_reflex(self, i: int) -> bool:
        n = self.n
        return cross(self.vertices[i - 1], self.vertices[i], self.vertices[(i + 1) % n]) < 0

    def reflex_indices(self) -> List[int]:
        return [i for i in range(self.n) if self.is_reflex(i)]


def _check_simple(pts: List[Point]) -> None:
    n = len(pts)
    edges = [(pts[i], pts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        a, b = edges[i]
        for j in range(i + 1, n):
            c, d = edges[j]
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if adjacent:
                # 相鄰邊只允許共用一個端點，不可折返重疊
                shared = b if j == i + 1 else a
                other_i = a if shared == b else b
                other_j = d if shared == c else c
                if cross(shared, other_i, other_j) == 0 and (
                    point_on_segment(other_j, shared, other_i) or point_on_segment(other_i, shared, other_j)
                ):
                    raise NotSimple(f"相鄰邊重疊：{a}-{b} / {c}-{d}")
                continue
            if segments_intersect(a, b, c, d):
                raise NotSimple(f"邊 {a}-{b} 與 {c}-{d} 相交")


# ---------------- 直線排列 ----------------
def arrangement_faces(
    lines: Iterable[Line],
    clip: SimplePolygon,
    max_faces: Optional[int] = None,
) -> List[ConvexRegion]:
    """
    直線排列中位於 clip 內部的有界面。

    前提：clip 每一條邊的支撐直線都在 lines 中，因此排列的每個面不是完全在 clip
    內就是完全在外。先以邊線切開外框並丟掉外部面，再加入其餘直線。
    """
    line_set = set(lines)
    edge_lines = clip.edge_lines()
    missing = [l for l in edge_lines if l not in line_set]
    if missing:
        raise PreconditionViolated(f"缺少 {len(missing)} 條多邊形邊的支撐直線")

    x0, y0, x1, y1 = clip.bbox
    faces = [ConvexRegion.box(x0 - 1, y0 - 1, x1 + 1, y1 + 1)]
    for line in edge_lines:
        faces = _split_all(faces, line)
    faces = [f for f in faces if clip.contains(f.centroid)]

    edge_set = set(edge_lines)
    for line in sorted(line_set - edge_set):
        faces = _split_all(faces, line)
        if max_faces is not None and len(faces) > max_faces:
            raise CellBudgetExceeded(f"排列面數 {len(faces)} 超過上限 {max_faces}")
    faces.sort(key=ConvexRegion.sort_key)
    return faces


def _split_all(faces: List[ConvexRegion], line: Line) -> List[ConvexRegion]:
    out: List[ConvexRegion] = []
    for face in faces:
        left, right = split_convex(face, line)
        if left is not None:
            out.append(left)
        if right is not None:
            out.append(right)
    return out


def split_region_by_lines(region: ConvexRegion, lines: Iterable[Line]) -> List[ConvexRegion]:
    """以多條直線切開單一凸區域，回傳依頂點排序的面。"""
    faces = [region]
    for line in sorted(set(lines)):
        faces = _split_all(faces, line)
    faces.sort(key=ConvexRegion.sort_key)
    return faces


# ---------------- 射線 ----------------
def ray_segment_param(q: Point, dx: Fraction, dy: Fraction, a: Point, b: Point) -> Optional[Fraction]:
    """射線 q + t·(dx, dy)（t > 0）與閉線段 ab 的交點參數；平行時為 None。"""
    ex, ey = b.x - a.x, b.y - a.y
    denom = dx * ey - dy * ex
    if denom == 0:
        return None
    wx, wy = a.x - q.x, a.y - q.y
    t = (wx * ey - wy * ex) / denom
    u = (wx * dy - wy * dx) / denom
    if t > 0 and 0 <= u <= 1:
        return t
    return None


def first_boundary_hit(P: "SimplePolygon", q: Point, dx: Fraction, dy: Fraction) -> Optional[Tuple[Fraction, Segment]]:
    best: Optional[Tuple[Fraction, Segment]] = None
    for e in P.edges():
        t = ray_segment_param(q, dx, dy, e.a, e.b)
        if t is not None and (best is None or t < best[0]):
            best = (t, e)
    return best
