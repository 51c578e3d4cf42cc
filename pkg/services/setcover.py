# services/setcover.py
"""
Step 4：set cover。ground = sc-region id，family = 每個 guarding-region 的 visible-list。

- greedy_cover：heap 版貪婪法（同 gain 取較小 gr id）
- exact_cover：bitmask branch-and-bound，先刪掉被支配的 family，再以 greedy 結果為初始上界
"""
from __future__ import annotations

import heapq as hq
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import ceil
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app_utils import ordered_map
from services.decomposition import ScRegion
from services.errors import BudgetExceeded, InfeasibleInstance
from services.geometry_core import Point, SimplePolygon
from services.guarding import GuardingRegion
from services.visibility import sees

DEFAULT_EXACT_BUDGET = 10_000_000
SAMPLE_LATTICE = 2**20


class SolverKind(str, Enum):
    GREEDY = "greedy"
    EXACT = "exact"
    BOTH = "both"


@dataclass(frozen=True)
class SetCoverInstance:
    ground: FrozenSet[int]
    families: Tuple[Tuple[int, FrozenSet[int]], ...]
    anchors: Dict[int, Point] = field(default_factory=dict, compare=False, hash=False)

    @classmethod
    def of(cls, ground: Iterable[int], families: Iterable[Tuple[int, Iterable[int]]], anchors: Optional[Dict[int, Point]] = None) -> "SetCoverInstance":
        return cls(
            ground=frozenset(ground),
            families=tuple((gid, frozenset(vl)) for gid, vl in families),
            anchors=dict(anchors or {}),
        )

    @property
    def m(self) -> int:
        return len(self.ground)

    def family(self, gr_id: int) -> FrozenSet[int]:
        for gid, vl in self.families:
            if gid == gr_id:
                return vl
        raise KeyError(gr_id)

    def union_of(self, chosen: Iterable[int]) -> FrozenSet[int]:
        lookup = dict(self.families)
        out = set()
        for gid in chosen:
            out |= lookup[gid]
        return frozenset(out & self.ground)


@dataclass(frozen=True)
class GuardSolution:
    chosen: Tuple[int, ...]
    guards: Tuple[Point, ...]
    covered: FrozenSet[int]
    solver: SolverKind

    @property
    def size(self) -> int:
        return len(self.chosen)


def _solution(inst: SetCoverInstance, chosen: Iterable[int], solver: SolverKind) -> GuardSolution:
    chosen = tuple(sorted(chosen))
    guards = tuple(inst.anchors[g] for g in chosen if g in inst.anchors)
    return GuardSolution(chosen=chosen, guards=guards, covered=inst.union_of(chosen), solver=solver)


def harmonic(m: int) -> Fraction:
    """H(m) = Σ_{i=1..m} 1/i"""
    return sum((Fraction(1, i) for i in range(1, m + 1)), Fraction(0))


def greedy_bound_holds(greedy_size: int, exact_size: int, m: int) -> bool:
    return greedy_size <= ceil(harmonic(m)) * exact_size


def is_valid_cover(inst: SetCoverInstance, chosen: Iterable[int]) -> bool:
    return inst.union_of(chosen) == inst.ground


# ---------------- 建立實例 ----------------
def build_instance(cells: Sequence[ScRegion], grs: Sequence[GuardingRegion]) -> SetCoverInstance:
    inst = SetCoverInstance.of(
        ground=(c.id for c in cells),
        families=((gr.id, gr.visible_list) for gr in grs),
        anchors={gr.id: gr.anchor for gr in grs},
    )
    check_feasible(inst)
    logging.info(f"set cover：m={inst.m}，{len(inst.families)} 個 family")
    return inst


def check_feasible(inst: SetCoverInstance) -> None:
    union = set()
    for _, vl in inst.families:
        union |= vl
    missing = inst.ground - union
    if missing:
        raise InfeasibleInstance(f"visible-list 聯集缺少 sc-region {sorted(missing)[:10]}")


# ---------------- greedy ----------------
def greedy_cover(inst: SetCoverInstance) -> GuardSolution:
    uncovered = set(inst.ground)
    # (−gain, gr id)：python heap 只有最小堆，用負號讓 gain 最大者在頂端
    heap = [(-len(vl & uncovered), gid, vl) for gid, vl in inst.families]
    hq.heapify(heap)
    chosen: List[int] = []
    while uncovered:
        if not heap:
            raise InfeasibleInstance(f"仍有 {len(uncovered)} 個 sc-region 無法覆蓋")
        neg_gain, gid, vl = hq.heappop(heap)
        gain = len(vl & uncovered)
        if gain == 0:
            continue
        if gain != -neg_gain:
            hq.heappush(heap, (-gain, gid, vl))
            continue
        chosen.append(gid)
        uncovered -= vl
    return _solution(inst, chosen, SolverKind.GREEDY)


# ---------------- exact ----------------
def _reduced_masks(inst: SetCoverInstance) -> Tuple[List[int], List[Tuple[int, int]]]:
    """ground → bit；刪除空集合、重複與被支配的 family（保留較小 gr id）。"""
    elements = sorted(inst.ground)
    bit = {e: 1 << i for i, e in enumerate(elements)}
    by_mask: Dict[int, int] = {}
    for gid, vl in sorted(inst.families, key=lambda f: f[0]):
        mask = 0
        for e in vl:
            mask |= bit.get(e, 0)
        if mask and mask not in by_mask:
            by_mask[mask] = gid
    # 大集合優先；只保留不是既有集合子集的 mask
    ordered = sorted(by_mask.items(), key=lambda kv: (-bin(kv[0]).count("1"), kv[1]))
    kept: List[Tuple[int, int]] = []
    for mask, gid in ordered:
        if any(mask & big == mask for big, _ in kept):
            continue
        kept.append((mask, gid))
    return elements, kept


def exact_cover(inst: SetCoverInstance, budget: int = DEFAULT_EXACT_BUDGET) -> GuardSolution:
    elements, fams = _reduced_masks(inst)
    full = (1 << len(elements)) - 1
    covering: Dict[int, List[int]] = {}
    for idx, (mask, _) in enumerate(fams):
        for i in range(len(elements)):
            if mask >> i & 1:
                covering.setdefault(i, []).append(idx)

    seed = greedy_cover(inst)
    best: List[int] = list(seed.chosen)
    nodes = 0

    def dfs(uncovered: int, picked: List[int]) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > budget:
            logging.warning(f"exact_cover：搜尋超過 {budget} 個節點")
            raise BudgetExceeded(f"exact_cover 搜尋超過 {budget} 個節點")
        if uncovered == 0:
            if len(picked) < len(best):
                best = [fams[i][1] for i in picked]
            return
        remaining = bin(uncovered).count("1")
        largest = max(bin(m & uncovered).count("1") for m, _ in fams)
        if len(picked) + ceil(remaining / largest) >= len(best):
            return
        # 分支在覆蓋者最少的元素上
        pivot = min(
            (i for i in range(len(elements)) if uncovered >> i & 1),
            key=lambda i: (len(covering.get(i, [])), i),
        )
        options = sorted(
            covering.get(pivot, []),
            key=lambda idx: (-bin(fams[idx][0] & uncovered).count("1"), fams[idx][1]),
        )
        for idx in options:
            picked.append(idx)
            dfs(uncovered & ~fams[idx][0], picked)
            picked.pop()

    dfs(full, [])
    logging.info(f"exact_cover：最佳 {len(best)}（greedy {seed.size}），{nodes} 個節點")
    return _solution(inst, best, SolverKind.EXACT)


# ---------------- 覆蓋驗證 ----------------
@dataclass(frozen=True)
class CoverageReport:
    samples: int
    covered: int
    witnesses: Tuple[Point, ...]

    @property
    def coverage(self) -> float:
        return 1.0 if self.samples == 0 else self.covered / self.samples


def sample_polygon(P: SimplePolygon, count: int, seed: int) -> List[Point]:
    """bounding box 內以 2^20 格點拒絕取樣，座標維持有理數。"""
    rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = P.bbox
    out: List[Point] = []
    while len(out) < count:
        draws = rng.integers(0, SAMPLE_LATTICE + 1, size=(max(64, 2 * (count - len(out))), 2))
        for i, j in draws:
            p = Point(x0 + (x1 - x0) * Fraction(int(i), SAMPLE_LATTICE), y0 + (y1 - y0) * Fraction(int(j), SAMPLE_LATTICE))
            if P.contains(p):
                out.append(p)
                if len(out) == count:
                    break
    return out


def verify_cover(
    P: SimplePolygon,
    guards: Sequence[Point],
    samples: int,
    seed: int,
    threads: int = 1,
    max_witnesses: int = 20,
) -> CoverageReport:
    points = sample_polygon(P, samples, seed)
    seen = ordered_map(lambda x: any(sees(P, g, x) for g in guards), points, threads)
    witnesses = tuple(p for p, ok in zip(points, seen) if not ok)
    report = CoverageReport(samples=len(points), covered=sum(seen), witnesses=witnesses[:max_witnesses])
    if witnesses:
        logging.warning(f"verify_cover：{len(witnesses)}/{len(points)} 個樣本未被看見")
    return report
