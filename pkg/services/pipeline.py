# services/pipeline.py
"""
整體流程（Point Guarding）：
  1. build_sc_regions           → SCR
  2. temp_sub_regions_for_cell  → tsr
  3. build_all_guarding_regions → S = (gr, VL)
  4. build_instance + solver    → guards
之後可選擇 verify_cover、SVG、JSON。
"""
from __future__ import annotations

import json
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass
from math import ceil
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Union

import pandas as pd
from pydantic import BaseModel, Field

from app_utils import fraction_to_decimal
from config import SETTINGS
from services.decomposition import DecompositionConfig, ScRegion, Strategy, build_sc_regions
from services.errors import ConfigError, CoverageFailure, GridGuardError, validated
from services.geometry_core import SimplePolygon
from services.guarding import GuardingRegion, TempSubRegion, all_temp_sub_regions, build_all_guarding_regions
from services.polygon_io import corpus_names, load_corpus, parse_polygon, render_svg
from services.setcover import (
    CoverageReport,
    GuardSolution,
    SetCoverInstance,
    SolverKind,
    build_instance,
    exact_cover,
    greedy_cover,
    harmonic,
    verify_cover,
)


class RunConfig(BaseModel):
    input: Optional[Path] = None
    strategy: Strategy = Strategy.TRAPEZOID
    k: int = Field(default=0, ge=0, le=3)
    grid_resolution: int = Field(default=4, ge=1)
    solver: SolverKind = SolverKind.GREEDY
    verify_samples: int = Field(default=0, ge=0)
    seed: int = 0
    svg_out: Optional[Path] = None
    json_out: Optional[Path] = None
    max_cells: int = Field(default=50_000, ge=1)
    exact_budget: int = Field(default=10_000_000, ge=1)
    threads: int = Field(default=1, ge=1)
    timings: bool = True

    @classmethod
    def from_settings(cls, settings: Optional[dict] = None, **overrides) -> "RunConfig":
        s = settings or SETTINGS
        dec = s.get("decomposition", {})
        data = {
            "strategy": dec.get("strategy"),
            "k": dec.get("k"),
            "grid_resolution": dec.get("grid_resolution"),
            "max_cells": dec.get("max_cells"),
            "solver": s.get("solver"),
            "verify_samples": s.get("verify_samples"),
            "seed": s.get("seed"),
            "exact_budget": s.get("exact_budget"),
            "threads": s.get("threads"),
        }
        data.update({k: v for k, v in overrides.items() if v is not None})
        return validated(cls, {k: v for k, v in data.items() if v is not None})

    @property
    def decomposition(self) -> DecompositionConfig:
        return DecompositionConfig(
            strategy=self.strategy, k=self.k, grid_resolution=self.grid_resolution, max_cells=self.max_cells
        )


class RunReport(BaseModel):
    n: int
    scr_count: int
    tsr_count: int
    gr_count: int
    solver: SolverKind
    guard_count: Union[int, Dict[str, int]]
    ratio: Optional[float] = None
    guards: List[List[str]]
    coverage: Optional[float] = None
    stage_ms: Dict[str, float] = {}

    def to_json(self) -> str:
        # 固定欄位順序
        data = {
            "n": self.n,
            "scr_count": self.scr_count,
            "tsr_count": self.tsr_count,
            "gr_count": self.gr_count,
            "solver": self.solver.value,
            "guard_count": self.guard_count,
        }
        if self.ratio is not None:
            data["ratio"] = self.ratio
        data["guards"] = self.guards
        data["coverage"] = self.coverage
        data["stage_ms"] = self.stage_ms
        return json.dumps(data, ensure_ascii=False, indent=2) + "\n"


@dataclass
class RunResult:
    polygon: SimplePolygon
    cells: List[ScRegion]
    tsrs: Dict[int, List[TempSubRegion]]
    grs: List[GuardingRegion]
    instance: SetCoverInstance
    solutions: Dict[str, GuardSolution]
    coverage: Optional[CoverageReport]
    report: RunReport
    svg: Optional[str] = None

    @property
    def final(self) -> GuardSolution:
        return self.solutions.get("exact") or self.solutions["greedy"]


# ---- 分段計時 + 錯誤標記 ----
@contextmanager
def _stage(name: str, timings: Dict[str, float]) -> Iterator[None]:
    logging.info(f"[{name}] 開始")
    start = time.perf_counter()
    try:
        yield
    except GridGuardError as exc:
        logging.error(f"[{name}] 失敗：{exc.message}")
        raise exc.with_stage(name)
    finally:
        timings[name] = round((time.perf_counter() - start) * 1000, 3)
    logging.info(f"[{name}] 完成，{timings[name]} ms")


def solve(P: SimplePolygon, config: RunConfig, render: bool = False) -> RunResult:
    timings: Dict[str, float] = {}

    with _stage("decompose", timings):
        cells = build_sc_regions(P, config.decomposition)
    with _stage("tsr", timings):
        tsrs = all_temp_sub_regions(P, cells, config.threads)
    with _stage("guarding", timings):
        grs = build_all_guarding_regions(P, cells, tsrs, config.threads)
    with _stage("setcover", timings):
        inst = build_instance(cells, grs)
        solutions: Dict[str, GuardSolution] = {}
        if config.solver in (SolverKind.GREEDY, SolverKind.BOTH):
            solutions["greedy"] = greedy_cover(inst)
        if config.solver in (SolverKind.EXACT, SolverKind.BOTH):
            solutions["exact"] = exact_cover(inst, config.exact_budget)
    final = solutions.get("exact") or solutions["greedy"]

    coverage: Optional[CoverageReport] = None
    if config.verify_samples > 0:
        with _stage("verify", timings):
            coverage = verify_cover(P, final.guards, config.verify_samples, config.seed, config.threads)

    svg = None
    if render or config.svg_out is not None:
        with _stage("render", timings):
            svg = render_svg(P, cells, grs, final.guards, config.svg_out)

    if config.solver is SolverKind.BOTH:
        g, e = solutions["greedy"].size, solutions["exact"].size
        guard_count: Union[int, Dict[str, int]] = {"greedy": g, "exact": e}
        ratio: Optional[float] = g / e if e else 1.0
    else:
        guard_count, ratio = final.size, None

    report = RunReport(
        n=P.n,
        scr_count=len(cells),
        tsr_count=sum(len(v) for v in tsrs.values()),
        gr_count=len(grs),
        solver=config.solver,
        guard_count=guard_count,
        ratio=ratio,
        guards=[[fraction_to_decimal(g.x), fraction_to_decimal(g.y)] for g in final.guards],
        coverage=coverage.coverage if coverage is not None else None,
        stage_ms=timings if config.timings else {},
    )
    return RunResult(P, cells, tsrs, grs, inst, solutions, coverage, report, svg)


def run(config: RunConfig) -> RunReport:
    if config.input is None:
        raise ConfigError("缺少輸入檔（--input）", stage="parse")
    timings: Dict[str, float] = {}
    with _stage("parse", timings):
        P = parse_polygon(config.input)
    result = solve(P, config)
    report = result.report
    if config.timings:
        report = report.model_copy(update={"stage_ms": {**timings, **report.stage_ms}})
    if config.json_out is not None:
        try:
            Path(config.json_out).write_text(report.to_json(), encoding="utf-8")
        except OSError as exc:
            raise GridGuardError(f"無法寫入 {config.json_out}：{exc}", stage="report") from exc
    return report


def check_coverage(report: RunReport) -> None:
    if report.coverage is not None and report.coverage < 1.0:
        logging.warning(f"覆蓋率 {report.coverage:.6f} < 1.0")
        raise CoverageFailure(f"覆蓋率 {report.coverage:.6f} 未達 1.0", stage="verify")


# ---- 語料庫摘要表 ----
def corpus_table(
    strategy: Strategy = Strategy.TRAPEZOID,
    names: Optional[Sequence[str]] = None,
    verify_samples: int = 0,
    seed: int = 0,
    k: int = 0,
    directory: Optional[Path] = None,
) -> pd.DataFrame:
    rows = []
    for name in names or corpus_names(directory):
        P = load_corpus(name, directory)
        cfg = RunConfig.from_settings(
            strategy=strategy, k=k, solver=SolverKind.BOTH, verify_samples=verify_samples, seed=seed
        )
        result = solve(P, cfg)
        rep = result.report
        g, e = rep.guard_count["greedy"], rep.guard_count["exact"]
        h_bound = ceil(harmonic(rep.scr_count))
        rows.append({
            "name": name,
            "n": rep.n,
            "scr": rep.scr_count,
            "tsr": rep.tsr_count,
            "gr": rep.gr_count,
            "greedy": g,
            "exact": e,
            "ratio": rep.ratio,
            "h_bound": h_bound,
            "bound_ok": g <= h_bound * e,
            "coverage": rep.coverage,
            **{f"{stage}_ms": ms for stage, ms in rep.stage_ms.items()},
        })
    return pd.DataFrame(rows)
