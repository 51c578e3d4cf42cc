# routers/guarding_router.py
from __future__ import annotations

import logging
from typing import List, Optional

from fastapi import APIRouter, HTTPException, Request
from fastapi.responses import HTMLResponse, JSONResponse, Response
from pydantic import BaseModel, Field

from app_utils import templates
from services.decomposition import Strategy
from services.errors import ParseError
from services.geometry_core import Point, SimplePolygon
from services.pipeline import RunConfig, solve
from services.polygon_io import corpus_names, corpus_path, load_corpus
from services.setcover import SolverKind

router = APIRouter(prefix="/guarding", tags=["guarding"])


# ---- 請求模型 ----
class SolveBody(BaseModel):
    # 座標可用字串（"1/3"、"0.1"）保持精確
    vertices: List[List[str]] = Field(..., min_length=3)
    strategy: Strategy = Strategy.TRAPEZOID
    k: int = Field(default=0, ge=0, le=3)
    grid_resolution: int = Field(default=4, ge=1)
    solver: SolverKind = SolverKind.GREEDY
    verify_samples: int = Field(default=0, ge=0, le=100_000)
    seed: int = 0


def _polygon_from(body: SolveBody) -> SimplePolygon:
    points = []
    for i, pair in enumerate(body.vertices, start=1):
        if len(pair) != 2:
            raise ParseError("每個頂點需要 2 個座標", i, 1)
        try:
            points.append(Point.of(pair[0], pair[1]))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"無法解析頂點 {pair}", i, 1) from None
    return SimplePolygon.from_points(points)


def _config_from(body: SolveBody) -> RunConfig:
    return RunConfig.from_settings(
        strategy=body.strategy,
        k=body.k,
        grid_resolution=body.grid_resolution,
        solver=body.solver,
        verify_samples=body.verify_samples,
        seed=body.seed,
        timings=False,
    )


# ---- API ----
@router.post("/api/solve")
def api_solve(body: SolveBody):
    P = _polygon_from(body)
    result = solve(P, _config_from(body))
    logging.info(f"/guarding/api/solve：n={P.n}，{result.report.guard_count} 個守衛")
    return JSONResponse(result.report.model_dump(mode="json"))


@router.post("/api/svg")
def api_svg(body: SolveBody):
    P = _polygon_from(body)
    result = solve(P, _config_from(body), render=True)
    return Response(content=result.svg, media_type="image/svg+xml")


@router.get("/api/corpus")
async def api_corpus():
    return {"polygons": corpus_names()}


@router.get("/view/{name}", response_class=HTMLResponse)
def view_polygon(
    request: Request,
    name: str,
    strategy: Strategy = Strategy.TRAPEZOID,
    solver: SolverKind = SolverKind.GREEDY,
    k: int = 0,
    grid_resolution: Optional[int] = None,
):
    if name not in corpus_names() or not corpus_path(name).exists():
        raise HTTPException(status_code=404, detail=f"找不到多邊形 {name}")
    P = load_corpus(name)
    cfg = RunConfig.from_settings(strategy=strategy, solver=solver, k=k, grid_resolution=grid_resolution, timings=False)
    result = solve(P, cfg, render=True)
    ctx = {
        "request": request,
        "name": name,
        "report": result.report,
        "svg": result.svg,
    }
    return templates.TemplateResponse(request, "gridguard/view.html", ctx)
