# services/polygon_io.py
"""多邊形文字檔讀取、語料庫存取、SVG 輸出。"""
from __future__ import annotations

import logging
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Union

from jinja2 import TemplateError

from app_utils import templates
from config import POLYGON_DIR, SETTINGS
from services.decomposition import ScRegion
from services.errors import ParseError, RenderError
from services.geometry_core import Point, SimplePolygon
from services.guarding import GuardingRegion

SVG_TEMPLATE = "gridguard/layout.svg.j2"
POLY_SUFFIX = ".poly"


# ---------------- 讀檔 ----------------
def _parse_scalar(token: str, line_no: int, column: int) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"無法解析數值 {token!r}", line_no, column) from None


def parse_polygon_text(text: str) -> SimplePolygon:
    points: List[Point] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        tokens = []
        pos = 0
        for tok in body.split():
            col = body.index(tok, pos)
            tokens.append((tok, col + 1))
            pos = col + len(tok)
        if len(tokens) != 2:
            column = tokens[2][1] if len(tokens) > 2 else len(body.rstrip()) + 1
            raise ParseError(f"每行需要 2 個座標，收到 {len(tokens)} 個", line_no, column)
        (tx, cx), (ty, cy) = tokens
        points.append(Point(_parse_scalar(tx, line_no, cx), _parse_scalar(ty, line_no, cy)))
    return SimplePolygon.from_points(points)


def parse_polygon(path: Union[str, Path]) -> SimplePolygon:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"無法讀取 {path}：{exc}") from exc
    polygon = parse_polygon_text(text)
    logging.info(f"讀入多邊形 {path.name}：{polygon.n} 個頂點")
    return polygon


def format_polygon(P: SimplePolygon) -> str:
    return "".join(f"{v.x} {v.y}\n" for v in P.vertices)


# ---------------- 語料庫 ----------------
def corpus_names(directory: Optional[Path] = None) -> List[str]:
    directory = Path(directory or POLYGON_DIR)
    return sorted(p.stem for p in directory.glob(f"*{POLY_SUFFIX}"))


def corpus_path(name: str, directory: Optional[Path] = None) -> Path:
    return Path(directory or POLYGON_DIR) / f"{name}{POLY_SUFFIX}"


def load_corpus(name: str, directory: Optional[Path] = None) -> SimplePolygon:
    return parse_polygon(corpus_path(name, directory))


# ---------------- SVG ----------------
def render_svg(
    P: SimplePolygon,
    cells: Sequence[ScRegion],
    grs: Sequence[GuardingRegion],
    guards: Sequence[Point],
    path: Optional[Union[str, Path]] = None,
) -> str:
    """
    圖層：guarding-region 填色（依 |VL| 深淺）→ cell 邊界 → 多邊形外框 → 守衛點。
    座標只在輸出時四捨五入到 svg.decimals 位。
    """
    svg_cfg = SETTINGS["svg"]
    x0, y0, x1, y1 = P.bbox
    span = max(x1 - x0, y1 - y0) or Fraction(1)
    pad = span / 20
    max_vl = max((len(gr.visible_list) for gr in grs), default=1)
    context = {
        "polygon": P,
        "cells": cells,
        "regions": [
            {"gr": gr, "opacity": Fraction(len(gr.visible_list), max_vl) * Fraction(3, 4) + Fraction(1, 10)}
            for gr in grs
        ],
        "guards": guards,
        "view": {"x": x0 - pad, "y": -(y1 + pad), "w": (x1 - x0) + 2 * pad, "h": (y1 - y0) + 2 * pad},
        "marker_r": span / 60,
        "width": svg_cfg["width"],
        "height": int(svg_cfg["width"] * ((y1 - y0) + 2 * pad) / ((x1 - x0) + 2 * pad)) or svg_cfg["width"],
        "digits": svg_cfg["decimals"],
    }
    try:
        svg = templates.env.get_template(SVG_TEMPLATE).render(**context)
    except TemplateError as exc:
        raise RenderError(f"SVG 模板錯誤：{exc}") from exc
    if path is not None:
        try:
            Path(path).write_text(svg, encoding="utf-8")
        except OSError as exc:
            raise RenderError(f"無法寫入 {path}：{exc}") from exc
        logging.info(f"SVG 已輸出：{path}")
    return svg
