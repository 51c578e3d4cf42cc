from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Iterable, List, TypeVar

from fastapi.templating import Jinja2Templates

from config import SETTINGS, TEMPLATE_DIR

T = TypeVar("T")
R = TypeVar("R")


# --- 數字格式 ---
def fraction_to_decimal(value: Fraction, digits: int = 6) -> str:
    """有理數 → 固定小數位字串（只供顯示與報表，不回流計算）。"""
    scaled = int(round(Fraction(value) * 10**digits))
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**digits)
    if digits == 0 or frac == 0:
        return f"{sign}{whole}" if whole or frac else "0"
    return f"{sign}{whole}.{str(frac).zfill(digits).rstrip('0')}"


def number_format_filter(value, digits: int = 6):
    """SVG 座標用：Fraction/int/float → 最多 digits 位小數"""
    try:
        return fraction_to_decimal(Fraction(value), int(digits))
    except (ValueError, TypeError):
        return value


def percent_filter(value):
    """將數字轉換為百分比格式的字串，例如 0.95 -> '95.00%'"""
    try:
        return "{:.2%}".format(float(value))
    except (ValueError, TypeError):
        return value


# --- 模板引擎設定 ---
templates = Jinja2Templates(directory=str(TEMPLATE_DIR))
templates.env.filters["number"] = number_format_filter
templates.env.filters["percent"] = percent_filter


# --- 平行處理：輸出順序固定為輸入順序 ---
def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> List[R]:
    items = list(items)
    workers = threads if threads is not None else int(SETTINGS.get("threads", 1))
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    logging.debug(f"ordered_map：{len(items)} 項，{workers} 執行緒")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
