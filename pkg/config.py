# config.py
from __future__ import annotations

import os
from copy import deepcopy
from pathlib import Path

import yaml
from dotenv import load_dotenv

# 專案根目錄
BASE_DIR = Path(__file__).resolve().parent

# 資料夾路徑
DATA_DIR = BASE_DIR / "data"
POLYGON_DIR = DATA_DIR / "polygons"
TEMPLATE_DIR = BASE_DIR / "templates"
CONFIG_DIR = BASE_DIR / "config"

load_dotenv()

DEFAULT_SETTINGS = {
    "decomposition": {
        "strategy": "trapezoid",
        "k": 0,
        "grid_resolution": 4,
        "max_cells": 50_000,
    },
    "solver": "greedy",
    "verify_samples": 0,
    "seed": 0,
    "exact_budget": 10_000_000,
    "threads": 1,
    "oracle": {"per_cell_samples": 50, "pair_samples": 20, "nudge": "1/1024"},
    "svg": {"width": 640, "padding": 20, "decimals": 6},
    "logs": {"level": "INFO"},
}


# ---- 讀檔 + 深度合併（忽略 None，不覆蓋預設結構）----
def _load_yaml(p: Path) -> dict:
    try:
        if p.exists():
            obj = yaml.safe_load(p.read_text(encoding="utf-8"))
            return obj or {}
    except (OSError, yaml.YAMLError):
        pass
    return {}


def _deep_merge(base: dict, override: dict) -> dict:
    res = deepcopy(base)
    if not isinstance(override, dict):
        return res
    for k, v in override.items():
        if v is None:
            # 忽略 None，保留預設
            continue
        if isinstance(v, dict) and isinstance(res.get(k), dict):
            res[k] = _deep_merge(res.get(k, {}), v)
        else:
            res[k] = v
    return res


def load_settings(path: os.PathLike | str | None = None) -> dict:
    settings_file = Path(path or os.getenv("GRIDGUARD_SETTINGS") or CONFIG_DIR / "gridguard_settings.yml")
    settings = _deep_merge(DEFAULT_SETTINGS, _load_yaml(settings_file))
    threads = os.getenv("GRIDGUARD_THREADS")
    if threads:
        try:
            settings["threads"] = max(1, int(threads))
        except ValueError:
            pass
    return settings


SETTINGS = load_settings()
