# services/errors.py
from __future__ import annotations

from typing import Optional


# ---- 例外階層：exit_code 對應 CLI 結束碼 ----
class GridGuardError(Exception):
    """所有求解流程錯誤的基底類別。stage 由 pipeline 在重新拋出時填入。"""

    exit_code = 5
    kind = "internal"

    def __init__(self, message: str = "", stage: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.stage = stage

    def with_stage(self, stage: str) -> "GridGuardError":
        if not self.stage:
            self.stage = stage
        return self

    def __str__(self) -> str:
        if self.stage:
            return f"[{self.stage}] {self.message}"
        return self.message


# ---- 輸入 / 驗證（exit 2）----
class ValidationFailure(GridGuardError):
    exit_code = 2
    kind = "validation"


class ParseError(ValidationFailure):
    kind = "parse"

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class NotSimple(ValidationFailure):
    kind = "not_simple"


class TooFewVertices(ValidationFailure):
    kind = "too_few_vertices"


class ConfigError(ValidationFailure):
    kind = "config"


class DegenerateInput(ValidationFailure):
    kind = "degenerate"


class InputOutsidePolygon(ValidationFailure):
    kind = "outside"


class SegmentOutsidePolygon(ValidationFailure):
    kind = "segment_outside"


# ---- 預算（exit 3）----
class CellBudgetExceeded(GridGuardError):
    exit_code = 3
    kind = "cell_budget"


class BudgetExceeded(GridGuardError):
    exit_code = 3
    kind = "search_budget"


# ---- 覆蓋驗證（exit 4）----
class CoverageFailure(GridGuardError):
    exit_code = 4
    kind = "coverage"


# ---- 內部不變量（exit 5）----
class PreconditionViolated(GridGuardError):
    kind = "precondition"


class EdgeNotOnSource(GridGuardError):
    kind = "edge_not_on_source"


class TsrSourceMismatch(GridGuardError):
    kind = "tsr_source_mismatch"


class InfeasibleInstance(GridGuardError):
    kind = "infeasible"


class RenderError(GridGuardError):
    kind = "io"


def validated(model_cls, data: dict):
    """以 pydantic 模型驗證設定；失敗時轉成 ConfigError（exit 2）。"""
    from pydantic import ValidationError

    try:
        return model_cls.model_validate(data)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()
        )
        raise ConfigError(f"設定不合法：{problems}") from exc
