import logging

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, RedirectResponse

from routers.guarding_router import router as guarding_router
from services.errors import GridGuardError

# --- App 初始化 ---
app = FastAPI(title="GridGuard 點守衛求解器")

_STATUS_BY_EXIT = {2: 400, 3: 422, 4: 422, 5: 500}


# 求解流程錯誤：依 exit code 對應 HTTP 狀態
@app.exception_handler(GridGuardError)
async def gridguard_exception_handler(request: Request, exc: GridGuardError):
    status = _STATUS_BY_EXIT.get(exc.exit_code, 500)
    if status >= 500:
        logging.error(f"{request.url.path}：{exc}")
    else:
        logging.warning(f"{request.url.path}：{exc}")
    return JSONResponse(
        status_code=status,
        content={"detail": exc.message, "stage": exc.stage, "kind": exc.kind},
    )


@app.get("/")
async def root():
    return RedirectResponse(url="/guarding/api/corpus")


@app.get("/healthz")
async def healthz():
    return {"status": "ok"}


app.include_router(guarding_router)
