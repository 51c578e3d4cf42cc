# cli.py
"""
命令列入口：
  python cli.py run --input data/polygons/lshape.poly --solver both --verify-samples 10000
  python cli.py corpus --strategy trapezoid --csv ratios.csv
  python cli.py serve --port 8000
"""
from __future__ import annotations

import logging
import sys

import click

from config import SETTINGS, load_settings
from services.decomposition import Strategy
from services.errors import GridGuardError
from services.pipeline import RunConfig, check_coverage, corpus_table, run

STRATEGIES = [s.value for s in Strategy]
SOLVERS = ["greedy", "exact", "both"]


def _setup_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )


def _fail(exc: GridGuardError) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(exc.exit_code)


def _crash(exc: Exception) -> None:
    # 非預期的例外一律當作內部錯誤
    logging.exception(f"未預期的錯誤：{exc!r}")
    click.echo(f"error: [internal] {exc!r}", err=True)
    sys.exit(GridGuardError.exit_code)


@click.group()
@click.option("--settings", "settings_path", type=click.Path(dir_okay=False), default=None, help="YAML 設定檔")
@click.option("--log-level", default=None, help="DEBUG / INFO / WARNING")
@click.pass_context
def cli(ctx: click.Context, settings_path, log_level):
    settings = load_settings(settings_path) if settings_path else SETTINGS
    _setup_logging(log_level or settings["logs"]["level"])
    ctx.obj = settings


@cli.command("run")
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False))
@click.option("--strategy", type=click.Choice(STRATEGIES), default=None)
@click.option("--k", type=int, default=None)
@click.option("--grid-res", "grid_resolution", type=int, default=None)
@click.option("--solver", type=click.Choice(SOLVERS), default=None)
@click.option("--verify-samples", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--svg", "svg_out", type=click.Path(dir_okay=False), default=None)
@click.option("--json", "json_out", type=click.Path(dir_okay=False), default=None)
@click.option("--max-cells", type=int, default=None)
@click.option("--exact-budget", type=int, default=None)
@click.option("--no-timings", is_flag=True, help="stage_ms 輸出為 {}，報表可逐位元比對")
@click.pass_obj
def run_command(settings, input_path, no_timings, **options):
    """對單一多邊形執行完整流程，報表（JSON）印到 stdout。"""
    try:
        config = RunConfig.from_settings(settings, input=input_path, timings=not no_timings, **options)
        report = run(config)
        click.echo(report.to_json(), nl=False)
        check_coverage(report)
    except GridGuardError as exc:
        _fail(exc)
    except Exception as exc:
        _crash(exc)


@cli.command("corpus")
@click.option("--strategy", type=click.Choice(STRATEGIES), default="trapezoid")
@click.option("--k", type=int, default=0)
@click.option("--verify-samples", type=int, default=0)
@click.option("--seed", type=int, default=0)
@click.option("--name", "names", multiple=True, help="只跑指定的語料（可重複）")
@click.option("--csv", "csv_out", type=click.Path(dir_okay=False), default=None)
def corpus_command(strategy, k, verify_samples, seed, names, csv_out):
    """整個語料庫跑 greedy + exact，輸出比值表。"""
    try:
        df = corpus_table(Strategy(strategy), names or None, verify_samples, seed, k)
    except GridGuardError as exc:
        _fail(exc)
        return
    except Exception as exc:
        _crash(exc)
        return
    click.echo(df.to_string(index=False))
    if csv_out:
        df.to_csv(csv_out, index=False, encoding="utf-8-sig")
        click.echo(f"已輸出 {csv_out}")
    if not df.empty and not df["bound_ok"].all():
        click.echo("greedy 超出 H(m) 上界", err=True)
        sys.exit(5)
    if verify_samples and not df.empty and (df["coverage"] < 1.0).any():
        sys.exit(4)


@cli.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve_command(host, port):
    """以 uvicorn 啟動 HTTP 介面。"""
    import uvicorn

    uvicorn.run("main:app", host=host, port=port)


if __name__ == "__main__":
    cli()
