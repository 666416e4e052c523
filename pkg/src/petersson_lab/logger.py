"""loguru の出力先と、計算の進み具合を記録する短い関数"""

import sys
import time
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

from loguru import logger

_CONSOLE_FORMAT = (
    "<green>{elapsed}</green> | <level>{level: <8}</level> | "
    "<cyan>{module}</cyan>{extra[stage]} | {message}"
)
_FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {module}{extra[stage]} | {message}"


def setup_logger(level: str = "INFO", log_file: Path | None = None) -> None:
    """標準エラーに level 以上を出し、log_file があれば DEBUG 以上をファイルにも残す"""
    logger.remove()
    logger.configure(extra={"stage": ""})
    logger.add(sys.stderr, format=_CONSOLE_FORMAT, level=level, colorize=True)
    if log_file is not None:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        logger.add(log_file, format=_FILE_FORMAT, level="DEBUG", rotation="10 MB", encoding="utf-8")


@contextmanager
def stage(name: str) -> Iterator[dict]:
    """ブロック内のログに [name] を付け、経過秒を timing["seconds"] に入れる"""
    timing = {"seconds": 0.0}
    start = time.perf_counter()
    with logger.contextualize(stage=f"[{name}]"):
        try:
            yield timing
        finally:
            timing["seconds"] = time.perf_counter() - start


def step(message: str) -> None:
    logger.info(f"▶ {message}")


def detail(message: str) -> None:
    """列挙の規模・オラクルの法・キャッシュ命中など"""
    logger.debug(message)


def success(message: str) -> None:
    logger.success(f"✓ {message}")


def warn(message: str) -> None:
    logger.warning(f"⚠ {message}")


def error(message: str) -> None:
    logger.error(f"✗ {message}")
