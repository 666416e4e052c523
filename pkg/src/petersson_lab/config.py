"""実行環境の設定：.env から PETERSSON_* を読み込んで検証する"""

import os
from fractions import Fraction
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, field_validator

_LOG_LEVELS = {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}


class Settings(BaseModel):
    """アプリケーション設定"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    log_level: str = "INFO"
    # 指定すると DEBUG 以上のログをこのファイルにも書く
    log_file: Path | None = None
    cache_dir: Path = Path(".petersson-cache")
    # 非対角項評価の暗黙の絶対定数。値は未知なので 1 を既定とする
    error_constant: float = 1.0
    # 形式次数 d_κ の正規化定数 a の上書き（None なら Haar 測度正規化の既定値）
    formal_degree_constant: Fraction | None = None
    # 剰余和オラクルで許す格子点数の上限
    oracle_max_cells: int = 200_000_000

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in _LOG_LEVELS:
            raise ValueError(
                f"ログレベルが不正です: {v}\n"
                f"  → {', '.join(sorted(_LOG_LEVELS))} のいずれかを指定してください"
            )
        return level

    @field_validator("error_constant")
    @classmethod
    def validate_error_constant(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("PETERSSON_ERROR_CONSTANT は正の数である必要があります")
        return v

    @field_validator("formal_degree_constant")
    @classmethod
    def validate_formal_degree_constant(cls, v: Fraction | None) -> Fraction | None:
        if v is not None and v <= 0:
            raise ValueError("PETERSSON_FORMAL_DEGREE_CONSTANT は正の有理数である必要があります")
        return v

    @field_validator("oracle_max_cells")
    @classmethod
    def validate_oracle_max_cells(cls, v: int) -> int:
        if v < 1:
            raise ValueError("PETERSSON_ORACLE_MAX_CELLS は 1 以上である必要があります")
        return v

    @property
    def lvalue_cache_path(self) -> Path:
        """正規化 L 値キャッシュのパス"""
        return self.cache_dir / "lvalues.json"

    @property
    def character_cache_path(self) -> Path:
        """Weyl 指標表キャッシュのパス"""
        return self.cache_dir / "characters.json"


def load_settings(env_path: str | None = None) -> Settings:
    """設定を .env から読み込んで返す"""
    if env_path:
        load_dotenv(env_path, override=True)
    else:
        load_dotenv(override=True)

    fd_const = os.getenv("PETERSSON_FORMAL_DEGREE_CONSTANT") or None
    log_file = os.getenv("PETERSSON_LOG_FILE") or None
    return Settings(
        log_level=os.getenv("PETERSSON_LOG_LEVEL", "INFO"),
        log_file=Path(log_file) if log_file else None,
        cache_dir=Path(os.getenv("PETERSSON_CACHE_DIR", ".petersson-cache")),
        error_constant=float(os.getenv("PETERSSON_ERROR_CONSTANT", "1.0")),
        formal_degree_constant=Fraction(fd_const) if fd_const else None,
        oracle_max_cells=int(os.getenv("PETERSSON_ORACLE_MAX_CELLS", "200000000")),
    )
