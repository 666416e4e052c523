"""ジョブ設定ローダ：jobs/*.yml（JSON も可）を読み込んで検証する"""

from pathlib import Path
from typing import Literal

import sympy
import yaml
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from ..errors import ConfigError
from ..geom_side import SimilitudeSpec
from ..quadform import HalfIntegralSymMat
from ..root_data import Coweight

COMMANDS = (
    "enumerate-a",
    "arch-factor",
    "local-integral",
    "geometric-side",
    "normalized-l",
    "measure-density",
    "characters",
    "verify",
    "error-bound",
    "sweep",
)


class PrimeEntry(BaseModel):
    """𝕊 の 1 素数と λ_p = (ℓ₀, ℓ₁, …, ℓₙ)"""

    model_config = ConfigDict(frozen=True)

    p: int
    lam: list[int]

    @field_validator("p")
    @classmethod
    def validate_prime(cls, v: int) -> int:
        if not sympy.isprime(v):
            raise ValueError(f"p は素数である必要があります: {v}")
        return v

    @field_validator("lam")
    @classmethod
    def validate_dominant(cls, v: list[int]) -> list[int]:
        if len(v) < 2:
            raise ValueError(f"λ は (ℓ₀, ℓ₁, …, ℓₙ) の形で与えてください: {v}")
        lam = Coweight(tuple(v))
        if not lam.is_dominant:
            raise ValueError(f"λ = {lam} が支配的ではありません（0 = ℓ₁ ≤ ⋯ ≤ ℓₙ ≤ ℓ₀/2）")
        return list(lam.ell)

    @property
    def coweight(self) -> Coweight:
        return Coweight(tuple(self.lam))


def _form(rows: list[list[int]]) -> HalfIntegralSymMat:
    return HalfIntegralSymMat(tuple(tuple(row) for row in rows))


class JobConfig(BaseModel):
    """1 回の計算ジョブの設定（すべての項目は CLI オプションで上書きできる）"""

    model_config = ConfigDict(extra="forbid")

    command: str | None = None
    n: int = 2
    kappa: int = 10
    # 2σ の成分
    sigma: list[list[int]] = [[2, 0], [0, 2]]
    sigma2: list[list[int]] | None = None
    primes: list[PrimeEntry] = []
    r: int | None = None
    alpha: int | None = None
    beta: int | None = None
    truncation: int = 6
    grid: int = 200
    margins: list[int] = [0]
    mode: Literal["explicit", "oracle", "both"] = "both"
    seed: int = 0
    level: int = 1
    sweep_primes: list[int] = [3, 5, 7]
    measure_primes: list[int] = [3]
    max_tau: int = 6
    max_l0: int = 4
    suites: list[str] | None = None
    out: Path | None = None
    csv: Path | None = None
    cache_dir: Path | None = None

    @field_validator("command")
    @classmethod
    def validate_command(cls, v: str | None) -> str | None:
        if v is not None and v not in COMMANDS:
            raise ValueError(f"未知のコマンドです: {v}（{', '.join(COMMANDS)}）")
        return v

    @field_validator("sigma", "sigma2")
    @classmethod
    def validate_sigma(cls, v: list[list[int]] | None) -> list[list[int]] | None:
        if v is not None:
            _form(v)
        return v

    @field_validator("kappa", "grid", "level")
    @classmethod
    def validate_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"正の整数である必要があります: {v}")
        return v

    @field_validator("truncation", "max_tau", "max_l0")
    @classmethod
    def validate_nonnegative(cls, v: int) -> int:
        if v < 0:
            raise ValueError(f"0 以上である必要があります: {v}")
        return v

    @field_validator("margins")
    @classmethod
    def validate_margins(cls, v: list[int]) -> list[int]:
        if not v or any(m < 0 for m in v):
            raise ValueError(f"margins は 0 以上の整数のリストです: {v}")
        return v

    @field_validator("sweep_primes", "measure_primes")
    @classmethod
    def validate_prime_lists(cls, v: list[int]) -> list[int]:
        bad = [p for p in v if not sympy.isprime(p)]
        if bad:
            raise ValueError(f"素数でない値があります: {bad}")
        return v

    @model_validator(mode="after")
    def validate_shapes(self) -> "JobConfig":
        if len(self.sigma) != self.n:
            raise ValueError(f"σ のサイズ {len(self.sigma)} が n={self.n} と一致しません")
        if self.sigma2 is not None and len(self.sigma2) != self.n:
            raise ValueError(f"σ₂ のサイズ {len(self.sigma2)} が n={self.n} と一致しません")
        for entry in self.primes:
            if len(entry.lam) != self.n + 1:
                raise ValueError(f"λ_{entry.p} の長さが n+1={self.n + 1} ではありません")
        if len({e.p for e in self.primes}) != len(self.primes):
            raise ValueError("primes に同じ素数が重複しています")
        return self

    @property
    def sigma_form(self) -> HalfIntegralSymMat:
        return _form(self.sigma)

    @property
    def sigma2_form(self) -> HalfIntegralSymMat:
        return _form(self.sigma2) if self.sigma2 is not None else self.sigma_form

    @property
    def similitude_spec(self) -> SimilitudeSpec:
        return SimilitudeSpec.from_pairs((e.p, e.lam) for e in self.primes)

    def merged(self, **overrides) -> "JobConfig":
        """None でない上書きを反映して検証し直した設定"""
        data = self.model_dump()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return validate_job(data)


def validate_job(data: dict) -> JobConfig:
    try:
        return JobConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"ジョブ設定が不正です:\n{e}") from e


def load_job_config(path: str | Path | None = None) -> JobConfig:
    """YAML / JSON のジョブ設定を読み込む（None なら既定値）"""
    if path is None:
        return JobConfig()
    try:
        with open(path, encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
    except OSError as e:
        raise ConfigError(f"ジョブ設定を読み込めません: {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"ジョブ設定の構文が不正です: {path}: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"ジョブ設定の最上位はマッピングである必要があります: {path}")
    return validate_job(raw)
