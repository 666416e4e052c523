"""計算結果のキャッシュ：正規化 L 値と Weyl 指標表を JSON で永続化"""

import json
import os
from fractions import Fraction
from pathlib import Path

from .. import logger as log
from ..geom_side import SimilitudeSpec
from ..measure import LaurentElement, weyl_character
from ..quadform import HalfIntegralSymMat
from ..root_data import Coweight


class _JsonStore:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._data: dict[str, object] = self._load()

    def _load(self) -> dict[str, object]:
        if not os.path.exists(self.path):
            return {}
        try:
            with open(self.path, encoding="utf-8") as f:
                data = json.load(f)
        except (json.JSONDecodeError, OSError):
            return {}
        return data if isinstance(data, dict) else {}

    def _save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "w", encoding="utf-8") as f:
            json.dump(self._data, f, ensure_ascii=False, indent=2, sort_keys=True)

    def __contains__(self, key: str) -> bool:
        return key in self._data

    def __len__(self) -> int:
        return len(self._data)


class LValueCache(_JsonStore):
    """𝓛(∏_p 𝒮(c_{λ_p})) の厳密値を (n, σ, p-λ の列, κ) ごとに保持する"""

    @staticmethod
    def key(sigma: HalfIntegralSymMat, spec: SimilitudeSpec, kappa: int | None) -> str:
        return f"{sigma.n}|{sigma.key()}|{spec.key()}|{kappa}"

    def get(self, sigma: HalfIntegralSymMat, spec: SimilitudeSpec, kappa: int | None) -> Fraction | None:
        raw = self._data.get(self.key(sigma, spec, kappa))
        if raw is None:
            return None
        log.detail(f"L 値キャッシュ命中: {spec.key() or '∅'}")
        return Fraction(str(raw))

    def put(
        self, sigma: HalfIntegralSymMat, spec: SimilitudeSpec, kappa: int | None, value: Fraction
    ) -> None:
        value = Fraction(value)
        self._data[self.key(sigma, spec, kappa)] = f"{value.numerator}/{value.denominator}"
        self._save()


class CharacterTableCache(_JsonStore):
    """Weyl 指標 F_λ を (n, λ) ごとに保持する"""

    @staticmethod
    def key(lam: Coweight) -> str:
        return f"{lam.n}|{lam}"

    def get(self, lam: Coweight) -> LaurentElement | None:
        raw = self._data.get(self.key(lam))
        return None if raw is None else LaurentElement.from_json(raw)

    def put(self, lam: Coweight, element: LaurentElement) -> None:
        self._data[self.key(lam)] = element.to_json()
        self._save()

    def character(self, lam: Coweight) -> LaurentElement:
        """キャッシュになければ計算して保存する"""
        hit = self.get(lam)
        if hit is not None:
            return hit
        element = weyl_character(lam)
        self.put(lam, element)
        return element
