"""petersson-lab 共通のエラー型

各モジュールが同じ分類でエラーを扱えるよう、ここに集約する。
CLI は UnsupportedRegime を終了コード 2、それ以外を 1 に対応させる。
"""


class PeterssonLabError(RuntimeError):
    """ライブラリ全体の基底エラー"""


class UnsupportedRegime(PeterssonLabError):
    """定理の仮定（κ の下限・p∤4detσ・n=2 など）を満たさない入力"""

    def __init__(self, message: str, hypothesis: str = ""):
        super().__init__(message)
        self.hypothesis = hypothesis


class NotCovered(PeterssonLabError):
    """明示公式が扱わないパラメータの隅（オラクルにフォールバックする）"""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class InvariantViolation(PeterssonLabError):
    """厳密計算の内部検査に失敗した（実装バグの兆候）"""


class DivergentIntegral(PeterssonLabError):
    """L^ℓ ノルムや形式次数が発散する（ℓκ ≤ 2n）"""


class NotSymplectic(ValueError):
    """シンプレクティック相似変換でない、または相似係数が p 冪でない"""


class ConfigError(ValueError):
    """ジョブ設定のスキーマ違反"""
