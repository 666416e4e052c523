"""結果の書き出し：正規化 JSON と CSV

同じ入力からは同じバイト列を出す: キーは整列し、浮動小数は有効数字 17 桁で書く。
"""

import csv
import json
import math
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np

from ..quadform import HalfIntegralSymMat
from ..root_data import Coweight


def to_plain(obj):
    """JSON に載る素朴な値へ変換する（Fraction は {num, den}、複素数は {re, im}）"""
    if hasattr(obj, "to_json"):
        return to_plain(obj.to_json())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return {"num": obj.numerator, "den": obj.denominator}
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating, mpmath.mpf)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating, mpmath.mpc)):
        z = complex(obj)
        return {"re": z.real, "im": z.imag}
    if isinstance(obj, Coweight):
        return list(obj.ell)
    if isinstance(obj, HalfIntegralSymMat):
        return [list(row) for row in obj.two_sigma]
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return [to_plain(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(x) for x in obj]
    raise TypeError(f"JSON に変換できない型です: {type(obj).__name__}")


def format_float(x: float) -> str:
    if math.isfinite(x):
        return format(x, ".17g")
    return json.dumps(x)


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{json.dumps(k, ensure_ascii=False)}: {_encode(obj[k], indent, level + 1)}"
            for k in sorted(obj)
        ]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(x, (dict, list)) for x in obj):
            return "[" + ", ".join(_encode(x, indent, level + 1) for x in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(x, indent, level + 1) for x in obj) + "\n" + end + "]"
    return json.dumps(obj, ensure_ascii=False)


def dumps(obj, indent: int = 2) -> str:
    return _encode(to_plain(obj), indent, 0)


def write_json(path: str | Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj) + "\n", encoding="utf-8")
    return path


def write_csv(path: str | Path, rows: list[dict]) -> Path:
    """1 行目のキー順をヘッダにする"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        if not rows:
            return path
        writer = csv.DictWriter(f, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(
                {k: format_float(v) if isinstance(v, float) else v for k, v in to_plain(row).items()}
            )
    return path
