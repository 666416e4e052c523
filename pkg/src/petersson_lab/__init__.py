"""petersson-lab：PGSp(2n) の漸近 Petersson 公式を計算するツールキット"""

__version__ = "0.1.0"
