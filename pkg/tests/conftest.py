"""テスト用のフィクスチャ"""

import pytest

from petersson_lab.config import Settings
from petersson_lab.local_gsp4 import DiagData, LocalSpec
from petersson_lab.quadform import HalfIntegralSymMat
from petersson_lab.root_data import Coweight


@pytest.fixture
def sigma_id():
    """σ = 単位行列（2σ = diag(2, 2)）"""
    return HalfIntegralSymMat.identity(2)


@pytest.fixture
def sigma_hex():
    """σ = (1, 1/2; 1/2, 1)（A₂ 格子）"""
    return HalfIntegralSymMat.from_abc(1, 1, 1)


@pytest.fixture
def test_settings(tmp_path):
    return Settings(log_level="DEBUG", cache_dir=tmp_path / "cache")


@pytest.fixture
def make_local():
    """(p, τ, t, α, β, σ_U) から LocalSpec と DiagData を作る"""

    def _make(p, tau, t, alpha, beta, sigma_u=None):
        sigma_u = sigma_u or HalfIntegralSymMat.identity(2)
        return LocalSpec(p=p, tau=tau, t=t), DiagData(alpha=alpha, beta=beta, sigma_u=sigma_u)

    return _make


@pytest.fixture
def lam():
    """ℓ 座標から Coweight を作る短縮形"""

    def _lam(*ell):
        return Coweight(tuple(ell))

    return _lam
