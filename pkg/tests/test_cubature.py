import math

import numpy as np
import pytest

from petersson_lab.cubature import adaptive_cubature, reference_rule


def test_reference_rule_weights_sum_to_one():
    nodes, weights = reference_rule(5, 3)
    assert nodes.shape == (125, 3)
    assert weights.sum() == pytest.approx(1.0)
    assert np.all((nodes > 0) & (nodes < 1))


def test_polynomial_exact():
    result = adaptive_cubature(lambda p: p[..., 0] ** 2 * p[..., 1], [0, 0], [1, 1])
    assert result.converged
    assert result.real == pytest.approx(1 / 6, rel=1e-12)
    assert result.imag == 0


def test_gaussian():
    result = adaptive_cubature(lambda p: np.exp(-p[..., 0] ** 2), [-6], [6], rtol=1e-10)
    assert result.real == pytest.approx(math.sqrt(math.pi), rel=1e-9)


def test_oscillatory_complex():
    result = adaptive_cubature(
        lambda p: np.exp(1j * p[..., 0]) * np.exp(1j * p[..., 1]), [0, 0], [2 * np.pi, 1.0], atol=1e-10
    )
    assert abs(result.value) < 1e-8


def test_cell_limit_reports_non_convergence():
    result = adaptive_cubature(
        lambda p: 1.0 / np.sqrt(np.abs(p[..., 0] - 0.3) + 1e-12), [0], [1], rtol=1e-14, max_cells=20
    )
    assert not result.converged
    assert result.cells >= 20


@pytest.mark.parametrize("lower, upper", [([0, 0], [1]), ([1], [0]), ([0], [0])])
def test_invalid_bounds(lower, upper):
    with pytest.raises(ValueError):
        adaptive_cubature(lambda p: p[..., 0], lower, upper)
