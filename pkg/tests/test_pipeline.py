import pytest

from petersson_lab.suite import pipeline
from petersson_lab.suite.pipeline import (
    SUITES,
    SuiteResult,
    SweepSummary,
    VerifyOptions,
    run_suites,
    run_sweep,
)

FAST_SUITES = ["root_data", "cartan", "geometric", "error_bound"]


def test_suite_result_check():
    result = SuiteResult("x")
    result.check(True, "ok")
    result.check(False, "壊れた")
    assert result.checks == 2
    assert result.failures == ["壊れた"]
    assert not result.passed
    assert "seconds" not in result.to_json()


def test_quick_samples_are_smaller():
    quick = VerifyOptions(quick=True).samples
    full = VerifyOptions().samples
    assert all(quick[k] <= full[k] for k in full)


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suites(["nope"], VerifyOptions(quick=True))


def test_exception_is_recorded_and_others_continue(monkeypatch):
    def boom(result, opts):
        raise RuntimeError("途中で停止")

    monkeypatch.setitem(SUITES, "cartan", boom)
    results = run_suites(["cartan", "root_data"], VerifyOptions(quick=True))
    assert not results[0].passed
    assert "途中で停止" in results[0].failures[0]
    assert results[1].passed


def test_fast_suites_pass():
    results = run_suites(FAST_SUITES, VerifyOptions(quick=True))
    for res in results:
        assert res.passed, (res.name, res.failures[:3])
        assert res.checks > 0


def test_same_seed_same_report():
    a = [r.to_json() for r in run_suites(["root_data", "cartan"], VerifyOptions(quick=True, seed=7))]
    b = [r.to_json() for r in run_suites(["root_data", "cartan"], VerifyOptions(quick=True, seed=7))]
    assert a == b


@pytest.mark.slow
@pytest.mark.parametrize("name", ["arch", "appendix_a", "local", "measure"])
def test_heavy_suites_pass_quick(name, tmp_path):
    opts = VerifyOptions(quick=True, cache=pipeline.LValueCache(tmp_path / "lvalues.json"))
    (res,) = run_suites([name], opts)
    assert res.passed, res.failures[:3]


def test_run_sweep_small():
    summary = run_sweep([3], 2)
    total, covered, bad = summary.by_prime()[3]
    assert total == len(summary.records) > 0
    assert covered == summary.covered
    assert bad == 0
    assert summary.to_json()["mismatches"] == 0


def test_empty_sweep_summary():
    summary = SweepSummary([])
    assert summary.covered == 0
    assert summary.by_prime() == {}


@pytest.mark.slow
def test_measure_suite_accepts_rounded_unit_value(monkeypatch, tmp_path):
    """𝓛(F_0) の浮動小数点の丸め誤差だけでは失敗にならないこと"""
    monkeypatch.setattr(pipeline, "L_of_F", lambda *args, **kwargs: 1.0 - 2.0**-52)
    opts = VerifyOptions(quick=True, cache=pipeline.LValueCache(tmp_path / "lvalues.json"))
    (res,) = run_suites(["measure"], opts)
    assert not any("𝓛(F_0)" in f for f in res.failures)
