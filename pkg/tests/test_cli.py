import json
from unittest.mock import patch

from click.testing import CliRunner

from petersson_lab.cli import cli
from petersson_lab.suite.pipeline import SuiteResult, SweepSummary


def _invoke(settings, args):
    with patch("petersson_lab.cli.load_settings", return_value=settings):
        return CliRunner().invoke(cli, args)


def test_help_lists_commands():
    result = CliRunner().invoke(cli, ["-h"])
    assert result.exit_code == 0
    for name in ("enumerate-a", "local-integral", "measure-density", "verify", "sweep"):
        assert name in result.output


def test_enumerate_a_writes_json(test_settings, tmp_path):
    out = tmp_path / "a.json"
    result = _invoke(test_settings, ["enumerate-a", "--sigma", "2,0;0,2", "--r", "2", "--out", str(out)])

    assert result.exit_code == 0, result.output
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["count"] == 4
    assert all(len(A) == 2 for A in data["solutions"])


def test_enumerate_a_from_config_file(test_settings, tmp_path):
    job = tmp_path / "job.yml"
    job.write_text("sigma: [[2, 0], [0, 2]]\nr: 3\n", encoding="utf-8")
    out = tmp_path / "a.json"

    result = _invoke(test_settings, ["enumerate-a", "-c", str(job), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert json.loads(out.read_text(encoding="utf-8"))["count"] == 0

    # CLI オプションがジョブ設定より優先される
    result = _invoke(test_settings, ["enumerate-a", "-c", str(job), "--r", "5", "--out", str(out)])
    assert json.loads(out.read_text(encoding="utf-8"))["r"] == 5


def test_bad_matrix_is_usage_error(test_settings):
    result = _invoke(test_settings, ["enumerate-a", "--sigma", "2,x;0,2"])
    assert result.exit_code == 2
    assert "2,0;0,2" in result.output


def test_non_prime_is_config_error(test_settings):
    result = _invoke(test_settings, ["normalized-l", "--prime", "4:1,0,0"])
    assert result.exit_code == 1
    assert "設定エラー" in result.output


def test_unsupported_regime_exits_2(test_settings):
    result = _invoke(test_settings, ["error-bound", "-k", "16"])
    assert result.exit_code == 2
    assert "仮定: κ ≥ 17" in result.output


def test_small_weight_geometric_side_exits_2(test_settings):
    result = _invoke(test_settings, ["geometric-side", "-k", "4"])
    assert result.exit_code == 2


def test_error_bound(test_settings, tmp_path):
    out = tmp_path / "e.json"
    result = _invoke(test_settings, ["error-bound", "-k", "20", "-N", "11", "--r", "3", "--out", str(out)])
    assert result.exit_code == 0, result.output
    data = json.loads(out.read_text(encoding="utf-8"))
    assert (data["kappa"], data["r"], data["N"]) == (20, 3, 11)
    assert data["constant_caveat"] is True


def test_local_integral_equal_sum(test_settings, tmp_path):
    out = tmp_path / "local.json"
    result = _invoke(
        test_settings,
        ["local-integral", "--prime", "3:4,0,2", "--alpha", "2", "--beta", "2", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["explicit"]["provenance"] == "equal-sum"
    assert data["match"] is True


def test_local_integral_requires_exponents(test_settings):
    result = _invoke(test_settings, ["local-integral", "--prime", "3:4,0,2"])
    assert result.exit_code == 1
    assert "--alpha" in result.output


def test_normalized_l_fills_cache(test_settings, tmp_path):
    cache_dir = tmp_path / "c"
    result = _invoke(test_settings, ["normalized-l", "--prime", "3:1,0,0", "--cache-dir", str(cache_dir)])
    assert result.exit_code == 0, result.output
    assert (cache_dir / "lvalues.json").exists()


def test_characters(test_settings):
    result = _invoke(test_settings, ["characters", "--max-l0", "2"])
    assert result.exit_code == 0, result.output
    assert test_settings.character_cache_path.exists()


def test_verify_passes_options(test_settings):
    ok = [SuiteResult("root_data", checks=3)]
    with patch("petersson_lab.cli.load_settings", return_value=test_settings), \
         patch("petersson_lab.cli.run_suites", return_value=ok) as mock_run:
        result = CliRunner().invoke(cli, ["verify", "--suite", "root_data", "--quick", "--seed", "4"])

    assert result.exit_code == 0, result.output
    names, opts = mock_run.call_args.args
    assert names == ["root_data"]
    # --quick と --seed が VerifyOptions に伝わる
    assert opts.quick is True
    assert opts.seed == 4


def test_verify_failure_exits_1(test_settings, tmp_path):
    bad = [SuiteResult("local", checks=2, failures=["明示公式とオラクルが不一致"])]
    out = tmp_path / "report.json"
    with patch("petersson_lab.cli.load_settings", return_value=test_settings), \
         patch("petersson_lab.cli.run_suites", return_value=bad):
        result = CliRunner().invoke(cli, ["verify", "--out", str(out)])

    assert result.exit_code == 1
    assert "不一致" in result.output
    assert json.loads(out.read_text(encoding="utf-8"))["passed"] is False


def test_sweep_uses_job_options(test_settings):
    with patch("petersson_lab.cli.load_settings", return_value=test_settings), \
         patch("petersson_lab.cli.run_sweep", return_value=SweepSummary([])) as mock_run:
        result = CliRunner().invoke(cli, ["sweep", "--p", "5", "--max-tau", "2"])

    assert result.exit_code == 0, result.output
    assert mock_run.call_args.args[:2] == ([5], 2)
