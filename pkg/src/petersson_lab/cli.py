"""petersson-lab のコマンドライン（click のサブコマンド群）"""

import sys
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import click
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from . import __version__
from . import logger as log
from .config import Settings, load_settings
from .error_bound import ErrorParams, off_diagonal_bound, quantitative_formula
from .errors import ConfigError, InvariantViolation, NotCovered, PeterssonLabError, UnsupportedRegime
from .geom_side import (
    arch_factor,
    arch_factor_quadrature_n2,
    enumerate_A,
    geometric_side,
    normalized_L,
)
from .local_gsp4 import DiagData, LocalSpec, local_integral_explicit, local_integral_oracle
from .measure import density_samples, dimension_check
from .root_data import dominant_coweights, weyl_dimension
from .suite.config import JobConfig, load_job_config
from .suite.pipeline import SUITES, VerifyOptions, run_suites, run_sweep
from .suite.report import write_csv, write_json
from .suite.state import CharacterTableCache, LValueCache

console = Console()

# -h でもヘルプを表示できるようにする
CONTEXT_SETTINGS = dict(help_option_names=["-h", "--help"])


# --- オプションの解析 ---


def _parse_matrix(ctx, param, value: str | None) -> list[list[int]] | None:
    """"2,0;0,2" → [[2, 0], [0, 2]]（2σ の成分）"""
    if value is None:
        return None
    try:
        return [[int(c) for c in row.split(",")] for row in value.split(";")]
    except ValueError:
        raise click.BadParameter(f"行列は '2,0;0,2' の形で与えてください: {value}")


def _parse_primes(ctx, param, values: tuple[str, ...]) -> list[dict] | None:
    """"3:2,0,1" → {"p": 3, "lam": [2, 0, 1]}"""
    if not values:
        return None
    out = []
    for value in values:
        try:
            p, lam = value.split(":")
            out.append({"p": int(p), "lam": [int(c) for c in lam.split(",")]})
        except ValueError:
            raise click.BadParameter(f"素数と λ は 'p:ℓ₀,ℓ₁,ℓ₂' の形で与えてください: {value}")
    return out


def _job_options(func):
    """全サブコマンド共通のオプション"""
    options = [
        click.option("--config", "-c", "config_path", type=click.Path(exists=True, dir_okay=False),
                     default=None, help="ジョブ設定ファイル（YAML / JSON）"),
        click.option("--seed", type=int, default=None, help="乱数シード（検証スイート用）"),
        click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None,
                     help="結果 JSON の書き出し先"),
        click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
                     help="キャッシュディレクトリ（既定は PETERSSON_CACHE_DIR）"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _form_options(func):
    """σ₁, σ₂, 𝕊, κ を取るサブコマンドのオプション"""
    options = [
        click.option("--sigma", callback=_parse_matrix, default=None,
                     help="2σ₁ の成分。例: '2,0;0,2'（σ₁ = 単位行列）"),
        click.option("--sigma2", callback=_parse_matrix, default=None,
                     help="2σ₂ の成分（省略時は σ₁ と同じ）"),
        click.option("--prime", "primes", multiple=True, callback=_parse_primes,
                     help="𝕊 の素数と λ_p。例: '3:2,0,1'（複数指定可）"),
        click.option("--kappa", "-k", type=int, default=None, help="重さ κ"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


# --- 共通処理 ---


@contextmanager
def _guard():
    """例外を終了コードに対応させる（UnsupportedRegime は 2、それ以外は 1）"""
    try:
        yield
    except UnsupportedRegime as e:
        console.print(f"[red]✗ 定理の仮定を満たしません:[/red] {e}")
        if e.hypothesis:
            console.print(f"  [dim]仮定: {e.hypothesis}[/dim]")
        sys.exit(2)
    except (ConfigError, ValidationError) as e:
        console.print(f"[red]設定エラー:[/red] {e}")
        console.print("[dim]→ jobs/*.yml の書式と .env の PETERSSON_* を確認してください[/dim]")
        sys.exit(1)
    except (PeterssonLabError, ValueError, ArithmeticError, OSError) as e:
        console.print(f"[red]✗ {e}[/red]")
        sys.exit(1)


def _prepare(command: str, config_path: str | None, **overrides) -> tuple[Settings, JobConfig]:
    """設定を読み込み、CLI オプションで上書きしたジョブ設定を返す"""
    settings = load_settings()
    log.setup_logger(settings.log_level, settings.log_file)
    cleaned = {}
    for key, value in overrides.items():
        if isinstance(value, tuple):
            value = list(value) or None
        cleaned[key] = value
    job = load_job_config(config_path).merged(command=command, **cleaned)
    return settings, job


def _cache_dir(settings: Settings, job: JobConfig) -> Path:
    return job.cache_dir if job.cache_dir is not None else settings.cache_dir


def _write_out(job: JobConfig, payload) -> None:
    if job.out is not None:
        path = write_json(job.out, payload)
        console.print(f"[dim]→ JSON: {path}[/dim]")


def _fmt_matrix(rows) -> str:
    return "[" + "; ".join(" ".join(f"{c:>3}" for c in row) for row in rows) + "]"


def _fmt_fraction(value: Fraction) -> str:
    return str(value) if value.denominator == 1 else f"{value} (≈ {float(value):.6g})"


@click.group(context_settings=CONTEXT_SETTINGS)
@click.version_option(version=__version__)
def cli():
    """Siegel 保型形式の Petersson 公式 計算ツールキット

    GSp(4) の相対跡公式の幾何側（A 行列の列挙・アルキメデス因子・p 進局所積分）を
    厳密に計算し、Fourier 係数の重み付き分布の密度と非対角項の評価を出力します。

    \b
    ■ できること:
      - ᵗAσ₁A = rσ₂ を満たす整数行列 A の列挙
      - アルキメデス因子 I_∞ の閉じた式と数値積分による照合
      - 局所積分 I_{A,p} の明示公式と剰余和オラクルの比較
      - 正規化 L 値と Sato–Tate 測度からのずれの密度
      - 固定レベル N での非対角項の上界

    \b
    ■ 設定:
      .env           PETERSSON_LOG_LEVEL / PETERSSON_CACHE_DIR / PETERSSON_ERROR_CONSTANT など
      jobs/*.yml     ジョブ設定（--config で指定、各項目は CLI オプションで上書き可）

    \b
    ■ よく使うコマンド:
      petersson-lab enumerate-a --sigma '2,0;0,2' --r 5
      petersson-lab local-integral --prime '3:4,0,2' --alpha 2 --beta 2
      petersson-lab geometric-side --prime '3:2,0,1' -k 10
      petersson-lab measure-density --p 3 --truncation 4 --csv density.csv
      petersson-lab verify                 全検証スイートを実行
      petersson-lab sweep --p 3 --max-tau 4

    \b
    ■ 終了コード:
      0 成功 / 2 定理の仮定を満たさない入力 / 1 その他のエラー

    \b
    ■ 各コマンドの詳細:
      petersson-lab <command> -h  でコマンドごとのヘルプを表示
    """
    pass


@cli.command("enumerate-a", context_settings=CONTEXT_SETTINGS)
@_job_options
@_form_options
@click.option("--r", "r", type=int, default=None, help="相似係数 r（省略時は 𝕊 から ∏p^{r_p}）")
def enumerate_a(config_path, seed, out, cache_dir, sigma, sigma2, primes, kappa, r):
    """ᵗAσ₁A = rσ₂ かつ r·ᵗA⁻¹ が整数となる A を ±1 を除いて列挙する。

    \b
    例:
      petersson-lab enumerate-a --sigma '2,0;0,2' --r 5
      petersson-lab enumerate-a --sigma '2,1;1,2' --sigma2 '2,0;0,6' --r 3
    """
    with _guard():
        settings, job = _prepare(
            "enumerate-a", config_path, seed=seed, out=out, cache_dir=cache_dir,
            sigma=sigma, sigma2=sigma2, primes=primes, kappa=kappa, r=r,
        )
        r = job.r if job.r is not None else job.similitude_spec.r
        s1, s2 = job.sigma_form, job.sigma2_form
        solutions = enumerate_A(s1, s2, r)

        table = Table(title=f"A の列挙（σ₁={s1}, σ₂={s2}, r={r}）")
        table.add_column("#", justify="right")
        table.add_column("A")
        table.add_column("det A", justify="right")
        for i, A in enumerate(solutions, 1):
            table.add_row(str(i), _fmt_matrix(A.rows), str(A.det))
        console.print(table)
        console.print(f"[bold]{len(solutions)}[/bold] 個（±1 類）")
        _write_out(job, {"sigma1": s1, "sigma2": s2, "r": r, "count": len(solutions), "solutions": solutions})


@cli.command("arch-factor", context_settings=CONTEXT_SETTINGS)
@_job_options
@_form_options
@click.option("--r", "r", type=int, default=None, help="数値積分に使う A の相似係数")
@click.option("--quadrature", is_flag=True, help="n=2 で 3 次元の数値積分と照合する")
def arch_factor_cmd(config_path, seed, out, cache_dir, sigma, sigma2, primes, kappa, r, quadrature):
    """アルキメデス因子 I_∞ を閉じた式で計算する（A によらない）。

    \b
    例:
      petersson-lab arch-factor -k 10
      petersson-lab arch-factor -k 12 --quadrature
    """
    with _guard():
        settings, job = _prepare(
            "arch-factor", config_path, seed=seed, out=out, cache_dir=cache_dir,
            sigma=sigma, sigma2=sigma2, primes=primes, kappa=kappa, r=r,
        )
        s1, s2 = job.sigma_form, job.sigma2_form
        closed = arch_factor(s1, s2, job.kappa, fd_constant=settings.formal_degree_constant)
        payload = {"sigma1": s1, "sigma2": s2, "kappa": job.kappa, "closed": closed, "quadrature": None}
        lines = [f"I_∞ = [bold]{float(closed):.15g}[/bold]"]

        if quadrature:
            r = job.r if job.r is not None else job.similitude_spec.r
            solutions = enumerate_A(s1, s2, r)
            if not solutions:
                console.print(f"[yellow]⚠ r={r} の A が存在しないので数値積分を省略します[/yellow]")
            else:
                value = arch_factor_quadrature_n2(s1, s2, solutions[0], r, job.kappa)
                rel = abs(value.real - float(closed)) / float(closed)
                payload.update(quadrature=value, rel_error=rel, A=solutions[0])
                lines.append(f"数値積分 = {value.real:.12g} + {value.imag:.3g}i（相対誤差 {rel:.2e}）")

        console.print(Panel("\n".join(lines), title=f"I_∞（κ={job.kappa}）", style="blue"))
        _write_out(job, payload)


@cli.command("local-integral", context_settings=CONTEXT_SETTINGS)
@_job_options
@_form_options
@click.option("--alpha", type=int, default=None, help="A の対角化の指数 α")
@click.option("--beta", type=int, default=None, help="A の対角化の指数 β（α ≤ β）")
@click.option("--mode", type=click.Choice(["explicit", "oracle", "both"]), default=None,
              help="明示公式 / 剰余和オラクル / 両方（既定: both）")
@click.option("--margin", "margins", type=int, multiple=True, help="オラクルの法の余裕 e（複数指定可）")
def local_integral_cmd(config_path, seed, out, cache_dir, sigma, sigma2, primes, kappa, alpha, beta, mode, margins):
    """p 進局所積分 I_{A,p} を計算する（n=2、σ は σ_U として使う）。

    𝕊 の最初の素数 --prime 'p:τ,0,t' が対象。

    \b
    例:
      petersson-lab local-integral --prime '3:4,0,2' --alpha 2 --beta 2
      petersson-lab local-integral --prime '5:3,0,1' --alpha 1 --beta 2 --mode oracle --margin 0 --margin 1
    """
    with _guard():
        settings, job = _prepare(
            "local-integral", config_path, seed=seed, out=out, cache_dir=cache_dir,
            sigma=sigma, sigma2=sigma2, primes=primes, kappa=kappa,
            alpha=alpha, beta=beta, mode=mode, margins=margins,
        )
        if not job.primes:
            raise ConfigError("--prime 'p:τ,0,t' で素数と λ を指定してください")
        if job.alpha is None or job.beta is None:
            raise ConfigError("--alpha と --beta を指定してください")
        entry = job.primes[0]
        spec = LocalSpec.from_coweight(entry.coweight, entry.p)
        d = DiagData(alpha=job.alpha, beta=job.beta, sigma_u=job.sigma_form)

        table = Table(title=f"I_{{A,p}}（p={spec.p}, τ={spec.tau}, t={spec.t}, α={d.alpha}, β={d.beta}）")
        table.add_column("方法")
        table.add_column("値", justify="right")
        table.add_column("由来")
        payload: dict = {"explicit": None, "oracle": []}

        explicit = None
        if job.mode in ("explicit", "both"):
            explicit = local_integral_explicit(spec, d)
            if isinstance(explicit, NotCovered):
                table.add_row("明示公式", "-", f"対象外: {explicit.reason}")
                payload["explicit"] = {"not_covered": explicit.reason}
                explicit = None
            else:
                table.add_row("明示公式", _fmt_fraction(explicit.value), explicit.provenance)
                payload["explicit"] = explicit.to_json(spec, d)

        if job.mode in ("oracle", "both"):
            values = []
            for margin in job.margins:
                oracle = local_integral_oracle(spec, d, margin, max_cells=settings.oracle_max_cells)
                table.add_row(f"オラクル (e={margin})", _fmt_fraction(oracle.value), oracle.detail or "oracle")
                payload["oracle"].append({"margin": margin, **oracle.to_json(spec, d)})
                values.append(oracle.value)
            if len(set(values)) > 1:
                raise InvariantViolation(f"オラクルの値が法の余裕によって変わりました: {values}")
            if explicit is not None:
                payload["match"] = explicit.value == values[0]
                if not payload["match"]:
                    raise InvariantViolation(f"明示公式 {explicit.value} とオラクル {values[0]} が一致しません")

        console.print(table)
        _write_out(job, payload)


@cli.command("geometric-side", context_settings=CONTEXT_SETTINGS)
@_job_options
@_form_options
@click.option("--margin", "margins", type=int, multiple=True, help="オラクルの法の余裕 e")
def geometric_side_cmd(config_path, seed, out, cache_dir, sigma, sigma2, primes, kappa, margins):
    """幾何側 Σ_A I_∞·∏_{p∈𝕊} I_{A,p} を計算する。

    \b
    例:
      petersson-lab geometric-side -k 10
      petersson-lab geometric-side --prime '3:2,0,1' --prime '5:2,0,0' -k 12
    """
    with _guard():
        settings, job = _prepare(
            "geometric-side", config_path, seed=seed, out=out, cache_dir=cache_dir,
            sigma=sigma, sigma2=sigma2, primes=primes, kappa=kappa, margins=margins,
        )
        result = geometric_side(
            job.sigma_form,
            job.sigma2_form,
            job.similitude_spec,
            job.kappa,
            margin=job.margins[0],
            fd_constant=settings.formal_degree_constant,
            max_cells=settings.oracle_max_cells,
        )
        table = Table(title=f"幾何側（r={result.r}, κ={result.kappa}）")
        table.add_column("A")
        table.add_column("sgn·I_∞", justify="right")
        table.add_column("∏ I_{A,p}", justify="right")
        for term in result.terms:
            table.add_row(_fmt_matrix(term.A.rows), f"{float(term.sign * term.arch):.10g}", str(term.local_product))
        console.print(table)
        console.print(Panel(f"合計 = [bold]{float(result.total):.15g}[/bold]", style="blue"))
        _write_out(job, result)


@cli.command("normalized-l", context_settings=CONTEXT_SETTINGS)
@_job_options
@_form_options
def normalized_l_cmd(config_path, seed, out, cache_dir, sigma, sigma2, primes, kappa):
    """正規化 L 値 𝓛(∏_p 𝒮(c_{λ_p})) を厳密な有理数で計算する（キャッシュあり）。

    \b
    例:
      petersson-lab normalized-l --prime '3:2,0,1'
      petersson-lab normalized-l --sigma '2,1;1,2' --prime '5:2,0,0' --prime '7:1,0,0'
    """
    with _guard():
        settings, job = _prepare(
            "normalized-l", config_path, seed=seed, out=out, cache_dir=cache_dir,
            sigma=sigma, sigma2=sigma2, primes=primes, kappa=kappa,
        )
        sigma_form, spec = job.sigma_form, job.similitude_spec
        cache = LValueCache(_cache_dir(settings, job) / "lvalues.json")
        value = cache.get(sigma_form, spec, job.kappa)
        if value is None:
            value = normalized_L(sigma_form, spec, job.kappa, max_cells=settings.oracle_max_cells)
            cache.put(sigma_form, spec, job.kappa, value)
        console.print(
            Panel(f"𝓛 = [bold]{_fmt_fraction(value)}[/bold]", title=f"σ={sigma_form}, 𝕊={spec.key() or '∅'}")
        )
        _write_out(job, {"sigma": sigma_form, "spec": spec.key(), "kappa": job.kappa, "value": value})


@cli.command("measure-density", context_settings=CONTEXT_SETTINGS)
@_job_options
@_form_options
@click.option("--p", "measure_primes", type=int, multiple=True, help="𝕊 の素数（複数指定可）")
@click.option("--truncation", "-L", type=int, default=None, help="展開の切断 ℓ₀ ≤ Λ")
@click.option("--grid", type=int, default=None, help="各角度方向の格子点数")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="格子点ごとの密度を書き出す CSV")
def measure_density(config_path, seed, out, cache_dir, sigma, sigma2, primes, kappa,
                    measure_primes, truncation, grid, csv_path):
    """Sato–Tate 測度に対する重み付き分布の密度を格子上で評価する。

    \b
    例:
      petersson-lab measure-density --p 3 --truncation 4 --grid 64 --csv density.csv
    """
    with _guard():
        settings, job = _prepare(
            "measure-density", config_path, seed=seed, out=out, cache_dir=cache_dir,
            sigma=sigma, sigma2=sigma2, primes=primes, kappa=kappa,
            measure_primes=measure_primes, truncation=truncation, grid=grid, csv=csv_path,
        )
        samples = density_samples(
            job.sigma_form,
            job.kappa,
            job.measure_primes,
            job.truncation,
            job.grid,
            cache=LValueCache(_cache_dir(settings, job) / "lvalues.json"),
            margin=job.margins[0],
            max_cells=settings.oracle_max_cells,
        )
        table = Table(title=f"密度（𝕊={list(samples.expansion.primes)}, Λ={job.truncation}, 格子 {job.grid}）")
        table.add_column("項目")
        table.add_column("値", justify="right")
        table.add_row("係数の個数", str(len(samples.expansion.coeffs)))
        table.add_row("全質量", f"{samples.total_mass():.10g}")
        table.add_row("max|density − 1|", f"{samples.max_deviation:.6g}")
        table.add_row("min density", f"{samples.density.min():.6g}")
        table.add_row("max|Im|", f"{samples.max_imag:.3g}")
        table.add_row("切断の裾の上界", f"{samples.expansion.tail_bound:.6g}")
        console.print(table)
        if job.csv is not None:
            path = write_csv(job.csv, samples.rows())
            console.print(f"[dim]→ CSV: {path}（{len(samples.angles)} 行）[/dim]")
        _write_out(
            job,
            {
                "expansion": samples.expansion,
                "total_mass": samples.total_mass(),
                "max_deviation": samples.max_deviation,
                "max_imag": samples.max_imag,
            },
        )


@cli.command(context_settings=CONTEXT_SETTINGS)
@_job_options
@click.option("--n", "n", type=int, default=None, help="階数 n")
@click.option("--max-l0", type=int, default=None, help="ℓ₀ ≤ max-l0 の支配的 λ を対象にする")
def characters(config_path, seed, out, cache_dir, n, max_l0):
    """Weyl 指標 F_λ の表を作る（キャッシュに保存）。

    \b
    例:
      petersson-lab characters --max-l0 6
    """
    with _guard():
        settings, job = _prepare(
            "characters", config_path, seed=seed, out=out, cache_dir=cache_dir, n=n, max_l0=max_l0,
            sigma=[[2 if i == j else 0 for j in range(n)] for i in range(n)] if n else None,
        )
        cache = CharacterTableCache(_cache_dir(settings, job) / "characters.json")
        table = Table(title=f"Weyl 指標（n={job.n}, ℓ₀ ≤ {job.max_l0}）")
        table.add_column("λ")
        table.add_column("次元", justify="right")
        table.add_column("項数", justify="right")
        table.add_column("F_λ(1)", justify="center")
        rows = []
        for lam in dominant_coweights(job.n, job.max_l0):
            element = cache.character(lam)
            ok = dimension_check(lam)
            dim = weyl_dimension(lam)
            table.add_row(str(lam), str(dim), str(len(element)), "[green]✓[/green]" if ok else "[red]✗[/red]")
            rows.append({"lam": lam, "dimension": dim, "character": element})
            if not ok:
                raise InvariantViolation(f"F_{lam}(1) が次元 {dim} と一致しません")
        console.print(table)
        _write_out(job, {"n": job.n, "characters": rows})


@cli.command(context_settings=CONTEXT_SETTINGS)
@_job_options
@click.option("--suite", "suites", multiple=True, type=click.Choice(list(SUITES)),
              help="実行するスイート（省略時はすべて）")
@click.option("--quick", is_flag=True, help="標本数を減らした軽量版")
@click.option("--kappa", "-k", type=int, default=None, help="アルキメデス・測度スイートの重さ κ")
def verify(config_path, seed, out, cache_dir, suites, quick, kappa):
    """検証スイートを実行する。すべて成功したときだけ終了コード 0。

    \b
    スイート:
      root_data    ペアリング・Weyl 群・ルート系
      cartan       Cartan 分解の分類
      arch         I_∞ の閉じた式と数値積分
      appendix_a   L² ノルム・交代和の恒等式・8 平方恒等式
      geometric    A の列挙と 𝕊=∅ の幾何側
      local        局所積分の明示公式とオラクル・上界
      measure      指標の直交性と密度の全質量
      error_bound  非対角項の評価

    \b
    例:
      petersson-lab verify
      petersson-lab verify --suite local --suite measure --out report.json
    """
    with _guard():
        settings, job = _prepare(
            "verify", config_path, seed=seed, out=out, cache_dir=cache_dir, suites=suites, kappa=kappa,
        )
        opts = VerifyOptions(
            seed=job.seed,
            quick=quick,
            kappa=job.kappa,
            sweep_primes=tuple(job.sweep_primes),
            max_tau=job.max_tau,
            error_constant=settings.error_constant,
            max_cells=settings.oracle_max_cells,
            cache=LValueCache(_cache_dir(settings, job) / "lvalues.json"),
        )
        results = run_suites(job.suites, opts)

    table = Table(title=f"検証結果（seed={job.seed}{', quick' if quick else ''}）")
    table.add_column("スイート")
    table.add_column("検査数", justify="right")
    table.add_column("失敗", justify="right")
    table.add_column("時間", justify="right")
    table.add_column("", justify="center")
    for res in results:
        table.add_row(
            res.name,
            str(res.checks),
            str(len(res.failures)),
            f"{res.seconds:.1f}s",
            "[green]✓[/green]" if res.passed else "[red]✗[/red]",
        )
    console.print(table)
    for res in results:
        for note in res.notes:
            console.print(f"  [dim]{res.name}: {note}[/dim]")
        for failure in res.failures[:5]:
            console.print(f"  [red]{res.name}: {failure}[/red]")
        if len(res.failures) > 5:
            console.print(f"  [red]{res.name}: ほか {len(res.failures) - 5} 件[/red]")

    passed = all(res.passed for res in results)
    with _guard():
        _write_out(job, {"seed": job.seed, "quick": quick, "passed": passed, "suites": results})
    if not passed:
        sys.exit(1)
    console.print("[bold green]✓ すべてのスイートが成功しました[/bold green]")


@cli.command("error-bound", context_settings=CONTEXT_SETTINGS)
@_job_options
@_form_options
@click.option("--level", "-N", "level", type=int, default=None, help="レベル N")
@click.option("--r", "r", type=int, default=None, help="相似係数 r（省略時は 𝕊 から）")
@click.option("--main", "with_main", is_flag=True, help="主要項 M(f)（幾何側）も計算する")
def error_bound(config_path, seed, out, cache_dir, sigma, sigma2, primes, kappa, level, r, with_main):
    """非対角項の上界 C·κ^{21/2}(8r)^{κ/2}/N^{κ−12} を計算する（n=2, κ ≥ 17）。

    C は PETERSSON_ERROR_CONSTANT（既定 1）。真の定数は未知なので目安として使う。

    \b
    例:
      petersson-lab error-bound -k 20 -N 11 --r 3
      petersson-lab error-bound -k 20 -N 11 --prime '3:1,0,0' --main
    """
    with _guard():
        settings, job = _prepare(
            "error-bound", config_path, seed=seed, out=out, cache_dir=cache_dir,
            sigma=sigma, sigma2=sigma2, primes=primes, kappa=kappa, level=level, r=r,
        )
        spec = job.similitude_spec
        r = job.r if job.r is not None else spec.r
        params = ErrorParams(kappa=job.kappa, r=r, N=job.level)
        bound = off_diagonal_bound(params, settings.error_constant)
        payload: dict = {
            "kappa": job.kappa,
            "r": r,
            "N": job.level,
            "constant": settings.error_constant,
            "bound": bound,
            "constant_caveat": True,
        }
        lines = [f"|E(f)| ≤ [bold]{bound:.6g}[/bold]（C={settings.error_constant:g}）"]
        if with_main:
            result = quantitative_formula(
                job.sigma_form, job.sigma2_form, spec, job.kappa, job.level, constant=settings.error_constant
            )
            lo, hi = result.window
            payload["quantitative"] = result
            lines.append(f"M(f) = {result.main:.12g}")
            lines.append(f"スペクトル側 ∈ [{lo:.6g}, {hi:.6g}]")
        console.print(Panel("\n".join(lines), title=f"κ={job.kappa}, r={r}, N={job.level}", style="blue"))
        console.print("[dim]※ 絶対定数は与えられていないため、上界は C 倍を除いて意味を持ちます[/dim]")
        _write_out(job, payload)


@cli.command(context_settings=CONTEXT_SETTINGS)
@_job_options
@click.option("--p", "sweep_primes", type=int, multiple=True, help="走査する素数（複数指定可）")
@click.option("--max-tau", type=int, default=None, help="τ ≤ max-tau を走査する")
@click.option("--margin", "margins", type=int, multiple=True, help="オラクルの法の余裕 e")
def sweep(config_path, seed, out, cache_dir, sweep_primes, max_tau, margins):
    """局所積分の明示公式とオラクルを (p, τ, t, α, β, σ_U) で走査して突き合わせる。

    \b
    例:
      petersson-lab sweep --p 3 --p 5 --max-tau 4
      petersson-lab sweep --config jobs/sweep.yml --out sweep.json
    """
    with _guard():
        settings, job = _prepare(
            "sweep", config_path, seed=seed, out=out, cache_dir=cache_dir,
            sweep_primes=sweep_primes, max_tau=max_tau, margins=margins,
        )
        summary = run_sweep(job.sweep_primes, job.max_tau, job.margins[0], settings.oracle_max_cells)

    table = Table(title=f"明示公式とオラクルの走査（τ ≤ {job.max_tau}）")
    table.add_column("p", justify="right")
    table.add_column("点数", justify="right")
    table.add_column("明示公式の対象", justify="right")
    table.add_column("不一致", justify="right")
    for p, (total, covered, bad) in summary.by_prime().items():
        table.add_row(str(p), str(total), str(covered), f"[red]{bad}[/red]" if bad else "0")
    console.print(table)
    for rec in summary.mismatches[:10]:
        console.print(
            f"  [red]✗ p={rec.spec.p}, τ={rec.spec.tau}, t={rec.spec.t}, α={rec.diag.alpha}, β={rec.diag.beta}, "
            f"σ_U={rec.diag.sigma_u}: {rec.explicit.value} ≠ {rec.oracle.value}[/red]"
        )
    with _guard():
        _write_out(job, summary)
    if summary.mismatches:
        sys.exit(1)
    console.print(f"[bold green]✓ 対象 {summary.covered} 点すべて一致[/bold green]")


# __main__.py 用のエントリポイント
def main():
    cli()


if __name__ == "__main__":
    main()
