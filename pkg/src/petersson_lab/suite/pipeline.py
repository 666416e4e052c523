"""検証スイートの実行：各モジュールの厳密性・オラクル一致・上界を確かめる

1 つのスイートが例外で止まっても残りは続行し、失敗として記録する。
"""

import itertools
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .. import logger as log
from ..arch_coeff import (
    degen_terms,
    formal_degree,
    hc_formal_degree_ratio,
    integrability_predicate,
    lemma_sn_sides,
    lp_norm_closed,
    lp_norm_quadrature_n2,
)
from ..error_bound import (
    ErrorParams,
    euler_sum_check,
    kappa_exponent_profile,
    off_diagonal_bound,
)
from ..errors import UnsupportedRegime
from ..geom_side import (
    SimilitudeSpec,
    arch_factor,
    arch_factor_quadrature_n2,
    enumerate_A,
    enumerate_A_bruteforce,
    geometric_side,
    n1_count,
)
from ..local_gsp4 import (
    SweepRecord,
    root_count_bound,
    calibrate_conj_constant,
    conj_bound_check,
    ramanujan_sum,
    shift_invariant_vanishing,
    sweep,
)
from ..measure import (
    L_of_F,
    TorusPoint,
    char_eval,
    density_samples,
    deviation_by_prime,
    gram_matrix,
    weyl_character,
)
from ..padic_cartan import classify_coset, lambda_matrix, random_integral_symplectic
from ..quadform import HalfIntegralSymMat
from ..root_data import (
    Character,
    Coweight,
    WeylElement,
    all_roots,
    bilinear_form,
    coroot_of,
    dominant_coweights,
    dominant_rep,
    generators,
    pair,
    relation_vector,
    rho,
    weyl_apply,
    weyl_dimension,
    weyl_group,
)
from .state import LValueCache

VANISH_TAGS = ("support-vanish", "det-order-vanish", "shift-a-vanish", "shift-b-vanish", "gap1-vanish", "gap2-vanish")

TEST_FORMS = (
    HalfIntegralSymMat.from_abc(1, 0, 1),
    HalfIntegralSymMat.from_abc(1, 1, 1),
    HalfIntegralSymMat.from_abc(1, 0, 2),
    HalfIntegralSymMat.from_abc(2, 1, 3),
    HalfIntegralSymMat.from_abc(1, 1, 2),
)


@dataclass
class SuiteResult:
    """1 スイートの結果（seconds は表示用で JSON には含めない）"""

    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, message: str) -> None:
        self.checks += 1
        if not ok:
            self.failures.append(message)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": self.checks,
            "failures": list(self.failures),
            "notes": list(self.notes),
        }


@dataclass
class VerifyOptions:
    seed: int = 0
    quick: bool = False
    kappa: int = 10
    sweep_primes: tuple[int, ...] = (3, 5, 7)
    max_tau: int = 6
    measure_prime: int = 3
    truncation: int = 6
    grid: int = 48
    trend_primes: tuple[int, ...] = (3, 5, 7, 11)
    trend_truncation: int = 2
    error_constant: float = 1.0
    max_cells: int = 200_000_000
    cache: LValueCache | None = None

    @property
    def samples(self) -> dict[str, int]:
        if self.quick:
            return {"cartan": 40, "degen": 50, "pairing": 50, "lemma": 20, "euler": 20, "max_r": 6}
        return {"cartan": 1000, "degen": 500, "pairing": 200, "lemma": 100, "euler": 100, "max_r": 25}


def _random_pgsp_character(n: int, rng: np.random.Generator) -> Character:
    ks = [int(k) for k in rng.integers(-4, 5, size=n)]
    if sum(ks) % 2:
        ks[0] += 1
    return Character((-sum(ks) // 2, *ks))


def _random_coweight(n: int, rng: np.random.Generator) -> Coweight:
    return Coweight(tuple(int(c) for c in rng.integers(-5, 6, size=n + 1)))


def _random_weyl(n: int, rng: np.random.Generator) -> WeylElement:
    group = weyl_group(n)
    return group[int(rng.integers(len(group)))]


def suite_root_data(result: SuiteResult, opts: VerifyOptions) -> None:
    rng = np.random.default_rng(opts.seed)
    for n in range(1, 5):
        for alpha in all_roots(n):
            result.check(pair(alpha, coroot_of(alpha)) == 2, f"⟨α, α∨⟩ ≠ 2: {alpha.k}")
        roots = set(all_roots(n))
        for g in generators(n):
            result.check({weyl_apply(g, a) for a in roots} == roots, f"生成元が Φ を保ちません (n={n})")
        rel = relation_vector(n)
        result.check(
            sum(a * b for a, b in zip(rho(n).two_chi, rel)) == 0, f"ρ が関係ベクトルと直交しません (n={n})"
        )
    for n in range(1, 4):
        closure = {WeylElement.identity(n)}
        frontier = list(closure)
        while frontier:
            nxt = []
            for w in frontier:
                for g in generators(n):
                    v = g.compose(w)
                    if v not in closure:
                        closure.add(v)
                        nxt.append(v)
            frontier = nxt
        result.check(len(closure) == 2**n * math.factorial(n), f"生成元の閉包の位数が違います (n={n})")
    for _ in range(opts.samples["pairing"]):
        n = int(rng.integers(2, 4))
        w = _random_weyl(n, rng)
        chi = _random_pgsp_character(n, rng)
        other = _random_pgsp_character(n, rng)
        lam = _random_coweight(n, rng)
        result.check(pair(weyl_apply(w, chi), weyl_apply(w, lam)) == pair(chi, lam), "ペアリングが W 不変でない")
        result.check(
            bilinear_form(weyl_apply(w, chi), weyl_apply(w, other)) == bilinear_form(chi, other),
            "(·,·) が W 不変でない",
        )
        dom, v = dominant_rep(lam)
        result.check(dom.is_dominant and weyl_apply(v, lam) == dom, f"dominant_rep が不正: {lam}")
        result.check(dominant_rep(weyl_apply(w, lam))[0] == dom, f"dominant_rep が軌道で不変でない: {lam}")


def suite_cartan(result: SuiteResult, opts: VerifyOptions) -> None:
    rng = np.random.default_rng(opts.seed)
    lams = [lam for lam in dominant_coweights(2, 4)]
    for i in range(opts.samples["cartan"]):
        p = (2, 3, 5)[i % 3]
        lam = lams[int(rng.integers(len(lams)))]
        k1 = random_integral_symplectic(2, rng, 6)
        k2 = random_integral_symplectic(2, rng, 6)
        label = classify_coset(k1 * lambda_matrix(lam, p) * k2, p)
        result.check(
            label.lam == lam and label.r_exponent == lam.l0,
            f"p={p}, λ={lam}: 分類結果 {label.lam}, r 指数 {label.r_exponent}",
        )


def suite_arch(result: SuiteResult, opts: VerifyOptions) -> None:
    sigma = HalfIntegralSymMat.identity(2)
    closed = float(arch_factor(sigma, sigma, opts.kappa))
    solutions = enumerate_A(sigma, sigma, 1)
    values = []
    for A in solutions[: 1 if opts.quick else 2]:
        q = arch_factor_quadrature_n2(sigma, sigma, A, 1, opts.kappa)
        values.append(q)
        result.check(abs(q.real - closed) <= 1e-3 * closed, f"求積 {q.real:.8g} と閉じた式 {closed:.8g} が不一致")
        result.check(abs(q.imag) <= 1e-6 * abs(q), f"求積の虚部が大きすぎます: {q.imag:.3g}")
    if len(values) == 2:
        result.check(abs(values[0] - values[1]) <= 1e-6 * abs(values[0]), "A によって I_∞ が変わります")
    ratios = {formal_degree(k, 2) / hc_formal_degree_ratio(k, 2) for k in range(5, 15)}
    result.check(len(ratios) == 1, "d_κ が Harish-Chandra の積に比例しません")
    for k in range(3, 13):
        result.check(integrability_predicate(k, 2) == (k > 4), f"可積分性の判定が κ={k} で不正")


def suite_appendix_a(result: SuiteResult, opts: VerifyOptions) -> None:
    rng = np.random.default_rng(opts.seed)
    exact = lp_norm_closed(10, 2, 2)
    result.check(exact == Fraction(4, 153), f"‖f‖₂² = {exact} ≠ 4/153")
    numeric = lp_norm_quadrature_n2(10, 2)
    result.check(abs(numeric - float(exact)) <= 1e-4 * float(exact), f"L² ノルムの求積 {numeric:.10g} が不一致")
    for k in range(5, 15):
        result.check(formal_degree(k, 2) * lp_norm_closed(k, 2, 2) == 1, f"d_κ‖f‖² ≠ 1 (κ={k})")
    for _ in range(opts.samples["lemma"]):
        n = int(rng.integers(1, 6))
        bs = [Fraction(int(rng.integers(1, 30)), int(rng.integers(1, 12))) for _ in range(n)]
        lhs, rhs = lemma_sn_sides(bs)
        result.check(lhs == rhs, f"交代和の恒等式が不成立: b={bs}")
    for _ in range(opts.samples["degen"]):
        rows = rng.integers(-9, 10, size=(4, 4)).tolist()
        first, second, X = degen_terms(rows)
        result.check(first * second == sum(x * x for x in X), f"8 平方恒等式が不成立: {rows}")


def suite_geometric(result: SuiteResult, opts: VerifyOptions) -> None:
    sigma = HalfIntegralSymMat.identity(2)
    empty = SimilitudeSpec()
    total = float(geometric_side(sigma, sigma, empty, opts.kappa).total)
    expected = n1_count(sigma) * float(arch_factor(sigma, sigma, opts.kappa))
    result.check(abs(total - expected) <= 1e-12 * expected, f"𝕊=∅ の幾何側 {total} ≠ n₁·I_∞ {expected}")
    for form in TEST_FORMS:
        for r in range(1, opts.samples["max_r"] + 1):
            fast = enumerate_A(form, form, r)
            result.check(fast == enumerate_A_bruteforce(form, form, r), f"{form}, r={r}: 総当たりと不一致")
            result.check({A.dual(r) for A in fast} == set(fast), f"{form}, r={r}: r·A⁻¹ で閉じていません")
            result.check(all(abs(A.det) == r for A in fast), f"{form}, r={r}: |det A| ≠ r")


def suite_local(result: SuiteResult, opts: VerifyOptions) -> None:
    for p in (2, 3, 5, 7):
        m = 1
        while p**m <= 500:
            mod = p**m
            units = np.array([y for y in range(mod) if y % p], dtype=float)
            ells = np.arange(mod, dtype=float)
            brute = np.exp(2j * np.pi * np.outer(ells, units) / mod).sum(axis=1)
            exact = np.array([ramanujan_sum(ell, p, m) for ell in range(mod)], dtype=float)
            result.check(bool(np.all(np.abs(brute - exact) < 1e-6)), f"Ramanujan 和 c_{{{p}^{m}}} が不一致")
            m += 1

    primes = opts.sweep_primes[:1] if opts.quick else opts.sweep_primes
    max_tau = min(opts.max_tau, 3) if opts.quick else opts.max_tau
    records = list(sweep(primes, range(max_tau + 1), max_cells=opts.max_cells))
    constants = {p: calibrate_conj_constant(p, max_tau=max_tau) for p in primes}
    result.notes.append("C(p) = " + ", ".join(f"{p}: {c:.6g}" for p, c in constants.items()))
    covered = 0
    for rec in records:
        tag = f"p={rec.spec.p}, τ={rec.spec.tau}, t={rec.spec.t}, α={rec.diag.alpha}, β={rec.diag.beta}, {rec.diag.sigma_u}"
        oracle = rec.oracle.value
        if rec.covered:
            covered += 1
            result.check(rec.match, f"{tag}: 明示公式 {rec.explicit.value} ≠ オラクル {oracle}")
            if rec.explicit.provenance in VANISH_TAGS:
                result.check(oracle == 0, f"{tag}: {rec.explicit.provenance} なのにオラクルが {oracle}")
            if rec.explicit.provenance in ("equal-sum", "offset-sum"):
                result.check(abs(float(oracle)) <= root_count_bound(rec.spec), f"{tag}: 2p²p^{{3τ/4}} を超えます")
        if shift_invariant_vanishing(rec.spec, rec.diag):
            result.check(oracle == 0, f"{tag}: 平行移動不変なのにオラクルが {oracle}")
        result.check(rec.within_trivial_bound, f"{tag}: 自明な上界を超えます")
        result.check(
            conj_bound_check(rec.spec, rec.diag, oracle, constants[rec.spec.p]), f"{tag}: ε=0.01 の上界を超えます"
        )
    result.notes.append(f"走査 {len(records)} 点のうち明示公式の対象 {covered} 点")


def suite_measure(result: SuiteResult, opts: VerifyOptions) -> None:
    for lam in dominant_coweights(2, 8):
        char = weyl_character(lam)
        result.check(char.is_weyl_symmetric(), f"F_{lam} が W 不変でない")
        value = char_eval(lam, TorusPoint.identity(2))
        result.check(abs(value - weyl_dimension(lam)) < 1e-9, f"F_{lam}(1) が次元 {weyl_dimension(lam)} と違う")
    lams = dominant_coweights(2, 3)
    gram = gram_matrix(lams, grid=max(opts.grid, 32))
    result.check(np.max(np.abs(gram - np.eye(len(lams)))) < 1e-4, "指標の Gram 行列が単位行列から外れます")

    sigma = HalfIntegralSymMat.identity(2)
    zero = {opts.measure_prime: Coweight.zero(2)}
    value = L_of_F(zero, sigma, opts.kappa, cache=opts.cache)
    result.check(abs(value - 1.0) <= 1e-12, f"𝓛(F_0) = {value!r} ≠ 1")
    truncation = min(opts.truncation, 2) if opts.quick else opts.truncation
    samples = density_samples(
        sigma, opts.kappa, [opts.measure_prime], truncation, opts.grid, cache=opts.cache, max_cells=opts.max_cells
    )
    mass = samples.total_mass()
    result.check(abs(mass - 1.0) <= 0.05, f"密度の全質量 {mass:.6g} が 1 から外れます")
    result.check(samples.max_imag < 1e-9, f"密度の虚部 {samples.max_imag:.3g}")
    if samples.density.min() < 0:
        result.notes.append(f"切断密度に負の値があります（最小 {samples.density.min():.4g}）")

    primes = opts.trend_primes[:2] if opts.quick else opts.trend_primes
    deviations = deviation_by_prime(sigma, opts.kappa, primes, opts.trend_truncation, cache=opts.cache)
    trend = ", ".join(f"p={p}: {d:.4g}" for p, d in deviations.items())
    values = list(deviations.values())
    if all(a >= b for a, b in zip(values, values[1:])):
        result.notes.append(f"max|density−1| は p について非増加: {trend}")
    else:
        log.warn(f"max|density−1| が p について単調ではありません: {trend}")
        result.notes.append(f"max|density−1| は単調ではありません: {trend}")


def suite_error_bound(result: SuiteResult, opts: VerifyOptions) -> None:
    rng = np.random.default_rng(opts.seed)
    try:
        ErrorParams(kappa=16)
        result.check(False, "κ=16 が受理されました")
    except UnsupportedRegime:
        result.check(True, "")
    c = opts.error_constant
    ratio = off_diagonal_bound(ErrorParams(17, 1, 3), c) / off_diagonal_bound(ErrorParams(17, 1, 6), c)
    result.check(abs(ratio - 32) <= 32e-12, f"N を 2 倍したときの比 {ratio} ≠ 2⁵")
    for k, r, N in itertools.product((17, 20, 30), (1, 3, 9), (2, 5, 11)):
        here = off_diagonal_bound(ErrorParams(k, r, N), c)
        result.check(off_diagonal_bound(ErrorParams(k, r, N + 1), c) < here, f"N について減少しない (κ={k})")
        result.check(off_diagonal_bound(ErrorParams(k, r + 1, N), c) > here, f"r について増加しない (κ={k})")
    for _ in range(opts.samples["euler"]):
        a = float(rng.uniform(-5, 5))
        delta = float(rng.uniform(0.1, 10))
        kappa = float(rng.uniform(2, 20))
        lhs, rhs = euler_sum_check(a, delta, kappa)
        result.check(lhs <= rhs, f"a={a:.4g}, Δ={delta:.4g}, κ={kappa:.4g}: {lhs:.6g} > {rhs:.6g}")
    last = kappa_exponent_profile([400])[0]
    result.check(abs(last["sphere_scaled"] / 3840 - 1) < 0.25, "κ⁶·½B(6,κ/2−6) が漸近値から外れます")
    limit = 0.5 * math.gamma(1.5) * 2**1.5
    result.check(abs(last["beta_scaled"] / limit - 1) < 0.25, "κ^{3/2}·½B(3/2,(κ−15)/2) が漸近値から外れます")


SUITES: dict[str, Callable[[SuiteResult, VerifyOptions], None]] = {
    "root_data": suite_root_data,
    "cartan": suite_cartan,
    "arch": suite_arch,
    "appendix_a": suite_appendix_a,
    "geometric": suite_geometric,
    "local": suite_local,
    "measure": suite_measure,
    "error_bound": suite_error_bound,
}


def run_suites(names: list[str] | None, opts: VerifyOptions) -> list[SuiteResult]:
    """名前付きスイートを順に実行する（None なら全部）"""
    names = list(SUITES) if not names else names
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"未知のスイートです: {unknown}（{', '.join(SUITES)}）")
    results = []
    for name in names:
        result = SuiteResult(name)
        with log.stage(name) as timing:
            log.step(f"スイート {name}")
            try:
                SUITES[name](result, opts)
            except Exception as e:
                log.warn(f"スイート {name} が例外で停止しました: {e}")
                result.failures.append(f"例外: {type(e).__name__}: {e}")
        result.seconds = timing["seconds"]
        if result.passed:
            log.success(f"{name}: {result.checks} 件すべて成功（{result.seconds:.1f} 秒）")
        else:
            log.error(f"{name}: {len(result.failures)} / {result.checks} 件失敗")
        results.append(result)
    return results


@dataclass
class SweepSummary:
    records: list[SweepRecord]

    @property
    def covered(self) -> int:
        return sum(1 for r in self.records if r.covered)

    @property
    def mismatches(self) -> list[SweepRecord]:
        return [r for r in self.records if not r.match]

    def by_prime(self) -> dict[int, tuple[int, int, int]]:
        """p → (点数, 明示公式の対象数, 不一致数)"""
        out: dict[int, list[int]] = {}
        for rec in self.records:
            row = out.setdefault(rec.spec.p, [0, 0, 0])
            row[0] += 1
            row[1] += rec.covered
            row[2] += not rec.match
        return {p: tuple(v) for p, v in sorted(out.items())}

    def to_json(self) -> dict:
        return {
            "records": [r.to_json() for r in self.records],
            "covered": self.covered,
            "mismatches": len(self.mismatches),
        }


def run_sweep(
    primes, max_tau: int, margin: int = 0, max_cells: int = 200_000_000
) -> SweepSummary:
    """明示公式とオラクルの一致を (p, τ ≤ max_tau) で走査する"""
    records = list(sweep(primes, range(max_tau + 1), margin=margin, max_cells=max_cells))
    summary = SweepSummary(records)
    log.step(f"走査 {len(records)} 点、明示公式の対象 {summary.covered} 点、不一致 {len(summary.mismatches)} 点")
    return summary
