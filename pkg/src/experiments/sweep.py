"""Sweep - δ 扫描：构造凸体对，计算 d_bL 与 normal cycle 差值，拟合斜率并判定门限"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import (
    ConfigError,
    FitError,
    HarnessError,
    IndexOutOfRangeError,
    InvalidSeedError,
    SweepRowError,
)
from ..flat import bounded_lipschitz_distance, coarsen
from ..geometry.bodies import ConvexBody, Polytope
from ..geometry.io import load_body
from ..measures import (
    DiscreteMeasure,
    ShellSampler,
    area_measure,
    exact_support_measure,
    extract_support_measures,
    shell_box,
    total_variation,
    vandermonde_coefficients,
)
from ..normal_cycle import evaluate_normal_cycle, form_by_name, holder_smoothing
from ..seeding import validate_seed
from ..settings import Settings, resolve_path
from .fit import LogLogFit, fit_loglog
from .scenarios import SCENARIOS, GeneratedPair, generate_pair

logger = logging.getLogger("Sweep")

MIN_SWEEP_SAMPLES = 10_000
# S_{n-1} = 2·Λ_{n-1} 的 u 边缘
MARGINAL_FACTOR = 2.0


@dataclass(frozen=True)
class SweepConfig:
    """一次 δ 扫描的全部参数"""

    name: str
    scenario: str
    base: str
    deltas: Tuple[float, ...]
    indices: Tuple[int, ...] = (0, 1)
    forms: Tuple[str, ...] = ("perimeter2d", "turning2d")
    samples: int = 200_000
    coarsen_h: float = 0.01
    mesh_h: float = 0.02
    seed: int = 0
    oracle: bool = True
    output: Optional[str] = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"未知场景: {self.scenario!r}，可选 {SCENARIOS}")
        if not self.deltas:
            raise ConfigError("δ 列表不能为空")
        if any(not d > 0 for d in self.deltas):
            raise ConfigError(f"δ 必须全部为正: {list(self.deltas)}")
        if any(a <= b for a, b in zip(self.deltas, self.deltas[1:])):
            raise ConfigError(f"δ 列表必须严格递减: {list(self.deltas)}")
        if self.samples < MIN_SWEEP_SAMPLES:
            raise ConfigError(f"样本数至少为 {MIN_SWEEP_SAMPLES}，收到 {self.samples}")
        if not self.coarsen_h > 0 or not self.mesh_h > 0:
            raise ConfigError("coarsen_h 与 mesh_h 必须为正")
        if not self.indices:
            raise ConfigError("至少需要一个支撑测度下标")
        try:
            validate_seed(self.seed)
        except InvalidSeedError as e:
            raise ConfigError(f"扫描配置的种子无效: {e}") from e

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SweepConfig":
        if not isinstance(data, dict):
            raise ConfigError("扫描配置必须是 JSON 对象")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"扫描配置含未知键: {sorted(unknown)}")
        try:
            values = dict(data)
            for key in ("deltas", "indices", "forms"):
                if key in values:
                    values[key] = tuple(values[key])
            values["deltas"] = tuple(float(d) for d in values["deltas"])
            return cls(**values)
        except KeyError as e:
            raise ConfigError(f"扫描配置缺少字段 {e}") from e
        except TypeError as e:
            raise ConfigError(f"扫描配置无效: {e}") from e

    @classmethod
    def load(cls, path: str) -> "SweepConfig":
        with open(resolve_path(path), "r", encoding="utf-8") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError(f"无法解析扫描配置 {path}: {e}") from e
        return cls.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        for key in ("deltas", "indices", "forms"):
            data[key] = list(data[key])
        return data

    def with_overrides(self, **overrides) -> "SweepConfig":
        """命令行覆盖，值为 None 的项忽略"""
        data = self.to_dict()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return SweepConfig.from_dict(data)


@dataclass(frozen=True)
class SweepRow:
    """一行结果；values 的键顺序即 CSV 列顺序"""

    delta: float
    values: Dict[str, float]

    def __getitem__(self, key: str) -> float:
        return self.values[key]


@dataclass(frozen=True)
class Gate:
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class SweepReport:
    config: SweepConfig
    rows: List[SweepRow]
    dim: int
    fits: Dict[str, LogLogFit] = field(default_factory=dict)
    gates: List[Gate] = field(default_factory=list)
    partial: bool = False

    @property
    def passed(self) -> bool:
        return not self.partial and all(g.passed for g in self.gates)

    @property
    def columns(self) -> List[str]:
        return list(self.rows[0].values) if self.rows else []

    def column(self, key: str) -> np.ndarray:
        return np.array([row[key] for row in self.rows])

    def max_ratio(self, key: str) -> float:
        return float(np.max(self.column(key))) if self.rows else math.nan


def _ratio(num: float, den: float) -> float:
    if den > 0:
        return num / den
    return 0.0 if num == 0 else math.inf


def _dbl(mu, nu, settings: Settings) -> float:
    cert = bounded_lipschitz_distance(
        mu, nu, tol=settings.flat.tol,
        neighbors=settings.flat.flow_neighbors, max_rounds=settings.flat.flow_max_rounds,
    )
    return cert.value


class PairEvaluator:
    """对一个凸体对计算一行的全部列"""

    def __init__(self, config: SweepConfig, settings: Settings):
        self.config = config
        self.settings = settings

    def support_measures_mc(self, body: ConvexBody, other: ConvexBody) -> Tuple[List[DiscreteMeasure], np.ndarray]:
        """
        MC + Vandermonde 反解 Λ_i；两个凸体在每个半径上共用采样盒与种子

        Returns:
            (Λ_0..Λ_{n-1}, 各 Λ_i 总质量的统计误差界)
        """
        system = vandermonde_coefficients(body.dim)
        mus, errors = [], []
        for rho in system.radii:
            sampler = ShellSampler(
                body, float(rho), self.config.seed, self.config.samples,
                box=shell_box(body, other, rho=float(rho)), shard_size=self.settings.sampling.shard_size,
            )
            mu, err = sampler.sample()
            mus.append(mu)
            errors.append(err)
        lambdas = extract_support_measures(mus, system)
        return lambdas, np.abs(system.coefficients) @ np.array(errors)

    def evaluate(self, pair: GeneratedPair) -> Dict[str, float]:
        cfg = self.config
        K, L = pair.K, pair.L
        n = K.dim
        for i in cfg.indices:
            if not 0 <= i <= n - 1:
                raise IndexOutOfRangeError(f"支撑测度下标 {i} 不在 0..{n - 1} 内")

        values: Dict[str, float] = {
            "d_h": pair.d_h,
            "d_h_bound": pair.error_bound,
            "parameter": pair.parameter,
        }

        lam_K, err_K = self.support_measures_mc(K, L)
        lam_L, err_L = self.support_measures_mc(L, K)
        use_oracle = cfg.oracle and isinstance(K, Polytope) and isinstance(L, Polytope)
        exact: Dict[int, Tuple[DiscreteMeasure, DiscreteMeasure, float]] = {}
        if use_oracle:
            for i in sorted(set(cfg.indices) | {n - 1}):
                qK = exact_support_measure(K, i, cfg.mesh_h)
                qL = exact_support_measure(L, i, cfg.mesh_h)
                exact[i] = (qK.measure, qL.measure, qK.bound + qL.bound)

        coarse: Dict[int, Tuple[DiscreteMeasure, DiscreteMeasure]] = {}
        for i in cfg.indices:
            cK, bK = coarsen(lam_K[i], cfg.coarsen_h)
            cL, bL = coarsen(lam_L[i], cfg.coarsen_h)
            coarse[i] = (cK, cL)
            dbl = _dbl(cK, cL, self.settings)
            err = bK + bL + float(err_K[i] + err_L[i])
            values[f"dbl_{i}"] = dbl
            values[f"dbl_{i}_err"] = err
            values[f"ratio_dbl_{i}"] = _ratio(dbl, math.sqrt(pair.d_h))
            if use_oracle:
                eK, eL, mesh_bound = exact[i]
                oracle = _dbl(eK, eL, self.settings)
                values[f"dbl_{i}_oracle"] = oracle
                values[f"oracle_gap_{i}"] = abs(dbl - oracle)
                values[f"oracle_tol_{i}"] = err + mesh_bound + self.settings.flat.tol

        exponent = 1.0 / (2 * n + 1)
        for name in cfg.forms:
            phi = form_by_name(name, n)
            q = self.settings.quadrature
            tK, tK_err = evaluate_normal_cycle(K, phi, level=q.level, tol=q.tol, order=q.gauss_order)
            tL, tL_err = evaluate_normal_cycle(L, phi, level=q.level, tol=q.tol, order=q.gauss_order)
            values[f"dT_{name}"] = abs(tK - tL)
            values[f"dT_{name}_err"] = tK_err + tL_err
            values[f"ratio_dT_{name}"] = _ratio(abs(tK - tL), pair.d_h ** exponent)

        # 面积测度：全变差与 d_bL 的对照，以及边缘不等式
        top = n - 1
        if top in exact:
            top_K, top_L = exact[top][0], exact[top][1]
        elif top in coarse:
            top_K, top_L = coarse[top]
        else:
            top_K, _ = coarsen(lam_K[top], cfg.coarsen_h)
            top_L, _ = coarsen(lam_L[top], cfg.coarsen_h)
        area_K, area_L = area_measure(top_K), area_measure(top_L)
        dbl_top = _dbl(top_K, top_L, self.settings)
        dbl_area = _dbl(area_K, area_L, self.settings)
        values["tv_area"] = total_variation(area_K, area_L)
        values["dbl_area"] = dbl_area
        values["dbl_top"] = dbl_top
        values["area_bound_ok"] = float(dbl_area <= MARGINAL_FACTOR * dbl_top + 10 * self.settings.flat.tol)

        eps, bound = holder_smoothing(pair.d_h, n) if pair.d_h > 0 else (0.0, 0.0)
        values["holder_eps"] = eps
        values["holder_bound"] = bound
        return values


class SweepRunner:
    """
    扫描主流程

    各行互相独立，在线程池中并发执行，按 δ 顺序组装；某行失败时先写出已完成的行，
    再抛出 SweepRowError。
    """

    def __init__(self, config: SweepConfig, settings: Optional[Settings] = None, writer=None):
        """
        Args:
            config: 扫描配置
            settings: 全局配置，缺省为默认值
            writer: 带 write(report) 方法的报告写出器；None 时不落盘
        """
        self.config = config
        self.settings = settings or Settings()
        self.writer = writer
        self.evaluator = PairEvaluator(config, self.settings)

    def _run_row(self, base: ConvexBody, delta: float) -> SweepRow:
        try:
            pair = generate_pair(self.config.scenario, base, delta, self.config.seed)
            values = {"delta": float(delta), **self.evaluator.evaluate(pair)}
        except HarnessError as e:
            raise SweepRowError(str(e), delta) from e
        logger.info(f"δ={delta:g}: d_H={pair.d_h:.6g}，" + "，".join(
            f"d_bL(Λ_{i})={values[f'dbl_{i}']:.4g}" for i in self.config.indices
        ))
        return SweepRow(float(delta), values)

    def run(self) -> SweepReport:
        cfg = self.config
        base = load_body(resolve_path(cfg.base))
        logger.info(f"扫描 {cfg.name}: 场景 {cfg.scenario}，{len(cfg.deltas)} 个 δ，{base!r}")

        workers = max(1, self.settings.sampling.workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(self._run_row, base, d) for d in cfg.deltas]
            rows, failure = [], None
            for future in futures:
                try:
                    rows.append(future.result())
                except SweepRowError as e:
                    logger.warning(f"行失败: {e}")
                    failure = failure or e

        report = SweepReport(cfg, rows, base.dim, partial=failure is not None)
        if rows:
            evaluate_gates(report, self.settings)
        if self.writer is not None:
            self.writer.write(report)
        if failure is not None:
            raise failure
        return report


def run_sweep(config: SweepConfig, settings: Optional[Settings] = None, writer=None) -> SweepReport:
    """
    执行 δ 扫描

    Raises:
        SweepRowError: 任一行失败（已完成的行先写出）
    """
    return SweepRunner(config, settings, writer).run()


def split_halves(deltas: Sequence[float]) -> Tuple[List[int], List[int]]:
    """按 δ 升序，较小的 ceil(m/2) 行为下半区间，其余为上半区间"""
    order = list(np.argsort(deltas))
    cut = math.ceil(len(order) / 2)
    return [int(k) for k in order[:cut]], [int(k) for k in order[cut:]]


def _stability_gate(report: SweepReport, key: str, factor: float, floor: float, lower, upper) -> Gate:
    ratios = report.column(key)
    if not upper:
        return Gate(f"stable:{key}", False, "上半区间为空，无法判定")
    low_max, up_max = float(np.max(ratios[lower])), float(np.max(ratios[upper]))
    ok = low_max <= factor * up_max + floor
    return Gate(f"stable:{key}", ok, f"下半最大 {low_max:.4g}，上半最大 {up_max:.4g}，因子 {factor:g}")


def evaluate_gates(report: SweepReport, settings: Settings) -> None:
    """拟合斜率并写入 report.fits 与 report.gates"""
    cfg, sweep = report.config, settings.sweep
    d_h = report.column("d_h")
    lower, upper = split_halves(report.column("delta"))
    exponent = 1.0 / (2 * report.dim + 1)
    gates: List[Gate] = []

    finite = all(math.isfinite(row[k]) for row in report.rows for k in row.values if k.startswith("ratio_"))
    gates.append(Gate("finite_ratios", finite, "全部比值列有限" if finite else "存在非有限比值"))

    for i in cfg.indices:
        key = f"dbl_{i}"
        y = report.column(key)
        try:
            report.fits[f"{key}:full"] = fit_loglog(d_h, y)
        except FitError as e:
            logger.warning(f"{key} 全区间拟合跳过: {e}")
        try:
            fit = fit_loglog(d_h[lower], y[lower])
            report.fits[f"{key}:lower"] = fit
            gates.append(Gate(f"slope:{key}", fit.slope >= sweep.slope_min,
                              f"下半斜率 {fit.slope:.4f}，门限 {sweep.slope_min:g}"))
        except FitError as e:
            gates.append(Gate(f"slope:{key}", False, f"行数不足，无法判定（{e}）"))
        gates.append(_stability_gate(report, f"ratio_{key}", sweep.stability_factor, 0.0, lower, upper))

        if f"oracle_gap_{i}" in report.rows[0].values:
            gaps, tols = report.column(f"oracle_gap_{i}"), report.column(f"oracle_tol_{i}")
            bad = int(np.sum(gaps > tols))
            gates.append(Gate(f"oracle:{i}", bad == 0, f"{bad} 行超出容差，最大差 {float(gaps.max()):.4g}"))

    for name in cfg.forms:
        key = f"dT_{name}"
        try:
            report.fits[f"{key}:full"] = fit_loglog(d_h, report.column(key))
        except FitError as e:
            logger.debug(f"{key} 拟合跳过: {e}")
        floor = float(np.max(report.column(f"{key}_err") / d_h ** exponent))
        gates.append(_stability_gate(report, f"ratio_{key}", sweep.stability_factor, floor, lower, upper))

    marginal = report.column("area_bound_ok")
    gates.append(Gate("area_marginal", bool(np.all(marginal == 1.0)),
                      f"{int(np.sum(marginal != 1.0))} 行违反 d_bL(S) <= 2·d_bL(Λ_(n-1))"))
    report.gates = gates
    for gate in gates:
        (logger.info if gate.passed else logger.warning)(f"[{'通过' if gate.passed else '失败'}] {gate.name}: {gate.detail}")
