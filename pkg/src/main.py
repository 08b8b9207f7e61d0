"""Convex Hölder Harness - 主程序入口"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv

# 添加项目根目录到 path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.errors import ConfigError, FitError, HarnessError
from src.experiments import SweepConfig, fit_loglog, run_sweep
from src.flat import bounded_lipschitz_distance
from src.geometry import Polytope, load_body
from src.measures import (
    DiscreteMeasure,
    ShellSampler,
    exact_support_measure,
    extract_support_measures,
    intrinsic_volumes,
    vandermonde_coefficients,
)
from src.normal_cycle import evaluate_normal_cycle, form_by_name, orientation_positivity
from src.outputs import ReportWriter, read_report_csv
from src.settings import Settings, load_settings, resolve_path

logger = logging.getLogger("Main")


def banner(title: str) -> None:
    print("\n" + "=" * 50)
    print(title)
    print("=" * 50)


def cmd_bodies_validate(args, settings: Settings) -> int:
    body = load_body(resolve_path(args.file))
    print(f"[Bodies] {body!r}")
    print(f"  - 维度: {body.dim}")
    print(f"  - 满维: {'是' if body.is_full_dimensional else '否'}")
    print(f"  - 外接半径: {body.circumradius():.6g}")
    if body.is_full_dimensional:
        volumes = intrinsic_volumes(body)
        print("  - 内蕴体积: " + ", ".join(f"V_{i}={v:.8g}" for i, v in enumerate(volumes)))
    return 0


def cmd_measures_exact(args, settings: Settings) -> int:
    body = load_body(resolve_path(args.body))
    if not isinstance(body, Polytope):
        raise ConfigError(f"精确离散化要求多胞形，收到 {body!r}")
    indices = args.index if args.index is not None else list(range(body.dim))
    for i in indices:
        q = exact_support_measure(body, i, args.mesh)
        print(f"[Measures] Λ_{i}: {len(q.measure)} 个原子，总质量 {q.measure.total_mass:.10g}，离散化界 {q.bound:.3g}")
        if args.out:
            path = resolve_path(f"{args.out}_{i}.json")
            q.measure.dump(path)
            print(f"  已保存: {path}")
    return 0


def cmd_measures_mc(args, settings: Settings) -> int:
    body = load_body(resolve_path(args.body))
    samples = args.samples or settings.sampling.samples
    system = vandermonde_coefficients(body.dim)
    mus = []
    for rho in system.radii:
        sampler = ShellSampler(body, float(rho), args.seed, samples,
                               shard_size=settings.sampling.shard_size, workers=settings.sampling.workers)
        mu, err = sampler.sample()
        print(f"[Sampler] ρ={rho:g}: {len(mu)} 个样本，总质量 {mu.total_mass:.6g} ± {err:.2g}")
        mus.append(mu)
    volumes = intrinsic_volumes(body)
    for i, lam in enumerate(extract_support_measures(mus, system)):
        print(f"[Measures] Λ_{i}: 总质量 {lam.total_mass:.6g}（V_{i} = {volumes[i]:.6g}）")
        if args.out:
            path = resolve_path(f"{args.out}_{i}.json")
            lam.dump(path)
            print(f"  已保存: {path}")
    return 0


def cmd_dbl(args, settings: Settings) -> int:
    mu = DiscreteMeasure.load(resolve_path(args.measure_a))
    nu = DiscreteMeasure.load(resolve_path(args.measure_b))
    cert = bounded_lipschitz_distance(
        mu, nu, oracle=args.oracle, cap=settings.flat.oracle_cap, tol=settings.flat.tol,
        neighbors=settings.flat.flow_neighbors, max_rounds=settings.flat.flow_max_rounds,
    )
    print(f"[DBL] d_bL = {cert.value!r}（{cert.solver}，{cert.iterations} 轮）")
    print(f"  - 盒约束残差: {cert.box_residual:.2g}")
    print(f"  - Lipschitz 残差: {cert.lipschitz_residual:.2g}")
    print(f"  - 目标值残差: {cert.objective_residual:.2g}")
    return 0


def cmd_nc_eval(args, settings: Settings) -> int:
    body = load_body(resolve_path(args.body))
    q = settings.quadrature
    level = args.level or q.level
    for name in args.form:
        phi = form_by_name(name, body.dim)
        value, err = evaluate_normal_cycle(body, phi, level=level, tol=q.tol, order=q.gauss_order,
                                           workers=settings.sampling.workers)
        print(f"[NormalCycle] T_K({name}) = {value!r}，err_est = {err:.2g}")
    lowest = orientation_positivity(body, level=max(1, level - 1), order=q.gauss_order)
    print(f"[NormalCycle] 定向行列式最小值: {lowest:.6g}")
    return 0 if lowest > 0 else 1


def cmd_sweep_run(args, settings: Settings) -> int:
    cfg = SweepConfig.load(args.config_file).with_overrides(
        samples=args.samples, seed=args.seed, coarsen_h=args.coarsen_h, output=args.output,
    )
    writer = ReportWriter(cfg.output or settings.sweep.output_dir)
    report = run_sweep(cfg, settings, writer)

    banner("门限结果")
    for gate in report.gates:
        print(f"  [{'通过' if gate.passed else '失败'}] {gate.name}: {gate.detail}")
    return 0 if report.passed else 1


def cmd_sweep_fit(args, settings: Settings) -> int:
    header, columns = read_report_csv(args.report)
    if "d_h" not in columns:
        raise FitError("报告缺少 d_h 列")
    x = columns["d_h"]
    for name in header:
        if not (name.startswith("dbl_") or name.startswith("dT_")) or name.endswith("_err"):
            continue
        try:
            slope, intercept, residual = fit_loglog(x, columns[name])
        except FitError as e:
            print(f"[Fit] {name}: 跳过（{e}）")
            continue
        print(f"[Fit] {name}: 斜率 {slope:.4f}，截距 {intercept:.4f}，最大残差 {residual:.2g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="harness", description="凸体支撑测度与 normal cycle 的 Hölder 稳定性实验")
    parser.add_argument("--config", help="YAML 配置文件（默认 config/harness.yaml）")
    parser.add_argument("--verbose", "-v", action="store_true", help="输出调试日志")
    sub = parser.add_subparsers(dest="command", required=True)

    bodies = sub.add_parser("bodies", help="凸体文件").add_subparsers(dest="action", required=True)
    validate = bodies.add_parser("validate", help="校验凸体文件")
    validate.add_argument("file")
    validate.set_defaults(handler=cmd_bodies_validate)

    measures = sub.add_parser("measures", help="支撑测度").add_subparsers(dest="action", required=True)
    exact = measures.add_parser("exact", help="多胞形支撑测度的精确离散化")
    exact.add_argument("body")
    exact.add_argument("--index", type=int, action="append", help="支撑测度下标，可重复")
    exact.add_argument("--mesh", type=float, default=0.02, help="小块直径上界 h")
    exact.add_argument("--out", help="输出文件前缀")
    exact.set_defaults(handler=cmd_measures_exact)
    mc = measures.add_parser("mc", help="Monte Carlo + Vandermonde 反解")
    mc.add_argument("body")
    mc.add_argument("--samples", type=int)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--out", help="输出文件前缀")
    mc.set_defaults(handler=cmd_measures_mc)

    dbl = sub.add_parser("dbl", help="两个测度文件之间的 d_bL")
    dbl.add_argument("measure_a")
    dbl.add_argument("measure_b")
    dbl.add_argument("--oracle", action="store_true", help="使用精确 LP（受原子数上限限制）")
    dbl.set_defaults(handler=cmd_dbl)

    nc = sub.add_parser("nc", help="normal cycle").add_subparsers(dest="action", required=True)
    nc_eval = nc.add_parser("eval", help="计算 T_K(φ)")
    nc_eval.add_argument("body")
    nc_eval.add_argument("--form", action="append", required=True, help="perimeter2d | turning2d | poly:<seed>")
    nc_eval.add_argument("--level", type=int)
    nc_eval.set_defaults(handler=cmd_nc_eval)

    sweep = sub.add_parser("sweep", help="δ 扫描").add_subparsers(dest="action", required=True)
    run = sweep.add_parser("run", help="执行扫描")
    run.add_argument("config_file")
    run.add_argument("--samples", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--coarsen-h", dest="coarsen_h", type=float)
    run.add_argument("--output")
    run.set_defaults(handler=cmd_sweep_run)
    fit = sweep.add_parser("fit", help="对报告 CSV 做对数-对数拟合")
    fit.add_argument("report")
    fit.set_defaults(handler=cmd_sweep_fit)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """主程序"""
    # 加载环境变量（本地开发时使用 .env 文件）
    load_dotenv()

    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="[%(name)s] %(message)s",
    )

    print("=" * 50)
    print("Convex Hölder Harness - 支撑测度与 normal cycle 稳定性实验")
    print("=" * 50)

    try:
        settings = load_settings(args.config)
        banner(f"{args.command} {getattr(args, 'action', '')}".strip())
        code = args.handler(args, settings)
    except (HarnessError, OSError) as e:
        logger.error(f"{args.command} 失败: {e}")
        return 1

    banner("完成！" if code == 0 else "存在未通过的检查")
    return code


if __name__ == "__main__":
    sys.exit(main())
