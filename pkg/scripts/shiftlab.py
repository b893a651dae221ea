#!/usr/bin/env python3
"""
shiftlab 命令行

子命令：
  construct   构造 M(n,1) / M(n,d) / 截断树 / 随机图 / 完整顶点集并写入文件
  alpha       计算图文件的独立数、比值与 ⌈|G|/4⌉ 下界
  verify      对实例文件运行全部结构与界的检查，生成汇总报告
  experiment  扫描参数网格，输出 CSV 与 JSON 报告

退出码：0 全部通过，1 有检查未通过，2 用法 / I/O / 工具错误。
"""

import json
import logging
import sys
from fractions import Fraction
from functools import wraps
from math import ceil, comb
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

# 添加项目根目录到路径
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

import click
import jsonschema
import numpy as np
import pandas as pd
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from core.bounds import (
    check_claim_bound,
    check_recurrence,
    ratio_upper_bound,
    report_reference_bounds,
    tail_check,
)
from core.config import ExperimentConfig, load_config
from core.constructions import (
    LabeledTree,
    MndInstance,
    build_M1,
    build_Mnd,
    build_tree,
    certify_discrepancy,
)
from core.errors import ShiftLabError
from core.graph_io import (
    graph_to_document,
    instance_to_document,
    load_any,
    save_document,
    tree_to_document,
    write_edge_list,
)
from core.independence import (
    K4_PATTERNS,
    AlphaResult,
    brute_force_alpha,
    derandomized_quarter,
    exact_alpha_general,
    exact_alpha_k2,
    max_window_ratio,
    ordered_filter_density,
    p3_free_filter,
    pattern_density,
    random_coloring,
    TERNARY,
    validate_pattern_scheme,
)
from core.models import BlockParams, ExperimentReport, TailBoundInput, ratio_fields
from core.report_collector import (
    EXIT_CHECK_FAILED,
    EXIT_OK,
    EXIT_TOOL_ERROR,
    ReportCollector,
    report_exit_code,
    report_to_json,
    save_report,
)
from core.shift_graph import (
    KTupleSet,
    OrderedGraph,
    full_vertex_set,
    is_independent,
    longest_increasing_path,
    random_ordered_graph,
)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
# k4 扫描的元组数上限，超过时跳过该 n
K4_MAX_TUPLES = 5000
# k3 扫描的 n 上限
K3_MAX_N = 10
DENSITY_TOLERANCE = Fraction(1, 100)
SEED_DEFAULT = "SHIFTLAB_SEED 或 20240101"
BUDGET_DEFAULT = "超过 30 个非孤立顶点时 1000000，否则不限"

console = Console(stderr=True)
logger = logging.getLogger("shiftlab")


def _help(text: str, field_name: Optional[str] = None, default: Optional[str] = None) -> str:
    """选项说明后附默认值；未给 default 时取 ExperimentConfig 的字段默认值"""
    if default is None and field_name is not None:
        value = ExperimentConfig.model_fields[field_name].get_default(call_default_factory=True)
        default = ",".join(str(v) for v in value) if isinstance(value, list) else str(value)
    return f"{text}（默认 {default}）" if default else text


def _fail(error: Exception) -> None:
    payload = {"error": type(error).__name__, "message": str(error)}
    click.echo(json.dumps(payload, ensure_ascii=False), err=True)
    raise SystemExit(EXIT_TOOL_ERROR)


def handle_errors(func: Callable) -> Callable:
    """把可预期的失败映射为退出码 2 与标准错误上的 JSON"""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ValidationError, ShiftLabError, OSError, json.JSONDecodeError, jsonschema.ValidationError) as e:
            logger.debug("command failed", exc_info=True)
            _fail(e)

    return wrapper


def _int_list(value: Optional[str]) -> Optional[List[int]]:
    if value is None or value == "":
        return None
    return [int(part) for part in value.split(",") if part.strip()]


def _emit(report: ExperimentReport, output: Optional[str]) -> None:
    """有 --output 时写文件，否则输出到标准输出"""
    if output:
        path = save_report(report, output)
        console.print(f"[green]✅ report written to {path}[/green]")
    else:
        click.echo(report_to_json(report), nl=False)


def _to_graph(obj) -> OrderedGraph:
    if isinstance(obj, MndInstance):
        return obj.graph
    if isinstance(obj, LabeledTree):
        return obj.to_graph()
    return obj.to_ordered_graph()


@click.group()
@click.option("--log-level", default="WARNING", show_default=True,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
              help="日志级别（日志写到标准错误）")
def cli(log_level: str):
    """移位图独立集实验工具"""
    logging.basicConfig(level=getattr(logging, log_level.upper()), format=LOG_FORMAT,
                        stream=sys.stderr, force=True)


# ---------------------------------------------------------------- construct


def _construct_stem(config: ExperimentConfig) -> str:
    if config.family == "m1":
        return f"m1_n{config.n}"
    if config.family == "mnd":
        return f"mnd_n{config.n}_d{config.d}_seed{config.seed}"
    if config.family == "tree":
        suffix = "" if (config.root_children, config.slack) == (1, 0) else f"_r{config.root_children}_s{config.slack}"
        return f"tree_J{config.levels}{suffix}"
    if config.family == "random":
        return f"random_n{config.n}_seed{config.seed}"
    return f"full_n{config.n}_k{config.k}"


def run_construct(config: ExperimentConfig) -> Dict[str, Any]:
    """构造实例并写入 <output>/<stem>.json 与 <stem>.edges"""
    out_dir = Path(config.output or "output")
    stem = _construct_stem(config)
    summary: Dict[str, Any] = {"family": config.family, "stem": stem}

    if config.family == "mnd":
        params = BlockParams(n=config.n, d=config.d, epsilon=config.epsilon, seed=config.seed)
        instance = build_Mnd(params, resample_limit=config.resample_limit, mode=config.mode,
                             sample_count=config.sample_count)
        document, graph = instance_to_document(instance), instance.graph
        summary.update(certified=instance.certified, epsilon_hat=str(instance.epsilon_hat),
                       expected_edge_count=instance.expected_edge_count)
    elif config.family == "tree":
        tree = build_tree(config.levels, config.root_children, config.slack)
        document, graph = tree_to_document(tree), tree.to_graph()
        summary.update(vertex_count=tree.size, level_sizes=[len(level) for level in tree.levels])
    elif config.family == "m1":
        graph = build_M1(config.n)
        document = graph_to_document(graph, "m1", {"n": config.n})
    elif config.family == "random":
        probability = None if config.edge_count is not None else config.edge_probability
        graph = random_ordered_graph(config.n, config.seed, edge_count=config.edge_count, probability=probability)
        document = graph_to_document(graph, "random", {
            "n": config.n, "seed": config.seed, "edge_count": config.edge_count, "edge_probability": probability,
        })
    else:
        graph = full_vertex_set(config.n, config.k)
        document = graph_to_document(graph, "full", {"n": config.n, "k": config.k})

    json_path = save_document(document, out_dir / f"{stem}.json")
    edges_path = write_edge_list(graph, out_dir / f"{stem}.edges")
    summary.update(edge_count=len(graph), files=[str(json_path), str(edges_path)])
    return summary


@cli.command()
@click.option("--family", type=click.Choice(["m1", "mnd", "tree", "random", "full"]),
              help=_help("实例族", "family"))
@click.option("--n", "n", type=int, help=_help("顶点数", "n"))
@click.option("--d", "d", type=int, help=_help("M(n,d) 深度", "d"))
@click.option("--k", "k", type=int, help=_help("元组长度（full 族）", "k"))
@click.option("--epsilon", type=str, help=_help("差异预算，如 0.5 或 1/2", "epsilon"))
@click.option("--seed", type=int, help=_help("根种子", default=SEED_DEFAULT))
@click.option("--levels", type=int, help=_help("树的层数 J", "levels"))
@click.option("--root-children", type=int, help=_help("根的子节点数", "root_children"))
@click.option("--slack", type=int, help=_help("非根内部顶点额外的子节点数", "slack"))
@click.option("--resample-limit", type=int, help=_help("每层块最多重采样次数", "resample_limit"))
@click.option("--mode", type=click.Choice(["exhaustive", "intervals", "sampled"]),
              help=_help("强制认证模式", default="n ≤ 24 时 exhaustive，否则 sampled"))
@click.option("--sample-count", type=int, help=_help("采样认证的 (X, Y) 对数", "sample_count"))
@click.option("--edge-count", type=int,
              help=_help("random 族的边数", default="按 --edge-probability 逐对抽取"))
@click.option("--edge-probability", type=float, help=_help("random 族的边概率", "edge_probability"))
@click.option("--output", type=str, help="输出目录（默认 output/）")
@click.option("--config", "config_path", type=str, help="JSON 配置文件")
@handle_errors
def construct(config_path, **flags):
    """构造实例并写入 JSON 文档与边表文本"""
    config = load_config(config_path, flags)
    summary = run_construct(config)
    console.print(f"[bold]{summary['stem']}[/bold]: {summary['edge_count']} edges → {', '.join(summary['files'])}")
    click.echo(json.dumps(summary, indent=2, ensure_ascii=False))


# -------------------------------------------------------------------- alpha


def run_alpha(config: ExperimentConfig) -> ExperimentReport:
    kind, obj = load_any(config.input)
    collector = ReportCollector(kind="alpha-report")
    tuples = obj if isinstance(obj, KTupleSet) else _to_graph(obj).to_ktuple_set()

    if config.method == "brute":
        result = brute_force_alpha(tuples)
    elif config.method == "derandomized":
        if tuples.k != 2:
            raise ShiftLabError("the derandomized filter applies to k = 2 only")
        witness = derandomized_quarter(tuples.to_ordered_graph())
        result = AlphaResult(value=len(witness), witness=witness.to_ktuple_set(), method="derandomized",
                             optimal=False, size=len(tuples))
    elif tuples.k == 2:
        result = exact_alpha_k2(tuples.to_ordered_graph(), budget=config.budget)
    else:
        result = exact_alpha_general(tuples, budget=config.budget)

    floor = ceil(len(tuples) / 4)
    collector.run_check("witness_independent", "witness is an independent subset",
                        lambda: (is_independent(tuples, result.witness), {"witness_size": len(result.witness)}))
    if tuples.k == 2 and len(tuples):
        collector.run_check("quarter_floor", "alpha >= ceil(|G|/4)",
                            lambda: (result.value >= floor, {"value": result.value, "floor": floor}))

    payload = result.to_dict()
    payload.update(input=str(config.input), source_kind=kind, n=tuples.n, k=tuples.k, quarter_floor=floor,
                   reference_bounds=report_reference_bounds(tuples.k).to_dict() if tuples.k >= 2 else None)
    return collector.build_report(config=config.model_dump(mode="json"), seeds={"root_seed": config.seed},
                                  results=[payload])


@cli.command()
@click.option("--input", "input", type=str, required=True, help="实例文件（.json / .edges，可省略扩展名）")
@click.option("--budget", type=int, help=_help("搜索节点预算", default=BUDGET_DEFAULT))
@click.option("--method", type=click.Choice(["auto", "brute", "derandomized"]), help=_help("求解方式", "method"))
@click.option("--output", type=str, help="报告路径（默认输出到标准输出）")
@click.option("--config", "config_path", type=str, help="JSON 配置文件")
@handle_errors
def alpha(config_path, **flags):
    """计算独立数、比值 α/|G| 与 ⌈|G|/4⌉"""
    config = load_config(config_path, flags)
    report = run_alpha(config)
    result = report.results[0]
    console.print(f"α = {result['value']} / |G| = {result['size']}  (ratio {result['ratio']['exact']}, "
                  f"{result['method']}, optimal={result['optimal']})")
    _emit(report, config.output)
    raise SystemExit(report_exit_code(report))


# ------------------------------------------------------------------- verify


def _default_betas(n: int) -> List[int]:
    return list(range(n + 1)) if n <= 16 else sorted({n // 4, n // 2, 3 * n // 4})


def _combine(entries: List[Dict[str, Any]], conclusive_key: str = "conclusive") -> Optional[bool]:
    """结论性条目全部成立 → True；任一结论性条目不成立 → False；否则无法判定"""
    if any(e[conclusive_key] and not e["holds"] for e in entries):
        return False
    if all(e[conclusive_key] for e in entries):
        return all(e["holds"] for e in entries)
    return None


def _verify_mnd(instance: MndInstance, config: ExperimentConfig, collector: ReportCollector) -> Dict[str, Any]:
    n, d = instance.n, instance.d
    exact = instance.certification_exact

    collector.run_check("edge_count", "|M(n,d)| = d n^2 / 2^(d+1)", lambda: (
        instance.check_edge_count(),
        {"edge_count": len(instance.graph), "expected": instance.expected_edge_count},
    ))

    def halves():
        if d < 2:
            return None, {"reason": "d = 1 has no recursive halves"}
        return instance.halves_identical(), {}

    collector.run_check("halves_identical", "G[S] equals G[L] shifted by n/2", halves)

    def certificates():
        levels = []
        for record in instance.blocks:
            stored = record.certificate
            recomputed = certify_discrepancy(
                instance.level_block(record.level), record.d, instance.params.epsilon, mode=stored.mode,
                sample_count=stored.pairs_checked if stored.mode == "sampled" else 1,
                sample_seed=stored.sample_seed or 0,
            )
            levels.append({
                "level": record.level,
                "copies": record.copies,
                "mode": stored.mode,
                "stored_worst": str(stored.worst_deviation),
                "recomputed_worst": str(recomputed.worst_deviation),
                "budget": str(stored.budget),
                "reproduced": recomputed.worst_deviation == stored.worst_deviation,
                "certified": recomputed.passed,
            })
        flagged = [entry["level"] for entry in levels if not entry["certified"]]
        return all(entry["reproduced"] for entry in levels), {"levels": levels, "flagged_levels": flagged}

    collector.run_check("block_certificates", "discrepancy certificates reproduce", certificates)

    betas = config.beta or _default_betas(n)

    def recurrence():
        if d < 2:
            return None, {"reason": "the recurrence needs d >= 2"}
        entries = []
        for beta in betas:
            entry = check_recurrence(instance, beta, budget=config.budget).to_dict()
            entry["conclusive"] = entry["conclusive"] and exact
            entries.append(entry)
        return _combine(entries), {"betas": entries}

    collector.run_check("recurrence", "f-recurrence with measured epsilon", recurrence)

    def claim():
        entries = []
        for beta in betas:
            for variant in ("harmonic", "ln"):
                entry = check_claim_bound(instance, beta, variant, budget=config.budget).to_dict()
                entry["conclusive"] = entry["optimal"] and exact
                entries.append(entry)
        return _combine(entries), {"betas": entries}

    collector.run_check("claim_bound", "per-instance bound with measured epsilon", claim)

    def ratio():
        result = exact_alpha_k2(instance.graph, budget=config.budget)
        value = result.ratio
        ceiling = ratio_upper_bound(d, instance.epsilon_hat, "harmonic")
        in_range = value is not None and Fraction(1, 4) <= value <= 1
        entry = {
            "alpha": result.to_dict(),
            "upper_bound": str(ceiling),
            "in_range": in_range,
            "holds": in_range and value <= ceiling,
            "conclusive": result.optimal and exact,
        }
        entry["alpha"].pop("witness")
        return _combine([entry]), entry

    collector.run_check("alpha_ratio", "1/4 <= alpha/|G| <= ratio ceiling", ratio)

    def tail():
        top = instance.level_block(0)
        inp = TailBoundInput(N=(n // 2) ** 2, m=len(top), k=(n // 4) ** 2, t=instance.params.discrepancy_budget)
        outcome = tail_check(inp, config.trials, config.seed)
        return outcome["passed"], outcome

    collector.run_check("tail_bound", "hypergeometric tail vs Monte Carlo", tail)

    return {
        "kind": "mnd-instance",
        "n": n,
        "d": d,
        "seed": instance.params.seed,
        "edge_count": len(instance.graph),
        "certified": instance.certified,
        "epsilon_hat": str(instance.epsilon_hat),
    }


def _verify_tree(tree: LabeledTree, config: ExperimentConfig, collector: ReportCollector) -> Dict[str, Any]:
    collector.run_check("growth", "|N+(v)| >= 2^j * sum of earlier child counts", lambda: (
        tree.growth_holds() and all(g.actual == tree.child_count(g.vertex) for g in tree.growth_log),
        {"vertex_count": tree.size, "level_sizes": [len(level) for level in tree.levels]},
    ))

    def windows():
        entries = []
        for child, parent in sorted(tree.parent.items()):
            if child not in tree.children:
                continue
            if config.level is not None and tree.level_of[child] != config.level:
                continue
            check = max_window_ratio(tree, (parent, child), budget=config.budget)
            entry = check.to_dict()
            entry["holds"] = check.upper_holds and check.lower_holds
            entry["conclusive"] = check.optimal
            entries.append(entry)
        if not entries:
            return None, {"reason": "no internal parent-child edge at the requested level"}
        return _combine(entries), {"edges": entries}

    collector.run_check("window_bound", "|I[W]|/|G[W]| <= 2^-j for the worst independent I", windows)
    return {"kind": "tree-instance", "vertex_count": tree.size, "levels": tree.depth}


def _verify_graph(tuples: KTupleSet, config: ExperimentConfig, collector: ReportCollector) -> Dict[str, Any]:
    if tuples.k == 2 and len(tuples):
        graph = tuples.to_ordered_graph()
        floor = ceil(len(graph) / 4)

        def quarter():
            witness = derandomized_quarter(graph)
            return len(witness) >= floor and is_independent(graph, witness), {"size": len(witness), "floor": floor}

        collector.run_check("derandomized_quarter", "derandomized filter keeps >= ceil(|G|/4)", quarter)

        def exact():
            result = exact_alpha_k2(graph, budget=config.budget)
            verdict = result.value >= floor
            return (verdict if result.optimal or verdict else None), {"value": result.value, "floor": floor,
                                                                      "optimal": result.optimal}

        collector.run_check("alpha_floor", "alpha >= ceil(|G|/4)", exact)
    if tuples.k == 4:
        collector.run_check("k4_scheme", "pattern scheme keeps no adjacent pair",
                            lambda: (validate_pattern_scheme(K4_PATTERNS), {"patterns": list(K4_PATTERNS)}))
    return {"kind": "graph-instance", "n": tuples.n, "k": tuples.k, "edge_count": len(tuples)}


def run_verify(config: ExperimentConfig) -> ExperimentReport:
    kind, obj = load_any(config.input)
    collector = ReportCollector(kind="verification-report")
    if isinstance(obj, MndInstance):
        summary = _verify_mnd(obj, config, collector)
        seeds = {"root_seed": config.seed, "instance_seed": obj.params.seed,
                 "block_seeds": [r.seed for r in obj.blocks]}
    elif isinstance(obj, LabeledTree):
        summary = _verify_tree(obj, config, collector)
        seeds = {"root_seed": config.seed}
    else:
        summary = _verify_graph(obj, config, collector)
        seeds = {"root_seed": config.seed}
    summary["source"] = str(config.input)
    return collector.build_report(config=config.model_dump(mode="json"), seeds=seeds, results=[summary])


def _print_checks(report: ExperimentReport) -> None:
    table = Table(title="verification")
    table.add_column("check")
    table.add_column("status")
    colors = {"passed": "green", "failed": "red", "errored": "magenta", "skipped": "yellow"}
    for check in report.checks:
        status = check["status"]
        table.add_row(check["check_id"], f"[{colors[status]}]{status}[/{colors[status]}]")
    console.print(table)


@cli.command()
@click.option("--instance", "input", type=str, required=True, help="实例文件（可省略扩展名）")
@click.option("--level", type=int, help=_help("树窗口只检查该层的边", default="全部层"))
@click.option("--beta", type=str,
              help=_help("逗号分隔的蓝色数，如 0,4,8", default="n ≤ 16 时 0..n，否则 n/4,n/2,3n/4"))
@click.option("--trials", type=int, help=_help("尾界 Monte Carlo 次数", "trials"))
@click.option("--budget", type=int, help=_help("搜索节点预算", default=BUDGET_DEFAULT))
@click.option("--seed", type=int, help=_help("Monte Carlo 种子", default=SEED_DEFAULT))
@click.option("--output", type=str, help="报告路径（默认输出到标准输出）")
@click.option("--config", "config_path", type=str, help="JSON 配置文件")
@handle_errors
def verify(config_path, beta, **flags):
    """对实例运行全部检查并输出汇总报告"""
    flags["beta"] = _int_list(beta)
    config = load_config(config_path, flags)
    report = run_verify(config)
    _print_checks(report)
    _emit(report, config.output)
    raise SystemExit(report_exit_code(report))


# --------------------------------------------------------------- experiment


def _mnd_rows(config: ExperimentConfig) -> List[Dict[str, Any]]:
    rows = []
    for seed in config.sweep_seeds():
        for n in config.n_values:
            for d in config.d_values:
                if n < 2 ** d or n % 2 ** d:
                    continue
                instance = build_Mnd(BlockParams(n=n, d=d, epsilon=config.epsilon, seed=seed),
                                     resample_limit=config.resample_limit, sample_count=config.sample_count)
                result = exact_alpha_k2(instance.graph, budget=config.budget)
                ceiling = ratio_upper_bound(d, instance.epsilon_hat, "harmonic")
                rows.append({
                    "kind": "mnd", "family": "mnd", "n": n, "d": d, "k": 2, "seed": seed,
                    "size": len(instance.graph), "value": result.value,
                    "ratio": result.ratio, "bound": ceiling, "optimal": result.optimal,
                    "certified": instance.certified,
                    "verdict": result.value >= ceil(len(instance.graph) / 4),
                })
    return rows


def _k4_rows(config: ExperimentConfig) -> List[Dict[str, Any]]:
    rows = []
    for seed in config.sweep_seeds():
        for n in config.n_values:
            if n < 4 or comb(n, 4) > K4_MAX_TUPLES:
                logger.info(f"k4 sweep skips n={n}")
                continue
            tuples = full_vertex_set(n, 4)
            density = pattern_density(tuples, config.trials, seed)
            rows.append({
                "kind": "k4", "family": "full", "n": n, "d": None, "k": 4, "seed": seed,
                "size": len(tuples), "value": None, "ratio": density, "bound": None, "optimal": None,
                "certified": None, "verdict": abs(density - Fraction(3, 8)) <= DENSITY_TOLERANCE,
            })
    return rows


def _p3_rows(config: ExperimentConfig) -> List[Dict[str, Any]]:
    rows = []
    for seed in config.sweep_seeds():
        for n in config.n_values:
            graph = random_ordered_graph(n, seed, probability=config.edge_probability)
            if not graph.edges:
                continue
            density = ordered_filter_density(graph, len(TERNARY), config.trials, seed)
            sample = p3_free_filter(graph, random_coloring(n, seed, TERNARY))
            rows.append({
                "kind": "p3", "family": "random", "n": n, "d": None, "k": 2, "seed": seed,
                "size": len(graph), "value": len(sample), "ratio": density, "bound": None, "optimal": None,
                "certified": None,
                "verdict": abs(density - Fraction(1, 3)) <= DENSITY_TOLERANCE and longest_increasing_path(sample) <= 2,
            })
    return rows


def _quarter_rows(config: ExperimentConfig) -> List[Dict[str, Any]]:
    rows = []
    for seed in config.sweep_seeds():
        for n in config.n_values:
            graph = random_ordered_graph(n, seed, probability=config.edge_probability)
            if not graph.edges:
                continue
            floor = ceil(len(graph) / 4)
            witness = derandomized_quarter(graph)
            density = ordered_filter_density(graph, 2, config.trials, seed)
            exact = exact_alpha_k2(graph, budget=config.budget) if n <= 16 else None
            rows.append({
                "kind": "quarter", "family": "random", "n": n, "d": None, "k": 2, "seed": seed,
                "size": len(graph), "value": len(witness), "ratio": density, "bound": None,
                "exact_value": exact.value if exact else None, "optimal": exact.optimal if exact else None,
                "certified": None,
                "verdict": len(witness) >= floor and (exact is None or exact.value >= len(witness)),
            })
    return rows


def _k3_rows(config: ExperimentConfig) -> List[Dict[str, Any]]:
    rows = []
    for seed in config.sweep_seeds():
        for n in config.n_values:
            if n < 4 or n > K3_MAX_N:
                continue
            full = full_vertex_set(n, 3)
            keep = np.random.default_rng(seed).random(len(full)) < config.edge_probability
            tuples = KTupleSet(n=n, k=3, members=frozenset(m for m, flag in zip(full, keep) if flag))
            if not len(tuples):
                continue
            result = exact_alpha_general(tuples, budget=config.budget)
            rows.append({
                "kind": "k3", "family": "random", "n": n, "d": None, "k": 3, "seed": seed,
                "size": len(tuples), "value": result.value, "ratio": result.ratio,
                "bound": report_reference_bounds(3).ehs, "optimal": result.optimal, "certified": None,
                "verdict": is_independent(tuples, result.witness),
            })
    return rows


EXPERIMENTS = {"mnd": _mnd_rows, "k4": _k4_rows, "p3": _p3_rows, "quarter": _quarter_rows, "k3": _k3_rows}


def _finalize_row(row: Dict[str, Any]) -> Dict[str, Any]:
    """比值写成分子/分母 + 浮点，界与 slack 同样给出精确字符串"""
    ratio, bound = row.pop("ratio"), row.pop("bound")
    fields = ratio_fields(ratio.numerator, ratio.denominator) if ratio is not None else ratio_fields(0, 0)
    row.update({
        "ratio_numerator": fields["numerator"] if ratio is not None else None,
        "ratio_denominator": fields["denominator"] if ratio is not None else None,
        "ratio": fields["exact"],
        "ratio_float": fields["float"],
        "bound": str(bound) if bound is not None else None,
        "slack": str(bound - ratio) if bound is not None and ratio is not None else None,
    })
    return row


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    rows: List[Dict[str, Any]] = []
    for kind in sorted(set(config.kinds)):
        rows.extend(_finalize_row(row) for row in EXPERIMENTS[kind](config))
    rows.sort(key=lambda r: (r["kind"], r["n"], r["d"] or 0, r["seed"]))
    verdicts = {f"{r['kind']}:n={r['n']}:d={r['d']}:seed={r['seed']}": bool(r["verdict"]) for r in rows}
    return ExperimentReport(
        kind="experiment-report",
        config=config.model_dump(mode="json"),
        seeds={"seeds": config.sweep_seeds()},
        results=rows,
        verdicts=verdicts,
        summary={"rows": len(rows), "failed": sum(1 for v in verdicts.values() if not v)},
    )


@cli.command()
@click.option("--kind", "kinds", type=click.Choice(sorted(EXPERIMENTS)), multiple=True,
              help=_help("实验类型，可重复", "kinds"))
@click.option("--n-values", type=str, help=_help("逗号分隔的 n", "n_values"))
@click.option("--d-values", type=str, help=_help("逗号分隔的 d", "d_values"))
@click.option("--seeds", type=str, help=_help("逗号分隔的种子", default="只用 --seed"))
@click.option("--seed", type=int, help=_help("未给出 --seeds 时使用的种子", default=SEED_DEFAULT))
@click.option("--epsilon", type=str, help=_help("差异预算", "epsilon"))
@click.option("--trials", type=int, help=_help("Monte Carlo 次数", "trials"))
@click.option("--budget", type=int, help=_help("搜索节点预算", default=BUDGET_DEFAULT))
@click.option("--resample-limit", type=int, help=_help("每层块最多重采样次数", "resample_limit"))
@click.option("--edge-probability", type=float, help=_help("随机图的边概率", "edge_probability"))
@click.option("--output", type=str, help="CSV 路径（默认 output/experiment.csv）")
@click.option("--format", "format", type=click.Choice(["json", "csv"]),
              help=_help("csv 同时写出 JSON 报告", "format"))
@click.option("--config", "config_path", type=str, help="JSON 配置文件")
@handle_errors
def experiment(config_path, kinds, n_values, d_values, seeds, **flags):
    """参数扫描：每个 (kind, n, d, seed) 一行"""
    flags.update(kinds=list(kinds) or None, n_values=_int_list(n_values), d_values=_int_list(d_values),
                 seeds=_int_list(seeds))
    config = load_config(config_path, flags)
    report = run_experiment(config)

    output = Path(config.output or "output/experiment.csv")
    json_path = output.with_suffix(".json")
    if config.format == "csv":
        output.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(report.results).to_csv(output, index=False, lineterminator="\n")
        console.print(f"[green]✅ CSV written to {output}[/green]")
    save_report(report, json_path)

    table = Table(title="experiment")
    for column in ("kind", "n", "d", "seed", "size", "ratio", "bound", "verdict"):
        table.add_column(column)
    for row in report.results:
        table.add_row(*(str(row.get(column)) for column in ("kind", "n", "d", "seed", "size", "ratio", "bound",
                                                            "verdict")))
    console.print(table)
    click.echo(json.dumps({"rows": len(report.results), "report": str(json_path),
                           "csv": str(output) if config.format == "csv" else None}, indent=2))
    raise SystemExit(EXIT_OK if all(report.verdicts.values()) else EXIT_CHECK_FAILED)


if __name__ == "__main__":
    cli()
