"""
验证结果收集器

逐项运行检查并收集结果，生成结构化 JSON 报告。检查中抛出的异常被捕获，
该项标记为 errored。
"""

import json
import logging
import time
import traceback
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from core.models import ExperimentReport, ReportMetadata

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_TOOL_ERROR = 2

CheckFunc = Callable[[], Tuple[Optional[bool], Dict[str, Any]]]


@dataclass
class CheckResult:
    """单项检查结果"""
    check_id: str
    name: str
    status: str  # passed, failed, errored, skipped
    details: Dict[str, Any] = field(default_factory=dict)
    error_message: Optional[str] = None
    traceback: Optional[str] = None


@dataclass
class CheckSummary:
    """检查摘要统计"""
    total: int
    passed: int
    failed: int
    errored: int
    skipped: int
    pass_rate: float


class ReportCollector:
    """验证结果收集器"""

    def __init__(self, kind: str = "verification-report"):
        self.kind = kind
        self.checks: List[CheckResult] = []
        self.timing: Dict[str, float] = {}
        logger.info(f"ReportCollector initialized for {kind}")

    def run_check(self, check_id: str, name: str, func: CheckFunc) -> CheckResult:
        """运行一项检查

        Args:
            check_id: 检查唯一标识
            name: 可读名称
            func: 返回 (verdict, details)；verdict 为 None 表示无法下结论（skipped）

        Returns:
            CheckResult
        """
        started = time.perf_counter()
        try:
            verdict, details = func()
            status = "skipped" if verdict is None else ("passed" if verdict else "failed")
            result = CheckResult(check_id=check_id, name=name, status=status, details=details)
        except Exception as e:
            logger.error(f"check {check_id} errored: {e}")
            result = CheckResult(
                check_id=check_id,
                name=name,
                status="errored",
                error_message=f"{type(e).__name__}: {e}",
                traceback=traceback.format_exc(),
            )
        self.timing[check_id] = round(time.perf_counter() - started, 6)
        self.checks.append(result)
        logger.debug(f"check {check_id}: {result.status}")
        return result

    def get_summary(self) -> CheckSummary:
        total = len(self.checks)
        counts = {status: sum(1 for c in self.checks if c.status == status)
                  for status in ("passed", "failed", "errored", "skipped")}
        pass_rate = (counts["passed"] / total * 100) if total > 0 else 0.0
        return CheckSummary(total=total, pass_rate=round(pass_rate, 2), **counts)

    def verdicts(self) -> Dict[str, bool]:
        return {c.check_id: c.status == "passed" for c in self.checks if c.status != "skipped"}

    def build_report(
        self,
        config: Dict[str, Any],
        seeds: Optional[Dict[str, Any]] = None,
        results: Optional[List[Dict[str, Any]]] = None,
    ) -> ExperimentReport:
        summary = self.get_summary()
        checks = []
        for c in self.checks:
            entry = asdict(c)
            if entry["traceback"] is None:
                del entry["traceback"]
            checks.append(entry)
        return ExperimentReport(
            kind=self.kind,
            config=config,
            seeds=seeds or {},
            results=results or [],
            checks=checks,
            verdicts=self.verdicts(),
            summary=asdict(summary),
            metadata=ReportMetadata(timing=dict(self.timing)),
        )


def report_to_json(report: ExperimentReport) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2, ensure_ascii=False) + "\n"


def save_report(report: ExperimentReport, path) -> Path:
    """保存报告到 JSON 文件"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(report_to_json(report))
    logger.info(f"report saved to {path}")
    return path


def strip_metadata(document: Dict[str, Any]) -> Dict[str, Any]:
    """去掉 metadata 后用于比较两次运行的报告"""
    return {key: value for key, value in document.items() if key != "metadata"}


def report_exit_code(report: ExperimentReport) -> int:
    """由报告中的检查状态与 verdicts 推出退出码"""
    statuses = {check["status"] for check in report.checks}
    if "errored" in statuses:
        return EXIT_TOOL_ERROR
    if "failed" in statuses or not all(report.verdicts.values()):
        return EXIT_CHECK_FAILED
    return EXIT_OK
