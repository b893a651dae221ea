"""
核心数据模型

本模块定义构造参数、差异证书、尾界输入以及实验报告等可序列化的数据结构，
使用 Pydantic 进行数据验证。所有有理数在 JSON 中以 "p/q" 字符串保存。
"""

from datetime import datetime
from fractions import Fraction
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, BeforeValidator, Field, PlainSerializer, model_validator


def to_fraction(value: Any) -> Fraction:
    """把 int / str / float / Fraction 统一转换为 Fraction

    float 先经过 str()，因此 0.1 变成 1/10 而不是其二进制近似。
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"cannot interpret {value!r} as a rational")


Rational = Annotated[
    Fraction,
    BeforeValidator(to_fraction),
    PlainSerializer(lambda value: str(value), return_type=str, when_used="json"),
]


def ratio_fields(numerator: int, denominator: int) -> Dict[str, Any]:
    """报告中的比值统一带分子、分母字段，附带浮点值便于阅读"""
    exact = Fraction(numerator, denominator) if denominator else None
    return {
        "numerator": numerator,
        "denominator": denominator,
        "exact": str(exact) if exact is not None else None,
        "float": float(exact) if exact is not None else None,
    }


class BlockParams(BaseModel):
    """
    伪随机二部块 B(n, d) 的参数

    S = {1..n/2}, L = {n/2+1..n}；边数预算为 n²/2^{d+1}。
    """

    n: int = Field(..., ge=2, description="顶点数（偶数，且被 2^d 整除）")
    d: int = Field(..., ge=1, description="递归深度")
    epsilon: Rational = Field(..., description="差异预算 ε ∈ (0, 1)")
    seed: int = Field(..., ge=0, lt=2**64, description="64 位随机种子")

    class Config:
        arbitrary_types_allowed = True
        json_schema_extra = {
            "example": {"n": 16, "d": 2, "epsilon": "1/2", "seed": 7}
        }

    @model_validator(mode="after")
    def _check_divisibility(self) -> "BlockParams":
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.n % (2 ** self.d) != 0:
            raise ValueError(f"2^{self.d} must divide n={self.n}")
        return self

    @property
    def half(self) -> int:
        return self.n // 2

    @property
    def edge_budget(self) -> int:
        """|B(n, d)| = n² / 2^{d+1}"""
        return self.n * self.n // 2 ** (self.d + 1)

    @property
    def discrepancy_budget(self) -> Fraction:
        """ε n² / 2^{d+2}"""
        return self.epsilon * self.n * self.n / 2 ** (self.d + 2)


class DiscrepancyCertificate(BaseModel):
    """
    二部块差异证书

    worst_deviation 为所检查 (X, Y) 上 |e(X,Y) − |X||Y|/2^{d−1}| 的最大值。
    """

    mode: Literal["exhaustive", "intervals", "sampled"] = Field(..., description="检查族")
    n: int = Field(..., ge=2)
    d: int = Field(..., ge=1)
    worst_deviation: Rational = Field(..., description="所检查族上的最大偏差")
    budget: Rational = Field(..., description="ε n² / 2^{d+2}")
    epsilon_hat: Rational = Field(..., description="worst_deviation / (n²/2^{d+2})")
    pairs_checked: int = Field(..., ge=0)
    passed: bool
    worst_pair: Optional[Tuple[List[int], List[int]]] = Field(
        default=None, description="达到最大偏差的 (X, Y)，1 起始标签"
    )
    sample_seed: Optional[int] = Field(default=None, description="sampled 模式的种子")

    class Config:
        arbitrary_types_allowed = True

    @model_validator(mode="after")
    def _check_verdict(self) -> "DiscrepancyCertificate":
        if self.passed != (self.worst_deviation <= self.budget):
            raise ValueError("passed must equal worst_deviation <= budget")
        if self.mode == "exhaustive" and self.pairs_checked != (2 ** (self.n // 2) - 1) ** 2:
            raise ValueError("exhaustive certificates cover every nonempty (X, Y)")
        return self


class BlockRecord(BaseModel):
    """M(n, d) 某一递归层上的块：同层 2^level 个节点共用同一个块"""

    level: int = Field(..., ge=0, description="递归层（0 为顶层）")
    n: int = Field(..., description="该层节点的顶点数")
    d: int = Field(..., description="该层块的深度参数")
    seed: int = Field(..., description="最终采用的派生种子")
    attempts: int = Field(..., ge=1, description="采样次数（含首次）")
    copies: int = Field(..., ge=1, description="该层共用此块的节点数 2^level")
    certificate: DiscrepancyCertificate


class TailBoundInput(BaseModel):
    """
    超几何尾界输入

    Z ~ H(N, m, k)：从含 m 个标记元素的 N 个元素中无放回抽取 k 个。
    """

    N: int = Field(..., ge=1, description="总体大小")
    m: int = Field(..., ge=0, description="标记元素数")
    k: int = Field(..., ge=0, description="抽取数")
    t: Rational = Field(..., description="偏差阈值 t ≥ 0")

    class Config:
        arbitrary_types_allowed = True
        json_schema_extra = {"example": {"N": 100, "m": 50, "k": 10, "t": "5"}}

    @model_validator(mode="after")
    def _check_ranges(self) -> "TailBoundInput":
        if self.m > self.N or self.k > self.N:
            raise ValueError("need 0 <= m, k <= N")
        if self.t < 0:
            raise ValueError("t must be non-negative")
        return self

    @property
    def mu(self) -> Fraction:
        """期望 μ = mk/N"""
        return Fraction(self.m * self.k, self.N)


class ReportMetadata(BaseModel):
    """报告元数据；比较报告是否一致时整体忽略此字段"""

    generator: str = "shiftlab"
    version: str = "1.0"
    generated_at: datetime = Field(default_factory=datetime.now)
    timing: Dict[str, float] = Field(default_factory=dict, description="各检查耗时（秒）")


class ExperimentReport(BaseModel):
    """
    实验 / 验证报告

    verdicts 只由 results 与 checks 中的字段推出。
    """

    kind: Literal["alpha-report", "verification-report", "experiment-report"]
    schema_version: str = "1.0"
    config: Dict[str, Any] = Field(default_factory=dict, description="生效配置回显")
    seeds: Dict[str, Any] = Field(default_factory=dict, description="种子来源")
    results: List[Dict[str, Any]] = Field(default_factory=list)
    checks: List[Dict[str, Any]] = Field(default_factory=list)
    verdicts: Dict[str, bool] = Field(default_factory=dict)
    summary: Dict[str, Any] = Field(default_factory=dict)
    metadata: ReportMetadata = Field(default_factory=ReportMetadata)
