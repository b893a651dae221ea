"""
界的计算与验证

在具体实例上精确计算 f_d^α、d = 1 的闭式、递推不等式与逐层界，以及
超几何尾界及其 Monte Carlo 对照。除 ln d 与 exp 外全部使用 Fraction；
涉及这两者的比较允许 LOG_TOLERANCE 的误差。
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np

from core.constructions import MndInstance, instance_half
from core.errors import InvalidInputError
from core.independence import (
    COLORING_ENUM_MAX_ACTIVE,
    DEFAULT_NODE_BUDGET,
    Coloring,
    best_color_filter,
    color_filter,
)
from core.models import TailBoundInput, ratio_fields, to_fraction

logger = logging.getLogger(__name__)

LOG_TOLERANCE = Fraction(1, 10**12)
MAX_ADMISSIBLE_DEPTH = 10**12


@dataclass
class FValue:
    """f_d^α(n) 在给定实例与蓝色数 beta 上的值"""

    n: int
    d: int
    beta: int
    value: Fraction
    max_filter_size: int
    argmax_coloring: Coloring
    optimal: bool = True
    nodes: int = 0

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.beta, self.n)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "d": self.d,
            "beta": self.beta,
            "alpha": str(self.alpha),
            "value": str(self.value),
            "value_float": float(self.value),
            "max_filter_size": self.max_filter_size,
            "argmax_coloring": self.argmax_coloring.to_string(),
            "optimal": self.optimal,
            "nodes": self.nodes,
        }


def f_exact(instance: MndInstance, beta: int, budget: Optional[int] = None) -> FValue:
    """f_d^α(n) = d · max{|G_c| : 恰有 beta 个蓝色顶点} / |G|

    非孤立顶点超过 30 个且未给出 budget 时使用 DEFAULT_NODE_BUDGET，
    预算耗尽则 optimal = False。

    Raises:
        InvalidInputError: beta 不在 [0, n] 内或实例无边
    """
    graph = instance.graph
    if not 0 <= beta <= instance.n:
        raise InvalidInputError(f"beta must lie in [0, {instance.n}], got {beta}")
    if not graph.edges:
        raise InvalidInputError("f is undefined on an empty instance")
    if budget is None and len(graph.active_vertices()) > COLORING_ENUM_MAX_ACTIVE:
        budget = DEFAULT_NODE_BUDGET
    outcome = best_color_filter(graph, blue_count=beta, budget=budget)
    if not outcome.optimal:
        logger.warning(f"f search for n={instance.n} d={instance.d} beta={beta} hit its node budget")
    if len(color_filter(graph, outcome.coloring)) != outcome.value:
        raise InvalidInputError("argmax coloring does not reproduce the reported value")
    return FValue(
        n=instance.n,
        d=instance.d,
        beta=beta,
        value=Fraction(instance.d * outcome.value, len(graph)),
        max_filter_size=outcome.value,
        argmax_coloring=outcome.coloring,
        optimal=outcome.optimal,
        nodes=outcome.nodes,
    )


def f1_closed_form(alpha) -> Fraction:
    """f_1^α = 2α（α ≤ 1/2），否则 2 − 2α"""
    alpha = to_fraction(alpha)
    if not 0 <= alpha <= 1:
        raise InvalidInputError(f"alpha must lie in [0, 1], got {alpha}")
    return 2 * alpha if alpha <= Fraction(1, 2) else 2 - 2 * alpha


def harmonic_tail(d: int) -> Fraction:
    """Σ_{i=3}^{d+1} 1/i（d ≤ 1 时为空和 0）"""
    return sum((Fraction(1, i) for i in range(3, d + 2)), Fraction(0))


def _depth_term(d: int, variant: str) -> Fraction:
    if variant == "harmonic":
        return harmonic_tail(d)
    if variant == "ln":
        return Fraction(math.log(d))
    raise InvalidInputError(f"variant must be 'harmonic' or 'ln', got {variant!r}")


def claim_bound(d: int, alpha, epsilon, variant: str = "ln") -> Fraction:
    """(d+3)(α−α²) + ¼·T(d) + dε/2，T(d) 为 ln d 或 Σ_{i=3}^{d+1} 1/i

    Args:
        d: 深度，d ≥ 1
        alpha: 蓝色比例 α ∈ [0, 1]
        epsilon: ε ≥ 0（实例检查时代入实测 ε̂）
        variant: "ln" 或 "harmonic"
    """
    alpha, epsilon = to_fraction(alpha), to_fraction(epsilon)
    if d < 1:
        raise InvalidInputError(f"d must be at least 1, got {d}")
    if not 0 <= alpha <= 1:
        raise InvalidInputError(f"alpha must lie in [0, 1], got {alpha}")
    if epsilon < 0:
        raise InvalidInputError(f"epsilon must be non-negative, got {epsilon}")
    return (d + 3) * (alpha - alpha * alpha) + _depth_term(d, variant) / 4 + d * epsilon / 2


def ratio_upper_bound(d: int, epsilon, variant: str = "ln") -> Fraction:
    """max_α claim_bound / d，即 α(G)/|G| 的实例级上界

    ln 版本为 1/4 + (3 + ln d)/(4d) + ε/2。
    """
    return claim_bound(d, Fraction(1, 2), epsilon, variant) / d


def admissible_depth(epsilon) -> int:
    """使 (3 + ln d)/(4d) ≤ ε/2 的最小 d"""
    epsilon = to_fraction(epsilon)
    if epsilon <= 0:
        raise InvalidInputError(f"epsilon must be positive, got {epsilon}")

    def fits(d: int) -> bool:
        return Fraction(3 + math.log(d)) <= 2 * epsilon * d

    high = 1
    while not fits(high):
        high *= 2
        if high > MAX_ADMISSIBLE_DEPTH:
            raise InvalidInputError(f"epsilon {epsilon} too small for a representable depth")
    low = high // 2 + 1 if high > 1 else 1
    while low < high:
        middle = (low + high) // 2
        if fits(middle):
            high = middle
        else:
            low = middle + 1
    return high


@dataclass
class RecurrenceTerm:
    beta_s: int
    x: Fraction
    f_s: FValue
    f_l: FValue
    cross: Fraction
    total: Fraction


@dataclass
class RecurrenceReport:
    """f(instance, beta) 与递推右端的比较"""

    beta: int
    lhs: FValue
    rhs: Fraction
    epsilon_hat: Fraction
    terms: List[RecurrenceTerm] = field(default_factory=list)
    best_beta_s: int = 0

    @property
    def slack(self) -> Fraction:
        return self.rhs - self.lhs.value

    @property
    def holds(self) -> bool:
        return self.slack >= 0

    @property
    def conclusive(self) -> bool:
        """所有 f 值均为精确最优时，holds 才是可信的判定"""
        return self.lhs.optimal and all(t.f_s.optimal and t.f_l.optimal for t in self.terms)

    def to_dict(self) -> Dict[str, Any]:
        best = next(t for t in self.terms if t.beta_s == self.best_beta_s)
        return {
            "beta": self.beta,
            "lhs": str(self.lhs.value),
            "rhs": str(self.rhs),
            "slack": str(self.slack),
            "slack_float": float(self.slack),
            "epsilon_hat": str(self.epsilon_hat),
            "best_beta_s": self.best_beta_s,
            "best_x": str(best.x),
            "holds": self.holds,
            "conclusive": self.conclusive,
            "terms_checked": len(self.terms),
        }


def check_recurrence(instance: MndInstance, beta: int, budget: Optional[int] = None) -> RecurrenceReport:
    """验证 f(G, beta) ≤ max_x ½(f_S(xn/2) + f_L((2α−x)n/2)) + x(1−2α+x) + ε̂/2

    x 取遍 {2·beta_S/n}，其中 beta_S 为 S 中的蓝色数，且 L 中的蓝色数
    beta − beta_S 不超过 n/2。ε̂ 取实例各层实测值的最大值。

    Raises:
        InvalidInputError: d < 2
    """
    if instance.d < 2:
        raise InvalidInputError("the recurrence needs d >= 2")
    half = instance.n // 2
    alpha = Fraction(beta, instance.n)
    epsilon_hat = instance.epsilon_hat
    lhs = f_exact(instance, beta, budget)
    s_half, l_half = instance_half(instance, "S"), instance_half(instance, "L")
    cache: Dict[tuple, FValue] = {}

    def f_half(side: str, blue: int) -> FValue:
        key = (side, blue)
        if key not in cache:
            cache[key] = f_exact(s_half if side == "S" else l_half, blue, budget)
        return cache[key]

    terms: List[RecurrenceTerm] = []
    for beta_s in range(max(0, beta - half), min(beta, half) + 1):
        x = Fraction(2 * beta_s, instance.n)
        f_s, f_l = f_half("S", beta_s), f_half("L", beta - beta_s)
        cross = x * (1 - 2 * alpha + x)
        total = (f_s.value + f_l.value) / 2 + cross + epsilon_hat / 2
        terms.append(RecurrenceTerm(beta_s=beta_s, x=x, f_s=f_s, f_l=f_l, cross=cross, total=total))

    best = max(terms, key=lambda t: t.total)
    report = RecurrenceReport(
        beta=beta, lhs=lhs, rhs=best.total, epsilon_hat=epsilon_hat, terms=terms, best_beta_s=best.beta_s
    )
    logger.info(f"recurrence beta={beta}: lhs={lhs.value} rhs={report.rhs} slack={report.slack}")
    return report


@dataclass
class ClaimBoundReport:
    """f(G, beta) 与 claim_bound(d, α, ε̂) 的比较"""

    beta: int
    variant: str
    f: FValue
    bound: Fraction
    epsilon_hat: Fraction
    certified: bool

    @property
    def slack(self) -> Fraction:
        return self.bound - self.f.value

    @property
    def holds(self) -> bool:
        tolerance = LOG_TOLERANCE if self.variant == "ln" else 0
        return self.slack >= -tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "beta": self.beta,
            "variant": self.variant,
            "f": str(self.f.value),
            "bound": str(self.bound),
            "slack": str(self.slack),
            "slack_float": float(self.slack),
            "epsilon_hat": str(self.epsilon_hat),
            "holds": self.holds,
            "optimal": self.f.optimal,
            "certified": self.certified,
        }


def check_claim_bound(
    instance: MndInstance, beta: int, variant: str = "harmonic", budget: Optional[int] = None
) -> ClaimBoundReport:
    """以实测 ε̂ 代入 claim_bound，与 f_exact 比较"""
    f_value = f_exact(instance, beta, budget)
    bound = claim_bound(instance.d, f_value.alpha, instance.epsilon_hat, variant)
    return ClaimBoundReport(
        beta=beta,
        variant=variant,
        f=f_value,
        bound=bound,
        epsilon_hat=instance.epsilon_hat,
        certified=instance.certified,
    )


@dataclass
class TailBound:
    """2·exp(−t²/(2(μ + t/3)))"""

    raw: float
    capped: float
    exponent: Fraction
    degenerate: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {"raw": self.raw, "capped": self.capped, "exponent": str(self.exponent), "degenerate": self.degenerate}


def hypergeometric_tail_bound(inp: TailBoundInput) -> TailBound:
    """P(|Z − μ| > t) 的上界；μ = t = 0 时返回原始值 2 并标记 degenerate"""
    mu, t = inp.mu, inp.t
    if mu == 0 and t == 0:
        logger.debug("tail bound with mu = t = 0 is degenerate")
        return TailBound(raw=2.0, capped=1.0, exponent=Fraction(0), degenerate=True)
    exponent = t * t / (2 * (mu + t / 3))
    raw = 2 * math.exp(-float(exponent))
    return TailBound(raw=raw, capped=min(raw, 1.0), exponent=exponent)


@dataclass
class MonteCarloTail:
    """Monte Carlo 估计的尾概率与 Z 的经验均值"""

    trials: int
    seed: int
    exceed_count: int
    mean: float

    @property
    def probability(self) -> Fraction:
        return Fraction(self.exceed_count, self.trials)

    @property
    def noise(self) -> float:
        """3·sqrt(p̂(1−p̂)/trials)"""
        p = float(self.probability)
        return 3 * math.sqrt(p * (1 - p) / self.trials)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "exceed_count": self.exceed_count,
            "probability": ratio_fields(self.exceed_count, self.trials),
            "mean": self.mean,
            "noise": self.noise,
        }


def monte_carlo_tail(inp: TailBoundInput, trials: int, seed: int) -> MonteCarloTail:
    """模拟 Z ~ H(N, m, k)，统计 |Z − μ| > t 的比例（比较在整数上精确进行）"""
    if trials < 1:
        raise InvalidInputError(f"trials must be at least 1, got {trials}")
    rng = np.random.default_rng(seed)
    draws = rng.hypergeometric(inp.m, inp.N - inp.m, inp.k, size=trials).astype(np.int64)
    # |Z − mk/N| > p/q  ⇔  |N·Z − mk|·q > p·N
    t = inp.t
    scaled = np.abs(inp.N * draws - inp.m * inp.k) * t.denominator
    exceed = int((scaled > t.numerator * inp.N).sum())
    return MonteCarloTail(trials=trials, seed=seed, exceed_count=exceed, mean=float(draws.mean()))


def tail_check(inp: TailBoundInput, trials: int, seed: int) -> Dict[str, Any]:
    """经验尾概率 ≤ 界 + 3σ，且经验均值与 μ 的相对误差在 1% 内"""
    bound = hypergeometric_tail_bound(inp)
    empirical = monte_carlo_tail(inp, trials, seed)
    mu = float(inp.mu)
    within_bound = float(empirical.probability) <= bound.raw + empirical.noise
    mean_ok = abs(empirical.mean - mu) <= 0.01 * mu if mu > 0 else empirical.mean == 0
    return {
        "input": inp.model_dump(mode="json"),
        "mu": str(inp.mu),
        "bound": bound.to_dict(),
        "empirical": empirical.to_dict(),
        "within_bound": within_bound,
        "mean_within_1pct": mean_ok,
        "passed": within_bound and mean_ok,
    }


@dataclass
class ReferenceBounds:
    """k 元组移位图的参考下界（仅作报告元数据）"""

    k: int
    ehs: Fraction
    operative: Fraction
    source: str

    def to_dict(self) -> Dict[str, Any]:
        return {"k": self.k, "ehs": str(self.ehs), "operative": str(self.operative), "source": self.source}


def report_reference_bounds(k: int) -> ReferenceBounds:
    """偶数 k 为 1/2 − 1/k，奇数 k 为 1/2 − 1/(2k)

    k = 2 时偶数公式为 0，另附 1/4（着色过滤下界）作为实际可用的界；
    k = 4 附 3/8（模式过滤）。
    """
    if k < 2:
        raise InvalidInputError(f"reference bounds need k >= 2, got {k}")
    ehs = Fraction(1, 2) - (Fraction(1, k) if k % 2 == 0 else Fraction(1, 2 * k))
    if k == 2:
        return ReferenceBounds(k=k, ehs=ehs, operative=Fraction(1, 4), source="two-coloring filter")
    if k == 4:
        return ReferenceBounds(k=k, ehs=ehs, operative=Fraction(3, 8), source="4-bit pattern filter")
    return ReferenceBounds(k=k, ehs=ehs, operative=ehs, source="parity formula")
