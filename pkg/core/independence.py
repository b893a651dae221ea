"""
独立集模块

颜色过滤器（蓝红、二元模式、三元）、精确独立数（着色枚举 / 分支定界 /
子集穷举）、去随机化的 1/4 下界，以及树窗口比值检查。

k = 2 时 Sh_n^2 的独立集与 2-着色一一对应：I 独立当且仅当存在着色 c 使
I ⊆ G_c = {(i, j) ∈ G : c(i) = b, c(j) = r}。因此 α(G) = max_c |G_c|。
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import ceil
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.constructions import LabeledTree, tree_window
from core.errors import InvalidInputError, InvariantViolation, ResourceLimitError
from core.models import ratio_fields
from core.shift_graph import (
    GraphLike,
    KTuple,
    KTupleSet,
    OrderedGraph,
    as_ktuple_set,
    induced_conflicts,
    is_independent,
)

logger = logging.getLogger(__name__)

BLUE, RED = "b", "r"
BLUE_RED = (BLUE, RED)
BINARY = (0, 1)
TERNARY = (0, 1, 2)

# 着色枚举适用的非孤立顶点数上限
COLORING_ENUM_MAX_ACTIVE = 30
# 子集穷举适用的 |G| 上限
BRUTE_FORCE_MAX_SIZE = 25
# 超出枚举规模时分支定界的默认节点预算
DEFAULT_NODE_BUDGET = 1_000_000

# k = 4 的允许模式（按 c(x_1) c(x_2) c(x_3) c(x_4) 从左到右读）
K4_PATTERNS = ("1000", "1110", "0010", "0011", "1010", "1011")


@dataclass(frozen=True)
class Coloring:
    """[n] 上的着色，c(i) 以 1 起始标签访问"""

    colors: Tuple[Any, ...]
    palette: Tuple[Any, ...] = BLUE_RED

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(self.colors))
        for color in self.colors:
            if color not in self.palette:
                raise InvalidInputError(f"color {color!r} not in palette {self.palette}")

    @classmethod
    def from_string(cls, text: str, palette: Optional[Tuple[Any, ...]] = None) -> "Coloring":
        """"bbrr" → 蓝红着色；"0110" → 二元着色（"012" 中出现 2 时为三元）"""
        if palette is None:
            if set(text) <= set(BLUE_RED):
                palette = BLUE_RED
            elif set(text) <= set("01"):
                palette = BINARY
            else:
                palette = TERNARY
        if palette == BLUE_RED:
            return cls(tuple(text), BLUE_RED)
        return cls(tuple(int(ch) for ch in text), palette)

    @property
    def n(self) -> int:
        return len(self.colors)

    def __call__(self, vertex: int) -> Any:
        return self.colors[vertex - 1]

    def to_string(self) -> str:
        return "".join(str(c) for c in self.colors)

    def count(self, color: Any) -> int:
        return self.colors.count(color)


def _require_cover(graph_n: int, coloring: Coloring, palette: Tuple[Any, ...]) -> None:
    if coloring.palette != palette:
        raise InvalidInputError(f"expected a coloring over {palette}, got {coloring.palette}")
    if coloring.n < graph_n:
        raise InvalidInputError(f"coloring covers [{coloring.n}] but the graph lives on [{graph_n}]")


def color_filter(graph: OrderedGraph, coloring: Coloring) -> OrderedGraph:
    """G_c = {(i, j) ∈ G : c(i) = b, c(j) = r}，总是 Sh^2 中的独立集"""
    _require_cover(graph.n, coloring, BLUE_RED)
    return OrderedGraph(graph.n, frozenset(e for e in graph.edges if coloring(e[0]) == BLUE and coloring(e[1]) == RED))


def random_coloring(n: int, seed: int, palette: Tuple[Any, ...] = BLUE_RED) -> Coloring:
    """每个顶点独立均匀地取 palette 中的颜色"""
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(palette), size=n)
    return Coloring(tuple(palette[int(p)] for p in picks), palette)


def random_color_filter(graph: OrderedGraph, seed: int) -> OrderedGraph:
    """随机蓝红着色下的 G_c，期望大小 |G|/4"""
    return color_filter(graph, random_coloring(graph.n, seed))


def odd_even_independent_set(n: int) -> OrderedGraph:
    """奇数指向偶数的全部边 {(i, j) : i 奇, j 偶, i < j}，约占 Sh_n^2 的 1/4"""
    return OrderedGraph(n, frozenset((i, j) for i in range(1, n + 1, 2) for j in range(i + 1, n + 1) if j % 2 == 0))


def half_split_independent_set(n: int) -> OrderedGraph:
    """前半指向后半：{(i, j) : i ≤ n/2 < j}"""
    half = n // 2
    return OrderedGraph(n, frozenset((i, j) for i in range(1, half + 1) for j in range(half + 1, n + 1)))


@dataclass
class FilterSearchResult:
    """max_c |G_c| 的搜索结果"""

    value: int
    coloring: Coloring
    optimal: bool
    nodes: int


class _ColoringSearch:
    """
    按标签递增顺序对非孤立顶点做蓝优先的深度优先搜索

    顶点 v 染红时增益为其蓝色左邻居数；上界为当前值加上每个未定顶点的
    非红色左邻居数之和。先找到的最优着色被保留，结果与运行无关。
    """

    def __init__(self, graph: OrderedGraph, blue_count: Optional[int] = None, budget: Optional[int] = None):
        self.graph = graph
        self.order = graph.active_vertices()
        self.index = {v: t for t, v in enumerate(self.order)}
        self.left_masks = [0] * len(self.order)
        for i, j in graph.edges:
            self.left_masks[self.index[j]] |= 1 << self.index[i]

        inactive = graph.n - len(self.order)
        if blue_count is None:
            self.lower, self.upper = 0, len(self.order)
        else:
            if not 0 <= blue_count <= graph.n:
                raise InvalidInputError(f"blue count {blue_count} outside [0, {graph.n}]")
            self.lower = max(0, blue_count - inactive)
            self.upper = min(len(self.order), blue_count)
        self.blue_count = blue_count
        self.budget = budget
        self.nodes = 0
        self.exhausted = False
        self.best_value = -1
        self.best_blue_mask: Optional[int] = None

    def _bound(self, t: int, red_mask: int) -> int:
        return sum(bin(self.left_masks[s] & ~red_mask).count("1") for s in range(t, len(self.order)))

    def _search(self, t: int, blue_mask: int, red_mask: int, value: int, blues: int) -> None:
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            self.exhausted = True
            return
        if t == len(self.order):
            if value > self.best_value:
                self.best_value = value
                self.best_blue_mask = blue_mask
            return
        remaining = len(self.order) - t
        if blues + remaining < self.lower or blues > self.upper:
            return
        if value + self._bound(t, red_mask) <= self.best_value:
            return

        bit = 1 << t
        if blues < self.upper:
            self._search(t + 1, blue_mask | bit, red_mask, value, blues + 1)
            if self.exhausted:
                return
        if blues + remaining - 1 >= self.lower:
            gain = bin(self.left_masks[t] & blue_mask).count("1")
            self._search(t + 1, blue_mask, red_mask | bit, value + gain, blues)

    def _coloring_from_mask(self, blue_mask: int) -> Coloring:
        blue = {self.order[t] for t in range(len(self.order)) if blue_mask >> t & 1}
        colors = [BLUE if v in blue else RED for v in range(1, self.graph.n + 1)]
        if self.blue_count is not None:
            extra = self.blue_count - len(blue)
            for v in range(1, self.graph.n + 1):
                if extra <= 0:
                    break
                if v not in self.index:
                    colors[v - 1] = BLUE
                    extra -= 1
        return Coloring(tuple(colors), BLUE_RED)

    def run(self, seed_coloring: Optional[Coloring] = None) -> FilterSearchResult:
        seed_value = -1
        if seed_coloring is not None:
            seed_value = len(color_filter(self.graph, seed_coloring))
            # 以 seed_value − 1 为门槛，第一个达到最优值的叶子仍按 DFS 顺序被找到
            self.best_value = seed_value - 1
        self._search(0, 0, 0, 0, 0)

        if self.best_blue_mask is None:
            if seed_coloring is None:
                raise InvariantViolation("coloring search ended without a witness")
            return FilterSearchResult(seed_value, seed_coloring, False, self.nodes)
        return FilterSearchResult(
            value=self.best_value,
            coloring=self._coloring_from_mask(self.best_blue_mask),
            optimal=not self.exhausted,
            nodes=self.nodes,
        )


def _prefix_coloring(n: int, blue_count: int) -> Coloring:
    return Coloring(tuple(BLUE if v <= blue_count else RED for v in range(1, n + 1)), BLUE_RED)


def best_color_filter(
    graph: OrderedGraph, blue_count: Optional[int] = None, budget: Optional[int] = None
) -> FilterSearchResult:
    """max |G_c|，可限定恰有 blue_count 个蓝色顶点

    Args:
        graph: 有序图
        blue_count: 蓝色顶点数（None 表示不限）
        budget: 搜索节点预算；耗尽时 optimal = False

    Returns:
        FilterSearchResult，coloring 覆盖 [n]
    """
    search = _ColoringSearch(graph, blue_count=blue_count, budget=budget)
    if blue_count is None:
        seed = derandomized_coloring(graph) if graph.edges else None
    else:
        seed = _prefix_coloring(graph.n, blue_count)
    if not search.order:
        coloring = seed or Coloring(tuple(RED for _ in range(graph.n)), BLUE_RED)
        return FilterSearchResult(0, coloring, True, 0)
    return search.run(seed)


@dataclass
class AlphaResult:
    """独立数计算结果"""

    value: int
    witness: KTupleSet
    method: str
    optimal: bool
    size: int
    nodes: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def ratio(self) -> Optional[Fraction]:
        return Fraction(self.value, self.size) if self.size else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "size": self.size,
            "ratio": ratio_fields(self.value, self.size),
            "method": self.method,
            "optimal": self.optimal,
            "nodes": self.nodes,
            "witness": [list(m.entries) for m in self.witness],
            **self.extra,
        }


def exact_alpha_k2(graph: OrderedGraph, budget: Optional[int] = None) -> AlphaResult:
    """k = 2 的精确独立数 α(G) = max_c |G_c|

    非孤立顶点不超过 30 个时做完整着色枚举（带剪枝）；更大时使用带预算的
    分支定界，预算耗尽则返回已知最优并标记 optimal = False。
    """
    active = len(graph.active_vertices())
    if active <= COLORING_ENUM_MAX_ACTIVE:
        method = "coloring-enum"
    else:
        method = "branch-bound"
        if budget is None:
            budget = DEFAULT_NODE_BUDGET
    outcome = best_color_filter(graph, budget=budget)
    witness = color_filter(graph, outcome.coloring)
    if len(witness) != outcome.value:
        raise InvariantViolation("coloring search value disagrees with its witness")
    logger.debug(f"alpha via {method}: {outcome.value}/{len(graph)} optimal={outcome.optimal}")
    return AlphaResult(
        value=outcome.value,
        witness=witness.to_ktuple_set(),
        method=method,
        optimal=outcome.optimal,
        size=len(graph),
        nodes=outcome.nodes,
        extra={"coloring": outcome.coloring.to_string()},
    )


def _conflict_masks(members: Sequence[KTuple], conflicts) -> List[int]:
    position = {m: idx for idx, m in enumerate(members)}
    masks = [0] * len(members)
    for a, b in conflicts:
        masks[position[a]] |= 1 << position[b]
        masks[position[b]] |= 1 << position[a]
    return masks


def _result_from_mask(tuples: KTupleSet, members: Sequence[KTuple], mask: int) -> KTupleSet:
    chosen = frozenset(m for idx, m in enumerate(members) if mask >> idx & 1)
    return KTupleSet(n=tuples.n, k=tuples.k, members=chosen)


def brute_force_alpha(graph: GraphLike) -> AlphaResult:
    """枚举全部独立子集（只剪掉基数上不可能超过当前最优的分支）

    Raises:
        ResourceLimitError: |G| 超过 BRUTE_FORCE_MAX_SIZE
    """
    tuples = as_ktuple_set(graph)
    if len(tuples) > BRUTE_FORCE_MAX_SIZE:
        raise ResourceLimitError(f"subset enumeration limited to |G| <= {BRUTE_FORCE_MAX_SIZE}, got {len(tuples)}")
    members = tuples.sorted_members()
    masks = _conflict_masks(members, induced_conflicts(tuples))
    size = len(members)
    best = [0, 0]
    nodes = [0]

    def extend(index: int, chosen: int, count: int) -> None:
        nodes[0] += 1
        if count + (size - index) <= best[0] and best[0] > 0:
            return
        if index == size:
            if count > best[0]:
                best[0], best[1] = count, chosen
            return
        if not masks[index] & chosen:
            extend(index + 1, chosen | 1 << index, count + 1)
        extend(index + 1, chosen, count)

    extend(0, 0, 0)
    return AlphaResult(
        value=best[0],
        witness=_result_from_mask(tuples, members, best[1]),
        method="brute-subsets",
        optimal=True,
        size=size,
        nodes=nodes[0],
    )


class _IndependentSetSearch:
    """一般 k 的最大独立集分支定界：按候选集内最大度顶点分支，度 ≤ 1 的顶点直接选入"""

    def __init__(self, masks: List[int], budget: Optional[int]):
        self.masks = masks
        self.budget = budget
        self.nodes = 0
        self.exhausted = False
        self.best_count = 0
        self.best_mask = 0

    def search(self, candidates: int, chosen: int, count: int) -> None:
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            self.exhausted = True
            return
        # 度 ≤ 1 的顶点总在某个最大独立集中
        changed = True
        while changed and candidates:
            changed = False
            remaining = candidates
            while remaining:
                low = remaining & -remaining
                v = low.bit_length() - 1
                remaining ^= low
                if not candidates >> v & 1:
                    continue
                if bin(self.masks[v] & candidates).count("1") <= 1:
                    chosen |= low
                    count += 1
                    candidates &= ~(self.masks[v] | low)
                    changed = True
        if not candidates:
            if count > self.best_count:
                self.best_count, self.best_mask = count, chosen
            return
        if count + bin(candidates).count("1") <= self.best_count:
            return

        pivot, pivot_degree = -1, -1
        remaining = candidates
        while remaining:
            low = remaining & -remaining
            v = low.bit_length() - 1
            remaining ^= low
            degree = bin(self.masks[v] & candidates).count("1")
            if degree > pivot_degree:
                pivot, pivot_degree = v, degree
        bit = 1 << pivot
        self.search(candidates & ~(self.masks[pivot] | bit), chosen | bit, count + 1)
        if not self.exhausted:
            self.search(candidates & ~bit, chosen, count)


def exact_alpha_general(graph: GraphLike, budget: Optional[int] = None) -> AlphaResult:
    """任意 k 的独立数：|G| ≤ 25 时子集穷举，否则带预算的分支定界"""
    tuples = as_ktuple_set(graph)
    if len(tuples) <= BRUTE_FORCE_MAX_SIZE:
        return brute_force_alpha(tuples)
    members = tuples.sorted_members()
    masks = _conflict_masks(members, induced_conflicts(tuples))
    search = _IndependentSetSearch(masks, budget if budget is not None else DEFAULT_NODE_BUDGET)
    search.search((1 << len(members)) - 1, 0, 0)
    return AlphaResult(
        value=search.best_count,
        witness=_result_from_mask(tuples, members, search.best_mask),
        method="branch-bound",
        optimal=not search.exhausted,
        size=len(members),
        nodes=search.nodes,
    )


def derandomized_coloring(graph: OrderedGraph) -> Coloring:
    """条件期望法：按标签递增依次固定颜色，保持 E|G_c| 不减

    给定前缀着色，v 的蓝色贡献为其右邻居数的一半（右端点仍为随机），红色
    贡献为其蓝色左邻居数；取较大者，相等时取蓝。
    """
    right_degree = [0] * (graph.n + 1)
    left_neighbours: List[List[int]] = [[] for _ in range(graph.n + 1)]
    for i, j in graph.edges:
        right_degree[i] += 1
        left_neighbours[j].append(i)

    colors: List[str] = []
    for v in range(1, graph.n + 1):
        blue_left = sum(1 for u in left_neighbours[v] if colors[u - 1] == BLUE)
        colors.append(BLUE if Fraction(right_degree[v], 2) >= blue_left else RED)
    return Coloring(tuple(colors), BLUE_RED)


def derandomized_quarter(graph: OrderedGraph) -> OrderedGraph:
    """确定性地给出 |G_c| ≥ ⌈|G|/4⌉ 的独立集

    Raises:
        InvalidInputError: G 为空
        InvariantViolation: 结果低于 ⌈|G|/4⌉
    """
    if not graph.edges:
        raise InvalidInputError("derandomized quarter needs a nonempty graph")
    result = color_filter(graph, derandomized_coloring(graph))
    floor = ceil(len(graph) / 4)
    if len(result) < floor:
        raise InvariantViolation(f"derandomized filter kept {len(result)} < ceil(|G|/4) = {floor}")
    return result


@lru_cache(maxsize=None)
def validate_pattern_scheme(patterns: Tuple[str, ...]) -> bool:
    """两个 0/1 串 p, q 在某个元组对上同时被保留且相邻，当且仅当 p 的后三位
    等于 q 的前三位（或反之）。检查所有模式对都不出现这种重叠。"""
    if any(len(p) != 4 or set(p) - set("01") for p in patterns):
        raise InvalidInputError(f"patterns must be 4-bit strings, got {patterns}")
    return all(p[1:] != q[:-1] for p, q in product(patterns, repeat=2))


def k4_pattern_filter(tuples: KTupleSet, coloring: Coloring, patterns: Tuple[str, ...] = K4_PATTERNS) -> KTupleSet:
    """保留 c(x_1)c(x_2)c(x_3)c(x_4) ∈ P 的 4 元组，随机着色下期望 3/8 |G|

    Raises:
        InvalidInputError: k ≠ 4、着色不覆盖 [n] 或模式集合不独立
    """
    if tuples.k != 4:
        raise InvalidInputError(f"the 4-tuple pattern filter needs k = 4, got k = {tuples.k}")
    _require_cover(tuples.n, coloring, BINARY)
    if not validate_pattern_scheme(tuple(patterns)):
        raise InvalidInputError("pattern scheme admits two adjacent kept tuples")
    allowed = set(patterns)
    kept = frozenset(m for m in tuples.members if "".join(str(coloring(x)) for x in m) in allowed)
    return KTupleSet(n=tuples.n, k=4, members=kept)


def p3_free_filter(graph: OrderedGraph, coloring: Coloring) -> OrderedGraph:
    """三色 c: [n] → {0,1,2}，保留 c(i) < c(j) 的边

    结果中最长递增路径至多 2 条边；期望大小 |G|/3。
    """
    _require_cover(graph.n, coloring, TERNARY)
    return OrderedGraph(graph.n, frozenset(e for e in graph.edges if coloring(e[0]) < coloring(e[1])))


def _pattern_codes(members: Sequence[KTuple]) -> np.ndarray:
    return np.array([m.entries for m in members], dtype=np.int64) - 1


def pattern_density(tuples: KTupleSet, trials: int, seed: int, chunk: int = 10_000) -> Fraction:
    """随机二元着色下 |k4_pattern_filter| / |G| 的平均值（精确有理数）"""
    if tuples.k != 4 or not len(tuples):
        raise InvalidInputError("pattern density needs a nonempty 4-tuple set")
    members = tuples.sorted_members()
    positions = _pattern_codes(members)
    allowed = np.array([int(p, 2) for p in K4_PATTERNS])
    rng = np.random.default_rng(seed)
    kept = 0
    done = 0
    while done < trials:
        size = min(chunk, trials - done)
        colors = rng.integers(0, 2, size=(size, tuples.n), dtype=np.int64)
        codes = (
            colors[:, positions[:, 0]] * 8
            + colors[:, positions[:, 1]] * 4
            + colors[:, positions[:, 2]] * 2
            + colors[:, positions[:, 3]]
        )
        kept += int(np.isin(codes, allowed).sum())
        done += size
    return Fraction(kept, trials * len(members))


def ordered_filter_density(
    graph: OrderedGraph, palette_size: int, trials: int, seed: int, chunk: int = 10_000
) -> Fraction:
    """随机 q 色着色下保留 c(i) < c(j) 的边所占比例的平均值（精确有理数）

    q = 2 时（0 为蓝、1 为红）即 |G_c|/|G|，期望 1/4；q = 3 时即
    p3_free_filter，期望 1/3。
    """
    if not graph.edges:
        raise InvalidInputError("filter density needs a nonempty graph")
    if palette_size < 2:
        raise InvalidInputError(f"palette size must be at least 2, got {palette_size}")
    edges = np.array(graph.sorted_edges(), dtype=np.int64) - 1
    rng = np.random.default_rng(seed)
    kept = 0
    done = 0
    while done < trials:
        size = min(chunk, trials - done)
        colors = rng.integers(0, palette_size, size=(size, graph.n), dtype=np.int64)
        kept += int((colors[:, edges[:, 0]] < colors[:, edges[:, 1]]).sum())
        done += size
    return Fraction(kept, trials * len(graph))


@dataclass
class WindowCheck:
    """单条树边上的窗口比值检查结果"""

    edge: Tuple[int, int]
    level: int
    window: int
    children: int
    independent_count: int
    window_size: int
    bound: Fraction
    optimal: bool = True

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.independent_count, self.window_size)

    @property
    def upper_holds(self) -> bool:
        """|I[W]| ≤ 2^{−j} |N⁺(child)|"""
        return self.independent_count <= self.bound * self.children

    @property
    def lower_holds(self) -> bool:
        """|G[W]| ≥ |N⁺(child)|"""
        return self.window_size >= self.children

    def to_dict(self) -> Dict[str, Any]:
        return {
            "edge": list(self.edge),
            "level": self.level,
            "window": self.window,
            "children": self.children,
            "independent_count": self.independent_count,
            "window_size": self.window_size,
            "ratio": ratio_fields(self.independent_count, self.window_size),
            "bound": str(self.bound),
            "upper_holds": self.upper_holds,
            "lower_holds": self.lower_holds,
            "optimal": self.optimal,
        }


def window_check(tree: LabeledTree, independent: OrderedGraph, edge: Tuple[int, int]) -> WindowCheck:
    """计算 |I[W]| 与 |G[W]|，不抛出不变量异常

    Raises:
        InvalidInputError: edge ∉ I、I 不是树边集的子集或不独立
    """
    tree_graph = tree.to_graph()
    if tuple(edge) not in independent.edges:
        raise InvalidInputError(f"edge {edge} is not in the independent set")
    if not is_independent(tree_graph, OrderedGraph(tree_graph.n, independent.edges)):
        raise InvalidInputError("edge set is not independent in the shift graph")
    window, window_graph = tree_window(tree, edge)
    w = window[-1]
    in_window = sum(1 for i, j in independent.edges if j <= w)
    level = tree.level_of[edge[1]]
    return WindowCheck(
        edge=tuple(edge),
        level=level,
        window=w,
        children=tree.child_count(edge[1]),
        independent_count=in_window,
        window_size=len(window_graph),
        bound=Fraction(1, 2**level),
    )


def window_ratio(tree: LabeledTree, independent: OrderedGraph, edge: Tuple[int, int]) -> Fraction:
    """|I[W]| / |G[W]|，其中 j 为 child 的层号

    Raises:
        InvariantViolation: |I[W]| > 2^{−j}|N⁺(child)| 或 |G[W]| < |N⁺(child)|
    """
    check = window_check(tree, independent, edge)
    if not check.upper_holds or not check.lower_holds:
        raise InvariantViolation(
            f"window at edge {edge}: |I[W]|={check.independent_count}, |G[W]|={check.window_size}, "
            f"|N+|={check.children}, level={check.level}"
        )
    return check.ratio


def max_window_ratio(tree: LabeledTree, edge: Tuple[int, int], budget: Optional[int] = None) -> WindowCheck:
    """所有含 edge 的独立集 I 上 |I[W]| 的最大值

    等于 1 + α(G[W] − edge 的闭冲突邻域)。
    """
    parent, child = edge
    _, window_graph = tree_window(tree, edge)
    blocked = {e for e in window_graph.edges if e == (parent, child) or e[1] == parent or e[0] == child}
    rest = OrderedGraph(window_graph.n, window_graph.edges - blocked)
    alpha = exact_alpha_general(rest, budget=budget) if rest.edges else None
    best = frozenset(m.entries for m in alpha.witness) if alpha else frozenset()
    independent = OrderedGraph(tree.size, best | {(parent, child)})
    check = window_check(tree, independent, edge)
    check.optimal = alpha.optimal if alpha else True
    return check
