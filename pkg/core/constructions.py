"""
构造模块

构造 M(n,1) 完全二部图、伪随机二部块 B(n,d)（逐实例差异认证）、递归的
M(n,d)，以及无限树的有限截断。所有构造都由种子确定。

种子派生：sub_seed = SeedSequence([root_seed, level, attempt, stream]) 生成的
前 64 位。同一递归层的两半共用一个子种子，因此 M(n,d) 的 S 半与 L 半在
标签平移后完全相同。
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.errors import InvalidInputError, ResourceLimitError
from core.models import BlockParams, BlockRecord, DiscrepancyCertificate, to_fraction
from core.shift_graph import OrderedGraph

logger = logging.getLogger(__name__)

# 穷举认证的规模上限：n ≤ 24，即每侧至多 12 个顶点
EXHAUSTIVE_MAX_N = 24
# 树的顶点数上限
MAX_TREE_VERTICES = 1_000_000
# 默认采样认证的 (X, Y) 对数
DEFAULT_SAMPLE_COUNT = 2000
DEFAULT_RESAMPLE_LIMIT = 32

STREAM_BLOCK = 0
STREAM_CERTIFY = 1


def derive_seed(root_seed: int, level: int, attempt: int = 0, stream: int = STREAM_BLOCK) -> int:
    """由 (root_seed, level, attempt, stream) 派生 64 位子种子

    Args:
        root_seed: 实例根种子
        level: 递归层（0 为顶层）
        attempt: 第几次重采样（0 为首次）
        stream: STREAM_BLOCK 用于抽边，STREAM_CERTIFY 用于采样认证

    Returns:
        [0, 2^64) 内的整数
    """
    words = np.random.SeedSequence([root_seed, level, attempt, stream]).generate_state(2, dtype=np.uint32)
    return int(words[0]) | (int(words[1]) << 32)


def build_M1(n: int) -> OrderedGraph:
    """M(n,1) = {(i, j) : 1 ≤ i ≤ n/2 < j ≤ n}

    Raises:
        InvalidInputError: n 为奇数或小于 2
    """
    if n < 2 or n % 2:
        raise InvalidInputError(f"M(n,1) needs an even n >= 2, got {n}")
    half = n // 2
    return OrderedGraph(n, frozenset((i, j) for i in range(1, half + 1) for j in range(half + 1, n + 1)))


def sample_block(params: BlockParams) -> OrderedGraph:
    """无放回抽取 K_{S,L} 中的 n²/2^{d+1} 条边

    K_{S,L} 的边按字典序编号 0..n²/4−1，用 PCG64 生成随机排列，取前
    edge_budget 个编号。相同参数与种子给出完全相同的边集。
    """
    half = params.half
    rng = np.random.default_rng(params.seed)
    chosen = np.sort(rng.permutation(half * half)[: params.edge_budget])
    edges = frozenset((int(idx) // half + 1, half + int(idx) % half + 1) for idx in chosen)
    return OrderedGraph(params.n, edges)


def _biadjacency(block: OrderedGraph) -> np.ndarray:
    half = block.n // 2
    matrix = np.zeros((half, half), dtype=np.int64)
    for i, j in block.edges:
        if not (i <= half < j):
            raise InvalidInputError(f"edge ({i}, {j}) does not cross S|L at {half}")
        matrix[i - 1, j - half - 1] = 1
    return matrix


def _subset_bits(count: int) -> np.ndarray:
    masks = np.arange(1, 2 ** count, dtype=np.int64)
    return ((masks[:, None] >> np.arange(count)) & 1).astype(np.int64)


def _best_y(weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """对每个 X，|Σ_{y∈Y} w_y| 的最大值取自全部正项或全部负项"""
    positive = np.where(weights > 0, weights, 0).sum(axis=1)
    negative = np.where(weights < 0, -weights, 0).sum(axis=1)
    return np.maximum(positive, negative), positive >= negative


def certify_discrepancy(
    block: OrderedGraph,
    d: int,
    epsilon,
    mode: str = "exhaustive",
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    sample_seed: int = 0,
) -> DiscrepancyCertificate:
    """检查 e(X,Y) = |X||Y|/2^{d−1} ± ε n²/2^{d+2}

    所有量乘以 2^{d−1} 后在整数上计算，偏差以精确有理数给出。

    Args:
        block: S|L 间的二部图
        d: 深度参数
        epsilon: 差异预算 ε
        mode: exhaustive（n ≤ 24）、intervals（X、Y 均为标签区间）或 sampled
        sample_count: sampled 模式下的 (X, Y) 对数
        sample_seed: sampled 模式的种子

    Raises:
        ResourceLimitError: exhaustive 模式下 n 超过 EXHAUSTIVE_MAX_N
        InvalidInputError: 存在不跨越 S|L 的边，或 mode 未知
    """
    n = block.n
    half = n // 2
    eps = to_fraction(epsilon)
    scale = 2 ** (d - 1)
    matrix = _biadjacency(block)
    worst_pair = None
    seed_used = None

    if mode == "exhaustive":
        if n > EXHAUSTIVE_MAX_N:
            raise ResourceLimitError(f"exhaustive discrepancy check limited to n <= {EXHAUSTIVE_MAX_N}, got {n}")
        bits = _subset_bits(half)
        weights = scale * (bits @ matrix) - bits.sum(axis=1)[:, None]
        per_x, use_positive = _best_y(weights)
        best = int(np.argmax(per_x))
        worst_scaled = int(per_x[best])
        x_set = [int(i) + 1 for i in np.flatnonzero(bits[best])]
        row = weights[best]
        y_mask = row > 0 if use_positive[best] else row < 0
        worst_pair = (x_set, [int(i) + half + 1 for i in np.flatnonzero(y_mask)])
        pairs_checked = (2 ** half - 1) ** 2
    elif mode == "intervals":
        prefix_rows = np.vstack([np.zeros((1, half), dtype=np.int64), np.cumsum(matrix, axis=0)])
        starts, ends = np.triu_indices(half)
        degrees = prefix_rows[ends + 1] - prefix_rows[starts]
        weights = scale * degrees - (ends - starts + 1)[:, None]
        running = np.hstack([np.zeros((len(starts), 1), dtype=np.int64), np.cumsum(weights, axis=1)])
        spread = running.max(axis=1) - running.min(axis=1)
        best = int(np.argmax(spread))
        worst_scaled = int(spread[best])
        lo, hi = sorted((int(np.argmin(running[best])), int(np.argmax(running[best]))))
        worst_pair = (
            list(range(int(starts[best]) + 1, int(ends[best]) + 2)),
            list(range(half + lo + 1, half + hi + 1)),
        )
        pairs_checked = (half * (half + 1) // 2) ** 2
    elif mode == "sampled":
        rng = np.random.default_rng(sample_seed)
        seed_used = sample_seed
        x_bits = _nonempty_rows(rng, sample_count, half)
        y_bits = _nonempty_rows(rng, sample_count, half)
        crossing = np.einsum("ij,jk,ik->i", x_bits, matrix, y_bits)
        deviation = np.abs(scale * crossing - x_bits.sum(axis=1) * y_bits.sum(axis=1))
        best = int(np.argmax(deviation))
        worst_scaled = int(deviation[best])
        worst_pair = (
            [int(i) + 1 for i in np.flatnonzero(x_bits[best])],
            [int(i) + half + 1 for i in np.flatnonzero(y_bits[best])],
        )
        pairs_checked = sample_count
    else:
        raise InvalidInputError(f"unknown certification mode {mode!r}")

    worst = Fraction(worst_scaled, scale)
    unit = Fraction(n * n, 2 ** (d + 2))
    budget = eps * unit
    certificate = DiscrepancyCertificate(
        mode=mode,
        n=n,
        d=d,
        worst_deviation=worst,
        budget=budget,
        epsilon_hat=worst / unit,
        pairs_checked=pairs_checked,
        passed=worst <= budget,
        worst_pair=worst_pair,
        sample_seed=seed_used,
    )
    logger.debug(f"certificate n={n} d={d} mode={mode}: worst={worst} budget={budget} passed={certificate.passed}")
    return certificate


def _nonempty_rows(rng: np.random.Generator, count: int, width: int) -> np.ndarray:
    """count 行在非空子集上均匀分布的 0/1 向量（拒绝采样）"""
    rows = rng.integers(0, 2, size=(count, width), dtype=np.int64)
    empty = rows.sum(axis=1) == 0
    while empty.any():
        rows[empty] = rng.integers(0, 2, size=(int(empty.sum()), width), dtype=np.int64)
        empty = rows.sum(axis=1) == 0
    return rows


@dataclass
class MndInstance:
    """
    M(n, d) 实例

    blocks 每层一条记录；measured_epsilons[level] 为该层块的实测 ε̂。
    构造后不强制校验边数恒等式，便于从文件载入被改动的实例再做验证。
    """

    params: BlockParams
    graph: OrderedGraph
    blocks: List[BlockRecord] = field(default_factory=list)
    measured_epsilons: List[Fraction] = field(default_factory=list)
    resample_limit: int = DEFAULT_RESAMPLE_LIMIT

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def epsilon_hat(self) -> Fraction:
        """各层实测 ε̂ 的最大值（d = 1 时为 0）"""
        return max(self.measured_epsilons, default=Fraction(0))

    @property
    def certified(self) -> bool:
        return all(record.certificate.passed for record in self.blocks)

    @property
    def certification_exact(self) -> bool:
        """所有块都经过穷举认证时，ε̂ 是精确值"""
        return all(record.certificate.mode == "exhaustive" for record in self.blocks)

    @property
    def expected_edge_count(self) -> int:
        """d · n² / 2^{d+1}"""
        return self.d * self.n * self.n // 2 ** (self.d + 1)

    def check_edge_count(self) -> bool:
        return len(self.graph) == self.expected_edge_count

    def halves_identical(self) -> bool:
        """G[S] 与 G[L] 平移 n/2 后是否为同一边集"""
        half = self.n // 2
        s_edges = {e for e in self.graph.edges if e[1] <= half}
        l_edges = {(i - half, j - half) for i, j in self.graph.edges if i > half}
        return s_edges == l_edges

    def level_block(self, level: int) -> OrderedGraph:
        """第 level 层第一个节点（标签 1..n/2^level）上的跨 S|L 块"""
        size = self.n >> level
        half = size // 2
        edges = frozenset((i, j) for i, j in self.graph.edges if i <= half < j <= size)
        return OrderedGraph(size, edges)


def _certify_level(
    params: BlockParams,
    level: int,
    resample_limit: int,
    mode: Optional[str],
    sample_count: int,
) -> Tuple[OrderedGraph, BlockRecord]:
    size = params.n >> level
    depth = params.d - level
    chosen_mode = mode or ("exhaustive" if size <= EXHAUSTIVE_MAX_N else "sampled")

    best: Optional[Tuple[OrderedGraph, DiscrepancyCertificate, int]] = None
    attempts = 0
    for attempt in range(resample_limit + 1):
        attempts = attempt + 1
        sub_seed = derive_seed(params.seed, level, attempt)
        block = sample_block(BlockParams(n=size, d=depth, epsilon=params.epsilon, seed=sub_seed))
        certificate = certify_discrepancy(
            block,
            depth,
            params.epsilon,
            mode=chosen_mode,
            sample_count=sample_count,
            sample_seed=derive_seed(params.seed, level, attempt, STREAM_CERTIFY),
        )
        if best is None or certificate.worst_deviation < best[1].worst_deviation:
            best = (block, certificate, sub_seed)
        if certificate.passed:
            break
        logger.debug(f"level {level} attempt {attempt}: deviation {certificate.worst_deviation} over budget")

    block, certificate, seed = best
    if not certificate.passed:
        logger.warning(
            f"level {level} block (n={size}, d={depth}) failed certification after {attempts} attempts; "
            f"keeping best with epsilon_hat={certificate.epsilon_hat}"
        )
    record = BlockRecord(
        level=level, n=size, d=depth, seed=seed, attempts=attempts, copies=2 ** level, certificate=certificate
    )
    return block, record


def build_Mnd(
    params: BlockParams,
    resample_limit: int = DEFAULT_RESAMPLE_LIMIT,
    mode: Optional[str] = None,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
) -> MndInstance:
    """M(n,d) = M(S, d−1) ∪ M(L, d−1) ∪ B(n, d)，M(·,1) 为完全二部图

    自底向上构造：最深一层为 M(n/2^{d−1}, 1)，之后每层把子图复制到两半并加上
    该层认证过的块。块认证失败时用派生种子重采样，至多 resample_limit 次，
    之后保留偏差最小的块并记录其 ε̂。

    Args:
        params: 实例参数（2^d | n）
        resample_limit: 每层最多重采样次数
        mode: 强制认证模式；默认 n ≤ 24 时穷举，否则采样
        sample_count: 采样认证的 (X, Y) 对数
    """
    if resample_limit < 0:
        raise InvalidInputError("resample_limit must be non-negative")
    n, d = params.n, params.d
    graph = build_M1(n >> (d - 1))
    records: List[BlockRecord] = []
    blocks: Dict[int, OrderedGraph] = {}

    for level in range(d - 2, -1, -1):
        size = n >> level
        half = size // 2
        block, record = _certify_level(params, level, resample_limit, mode, sample_count)
        blocks[level] = block
        records.append(record)
        graph = OrderedGraph(size, graph.edges | graph.relabel(half, n=size).edges | block.edges)

    records.sort(key=lambda r: r.level)
    instance = MndInstance(
        params=params,
        graph=graph,
        blocks=records,
        measured_epsilons=[r.certificate.epsilon_hat for r in records],
        resample_limit=resample_limit,
    )
    logger.info(
        f"built M({n},{d}) seed={params.seed}: {len(graph)} edges, "
        f"certified={instance.certified}, epsilon_hat={instance.epsilon_hat}"
    )
    return instance


def instance_half(instance: MndInstance, side: str) -> MndInstance:
    """取 M(n,d) 的 S 半或 L 半作为 M(n/2, d−1) 实例（L 半平移回 1..n/2）

    Raises:
        InvalidInputError: d < 2 或 side 不是 "S"/"L"
    """
    if instance.d < 2:
        raise InvalidInputError("halves are M(n/2, d-1) instances only for d >= 2")
    half = instance.n // 2
    if side == "S":
        edges = frozenset(e for e in instance.graph.edges if e[1] <= half)
    elif side == "L":
        edges = frozenset((i - half, j - half) for i, j in instance.graph.edges if i > half)
    else:
        raise InvalidInputError(f"side must be 'S' or 'L', got {side!r}")

    params = BlockParams(n=half, d=instance.d - 1, epsilon=instance.params.epsilon, seed=instance.params.seed)
    records = [
        r.model_copy(update={"level": r.level - 1, "copies": r.copies // 2})
        for r in instance.blocks
        if r.level >= 1
    ]
    return MndInstance(
        params=params,
        graph=OrderedGraph(half, edges),
        blocks=records,
        measured_epsilons=[r.certificate.epsilon_hat for r in records],
        resample_limit=instance.resample_limit,
    )


@dataclass(frozen=True)
class GrowthRecord:
    """单个内部顶点的增长记录：要求的最少子节点数与实际子节点数"""

    vertex: int
    level: int
    position: int
    required: int
    actual: int


@dataclass
class LabeledTree:
    """
    分层、区间有序的有根树

    顶点即其标签 1..N：先按层、层内从左到右编号；每个内部顶点的子节点是
    一段连续标签区间 children[v] = (first, last)。
    """

    levels: List[List[int]]
    children: Dict[int, Tuple[int, int]]
    growth_log: List[GrowthRecord]
    root_children: int = 1
    slack: int = 0
    parent: Dict[int, int] = field(default_factory=dict)
    level_of: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.level_of:
            self.level_of = {v: j for j, level in enumerate(self.levels) for v in level}
        if not self.parent:
            self.parent = {u: v for v, (first, last) in self.children.items() for u in range(first, last + 1)}

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def size(self) -> int:
        return sum(len(level) for level in self.levels)

    def child_count(self, vertex: int) -> int:
        first, last = self.children.get(vertex, (1, 0))
        return last - first + 1

    def vertex_name(self, vertex: int) -> str:
        """v_i^j 形式的名称（i 从 1 开始）"""
        j = self.level_of[vertex]
        i = self.levels[j].index(vertex) + 1
        return f"v_{i}^{j}"

    def edges(self) -> List[Tuple[int, int]]:
        return [(v, u) for v, (first, last) in sorted(self.children.items()) for u in range(first, last + 1)]

    def to_graph(self) -> OrderedGraph:
        return OrderedGraph(self.size, frozenset(self.edges()))

    def growth_holds(self) -> bool:
        """每个内部顶点都满足 |N⁺(v)| ≥ 2^j Σ_{u<v} |N⁺(u)|"""
        running = 0
        for v in sorted(self.children):
            count = self.child_count(v)
            if count < 2 ** self.level_of[v] * running:
                return False
            running += count
        return True


def build_tree(levels: int, root_children: int = 1, slack: int = 0) -> LabeledTree:
    """构造满足增长条件的 J 层截断树

    根有 root_children 个子节点；第 j 层（j < J）的其他顶点 v 恰有
    max(1, 2^j · Σ_{u<v} |N⁺(u)|) + slack 个子节点；第 J 层为叶子。

    Raises:
        InvalidInputError: 参数越界
        ResourceLimitError: 顶点总数超过 MAX_TREE_VERTICES
    """
    if levels < 1 or root_children < 1 or slack < 0:
        raise InvalidInputError(
            f"need levels >= 1, root_children >= 1, slack >= 0; got {levels}, {root_children}, {slack}"
        )

    tree_levels: List[List[int]] = [[1]]
    children: Dict[int, Tuple[int, int]] = {}
    growth: List[GrowthRecord] = []
    next_label = 2
    running = 0

    for j in range(levels):
        next_level: List[int] = []
        for position, vertex in enumerate(tree_levels[j], start=1):
            required = 2 ** j * running
            count = root_children if vertex == 1 else max(1, required) + slack
            if next_label - 1 + count > MAX_TREE_VERTICES:
                raise ResourceLimitError(f"tree would exceed {MAX_TREE_VERTICES} vertices")
            children[vertex] = (next_label, next_label + count - 1)
            next_level.extend(range(next_label, next_label + count))
            growth.append(GrowthRecord(vertex=vertex, level=j, position=position, required=required, actual=count))
            assert count >= required
            next_label += count
            running += count
        tree_levels.append(next_level)

    tree = LabeledTree(levels=tree_levels, children=children, growth_log=growth,
                       root_children=root_children, slack=slack)
    logger.info(f"built tree J={levels}: level sizes {[len(level) for level in tree_levels]}, {tree.size} vertices")
    return tree


def tree_window(tree: LabeledTree, edge: Tuple[int, int]) -> Tuple[range, OrderedGraph]:
    """窗口 W = {1..w}，w 为 child 的最大子节点；G_W 为两端都在 W 内的树边

    G[W] = ⋃_{v ≤ child} {(v, u) : u ∈ N⁺(v)}。

    Raises:
        InvalidInputError: edge 不是树边，或 child 是叶子
    """
    parent, child = edge
    if tree.parent.get(child) != parent:
        raise InvalidInputError(f"({parent}, {child}) is not a parent-child edge of the tree")
    if child not in tree.children:
        raise InvalidInputError(f"child {child} is a leaf; the window needs an internal vertex")
    w = tree.children[child][1]
    window_edges = frozenset(
        (v, u) for v, (first, last) in tree.children.items() if v <= child for u in range(first, last + 1)
    )
    return range(1, w + 1), OrderedGraph(w, window_edges)
