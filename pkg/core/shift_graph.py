"""
移位图核心模块

定义有序图、k 元组集合以及移位邻接关系，并提供小规模下的精确结构检查
（独立性判定、奇围长）。

顶点标签从 1 开始，与 [n] = {1, ..., n} 保持一致；边一律以递增二元组存储。
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple, Union

import networkx as nx
import numpy as np

from core.errors import InvalidInputError, ResourceLimitError

logger = logging.getLogger(__name__)

# BFS 与完整顶点集的规模上限：C(n, k) 不得超过此值
MAX_SHIFT_VERTICES = 100_000

Edge = Tuple[int, int]


@dataclass(frozen=True, order=True)
class KTuple:
    """严格递增的 k 元组 (x_1 < ... < x_k)，是 Sh_n^k 的一个顶点"""

    entries: Tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(x) for x in self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise InvalidInputError("KTuple must have at least one entry")
        if entries[0] < 1:
            raise InvalidInputError(f"KTuple labels are 1-based, got {entries}")
        if any(a >= b for a, b in zip(entries, entries[1:])):
            raise InvalidInputError(f"KTuple must be strictly increasing, got {entries}")

    @property
    def k(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: int) -> int:
        return self.entries[index]

    def __repr__(self) -> str:
        return f"KTuple{self.entries}"


@dataclass(frozen=True)
class OrderedGraph:
    """顶点为 [n] 的有序图，同时也是 V(Sh_n^2) 的一个子集

    独立集 I 同样以 OrderedGraph 存储（与 G 共用 n）。
    """

    n: int
    edges: FrozenSet[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0:
            raise InvalidInputError(f"vertex count must be non-negative, got {self.n}")
        edges = frozenset((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if not 1 <= i < j <= self.n:
                raise InvalidInputError(f"edge ({i}, {j}) is not an increasing pair in [1, {self.n}]")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> "OrderedGraph":
        """从任意可迭代的边构造；重复边会被合并"""
        return cls(n=n, edges=frozenset(tuple(e) for e in edges))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, edge) -> bool:
        return tuple(edge) in self.edges

    def sorted_edges(self) -> List[Edge]:
        """按字典序排列的边表（保证报告可复现）"""
        return sorted(self.edges)

    def active_vertices(self) -> List[int]:
        """至少关联一条边的顶点，升序"""
        return sorted({v for e in self.edges for v in e})

    def induced(self, vertices: Iterable[int]) -> "OrderedGraph":
        """诱导子图，保留原标签与 n"""
        keep = set(vertices)
        return OrderedGraph(self.n, frozenset(e for e in self.edges if e[0] in keep and e[1] in keep))

    def relabel(self, offset: int, n: Optional[int] = None) -> "OrderedGraph":
        """所有标签平移 offset，n 默认为 self.n + offset"""
        target_n = self.n + offset if n is None else n
        return OrderedGraph(target_n, frozenset((i + offset, j + offset) for i, j in self.edges))

    def union(self, *others: "OrderedGraph") -> "OrderedGraph":
        n = max([self.n] + [g.n for g in others])
        edges = set(self.edges)
        for g in others:
            edges |= g.edges
        return OrderedGraph(n, frozenset(edges))

    def to_ktuple_set(self) -> "KTupleSet":
        return KTupleSet(n=self.n, k=2, members=frozenset(KTuple(e) for e in self.edges))


@dataclass(frozen=True)
class KTupleSet:
    """[n] 上 k 元组的集合，即 ∅ ≠ G ⊆ V(Sh_n^k)"""

    n: int
    k: int
    members: FrozenSet[KTuple] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.k < 1:
            raise InvalidInputError(f"tuple arity must be positive, got {self.k}")
        members = frozenset(m if isinstance(m, KTuple) else KTuple(tuple(m)) for m in self.members)
        for m in members:
            if m.k != self.k:
                raise InvalidInputError(f"{m} has arity {m.k}, expected {self.k}")
            if m.entries[-1] > self.n:
                raise InvalidInputError(f"{m} exceeds ambient n={self.n}")
        object.__setattr__(self, "members", members)

    @classmethod
    def from_tuples(cls, n: int, k: int, tuples: Iterable[Iterable[int]]) -> "KTupleSet":
        return cls(n=n, k=k, members=frozenset(KTuple(tuple(t)) for t in tuples))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def __contains__(self, item) -> bool:
        if not isinstance(item, KTuple):
            item = KTuple(tuple(item))
        return item in self.members

    def sorted_members(self) -> List[KTuple]:
        return sorted(self.members)

    def issubset(self, other: "KTupleSet") -> bool:
        return self.k == other.k and self.members <= other.members

    def to_ordered_graph(self) -> OrderedGraph:
        if self.k != 2:
            raise InvalidInputError(f"only 2-tuple sets convert to ordered graphs, got k={self.k}")
        return OrderedGraph(self.n, frozenset(m.entries for m in self.members))


GraphLike = Union[OrderedGraph, KTupleSet]


def as_ktuple_set(graph: GraphLike) -> KTupleSet:
    """OrderedGraph 统一转换为 KTupleSet；KTupleSet 原样返回"""
    if isinstance(graph, OrderedGraph):
        return graph.to_ktuple_set()
    return graph


def shift_adjacent(x: KTuple, y: KTuple) -> bool:
    """判断两个 k 元组在 Sh^k 中是否相邻

    x_i = y_{i+1}（i = 1..k-1）或 y_i = x_{i+1}（i = 1..k-1）时相邻。

    Raises:
        InvalidInputError: 两个元组长度不同
    """
    if x.k != y.k:
        raise InvalidInputError(f"arity mismatch: {x.k} vs {y.k}")
    if x == y:
        return False
    return x.entries[1:] == y.entries[:-1] or y.entries[1:] == x.entries[:-1]


def induced_conflicts(graph: GraphLike) -> Set[Tuple[KTuple, KTuple]]:
    """G 内所有移位相邻的无序对，以 (较小, 较大) 的形式返回

    k = 2 时即 G 内的所有长度为 2 的递增路径。
    """
    tuples = as_ktuple_set(graph)
    by_prefix: Dict[Tuple[int, ...], List[KTuple]] = {}
    for member in tuples.members:
        by_prefix.setdefault(member.entries[:-1], []).append(member)

    conflicts: Set[Tuple[KTuple, KTuple]] = set()
    for member in tuples.members:
        for shifted in by_prefix.get(member.entries[1:], ()):
            pair = (member, shifted) if member < shifted else (shifted, member)
            conflicts.add(pair)
    return conflicts


def is_independent(graph: GraphLike, subset: GraphLike) -> bool:
    """判断 I ⊆ G 在 Sh_n^k 中是否独立

    Raises:
        InvalidInputError: I 不是 G 的子集
    """
    g = as_ktuple_set(graph)
    i = as_ktuple_set(subset)
    if i.members and (i.k != g.k or not i.members <= g.members):
        raise InvalidInputError("independent-set candidate is not a subset of G")
    return not induced_conflicts(i)


def full_vertex_set(n: int, k: int) -> KTupleSet:
    """V(Sh_n^k) 的全部顶点

    Raises:
        ResourceLimitError: C(n, k) 超过 MAX_SHIFT_VERTICES
    """
    if n < k or k < 1:
        raise InvalidInputError(f"need n >= k >= 1, got n={n}, k={k}")
    if comb(n, k) > MAX_SHIFT_VERTICES:
        raise ResourceLimitError(f"C({n},{k}) = {comb(n, k)} exceeds {MAX_SHIFT_VERTICES}")
    return KTupleSet(n=n, k=k, members=frozenset(KTuple(t) for t in combinations(range(1, n + 1), k)))


def _shift_graph(n: int, k: int) -> nx.Graph:
    graph = nx.Graph()
    vertices = list(combinations(range(1, n + 1), k))
    graph.add_nodes_from(vertices)
    for x in vertices:
        for z in range(x[-1] + 1, n + 1):
            graph.add_edge(x, x[1:] + (z,))
    return graph


def shortest_odd_cycle(n: int, k: int) -> Optional[int]:
    """Sh_n^k 的奇围长（最短奇圈长度），二部图时返回 None

    对每个顶点 v，在二部双覆盖中求 (v, 0) 到 (v, 1) 的最短路，即经过 v 的最短
    奇闭途径；所有顶点上的最小值等于最短奇圈长度。

    Raises:
        InvalidInputError: 不满足 n > k >= 2
        ResourceLimitError: C(n, k) 超过 MAX_SHIFT_VERTICES
    """
    if not n > k >= 2:
        raise InvalidInputError(f"need n > k >= 2, got n={n}, k={k}")
    if comb(n, k) > MAX_SHIFT_VERTICES:
        raise ResourceLimitError(f"C({n},{k}) = {comb(n, k)} exceeds BFS guard {MAX_SHIFT_VERTICES}")

    base = _shift_graph(n, k)
    cover = nx.Graph()
    for x, y in base.edges():
        cover.add_edge((x, 0), (y, 1))
        cover.add_edge((x, 1), (y, 0))

    best: Optional[int] = None
    for v in base.nodes():
        if (v, 0) not in cover:
            continue
        cutoff = None if best is None else best - 1
        lengths = nx.single_source_shortest_path_length(cover, (v, 0), cutoff=cutoff)
        length = lengths.get((v, 1))
        if length is not None and (best is None or length < best):
            best = length
    logger.debug(f"odd girth of Sh_{n}^{k}: {best}")
    return best


def longest_increasing_path(graph: OrderedGraph) -> int:
    """最长递增路径 i_1 < i_2 < ... 的边数（无边时为 0）"""
    longest_to = [0] * (graph.n + 1)
    for i, j in sorted(graph.edges, key=lambda e: (e[1], e[0])):
        longest_to[j] = max(longest_to[j], longest_to[i] + 1)
    return max(longest_to, default=0)


def random_ordered_graph(
    n: int,
    seed: int,
    edge_count: Optional[int] = None,
    probability: Optional[float] = None,
) -> OrderedGraph:
    """可复现的随机有序图

    给定 edge_count 时从 C(n,2) 条递增二元组中无放回抽取；否则每条边以
    probability 独立保留。

    Args:
        n: 顶点数
        seed: 随机种子
        edge_count: 边数（无放回抽样）
        probability: 边保留概率
    """
    pairs = list(combinations(range(1, n + 1), 2))
    rng = np.random.default_rng(seed)
    if edge_count is not None:
        if not 0 <= edge_count <= len(pairs):
            raise InvalidInputError(f"edge_count {edge_count} outside [0, {len(pairs)}]")
        chosen = np.sort(rng.choice(len(pairs), size=edge_count, replace=False))
        return OrderedGraph(n, frozenset(pairs[int(idx)] for idx in chosen))
    if probability is None or not 0 <= probability <= 1:
        raise InvalidInputError("either edge_count or a probability in [0, 1] is required")
    mask = rng.random(len(pairs)) < probability
    return OrderedGraph(n, frozenset(p for p, keep in zip(pairs, mask) if keep))
