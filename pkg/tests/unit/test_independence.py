"""
独立集模块单元测试

测试颜色过滤器、精确独立数、去随机化下界、模式过滤与树窗口比值
"""

from fractions import Fraction
from math import ceil

import pytest

from core.constructions import LabeledTree, build_M1
from core.errors import InvalidInputError, InvariantViolation, ResourceLimitError
from core.independence import (
    BINARY,
    K4_PATTERNS,
    TERNARY,
    Coloring,
    best_color_filter,
    brute_force_alpha,
    color_filter,
    derandomized_coloring,
    derandomized_quarter,
    exact_alpha_general,
    exact_alpha_k2,
    half_split_independent_set,
    k4_pattern_filter,
    max_window_ratio,
    odd_even_independent_set,
    ordered_filter_density,
    p3_free_filter,
    pattern_density,
    random_color_filter,
    random_coloring,
    validate_pattern_scheme,
    window_check,
    window_ratio,
)
from core.shift_graph import (
    KTupleSet,
    OrderedGraph,
    full_vertex_set,
    is_independent,
    longest_increasing_path,
    random_ordered_graph,
)

PATH_4 = OrderedGraph.from_edges(4, [(1, 2), (2, 3), (3, 4)])


@pytest.mark.unit
class TestColoring:

    def test_from_string_palettes(self):
        """按出现的字符推断调色板"""
        assert Coloring.from_string("bbrr").palette == ("b", "r")
        assert Coloring.from_string("0110").palette == BINARY
        assert Coloring.from_string("0120").palette == TERNARY

    def test_one_based_access(self):
        coloring = Coloring.from_string("brb")
        assert coloring(1) == "b"
        assert coloring(2) == "r"
        assert coloring.count("b") == 2

    def test_rejects_foreign_color(self):
        """调色板之外的颜色被拒绝"""
        with pytest.raises(InvalidInputError):
            Coloring(("b", "g"))

    def test_random_coloring_is_reproducible(self):
        assert random_coloring(12, 4) == random_coloring(12, 4)
        assert random_coloring(12, 4, TERNARY).palette == TERNARY


@pytest.mark.unit
class TestColorFilter:
    """测试蓝红过滤器"""

    def test_blue_then_red_keeps_bipartite(self):
        """前半蓝、后半红时 M(4,1) 全部保留"""
        graph = build_M1(4)
        assert color_filter(graph, Coloring.from_string("bbrr")) == graph

    def test_all_red_keeps_nothing(self):
        """全红着色过滤掉所有边"""
        assert len(color_filter(build_M1(4), Coloring.from_string("rrrr"))) == 0

    def test_short_coloring_rejected(self):
        with pytest.raises(InvalidInputError):
            color_filter(build_M1(4), Coloring.from_string("bbr"))

    def test_filters_are_independent(self, small_random_graphs):
        """100 张随机图上的过滤结果都是独立集"""
        for case in small_random_graphs:
            kept = random_color_filter(case.graph, case.seed)
            assert is_independent(case.graph, kept), case.seed

    def test_explicit_sets(self):
        """奇偶集与对半集都是独立集"""
        full = full_vertex_set(8, 2)
        assert is_independent(full, odd_even_independent_set(8))
        assert is_independent(full, half_split_independent_set(8))
        assert len(odd_even_independent_set(8)) == 10


@pytest.mark.unit
class TestBestColorFilter:

    @pytest.mark.parametrize("blue, expected", [(0, 0), (1, 2), (2, 4), (3, 2), (4, 0)])
    def test_fixed_blue_count_on_m1(self, blue, expected):
        """固定蓝色数时 M(4,1) 上的最优值"""
        outcome = best_color_filter(build_M1(4), blue_count=blue)
        assert outcome.value == expected
        assert outcome.optimal
        assert outcome.coloring.count("b") == blue

    def test_inactive_vertices_absorb_blue(self):
        """多余的蓝色分给孤立顶点"""
        graph = OrderedGraph.from_edges(6, [(1, 2)])
        outcome = best_color_filter(graph, blue_count=3)
        assert outcome.value == 1
        assert outcome.coloring.count("b") == 3

    def test_blue_count_out_of_range(self):
        with pytest.raises(InvalidInputError):
            best_color_filter(build_M1(4), blue_count=5)

    def test_budget_marks_non_optimal(self):
        """预算耗尽时 optimal = False"""
        graph = random_ordered_graph(24, 1, probability=0.5)
        outcome = best_color_filter(graph, budget=5)
        assert not outcome.optimal
        assert len(color_filter(graph, outcome.coloring)) == outcome.value


@pytest.mark.unit
class TestExactAlpha:
    """测试精确独立数"""

    def test_m1_is_its_own_maximum(self):
        result = exact_alpha_k2(build_M1(4))
        assert result.value == 4
        assert result.method == "coloring-enum"
        assert result.ratio == 1

    def test_path(self):
        """路径 P4 的独立数为 2"""
        result = exact_alpha_k2(PATH_4)
        assert result.value == 2
        assert brute_force_alpha(PATH_4).value == 2

    def test_empty_graph(self):
        result = exact_alpha_k2(OrderedGraph(5))
        assert result.value == 0
        assert result.ratio is None

    def test_agrees_with_subset_enumeration(self, small_random_graphs):
        """着色搜索与子集枚举一致"""
        for case in small_random_graphs:
            fast = exact_alpha_k2(case.graph)
            slow = brute_force_alpha(case.graph)
            assert fast.value == slow.value, case.seed
            assert is_independent(case.graph, fast.witness)

    def test_general_matches_k2(self, small_random_graphs):
        """k = 2 时通用分支定界与着色搜索一致"""
        for case in small_random_graphs[:20]:
            assert exact_alpha_general(case.graph).value == exact_alpha_k2(case.graph).value

    def test_general_branch_and_bound(self):
        result = exact_alpha_general(build_M1(12))
        assert result.method == "branch-bound"
        assert result.value == 36
        assert result.optimal

    def test_general_on_triples(self):
        """k = 3 的完整顶点集"""
        tuples = full_vertex_set(6, 3)
        result = exact_alpha_general(tuples)
        assert is_independent(tuples, result.witness)
        assert result.value == len(result.witness)
        assert result.value == brute_force_alpha(KTupleSet.from_tuples(6, 3, [m.entries for m in tuples])).value

    def test_brute_force_guard(self):
        """子集枚举超过规模上限时报错"""
        with pytest.raises(ResourceLimitError):
            brute_force_alpha(build_M1(12))

    def test_to_dict(self):
        payload = exact_alpha_k2(PATH_4).to_dict()
        assert payload["ratio"]["exact"] == "2/3"
        assert payload["coloring"]
        assert len(payload["witness"]) == 2


@pytest.mark.unit
class TestDerandomizedQuarter:
    """测试条件期望法的 1/4 下界"""

    def test_meets_floor(self, small_random_graphs):
        """去随机化结果不少于 ⌈|G|/4⌉"""
        for case in small_random_graphs:
            if not case.graph.edges:
                continue
            kept = derandomized_quarter(case.graph)
            assert len(kept) >= ceil(len(case.graph) / 4), case.seed
            assert is_independent(case.graph, kept)

    def test_deterministic(self):
        graph = random_ordered_graph(15, 2, probability=0.4)
        assert derandomized_coloring(graph) == derandomized_coloring(graph)

    def test_single_edge(self):
        """单条边也能保留"""
        assert len(derandomized_quarter(OrderedGraph.from_edges(2, [(1, 2)]))) == 1

    def test_empty_graph_rejected(self):
        with pytest.raises(InvalidInputError):
            derandomized_quarter(OrderedGraph(4))


@pytest.mark.unit
class TestPatternFilters:
    """测试 k = 4 模式过滤与三色过滤"""

    def test_scheme_is_independent(self):
        """k = 4 的模式表两两不冲突"""
        assert validate_pattern_scheme(K4_PATTERNS)

    @pytest.mark.parametrize("patterns", [("0000",), ("0111", "1111")])
    def test_overlapping_schemes(self, patterns):
        """有重叠的模式表被识别出来"""
        assert not validate_pattern_scheme(patterns)

    def test_malformed_pattern(self):
        with pytest.raises(InvalidInputError):
            validate_pattern_scheme(("012",))

    def test_filter_is_independent(self):
        """n = 9 的全部 2^9 种二元着色下过滤结果均为独立集"""
        tuples = full_vertex_set(9, 4)
        for mask in range(2 ** 9):
            coloring = Coloring.from_string(format(mask, "09b"), BINARY)
            kept = k4_pattern_filter(tuples, coloring)
            assert is_independent(tuples, kept), coloring.to_string()

    def test_filter_requires_four_tuples(self):
        with pytest.raises(InvalidInputError):
            k4_pattern_filter(full_vertex_set(6, 3), random_coloring(6, 0, BINARY))

    def test_filter_rejects_bad_scheme(self):
        with pytest.raises(InvalidInputError):
            k4_pattern_filter(full_vertex_set(6, 4), random_coloring(6, 0, BINARY), patterns=("0000",))

    def test_p3_filter_has_short_paths(self):
        """三色过滤后没有长度 3 的递增路径"""
        graph = full_vertex_set(10, 2).to_ordered_graph()
        for seed in range(10):
            kept = p3_free_filter(graph, random_coloring(10, seed, TERNARY))
            assert longest_increasing_path(kept) <= 2

    def test_density_quick(self):
        """模式过滤的密度接近 3/8"""
        density = pattern_density(full_vertex_set(8, 4), trials=5000, seed=1)
        assert abs(density - Fraction(3, 8)) <= Fraction(5, 100)

    @pytest.mark.slow
    def test_pattern_density(self):
        density = pattern_density(full_vertex_set(8, 4), trials=100_000, seed=1)
        assert abs(density - Fraction(3, 8)) <= Fraction(1, 100)

    @pytest.mark.slow
    @pytest.mark.parametrize("palette_size, expected", [(2, Fraction(1, 4)), (3, Fraction(1, 3))])
    def test_ordered_filter_density(self, palette_size, expected):
        graph = random_ordered_graph(16, 3, probability=0.5)
        density = ordered_filter_density(graph, palette_size, trials=100_000, seed=3)
        assert abs(density - expected) <= Fraction(1, 100)

    def test_density_inputs(self):
        with pytest.raises(InvalidInputError):
            ordered_filter_density(OrderedGraph(4), 2, 10, 0)
        with pytest.raises(InvalidInputError):
            ordered_filter_density(build_M1(4), 1, 10, 0)
        with pytest.raises(InvalidInputError):
            pattern_density(full_vertex_set(6, 3), 10, 0)


@pytest.mark.unit
class TestTreeWindows:
    """测试树窗口比值（J = 3）"""

    @pytest.mark.parametrize("edge, count, size", [((1, 2), 1, 3), ((2, 3), 2, 15), ((2, 4), 13, 75)])
    def test_worst_window(self, tree_j3, edge, count, size):
        """窗口内最坏独立集的大小"""
        check = max_window_ratio(tree_j3, edge)
        assert check.independent_count == count
        assert check.window_size == size
        assert check.upper_holds and check.lower_holds
        assert check.optimal

    def test_ratio_values(self, tree_j3):
        assert max_window_ratio(tree_j3, (1, 2)).ratio == Fraction(1, 3)
        assert max_window_ratio(tree_j3, (2, 4)).ratio == Fraction(13, 75)

    def test_window_ratio_for_single_edge(self, tree_j3):
        """只含一条边的独立集"""
        independent = OrderedGraph.from_edges(76, [(1, 2)])
        assert window_ratio(tree_j3, independent, (1, 2)) == Fraction(1, 3)

    def test_dependent_set_rejected(self, tree_j3):
        """非独立集不能计算窗口比值"""
        independent = OrderedGraph.from_edges(76, [(1, 2), (2, 3)])
        with pytest.raises(InvalidInputError):
            window_check(tree_j3, independent, (1, 2))

    def test_edge_must_belong_to_set(self, tree_j3):
        with pytest.raises(InvalidInputError):
            window_check(tree_j3, OrderedGraph.from_edges(76, [(2, 3)]), (1, 2))

    def test_violation_raised_on_slow_growth(self):
        """增长条件不满足时抛出 InvariantViolation"""
        tree = LabeledTree(levels=[[1], [2], [3, 4], [5, 6]],
                           children={1: (2, 2), 2: (3, 4), 3: (5, 5), 4: (6, 6)}, growth_log=[])
        independent = OrderedGraph.from_edges(6, [(2, 4), (3, 5)])
        with pytest.raises(InvariantViolation):
            window_ratio(tree, independent, (2, 4))


@pytest.mark.unit
class TestAcceptanceSweeps:
    """较大规模的扫描：1/4 下界、P3 过滤、模式方案与窗口比值"""

    def test_quarter_floor_on_random_graphs(self):
        """200 张随机图上都达到 1/4 下界"""
        for seed in range(200):
            n = 4 + seed % 37
            graph = random_ordered_graph(n, seed, probability=0.3)
            if not graph.edges:
                continue
            kept = derandomized_quarter(graph)
            floor = ceil(len(graph) / 4)
            assert len(kept) >= floor and is_independent(graph, kept), seed
            if n <= 16:
                assert exact_alpha_k2(graph).value >= len(kept), seed

    def test_p3_filter_on_random_graphs(self, small_random_graphs):
        for case in small_random_graphs:
            kept = p3_free_filter(case.graph, random_coloring(case.n, case.seed, TERNARY))
            assert longest_increasing_path(kept) <= 2, case.seed

    def test_scheme_on_every_five_bit_window(self):
        """5 位窗口中相邻的两个 4 位片段不会同时命中模式"""
        allowed = set(K4_PATTERNS)
        for value in range(32):
            bits = format(value, "05b")
            assert not (bits[:4] in allowed and bits[1:] in allowed), bits

    @pytest.mark.parametrize("edge", [(1, 2), (2, 3), (2, 4)])
    def test_window_ratio_below_level_bound(self, tree_j3, edge):
        """窗口比值不超过 2^{-level}"""
        check = max_window_ratio(tree_j3, edge)
        assert check.ratio <= Fraction(1, 2 ** check.level)
