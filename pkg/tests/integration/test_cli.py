"""
shiftlab 命令行集成测试

通过 click 的 CliRunner 调用各子命令，读取写出的文件验证结果。
"""

import json
import sys
from pathlib import Path

import pandas as pd
import pytest

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from core.report_collector import strip_metadata
from scripts.shiftlab import cli


def _invoke(runner, *args):
    return runner.invoke(cli, [str(a) for a in args])


def _read(path):
    return json.loads(path.read_text(encoding="utf-8"))


@pytest.mark.integration
class TestConstruct:
    """测试 construct 子命令"""

    def test_m1(self, runner, workdir):
        """M(4,1) 写出 .edges 与 .json"""
        result = _invoke(runner, "construct", "--family", "m1", "--n", 4, "--output", "out")
        assert result.exit_code == 0, result.output
        assert (workdir / "out" / "m1_n4.edges").read_text(encoding="utf-8") == "n=4 k=2\n1 3\n1 4\n2 3\n2 4\n"
        assert _read(workdir / "out" / "m1_n4.json")["kind"] == "graph-instance"

    def test_mnd(self, runner, workdir):
        """M(8,2) 的边数等于期望值"""
        result = _invoke(runner, "construct", "--family", "mnd", "--n", 8, "--d", 2, "--epsilon", "0.5",
                         "--seed", 7, "--output", "out")
        assert result.exit_code == 0, result.output
        document = _read(workdir / "out" / "mnd_n8_d2_seed7.json")
        assert document["edge_count"] == document["expected_edge_count"] == 16
        assert document["params"]["epsilon"] == "1/2"

    def test_mnd_is_reproducible(self, runner, workdir):
        """两次构造除 metadata 外完全一致"""
        for target in ("a", "b"):
            _invoke(runner, "construct", "--family", "mnd", "--n", 16, "--d", 2, "--seed", 3, "--output", target)
        first = _read(workdir / "a" / "mnd_n16_d2_seed3.json")
        second = _read(workdir / "b" / "mnd_n16_d2_seed3.json")
        assert strip_metadata(first) == strip_metadata(second)

    def test_seed_from_environment(self, runner, workdir, monkeypatch):
        """未给 --seed 时读取 SHIFTLAB_SEED"""
        monkeypatch.setenv("SHIFTLAB_SEED", "5")
        result = _invoke(runner, "construct", "--family", "random", "--n", 6, "--output", "out")
        assert result.exit_code == 0, result.output
        assert (workdir / "out" / "random_n6_seed5.json").is_file()

    def test_tree(self, runner, workdir):
        result = _invoke(runner, "construct", "--family", "tree", "--levels", 3, "--output", "out")
        assert result.exit_code == 0, result.output
        assert _read(workdir / "out" / "tree_J3.json")["level_sizes"] == [1, 1, 2, 72]

    def test_full(self, runner, workdir):
        result = _invoke(runner, "construct", "--family", "full", "--n", 6, "--k", 3, "--output", "out")
        assert result.exit_code == 0, result.output
        assert _read(workdir / "out" / "full_n6_k3.json")["edge_count"] == 20

    def test_invalid_parameters_exit_2(self, runner, workdir):
        """2^d 不整除 n 时退出码为 2"""
        result = _invoke(runner, "construct", "--family", "mnd", "--n", 10, "--d", 2, "--output", "out")
        assert result.exit_code == 2
        assert "error" in result.output

    def test_odd_m1_exit_2(self, runner, workdir):
        result = _invoke(runner, "construct", "--family", "m1", "--n", 5, "--output", "out")
        assert result.exit_code == 2


@pytest.mark.integration
class TestAlpha:
    """测试 alpha 子命令"""

    def test_m1(self, runner, workdir):
        _invoke(runner, "construct", "--family", "m1", "--n", 4, "--output", "out")
        result = _invoke(runner, "alpha", "--input", "out/m1_n4", "--output", "alpha.json")
        assert result.exit_code == 0, result.output
        report = _read(workdir / "alpha.json")
        assert report["kind"] == "alpha-report"
        assert report["results"][0]["value"] == 4
        assert report["results"][0]["ratio"]["exact"] == "1"
        assert report["verdicts"] == {"witness_independent": True, "quarter_floor": True}

    def test_edge_list_input(self, runner, workdir):
        """直接读取边表文本"""
        (workdir / "path.edges").write_text("n=4 k=2\n1 2\n2 3\n3 4\n", encoding="utf-8")
        result = _invoke(runner, "alpha", "--input", "path.edges", "--method", "brute", "--output", "alpha.json")
        assert result.exit_code == 0, result.output
        assert _read(workdir / "alpha.json")["results"][0]["value"] == 2

    def test_derandomized(self, runner, workdir):
        _invoke(runner, "construct", "--family", "random", "--n", 10, "--seed", 2, "--output", "out")
        result = _invoke(runner, "alpha", "--input", "out/random_n10_seed2", "--method", "derandomized",
                         "--output", "alpha.json")
        assert result.exit_code == 0, result.output
        payload = _read(workdir / "alpha.json")["results"][0]
        assert payload["value"] >= payload["quarter_floor"]

    def test_triples(self, runner, workdir):
        """k = 3 的实例附带参照界"""
        _invoke(runner, "construct", "--family", "full", "--n", 6, "--k", 3, "--output", "out")
        result = _invoke(runner, "alpha", "--input", "out/full_n6_k3", "--output", "alpha.json")
        assert result.exit_code == 0, result.output
        payload = _read(workdir / "alpha.json")["results"][0]
        assert payload["k"] == 3
        assert payload["reference_bounds"]["ehs"] == "1/3"

    def test_missing_input_exit_2(self, runner, workdir):
        result = _invoke(runner, "alpha", "--input", "does/not/exist")
        assert result.exit_code == 2
        assert "error" in result.output

    def test_malformed_edge_list_exit_2(self, runner, workdir):
        (workdir / "bad.edges").write_text("n=4 k=2\n2 1\n", encoding="utf-8")
        result = _invoke(runner, "alpha", "--input", "bad.edges")
        assert result.exit_code == 2


@pytest.mark.integration
class TestVerify:
    """测试 verify 子命令"""

    def test_mnd_instance(self, runner, workdir):
        """M(8,2) 的 7 项检查全部通过"""
        _invoke(runner, "construct", "--family", "mnd", "--n", 8, "--d", 2, "--seed", 7, "--output", "out")
        result = _invoke(runner, "verify", "--instance", "out/mnd_n8_d2_seed7", "--trials", 20000,
                         "--output", "verify.json")
        assert result.exit_code == 0, result.output
        report = _read(workdir / "verify.json")
        statuses = {check["check_id"]: check["status"] for check in report["checks"]}
        assert set(statuses) == {"edge_count", "halves_identical", "block_certificates", "recurrence",
                                 "claim_bound", "alpha_ratio", "tail_bound"}
        assert all(status == "passed" for status in statuses.values())
        assert report["seeds"]["instance_seed"] == 7

    def test_corrupted_instance_fails(self, runner, workdir):
        """删掉一条边后 edge_count 检查失败，退出码为 1"""
        _invoke(runner, "construct", "--family", "mnd", "--n", 8, "--d", 2, "--seed", 7, "--output", "out")
        path = workdir / "out" / "mnd_n8_d2_seed7.json"
        document = _read(path)
        document["edges"] = document["edges"][1:]
        path.write_text(json.dumps(document), encoding="utf-8")
        result = _invoke(runner, "verify", "--instance", str(path), "--beta", "4", "--trials", 2000,
                         "--output", "verify.json")
        assert result.exit_code == 1
        report = _read(workdir / "verify.json")
        assert report["verdicts"]["edge_count"] is False

    def test_tree_level(self, runner, workdir):
        """只检查第 2 层的两条边"""
        _invoke(runner, "construct", "--family", "tree", "--levels", 3, "--output", "out")
        result = _invoke(runner, "verify", "--instance", "out/tree_J3", "--level", 2, "--output", "verify.json")
        assert result.exit_code == 0, result.output
        report = _read(workdir / "verify.json")
        window = next(c for c in report["checks"] if c["check_id"] == "window_bound")
        assert [entry["edge"] for entry in window["details"]["edges"]] == [[2, 3], [2, 4]]
        assert [entry["independent_count"] for entry in window["details"]["edges"]] == [2, 13]

    def test_graph_instance(self, runner, workdir):
        _invoke(runner, "construct", "--family", "random", "--n", 12, "--seed", 4, "--output", "out")
        result = _invoke(runner, "verify", "--instance", "out/random_n12_seed4", "--output", "verify.json")
        assert result.exit_code == 0, result.output
        assert _read(workdir / "verify.json")["verdicts"]["derandomized_quarter"] is True

    def test_repeated_runs_match(self, runner, workdir):
        """重复运行报告一致"""
        _invoke(runner, "construct", "--family", "mnd", "--n", 8, "--d", 2, "--seed", 7, "--output", "out")
        reports = []
        for _ in range(2):
            _invoke(runner, "verify", "--instance", "out/mnd_n8_d2_seed7", "--beta", "2,4", "--trials", 2000,
                     "--output", "verify.json")
            reports.append(strip_metadata(_read(workdir / "verify.json")))
        assert reports[0] == reports[1]

    def test_report_to_stdout(self, runner, workdir):
        _invoke(runner, "construct", "--family", "full", "--n", 6, "--k", 4, "--output", "out")
        result = _invoke(runner, "verify", "--instance", "out/full_n6_k4")
        assert result.exit_code == 0
        assert '"k4_scheme": true' in result.output


@pytest.mark.integration
class TestExperiment:
    """测试 experiment 子命令"""

    def test_quarter_csv(self, runner, workdir):
        """CSV 每个 (n, seed) 一行，换行符为 LF"""
        result = _invoke(runner, "experiment", "--kind", "quarter", "--n-values", "8,10", "--seeds", "1,2",
                         "--trials", 2000, "--format", "csv", "--output", "out/quarter.csv")
        assert result.exit_code == 0, result.output
        frame = pd.read_csv(workdir / "out" / "quarter.csv")
        assert len(frame) == 4
        assert list(frame["n"]) == [8, 8, 10, 10]
        assert (workdir / "out" / "quarter.json").is_file()
        assert b"\r\n" not in (workdir / "out" / "quarter.csv").read_bytes()

    def test_mnd_rows(self, runner, workdir):
        result = _invoke(runner, "experiment", "--kind", "mnd", "--n-values", "8", "--d-values", "1,2",
                         "--seed", 7, "--output", "out/mnd.csv")
        assert result.exit_code == 0, result.output
        report = _read(workdir / "out" / "mnd.json")
        assert [(row["n"], row["d"]) for row in report["results"]] == [(8, 1), (8, 2)]
        assert report["results"][0]["ratio"] == "1"

    def test_deterministic(self, runner, workdir):
        for name in ("first", "second"):
            _invoke(runner, "experiment", "--kind", "k3", "--kind", "quarter", "--n-values", "6,8",
                    "--seed", 3, "--trials", 1000, "--output", f"{name}/run.csv")
        first = _read(workdir / "first" / "run.json")
        second = _read(workdir / "second" / "run.json")
        assert first["results"] == second["results"]
        assert first["verdicts"] == second["verdicts"]

    def test_unknown_kind(self, runner, workdir):
        """未知的实验类型退出码为 2"""
        result = _invoke(runner, "experiment", "--kind", "k5")
        assert result.exit_code == 2


@pytest.mark.integration
class TestHelp:
    """--help 中列出各选项的默认值"""

    @staticmethod
    def _help_text(runner, command):
        result = runner.invoke(cli, [command, "--help"])
        assert result.exit_code == 0, result.output
        return " ".join(result.output.split())

    def test_construct_defaults(self, runner):
        text = self._help_text(runner, "construct")
        for expected in ("默认 mnd", "默认 1/2", "默认 32", "默认 2000", "默认 0.5", "默认 SHIFTLAB_SEED"):
            assert expected in text

    def test_verify_defaults(self, runner):
        text = self._help_text(runner, "verify")
        assert "默认 100000" in text
        assert "1000000" in text

    def test_experiment_defaults(self, runner):
        text = self._help_text(runner, "experiment")
        assert "默认 8,16,32" in text
        assert "默认 json" in text
