"""
核心数据模型单元测试

测试 core/models.py 中定义的所有数据模型
"""

from fractions import Fraction

import pytest
from pydantic import ValidationError

from core.models import (
    BlockParams,
    BlockRecord,
    DiscrepancyCertificate,
    ExperimentReport,
    ReportMetadata,
    TailBoundInput,
    ratio_fields,
    to_fraction,
)


@pytest.mark.unit
class TestRational:
    """测试有理数转换"""

    @pytest.mark.parametrize("raw, expected", [
        (0.1, Fraction(1, 10)),
        ("1/3", Fraction(1, 3)),
        (" 2/4 ", Fraction(1, 2)),
        (3, Fraction(3)),
        (Fraction(5, 7), Fraction(5, 7)),
    ])
    def test_to_fraction(self, raw, expected):
        """整数、字符串 p/q 与小数都转成 Fraction"""
        assert to_fraction(raw) == expected

    @pytest.mark.parametrize("raw", [True, None, [1]])
    def test_rejects_non_numbers(self, raw):
        with pytest.raises(ValueError):
            to_fraction(raw)

    def test_ratio_fields(self):
        """比值字段含分子、分母与浮点值"""
        assert ratio_fields(2, 6) == {"numerator": 2, "denominator": 6, "exact": "1/3", "float": 1 / 3}
        assert ratio_fields(0, 0)["exact"] is None


@pytest.mark.unit
class TestBlockParams:
    """测试块参数"""

    def test_create_valid_params(self):
        """创建合法的块参数"""
        params = BlockParams(n=16, d=2, epsilon="1/2", seed=7)

        assert params.half == 8
        assert params.edge_budget == 32
        assert params.discrepancy_budget == 8
        assert params.model_dump(mode="json")["epsilon"] == "1/2"

    def test_float_epsilon(self):
        assert BlockParams(n=8, d=1, epsilon=0.25, seed=0).epsilon == Fraction(1, 4)

    @pytest.mark.parametrize("epsilon", ["0", "1", "3/2", "-1/4"])
    def test_epsilon_range(self, epsilon):
        """ε 必须在 (0, 1) 内"""
        with pytest.raises(ValidationError):
            BlockParams(n=8, d=1, epsilon=epsilon, seed=0)

    def test_seed_is_64_bit(self):
        BlockParams(n=8, d=1, epsilon="1/2", seed=2**64 - 1)
        with pytest.raises(ValidationError):
            BlockParams(n=8, d=1, epsilon="1/2", seed=2**64)

    def test_divisibility(self):
        """2^d 必须整除 n"""
        with pytest.raises(ValidationError):
            BlockParams(n=12, d=3, epsilon="1/2", seed=0)


def _certificate(**overrides):
    fields = dict(mode="intervals", n=8, d=2, worst_deviation="1", budget="2", epsilon_hat="1/4",
                  pairs_checked=100, passed=True)
    fields.update(overrides)
    return DiscrepancyCertificate(**fields)


@pytest.mark.unit
class TestDiscrepancyCertificate:

    def test_valid_certificate(self):
        certificate = _certificate()
        assert certificate.worst_deviation == 1
        assert certificate.model_dump(mode="json")["epsilon_hat"] == "1/4"

    def test_verdict_must_match(self):
        """passed 与偏差、预算不一致时校验失败"""
        with pytest.raises(ValidationError):
            _certificate(passed=False)

    def test_exhaustive_pair_count(self):
        _certificate(mode="exhaustive", pairs_checked=225)
        with pytest.raises(ValidationError):
            _certificate(mode="exhaustive", pairs_checked=224)

    def test_block_record_roundtrip(self):
        """块记录经 JSON 往返不变"""
        record = BlockRecord(level=0, n=8, d=2, seed=3, attempts=1, copies=1, certificate=_certificate())
        assert BlockRecord.model_validate(record.model_dump(mode="json")) == record


@pytest.mark.unit
class TestTailBoundInput:

    def test_mu(self):
        """μ = mk/N"""
        assert TailBoundInput(N=100, m=50, k=10, t=5).mu == 5

    def test_negative_t(self):
        """t 为负时校验失败"""
        with pytest.raises(ValidationError):
            TailBoundInput(N=100, m=50, k=10, t="-1")


@pytest.mark.unit
class TestExperimentReport:
    """测试报告模型"""

    def test_defaults(self):
        report = ExperimentReport(kind="verification-report")
        assert report.schema_version == "1.0"
        assert report.metadata.generator == "shiftlab"
        assert report.verdicts == {}

    def test_invalid_kind(self):
        with pytest.raises(ValidationError):
            ExperimentReport(kind="summary")

    def test_metadata_serializes(self):
        """metadata 含计时与生成时间"""
        payload = ExperimentReport(kind="alpha-report", metadata=ReportMetadata(timing={"a": 0.5})).model_dump(
            mode="json")
        assert payload["metadata"]["timing"] == {"a": 0.5}
        assert isinstance(payload["metadata"]["generated_at"], str)
