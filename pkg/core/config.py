"""
实验配置

优先级：命令行参数 > --config 指定的 JSON 文件 > 环境变量 SHIFTLAB_SEED
（存在 .env 时经 python-dotenv 载入）> 内置默认值。config/shiftlab.json 与
内置默认值一致，可作为模板复制后修改。
"""

import json
import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional

from dotenv import find_dotenv, load_dotenv
from pydantic import BaseModel, Field, field_validator

from core.models import Rational

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240101
SEED_ENV_VAR = "SHIFTLAB_SEED"
DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / "config" / "shiftlab.json"

Family = Literal["m1", "mnd", "tree", "random", "full"]
ExperimentKind = Literal["mnd", "k4", "p3", "quarter", "k3"]


class ExperimentConfig(BaseModel):
    """
    CLI 全部子命令共用的配置

    每份报告都回显生效后的配置（model_dump(mode="json")）。
    """

    family: Family = Field(default="mnd", description="construct 的实例族")
    n: int = Field(default=8, ge=1, description="顶点数")
    d: int = Field(default=2, ge=1, description="M(n,d) 的深度")
    k: int = Field(default=2, ge=1, description="元组长度（full 族）")
    epsilon: Rational = Field(default=Fraction(1, 2), description="差异预算 ε")
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64, description="根种子")
    beta: List[int] = Field(default_factory=list, description="verify 检查的蓝色数；空表示自动选取")
    levels: int = Field(default=3, ge=1, description="树的层数 J")
    root_children: int = Field(default=1, ge=1)
    slack: int = Field(default=0, ge=0)
    trials: int = Field(default=100_000, ge=1, description="Monte Carlo 次数")
    budget: Optional[int] = Field(default=None, ge=1, description="搜索节点预算")
    mode: Optional[Literal["exhaustive", "intervals", "sampled"]] = Field(default=None, description="强制认证模式")
    resample_limit: int = Field(default=32, ge=0)
    sample_count: int = Field(default=2000, ge=1)
    edge_count: Optional[int] = Field(default=None, ge=0, description="random 族的边数")
    edge_probability: float = Field(default=0.5, ge=0, le=1, description="random 族的边概率")
    method: Literal["auto", "brute", "derandomized"] = Field(default="auto", description="alpha 的求解方式")
    level: Optional[int] = Field(default=None, ge=1, description="verify 树窗口只检查该层")
    kinds: List[ExperimentKind] = Field(default_factory=lambda: ["mnd"])
    n_values: List[int] = Field(default_factory=lambda: [8, 16, 32])
    d_values: List[int] = Field(default_factory=lambda: [1, 2])
    seeds: List[int] = Field(default_factory=list, description="experiment 的种子；空表示只用 seed")
    input: Optional[str] = None
    output: Optional[str] = None
    format: Literal["json", "csv"] = "json"

    class Config:
        arbitrary_types_allowed = True
        json_schema_extra = {
            "example": {"family": "mnd", "n": 8, "d": 2, "epsilon": "1/2", "seed": 7}
        }

    @field_validator("epsilon")
    @classmethod
    def _epsilon_positive(cls, value: Fraction) -> Fraction:
        if value <= 0:
            raise ValueError("epsilon must be positive")
        return value

    def sweep_seeds(self) -> List[int]:
        return sorted(set(self.seeds)) if self.seeds else [self.seed]


def _env_overrides(env: Optional[Mapping[str, str]]) -> Dict[str, Any]:
    if env is None:
        load_dotenv(find_dotenv(usecwd=True))
        env = os.environ
    raw = env.get(SEED_ENV_VAR)
    if raw is None or raw == "":
        return {}
    logger.debug(f"seed taken from {SEED_ENV_VAR}={raw}")
    return {"seed": int(raw)}


def _load_file(config_path: Path) -> Dict[str, Any]:
    """读取 JSON 配置文件

    Raises:
        FileNotFoundError: 文件不存在
        json.JSONDecodeError: 格式错误
    """
    with open(config_path, "r", encoding="utf-8") as f:
        data = json.load(f)
    logger.debug(f"loaded config file {config_path}: {sorted(data)}")
    return data


def load_config(
    config_path: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
    env: Optional[Mapping[str, str]] = None,
) -> ExperimentConfig:
    """按优先级合并配置

    Args:
        config_path: --config 指定的 JSON 文件
        overrides: 显式给出的命令行参数（值为 None 的项视为未给出）
        env: 环境变量映射，默认读取 os.environ（先加载 .env）

    Returns:
        ExperimentConfig
    """
    merged: Dict[str, Any] = {}
    merged.update(_env_overrides(env))
    if config_path:
        merged.update(_load_file(Path(config_path)))
    merged.update({key: value for key, value in (overrides or {}).items() if value is not None})
    config = ExperimentConfig.model_validate(merged)
    logger.info(f"effective config: seed={config.seed} family={config.family} n={config.n} d={config.d}")
    return config
