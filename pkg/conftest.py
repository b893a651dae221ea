"""
Pytest 配置

提供 --quick 选项：跳过标记为 slow 的测试（10^5 次采样的 Monte Carlo 与密度检查）。
"""

import pytest


def pytest_addoption(parser):
    """添加自定义命令行选项"""
    parser.addoption(
        "--quick",
        action="store_true",
        default=False,
        help="跳过 slow 标记的测试"
    )


def pytest_collection_modifyitems(config, items):
    """--quick 时取消选择 slow 测试"""
    if not config.getoption("--quick"):
        return

    selected = []
    deselected = []
    for item in items:
        if item.get_closest_marker("slow"):
            deselected.append(item)
        else:
            selected.append(item)

    items[:] = selected
    if deselected:
        config.hook.pytest_deselected(items=deselected)
        print(f"\n⚡ quick 模式: 跳过 {len(deselected)} 个慢速测试")
