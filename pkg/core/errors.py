"""
异常定义

库内所有可预期的失败都从 ShiftLabError 派生，CLI 据此映射退出码。
"""


class ShiftLabError(Exception):
    """所有 shiftlab 异常的基类"""


class InvalidInputError(ShiftLabError, ValueError):
    """输入不满足操作的前置条件（元组不递增、n 为奇数、边不在 G 中等）"""


class ResourceLimitError(ShiftLabError, RuntimeError):
    """实例规模超过守卫上限（穷举、BFS、树规模）"""


class InvariantViolation(ShiftLabError, AssertionError):
    """定理级不等式在具体实例上不成立"""
