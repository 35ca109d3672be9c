"""
数值计算相关的错误类型
Author: ICO
Date: 2024-03-02"""


class ToolKitError(Exception):
    """工具包内所有自定义错误的基类"""


# end class
class ShapeError(ToolKitError, ValueError):
    """张量形状不匹配"""

    def __init__(self, message: str, *shapes: tuple[int, ...]):
        if shapes:
            message = f"{message}: " + " vs ".join(str(tuple(s)) for s in shapes)
        super().__init__(message)
        self.shapes = shapes

    # end def


# end class
class CalculationError(ToolKitError, ArithmeticError):
    """除零、非有限中间值、非有限梯度等数值错误"""


# end class
class GraphError(ToolKitError, RuntimeError):
    """反向传播的计算图不可用 (损失非标量，或计算图已断开)"""


# end class
class LowVariabilityError(ToolKitError):
    """季节性朴素预测的样本内 MAE 为 0，用于把序列分流到低波动集合，不是崩溃"""

    def __init__(self, message: str = "in-sample seasonal naive MAE is zero"):
        super().__init__(message)

    # end def


# end class
class NumericalFailure(ToolKitError):
    """训练过程中出现 NaN 损失

    `last_checkpoint` 为最后一次正常保存的检查点路径 (可能为 None)
    """

    def __init__(self, message: str, last_checkpoint=None, step: int | None = None):
        super().__init__(message)
        self.last_checkpoint = last_checkpoint
        self.step = step

    # end def


# end class
