"""
配置、数据文件、检查点相关的错误类型
Author: ICO
Date: 2024-03-02"""

from .calculationError import ToolKitError


class ConfigError(ToolKitError, ValueError):
    """配置项不合法，`field` 为出错的字段名"""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field

    # end def


# end class
class DataFormatError(ToolKitError, ValueError):
    """数据集记录格式错误，`line` 为出错的行号 (从 1 开始)"""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        prefix = f"line {line}: " if line is not None else ""
        if field is not None:
            prefix += f"field '{field}': "
        super().__init__(prefix + message)
        self.line = line
        self.field = field

    # end def


# end class
class CheckpointError(ToolKitError, ValueError):
    """检查点清单与二进制数据不一致"""


# end class
