"""
常用数组的类型提示
Author: ICO
Date: 2024-03-02
"""

from typing import Annotated, Literal

import numpy as np
from numpy.typing import NDArray

Array2D = Annotated[NDArray[np.float64], Literal["M", "L"]]
"""
二维数组
M 个变量 × L 个时间步，行优先
"""
Array3D = Annotated[NDArray[np.float64], Literal["B", "M", "L"]]
"""
三维数组
B 个批次 × M 个变量 × L 个时间步
"""
BoolMask = Annotated[NDArray[np.bool_], Literal["M", "M"]]
"""
布尔掩码
注意力掩码，True 表示可以关注
"""
WeightMask = Annotated[NDArray[np.float64], Literal["M", "L"]]
"""
填充权重
取值只能为 0 或 1，0 表示填充位置
"""
