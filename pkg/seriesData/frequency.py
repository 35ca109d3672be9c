"""
频率代码解析，例如 `H`、`5T`、`15S`
Author: ICO
Date: 2024-03-18"""

import re
from dataclasses import dataclass

from defaultCONFIG import Frequency, HyperParameterCONFIG, Term
from error import DataFormatError

_CODE_PATTERN = re.compile(r"^\s*(\d*)\s*([A-Za-z])\s*$")


@dataclass(frozen=True)
class FrequencySpec:
    base: Frequency
    multiplier: int = 1

    @property
    def code(self) -> str:
        return self.base.value if self.multiplier == 1 else f"{self.multiplier}{self.base.value}"

    @property
    def step_seconds(self) -> int:
        return self.multiplier * HyperParameterCONFIG.FREQUENCY_SECONDS[self.base]

    @property
    def season_length(self) -> int:
        """季节周期 m，只由基本频率决定"""
        return HyperParameterCONFIG.SEASONALITY[self.base]

    def horizon(self, term: Term) -> int:
        return HyperParameterCONFIG.SHORT_HORIZON[self.base] * HyperParameterCONFIG.TERM_FACTORS[term]

    # end def


# end class
def parse_frequency(code: str) -> FrequencySpec:
    """解析频率代码

    Parameters
    ----------
    `code` : str
        可选的整数倍数 + 一个基本频率字母 (S, T, H, D, W, M)

    Returns
    -------
    FrequencySpec

    Raises
    ------
    DataFormatError
        无法识别的代码
    """
    match_ = _CODE_PATTERN.match(str(code))
    if match_ is None:
        raise DataFormatError(f"cannot parse frequency '{code}'", field="freq")
    multiplier = int(match_.group(1)) if match_.group(1) else 1
    try:
        base = Frequency(match_.group(2).upper())
    except ValueError:
        raise DataFormatError(f"unknown frequency '{code}'", field="freq") from None
    if multiplier < 1:
        raise DataFormatError(f"frequency multiplier must be >= 1 in '{code}'", field="freq")
    return FrequencySpec(base, multiplier)


# end def
