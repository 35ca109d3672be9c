from .calculationError import (
    CalculationError,
    GraphError,
    LowVariabilityError,
    NumericalFailure,
    ShapeError,
    ToolKitError,
)
from .dataError import CheckpointError, ConfigError, DataFormatError
