from ._core import (
    CapExceeded,
    ContractViolation,
    DimensionError,
    Error,
    InvalidScheme,
    NumericalFailure,
    ParseError,
    canonicalize,
    game_value,
    nash_flow,
    optimal_flow,
    optimal_signaling,
    run,
    val,
)

__all__ = [
    "CapExceeded",
    "ContractViolation",
    "DimensionError",
    "Error",
    "InvalidScheme",
    "NumericalFailure",
    "ParseError",
    "canonicalize",
    "game_value",
    "nash_flow",
    "optimal_flow",
    "optimal_signaling",
    "run",
    "val",
]
