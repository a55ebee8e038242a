"""Circular convolution as an asymmetric LCU block over modular-adder SELECT circuits."""

from qconv.errors import (
    CapacityError,
    DataError,
    InvalidDimensionError,
    NotInvertibleError,
    PostselectionError,
    PromiseViolationError,
    ZeroVectorError,
)
from qconv.synthesis import PipelineMode, SelectVariant

__all__ = [
    "CapacityError",
    "DataError",
    "InvalidDimensionError",
    "NotInvertibleError",
    "PipelineMode",
    "PostselectionError",
    "PromiseViolationError",
    "SelectVariant",
    "ZeroVectorError",
]
