"""Zero-error block computation of sum-threshold and related functions
on two nodes, trees and general graphs."""

__version__ = "0.1.0"

from .errors import DomainError, FramingError, NetworkError, ProtocolError, ResourceError
from .funckernel import FunctionSpec, SeparationPartition, evaluate, separate

__all__ = [
    "DomainError",
    "FramingError",
    "FunctionSpec",
    "NetworkError",
    "ProtocolError",
    "ResourceError",
    "SeparationPartition",
    "evaluate",
    "separate",
]
