"""Slice rank, 3-matchings and modular representations of small finite groups."""

from .errors import (
    ConsistencyError,
    ContractError,
    GroupTensorError,
    InputError,
    IrreducibilityError,
    ParameterError,
    ResourceError,
    StructuralError,
)
from .groups import Group, make_group, parse_descriptor

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError",
    "ContractError",
    "Group",
    "GroupTensorError",
    "InputError",
    "IrreducibilityError",
    "ParameterError",
    "ResourceError",
    "StructuralError",
    "make_group",
    "parse_descriptor",
]
