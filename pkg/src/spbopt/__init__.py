"""Batch black-box optimization with learned search-space partitions."""

from .controller import PRESETS, ProtocolError, SPBOpt, SpboptConfig, load_config, preset
from .space import ParamSpec, SpaceDefinition, load_space, space_from_dict, unwarp, validate_space, warp

__all__ = [
    "PRESETS",
    "ParamSpec",
    "ProtocolError",
    "SPBOpt",
    "SpaceDefinition",
    "SpboptConfig",
    "load_config",
    "load_space",
    "preset",
    "space_from_dict",
    "unwarp",
    "validate_space",
    "warp",
]
