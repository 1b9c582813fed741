"""Resource caps.

Defaults can be overridden by a TOML file named in ``GROUPTENSOR_CONFIG`` and
then by CLI flags (see :func:`override`).
"""

from __future__ import annotations

import dataclasses
import os
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ParameterError

ENV_VAR = "GROUPTENSOR_CONFIG"


@dataclass(frozen=True)
class Config:
    max_group_order: int = 15000
    sl2_max_p: int = 23
    conjugacy_max_order: int = 10_000
    modrep_max_order: int = 1200
    exact_matching_max_order: int = 16
    radical_oracle_max_order: int = 64
    subspace_enum_max_ambient: int = 10_000
    slice_rank_max_ambient: int = 16
    tensor_max_order: int = 1200
    chop_retry_budget: int = 200
    clp_max_bits: int = 4096
    mul_table_max_order: int = 2500


_current: Config | None = None


def load(path: str | os.PathLike | None = None) -> Config:
    """Read a config file; unknown keys are rejected."""
    cfg = Config()
    if path is None:
        return cfg
    p = Path(path)
    try:
        raw = tomllib.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParameterError(f"cannot read config {p}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ParameterError(f"malformed config {p}: {exc}") from exc
    known = {f.name for f in dataclasses.fields(Config)}
    bad = set(raw) - known
    if bad:
        raise ParameterError(f"unknown config keys in {p}: {sorted(bad)}")
    for key, value in raw.items():
        if not isinstance(value, int) or value < 1:
            raise ParameterError(f"config key {key} must be a positive integer, got {value!r}")
    return dataclasses.replace(cfg, **raw)


def get() -> Config:
    global _current
    if _current is None:
        _current = load(os.environ.get(ENV_VAR))
    return _current


def set_config(cfg: Config | None) -> None:
    """Install ``cfg`` globally; ``None`` re-reads the environment on next use."""
    global _current
    _current = cfg


def override(**kwargs: int | None) -> Config:
    """Replace selected caps (``None`` values are ignored) and install the result."""
    updates = {k: v for k, v in kwargs.items() if v is not None}
    cfg = dataclasses.replace(get(), **updates)
    set_config(cfg)
    return cfg
