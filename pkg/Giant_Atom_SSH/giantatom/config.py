"""
Run configuration and environment settings.

A run is a single JSON document validated by :class:`RunConfig`. Environment
variables (optionally from a .env file) supply worker count, log level and the
eigensolver dimension cap.
"""
import json
import logging
import os
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from giantatom.errors import ConfigError
from giantatom.model import Boundary, CouplingConfig, LatticeParams, Variant

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

THREADS_ENV = 'GIANTATOM_SSH_THREADS'
LOG_LEVEL_ENV = 'GIANTATOM_SSH_LOG_LEVEL'
MAX_DIM_ENV = 'GIANTATOM_SSH_MAX_DIM'
DEFAULT_MAX_DIM = 4096


class Task(str, Enum):
    SPECTRUM = 'spectrum'
    BOUNDSTATES = 'boundstates'
    ZEROMODE = 'zeromode'
    IPR_HEATMAP = 'ipr-heatmap'
    IPR_VS_G = 'ipr-vs-g'
    BETA_PROFILE = 'beta-profile'
    WINDING = 'winding'
    LYAPUNOV = 'lyapunov'
    SWEEP = 'sweep'


class Grid(BaseModel):
    """Uniform grid of `points` values on [start, stop]."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    start: float
    stop: float
    points: int = Field(ge=1)

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


class TaskOptions(BaseModel):
    """Task-specific knobs. Every task reads only the fields it needs."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    margin: Optional[float] = None
    hull_samples: Optional[int] = None
    zero_tol: float = 1e-6
    t1_grid: Grid = Grid(start=-1.0, stop=1.0, points=21)
    gm_grid: Grid = Grid(start=0.0, stop=13.0, points=14)
    gn_grid: Grid = Grid(start=0.0, stop=13.0, points=14)
    g_values: List[float] = [0.25, 0.5, 1.0, 2.0, 4.0, 7.0, 13.0]
    winding_samples: int = 2048
    v_grid: Grid = Grid(start=-2.0, stop=2.0, points=81)
    t_obs: float = 50.0
    channel: str = 'A'
    stepper: str = 'auto'
    rtol: float = 1e-10
    atol: float = 1e-12
    model_tag: str = 'model1'

    @field_validator('channel')
    @classmethod
    def _check_channel(cls, value: str) -> str:
        if value not in ('A', 'B'):
            raise ValueError("channel must be 'A' or 'B'")
        return value

    @field_validator('stepper')
    @classmethod
    def _check_stepper(cls, value: str) -> str:
        if value not in ('auto', 'expm', 'rk'):
            raise ValueError("stepper must be 'auto', 'expm' or 'rk'")
        return value


class RunConfig(BaseModel):
    """Everything needed to reproduce one run."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    schema_version: int = SCHEMA_VERSION
    task: Task = Task.SPECTRUM
    variant: Variant = Variant.NONRECIPROCAL
    boundary: Boundary = Boundary.PBC
    lattice: LatticeParams = LatticeParams()
    coupling: CouplingConfig = CouplingConfig()
    options: TaskOptions = TaskOptions()
    output_dir: str = 'out'
    seed: int = 12345

    @field_validator('schema_version')
    @classmethod
    def _check_version(cls, value: int) -> int:
        if value != SCHEMA_VERSION:
            raise ValueError(f'unsupported schema version {value}, expected {SCHEMA_VERSION}')
        return value

    def canonical_json(self) -> str:
        """Key-sorted compact JSON, the input of the config checksum."""
        return json.dumps(self.model_dump(mode='json'), sort_keys=True, separators=(',', ':'))


def _raise_config_error(error: ValidationError):
    first = error.errors()[0]
    field = '.'.join(str(part) for part in first['loc'])
    raise ConfigError(first['msg'], field or None)


def parse_config(payload: str) -> RunConfig:
    """
    Validate a JSON document.

    :param payload: JSON text.
    :return: RunConfig.
    """
    try:
        return RunConfig.model_validate_json(payload)
    except ValidationError as e:
        _raise_config_error(e)


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as d:
            payload = d.read()
    except OSError as e:
        raise ConfigError(f'cannot read config file: {e}', 'config')
    return parse_config(payload)


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(config: RunConfig, overrides: Sequence[str]) -> RunConfig:
    """
    Apply dotted key=value overrides, e.g. ``lattice.t1=0.3``.

    :param config: Base config.
    :param overrides: Override strings.
    :return: A new validated RunConfig.
    """
    data = config.model_dump(mode='json')
    for item in overrides:
        if '=' not in item:
            raise ConfigError(f"override '{item}' is not key=value", 'set')
        key, raw = item.split('=', 1)
        parts = key.strip().split('.')
        target = data
        for part in parts[:-1]:
            if not isinstance(target.get(part), dict):
                raise ConfigError('unknown config section', key)
            target = target[part]
        if parts[-1] not in target:
            raise ConfigError('unknown config field', key)
        target[parts[-1]] = _parse_value(raw.strip())

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        _raise_config_error(e)


def with_updates(config: RunConfig, **sections: Dict[str, Any]) -> RunConfig:
    """Copy with nested sections partially replaced, e.g. lattice={'t1': 0.3}."""
    data = config.model_dump(mode='json')
    for section, values in sections.items():
        if isinstance(values, dict) and isinstance(data.get(section), dict):
            data[section].update(values)
        else:
            data[section] = values
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        _raise_config_error(e)


def _env_int(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f'{name} must be an integer, got {raw!r}', name)
    if value < 1:
        raise ConfigError(f'{name} must be positive', name)
    return value


def max_dimension() -> int:
    return _env_int(MAX_DIM_ENV, DEFAULT_MAX_DIM)


def resolve_threads(threads: Optional[int] = None) -> int:
    """Explicit value, then GIANTATOM_SSH_THREADS, then 1."""
    if threads is not None:
        if threads < 1:
            raise ConfigError('must be positive', 'threads')
        return threads
    return _env_int(THREADS_ENV, 1)


def resolve_log_level(level: Optional[str] = None) -> int:
    name = (level or os.getenv(LOG_LEVEL_ENV) or 'INFO').upper()
    value = logging.getLevelName(name)
    if not isinstance(value, int):
        raise ConfigError(f'unknown log level {name}', 'log-level')
    return value
