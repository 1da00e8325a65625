#!/usr/bin/env python3
"""
Configuration management for qmono

Run settings are resolved in this order:
1. Command-line flags (highest priority)
2. A JSON config file named with --config
3. Built-in defaults from constants.py

There is no environment-variable layer and no implicit home-directory
file, so that a command line fully determines a run.
"""

import json
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import constants
from common import QmonoError


class ConfigError(QmonoError):
    """Invalid run configuration"""


def _load_config(path: Optional[str]) -> dict:
    """Load a config file, returns empty dict when absent or empty"""
    if not path:
        return {}
    config_file = Path(path)
    if not config_file.exists():
        print(f"Warning: Config file {config_file} not found", file=sys.stderr)
        return {}
    try:
        with open(config_file, 'r') as f:
            content = f.read().strip()
            if content:
                data = json.loads(content)
                if isinstance(data, dict):
                    return data
                print(f"Error: Config file {config_file} must hold a JSON object", file=sys.stderr)
    except json.JSONDecodeError as e:
        print(f"Error: Config file {config_file} is not valid JSON: {e}", file=sys.stderr)
    except OSError as e:
        print(f"Warning: Unable to load config: {e}", file=sys.stderr)
    return {}


@dataclass
class RunConfig:
    """Settings of one qmono invocation"""
    subcommand: str
    inputs: List[str] = field(default_factory=list)
    seed: int = constants.DEFAULT_SEED
    max_depth: int = constants.DEFAULT_MAX_DEPTH
    tol: float = constants.DEFAULT_TOL
    out: Optional[str] = None
    csv: Optional[str] = None
    star: bool = False
    tree: Optional[str] = None
    radius: Optional[str] = None
    samples: Optional[int] = None
    covering_samples: int = constants.COVERING_SAMPLES
    equation: Optional[str] = None
    inequalities: List[str] = field(default_factory=list)
    split: int = 1
    rprime: Optional[str] = None
    vlab_command: Optional[str] = None
    n: int = 1
    p: int = 2
    k: int = 0
    grid: int = constants.DEFAULT_GRID
    degree: Optional[int] = None
    polys: List[str] = field(default_factory=list)
    workers: int = 1

    def validate(self) -> 'RunConfig':
        if not self.tol > 0:
            raise ConfigError(f"tolerance must be positive, got {self.tol}")
        if self.max_depth < 1:
            raise ConfigError(f"max depth must be at least 1, got {self.max_depth}")
        if not 0 <= self.seed < constants.SEED_LIMIT:
            raise ConfigError(f"seed must lie in [0, 2^64), got {self.seed}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        if (self.samples is not None and self.samples < 1) or self.covering_samples < 1:
            raise ConfigError("sample budgets must be positive")
        return self

    def echo(self) -> List[str]:
        """Deterministic `key=value` lines for report headers"""
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None or value == [] or f.name == 'workers':
                continue
            if isinstance(value, list):
                value = ','.join(str(v) for v in value)
            lines.append(f"{f.name}={value}")
        return lines


def build_config(subcommand: str, flags: Dict[str, Any], config_path: Optional[str] = None) -> RunConfig:
    """Merge defaults, the config file and command-line flags

    Args:
        subcommand: Subcommand name
        flags: Flag values; None means "not given on the command line"
        config_path: Optional JSON file with default values

    Returns:
        Validated RunConfig
    """
    known = {f.name for f in fields(RunConfig)}
    values: Dict[str, Any] = {}
    for key, value in _load_config(config_path).items():
        key = key.replace('-', '_')
        if key in known and key != 'subcommand':
            values[key] = value
        else:
            print(f"Warning: Unknown config key '{key}' ignored", file=sys.stderr)
    for key, value in flags.items():
        if key in known and value is not None:
            values[key] = value
    return RunConfig(subcommand=subcommand, **values).validate()
