"""Run configuration: defaults, key=value config files, environment override.

Precedence: explicit CLI flags > HYPERDERIV_SEED environment variable >
config file > defaults.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Config:
    truncation_degree: int = 8
    dims: tuple = (2, 3, 4)
    trials: int = 20
    seed: int = 42
    tol_exact: float = 1e-10
    tol_fd: float = 1e-7
    quad_nodes: int = 32
    report_path: str = ""

    def validate(self) -> "Config":
        if self.truncation_degree < 1:
            raise ValueError("truncation_degree must be >= 1")
        if self.tol_exact <= 0 or self.tol_fd <= 0:
            raise ValueError("tolerances must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.quad_nodes < 1:
            raise ValueError("quad_nodes must be >= 1")
        if not self.dims or any(d < 2 for d in self.dims):
            raise ValueError("dims must all be >= 2")
        return self


_INT_KEYS = {"truncation_degree", "trials", "seed", "quad_nodes"}
_FLOAT_KEYS = {"tol_exact", "tol_fd"}


def _parse_value(key: str, raw: str):
    raw = raw.strip().strip('"')
    if key == "dims":
        parts = raw.strip("[]").replace(",", " ").split()
        return tuple(int(p) for p in parts)
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    return raw


def load_config_file(path: str) -> dict:
    """key=value lines; '#' starts a comment; dims is a comma list."""
    values = {}
    known = {f.name for f in fields(Config)}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, raw = line.split("=", 1)
            key = key.strip()
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _parse_value(key, raw)
    return values


def resolve_config(file_path: str = "", overrides: dict | None = None,
                   env: dict | None = None) -> Config:
    """Layer defaults, config file, HYPERDERIV_SEED and explicit overrides."""
    env = os.environ if env is None else env
    cfg = Config()
    if file_path:
        cfg = replace(cfg, **load_config_file(file_path))
    if "HYPERDERIV_SEED" in env:
        cfg = replace(cfg, seed=int(env["HYPERDERIV_SEED"]))
    if overrides:
        cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    return cfg.validate()
