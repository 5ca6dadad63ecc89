"""Key=value configuration for the CLI and experiment harness."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError
from .evaluate import AblationMode, HarnessSettings

_MODES = tuple(m.value for m in AblationMode)


@dataclass(frozen=True)
class Config:
    window: int = 5
    n_split: int | str = 10
    target_pattern_count: int = 50
    max_depth: int = 6            # 0 disables the cap
    pairing_horizon: int | None = None
    mode: str = "seq_pattern"
    kb_aggregation: str = "min"
    noisy_episode_ratio: float = 0.1
    missing_probability: float = 0.1
    false_probability: float = 0.1
    seed: int = 0
    jobs: int = 1
    kb_per_fold: bool = False

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ConfigError(f"window must be >= 1, got {self.window}")
        if not (self.n_split == "auto"
                or (isinstance(self.n_split, int) and self.n_split >= 1)):
            raise ConfigError(
                f"n_split must be a count >= 1 or 'auto', got {self.n_split!r}")
        if self.target_pattern_count < 1:
            raise ConfigError("target_pattern_count must be >= 1, got "
                              f"{self.target_pattern_count}")
        if self.max_depth < 0:
            raise ConfigError(f"max_depth must be >= 0, got {self.max_depth}")
        if self.pairing_horizon is not None and self.pairing_horizon < 0:
            raise ConfigError("pairing_horizon must be >= 0 or unset, got "
                              f"{self.pairing_horizon}")
        if self.mode not in _MODES:
            raise ConfigError(f"mode must be one of {', '.join(_MODES)}, "
                              f"got {self.mode!r}")
        if self.kb_aggregation not in ("min", "max"):
            raise ConfigError("kb_aggregation must be 'min' or 'max', got "
                              f"{self.kb_aggregation!r}")
        for name in ("noisy_episode_ratio", "missing_probability",
                     "false_probability"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {v}")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")

    def harness_settings(self) -> HarnessSettings:
        return HarnessSettings(
            mode=AblationMode(self.mode),
            target_pattern_count=self.target_pattern_count,
            max_depth=self.max_depth or None,
            n_split=self.n_split,
            pairing_horizon=self.pairing_horizon,
            kb_aggregation=self.kb_aggregation,
            kb_per_fold=self.kb_per_fold,
        )


_FIELD_TYPES = {f.name: f.type for f in fields(Config)}


def _coerce(key: str, raw: str):
    value = raw.strip()
    if key in ("window", "target_pattern_count", "max_depth", "seed", "jobs"):
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"{key} expects an integer, got {value!r}") from None
    if key == "n_split":
        if value == "auto":
            return "auto"
        try:
            return int(value)
        except ValueError:
            raise ConfigError(
                f"n_split expects a count or 'auto', got {value!r}") from None
    if key == "pairing_horizon":
        if value.lower() in ("", "none", "unbounded"):
            return None
        try:
            return int(value)
        except ValueError:
            raise ConfigError(
                f"pairing_horizon expects a count or 'none', got {value!r}") from None
    if key in ("noisy_episode_ratio", "missing_probability",
               "false_probability"):
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"{key} expects a number, got {value!r}") from None
    if key == "kb_per_fold":
        low = value.lower()
        if low in ("true", "yes", "1"):
            return True
        if low in ("false", "no", "0"):
            return False
        raise ConfigError(f"kb_per_fold expects a boolean, got {value!r}")
    return value  # mode, kb_aggregation stay strings


def load_config(path) -> Config:
    """Parse a key=value file; '#' starts a comment, unknown keys rejected."""
    values = {}
    for lineno, line in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, "
                              f"got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = _coerce(key, raw)
    return Config(**values)


def with_overrides(config: Config, **overrides) -> Config:
    """Apply non-None overrides (command-line flags win over the file)."""
    active = {k: v for k, v in overrides.items() if v is not None}
    for key in active:
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config field {key!r}")
    return replace(config, **active)
