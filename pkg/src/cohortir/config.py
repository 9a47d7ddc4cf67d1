"""Pipeline configuration: defaults, key=value config files, flag overrides.

Precedence: built-in defaults < config file < command-line flags.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError


@dataclass
class PipelineConfig:
    n_candidates: int = 2000
    m_visits: int = 1000
    k1: float = 0.9
    b: float = 0.4
    df_threshold: int = 2500
    df_threshold_fraction: float | None = None
    negative_ratio: int = 10
    max_pairs_per_topic: int = 1650
    reference_positive_count: int = 150
    split_fraction: float = 0.8
    seed: int = 0
    scorer: str = "baseline"
    scorer_url: str = ""
    scorer_cmd: str = ""
    batch_size: int = 32
    max_retries: int = 3
    backoff_seconds: float = 0.5
    timeout_seconds: float = 30.0
    run_tag: str = "cohortir"
    # scorer-service hyperparameters, passed through to a remote trainer
    max_query_tokens: int = 64
    max_sequence_tokens: int = 384
    learning_rate: float = 3e-5
    epochs: int = 2

    def validate(self) -> None:
        checks: list[tuple[str, bool]] = [
            ("n_candidates", self.n_candidates >= 1),
            ("m_visits", self.m_visits >= 1),
            ("k1", self.k1 >= 0),
            ("b", 0.0 <= self.b <= 1.0),
            ("df_threshold", self.df_threshold >= 0),
            (
                "df_threshold_fraction",
                self.df_threshold_fraction is None
                or 0.0 <= self.df_threshold_fraction <= 1.0,
            ),
            ("negative_ratio", self.negative_ratio >= 1),
            ("max_pairs_per_topic", self.max_pairs_per_topic >= 1),
            ("reference_positive_count", self.reference_positive_count >= 1),
            ("split_fraction", 0.0 < self.split_fraction < 1.0),
            ("scorer", self.scorer in ("baseline", "oracle", "http", "subprocess")),
            ("batch_size", self.batch_size >= 1),
            ("max_retries", self.max_retries >= 1),
            ("backoff_seconds", self.backoff_seconds >= 0),
            ("timeout_seconds", self.timeout_seconds > 0),
            ("max_query_tokens", self.max_query_tokens >= 1),
            (
                "max_sequence_tokens",
                self.max_sequence_tokens > self.max_query_tokens,
            ),
            ("learning_rate", self.learning_rate > 0),
            ("epochs", self.epochs >= 1),
        ]
        for name, ok in checks:
            if not ok:
                raise ConfigError(
                    f"config field {name!r} has invalid value "
                    f"{getattr(self, name)!r}"
                )


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Flat UTF-8 key=value lines; blank lines and # comments ignored."""
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config line {n}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _coerce(name: str, text: str):
    kind = _FIELD_TYPES[name]
    try:
        if kind == "int":
            return int(text)
        if kind == "float" or kind == "float | None":
            return float(text)
        return text
    except ValueError as exc:
        raise ConfigError(f"config field {name!r}: cannot parse {text!r}") from exc


def build_config(
    file_values: dict[str, str] | None = None, overrides: dict | None = None
) -> PipelineConfig:
    """Merge sources into a validated PipelineConfig.

    ``file_values`` are raw strings from a config file; ``overrides`` are
    already-typed flag values (None entries mean "not set").
    """
    config = PipelineConfig()
    for key, text in (file_values or {}).items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        setattr(config, key, _coerce(key, text))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        setattr(config, key, value)
    config.validate()
    return config
