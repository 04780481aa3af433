"""Configuration models."""

import logging
import os
from typing import Any, Dict, Mapping, Optional, Tuple

from dotenv import dotenv_values
from pydantic import BaseModel, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..core.exceptions import ConfigurationError
from .association import FocalLossConfig, TrackerConfig, TrainingSchedule
from .fusion import FusionConfig
from .segmentation import QConfig

logger = logging.getLogger(__name__)


class LoggingConfig(BaseModel):
    """Logging configuration."""
    level: str = Field(default="INFO")
    file: Optional[str] = Field(default=None)
    format: str = Field(default="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    max_bytes: int = Field(default=10485760)  # 10MB
    backup_count: int = Field(default=5)


class Settings(BaseSettings):
    """Process settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="KFMOT_", env_file=".env", env_file_encoding="utf-8", case_sensitive=False, extra="ignore"
    )

    threads: int = Field(default=1, ge=1, description="Parallel ablation cells")
    log_level: str = Field(default="INFO")
    log_file: Optional[str] = Field(default=None)
    config_file: Optional[str] = Field(default=None, description="Default key=value run-config file")


# flat config key -> (section, field)
RUN_CONFIG_KEYS: Dict[str, Tuple[str, str]] = {
    "epsilon": ("kfe", "epsilon"),
    "learn_rate": ("kfe", "learn_rate"),
    "discount": ("kfe", "discount"),
    "delta": ("kfe", "delta"),
    "xi": ("kfe", "xi"),
    "min_len": ("kfe", "min_len"),
    "max_len": ("kfe", "max_len"),
    "episodes": ("kfe", "episodes"),
    "episode_cap": ("kfe", "episode_cap"),
    "fusion_mode": ("fusion", "mode"),
    "fusion_a": ("fusion", "a"),
    "neighbors": ("fusion", "m"),
    "activation": ("fusion", "activation"),
    "fuse_every_level": ("tracker", "fuse_every_level"),
    "levels": ("tracker", "levels"),
    "iou_threshold": ("tracker", "iou_threshold"),
    "merge_threshold": ("tracker", "merge_threshold"),
    "max_candidates": ("tracker", "max_candidates"),
    "base_window": ("tracker", "base_window"),
    "gamma": ("focal", "gamma"),
    "alpha_f": ("focal", "alpha_f"),
    "iterations": ("training", "iterations"),
    "learning_rate": ("training", "learning_rate"),
    "unfreeze_every": ("training", "unfreeze_every"),
    "seed": ("", "seed"),
}

_SECTIONS = {
    "kfe": QConfig,
    "fusion": FusionConfig,
    "focal": FocalLossConfig,
    "tracker": TrackerConfig,
    "training": TrainingSchedule,
}


class RunConfig(BaseModel):
    """Every module hyperparameter of one run."""

    kfe: QConfig = Field(default_factory=QConfig)
    fusion: FusionConfig = Field(default_factory=FusionConfig)
    focal: FocalLossConfig = Field(default_factory=FocalLossConfig)
    tracker: TrackerConfig = Field(default_factory=TrackerConfig)
    training: TrainingSchedule = Field(default_factory=TrainingSchedule)
    seed: int = Field(default=0)

    @classmethod
    def from_values(cls, values: Mapping[str, Any]) -> "RunConfig":
        """Build from flat keys; unknown keys and bad values raise ConfigurationError."""
        sections: Dict[str, Dict[str, Any]] = {name: {} for name in _SECTIONS}
        seed = 0
        for key, value in values.items():
            if key not in RUN_CONFIG_KEYS:
                raise ConfigurationError(f"Unknown configuration key: {key}", key=key)
            if value is None or value == "":
                continue
            section, field = RUN_CONFIG_KEYS[key]
            if not section:
                seed = _validate(key, lambda: int(value))
                continue
            sections[section][field] = value

        built = {}
        for name, model in _SECTIONS.items():
            fields = sections[name]
            if name in ("kfe", "training"):
                fields.setdefault("seed", seed)
            built[name] = _validate_section(name, model, fields)
        return cls(seed=seed, **built)

    @classmethod
    def from_sources(cls, config_file: Optional[str] = None,
                     overrides: Optional[Mapping[str, Any]] = None) -> "RunConfig":
        """Defaults, then the key=value file, then flag overrides (flags win)."""
        values: Dict[str, Any] = {}
        if config_file:
            if not os.path.isfile(config_file):
                raise ConfigurationError(f"Config file not found: {config_file}", key="config_file",
                                         details={"path": config_file})
            values.update({k.strip().lower(): v for k, v in dotenv_values(config_file).items()})
            logger.debug(f"Loaded {len(values)} keys from {config_file}")
        for key, value in (overrides or {}).items():
            if value is not None:
                values[key] = value
        return cls.from_values(values)


def _validate(key: str, build):
    try:
        return build()
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"Invalid value for {key}: {e}", key=key)


def _validate_section(name: str, model, fields: Dict[str, Any]):
    try:
        return model(**fields)
    except ValidationError as e:
        error = e.errors()[0]
        field = str(error["loc"][0]) if error["loc"] else ""
        key = next((k for k, (s, f) in RUN_CONFIG_KEYS.items() if s == name and f == field), field or name)
        raise ConfigurationError(f"Invalid value for {key}: {error['msg']}", key=key)


class Config(BaseModel):
    """Main configuration model."""

    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    settings: Settings = Field(default_factory=Settings)

    @classmethod
    def load(cls) -> "Config":
        """Load configuration from environment and defaults."""
        settings = Settings()

        return cls(
            logging=LoggingConfig(
                level=settings.log_level,
                file=settings.log_file
            ),
            settings=settings
        )
