"""Application configuration"""
import logging
from typing import Literal, Optional

from dotenv import load_dotenv
from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import InvalidConfig

load_dotenv()


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="TDM_EMBED_", extra="ignore")

    # App
    APP_NAME: str = "tdm-embed"
    VERSION: str = "1.0.0"
    DEBUG: bool = False

    # Logging (TDM_EMBED_LOG)
    LOG: Literal["error", "info", "debug"] = "info"

    # Metric
    ALPHA: int = 2
    SYM: str = "mean"
    INGEST: str = "endpoint"

    # Optimizers
    DIMS: int = 2
    SEED: int = 0
    SEEDS: int = 25
    ITERS: int = 15
    CONVERGE_ITERS: int = 30
    MAX_ITER: int = 300
    TOL: float = 1e-7

    # Curvature-learning optimizer
    KAPPA_STEPS: int = 2000
    KAPPA_WARMUP: int = 15
    LR_X: float = 0.05
    LR_KAPPA: float = 0.01

    # Bench worker pool (0 = logical cores)
    JOBS: int = 0


def load_settings() -> Settings:
    """Settings from the environment; a bad value becomes InvalidConfig"""
    try:
        return Settings()
    except ValidationError as exc:
        first = exc.errors()[0]
        name = "_".join(str(p) for p in first.get("loc", ())).upper()
        raise InvalidConfig(f"TDM_EMBED_{name}: {first.get('msg', 'invalid value')}") from exc


try:
    settings = load_settings()
    settings_error: Optional[InvalidConfig] = None
except InvalidConfig as exc:
    # defaults until the entry point reports the error
    settings = Settings.model_construct()
    settings_error = exc


def check_settings() -> None:
    if settings_error is not None:
        raise settings_error


def configure_logging(level: str | None = None) -> None:
    """Route all package loggers to stderr at the configured level"""
    name = (level or settings.LOG).upper()
    logging.basicConfig(
        level=getattr(logging, name, logging.INFO),
        format="%(levelname)s %(name)s %(message)s",
        force=True,
    )
