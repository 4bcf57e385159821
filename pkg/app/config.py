import os
import logging
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from app.errors import InputError

# --------------------------
# Logger Configuration
# --------------------------
LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s - %(message)s"
logger = logging.getLogger("canonconv.config")

# --------------------------
# Load environment variables
# --------------------------
dotenv_path = os.path.join(os.path.dirname(__file__), ".env")
load_dotenv(dotenv_path=dotenv_path)

DEFAULT_SEED = 20240611
DEFAULT_GADGET_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "assets", "gadgets")


class Settings(BaseModel):
    seed: int = Field(DEFAULT_SEED, ge=0, lt=2 ** 64)
    pack_tol: float = Field(1e-10, gt=0.0, lt=1e-3)
    max_denominator_bits: int = Field(48, ge=24, le=96)
    jobs: int = Field(1, ge=1)
    log_level: str = "INFO"
    gadget_dir: str = DEFAULT_GADGET_DIR


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Reads CANONCONV_* variables (after .env) into validated settings."""
    raw = {
        "seed": os.getenv("CANONCONV_SEED"),
        "pack_tol": os.getenv("CANONCONV_PACK_TOL"),
        "max_denominator_bits": os.getenv("CANONCONV_MAX_DENOMINATOR_BITS"),
        "jobs": os.getenv("CANONCONV_JOBS"),
        "log_level": os.getenv("CANONCONV_LOG_LEVEL"),
        "gadget_dir": os.getenv("CANONCONV_GADGET_DIR"),
    }
    try:
        settings = Settings(**{k: v for k, v in raw.items() if v is not None})
    except ValidationError as exc:
        raise InputError(f"Invalid CANONCONV_* environment setting: {exc}") from exc
    return settings


def setup_logging(level: Optional[str] = None) -> None:
    """Configures the root logger once; results go to stdout, logs to stderr."""
    level_name = (level or get_settings().log_level).upper()
    logging.basicConfig(level=getattr(logging, level_name, logging.INFO), format=LOG_FORMAT)
    logging.getLogger().setLevel(getattr(logging, level_name, logging.INFO))
    logger.debug(f"Logging configured at {level_name}")
