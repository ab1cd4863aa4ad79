"""
config.py — Runtime settings for the workbench.

Values come from the environment (a local .env file is honoured through
python-dotenv); command-line flags override them per invocation.
"""

import logging
import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel

load_dotenv()

LOG_FORMAT  = "%(asctime)s │ %(levelname)-8s │ %(message)s"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"


class Settings(BaseModel):
    log_level:     str = "WARNING"
    max_enum_size: int = 12
    corpus_size:   int = 8
    workers:       int = 4
    seed:          int = 20240501
    mutations:     int = 200


@lru_cache(maxsize=1)
def load_settings() -> Settings:
    return Settings(
        log_level     = os.getenv("BOCHVAR_LOG_LEVEL", "WARNING").upper(),
        max_enum_size = int(os.getenv("BOCHVAR_MAX_ENUM_SIZE", 12)),
        corpus_size   = int(os.getenv("BOCHVAR_CORPUS_SIZE", 8)),
        workers       = int(os.getenv("BOCHVAR_WORKERS", 4)),
        seed          = int(os.getenv("BOCHVAR_SEED", 20240501)),
        mutations     = int(os.getenv("BOCHVAR_MUTATIONS", 200)),
    )


def configure_logging(level: str | None = None) -> None:
    logging.basicConfig(
        level=getattr(logging, (level or load_settings().log_level).upper(), logging.WARNING),
        format=LOG_FORMAT,
        datefmt=LOG_DATEFMT,
    )
