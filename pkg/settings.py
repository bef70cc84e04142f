"""
settings.py
────────────
Runtime configuration for the signrank CLI.

Precedence: command-line flags > environment (including a .env file
loaded with python-dotenv) > dataclass defaults.

Environment
───────────
  SIGRANK_RESTARTS    ALS restarts per target rank
  SIGRANK_ITERATIONS  ALS sweeps per restart
  SIGRANK_TOL         relative residual accepted as a fit
  SIGRANK_SEED        seed for every randomized command
  SIGRANK_TRIALS      singular-member sampling trials
  SIGRANK_SAMPLES     members drawn for Mr lower bounds
  SIGRANK_LOG_DIR     write signrank_{session}.log here
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import Callable, Optional, TypeVar

from dotenv import load_dotenv

from qualtensor.config import SamplingConfig, SearchConfig

logger = logging.getLogger(__name__)

ENV_PREFIX = "SIGRANK_"

T = TypeVar("T")


@dataclass(frozen=True)
class Settings:
    search: SearchConfig = field(default_factory=SearchConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    log_dir: Optional[str] = None


def _env(name: str, cast: Callable[[str], T]) -> Optional[T]:
    raw = os.getenv(ENV_PREFIX + name)
    if raw is None or not raw.strip():
        return None
    try:
        return cast(raw.strip())
    except ValueError:
        raise ValueError(f"{ENV_PREFIX}{name}={raw!r} is not a valid {cast.__name__}") from None


def load_settings(dotenv_path: Optional[str] = None) -> Settings:
    """Read .env (if present) and SIGRANK_* variables over the defaults."""
    load_dotenv(dotenv_path)

    seed = _env("SEED", int)
    try:
        search = SearchConfig().with_overrides(
            restarts=_env("RESTARTS", int),
            iterations=_env("ITERATIONS", int),
            tol=_env("TOL", float),
            seed=seed,
        )
        sampling = SamplingConfig().with_overrides(
            trials=_env("TRIALS", int),
            samples=_env("SAMPLES", int),
            seed=seed,
        )
    except ValueError as exc:
        raise ValueError(f"invalid {ENV_PREFIX}* setting: {exc}") from None
    settings = Settings(search=search, sampling=sampling, log_dir=os.getenv(ENV_PREFIX + "LOG_DIR") or None)
    logger.debug(
        f"[settings] settings.loaded | restarts={search.restarts} | iterations={search.iterations} | "
        f"tol={search.tol} | seed={search.seed} | trials={sampling.trials} | samples={sampling.samples}"
    )
    return settings
