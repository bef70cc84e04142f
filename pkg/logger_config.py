"""
logger_config.py
─────────────────
Logging setup for the signrank CLI.

Strategy
--------
  CRITICAL  a constructed inverse failed its product check
  ERROR     input errors reported back to the user
  WARNING   handled but unexpected: search exhausted, irrational root
  INFO      lifecycle: command started/finished, search summaries
  DEBUG     per-restart residuals, per-step payloads

Output
------
  Console  → stderr (stdout carries the JSON report)
  File     → {log_dir}/signrank_{session_id}.log, only when a log
             directory is given (--log-dir or SIGRANK_LOG_DIR)

Usage
-----
  from logger_config import setup_logger
  setup_logger(session_id="abc123", level=logging.INFO)
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Optional, Union


def setup_logger(
    session_id: str = "default",
    level: int = logging.WARNING,
    log_dir: Optional[Union[str, Path]] = None,
) -> Optional[Path]:
    """
    Configure the root logger and return the log file path (if any).
    Safe to call more than once; existing handlers are replaced.
    """
    fmt = logging.Formatter(
        fmt="%(asctime)s | %(levelname)-8s | %(name)-22s | %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    root = logging.getLogger()
    root.setLevel(logging.DEBUG if log_dir else level)

    # ── Remove any existing handlers (safe for re-entrant calls) ─────────────
    for handler in list(root.handlers):
        root.removeHandler(handler)
        if isinstance(handler, logging.FileHandler):
            handler.close()

    # ── Console handler ───────────────────────────────────────────────────────
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(fmt)
    console_handler.setLevel(level)
    root.addHandler(console_handler)

    # ── File handler (optional) ───────────────────────────────────────────────
    log_file = None
    if log_dir:
        directory = Path(log_dir)
        directory.mkdir(parents=True, exist_ok=True)
        log_file = directory / f"signrank_{session_id}.log"
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(fmt)
        file_handler.setLevel(logging.DEBUG)
        root.addHandler(file_handler)

    logging.getLogger(__name__).info(
        f"[logger] logger.initialised | session={session_id} | log_file={log_file}"
    )
    return log_file
