import logging
import os

from dotenv import load_dotenv

load_dotenv()

LOG_LEVEL: str = os.getenv("STREAMSIM_LOG_LEVEL", "INFO").strip().upper()
OUTPUT_DIR: str = os.getenv("STREAMSIM_OUTPUT_DIR", "runs").strip()

if not isinstance(logging.getLevelName(LOG_LEVEL), int):
    raise ValueError(f"STREAMSIM_LOG_LEVEL must be a logging level name, got {LOG_LEVEL!r}")

if not OUTPUT_DIR:
    raise ValueError("STREAMSIM_OUTPUT_DIR is set but empty")
