"""Structured logging setup using structlog.

Reports go to stdout, so every handler installed here writes to stderr or to
a file.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Any

import structlog

# Loggers that emit one line per refit; bootstrap and simulation runs refit
# thousands of times.
_REFIT_LOGGERS = ("paired_gof.estimation",)

_SHARED_PROCESSORS: list[structlog.types.Processor] = [
    structlog.contextvars.merge_contextvars,
    structlog.stdlib.add_log_level,
    structlog.stdlib.add_logger_name,
    structlog.processors.TimeStamper(fmt="iso"),
    structlog.processors.StackInfoRenderer(),
    structlog.processors.UnicodeDecoder(),
]


def _formatter(renderer: structlog.types.Processor) -> structlog.stdlib.ProcessorFormatter:
    return structlog.stdlib.ProcessorFormatter(
        processors=[structlog.stdlib.ProcessorFormatter.remove_processors_meta, renderer],
        foreign_pre_chain=_SHARED_PROCESSORS,
    )


def _json_renderer() -> structlog.types.Processor:
    return structlog.processors.JSONRenderer(ensure_ascii=False)


def setup_logging(
    level: str = "WARNING",
    json_output: bool = False,
    log_file: Path | None = None,
) -> None:
    """Configure structured logging for the CLI and long simulation runs.

    Args:
        level: Log level name (DEBUG, INFO, WARNING, ERROR).
        json_output: If True, emit JSON lines on stderr; otherwise coloured output.
        log_file: Optional path where every record is also written as JSON.
    """
    log_level = getattr(logging, level.upper(), logging.WARNING)

    structlog.configure(
        processors=[*_SHARED_PROCESSORS, structlog.stdlib.ProcessorFormatter.wrap_for_formatter],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    renderer = _json_renderer() if json_output else structlog.dev.ConsoleRenderer(colors=sys.stderr.isatty())
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(_formatter(renderer))

    root = logging.getLogger()
    root.handlers.clear()
    root.addHandler(console_handler)
    root.setLevel(log_level)

    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(_formatter(_json_renderer()))
        file_handler.setLevel(logging.DEBUG)
        root.addHandler(file_handler)

    if log_level > logging.DEBUG:
        for name in _REFIT_LOGGERS:
            logging.getLogger(name).setLevel(max(log_level, logging.WARNING))


def bind_run_context(**values: Any) -> None:
    """Attach command-level fields (command, seed) to every following record."""
    structlog.contextvars.clear_contextvars()
    structlog.contextvars.bind_contextvars(**{k: v for k, v in values.items() if v is not None})
