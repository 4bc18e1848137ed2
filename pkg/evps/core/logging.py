"""
Logging Configuration Module

Provides structured JSON logging, a coloured console formatter,
per-thread run context and sweep start/finish logging.
"""

import json
import logging
import sys
import threading
import time
from datetime import datetime, timezone
from functools import wraps
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Callable, Dict, Optional, TypeVar

from .config import get_settings

F = TypeVar("F", bound=Callable[..., Any])


class JSONFormatter(logging.Formatter):
    """One JSON object per record, with the sweep run id when one is active."""

    def __init__(self, include_extra: bool = True):
        super().__init__()
        self.include_extra = include_extra

    def format(self, record: logging.LogRecord) -> str:
        log_data: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        if hasattr(record, "extra_data") and self.include_extra:
            log_data["extra"] = record.extra_data

        run_id = getattr(record, "run_id", None)
        if run_id is not None:
            log_data["run_id"] = run_id
            log_data["family"] = getattr(record, "family", None)

        return json.dumps(log_data, ensure_ascii=False, default=str)


class ColoredConsoleFormatter(logging.Formatter):
    """
    Console formatter with colored output for interactive runs.
    """

    COLORS = {
        "DEBUG": "\033[36m",
        "INFO": "\033[32m",
        "WARNING": "\033[33m",
        "ERROR": "\033[31m",
        "CRITICAL": "\033[35m",
    }
    RESET = "\033[0m"

    def __init__(self) -> None:
        super().__init__("%(asctime)s %(levelname)-8s %(name)s: %(message)s")

    def format(self, record: logging.LogRecord) -> str:
        color = self.COLORS.get(record.levelname, self.RESET)
        message = super().format(record)
        return f"{color}{message}{self.RESET}"


class RunContextFilter(logging.Filter):
    """
    Logging filter that stamps records with the active sweep run.
    """

    def __init__(self) -> None:
        super().__init__()
        self._context = threading.local()

    def filter(self, record: logging.LogRecord) -> bool:
        record.run_id = getattr(self._context, "run_id", None)
        record.family = getattr(self._context, "family", None)
        return True

    def set_context(self, run_id: Optional[str] = None, family: Optional[str] = None) -> None:
        """Bind a run id and family to the calling thread."""
        self._context.run_id = run_id
        self._context.family = family

    def clear_context(self) -> None:
        self._context.run_id = None
        self._context.family = None


_context_filter = RunContextFilter()


class StderrHandler(logging.StreamHandler):
    """
    Stream handler bound to whatever sys.stderr is at emit time.

    Test harnesses and the CLI runner swap sys.stderr after setup; records
    follow the swap instead of going to the stream captured at setup.
    """

    @property
    def stream(self) -> Any:  # type: ignore[override]
        return sys.stderr

    @stream.setter
    def stream(self, value: Any) -> None:
        pass


class LoggerSetup:
    """Singleton owning the root handlers for the process."""

    _instance: Optional["LoggerSetup"] = None
    _initialized: bool = False

    def __new__(cls) -> "LoggerSetup":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self) -> None:
        if self._initialized:
            return
        self._initialized = True
        self._loggers: Dict[str, logging.Logger] = {}

    def setup(
        self,
        log_level: Optional[str] = None,
        log_file: Optional[str] = None,
        max_bytes: int = 10 * 1024 * 1024,
        backup_count: int = 5,
        json_format: Optional[bool] = None,
        include_extra: bool = True
    ) -> None:
        """
        Install stderr (and optional rotating file) handlers on the root logger.

        Args:
            log_level: level name; Settings.log_level when None
            log_file: rotating log file; Settings.log_file when None
            max_bytes: rotation size
            backup_count: rotated files kept
            json_format: Use JSON formatting; defaults to the configured log_format
            include_extra: copy `extra_data` payloads into JSON records
        """
        settings = get_settings()
        level = log_level or settings.log_level
        log_file = log_file or settings.log_file
        if json_format is None:
            json_format = settings.log_format == "json"

        numeric_level = getattr(logging, level.upper(), logging.INFO)

        formatter: logging.Formatter
        if json_format:
            formatter = JSONFormatter(include_extra=include_extra)
        else:
            formatter = ColoredConsoleFormatter()

        root_logger = logging.getLogger()
        root_logger.setLevel(numeric_level)
        root_logger.handlers.clear()

        # stderr keeps stdout free for command output
        console_handler = StderrHandler()
        console_handler.setFormatter(formatter)
        console_handler.setLevel(numeric_level)
        root_logger.addHandler(console_handler)

        if log_file:
            log_path = Path(log_file)
            log_path.parent.mkdir(parents=True, exist_ok=True)
            file_handler = RotatingFileHandler(
                log_path,
                maxBytes=max_bytes,
                backupCount=backup_count,
                encoding="utf-8"
            )
            file_handler.setFormatter(formatter)
            file_handler.setLevel(numeric_level)
            root_logger.addHandler(file_handler)

        for handler in root_logger.handlers:
            handler.addFilter(_context_filter)

    def get_logger(self, name: str) -> logging.Logger:
        """Get a named logger."""
        if name not in self._loggers:
            self._loggers[name] = logging.getLogger(name)
        return self._loggers[name]

    def set_run_context(self, run_id: Optional[str] = None, family: Optional[str] = None) -> None:
        """Set context for the current sweep."""
        _context_filter.set_context(run_id=run_id, family=family)

    def clear_run_context(self) -> None:
        """Clear sweep context."""
        _context_filter.clear_context()


def setup_logging(**kwargs: Any) -> None:
    """Configure logging for a CLI run."""
    LoggerSetup().setup(**kwargs)


def get_logger(name: str) -> logging.Logger:
    """Get a named logger."""
    return LoggerSetup().get_logger(name)


def log_call(logger: logging.Logger) -> Callable[[F], F]:
    """
    Decorator to log function entry, exit and exceptions.

    Usage:
        @log_call(logger)
        def run_k_sweep(config):
            ...
    """
    def decorator(func: F) -> F:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            func_name = func.__name__
            logger.debug(f"{func_name} called")
            try:
                result = func(*args, **kwargs)
                logger.debug(f"{func_name} done")
                return result
            except Exception as exc:
                logger.error(f"{func_name} failed: {exc}")
                raise

        return wrapper  # type: ignore[return-value]

    return decorator


class SweepLogger:
    """
    Start/finish logging for sweep runs.
    """

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger or get_logger("evps.sweep")
        self._started: Dict[str, float] = {}

    def log_start(
        self,
        run_id: str,
        family: str,
        grid_size: int,
        splittings: int,
        extra: Optional[Dict[str, Any]] = None
    ) -> None:
        """Log the start of a sweep and bind the run context."""
        self._started[run_id] = time.perf_counter()
        LoggerSetup().set_run_context(run_id=run_id, family=family)
        self.logger.info(
            f"{family} started: {grid_size} grid points x {splittings} splittings",
            extra={"extra_data": {"event": "sweep_start", "grid_size": grid_size,
                                  "splittings": splittings, **(extra or {})}}
        )

    def log_finish(self, run_id: str, family: str, rows: int, unavailable: int) -> None:
        """Log the end of a sweep with its duration."""
        started = self._started.pop(run_id, time.perf_counter())
        duration_ms = (time.perf_counter() - started) * 1000.0
        level = logging.INFO if unavailable == 0 else logging.WARNING
        self.logger.log(
            level,
            f"{family} finished: {rows} rows, {unavailable} unavailable ({duration_ms:.2f}ms)",
            extra={"extra_data": {"event": "sweep_finish", "rows": rows,
                                  "unavailable": unavailable, "duration_ms": duration_ms}}
        )
        LoggerSetup().clear_run_context()
