"""
Unit Tests for Core Module
"""

import json
import logging

import pytest
import sys
from pathlib import Path
from unittest.mock import patch

# Add repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))


class TestSettings:
    """Tests for the Settings layer."""

    def test_defaults(self):
        """Test default numerical policy."""
        from evps.core.config import Settings

        settings = Settings()
        assert settings.default_cutoff == 8
        assert settings.cutoff_step == 2
        assert settings.tail_tolerance == 1e-10
        assert settings.gain_floor == 1e-12
        assert settings.convergence_tolerance == 2e-7
        assert settings.cutoff_ceiling == 48

    def test_env_override(self, monkeypatch):
        """Test EVPS_ environment variables override defaults."""
        from evps.core.config import Settings

        monkeypatch.setenv("EVPS_DEFAULT_CUTOFF", "12")
        monkeypatch.setenv("EVPS_LOG_FORMAT", "console")
        settings = Settings()
        assert settings.default_cutoff == 12
        assert settings.log_format == "console"

    def test_get_settings_is_cached(self):
        """Test get_settings returns one shared instance."""
        from evps.core.config import get_settings

        assert get_settings() is get_settings()


class TestErrors:
    """Tests for the error hierarchy."""

    def test_usage_errors_exit_two(self):
        """Test usage errors map to exit code 2."""
        from evps.core.errors import GridError, InvalidPartitionError, UsageError

        assert issubclass(GridError, UsageError)
        assert issubclass(InvalidPartitionError, ValueError)
        assert GridError("bad").exit_code == 2

    def test_numerical_errors_exit_one(self):
        """Test numerical errors map to exit code 1."""
        from evps.core.errors import CutoffTooSmallError, NoPhotonError

        exc = CutoffTooSmallError("too small", cutoff=8, tail=1e-6)
        assert exc.exit_code == 1
        assert exc.cutoff == 8
        assert NoPhotonError("none").exit_code == 1

    def test_message_names_parameter(self):
        """Test the offending parameter appears in the message."""
        from evps.core.errors import ParameterError

        assert "loss" in str(ParameterError("out of range", parameter="loss"))


class TestCache:
    """Tests for the memo cache."""

    def test_lru_eviction(self):
        """Test the oldest entry is evicted at capacity."""
        from evps.core.cache import MemoryCacheBackend

        backend = MemoryCacheBackend(max_entries=2)
        backend.set("a", 1)
        backend.set("b", 2)
        backend.get("a")
        backend.set("c", 3)
        assert backend.get("a") == 1
        assert backend.get("b") is None
        assert len(backend) == 2

    def test_cached_decorator_memoises(self):
        """Test repeated calls hit the cache."""
        from evps.core.cache import cached

        calls = []

        @cached(key_prefix="test")
        def square(x):
            calls.append(x)
            return x * x

        assert square(3) == 9
        assert square(3) == 9
        assert calls == [3]

    def test_cached_skips_none(self):
        """Test None results are not stored."""
        from evps.core.cache import cached

        calls = []

        @cached(key_prefix="test-none")
        def nothing(x):
            calls.append(x)
            return None

        nothing(1)
        nothing(1)
        assert calls == [1, 1]

    def test_disabled_cache(self, settings_override):
        """Test cache_enabled=False selects the null backend."""
        from evps.core.cache import get_cache, reset_cache

        assert get_cache().backend_type == "memory"
        settings_override(cache_enabled=False)
        reset_cache()
        cache = get_cache()
        assert cache.backend_type == "null"
        cache.set("a", 1)
        assert cache.get("a") is None


class TestLogging:
    """Tests for logging setup and formatters."""

    def test_json_formatter_includes_extra(self):
        """Test JSON records carry extra_data fields."""
        from evps.core.logging import JSONFormatter

        record = logging.LogRecord("evps", logging.INFO, __file__, 1, "hello", None, None)
        record.extra_data = {"grid_size": 3}
        payload = json.loads(JSONFormatter().format(record))
        assert payload["message"] == "hello"
        assert payload["extra"]["grid_size"] == 3

    def test_setup_logs_to_stderr(self):
        """Test the console handler writes to stderr."""
        from evps.core.logging import setup_logging

        setup_logging(log_level="DEBUG", json_format=False)
        root = logging.getLogger()
        assert root.level == logging.DEBUG
        assert root.handlers[0].stream is sys.stderr

    def test_console_follows_replaced_stderr(self, monkeypatch):
        """Test records reach a stderr swapped in after setup."""
        import io

        from evps.core.logging import setup_logging

        setup_logging(log_level="INFO", json_format=True)
        replacement = io.StringIO()
        monkeypatch.setattr(sys, "stderr", replacement)
        logging.getLogger("evps.test").warning("after the swap")
        assert "after the swap" in replacement.getvalue()

    def test_console_captured_by_capsys(self, capsys):
        """Test console output lands in pytest's captured stderr."""
        from evps.core.logging import setup_logging

        setup_logging(log_level="INFO", json_format=False)
        logging.getLogger("evps.test").error("captured line")
        assert "captured line" in capsys.readouterr().err

    def test_console_formatter_colours_level(self):
        """Test console records are wrapped in the level colour."""
        from evps.core.logging import ColoredConsoleFormatter

        record = logging.LogRecord("evps", logging.WARNING, __file__, 1, "careful", None, None)
        text = ColoredConsoleFormatter().format(record)
        assert text.startswith(ColoredConsoleFormatter.COLORS["WARNING"])
        assert text.endswith(ColoredConsoleFormatter.RESET)
        assert "careful" in text

    def test_file_handler_records_run_id(self, tmp_path):
        """Test JSON file records carry the active run id."""
        from logging.handlers import RotatingFileHandler

        from evps.core.logging import LoggerSetup, setup_logging

        log_file = tmp_path / "logs" / "evps.log"
        setup_logging(log_level="INFO", log_file=str(log_file), json_format=True)
        assert any(isinstance(h, RotatingFileHandler) for h in logging.getLogger().handlers)

        LoggerSetup().set_run_context(run_id="run42", family="loss_sweep")
        try:
            logging.getLogger("evps.test").info("point done")
        finally:
            LoggerSetup().clear_run_context()
        for handler in logging.getLogger().handlers:
            handler.flush()

        payload = json.loads(log_file.read_text().strip().splitlines()[-1])
        assert payload["run_id"] == "run42"
        assert payload["family"] == "loss_sweep"
        setup_logging(log_level="WARNING", json_format=True)

    def test_log_call_reraises(self):
        """Test log_call logs and re-raises exceptions."""
        from evps.core.logging import log_call

        logger = logging.getLogger("evps.test")

        @log_call(logger)
        def boom():
            raise RuntimeError("fail")

        with patch.object(logger, "error") as error:
            with pytest.raises(RuntimeError):
                boom()
            error.assert_called_once()

    def test_sweep_logger_binds_context(self):
        """Test sweep start binds and finish clears the run context."""
        from evps.core.logging import SweepLogger, _context_filter

        sweep_logger = SweepLogger(logging.getLogger("evps.test"))
        sweep_logger.log_start("abc123", "k_sweep", grid_size=3, splittings=1)
        assert getattr(_context_filter._context, "run_id", None) == "abc123"
        sweep_logger.log_finish("abc123", "k_sweep", rows=3, unavailable=0)
        assert getattr(_context_filter._context, "run_id", None) is None
