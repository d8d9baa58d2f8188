# utils/logger.py
import logging
import logging.config
from typing import Dict, Optional

from config import DEBUG, LOG_FILE

# Our own packages log at the run level; numerical libraries only surface warnings
PACKAGES = ("langevin", "handlers", "utils", "__main__")
QUIET_LIBRARIES = ("asyncio", "numpy", "scipy")


class RunContextFilter(logging.Filter):
    """Stamps every record with the experiment being run, so one log file can hold many runs."""

    experiment = "-"

    def filter(self, record: logging.LogRecord) -> bool:
        record.experiment = self.experiment
        return True


def tag_experiment(name: str):
    RunContextFilter.experiment = name


def build_logging_config(debug: bool = DEBUG, log_file: str = LOG_FILE) -> Dict:
    level = "DEBUG" if debug else "INFO"
    package_logger = {"level": level, "handlers": ["console", "file"], "propagate": False}
    library_logger = {"level": "WARNING", "handlers": ["console_library", "file"], "propagate": False}
    return {
        "version": 1,
        "disable_existing_loggers": False,
        "filters": {"run_context": {"()": RunContextFilter}},
        "formatters": {
            # trial workers run in threads; the thread name tells their records apart
            "run": {"format": "%(asctime)s [%(experiment)s] %(threadName)s %(name)s %(levelname)s: %(message)s"},
            "console": {"format": "%(levelname)s [%(experiment)s] %(message)s"},
            "library": {"format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s"},
        },
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "level": level,
                "formatter": "console",
                "filters": ["run_context"],
                "stream": "ext://sys.stderr",
            },
            "console_library": {
                "class": "logging.StreamHandler",
                "level": "WARNING",
                "formatter": "library",
                "stream": "ext://sys.stderr",
            },
            "file": {
                "class": "logging.handlers.RotatingFileHandler",
                "level": level,
                "formatter": "run",
                "filters": ["run_context"],
                "filename": log_file,
                "maxBytes": 10 * 1024 * 1024,  # 10 MB
                "backupCount": 5,
                "encoding": "utf8",
            },
        },
        "root": {"level": "WARNING", "handlers": ["console_library", "file"]},
        "loggers": {
            **{name: dict(package_logger) for name in PACKAGES},
            **{name: dict(library_logger) for name in QUIET_LIBRARIES},
        },
    }


def setup_logging(debug: Optional[bool] = None, log_file: Optional[str] = None):
    """Apply the logging configuration; called once by main.py."""
    logging.config.dictConfig(build_logging_config(DEBUG if debug is None else debug,
                                                   LOG_FILE if log_file is None else log_file))
    logging.getLogger(__name__).debug(f"Logging to {log_file or LOG_FILE}; DEBUG mode is {DEBUG if debug is None else debug}")
