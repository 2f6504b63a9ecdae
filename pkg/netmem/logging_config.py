"""
Per-run logging for experiments.

Every run gets an id (``seed<seed>_<timestamp>`` when the master seed is
known). Handlers hang off the ``netmem`` package logger so records from every
module land in one place, tagged with the run id. Callers log through the run
logger ``netmem.<experiment>``. Diagnostics only ever go to stderr because
stdout carries result tables.
"""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional

from .exceptions import LoggingError, FileIOError

PACKAGE_LOGGER = 'netmem'
LOG_FORMAT = '%(asctime)s [%(run_id)s] %(name)s %(levelname)s: %(message)s'


class RunIdFilter(logging.Filter):
    """Stamp every record with the run id."""

    def __init__(self, run_id: str):
        super().__init__()
        self.run_id = run_id

    def filter(self, record: logging.LogRecord) -> bool:
        record.run_id = self.run_id
        return True


class StderrHandler(logging.StreamHandler):
    """Stream handler bound to whatever ``sys.stderr`` is when a record is emitted."""

    def __init__(self):
        super().__init__(sys.stderr)

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


def make_run_id(seed: Optional[int] = None) -> str:
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    return timestamp if seed is None else f"seed{seed}_{timestamp}"


def _install(handlers, run_id: str, log_level: int, experiment_name: str) -> logging.Logger:
    package = logging.getLogger(PACKAGE_LOGGER)
    package.setLevel(log_level)
    # Repeated runs in one process replace, never stack, handlers
    for old in list(package.handlers):
        package.removeHandler(old)
        old.close()
    formatter = logging.Formatter(LOG_FORMAT)
    run_filter = RunIdFilter(run_id)
    for handler in handlers:
        handler.setLevel(log_level)
        handler.setFormatter(formatter)
        handler.addFilter(run_filter)
        package.addHandler(handler)
    return package.getChild(experiment_name)


class LoggerManager:
    """
    Log directory and handlers for one experiment run.

    Files go to ``<base_dir>/logs/<experiment_name>/<run_id>.log``.
    """

    def __init__(
        self,
        base_dir: Optional[Path] = None,
        experiment_name: Optional[str] = None,
        seed: Optional[int] = None,
    ):
        """
        Raises:
            FileIOError: If log directories cannot be created.
        """
        self.base_dir = Path(base_dir) if base_dir else Path(__file__).resolve().parent.parent
        self.experiment_name = experiment_name or 'general'
        self.run_id = make_run_id(seed)

        self.logs_dir = self.base_dir / 'logs'
        self.experiment_log_dir = self.logs_dir / self.experiment_name
        try:
            self.experiment_log_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise FileIOError(
                f"Failed to create experiment log directory '{self.experiment_log_dir}': {e}"
            ) from e

    @property
    def log_file(self) -> Path:
        return self.experiment_log_dir / f"{self.run_id}.log"

    def create_logger(self, log_level: int = logging.INFO) -> logging.Logger:
        """Attach file and stderr handlers for this run and return its run logger.

        Raises:
            LoggingError: If logger creation fails.
        """
        try:
            handlers = [logging.FileHandler(self.log_file), StderrHandler()]
            return _install(handlers, self.run_id, log_level, self.experiment_name)
        except Exception as e:
            raise LoggingError(f"Failed to create logger for run '{self.run_id}': {e}") from e

    @staticmethod
    def create_console_logger(
        experiment_name: str,
        log_level: int = logging.INFO,
        seed: Optional[int] = None,
    ) -> logging.Logger:
        """Run logger that writes to stderr only, without touching the filesystem.

        Raises:
            LoggingError: If logger creation fails.
        """
        try:
            return _install([StderrHandler()], make_run_id(seed), log_level, experiment_name)
        except Exception as e:
            raise LoggingError(f"Failed to create console logger for '{experiment_name}': {e}") from e
