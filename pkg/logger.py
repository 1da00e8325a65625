#!/usr/bin/env python3
"""
Structured logging for qmono

Console records go to stderr so that reports written to stdout stay
byte-identical between runs. Verbosity follows the -v/-vv flags:
0 shows warnings, 1 adds engine summaries, 2 adds every fork decision.

Debug records may carry a `depth` extra; the console formatter indents
them by tree depth so a -vv trace reads as the tree it builds.
"""

import logging
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, Optional

LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)

FILE_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'


def level_for(verbosity: int) -> int:
    """Console level for a -v count"""
    return LEVELS[max(0, min(verbosity, len(LEVELS) - 1))]


class ColoredFormatter(logging.Formatter):
    """Console formatter: module tag and depth indent on debug, colors on terminals"""

    COLORS = {
        'DEBUG': '\033[36m',     # Cyan
        'INFO': '\033[32m',      # Green
        'WARNING': '\033[33m',   # Yellow
        'ERROR': '\033[91m',     # Bright Red
        'CRITICAL': '\033[95m',  # Bright Magenta
    }
    RESET = '\033[0m'
    DIM = '\033[2m'
    INDENT = '  '

    def __init__(self, fmt: Optional[str] = None, use_colors: bool = True):
        super().__init__(fmt or '%(message)s')
        self.use_colors = use_colors and sys.stderr.isatty()

    def format(self, record: logging.LogRecord) -> str:
        text = super().format(record)
        if record.levelno <= logging.DEBUG:
            module = record.name.rsplit('.', 1)[-1]
            indent = self.INDENT * int(getattr(record, 'depth', 0))
            text = f"[{module}] {indent}{text}"
            return f"{self.DIM}{text}{self.RESET}" if self.use_colors else text
        if self.use_colors and record.levelno >= logging.WARNING:
            return f"{self.COLORS.get(record.levelname, '')}{text}{self.RESET}"
        return text


class QmonoLogger:
    """Shared handlers for every `qmono.<module>` logger

    Usage:
        from logger import get_logger
        log = get_logger(__name__)

        log.debug("blow-up fork (1,2,1)", extra={'depth': 2})   # -vv
        log.info("tree has 2 leaves")                           # -v
        log.warning("chart radius shrunk")                      # always
    """

    _instance: Optional['QmonoLogger'] = None
    _initialized: bool = False

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if QmonoLogger._initialized:
            return
        self._verbosity = 0
        self._loggers: Dict[str, logging.Logger] = {}
        self._console: Optional[logging.Handler] = None
        self._file: Optional[logging.Handler] = None
        QmonoLogger._initialized = True

    def setup(self, verbosity: int = 0, log_file: Optional[str] = None, use_colors: bool = True):
        """Install the console handler and, optionally, a debug file handler

        Args:
            verbosity: 0=WARNING+, 1=INFO+, 2=DEBUG+
            log_file: Optional path receiving every DEBUG record
            use_colors: Whether to color console output
        """
        self._verbosity = verbosity

        self._console = logging.StreamHandler(sys.stderr)
        self._console.setLevel(level_for(verbosity))
        self._console.setFormatter(ColoredFormatter(use_colors=use_colors))

        if self._file is not None:
            self._file.close()
            self._file = None
        if log_file:
            Path(log_file).parent.mkdir(parents=True, exist_ok=True)
            self._file = logging.FileHandler(log_file)
            self._file.setLevel(logging.DEBUG)
            self._file.setFormatter(logging.Formatter(FILE_FORMAT))

        for logger in self._loggers.values():
            self._attach(logger)

    def _attach(self, logger: logging.Logger):
        # A debug file keeps the logger at DEBUG while the console filters
        logger.setLevel(logging.DEBUG if self._file else level_for(self._verbosity))
        logger.handlers.clear()
        for handler in (self._console, self._file):
            if handler is not None:
                logger.addHandler(handler)
        logger.propagate = False

    def get_logger(self, name: str) -> logging.Logger:
        """Get or create the `qmono.<name>` logger"""
        logger = self._loggers.get(name)
        if logger is None:
            logger = logging.getLogger(f"qmono.{name}")
            self._attach(logger)
            self._loggers[name] = logger
        return logger

    @property
    def verbosity(self) -> int:
        return self._verbosity


_qmono_logger = QmonoLogger()


def setup_logging(verbosity: int = 0, log_file: Optional[str] = None, use_colors: bool = True):
    """Configure logging for the process; call early in main()"""
    _qmono_logger.setup(verbosity, log_file, use_colors)


def get_logger(name: str) -> logging.Logger:
    return _qmono_logger.get_logger(name)


@contextmanager
def timed(log: logging.Logger, label: str) -> Iterator[None]:
    """Log the wall time of a phase at INFO

    Timings go to the log only, never into reports.
    """
    start = time.perf_counter()
    try:
        yield
    finally:
        log.info(f"{label}: {time.perf_counter() - start:.3f} s")


def is_verbose() -> bool:
    """Check if verbose mode is enabled (verbosity >= 1)"""
    return _qmono_logger.verbosity >= 1


def is_debug() -> bool:
    """Check if debug mode is enabled (verbosity >= 2)"""
    return _qmono_logger.verbosity >= 2
