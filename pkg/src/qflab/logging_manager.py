"""
Loggers that can be created at import time.

Library modules call `get_logger(__name__)` at the top of the file, long before the
command line (or an embedding application) decides how logging is configured.
"""

import logging
import threading
from collections.abc import Callable
from typing import Any

LoggerFactory = Callable[[str], logging.Logger]


class LazyLogger:
    """Proxy that forwards to the real logger once a factory is known.

    Before `LoggingConfig.configure` runs, records go to the standard library logger of
    the same name, so importing qflab as a library never loses messages nor complains.
    """

    def __init__(self, name: str) -> None:
        self.name = name
        self._real_logger: logging.Logger | None = None
        self.factory: LoggerFactory | None = None
        self.lock = threading.Lock()

    @property
    def real_logger(self) -> logging.Logger:
        if self._real_logger is None:
            with self.lock:
                if self.factory is None:
                    return logging.getLogger(self.name)
                self._real_logger = self.factory(self.name)
        return self._real_logger

    def rebind(self, factory: LoggerFactory) -> None:
        with self.lock:
            self.factory = factory
            self._real_logger = None

    def __getattr__(self, item: str) -> Any:  # noqa: WPS110
        return getattr(self.real_logger, item)


_lazy_loggers: dict[str, LazyLogger] = {}
_logger_factory: LoggerFactory | None = None


def bind_logger_factory(real_get_logger_fn: LoggerFactory) -> None:
    global _logger_factory  # noqa: PLW0603, WPS420
    _logger_factory = real_get_logger_fn  # noqa: WPS122
    for lazy in _lazy_loggers.values():
        lazy.rebind(real_get_logger_fn)


def get_logger(name: str) -> logging.Logger:
    if name not in _lazy_loggers:
        lazy = LazyLogger(name)
        if _logger_factory:
            lazy.factory = _logger_factory
        _lazy_loggers[name] = lazy
    return _lazy_loggers[name]  # type: ignore[return-value]
