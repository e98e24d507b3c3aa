import copy
import logging
from dataclasses import dataclass, field
from logging import config
from typing import Any, Literal

from qflab import import_checker
from qflab.errors import MissingDependencyError
from qflab.logging_manager import bind_logger_factory
from qflab.settings import get_json_dumps_module, get_log_format, get_logging_level

# stdout belongs to command results, diagnostics always go to stderr
default_handlers: dict[str, dict[str, Any]] = {
    'console': {
        'class': 'logging.StreamHandler',
        'formatter': 'standard',
        'stream': 'ext://sys.stderr',
    },
}


def _get_default_formatters() -> dict[str, dict[str, Any]]:
    return {
        'standard': {
            '()': 'qflab.log_formatters.ConsoleFormatter',
            'format': '%(asctime)s | %(levelname)s | %(name)s:%(lineno)s | %(message)s %(context_str)s',
        },
        'json_fmt': {
            '()': 'qflab.log_formatters.JsonFormatter',
        },
    }


@dataclass
class LoggingConfig:
    """
    Logging setup used by the `qflab` command and available to embedding applications.

    Attributes:
        log_format (Literal['text', 'json']):
            Formatter of the console handler. 'text' writes `ConsoleFormatter` lines,
            'json' writes one JSON object per record. Defaults to QFLAB_LOG_FORMAT.

        json_dumps_module (Literal['json', 'orjson']):
            Serializer of the JSON formatter, 'orjson' is used when installed.

        level (int | str):
            Root level, QFLAB_LOG_LEVEL (or LOGGING_LEVEL), 'WARNING' by default.

        capture_extra_fields (bool):
            Put fields given with `logger.info('...', extra={...})` into JSON records.

        override_formatters (dict[str, str]):
            Handler name to formatter name, applied last, e.g. {'console': 'json_fmt'}.

        formatters, handlers, loggers:
            Merged over the defaults and handed to `logging.config.dictConfig` unchanged.
    """

    log_format: Literal['text', 'json'] = field(default_factory=get_log_format)
    json_dumps_module: Literal['json', 'orjson'] = field(default_factory=get_json_dumps_module)
    version: Literal[1] = 1
    disable_existing_loggers: bool = False
    formatters: dict[str, dict[str, Any]] = field(default_factory=_get_default_formatters)
    handlers: dict[str, dict[str, Any]] = field(default_factory=dict)
    loggers: dict[str, dict[str, Any]] = field(default_factory=dict)
    root: dict[str, Any] = field(default_factory=lambda: {'handlers': ['console']})
    override_formatters: dict[str, str] = field(default_factory=dict)
    level: int | str = field(default_factory=get_logging_level)
    capture_extra_fields: bool = True

    def __post_init__(self) -> None:
        if self.json_dumps_module == 'orjson' and not import_checker.is_orjson_installed:
            raise MissingDependencyError('orjson')
        for formatter_name, formatter in _get_default_formatters().items():
            self.formatters.setdefault(formatter_name, formatter)
        if 'console' not in self.handlers:
            # module level defaults must stay untouched between configurations
            self.handlers['console'] = copy.deepcopy(default_handlers['console'])

    def configure(self) -> None:
        config.dictConfig(self.prepare_config_dict())
        bind_logger_factory(logging.getLogger)

    def prepare_config_dict(self) -> dict[str, Any]:
        config_dict: dict[str, Any] = copy.deepcopy({
            'version': self.version,
            'disable_existing_loggers': self.disable_existing_loggers,
            'formatters': self.formatters,
            'handlers': self.handlers,
            'loggers': self.loggers,
            'root': self.root,
        })
        config_dict['formatters']['json_fmt']['json_dumps_module'] = self.json_dumps_module
        config_dict['formatters']['json_fmt']['capture_extra_fields'] = self.capture_extra_fields
        if self.log_format == 'json':
            config_dict['handlers']['console']['formatter'] = 'json_fmt'
        config_dict['root']['level'] = self.level
        for handler_name, formatter_name in self.override_formatters.items():
            if config_dict['handlers'][handler_name].get('formatter') is not None:
                config_dict['handlers'][handler_name]['formatter'] = formatter_name
        return config_dict


def configure_logging(**overrides: Any) -> None:
    LoggingConfig(**overrides).configure()
