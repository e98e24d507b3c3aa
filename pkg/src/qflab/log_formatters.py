import datetime as dt
import logging
from typing import Any, Final, Literal

from qflab.log_context import get_log_context
from qflab.serialization import provide_json_dumps_func
from qflab.settings import get_json_dumps_module

# skip default LogRecord attributes
RESERVED_ATTRS: Final[frozenset[str]] = frozenset((  # noqa: WPS407
    'args',
    'asctime',
    'created',
    'exc_info',
    'exc_text',
    'filename',
    'funcName',
    'levelname',
    'levelno',
    'lineno',
    'message',
    'module',
    'msecs',
    'msg',
    'name',
    'pathname',
    'process',
    'processName',
    'relativeCreated',
    'stack_info',
    'thread',
    'threadName',
    'taskName',
    'context_str',
))


def grab_record_extra_fields(record: logging.LogRecord) -> dict[str, Any]:
    """Extracts attributes passed through `extra=` from a LogRecord."""
    extra_fields = {}
    for key, value in record.__dict__.items():  # noqa: WPS110
        if key in RESERVED_ATTRS:
            continue
        if hasattr(key, 'startswith') and key.startswith('_'):
            continue
        extra_fields[key] = value
    return extra_fields


def update_fields_with_nested(
    source_data: dict[str, Any],
    updated_fields: dict[str, Any],
) -> dict[str, Any]:
    """
    Update a keys in a dictionary.
    If patch to the key contains dots it means nested dictionary.
    'a.b.c': 'hello' -> {'a': {'b': {'c': 'hello'}}}
    """
    for field_name, field_value in updated_fields.items():
        here = source_data
        keys = field_name.split('.')
        for key in keys[:-1]:
            here = here.setdefault(key, {})
        here[keys[-1]] = field_value
    return source_data


def timestamp_to_iso(timestamp: float) -> str:
    return (
        dt.datetime.fromtimestamp(timestamp, tz=dt.timezone.utc)
        .isoformat(timespec='milliseconds')
        .replace('+00:00', 'Z')
    )


class ConsoleFormatter(logging.Formatter):
    """Plain text records with the bound context rendered as `{key = value, ...}`."""

    def format(self, record: logging.LogRecord) -> str:
        bound = get_log_context() | grab_record_extra_fields(record)
        k_v_strings = (f'{k} = {v}' for k, v in bound.items())  # noqa: WPS111
        context_str = ', '.join(k_v_strings)
        record.context_str = f'{{{context_str}}}' if context_str else ''
        return super().format(record)


class JsonFormatter(logging.Formatter):
    def __init__(
        self,
        *args: Any,
        json_dumps_module: Literal['json', 'orjson'] | None = None,
        capture_extra_fields: bool = True,
        **kwargs: Any,
    ) -> None:
        super().__init__(*args, **kwargs)
        self.json_dumps = provide_json_dumps_func(json_dumps_module or get_json_dumps_module())
        self.capture_extra_fields = capture_extra_fields

    def format(self, record: logging.LogRecord) -> str:
        log_dict = self._prepare_log_dict(record)
        try:
            return self.json_dumps(log_dict)
        except TypeError:
            # an extra field the serializer does not know, never drop the record for it
            return self.json_dumps(log_dict, fallback=repr)

    def _prepare_log_dict(self, record: logging.LogRecord) -> dict[str, Any]:
        log_record: dict[str, Any] = {
            'timestamp': timestamp_to_iso(record.created),
            'level': record.levelname,
            'message': record.getMessage(),
            'params': {
                'call_filepath': f'{record.pathname}:{record.lineno}',
                'logger_name': record.name,
            },
        }
        if record.exc_info and record.exc_info[0] is not None:
            log_record['error'] = {
                'code': record.exc_info[0].__name__,
                'message': repr(record.exc_info[1]),
                'stack': self.formatException(record.exc_info).splitlines(),
            }
        update_fields_with_nested(log_record, get_log_context())
        if self.capture_extra_fields:
            update_fields_with_nested(log_record, grab_record_extra_fields(record))
        return log_record
