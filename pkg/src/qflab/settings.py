import os
from typing import Literal, TypeVar

from qflab import import_checker

T = TypeVar('T')  # noqa: WPS111

DEFAULT_FACTOR_LIMIT = 10**6


def get_env(envs: list[str], default: T) -> str | T:
    """
    Tries to get a value from any env variable from the list.
    If there's no value, return default.
    :param envs: list of env variable names
    :param default: default value if all env variables is not set
    """
    env_value = None
    for env in envs:
        env_value = os.getenv(env, None)
        if env_value is not None:
            break
    if env_value is None:
        return default
    return env_value


def get_factor_limit() -> int:
    """Trial-division bound used by `qflab.arith.factorize` (QFLAB_FACTOR_LIMIT)."""
    raw = get_env(['QFLAB_FACTOR_LIMIT'], str(DEFAULT_FACTOR_LIMIT)).strip()
    if not raw.isdigit() or int(raw) < 2:
        return DEFAULT_FACTOR_LIMIT
    return int(raw)


def get_logging_level() -> str | int:
    level = get_env(['QFLAB_LOG_LEVEL', 'LOGGING_LEVEL'], 'WARNING')
    if level.isdigit():
        return int(level)
    return level.upper()


def get_log_format() -> Literal['text', 'json']:
    log_format = get_env(['QFLAB_LOG_FORMAT'], 'text').lower()
    if log_format == 'json':
        return 'json'
    return 'text'


def get_json_dumps_module() -> Literal['json', 'orjson']:
    requested = get_env(['QFLAB_JSON_MODULE'], '').lower()
    if requested == 'json':
        return 'json'
    if requested == 'orjson' or import_checker.is_orjson_installed:
        return 'orjson'
    return 'json'
