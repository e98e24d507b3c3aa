import os

import pytest
from pytest_mock import MockerFixture

from qflab.settings import (
    DEFAULT_FACTOR_LIMIT,
    get_env,
    get_factor_limit,
    get_json_dumps_module,
    get_log_format,
    get_logging_level,
)


def test_get_env_takes_first_set_variable() -> None:
    os.environ['QFLAB_TEST_SECOND'] = 'second'
    assert get_env(['QFLAB_TEST_FIRST', 'QFLAB_TEST_SECOND'], 'default') == 'second'
    os.environ['QFLAB_TEST_FIRST'] = 'first'
    assert get_env(['QFLAB_TEST_FIRST', 'QFLAB_TEST_SECOND'], 'default') == 'first'
    os.environ.pop('QFLAB_TEST_FIRST', None)
    os.environ.pop('QFLAB_TEST_SECOND', None)
    assert get_env(['QFLAB_TEST_FIRST', 'QFLAB_TEST_SECOND'], 'default') == 'default'


def test_get_logging_level_str() -> None:
    assert get_logging_level() == 'WARNING'
    os.environ['QFLAB_LOG_LEVEL'] = 'debug'
    assert get_logging_level() == 'DEBUG'
    os.environ['QFLAB_LOG_LEVEL'] = '10'
    assert get_logging_level() == 10
    os.environ['QFLAB_LOG_LEVEL'] = 'WARNING'


def test_logging_level_falls_back_to_generic_variable() -> None:
    os.environ.pop('QFLAB_LOG_LEVEL', None)
    os.environ['LOGGING_LEVEL'] = 'ERROR'
    assert get_logging_level() == 'ERROR'
    os.environ.pop('LOGGING_LEVEL', None)
    assert get_logging_level() == 'WARNING'
    os.environ['QFLAB_LOG_LEVEL'] = 'WARNING'


@pytest.mark.parametrize(('raw', 'expected'), [('json', 'json'), ('JSON', 'json'), ('text', 'text'), ('xml', 'text')])
def test_get_log_format(raw: str, expected: str) -> None:
    os.environ['QFLAB_LOG_FORMAT'] = raw
    assert get_log_format() == expected
    os.environ['QFLAB_LOG_FORMAT'] = 'text'


@pytest.mark.parametrize(
    ('raw', 'expected'),
    [('250', 250), ('1000000', 1000000), ('1', DEFAULT_FACTOR_LIMIT), ('many', DEFAULT_FACTOR_LIMIT)],
)
def test_get_factor_limit(raw: str, expected: int) -> None:
    os.environ['QFLAB_FACTOR_LIMIT'] = raw
    assert get_factor_limit() == expected
    os.environ['QFLAB_FACTOR_LIMIT'] = '1000000'


@pytest.mark.parametrize(
    ('requested', 'orjson_installed', 'expected'),
    [
        ('json', True, 'json'),
        ('orjson', False, 'orjson'),
        ('', True, 'orjson'),
        ('', False, 'json'),
    ],
)
def test_get_json_dumps_module(
    requested: str,
    orjson_installed: bool,  # noqa: FBT001
    expected: str,
    mocker: MockerFixture,
) -> None:
    mock = mocker.patch('qflab.settings.import_checker')
    mock.is_orjson_installed = orjson_installed
    os.environ['QFLAB_JSON_MODULE'] = requested
    assert get_json_dumps_module() == expected
    os.environ['QFLAB_JSON_MODULE'] = 'json'
