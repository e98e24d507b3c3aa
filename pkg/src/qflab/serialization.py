import json
from collections.abc import Callable
from enum import Enum
from fractions import Fraction
from typing import Any, Literal

from qflab import import_checker
from qflab.errors import MissingDependencyError


def default(obj_to_serialize: Any) -> Any:
    """Fallback for values the JSON backends do not know."""
    if isinstance(obj_to_serialize, Fraction):
        return str(obj_to_serialize)
    if isinstance(obj_to_serialize, Enum):
        return obj_to_serialize.value
    if isinstance(obj_to_serialize, (set, frozenset)):
        return sorted(obj_to_serialize, key=str)
    if hasattr(obj_to_serialize, 'to_dict'):
        return obj_to_serialize.to_dict()
    raise TypeError(f'Object of type {type(obj_to_serialize).__name__} is not JSON serializable')


def json_dumps(obj_to_serialize: Any, *, indent: bool = False, fallback: Callable[[Any], Any] = default) -> str:
    return json.dumps(obj_to_serialize, ensure_ascii=False, indent=2 if indent else None, default=fallback)


def orjson_dumps(obj_to_serialize: Any, *, indent: bool = False, fallback: Callable[[Any], Any] = default) -> str:
    if not import_checker.is_orjson_installed:
        raise MissingDependencyError('orjson')
    import orjson

    option = orjson.OPT_INDENT_2 if indent else 0
    # orjson.dumps returns bytes, to match standart json.dumps we need to decode
    return orjson.dumps(obj_to_serialize, default=fallback, option=option).decode()


def provide_json_dumps_func(json_dumps_module: Literal['json', 'orjson']) -> Callable[..., str]:
    if json_dumps_module == 'orjson':
        return orjson_dumps
    return json_dumps
