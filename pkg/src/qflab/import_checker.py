from importlib.util import find_spec

is_orjson_installed = find_spec('orjson')
