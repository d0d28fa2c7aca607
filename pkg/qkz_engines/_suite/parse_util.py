from typing import Any, Callable, List, Type, TypeVar

from ..exception import ConfigError

T = TypeVar('T')


class NoDefault:
    pass


def assert_type(value: Any, _type: Type, json_path: str):
    if not isinstance(value, _type) or (isinstance(value, bool) and _type is not bool):
        raise ConfigError('Expected "{}", got "{}" at {}'.format(
            _type, type(value), json_path))
    return value


def safe_dict_lookup(data: dict, key: str, _type: Type, json_path: str, default=NoDefault):
    # an explicit null counts as missing
    if data.get(key) is None:
        if default is not NoDefault:
            return default
        else:
            raise ConfigError('Expected key "{}" at {}'.format(key, json_path))
    return assert_type(data[key], _type, json_path + '.' + key)


def parse_list(value: Any, item: Callable[[Any], T], json_path: str) -> List[T]:
    """A YAML list or the comma form 'x,y,z'."""
    if isinstance(value, str):
        value = [v.strip() for v in value.split(',') if v.strip()]
    elif isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value]
    assert_type(value, list, json_path)
    result = []
    for idx, v in enumerate(value):
        try:
            result.append(item(v))
        except (ValueError, TypeError, ZeroDivisionError) as e:
            raise ConfigError(f"Invalid entry {v!r} at {json_path}[{idx}]: {e}")
    return result


def list_lookup(data: dict, key: str, item: Callable[[Any], T], json_path: str, default=NoDefault) -> List[T]:
    if data.get(key) is None:
        if default is not NoDefault:
            return default
        raise ConfigError('Expected key "{}" at {}'.format(key, json_path))
    return parse_list(data[key], item, json_path + '.' + key)
