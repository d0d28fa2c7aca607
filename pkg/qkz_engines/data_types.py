from ._exact import GaussianRational
from .complexfn import parse_complex
from .exception import DomainError


def is_exact_scalar(s: str) -> bool:
    try:
        GaussianRational.parse(s)
        return True
    except (ValueError, ZeroDivisionError):
        return False


def is_complex_literal(s: str) -> bool:
    try:
        parse_complex(s)
        return True
    except DomainError:
        return False


def is_param_hash(s: str) -> bool:
    if len(s) != 12:
        return False
    try:
        int(s, 16)
        return True
    except ValueError:
        return False


validators = {
    'qkz:exact': is_exact_scalar,
    'qkz:complex': is_complex_literal,
    'qkz:hash': is_param_hash,
}
