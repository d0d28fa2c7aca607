"""JSON forms of exact rational functions and of check reports.

A rational function is written as
``{"poly": ["1", "0", "1/2"], "poles": [{"loc": "1+2i", "coeffs": ["3"]}]}``,
the polynomial part in ascending order and one principal part per pole.
"""
from typing import Any, Dict, List, TextIO, Union
import json
import os

from json_schema_tool.schema import ParseConfig, SchemaValidationResult, SchemaValidator, parse_schema
from yaml import safe_load

from ._exact import GaussianRational, RationalFunction
from .data_types import validators
from .exception import IoError
from .result import CheckResult, Level

JSON = Union[str, int, float, bool, None, Dict[str, Any], List[Any]]


def _load_schemas() -> Dict[str, SchemaValidator]:
    result = {}
    script_dir = os.path.dirname(os.path.realpath(__file__))
    data_dir = os.path.join(script_dir, 'data')
    config = ParseConfig(
        format_validators=validators
    )
    for i in sorted(os.listdir(data_dir)):
        if not i.endswith('.yml'):
            continue
        with open(os.path.join(data_dir, i), "rb") as f:
            schema = safe_load(f)
        result[i[:-4]] = parse_schema(schema, config)
    return result


_schemas = _load_schemas()


def _map_error(parent: CheckResult, error: SchemaValidationResult):
    for i in error.keyword_results:
        if i.ok():
            continue
        kw_result = CheckResult(i.error_message, '', Level.ERROR)
        for j in i.sub_schema_results:
            _map_error(kw_result, j)
        parent.append(kw_result)


def validate(data: JSON, schema: str) -> CheckResult:
    try:
        validator = _schemas[schema]
    except KeyError:
        raise IoError(f"Unknown schema {schema}, must be one of {sorted(_schemas)}")
    result = CheckResult(f'Check {schema}', schema, Level.INFO)
    _map_error(result, validator.validate(data))
    return result


def encode_rational(f: RationalFunction) -> dict:
    return {
        'poly': [str(c) for c in f.poly],
        'poles': [{'loc': str(loc), 'coeffs': [str(c) for c in coeffs]}
                  for loc, coeffs in sorted(f.poles.items(), key=lambda item: (item[0].re, item[0].im))],
    }


def decode_rational(data: JSON) -> RationalFunction:
    result = validate(data, 'rational_function')
    if not result.ok():
        raise IoError("Invalid rational function: " + "; ".join(r.message for r in result.sub_results))
    poles: Dict[GaussianRational, List[GaussianRational]] = {}
    for entry in data['poles']:
        loc = GaussianRational.parse(entry['loc'])
        if loc in poles:
            raise IoError(f"Pole {loc} listed twice")
        poles[loc] = [GaussianRational.parse(c) for c in entry['coeffs']]
    return RationalFunction([GaussianRational.parse(c) for c in data['poly']], poles)


def load_rational(file: TextIO) -> RationalFunction:
    try:
        data = json.load(file)
    except json.decoder.JSONDecodeError as e:
        raise IoError(f"Invalid JSON: {e}")
    return decode_rational(data)


def validate_report(data: JSON) -> CheckResult:
    return validate(data, 'report')
