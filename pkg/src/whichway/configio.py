"""JSON (de)serialization of configurations.

Complex numbers are written as ``{"re": x, "im": y}``; on input a bare number
is also accepted. An interferometer config looks like::

    {
      "s_Q0": [0.0, 0.0, 1.0],
      "rho_D0": [0.0, 0.0, 1.0],            # Bloch vector, or a 2x2 matrix
      "U_plus": [[1, 0], [0, 1]],           # 2x2 complex matrices ...
      "U_minus": [[1, 0], [0, {"re": 0, "im": 1}]],
      "phi": 0.0
    }

or, with the SQDS phase shifters in place of the explicit unitaries::

    {"s_Q0": [...], "rho_D0": [...], "sqds": {"phi_D": 0.0, "Phi": 1.2}, "phi": 0.0}
"""

from __future__ import annotations

import jsonschema
import numpy as np

from . import qmath, sqds
from .channel import ChannelConfig
from .engine import InterferometerConfig

_NUMBER = {"type": "number"}
_COMPLEX = {
    "oneOf": [
        _NUMBER,
        {"type": "object", "properties": {"re": _NUMBER, "im": _NUMBER},
         "required": ["re", "im"], "additionalProperties": False},
    ]
}
_ROW2 = {"type": "array", "items": _COMPLEX, "minItems": 2, "maxItems": 2}
_MATRIX2 = {"type": "array", "items": _ROW2, "minItems": 2, "maxItems": 2}
_VECTOR3 = {"type": "array", "items": _NUMBER, "minItems": 3, "maxItems": 3}

INTERFEROMETER_SCHEMA = {
    "type": "object",
    "properties": {
        "s_Q0": _VECTOR3,
        "rho_D0": {"oneOf": [_VECTOR3, _MATRIX2]},
        "U_plus": _MATRIX2,
        "U_minus": _MATRIX2,
        "sqds": {
            "type": "object",
            "properties": {"phi_D": _NUMBER, "Phi": _NUMBER},
            "required": ["Phi"],
            "additionalProperties": False,
        },
        "phi": _NUMBER,
    },
    "required": ["s_Q0", "rho_D0"],
    "oneOf": [
        {"required": ["U_plus", "U_minus"], "not": {"required": ["sqds"]}},
        {"required": ["sqds"], "not": {"anyOf": [{"required": ["U_plus"]},
                                                  {"required": ["U_minus"]}]}},
    ],
    "additionalProperties": False,
}

SQDS_SCHEMA = {
    "type": "object",
    "properties": {"s_Q0": _VECTOR3, "s_D0": _VECTOR3,
                   "phi_Q": _NUMBER, "phi_D": _NUMBER, "Phi": _NUMBER},
    "required": ["s_Q0", "s_D0"],
    "additionalProperties": False,
}

CHANNEL_SCHEMA = {
    "type": "object",
    "properties": {"w_plus": _NUMBER, "epsilon": _NUMBER,
                   "n_trials": {"type": "integer", "minimum": 1}},
    "required": ["w_plus", "epsilon"],
    "additionalProperties": False,
}


class SchemaError(ValueError):
    """Input JSON does not match the expected layout."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def validate(data, schema) -> None:
    errors = list(jsonschema.Draft202012Validator(schema).iter_errors(data))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise SchemaError(err.json_path, err.message)


def _complex(z) -> complex:
    if isinstance(z, dict):
        return complex(z["re"], z["im"])
    return complex(z)


def _matrix(rows) -> np.ndarray:
    return np.array([[_complex(z) for z in row] for row in rows], dtype=complex)


def interferometer_from_dict(data: dict) -> InterferometerConfig:
    """Build a config; schema problems raise :class:`SchemaError`, unphysical
    states :class:`whichway.qmath.UnphysicalStateError`."""
    validate(data, INTERFEROMETER_SCHEMA)
    rho = data["rho_D0"]
    if isinstance(rho[0], list):
        rho_D0 = _matrix(rho)
    else:
        rho_D0 = qmath.bloch_to_density(rho)
    if "sqds" in data:
        u_plus, u_minus = sqds.detecton_phase_unitaries(
            data["sqds"].get("phi_D", 0.0), data["sqds"]["Phi"])
    else:
        u_plus, u_minus = _matrix(data["U_plus"]), _matrix(data["U_minus"])
    return InterferometerConfig(s_Q0=np.array(data["s_Q0"], dtype=float), rho_D0=rho_D0,
                                U_plus=u_plus, U_minus=u_minus, phi=data.get("phi", 0.0))


def sqds_from_dict(data: dict) -> sqds.SqdsConfig:
    validate(data, SQDS_SCHEMA)
    return sqds.SqdsConfig(np.array(data["s_Q0"], dtype=float),
                           np.array(data["s_D0"], dtype=float),
                           data.get("phi_Q", 0.0), data.get("phi_D", 0.0),
                           data.get("Phi", 0.0))


def channel_from_dict(data: dict) -> ChannelConfig:
    validate(data, CHANNEL_SCHEMA)
    return ChannelConfig(data["w_plus"], data["epsilon"])
