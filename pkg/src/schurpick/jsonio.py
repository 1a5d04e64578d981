"""JSON encoding: complex numbers as ``[re, im]`` and floats with 17 significant digits."""

from __future__ import annotations

import json
import math

import numpy as np

from .ratfun import Polynomial, RationalFunction

__all__ = ["dumps", "complex_from_json", "polynomial_from_json", "rational_from_json", "rational_to_json"]


def complex_from_json(x) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    raise ValueError(f"expected a number or [re, im], got {x!r}")


def polynomial_from_json(xs) -> Polynomial:
    return Polynomial([complex_from_json(x) for x in xs])


def rational_from_json(obj) -> RationalFunction:
    """Read ``{"num": [[re, im], ...], "den": [...]}``."""
    if not isinstance(obj, dict) or "num" not in obj or "den" not in obj:
        raise ValueError("rational function JSON needs 'num' and 'den'")
    return RationalFunction(polynomial_from_json(obj["num"]), polynomial_from_json(obj["den"]))


def rational_to_json(f: RationalFunction) -> dict:
    return {"num": f.num.coeffs, "den": f.den.coeffs}


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0:
        return "0"  # folds -0.0 so repeated runs cannot differ by a sign bit
    return format(x, ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," + (pad if indent else " ")
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{_float(obj.real)}, {_float(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{_encode(str(k), 0, 0)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + pad + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(x, (int, float, complex, np.number)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(_encode(x, 0, 0) for x in obj) + "]"
        return "[" + pad + sep.join(_encode(x, indent, level + 1) for x in obj) + end + "]"
    if hasattr(obj, "to_json"):
        return _encode(obj.to_json(), indent, level)
    if isinstance(obj, Polynomial):
        return _encode(obj.coeffs, indent, level)
    if isinstance(obj, RationalFunction):
        return _encode(rational_to_json(obj), indent, level)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON text; complex values become ``[re, im]``.

    >>> dumps({"w": [1 + 0.5j]}, indent=0)
    '{"w": [[1, 0.5]]}'
    """
    return _encode(obj, indent, 0)
