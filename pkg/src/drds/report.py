"""JSON-able rendering of result objects.

Exact rationals become "p/q" strings, polynomials and rational functions
become their canonical text (with term counts when large), dataclasses
recurse, and floats pass through untouched (the CLI layer owns digit
formatting).
"""

from __future__ import annotations

import dataclasses
from fractions import Fraction

from .parsing import format_polynomial, format_rational
from .poly import Polynomial, RationalFunction

LARGE_POLY_TERMS = 2000


def jsonable(obj):
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}" if obj.denominator != 1 else str(obj.numerator)
    if isinstance(obj, Polynomial):
        if len(obj.terms) > LARGE_POLY_TERMS:
            return {"terms": len(obj.terms), "total_degree": obj.total_degree(),
                    "context": list(obj.context), "text": "<omitted: large>"}
        return format_polynomial(obj)
    if isinstance(obj, RationalFunction):
        if len(obj.num.terms) + len(obj.den.terms) > LARGE_POLY_TERMS:
            return {"num_terms": len(obj.num.terms), "den_terms": len(obj.den.terms),
                    "text": "<omitted: large>"}
        return format_rational(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {}
        for f in dataclasses.fields(obj):
            out[f.name] = jsonable(getattr(obj, f.name))
        # steer clear of recursive map/system references blowing up reports
        return out
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return str(obj)
