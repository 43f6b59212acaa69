"""Exact JSON encoding of fields, elements, polynomials, operators and boxes.

Rationals are ``"num/den"`` strings (``"num"`` when integral), field elements
are coordinate arrays in the power basis of the generator (a bare rational
string is accepted on input), polynomials are ascending coefficient arrays.
No floating-point number is ever read back.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from flint import acb, arb, ctx, fmpq, fmpq_poly

from .arith import QQ, AlgebraicNumber, KElement, NumberField, box_radius, dyadic_to_fmpq, fmpq_str
from .operators import DiffOp
from .poly import KPoly, KRatFun
from .series import EFunctionInput, InputValidationError


def q_to_json(q) -> str:
    return fmpq_str(q if isinstance(q, fmpq) else fmpq(q))


def q_from_json(v) -> fmpq:
    if isinstance(v, bool) or isinstance(v, float):
        raise InputValidationError(f"rational expected, got {v!r}", "operator", v)
    if isinstance(v, int):
        return fmpq(v)
    if isinstance(v, str):
        try:
            fr = Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise InputValidationError(f"malformed rational {v!r}", "operator", v) from None
        if "." in v or "e" in v.lower():
            raise InputValidationError(f"rationals must be written num/den, got {v!r}", "operator", v)
        return fmpq(fr.numerator, fr.denominator)
    raise InputValidationError(f"rational expected, got {v!r}", "operator", v)


def qpoly_to_json(p: fmpq_poly) -> list[str]:
    return [q_to_json(c) for c in p.coeffs()]


def qpoly_from_json(v) -> fmpq_poly:
    return fmpq_poly([q_from_json(c) for c in v])


# boxes are stored as exact dyadic midpoints plus an upper bound on the radius

def box_to_json(b: acb) -> dict:
    rad = box_radius(b)
    return {
        "re": q_to_json(dyadic_to_fmpq(b.real)),
        "im": q_to_json(dyadic_to_fmpq(b.imag)),
        "radius": q_to_json(dyadic_to_fmpq(arb(rad.upper()))),
    }


def box_from_json(d: dict) -> acb:
    re_, im_, rad = (q_from_json(d.get(k, "0")) for k in ("re", "im", "radius"))
    bits = max(64, *(x.p.bit_length() + x.q.bit_length() + 8 for x in (re_, im_, rad)))
    with ctx.workprec(bits):
        return acb(arb(re_, arb(rad)), arb(im_, arb(rad)))


def field_to_json(K: NumberField):
    if K.is_rational:
        return "QQ"
    return {"min_poly": qpoly_to_json(K.min_poly), "root": box_to_json(K.root())}


def field_from_json(v) -> NumberField:
    if v in (None, "QQ", "Q"):
        return QQ
    if not isinstance(v, dict) or "min_poly" not in v:
        raise InputValidationError(f"field must be \"QQ\" or {{min_poly, root}}, got {v!r}", "operator", v)
    p = qpoly_from_json(v["min_poly"])
    root = v.get("root")
    try:
        if root is None:
            return NumberField(p)
        return NumberField(p, box_from_json(root))
    except ValueError as e:
        raise InputValidationError(f"invalid number field: {e}", "operator", v) from None


def elem_to_json(x: KElement):
    if x.field.is_rational or x.is_rational():
        return q_to_json(x.poly[0] if x.poly.degree() >= 0 else fmpq(0))
    coords = [x.poly[i] for i in range(x.field.degree)]
    return [q_to_json(c) for c in coords]


def elem_from_json(K: NumberField, v) -> KElement:
    if isinstance(v, list):
        if len(v) > K.degree:
            raise InputValidationError(f"{len(v)} coordinates for a degree-{K.degree} field", "operator", v)
        return K([q_from_json(c) for c in v])
    return K(q_from_json(v))


def poly_to_json(p: KPoly) -> list:
    return [elem_to_json(c) for c in p.coeffs]


def poly_from_json(K: NumberField, v) -> KPoly:
    if not isinstance(v, list):
        return KPoly.constant(K, elem_from_json(K, v))
    return KPoly(K, [elem_from_json(K, c) for c in v])


def ratfun_to_json(r: KRatFun):
    if r.is_polynomial():
        return poly_to_json(r.num)
    return {"num": poly_to_json(r.num), "den": poly_to_json(r.den)}


def ratfun_from_json(K: NumberField, v) -> KRatFun:
    if isinstance(v, dict):
        den = poly_from_json(K, v["den"])
        if den.is_zero():
            raise InputValidationError("zero denominator", "operator", v)
        return KRatFun(poly_from_json(K, v["num"]), den)
    return KRatFun(poly_from_json(K, v))


def operator_to_json(L: DiffOp) -> list:
    """Coefficients of ``D^0, D^1, ...``."""
    return [ratfun_to_json(c) for c in L.coeffs]


def operator_from_json(K: NumberField, v) -> DiffOp:
    if not isinstance(v, list) or not v:
        raise InputValidationError("operator must be a nonempty list of coefficients", "operator", v)
    return DiffOp(K, [ratfun_from_json(K, c) for c in v])


def matrix_to_json(M) -> list:
    out = []
    for row in M:
        out.append([ratfun_to_json(x) if isinstance(x, KRatFun) else
                    poly_to_json(x) if isinstance(x, KPoly) else elem_to_json(x) for x in row])
    return out


def polymatrix_from_json(K: NumberField, v) -> list[list[KPoly]]:
    return [[poly_from_json(K, x) for x in row] for row in v]


def ratmatrix_from_json(K: NumberField, v) -> list[list[KRatFun]]:
    return [[ratfun_from_json(K, x) for x in row] for row in v]


def elemmatrix_from_json(K: NumberField, v) -> list[list[KElement]]:
    return [[elem_from_json(K, x) for x in row] for row in v]


def algebraic_to_json(a: AlgebraicNumber, digits: int = 20) -> dict:
    return {
        "min_poly": qpoly_to_json(a.defining_poly),
        "box": box_to_json(a.box),
        "approx": a.approx(digits),
    }


def algebraic_from_json(d: dict) -> AlgebraicNumber:
    return AlgebraicNumber(qpoly_from_json(d["min_poly"]), box_from_json(d["box"]))


# inputs

def input_to_json(inp: EFunctionInput) -> dict:
    return {
        "field": field_to_json(inp.field),
        "operator": operator_to_json(inp.operator),
        "initial_coeffs": [elem_to_json(c) for c in inp.initial_coeffs],
        "oracle": inp.oracle_flag,
    }


def input_from_json(d: dict) -> EFunctionInput:
    if not isinstance(d, dict):
        raise InputValidationError("input must be a JSON object", "operator", d)
    for key in ("operator", "initial_coeffs"):
        if key not in d:
            clause = "operator" if key == "operator" else "initial-coefficients"
            raise InputValidationError(f"missing field {key!r}", clause)
    if "oracle" not in d:
        raise InputValidationError("missing oracle flag: not guaranteed to be an E-function", "oracle")
    K = field_from_json(d.get("field", "QQ"))
    L = operator_from_json(K, d["operator"])
    coeffs = d["initial_coeffs"]
    if not isinstance(coeffs, list):
        raise InputValidationError("initial_coeffs must be a list", "initial-coefficients", coeffs)
    init = [elem_from_json(K, c) for c in coeffs]
    return EFunctionInput(K, L, init, d["oracle"])


def parse_input(path) -> EFunctionInput:
    """Read and validate an input file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InputValidationError(f"cannot read {path}: {e.strerror}", "operator", str(path)) from None
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputValidationError(f"{path} is not valid JSON: {e}", "operator", str(path)) from None
    return input_from_json(d)


__all__ = [
    "algebraic_from_json",
    "algebraic_to_json",
    "box_from_json",
    "box_to_json",
    "elem_from_json",
    "elem_to_json",
    "field_from_json",
    "field_to_json",
    "input_from_json",
    "input_to_json",
    "operator_from_json",
    "operator_to_json",
    "parse_input",
    "poly_from_json",
    "poly_to_json",
    "ratfun_from_json",
    "ratfun_to_json",
]
