"""Exact Taylor expansions of E-functions given by an operator and a seed."""

from __future__ import annotations

import threading

from .arith import KElement, NumberField
from .operators import DiffOp, MissingInitialCoefficient, Recurrence, to_recurrence
from .poly import KPoly, KRatFun, poly_lcm, series_div


class InputValidationError(ValueError):
    """Rejected input; ``clause`` names the violated requirement.

    Clauses: ``"operator"`` (explicit annihilating operator over a number
    field), ``"initial-coefficients"`` (enough consistent Taylor
    coefficients), ``"oracle"`` (E-function property guaranteed).
    """

    def __init__(self, message: str, clause: str = "operator", datum=None):
        super().__init__(f"[{clause}] {message}")
        self.clause = clause
        self.datum = datum


class InternalInconsistencyError(RuntimeError):
    """An identity that must hold by construction failed; this is a bug."""


class EFunctionInput:
    """An E-function presented by an annihilating operator and Taylor seed.

    ``initial_coeffs`` are raw Taylor coefficients ``f_n`` (not ``n! f_n``).
    The E-function property itself is taken on trust (``oracle_flag``).
    """

    def __init__(self, field: NumberField, operator: DiffOp, initial_coeffs, oracle_flag: bool = True):
        if operator.is_zero():
            raise InputValidationError("operator must be nonzero", "operator")
        if oracle_flag is not True:
            raise InputValidationError("not guaranteed to be an E-function (oracle flag is not true)",
                                       "oracle", oracle_flag)
        self.field = field
        self.operator = operator.primitive()
        self.initial_coeffs = [field(c) for c in initial_coeffs]
        self.oracle_flag = oracle_flag
        self.recurrence: Recurrence = to_recurrence(self.operator)
        m = self.recurrence.m
        if len(self.initial_coeffs) < m:
            raise InputValidationError(
                f"initial segment has {len(self.initial_coeffs)} coefficients but the recurrence "
                f"start-up length m = max(d, largest nonnegative integer root of p_0 + 1) is {m}",
                "initial-coefficients", len(self.initial_coeffs))
        bad = self.recurrence.check(self.initial_coeffs)
        if bad is not None:
            raise InputValidationError(
                f"initial coefficient f_{bad} is inconsistent with the operator",
                "initial-coefficients", bad)

    def series(self) -> RecurrenceSeries:
        return RecurrenceSeries(self)


class LazySeries:
    """A power series whose coefficients are produced on demand."""

    field: NumberField

    def coefficients(self, upto: int) -> list[KElement]:
        raise NotImplementedError

    def coefficient(self, n: int) -> KElement:
        return self.coefficients(n)[n]

    def derivative(self, j: int = 1) -> LazySeries:
        return DerivativeSeries(self, j) if j else self


class ExplicitSeries(LazySeries):
    """Polynomial viewed as a series (coefficients beyond its degree are zero)."""

    def __init__(self, field: NumberField, coeffs):
        self.field = field
        self._c = [field(c) for c in coeffs]

    def coefficients(self, upto: int) -> list[KElement]:
        return [self._c[n] if n < len(self._c) else self.field.zero for n in range(upto + 1)]


class RecurrenceSeries(LazySeries):
    """Series of an ``EFunctionInput``, extended by its recurrence."""

    def __init__(self, source: EFunctionInput):
        self.source = source
        self.field = source.field
        self._cache = list(source.initial_coeffs)
        self._lock = threading.Lock()

    def coefficients(self, upto: int) -> list[KElement]:
        if upto < 0:
            raise ValueError("upto must be >= 0")
        with self._lock:
            if len(self._cache) <= upto:
                try:
                    self.source.recurrence.extend(self._cache, upto)
                except MissingInitialCoefficient as e:
                    raise InputValidationError(str(e), "initial-coefficients", e.index) from None
            return self._cache[: upto + 1]


class DerivativeSeries(LazySeries):
    def __init__(self, base: LazySeries, j: int):
        self.base = base
        self.j = j
        self.field = base.field

    def coefficients(self, upto: int) -> list[KElement]:
        c = self.base.coefficients(upto + self.j)
        out = []
        for n in range(upto + 1):
            f = 1
            for t in range(1, self.j + 1):
                f *= n + t
            out.append(c[n + self.j] * f)
        return out


class PolyCombination(LazySeries):
    """``sum_j P_j(z) g_j`` for polynomials ``P_j`` and series ``g_j``."""

    def __init__(self, polys: list[KPoly], series: list[LazySeries]):
        self.polys = polys
        self.series = series
        self.field = series[0].field

    def coefficients(self, upto: int) -> list[KElement]:
        K = self.field
        out = [K.zero] * (upto + 1)
        for P, g in zip(self.polys, self.series):
            if P.is_zero():
                continue
            c = g.coefficients(upto)
            for k, pk in enumerate(P.coeffs):
                if pk.is_zero() or k > upto:
                    continue
                for n in range(upto + 1 - k):
                    if not c[n].is_zero():
                        out[n + k] = out[n + k] + pk * c[n]
        return out


def coefficients(f: LazySeries, upto: int) -> list[KElement]:
    return f.coefficients(upto)


def derivative_streams(f: LazySeries, r: int) -> list[LazySeries]:
    """``[f, f', ..., f^(r)]``."""
    return [f] + [DerivativeSeries(f, j) for j in range(1, r + 1)]


def combination_laurent(Q: list[KRatFun], f: LazySeries, lo: int, hi: int) -> dict[int, KElement]:
    """Laurent coefficients ``lo..hi`` at 0 of ``sum_j Q_j f^(j)``."""
    K = f.field
    den = KPoly.constant(K, 1)
    for q in Q:
        den = poly_lcm(den, q.den)
    v = den.valuation()
    polys = [q.num * den.exact_div(q.den) for q in Q]
    h = PolyCombination(polys, derivative_streams(f, len(Q) - 1))
    # sum = h / (z^v * dt) with dt(0) != 0
    dt = list(den.coeffs[v:])
    need = hi + v
    if need < 0:
        return {k: K.zero for k in range(lo, hi + 1)}
    hs = h.coefficients(need)
    quo = series_div(hs, dt, need + 1, K)
    return {k: (quo[k + v] if k + v >= 0 else K.zero) for k in range(lo, hi + 1)}


def combination_constant_term(Q: list[KRatFun], f: LazySeries, window: int = 10) -> KElement:
    """Constant value of ``sum_j Q_j f^(j)``, known a priori to be constant.

    The polar part and the next ``window`` coefficients are checked to vanish.
    """
    K = f.field
    den = KPoly.constant(K, 1)
    for q in Q:
        den = poly_lcm(den, q.den)
    v = den.valuation()
    coeffs = combination_laurent(Q, f, -v, window)
    for k, c in coeffs.items():
        if k != 0 and not c.is_zero():
            raise InternalInconsistencyError(
                f"combination is not constant: Laurent coefficient {k} is {c}")
    return coeffs[0]


__all__ = [
    "DerivativeSeries",
    "EFunctionInput",
    "ExplicitSeries",
    "InputValidationError",
    "InternalInconsistencyError",
    "LazySeries",
    "PolyCombination",
    "RecurrenceSeries",
    "coefficients",
    "combination_constant_term",
    "combination_laurent",
    "derivative_streams",
]
