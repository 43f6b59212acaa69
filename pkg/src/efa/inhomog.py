"""Minimal inhomogeneous equation ``sum_j Q_j f^(j) = c`` and its system form.

With ``L_min`` of order r, either ``L_min f = 0`` is already minimal among
inhomogeneous relations (s = r, c = 0), or the companion system has a rational
solution ``(Q_0..Q_{r-1})``, giving a relation of order s = r - 1 whose
constant is read off the Laurent expansion at 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import KElement
from .operators import DiffOp
from .poly import KPoly, KRatFun, poly_gcd, poly_lcm
from .ratsol import LinearSystem, rational_solution_basis
from .series import InternalInconsistencyError, LazySeries, combination_constant_term, combination_laurent


@dataclass
class InhomEq:
    """``sum_{j<=s} Q_j f^(j) = c`` and the cleared tuple ``u_0..u_{s+1}``.

    The cleared form reads ``u_0 f^(s) = u_1 + sum_{j<s} u_{j+2} f^(j)``
    with ``u_0`` monic and ``gcd(u_0, ..., u_{s+1}) = 1``.
    """

    s: int
    Q: list[KRatFun]
    c: KElement
    u: list[KPoly]
    homogeneous_operator: DiffOp

    @property
    def u0(self) -> KPoly:
        return self.u[0]

    @property
    def field(self):
        return self.u[0].field


@dataclass
class Verdict:
    kind: str  # "polynomial" or "transcendental"
    polynomial: KPoly | None = None


@dataclass
class SystemMatrix:
    """``(0, f', ..., f^(s))^T = B (1, f, ..., f^(s-1))^T``."""

    B: list[list[KRatFun]]
    u: list[KPoly]

    @property
    def dim(self) -> int:
        return len(self.B)

    @property
    def u0(self) -> KPoly:
        return self.u[0]


def _normalize_tuple(Q: list[KRatFun], c: KElement) -> list[KPoly]:
    K = Q[0].field
    s = len(Q) - 1
    D = KPoly.constant(K, 1)
    for q in Q:
        D = poly_lcm(D, q.den)
    polys = [q.num * D.exact_div(q.den) for q in Q]
    u = [polys[s], D * c] + [-polys[j] for j in range(s)]
    g = KPoly(K, [])
    for p in u:
        g = poly_gcd(g, p)
    u = [p.exact_div(g) for p in u]
    inv = u[0].lc().inverse()
    return [p * inv for p in u]


def _pick_solution(basis: list[list[KRatFun]]) -> list[KRatFun]:
    def key(Y):
        den = KPoly.constant(Y[0].field, 1)
        for y in Y:
            den = poly_lcm(den, y.den)
        return (den.degree, [repr(y) for y in Y])

    return min(basis, key=key)


def minimal_inhomogeneous(L_min: DiffOp, f: LazySeries, window: int = 10) -> InhomEq:
    """Minimal inhomogeneous relation for f given its minimal operator."""
    L = L_min.primitive()
    r = L.order
    basis = rational_solution_basis(LinearSystem.companion(L))
    if not basis:
        Q = [KRatFun(p) for p in L.poly_coeffs()]
        c = L.field.zero
        return InhomEq(r, Q, c, _normalize_tuple(Q, c), L)
    Y = _pick_solution(basis)
    c = combination_constant_term(Y, f, window)
    if c.is_zero():
        raise InternalInconsistencyError(
            "rational solution gives a homogeneous relation below the minimal order")
    return InhomEq(r - 1, Y, c, _normalize_tuple(Y, c), L)


def transcendence_verdict(eq: InhomEq) -> Verdict:
    if eq.s >= 1:
        return Verdict("transcendental")
    q = KRatFun.constant(eq.field, eq.c) / eq.Q[0]
    if not q.is_polynomial():
        raise InternalInconsistencyError("an E-function that is rational must be a polynomial")
    return Verdict("polynomial", q.num)


def normalize(eq: InhomEq) -> SystemMatrix:
    """Matrix ``B`` of the first-order system attached to the relation (s >= 1)."""
    if eq.s < 1:
        raise ValueError("no system for a polynomial function")
    K = eq.field
    s = eq.s
    u0 = eq.u[0]
    zero = KRatFun.zero(K)
    B = [[zero] * (s + 1) for _ in range(s + 1)]
    for i in range(1, s):
        B[i][i + 1] = KRatFun.constant(K, 1)
    B[s] = [KRatFun(eq.u[k], u0) for k in range(1, s + 2)]
    return SystemMatrix(B, eq.u)


def relation_residual(eq: InhomEq, f: LazySeries, order: int) -> list[KElement]:
    """Laurent coefficients ``-v..order`` of ``sum Q_j f^(j) - c``."""
    coeffs = combination_laurent(eq.Q, f, -_max_pole_at_zero(eq.Q), order)
    coeffs[0] = coeffs[0] - eq.c
    return [coeffs[k] for k in sorted(coeffs)]


def _max_pole_at_zero(Q: list[KRatFun]) -> int:
    return max((q.den.valuation() for q in Q), default=0)


__all__ = [
    "InhomEq",
    "SystemMatrix",
    "Verdict",
    "minimal_inhomogeneous",
    "normalize",
    "relation_residual",
    "transcendence_verdict",
]
