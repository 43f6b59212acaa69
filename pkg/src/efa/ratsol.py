"""Rational solutions of first-order systems ``Y' = A Y`` over K(z).

The system is turned into a scalar equation with a cyclic vector ``u``:
``y = u.Y`` satisfies ``y^(k) = u_k.Y`` with ``u_{k+1} = u_k' + u_k A``, and
``Y = C^{-1} (y, y', ..., y^(r-1))`` where ``C`` stacks ``u_0..u_{r-1}``.
Rational solutions of the scalar equation are found by the classical route:
a denominator from local exponents at the finite singularities, then
polynomial solutions up to the degree allowed by the exponents at infinity.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from flint import fmpq_poly

from .arith import NumberField
from .linalg import k_nullspace, rf_inverse, rf_matmul, rf_matvec
from .operators import DiffOp, falling, integer_roots, op_mul
from .poly import KPoly, KRatFun, factor, poly_lcm


@dataclass
class LinearSystem:
    """``Y' = A Y`` with ``A`` a square matrix of rational functions."""

    A: list[list[KRatFun]]

    @property
    def dim(self) -> int:
        return len(self.A)

    @property
    def field(self) -> NumberField:
        return self.A[0][0].field

    @classmethod
    def companion(cls, L: DiffOp) -> LinearSystem:
        """System satisfied by the coefficient vector ``(Q_0..Q_{r-1})`` of an
        inhomogeneous relation derived from ``L``: ``Q_j' = P_j Q_{r-1} - Q_{j-1}``
        where ``P_j`` are the coefficients of the monic form of ``L``."""
        K = L.field
        r = L.order
        P = L.monic().coeffs
        zero = KRatFun.zero(K)
        A = [[zero] * r for _ in range(r)]
        for j in range(r):
            if j >= 1:
                A[j][j - 1] = KRatFun.constant(K, -1)
            A[j][r - 1] = P[j]
        return cls(A)

    def residual(self, Y: list[KRatFun]) -> list[KRatFun]:
        AY = rf_matvec(self.A, Y)
        return [y.derivative() - ay for y, ay in zip(Y, AY)]

    def is_solution(self, Y: list[KRatFun]) -> bool:
        return all(x.is_zero() for x in self.residual(Y))


def _common_denominator(rows) -> KPoly:
    K = rows[0][0].field
    den = KPoly.constant(K, 1)
    for row in rows:
        for x in row:
            den = poly_lcm(den, x.den)
    return den


# scalar equations

def _valuation(p: KPoly, q: KPoly) -> tuple[int, KPoly]:
    v = 0
    while True:
        quo, rem = divmod(p, q)
        if not rem.is_zero():
            return v, p
        p, v = quo, v + 1


def local_exponents_integer(a: list[KPoly], q: KPoly) -> list[int]:
    """Integer roots of the indicial polynomial at the roots of an irreducible q.

    ``a`` are the polynomial coefficients of the operator.  The indicial
    coefficients are computed modulo ``q``, i.e. in ``K[z]/(q)``, so no field
    extension is needed.
    """
    K = q.field
    vals = []
    for ai in a:
        if ai.is_zero():
            vals.append(None)
        else:
            vals.append(_valuation(ai, q))
    shift = min(vv[0] - i for i, vv in enumerate(vals) if vv is not None)
    qd = q.derivative()
    e = KPoly.z(K)
    # ind(e) = sum_t z^t * c_t(e), c_t in K[e]
    ct: dict[int, KPoly] = {}
    for i, vv in enumerate(vals):
        if vv is None or vv[0] - i != shift:
            continue
        v, rest = vv
        coef = (rest * qd ** v) % q
        fe = falling(e, i)
        for t, c in enumerate(coef.coeffs):
            if not c.is_zero():
                ct[t] = ct.get(t, KPoly(K, [])) + fe * c
    # integer e with every c_t(e) = 0: gcd of all rational coordinate polynomials
    g = fmpq_poly([])
    for c in ct.values():
        for s in range(K.degree):
            g = g.gcd(fmpq_poly([x.poly[s] for x in c.coeffs]))
    if g.is_zero():  # pragma: no cover - the indicial polynomial is nonzero
        raise ArithmeticError("vanishing indicial polynomial")
    if g.degree() < 1:
        return []
    return sorted({int(r.p) for r, _ in g.roots() if r.q == 1})


def scalar_denominator(L: DiffOp, restrict_to: KPoly | None = None) -> KPoly:
    """Denominator bound for rational solutions of a scalar operator."""
    Lp = L.primitive()
    a = Lp.poly_coeffs()
    K = L.field
    D = KPoly.constant(K, 1)
    lead = a[-1]
    for q, _ in factor(lead):
        if restrict_to is not None and not (restrict_to % q).is_zero():
            continue
        ints = local_exponents_integer(a, q)
        lo = min(ints) if ints else 0
        if lo < 0:
            D = D * q ** (-lo)
    return D


def polynomial_solutions(L: DiffOp) -> list[KPoly]:
    """Basis of the polynomial solutions of an operator."""
    Lp = L.primitive()
    b = Lp.poly_coeffs()
    K = L.field
    w = max(bk.degree - k for k, bk in enumerate(b) if not bk.is_zero())
    e = KPoly.z(K)
    ind = KPoly(K, [])
    for k, bk in enumerate(b):
        if not bk.is_zero() and bk.degree - k == w:
            ind = ind + falling(e, k) * bk.lc()
    roots = [x for x in integer_roots(ind) if x >= 0]
    if not roots:
        return []
    E = max(roots)
    # columns: x_0..x_E; rows: coefficients of z^t in L(z^e)
    images = [Lp.apply(KRatFun(KPoly(K, [0] * ex + [1]))).num for ex in range(E + 1)]
    T = max((p.degree for p in images), default=-1) + 1
    if T <= 0:
        return [KPoly(K, [0] * ex + [1]) for ex in range(E + 1)]
    rows = [[images[ex][t] for ex in range(E + 1)] for t in range(T)]
    kernel = k_nullspace(rows, K, E + 1)
    return [KPoly(K, v) for v in kernel]


def rational_solutions_scalar(L: DiffOp) -> list[KRatFun]:
    """Basis of the rational solutions of a scalar operator."""
    K = L.field
    D = scalar_denominator(L)
    if D.degree <= 0:
        return [KRatFun(p) for p in polynomial_solutions(L)]
    Dinv = DiffOp(K, [KRatFun(KPoly.constant(K, 1), D)])
    Lt = op_mul(L, Dinv)
    return [KRatFun(p, D) for p in polynomial_solutions(Lt)]


# cyclic vectors

@dataclass
class CyclicReduction:
    u: list[KRatFun]
    C: list[list[KRatFun]]
    Cinv: list[list[KRatFun]]
    operator: DiffOp


def _cyclic_candidates(r: int, K: NumberField):
    zero, one = KRatFun.zero(K), KRatFun.constant(K, 1)
    order = [r - 1] + list(range(r - 1))
    for j in order:
        yield [one if i == j else zero for i in range(r)]
    rng = random.Random(20240601)
    z = KPoly.z(K)
    while True:
        yield [KRatFun(z * rng.randint(-3, 3) + rng.randint(-5, 5)) for _ in range(r)]


def cyclic_reduction(sys: LinearSystem, max_tries: int = 64) -> CyclicReduction:
    K = sys.field
    r = sys.dim
    A = sys.A
    for tries, u in enumerate(_cyclic_candidates(r, K)):
        if tries >= max_tries:
            break
        rows = [u]
        for _ in range(r):
            prev = rows[-1]
            uA = rf_matmul([prev], A)[0]
            rows.append([p.derivative() + x for p, x in zip(prev, uA)])
        C = rows[:r]
        try:
            Cinv = rf_inverse(C)
        except ZeroDivisionError:
            continue
        c = rf_matmul([rows[r]], Cinv)[0]
        op = DiffOp(K, [-x for x in c] + [KRatFun.constant(K, 1)])
        return CyclicReduction(u, C, Cinv, op)
    raise ArithmeticError("no cyclic vector found")  # pragma: no cover


def _pole_order(x: KRatFun, q: KPoly) -> int:
    if x.is_zero():
        return 0
    v, _ = _valuation(x.den, q)
    return v


def denominator_bound(sys: LinearSystem) -> KPoly:
    """``D`` with ``D*Y`` polynomial for every rational solution ``Y``.

    Only poles of ``A`` can be poles of ``Y``.  At each of them the bound is the
    pole order allowed for ``y = u.Y`` plus the derivatives taken, plus the
    worst pole of ``C^{-1}``.
    """
    K = sys.field
    den = _common_denominator(sys.A)
    if den.degree <= 0:
        return KPoly.constant(K, 1)
    red = cyclic_reduction(sys)
    Dy = scalar_denominator(red.operator)
    r = sys.dim
    D = KPoly.constant(K, 1)
    for q, _ in factor(den):
        ky, _ = _valuation(Dy, q)
        kc = max(_pole_order(x, q) for row in red.Cinv for x in row)
        k = (ky + r - 1 if ky > 0 else 0) + kc
        if k > 0:
            D = D * q ** k
    return D


def rational_solution_basis(sys: LinearSystem) -> list[list[KRatFun]]:
    """Basis of ``{Y in K(z)^r : Y' = A Y}``; every vector is checked exactly."""
    K = sys.field
    r = sys.dim
    if all(x.is_zero() for row in sys.A for x in row):
        one, zero = KRatFun.constant(K, 1), KRatFun.zero(K)
        return [[one if i == j else zero for i in range(r)] for j in range(r)]
    red = cyclic_reduction(sys)
    out = []
    for y in rational_solutions_scalar(red.operator):
        derivs = [y]
        for _ in range(r - 1):
            derivs.append(derivs[-1].derivative())
        Y = rf_matvec(red.Cinv, derivs)
        if not sys.is_solution(Y):  # pragma: no cover - exact reduction
            raise ArithmeticError("rational solution failed the substitution check")
        out.append(Y)
    return out


__all__ = [
    "CyclicReduction",
    "LinearSystem",
    "cyclic_reduction",
    "denominator_bound",
    "local_exponents_integer",
    "polynomial_solutions",
    "rational_solution_basis",
    "rational_solutions_scalar",
    "scalar_denominator",
]
