"""Independent reference data for the tests.

Taylor coefficients come from closed forms summed with ``fractions``; the
exponential-polynomial family is checked against a sympy evaluation of the
Lindemann-Weierstrass description of its algebraic values.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import sympy as sp


def apery_coefficients(n_max: int) -> list[Fraction]:
    """f_n = (sum_k C(n,k)^2 C(n+k,n)) / n!."""
    return [Fraction(sum(comb(n, k) ** 2 * comb(n + k, n) for k in range(n + 1)), factorial(n))
            for n in range(n_max + 1)]


def central_binomial_coefficients(n_max: int) -> list[Fraction]:
    """f = sum_n n^2 C(2n,n)/(n+1)^2 (z/2)^(n+1)/n!, listed by power of z."""
    out = [Fraction(0)]
    for n in range(n_max):
        out.append(Fraction(n * n * comb(2 * n, n), (n + 1) ** 2) * Fraction(1, 2 ** (n + 1) * factorial(n)))
    return out


def two_exponentials_coefficients(a: int, b: int, n_max: int) -> list[Fraction]:
    """f = z^a e^{az} + z^b e^{bz}."""
    out = []
    for n in range(n_max + 1):
        s = Fraction(0)
        for c in (a, b):
            if n >= c:
                s += Fraction(c ** (n - c), factorial(n - c))
        out.append(s)
    return out


def exp_coefficients(n_max: int) -> list[Fraction]:
    return [Fraction(1, factorial(n)) for n in range(n_max + 1)]


def shifted_exp_coefficients(n_max: int) -> list[Fraction]:
    """(z - 1) e^z."""
    e = exp_coefficients(n_max)
    return [(e[n - 1] if n else 0) - e[n] for n in range(n_max + 1)]


# exponential polynomials  f = sum_i q_i(z) e^{lambda_i z}

Z = sp.Symbol("z")

FIELDS = {
    "QQ": None,
    "QQ(i)": sp.I,
    "QQ(sqrt2)": sp.sqrt(2),
}


@dataclass
class ExpPoly:
    field: str
    lambdas: list[sp.Expr]
    qs: list[sp.Expr]  # polynomials in Z

    @property
    def gen(self):
        return FIELDS[self.field]

    def coords(self, e: sp.Expr) -> tuple[Fraction, Fraction]:
        """(a, b) with e = a + b*gen."""
        e = sp.expand(e)
        if self.gen is None:
            r = sp.Rational(e)
            return Fraction(int(r.p), int(r.q)), Fraction(0)
        b = sp.Rational(e.coeff(self.gen))
        a = sp.Rational(sp.expand(e - b * self.gen))
        return Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q))

    def taylor(self, n_max: int) -> list[sp.Expr]:
        out = []
        polys = [sp.Poly(q, Z) for q in self.qs]
        for n in range(n_max + 1):
            s = sp.Integer(0)
            for lam, q in zip(self.lambdas, polys):
                for (k,), c in q.terms():
                    if n >= k:
                        s += c * lam ** (n - k) / sp.factorial(n - k)
            out.append(sp.expand(s))
        return out


def random_exp_poly(rng: random.Random) -> ExpPoly:
    name = rng.choice(list(FIELDS))
    gen = FIELDS[name]

    def elt(lo=-2, hi=2):
        a = rng.randint(lo, hi)
        return sp.Integer(a) + (rng.randint(-1, 1) * gen if gen is not None else 0)

    n_terms = rng.randint(1, 3)
    lambdas: list[sp.Expr] = []
    if rng.random() < 0.4:
        lambdas.append(sp.Integer(0))
    while len(lambdas) < n_terms or all(l == 0 for l in lambdas):
        lam = sp.expand(elt())
        if lam != 0 and lam not in lambdas:
            lambdas.append(lam)
    shared = rng.random() < 0.5
    root = elt()
    qs = []
    for lam in lambdas:
        if shared and lam != 0:
            deg = rng.randint(0, 1)
            q = (Z - root) * sum(elt(-3, 3) * Z ** k for k in range(deg)) if deg else (Z - root)
            if deg and sp.expand(q) == 0:
                q = Z - root
        else:
            deg = rng.randint(0, 2)
            q = sum(elt(-3, 3) * Z ** k for k in range(deg)) + elt(1, 3) * Z ** deg
        q = sp.expand(q)
        if q == 0:
            q = sp.Integer(1)
        qs.append(q)
    return ExpPoly(name, lambdas, qs)


def lw_oracle(ep: ExpPoly) -> list[tuple[sp.Expr, sp.Expr]]:
    """Algebraic points and values: alpha = 0, plus every common zero of the
    q_i with lambda_i != 0, valued by the sum of the q_i with lambda_i = 0."""
    nonzero = [q for q, l in zip(ep.qs, ep.lambdas) if l != 0]
    constant = sum((q for q, l in zip(ep.qs, ep.lambdas) if l == 0), sp.Integer(0))
    out = [(sp.Integer(0), sp.expand(sum(q.subs(Z, 0) for q in ep.qs)))]
    g = nonzero[0]
    for q in nonzero[1:]:
        g = sp.gcd(g, q, extension=ep.gen) if ep.gen is not None else sp.gcd(g, q)
    g = sp.expand(g)
    if sp.Poly(g, Z).degree() >= 1:
        for r in sp.roots(sp.Poly(g, Z, extension=ep.gen) if ep.gen is not None else sp.Poly(g, Z)):
            r = sp.nsimplify(sp.simplify(r))
            if r == 0:
                continue
            out.append((r, sp.simplify(sp.expand(constant.subs(Z, r)))))
    return out


def sympy_to_algebraic(e: sp.Expr):
    """An efa AlgebraicNumber equal to the sympy number ``e``."""
    from flint import fmpq, fmpq_poly

    from efa.arith import AlgebraicNumber

    x = sp.Symbol("x")
    m = sp.Poly(sp.minimal_polynomial(e, x), x)
    coeffs = [sp.Rational(c) for c in reversed(m.all_coeffs())]
    p = fmpq_poly([fmpq(int(c.p), int(c.q)) for c in coeffs])
    return AlgebraicNumber(p, complex(sp.N(e, 40)))


def efa_field(name: str):
    from efa.arith import QQ, NumberField

    if name == "QQ":
        return QQ
    if name == "QQ(i)":
        return NumberField([1, 0, 1], 1j)
    return NumberField([-2, 0, 1], 1.4142)


def to_efa_input(ep: ExpPoly, extra: int = 4):
    """EFunctionInput for ``ep`` with operator prod (D - lambda_i)^(deg q_i + 1)."""
    from efa.operators import DiffOp, op_mul
    from efa.series import EFunctionInput

    K = efa_field(ep.field)

    def elt(e):
        a, b = ep.coords(e)
        return K([a, b][: K.degree]) if K.degree > 1 else K([a])

    L = DiffOp(K, [K.one])
    for lam, q in zip(ep.lambdas, ep.qs):
        factor = DiffOp(K, [-elt(lam), K.one])
        for _ in range(sp.Poly(q, Z).degree() + 1):
            L = op_mul(L, factor)
    init = [elt(c) for c in ep.taylor(L.order + extra)]
    return EFunctionInput(K, L, init)
