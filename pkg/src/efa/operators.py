"""Linear differential operators over K(z) and their coefficient recurrences.

``DiffOp`` holds rational-function coefficients so that right division stays
inside the class.  Operators handed to users are cleared to polynomial,
primitive form with :meth:`DiffOp.primitive`.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from flint import fmpq_poly

from .arith import KElement, NumberField
from .linalg import rf_rank_nullspace
from .poly import KPoly, KRatFun, as_ratfun, poly_gcd, poly_lcm


class DiffOp:
    """``sum a_i(z) (d/dz)^i`` with coefficients in K(z), lowest order first."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs):
        cs = [as_ratfun(c, field) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def d(cls, field: NumberField) -> DiffOp:
        return cls(field, [0, 1])

    @classmethod
    def from_poly_lists(cls, field: NumberField, rows) -> DiffOp:
        """Build from nested lists: ``rows[i]`` are the z-coefficients of a_i."""
        return cls(field, [KPoly(field, [field(c) for c in row]) for row in rows])

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def degree(self) -> int:
        """Largest z-degree among the coefficients (polynomial operators)."""
        return max((c.num.degree for c in self.coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_polynomial(self) -> bool:
        return all(c.is_polynomial() for c in self.coeffs)

    def lc(self) -> KRatFun:
        return self.coeffs[-1]

    def __getitem__(self, i: int) -> KRatFun:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return KRatFun.zero(self.field)

    def poly_coeffs(self) -> list[KPoly]:
        if not self.is_polynomial():
            raise ValueError("operator has non-polynomial coefficients")
        return [c.num for c in self.coeffs]

    def primitive(self) -> DiffOp:
        """Clear denominators and content; the leading coefficient becomes monic."""
        if self.is_zero():
            return self
        den = KPoly.constant(self.field, 1)
        for c in self.coeffs:
            den = poly_lcm(den, c.den)
        polys = [c.num * den.exact_div(c.den) for c in self.coeffs]
        g = KPoly(self.field, [])
        for p in polys:
            g = poly_gcd(g, p)
        polys = [p.exact_div(g) for p in polys]
        inv = polys[-1].lc().inverse()
        return DiffOp(self.field, [p * inv for p in polys])

    def monic(self) -> DiffOp:
        """Divide by the leading coefficient."""
        inv = self.lc().inverse()
        return DiffOp(self.field, [c * inv for c in self.coeffs])

    def __add__(self, other: DiffOp) -> DiffOp:
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOp(self.field, [self[i] + other[i] for i in range(n)])

    def __neg__(self) -> DiffOp:
        return DiffOp(self.field, [-c for c in self.coeffs])

    def __sub__(self, other: DiffOp) -> DiffOp:
        return self + (-other)

    def scale(self, r) -> DiffOp:
        """Left multiplication by a rational function."""
        r = as_ratfun(r, self.field)
        return DiffOp(self.field, [r * c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return op_mul(self, other)
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def same_up_to_factor(self, other: DiffOp) -> bool:
        """Equality after dividing both by their leading coefficients."""
        if self.order != other.order:
            return False
        return self.monic() == other.monic()

    def apply(self, y) -> KRatFun:
        """Apply to a rational function."""
        y = as_ratfun(y, self.field)
        acc = KRatFun.zero(self.field)
        for c in self.coeffs:
            if not c.is_zero():
                acc = acc + c * y
            y = y.derivative()
        return acc

    def apply_series(self, s: list[KElement]) -> list[KElement]:
        """Apply a polynomial operator to a truncated power series.

        The result keeps ``len(s) - order`` valid coefficients.
        """
        K = self.field
        n = len(s) - max(self.order, 0)
        if n <= 0:
            return []
        out = [K.zero] * n
        cur = list(s)
        for c in self.coeffs:
            p = c.num
            if not c.is_polynomial():
                raise ValueError("series application needs polynomial coefficients")
            for k, pk in enumerate(p.coeffs):
                if pk.is_zero():
                    continue
                for t in range(n - k):
                    if t < len(cur) and not cur[t].is_zero():
                        out[t + k] = out[t + k] + pk * cur[t]
            cur = [cur[t + 1] * (t + 1) for t in range(len(cur) - 1)]
        return out

    def __repr__(self) -> str:
        return self.str()

    def str(self, var: str = "z", dvar: str = "D") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            mon = "" if i == 0 else (dvar if i == 1 else f"{dvar}^{i}")
            cs = repr(c)
            if not mon:
                parts.append(f"({cs})" if "+" in cs or " - " in cs else cs)
            elif cs == "1":
                parts.append(mon)
            else:
                parts.append(f"({cs})*{mon}")
        return " + ".join(parts)


def op_mul(a: DiffOp, b: DiffOp) -> DiffOp:
    """Product in the Ore algebra, using ``D*r = r*D + r'``."""
    K = a.field
    out = [KRatFun.zero(K) for _ in range(max(a.order + b.order + 1, 0))]
    if a.is_zero() or b.is_zero():
        return DiffOp(K, [])
    # derivatives of b's coefficients, computed once
    derivs = []
    for c in b.coeffs:
        ds = [c]
        for _ in range(a.order):
            ds.append(ds[-1].derivative())
        derivs.append(ds)
    for i, ai in enumerate(a.coeffs):
        if ai.is_zero():
            continue
        for j in range(len(b.coeffs)):
            for k in range(i + 1):
                d = derivs[j][k]
                if d.is_zero():
                    continue
                out[i + j - k] = out[i + j - k] + ai * d * comb(i, k)
    return DiffOp(K, out)


def op_right_divide(a: DiffOp, b: DiffOp) -> tuple[DiffOp, DiffOp]:
    """``(q, r)`` with ``a = q*b + r`` and ``order(r) < order(b)``."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero operator")
    K = a.field
    q = [KRatFun.zero(K) for _ in range(max(a.order - b.order + 1, 0))]
    r = a
    blc_inv = b.lc().inverse()
    while not r.is_zero() and r.order >= b.order:
        s = r.order - b.order
        t = r.lc() * blc_inv
        q[s] = q[s] + t
        term = DiffOp(K, [0] * s + [t])
        r = r - op_mul(term, b)
    return DiffOp(K, q), r


def rational_remainder(a: DiffOp, b: DiffOp) -> DiffOp:
    return op_right_divide(a, b)[1]


def falling(n: KPoly, i: int) -> KPoly:
    """Falling factorial ``n (n-1) ... (n-i+1)`` as a polynomial in n."""
    K = n.field
    out = KPoly.constant(K, 1)
    for t in range(i):
        out = out * (n - t)
    return out


def integer_roots(p: KPoly) -> list[int]:
    """Integer roots of a polynomial over K."""
    if p.is_zero():
        raise ValueError("zero polynomial has every integer as a root")
    K = p.field
    if K.degree == 1:
        q = p.to_qpoly()
    else:
        q = fmpq_poly([])
        for t in range(K.degree):
            q = q.gcd(fmpq_poly([c.poly[t] for c in p.coeffs]))
        if q.is_zero():  # pragma: no cover
            raise ValueError("zero polynomial")
    if q.degree() < 1:
        return []
    return sorted({int(r.p) for r, _ in q.roots() if r.q == 1})


@dataclass
class Recurrence:
    """``sum_{j=0}^{d} p_j(n) c_{n-j} = 0`` for every n >= 0 (c_k = 0 for k < 0)."""

    field: NumberField
    poly_coeffs: list[KPoly]
    required_initial_length: int

    @property
    def order(self) -> int:
        return len(self.poly_coeffs) - 1

    @property
    def m(self) -> int:
        return self.required_initial_length

    def residual(self, c: list[KElement], n: int) -> KElement:
        K = self.field
        acc = K.zero
        for j, p in enumerate(self.poly_coeffs):
            if n - j >= 0 and not p.is_zero():
                acc = acc + p(K(n)) * c[n - j]
        return acc

    def check(self, c: list[KElement]) -> int | None:
        """First index n < len(c) where the recurrence fails, or None."""
        for n in range(len(c)):
            if not self.residual(c, n).is_zero():
                return n
        return None

    def extend(self, c: list[KElement], upto: int) -> list[KElement]:
        """Extend ``c`` in place to indices ``0..upto``."""
        K = self.field
        p0 = self.poly_coeffs[0]
        for n in range(len(c), upto + 1):
            lead = p0(K(n))
            if lead.is_zero():
                raise MissingInitialCoefficient(n)
            acc = K.zero
            nk = K(n)
            for j in range(1, len(self.poly_coeffs)):
                if n - j < 0:
                    break
                pj = self.poly_coeffs[j]
                if not pj.is_zero():
                    acc = acc + pj(nk) * c[n - j]
            c.append(-acc / lead)
        return c


class MissingInitialCoefficient(ValueError):
    def __init__(self, index: int):
        super().__init__(f"initial coefficient f_{index} is not determined by the recurrence and must be supplied")
        self.index = index


def to_recurrence(L: DiffOp) -> Recurrence:
    """Recurrence satisfied by the Taylor coefficients of power-series solutions."""
    if L.is_zero():
        raise ValueError("zero operator")
    L = L.primitive() if not L.is_polynomial() else L
    K = L.field
    terms = []
    for i, c in enumerate(L.coeffs):
        for k, a in enumerate(c.num.coeffs):
            if not a.is_zero():
                terms.append((i, k, a))
    sigma = max(i - k for i, k, _ in terms)
    low = min(i - k for i, k, _ in terms)
    d = sigma - low
    n = KPoly.z(K)
    ps = [KPoly(K, []) for _ in range(d + 1)]
    for i, k, a in terms:
        j = sigma - (i - k)
        ps[j] = ps[j] + falling(n - j, i) * a
    roots = [g for g in integer_roots(ps[0]) if g >= 0]
    m = max(d, max(roots) + 1) if roots else d
    return Recurrence(K, ps, m)


def annihilator_of_image(L: DiffOp, M: DiffOp) -> DiffOp:
    """Smallest-order A with ``A*M`` in the left ideal generated by L.

    A kills ``M f`` for every solution f of L.  Remainders of ``D^k M`` modulo
    L live in a space of dimension order(L), so a dependency appears by
    ``k = order(L)``.
    """
    K = L.field
    rho = L.order
    if rho == 0:
        return DiffOp(K, [1])
    rems = [rational_remainder(M, L)]
    D = DiffOp.d(K)
    while True:
        t = len(rems) - 1
        rows = [[rems[k][i] for k in range(t + 1)] for i in range(rho)]
        ker = rf_rank_nullspace(rows, t + 1)
        if ker:
            # a kernel vector whose last entry is nonzero gives order exactly t
            v = ker[-1]
            return DiffOp(K, v).primitive()
        rems.append(rational_remainder(op_mul(D, rems[-1]), L))


__all__ = [
    "DiffOp",
    "MissingInitialCoefficient",
    "Recurrence",
    "annihilator_of_image",
    "falling",
    "integer_roots",
    "op_mul",
    "op_right_divide",
    "to_recurrence",
]
