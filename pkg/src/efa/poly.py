"""Univariate polynomials and rational functions over a number field.

``KPoly`` keeps a tuple of ``KElement`` coefficients (lowest degree first,
no trailing zeros).  Multiplication packs the coefficients into a single
rational polynomial (Kronecker substitution) so flint does the heavy lifting;
over Q the gcd, division and factorisation go straight to flint as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import count

from flint import acb, ctx, fmpq, fmpq_mpoly_ctx, fmpq_poly

from .arith import (
    DEFAULT_PREC,
    MAX_PREC,
    QQ,
    AlgebraicNumber,
    Extension,
    KElement,
    NumberField,
    compose_extension,
    isolate_roots,
    monic,
)


class KPoly:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs=()):
        cs = [c if isinstance(c, KElement) and c.field is field else field(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def _raw(cls, field, coeffs) -> KPoly:
        obj = cls.__new__(cls)
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        obj.field = field
        obj.coeffs = tuple(cs)
        return obj

    @classmethod
    def from_qpoly(cls, field: NumberField, q: fmpq_poly) -> KPoly:
        return cls._raw(field, [KElement(field, fmpq_poly([c])) for c in q.coeffs()])

    @classmethod
    def z(cls, field: NumberField) -> KPoly:
        return cls._raw(field, [field.zero, field.one])

    @classmethod
    def constant(cls, field: NumberField, c) -> KPoly:
        return cls._raw(field, [field(c)])

    @property
    def degree(self) -> int:
        """Degree, with -1 standing for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def lc(self) -> KElement:
        return self.coeffs[-1] if self.coeffs else self.field.zero

    def __getitem__(self, i: int) -> KElement:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.field.zero

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self.coeffs)

    def to_qpoly(self) -> fmpq_poly:
        return fmpq_poly([c.rational() for c in self.coeffs])

    def _co(self, other) -> KPoly:
        if isinstance(other, KPoly):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("polynomials over different fields")
            return other
        if isinstance(other, KRatFun):
            raise TypeError
        return KPoly._raw(self.field, [self.field(other)])

    def __add__(self, other):
        if isinstance(other, KRatFun):
            return NotImplemented
        o = self._co(other)
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        return KPoly._raw(self.field, [a[i] + b[i] if i < len(b) else a[i] for i in range(len(a))])

    __radd__ = __add__

    def __neg__(self):
        return KPoly._raw(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, KRatFun):
            return NotImplemented
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        if isinstance(other, KRatFun):
            return NotImplemented
        if isinstance(other, (KElement, int, fmpq)):
            c = self.field(other) if not isinstance(other, KElement) else other
            if c.is_zero():
                return KPoly._raw(self.field, [])
            return KPoly._raw(self.field, [x * c for x in self.coeffs])
        o = self._co(other)
        if not self.coeffs or not o.coeffs:
            return KPoly._raw(self.field, [])
        K = self.field
        if K.degree == 1:
            return KPoly.from_qpoly(K, self.to_qpoly() * o.to_qpoly())
        return _kron_mul(self, o)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> KPoly:
        result, base = KPoly._raw(self.field, [self.field.one]), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other):
        o = self._co(other)
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        K = self.field
        if K.degree == 1:
            q, r = divmod(self.to_qpoly(), o.to_qpoly())
            return KPoly.from_qpoly(K, q), KPoly.from_qpoly(K, r)
        rem = list(self.coeffs)
        dq = len(rem) - len(o.coeffs)
        if dq < 0:
            return KPoly._raw(K, []), self
        inv = o.lc().inverse()
        quo = [K.zero] * (dq + 1)
        n = len(o.coeffs) - 1
        for i in range(dq, -1, -1):
            c = rem[i + n] * inv
            quo[i] = c
            if c.is_zero():
                continue
            for j in range(n + 1):
                rem[i + j] = rem[i + j] - c * o.coeffs[j]
        return KPoly._raw(K, quo), KPoly._raw(K, rem[:n])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> KPoly:
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def __eq__(self, other) -> bool:
        if isinstance(other, KPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, KRatFun):
            return other == self
        try:
            return self.coeffs == self._co(other).coeffs
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __call__(self, x):
        if isinstance(x, KPoly):
            return self.compose(x)
        if isinstance(x, KElement) and x.field is not self.field and self.is_rational():
            acc = x.field.zero
            for c in reversed(self.coeffs):
                acc = acc * x + c.rational()
            return acc
        x = self.field(x)
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, other: KPoly) -> KPoly:
        if self.field.degree == 1 and other.field.degree == 1:
            return KPoly.from_qpoly(self.field, self.to_qpoly()(other.to_qpoly()))
        acc = KPoly._raw(other.field, [])
        for c in reversed(self.coeffs):
            acc = acc * other + KPoly._raw(other.field, [other.field(c) if c.field is not other.field else c])
        return acc

    def shift(self, a) -> KPoly:
        """``p(z + a)``."""
        a = self.field(a)
        if a.is_zero():
            return self
        return self.compose(KPoly._raw(self.field, [a, self.field.one]))

    def derivative(self) -> KPoly:
        return KPoly._raw(self.field, [self.coeffs[i] * i for i in range(1, len(self.coeffs))])

    def monic(self) -> KPoly:
        if self.is_zero():
            return self
        lc = self.lc()
        if lc.is_one():
            return self
        inv = lc.inverse()
        return KPoly._raw(self.field, [c * inv for c in self.coeffs])

    def valuation(self) -> int:
        """Order of vanishing at 0 (-1 for the zero polynomial)."""
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                return i
        return -1

    def map(self, ext: Extension) -> KPoly:
        if ext.field is self.field:
            return self
        return KPoly._raw(ext.field, [ext.map(c) for c in self.coeffs])

    def enclosure_at(self, x: acb, prec: int = DEFAULT_PREC) -> acb:
        """Ball containing ``p(x)`` for every point of the ball ``x``."""
        with ctx.workprec(prec):
            acc = acb(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c.enclosure(prec)
            return acc

    def __repr__(self) -> str:
        return self.str()

    def str(self, var: str = "z") -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            mon = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            cs = str(c)
            if not mon:
                terms.append(cs)
            elif cs == "1":
                terms.append(mon)
            elif cs == "-1":
                terms.append("-" + mon)
            elif c.is_rational():
                terms.append(f"{cs}*{mon}")
            else:
                terms.append(f"({cs})*{mon}")
        return " + ".join(terms).replace("+ -", "- ")


def _kron_mul(a: KPoly, b: KPoly) -> KPoly:
    K = a.field
    d = K.degree
    w = 2 * d - 1

    def pack(p: KPoly) -> fmpq_poly:
        out = [fmpq(0)] * (len(p.coeffs) * w)
        for i, c in enumerate(p.coeffs):
            for j, x in enumerate(c.poly.coeffs()):
                out[i * w + j] = x
        return fmpq_poly(out)

    prod = pack(a) * pack(b)
    pc = prod.coeffs()
    n = len(a.coeffs) + len(b.coeffs) - 1
    out = []
    mp = K.min_poly
    for i in range(n):
        chunk = pc[i * w:(i + 1) * w]
        out.append(KElement(K, fmpq_poly(chunk) % mp))
    return KPoly._raw(K, out)


def poly_gcd(a: KPoly, b: KPoly) -> KPoly:
    """Monic gcd (zero when both inputs are zero)."""
    K = a.field
    if K.degree == 1:
        g = a.to_qpoly().gcd(b.to_qpoly())
        return KPoly.from_qpoly(K, g)
    while not b.is_zero():
        a, b = b, (a % b).monic()
    return a.monic()


def poly_xgcd(a: KPoly, b: KPoly) -> tuple[KPoly, KPoly, KPoly]:
    """``(g, s, t)`` with ``s*a + t*b = g`` and ``g`` monic."""
    K = a.field
    r0, r1 = a, b
    s0, s1 = KPoly.constant(K, 1), KPoly(K, [])
    t0, t1 = KPoly(K, []), KPoly.constant(K, 1)
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    inv = r0.lc().inverse()
    return r0 * inv, s0 * inv, t0 * inv


def poly_lcm(a: KPoly, b: KPoly) -> KPoly:
    if a.is_zero() or b.is_zero():
        return KPoly(a.field, [])
    return (a * b.exact_div(poly_gcd(a, b))).monic()


def poly_norm(h: KPoly) -> fmpq_poly:
    """``Res_b(p(b), h(z; b))``: the norm of ``h`` down to Q[z]."""
    K = h.field
    if K.degree == 1:
        return h.to_qpoly()
    C = fmpq_mpoly_ctx.get(("z", "y"), "lex")
    terms = {}
    for i, c in enumerate(h.coeffs):
        for j, x in enumerate(c.poly.coeffs()):
            if x != 0:
                terms[(i, j)] = x
    H = C.from_dict(terms)
    P = C.from_dict({(0, j): x for j, x in enumerate(K.min_poly.coeffs()) if x != 0})
    R = P.resultant(H, "y")
    out = [fmpq(0)] * (h.degree * K.degree + 1)
    for mon, c in R.to_dict().items():
        out[mon[0]] = c
    return fmpq_poly(out)


def squarefree_decomposition(u: KPoly) -> list[tuple[KPoly, int]]:
    """Yun's algorithm: monic squarefree ``w_i`` with ``u = lc * prod w_i^i``."""
    K = u.field
    if u.degree < 1:
        return []
    if K.degree == 1:
        _, facs = u.to_qpoly().factor_squarefree()
        return [(KPoly.from_qpoly(K, monic(f)), m) for f, m in facs]
    out = []
    du = u.derivative()
    a = poly_gcd(u, du)
    b = u.exact_div(a).monic()
    c = du.exact_div(a)
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        if a.degree > 0:
            out.append((a, i))
        b = b.exact_div(a).monic()
        c = d.exact_div(a)
        d = c - b.derivative()
        i += 1
    return out


def squarefree_part(u: KPoly) -> KPoly:
    out = KPoly.constant(u.field, 1)
    for w, _ in squarefree_decomposition(u):
        out = out * w
    return out


def _trager_shifts():
    yield 0
    for s in count(1):
        yield s
        yield -s


def _factor_squarefree_over_K(u: KPoly) -> list[KPoly]:
    K = u.field
    if u.degree <= 1:
        return [u.monic()]
    for s in _trager_shifts():
        us = u.compose(KPoly(K, [-s * K.gen, K.one])) if s else u
        N = poly_norm(us)
        if N.gcd(N.derivative()).degree() > 0:
            continue
        _, facs = N.factor()
        out = []
        back = KPoly(K, [s * K.gen, K.one])
        for f, _ in facs:
            g = poly_gcd(us, KPoly.from_qpoly(K, f))
            if g.degree > 0:
                out.append((g.compose(back) if s else g).monic())
        return out
    raise AssertionError("unreachable")


def factor(u: KPoly) -> list[tuple[KPoly, int]]:
    """Irreducible monic factors over the coefficient field, with multiplicities."""
    K = u.field
    if u.degree < 1:
        return []
    if K.degree == 1:
        _, facs = u.to_qpoly().factor()
        out = [(KPoly.from_qpoly(K, monic(f)), m) for f, m in facs]
    else:
        out = []
        for w, m in squarefree_decomposition(u):
            out.extend((g, m) for g in _factor_squarefree_over_K(w))
    out.sort(key=lambda t: (t[0].degree, t[1], repr(t[0])))
    return out


def roots_of_irreducible(g: KPoly) -> list[AlgebraicNumber]:
    """All complex roots of an irreducible polynomial, under the field embedding."""
    K = g.field
    if g.degree < 1:
        return []
    if g.degree == 1:
        r = -g[0] / g[1]
        return [AlgebraicNumber.from_element(r)]
    if K.degree == 1:
        q = monic(g.to_qpoly())
        return [AlgebraicNumber(q, box, _index=i) for i, box in enumerate(isolate_roots(q))]
    N = poly_norm(g)
    _, facs = N.factor()
    m = monic(facs[0][0])  # norm of an irreducible is a prime power
    base = isolate_roots(m)
    prec = DEFAULT_PREC
    keep = list(range(len(base)))
    while True:
        roots = base if prec == DEFAULT_PREC else isolate_roots(m, prec)
        keep = [i for i in keep if g.enclosure_at(roots[i], prec).contains(0)]
        if len(keep) == g.degree:
            return [AlgebraicNumber(m, base[i], _index=i) for i in keep]
        if len(keep) < g.degree or prec > MAX_PREC:  # pragma: no cover
            raise ArithmeticError("root selection over the number field failed")
        prec *= 2


@dataclass
class RootGroup:
    factor: KPoly
    multiplicity: int
    roots: list[AlgebraicNumber]


@dataclass
class RootSet:
    """Distinct roots of a polynomial grouped by irreducible factor."""

    groups: list[RootGroup] = dc_field(default_factory=list)

    @property
    def entries(self) -> list[tuple[AlgebraicNumber, int]]:
        return [(a, g.multiplicity) for g in self.groups for a in g.roots]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return sum(len(g.roots) for g in self.groups)


def roots_with_multiplicity(u: KPoly) -> RootSet:
    groups = []
    for g, m in factor(u):
        groups.append(RootGroup(g, m, roots_of_irreducible(g)))
    return RootSet(groups)


def series_div(a: list[KElement], b: list[KElement], n: int, field: NumberField) -> list[KElement]:
    """First ``n`` coefficients of the power series ``a / b`` (``b[0] != 0``)."""
    inv = b[0].inverse()
    out = []
    for k in range(n):
        s = a[k] if k < len(a) else field.zero
        for j in range(1, min(k, len(b) - 1) + 1):
            s = s - b[j] * out[k - j]
        out.append(s * inv)
    return out


@dataclass
class LaurentSeries:
    field: NumberField
    start: int
    coeffs: list[KElement]
    extension: Extension | None = None

    def coefficient(self, k: int) -> KElement:
        i = k - self.start
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        if i < 0:
            return self.field.zero
        raise IndexError("coefficient beyond the computed order")


def laurent_expand(r, at, order: int) -> LaurentSeries:
    """Laurent coefficients of ``r`` in powers of ``(z - at)`` up to ``order``.

    ``at`` may be an element of the coefficient field or a determined algebraic
    number, in which case the coefficients live in the composite field.
    """
    if isinstance(r, KPoly):
        r = KRatFun(r)
    ext = None
    if isinstance(at, AlgebraicNumber):
        ext = compose_extension(r.field, at)
        L, a = ext.field, ext.alpha
        num, den = r.num.map(ext), r.den.map(ext)
    else:
        a = r.field(at) if not isinstance(at, KElement) else at
        L = a.field
        if L is not r.field and L != r.field:
            raise ValueError("expansion point lies in a different field")
        num, den = r.num, r.den
    if num.is_zero():
        return LaurentSeries(L, order + 1, [], ext)
    ns, ds = num.shift(a), den.shift(a)
    vn, vd = ns.valuation(), ds.valuation()
    v = vn - vd
    n = order - v + 1
    coeffs = series_div(list(ns.coeffs[vn:]), list(ds.coeffs[vd:]), max(n, 0), L) if n > 0 else []
    return LaurentSeries(L, v, coeffs, ext)


class KRatFun:
    """Quotient ``num/den`` of coprime polynomials with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, _normalized: bool = False):
        if not isinstance(num, KPoly):
            raise TypeError("numerator must be a KPoly")
        if den is None:
            den = KPoly.constant(num.field, 1)
            _normalized = True
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _normalized:
            if num.is_zero():
                den = KPoly.constant(num.field, 1)
            else:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num, den = num.exact_div(g), den.exact_div(g)
                lc = den.lc()
                if not lc.is_one():
                    inv = lc.inverse()
                    num, den = num * inv, den * inv
        self.num = num
        self.den = den

    @property
    def field(self) -> NumberField:
        return self.num.field

    @classmethod
    def constant(cls, field: NumberField, c) -> KRatFun:
        return cls(KPoly.constant(field, c))

    @classmethod
    def zero(cls, field: NumberField) -> KRatFun:
        return cls(KPoly(field, []))

    @classmethod
    def z(cls, field: NumberField) -> KRatFun:
        return cls(KPoly.z(field))

    def _co(self, other) -> KRatFun:
        if isinstance(other, KRatFun):
            return other
        if isinstance(other, KPoly):
            return KRatFun(other)
        return KRatFun(KPoly.constant(self.field, other))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def is_constant(self) -> bool:
        return self.den.degree == 0 and self.num.degree <= 0

    def constant_value(self) -> KElement:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num[0]

    def __add__(self, other):
        o = self._co(other)
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if self.den == o.den:
            return KRatFun(self.num + o.num, self.den)
        if self.den.degree == 0:
            return KRatFun(self.num * o.den + o.num, o.den, _normalized=True)
        if o.den.degree == 0:
            return KRatFun(self.num + o.num * self.den, self.den, _normalized=True)
        return KRatFun(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return KRatFun(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        if isinstance(other, (KElement, int, fmpq)):
            c = self.field(other) if not isinstance(other, KElement) else other
            if c.is_zero():
                return KRatFun.zero(self.field)
            return KRatFun(self.num * c, self.den, _normalized=True)
        o = self._co(other)
        if self.is_zero() or o.is_zero():
            return KRatFun.zero(self.field)
        if self.den.degree == 0 and o.den.degree == 0:
            return KRatFun(self.num * o.num, self.den, _normalized=True)
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        n = self.num.exact_div(g1) * o.num.exact_div(g2)
        d = self.den.exact_div(g2) * o.den.exact_div(g1)
        return KRatFun(n, d, _normalized=False) if not d.lc().is_one() else KRatFun(n, d, _normalized=True)

    __rmul__ = __mul__

    def inverse(self) -> KRatFun:
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        inv = self.num.lc().inverse()
        return KRatFun(self.den * inv, self.num * inv, _normalized=True)

    def __truediv__(self, other):
        if isinstance(other, (KElement, int, fmpq)):
            c = self.field(other) if not isinstance(other, KElement) else other
            return self * c.inverse()
        return self * self._co(other).inverse()

    def __rtruediv__(self, other):
        return self._co(other) * self.inverse()

    def __pow__(self, n: int) -> KRatFun:
        if n < 0:
            return self.inverse() ** (-n)
        return KRatFun(self.num ** n, self.den ** n, _normalized=True)

    def derivative(self) -> KRatFun:
        if self.den.degree == 0:
            return KRatFun(self.num.derivative(), self.den, _normalized=True)
        return KRatFun(self.num.derivative() * self.den - self.num * self.den.derivative(), self.den * self.den)

    def __eq__(self, other) -> bool:
        try:
            o = self._co(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __call__(self, x) -> KElement:
        d = self.den(x)
        if d.is_zero():
            raise ZeroDivisionError("evaluation at a pole")
        return self.num(x) / d

    def map(self, ext: Extension) -> KRatFun:
        return KRatFun(self.num.map(ext), self.den.map(ext), _normalized=True)

    def shift(self, a) -> KRatFun:
        return KRatFun(self.num.shift(a), self.den.shift(a), _normalized=True)

    def __repr__(self) -> str:
        if self.den.degree == 0:
            return self.num.str()
        return f"({self.num.str()})/({self.den.str()})"


def as_ratfun(x, field: NumberField) -> KRatFun:
    if isinstance(x, KRatFun):
        return x
    if isinstance(x, KPoly):
        return KRatFun(x)
    return KRatFun.constant(field, x)


__all__ = [
    "QQ",
    "KPoly",
    "KRatFun",
    "LaurentSeries",
    "RootGroup",
    "RootSet",
    "as_ratfun",
    "factor",
    "laurent_expand",
    "poly_gcd",
    "poly_lcm",
    "poly_norm",
    "poly_xgcd",
    "roots_of_irreducible",
    "roots_with_multiplicity",
    "series_div",
    "squarefree_decomposition",
    "squarefree_part",
]
