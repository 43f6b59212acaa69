"""Exact arithmetic in number fields and determined algebraic numbers.

A number field is ``Q[X]/(p)`` with ``p`` monic and irreducible, together with
a certified complex enclosure singling out one root ``b`` of ``p``.  Elements
are reduced rational polynomials in ``b``.  Every decision (zero tests,
equality, inversion) is made on those exact representatives; the complex
enclosures only tell conjugates apart and produce human readable digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from flint import acb, arb, ctx, fmpq, fmpq_mat, fmpq_poly, fmpz

DEFAULT_PREC = 64
MAX_PREC = 1 << 16


def as_fmpq(x) -> fmpq:
    """Convert ints, Fractions, flint rationals and ``"a/b"`` strings."""
    if isinstance(x, fmpq):
        return x
    if isinstance(x, (int, fmpz)):
        return fmpq(int(x))
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    if isinstance(x, str):
        fr = Fraction(x.strip())
        return fmpq(fr.numerator, fr.denominator)
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def fmpq_str(q: fmpq) -> str:
    q = as_fmpq(q)
    return str(q.p) if q.q == 1 else f"{q.p}/{q.q}"


def monic(p: fmpq_poly) -> fmpq_poly:
    return p / p[p.degree()]


def squarefree_part(p: fmpq_poly) -> fmpq_poly:
    if p.degree() <= 0:
        return fmpq_poly([1])
    g = p.gcd(p.derivative())
    return monic(p // g)


def is_irreducible(p: fmpq_poly) -> bool:
    if p.degree() < 1:
        return False
    _, facs = p.factor()
    return len(facs) == 1 and facs[0][1] == 1


def box_radius(box: acb) -> arb:
    """Half-width of a complex box (max of the real and imaginary radii)."""
    rr, ri = box.real.rad(), box.imag.rad()
    return rr if rr >= ri else ri


def dyadic_to_fmpq(x: arb) -> fmpq:
    """Exact rational value of the midpoint of ``x`` (always a dyadic)."""
    man, exp = x.mid().man_exp()
    man, exp = int(man), int(exp)
    if exp >= 0:
        return fmpq(man * 2**exp)
    return fmpq(man, 2**(-exp))


def acb_from_rational(re, im=0, prec: int = DEFAULT_PREC) -> acb:
    with ctx.workprec(prec):
        return acb(arb(as_fmpq(re)), arb(as_fmpq(im)))


def eval_qpoly_acb(p: fmpq_poly, x: acb, prec: int) -> acb:
    """Horner evaluation of a rational polynomial on a complex ball."""
    with ctx.workprec(prec):
        acc = acb(0)
        for c in reversed(p.coeffs()):
            acc = acc * x + acb(arb(c))
        return acc


def isolate_roots(p: fmpq_poly, prec: int = DEFAULT_PREC) -> list[acb]:
    """Certified pairwise isolating enclosures of the distinct roots of ``p``.

    Uses flint's rigorous complex root finder on the squarefree part, so each
    returned ball contains exactly one root.
    """
    sq = squarefree_part(p)
    if sq.degree() < 1:
        return []
    with ctx.workprec(prec):
        return [r for r, _ in sq.complex_roots()]


def _select_root(p: fmpq_poly, box: acb, prec: int) -> tuple[int, acb, int]:
    """Locate the unique root of ``p`` inside ``box``.

    Returns (index in the default-precision ordering, enclosure, precision).
    """
    base = isolate_roots(p, DEFAULT_PREC)
    while True:
        roots = base if prec == DEFAULT_PREC else isolate_roots(p, prec)
        hits = [i for i, r in enumerate(roots) if r.overlaps(box)]
        if len(hits) == 1:
            r = roots[hits[0]]
            idx = [i for i, b in enumerate(base) if b.overlaps(r)]
            if len(idx) == 1:
                return idx[0], r, prec
        elif not hits:
            raise ValueError("box does not contain a root of the polynomial")
        if prec > MAX_PREC:
            raise ValueError("box does not isolate a single root")
        prec *= 2


def _nearest_root(p: fmpq_poly, hint: complex) -> acb:
    """Isolating box of the root of ``p`` closest to a floating-point hint."""
    roots = isolate_roots(p)
    dist = sorted((abs(complex(r.mid()) - hint), i) for i, r in enumerate(roots))
    if len(dist) > 1 and dist[1][0] <= 1.001 * dist[0][0]:
        raise ValueError(f"hint {hint} does not single out a root")
    return roots[dist[0][1]]


def _to_box(root, p: fmpq_poly | None = None) -> acb:
    if isinstance(root, (int, float, complex)) and not isinstance(root, bool):
        if p is None:
            raise TypeError("a floating-point hint needs a polynomial")
        return _nearest_root(squarefree_part(p), complex(root))
    if isinstance(root, acb):
        return root
    if isinstance(root, AlgebraicNumber):
        return root.enclosure(DEFAULT_PREC)
    if isinstance(root, dict):
        re_ = as_fmpq(root.get("re", 0))
        im_ = as_fmpq(root.get("im", 0))
        rad = as_fmpq(root.get("radius", 0))
        with ctx.workprec(DEFAULT_PREC):
            r = arb(0, arb(rad)) if rad else arb(0)
            return acb(arb(re_) + r, arb(im_) + r)
    raise TypeError(f"cannot interpret {root!r} as a complex box")


class NumberField:
    """``Q[X]/(p)`` with a distinguished complex root of ``p``.

    Fields compare equal when they share the defining polynomial and the
    distinguished root.
    """

    def __init__(self, min_poly, root=None, *, check: bool = True, name: str = "b"):
        p = min_poly if isinstance(min_poly, fmpq_poly) else fmpq_poly([as_fmpq(c) for c in min_poly])
        if p.degree() < 1:
            raise ValueError("defining polynomial must have degree >= 1")
        p = monic(p)
        if check and not is_irreducible(p):
            raise ValueError(f"defining polynomial {p} is reducible over Q")
        self.min_poly = p
        self.degree = p.degree()
        self.name = name
        if root is None:
            roots = isolate_roots(p)
            self.root_index, self._box = 0, roots[0]
        else:
            self.root_index, self._box, _ = _select_root(p, _to_box(root, p), DEFAULT_PREC)
        self._root_cache: dict[int, acb] = {}
        self._zero = KElement(self, fmpq_poly([]))
        self._one = KElement(self, fmpq_poly([1]))

    @classmethod
    def rationals(cls) -> NumberField:
        return QQ

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def root(self, prec: int = DEFAULT_PREC) -> acb:
        """Certified enclosure of the distinguished root at ``prec`` bits."""
        if self.degree == 1:
            with ctx.workprec(prec):
                return acb(arb(-self.min_poly[0]))
        if prec <= DEFAULT_PREC:
            return self._box
        cached = self._root_cache.get(prec)
        if cached is None:
            _, cached, _ = _select_root(self.min_poly, self._box, prec)
            self._root_cache[prec] = cached
        return cached

    def root_number(self) -> AlgebraicNumber:
        return AlgebraicNumber(self.min_poly, self._box)

    @property
    def zero(self) -> KElement:
        return self._zero

    @property
    def one(self) -> KElement:
        return self._one

    @property
    def gen(self) -> KElement:
        return KElement(self, fmpq_poly([0, 1]) % self.min_poly)

    def __call__(self, x) -> KElement:
        if isinstance(x, KElement):
            if x.field is self or x.field == self:
                return x if x.field is self else KElement(self, x.poly)
            if x.field.is_rational and x.poly.degree() <= 0:
                return KElement(self, x.poly)
            raise ValueError("element belongs to a different number field")
        if isinstance(x, (list, tuple)):
            if len(x) > self.degree:
                raise ValueError("too many coordinates for this field")
            return KElement(self, fmpq_poly([as_fmpq(c) for c in x]))
        if isinstance(x, fmpq_poly):
            return KElement(self, x % self.min_poly)
        return KElement(self, fmpq_poly([as_fmpq(x)]))

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, NumberField):
            return NotImplemented
        return self.min_poly == other.min_poly and self.root_index == other.root_index

    def __hash__(self) -> int:
        return hash((tuple(str(c) for c in self.min_poly.coeffs()), self.root_index))

    def __repr__(self) -> str:
        if self.degree == 1:
            return "QQ"
        with ctx.workprec(32):
            approx = self._box.str(5, radius=False)
        return f"NumberField({self.min_poly.str(var=self.name)}, {self.name}~{approx})"

    # used by the serialisation layer
    def root_box_exact(self) -> dict:
        b = self._box
        rad = dyadic_to_fmpq(arb(box_radius(b).upper()))
        return {
            "re": fmpq_str(dyadic_to_fmpq(b.real)),
            "im": fmpq_str(dyadic_to_fmpq(b.imag)),
            "radius": fmpq_str(rad),
        }


class KElement:
    """Element of a number field, stored as a reduced polynomial in ``b``."""

    __slots__ = ("field", "poly")

    def __init__(self, field: NumberField, poly: fmpq_poly):
        self.field = field
        self.poly = poly

    def _co(self, other) -> KElement:
        if isinstance(other, KElement):
            if other.field is self.field:
                return other
            return self.field(other)
        return self.field(other)

    def __add__(self, other):
        o = self._co(other)
        return KElement(self.field, self.poly + o.poly)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._co(other)
        return KElement(self.field, self.poly - o.poly)

    def __rsub__(self, other):
        o = self._co(other)
        return KElement(self.field, o.poly - self.poly)

    def __neg__(self):
        return KElement(self.field, -self.poly)

    def __mul__(self, other):
        if isinstance(other, (int, fmpq)):
            return KElement(self.field, self.poly * other)
        o = self._co(other)
        if self.field.degree == 1:
            return KElement(self.field, self.poly * o.poly)
        return KElement(self.field, (self.poly * o.poly) % self.field.min_poly)

    __rmul__ = __mul__

    def inverse(self) -> KElement:
        if self.poly.is_zero():
            raise ZeroDivisionError("inverse of zero in a number field")
        if self.poly.degree() == 0:
            return KElement(self.field, fmpq_poly([1 / self.poly[0]]))
        g, s, _ = self.poly.xgcd(self.field.min_poly)
        return KElement(self.field, (s / g[0]) % self.field.min_poly)

    def __truediv__(self, other):
        if isinstance(other, (int, fmpq)):
            if other == 0:
                raise ZeroDivisionError("division by zero in a number field")
            return KElement(self.field, self.poly / other)
        return self * self._co(other).inverse()

    def __rtruediv__(self, other):
        return self._co(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.field.one, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self) -> bool:
        return not self.poly.is_zero()

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def is_one(self) -> bool:
        return self.poly.is_one()

    def __eq__(self, other) -> bool:
        if isinstance(other, KElement):
            if other.field is not self.field and other.field != self.field:
                if self.is_rational() and other.is_rational():
                    return self.rational() == other.rational()
                return False
            return self.poly == other.poly
        try:
            return self.poly == self.field(other).poly
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(Fraction(int(self.rational().p), int(self.rational().q)))
        return hash(tuple(str(c) for c in self.poly.coeffs()))

    def is_rational(self) -> bool:
        return self.poly.degree() <= 0

    def rational(self) -> fmpq:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.poly[0] if self.poly.degree() == 0 else fmpq(0)

    def coords(self) -> list[fmpq]:
        return [self.poly[i] for i in range(self.field.degree)]

    def enclosure(self, prec: int = DEFAULT_PREC) -> acb:
        """Complex ball containing the value of this element under the embedding."""
        if self.is_rational():
            with ctx.workprec(prec):
                return acb(arb(self.rational()))
        return eval_qpoly_acb(self.poly, self.field.root(prec), prec)

    def __repr__(self) -> str:
        if self.is_rational():
            return fmpq_str(self.rational())
        terms = []
        for i, c in enumerate(self.poly.coeffs()):
            if c == 0:
                continue
            mon = "" if i == 0 else (self.field.name if i == 1 else f"{self.field.name}^{i}")
            if not mon:
                terms.append(fmpq_str(c))
            elif c == 1:
                terms.append(mon)
            elif c == -1:
                terms.append("-" + mon)
            else:
                terms.append(f"{fmpq_str(c)}*{mon}")
        return " + ".join(terms).replace("+ -", "- ")

    __str__ = __repr__


QQ = NumberField(fmpq_poly([0, 1]), check=False, name="b")


def kelem_arith(a: KElement, b: KElement, op: str) -> KElement:
    """Binary field operation by name (``add``, ``sub``, ``mul``, ``div``)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b.is_zero():
            raise ZeroDivisionError("division by zero in a number field")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def multiplication_matrix(x: KElement) -> list[list[fmpq]]:
    """Matrix of ``y -> x*y`` on the power basis (column j is ``x*b^j``)."""
    K = x.field
    cols = []
    bj = K.one
    for _ in range(K.degree):
        cols.append((x * bj).coords())
        bj = bj * K.gen
    return [[cols[j][i] for j in range(K.degree)] for i in range(K.degree)]


def norm(x: KElement) -> fmpq:
    """Field norm down to Q."""
    K = x.field
    if K.degree == 1 or x.is_rational():
        return x.rational() ** K.degree if x.is_rational() else x.poly[0]
    return fmpq(K.min_poly.resultant(x.poly))


def minimal_polynomial_over_Q(x: KElement, field: NumberField | None = None) -> fmpq_poly:
    """Monic minimal polynomial of ``x`` over the rationals.

    The characteristic polynomial of multiplication by ``x`` is a power of the
    minimal polynomial; its unique irreducible factor is returned.
    """
    if field is not None:
        x = field(x)
    if x.is_rational():
        return fmpq_poly([-x.rational(), 1])
    K = x.field
    m = multiplication_matrix(x)
    cp = fmpq_mat(K.degree, K.degree, [c for row in m for c in row]).charpoly()
    _, facs = fmpq_poly(cp.coeffs()).factor()
    if len(facs) != 1:  # pragma: no cover - charpoly of a field element
        raise ArithmeticError("characteristic polynomial is not a prime power")
    return monic(facs[0][0])


class AlgebraicNumber:
    """A determined algebraic number: its minimal polynomial and an isolating box.

    The box contains exactly one complex root of ``defining_poly``.  Rational
    numbers carry their exact value and a point box.
    """

    __slots__ = ("defining_poly", "box", "index", "_exact", "_refinements")

    def __init__(self, poly, box, *, _index: int | None = None):
        p = poly if isinstance(poly, fmpq_poly) else fmpq_poly([as_fmpq(c) for c in poly])
        if p.is_zero():
            raise ValueError("defining polynomial must be nonzero")
        box = _to_box(box, p)
        if p.degree() > 1:
            _, facs = p.factor()
            cands = []
            for g, _m in facs:
                if g.degree() < 1:
                    continue
                if any(r.overlaps(box) for r in isolate_roots(g)):
                    cands.append(monic(g))
            if len(cands) == 1:
                p = cands[0]
            elif not cands:
                raise ValueError("box does not contain a root of the polynomial")
            else:
                # refine until a single factor is left
                prec = DEFAULT_PREC
                while len(cands) > 1:
                    prec *= 2
                    if prec > MAX_PREC:
                        raise ValueError("box does not isolate a single root")
                    cands = [g for g in cands if any(r.overlaps(box) for r in isolate_roots(g, prec))]
                p = cands[0]
        p = monic(p)
        self.defining_poly = p
        self._refinements: list[acb] = []
        if p.degree() == 1:
            self._exact = -p[0]
            self.index = 0
            with ctx.workprec(DEFAULT_PREC):
                self.box = acb(arb(self._exact))
            return
        self._exact = None
        if _index is not None:
            self.index, self.box = _index, box
        else:
            self.index, self.box, _ = _select_root(p, box, DEFAULT_PREC)

    @classmethod
    def from_rational(cls, q) -> AlgebraicNumber:
        q = as_fmpq(q)
        return cls(fmpq_poly([-q, 1]), acb_from_rational(q))

    @classmethod
    def from_element(cls, x: KElement) -> AlgebraicNumber:
        """The value of a number-field element under the field's embedding."""
        if x.is_rational():
            return cls.from_rational(x.rational())
        m = minimal_polynomial_over_Q(x)
        roots = isolate_roots(m)
        prec = DEFAULT_PREC
        while True:
            enc = x.enclosure(prec)
            hits = [r for r in (roots if prec == DEFAULT_PREC else isolate_roots(m, prec)) if r.overlaps(enc)]
            if len(hits) == 1:
                return cls(m, hits[0])
            if not hits:  # pragma: no cover - enclosures are rigorous
                raise ArithmeticError("element enclosure misses every root of its minimal polynomial")
            prec *= 2

    def is_rational(self) -> bool:
        return self._exact is not None

    def rational(self) -> fmpq:
        if self._exact is None:
            raise ValueError("not a rational number")
        return self._exact

    @property
    def degree(self) -> int:
        return self.defining_poly.degree()

    def radius(self) -> arb:
        if self._exact is not None:
            return arb(0)
        return box_radius(self.box)

    def enclosure(self, prec: int = DEFAULT_PREC) -> acb:
        if self._exact is not None:
            with ctx.workprec(prec):
                return acb(arb(self._exact))
        if prec <= DEFAULT_PREC:
            return self.box
        for b in self._refinements:
            if b.real.rel_accuracy_bits() >= prec - 8 or box_radius(b) == 0:
                return b
        _, b, _ = _select_root(self.defining_poly, self.box, prec)
        self._refinements.append(b)
        return b

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraicNumber):
            try:
                other = AlgebraicNumber.from_rational(other)
            except TypeError:
                return NotImplemented
        return self.defining_poly == other.defining_poly and self.index == other.index

    def __hash__(self) -> int:
        return hash((tuple(str(c) for c in self.defining_poly.coeffs()), self.index))

    def approx(self, digits: int = 15) -> str:
        if self._exact is not None:
            return fmpq_str(self._exact)
        prec = int(digits * 3.33) + 16
        b = self.enclosure(prec)
        with ctx.workprec(prec):
            if b.imag.is_zero() or (b.imag.contains(0) and _is_real_root(self)):
                return b.real.str(digits, radius=False)
            return b.str(digits, radius=False)

    def __repr__(self) -> str:
        if self._exact is not None:
            return f"AlgebraicNumber({fmpq_str(self._exact)})"
        return f"AlgebraicNumber({self.defining_poly.str(var='x')}, ~{self.approx(8)})"


def _is_real_root(a: AlgebraicNumber) -> bool:
    """True when the root is real: its conjugate is itself."""
    conj = a.box.conjugate()
    roots = isolate_roots(a.defining_poly)
    return sum(1 for r in roots if r.overlaps(conj)) == 1 and roots[a.index].overlaps(conj)


def refine_box(x: AlgebraicNumber, target_radius) -> AlgebraicNumber:
    """Return the same number with an isolating box of radius <= ``target_radius``."""
    t = arb(as_fmpq(target_radius)) if not isinstance(target_radius, (arb, float)) else arb(target_radius)
    if not t > 0:
        raise ValueError("target radius must be positive")
    if x.is_rational():
        return x
    prec = DEFAULT_PREC
    while True:
        _, b, _ = _select_root(x.defining_poly, x.box, prec)
        if box_radius(b) <= t:
            return AlgebraicNumber(x.defining_poly, b, _index=x.index)
        prec *= 2


@dataclass(frozen=True)
class Extension:
    """A field containing a copy of ``base`` and a root ``alpha``.

    ``base_gen`` is the image of the base field's generator and ``alpha`` the
    image of the adjoined number; ``shift`` is the integer ``k`` of the
    primitive element ``b + k*alpha`` (0 when no growth was needed).
    """

    base: NumberField
    field: NumberField
    base_gen: KElement
    alpha: KElement
    shift: int = 0

    def map(self, x: KElement) -> KElement:
        """Image of a base-field element in the extension."""
        if x.field is self.field:
            return x
        if x.is_rational():
            return self.field(x.rational())
        acc = self.field.zero
        for c in reversed(x.poly.coeffs()):
            acc = acc * self.base_gen + c
        return acc


def compose_extension(field: NumberField, alpha: AlgebraicNumber) -> Extension:
    """Adjoin a determined algebraic number to a number field.

    Returns a field ``Q(g)`` with ``g = b + k*alpha`` for the first ``k`` for
    which the norm of the shifted factor is squarefree (so that ``g`` is a
    primitive element), with the images of ``b`` and ``alpha`` obtained from a
    linear gcd.  No growth happens when ``alpha`` already lies in the field.
    """
    from .poly import KPoly, factor, poly_gcd, poly_norm  # circular

    if alpha.is_rational():
        return Extension(field, field, field.gen, field(alpha.rational()))
    if field.is_rational:
        L = NumberField(alpha.defining_poly, alpha.box, check=False)
        return Extension(field, L, L(-field.min_poly[0]), L.gen, 1)

    A = KPoly(field, [field(c) for c in alpha.defining_poly.coeffs()])
    factors = [g for g, _ in factor(A)]
    prec = DEFAULT_PREC
    while True:
        a_enc = alpha.enclosure(prec)
        vanish = [g for g in factors if g.enclosure_at(a_enc, prec).contains(0)]
        if len(vanish) == 1:
            g = vanish[0]
            break
        prec *= 2
        if prec > MAX_PREC:  # pragma: no cover
            raise ArithmeticError("could not separate factors at alpha")
    if g.degree == 1:
        return Extension(field, field, field.gen, -g.coeffs[0] / g.coeffs[1])

    for k in range(1, 64):
        z_shift = KPoly(field, [-k * field.gen, field.one])
        h = g.compose(z_shift)  # h(X) = g(X - k b)
        N = poly_norm(h)
        if N.gcd(N.derivative()).degree() > 0:
            continue
        prec = DEFAULT_PREC
        while True:
            with ctx.workprec(prec):
                gbox = field.root(prec) + k * alpha.enclosure(prec)
            roots = isolate_roots(N, prec)
            if sum(1 for r in roots if r.overlaps(gbox)) == 1:
                break
            prec *= 2
        L = NumberField(N, gbox, check=False)
        # b is the unique common root of p(Y) and g((gamma - Y)/k; Y) over L
        Y = KPoly(L, [L.zero, L.one])
        lin = KPoly(L, [L.gen / k, L(fmpq(-1, k))])
        G = KPoly(L, [])
        power = KPoly(L, [L.one])
        for gi in g.coeffs:
            ci = KPoly(L, [L(c) for c in gi.poly.coeffs()])
            G = G + ci.compose(Y) * power
            power = power * lin
        P = KPoly(L, [L(c) for c in field.min_poly.coeffs()])
        d = poly_gcd(P, G)
        if d.degree != 1:
            continue
        b_img = -d.coeffs[0]
        a_img = (L.gen - b_img) / k
        ext = Extension(field, L, b_img, a_img, k)
        with ctx.workprec(prec):
            if not (b_img.enclosure(prec).overlaps(field.root(prec))
                    and a_img.enclosure(prec).overlaps(alpha.enclosure(prec))):
                raise ArithmeticError("embedding check failed in compose_extension")
        return ext
    raise ArithmeticError("no primitive element found")  # pragma: no cover
