"""Removal of nonzero singularities and the exceptional-value test.

The tracked vector is ``v = (1, f, f', ..., f^(s-1))`` with ``v' = B v``.  At a
pole ``alpha`` of order k, every row ``c`` of ``C = [(z - alpha)^k B](alpha)``
satisfies ``c . v(alpha) = 0``.  Replacing coordinate ``p`` of ``v`` by
``c . v / (z - alpha)`` (an entire function) is a polynomial change of basis
``v = T w``; repeating this until the system is regular at ``alpha`` gives
``v = M w``.  At a regular point the values ``w(alpha)`` satisfy no nontrivial
linear relation, so ``f(alpha)`` is algebraic exactly when some
``lambda = (beta, 1, 0, ..., 0)`` has ``lambda M(alpha) = 0``; then
``f(alpha) = -beta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from flint import acb, arb, ctx

from .arith import (
    DEFAULT_PREC,
    MAX_PREC,
    AlgebraicNumber,
    Extension,
    KElement,
    NumberField,
    compose_extension,
    isolate_roots,
    minimal_polynomial_over_Q,
)
from .inhomog import InhomEq, SystemMatrix
from .linalg import rf_derivative, rf_inverse, rf_matmul, rf_sub
from .poly import KPoly, KRatFun, RootSet, roots_with_multiplicity, series_div
from .series import InternalInconsistencyError, LazySeries


class IterationCapExceeded(RuntimeError):
    def __init__(self, message: str, partial):
        super().__init__(message)
        self.partial = partial


Matrix = list[list[KRatFun]]
PolyMatrix = list[list[KPoly]]


def _pole_order(x: KRatFun, a: KElement) -> int:
    if x.is_zero() or x.den.degree <= 0:
        return 0
    return x.den.shift(a).valuation()


def pole_order(B: Matrix, a: KElement) -> int:
    return max(_pole_order(x, a) for row in B for x in row)


def relations_at_singularity(B: Matrix, a: KElement) -> tuple[int, list[list[KElement]]]:
    """Order k of the pole at ``a`` and ``C = [(z - a)^k B](a)``."""
    k = pole_order(B, a)
    if k == 0:
        raise ValueError("the matrix has no pole at this point")
    F = a.field
    C = []
    for row in B:
        crow = []
        for x in row:
            if _pole_order(x, a) == k:
                ds = x.den.shift(a)
                crow.append(x.num(a) / ds.coeffs[k])
            else:
                crow.append(F.zero)
        C.append(crow)
    return k, C


def _pick_relation(C: list[list[KElement]]) -> tuple[list[KElement], int]:
    for row in C:
        if any(not x.is_zero() for x in row):
            piv = max((i for i in range(1, len(row)) if not row[i].is_zero()), default=None)
            if piv is None:
                raise InternalInconsistencyError("relation at a singularity reads 1 = 0")
            return row, piv
    raise InternalInconsistencyError("leading pole coefficient vanishes")


def remove_singularity(B: Matrix, a: KElement) -> tuple[Matrix, PolyMatrix, list[KElement], int]:
    """One shearing step at ``a``: returns ``(B_next, T, c, p)`` with ``v = T w``."""
    F = a.field
    n = len(B)
    _, C = relations_at_singularity(B, a)
    c, p = _pick_relation(C)
    lin = KPoly(F, [-a, F.one])
    cp_inv = c[p].inverse()
    # T: identity except row p = (-c_j/c_p ..., (z - a)/c_p at p)
    T = [[KPoly.constant(F, int(i == j)) for j in range(n)] for i in range(n)]
    T[p] = [KPoly.constant(F, -c[j] * cp_inv) if j != p else lin * cp_inv for j in range(n)]
    # B T, then T^{-1}(B T); row p of T^{-1} is c / (z - a)
    BT = [list(row) for row in B]
    for i in range(n):
        bp = B[i][p]
        if bp.is_zero():
            continue
        for j in range(n):
            if j != p and not c[j].is_zero():
                BT[i][j] = BT[i][j] - bp * (c[j] * cp_inv)
        BT[i][p] = bp * KRatFun(lin * cp_inv)
    new = [list(row) for row in BT]
    inv_lin = KRatFun(KPoly.constant(F, 1), lin)
    rowp = [KRatFun.zero(F) for _ in range(n)]
    for j in range(n):
        if c[j].is_zero():
            continue
        for t in range(n):
            if not BT[j][t].is_zero():
                rowp[t] = rowp[t] + BT[j][t] * c[j]
    new[p] = [x * inv_lin for x in rowp]
    new[p][p] = new[p][p] - inv_lin
    return new, T, c, p


def _polymat_mul(A: PolyMatrix, T: PolyMatrix) -> PolyMatrix:
    n = len(A)
    F = A[0][0].field
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = KPoly(F, [])
            for t in range(n):
                if not A[i][t].is_zero() and not T[t][j].is_zero():
                    acc = acc + A[i][t] * T[t][j]
            row.append(acc)
        out.append(row)
    return out


def _identity(n: int, F: NumberField) -> PolyMatrix:
    return [[KPoly.constant(F, int(i == j)) for j in range(n)] for i in range(n)]


def _det_poly(M: PolyMatrix) -> KPoly:
    n = len(M)
    R = [[KRatFun(x) for x in row] for row in M]
    F = M[0][0].field
    det = KRatFun.constant(F, 1)
    for c in range(n):
        piv = next((i for i in range(c, n) if not R[i][c].is_zero()), None)
        if piv is None:
            return KPoly(F, [])
        if piv != c:
            R[c], R[piv] = R[piv], R[c]
            det = -det
        det = det * R[c][c]
        inv = R[c][c].inverse()
        for i in range(c + 1, n):
            if not R[i][c].is_zero():
                f = R[i][c] * inv
                R[i] = [x - f * y for x, y in zip(R[i], R[c])]
    if not det.is_polynomial():  # pragma: no cover
        raise InternalInconsistencyError("determinant of a polynomial matrix is not polynomial")
    return det.num


@dataclass
class TransformMatrix:
    """``v = M w`` with ``w' = N w``; ``N`` is regular at every processed point."""

    field: NumberField
    M: PolyMatrix
    N: Matrix
    det: KPoly
    steps: int
    points: list[KElement] = dc_field(default_factory=list)

    def at(self, a: KElement) -> list[list[KElement]]:
        return [[x(a) for x in row] for row in self.M]


def desingularize_at(B: Matrix, a: KElement, cap: int, M: PolyMatrix | None = None,
                     steps: int = 0) -> tuple[Matrix, PolyMatrix, int]:
    """Shear at ``a`` until ``B`` has no pole there."""
    F = a.field
    n = len(B)
    if M is None:
        M = _identity(n, F)
    while pole_order(B, a) > 0:
        if steps >= cap:
            raise IterationCapExceeded(
                f"singularity removal exceeded {cap} steps", {"M": M, "B": B, "point": a})
        B, T, _, _ = remove_singularity(B, a)
        M = _polymat_mul(M, T)
        steps += 1
    return B, M, steps


def total_singularity_order(S: SystemMatrix, roots: RootSet) -> int:
    total = 0
    for grp in roots.groups:
        if grp.factor.degree == 1 and grp.factor[0].is_zero():
            continue
        if grp.factor.degree == 1:
            total += pole_order(S.B, -grp.factor[0])
        else:
            ext = compose_extension(grp.factor.field, grp.roots[0])
            Bm = [[x.map(ext) for x in row] for row in S.B]
            total += pole_order(Bm, ext.alpha) * len(grp.roots)
    return total


def default_iteration_cap(S: SystemMatrix, roots: RootSet) -> int:
    s = S.dim - 1
    return 4 * (s + 1) * max(total_singularity_order(S, roots), 1)


def nonzero_roots(S: SystemMatrix) -> RootSet:
    rs = roots_with_multiplicity(S.u0)
    rs.groups = [g for g in rs.groups if not (g.factor.degree == 1 and g.factor[0].is_zero())]
    return rs


def compute_M(S: SystemMatrix, roots: RootSet | None = None, iteration_cap: int | None = None) -> TransformMatrix:
    """Global transform over the coefficient field removing every nonzero pole.

    All nonzero roots of ``u_0`` must lie in the coefficient field.
    """
    if roots is None:
        roots = nonzero_roots(S)
    K = S.u0.field
    if any(g.factor.degree > 1 for g in roots.groups):
        raise ValueError("global transform needs every nonzero root in the coefficient field")
    cap = iteration_cap if iteration_cap is not None else default_iteration_cap(S, roots)
    B = S.B
    M = _identity(S.dim, K)
    steps = 0
    pts = []
    for g in roots.groups:
        a = -g.factor[0]
        pts.append(a)
        B, M, steps = desingularize_at(B, a, cap, M, steps)
    return TransformMatrix(K, M, B, _det_poly(M), steps, pts)


def split_system(S: SystemMatrix, max_degree: int = 16) -> SystemMatrix:
    """``S`` over an extension of K in which ``u_0`` splits into linear factors."""
    while True:
        pending = [g for g in nonzero_roots(S).groups if g.factor.degree > 1]
        if not pending:
            return S
        ext = compose_extension(S.u0.field, pending[0].roots[0])
        if ext.field.degree > max_degree:
            raise ValueError(f"splitting field of u_0 exceeds degree {max_degree}")
        S = SystemMatrix([[x.map(ext) for x in row] for row in S.B], [p.map(ext) for p in S.u])


def terminal_certificate(S: SystemMatrix, T: TransformMatrix) -> tuple[bool, Matrix]:
    """Recompute ``N = M^{-1} B M - M^{-1} M'`` and check its poles are at 0 only
    (or at none of the processed points when working locally)."""
    F = T.field
    Mr = [[KRatFun(x) for x in row] for row in T.M]
    B = S.B if S.u0.field is F else None
    if B is None:
        raise ValueError("system and transform live over different fields")
    Minv = rf_inverse(Mr)
    N = rf_sub(rf_matmul(Minv, rf_matmul(B, Mr)), rf_matmul(Minv, rf_derivative(Mr)))
    ok = all(x.den.degree == x.den.valuation() for row in N for x in row)
    return ok and N == T.N, N


def local_certificate(B: Matrix, T: TransformMatrix, a: KElement) -> tuple[bool, Matrix]:
    """Recompute ``N`` for a transform over ``K(a)`` and check it is regular at ``a``."""
    Mr = [[KRatFun(x) for x in row] for row in T.M]
    Minv = rf_inverse(Mr)
    N = rf_sub(rf_matmul(Minv, rf_matmul(B, Mr)), rf_matmul(Minv, rf_derivative(Mr)))
    return pole_order(N, a) == 0, N


@dataclass
class PointData:
    """Everything computed at one representative root of a factor of ``u_0``."""

    factor: KPoly
    roots: list[AlgebraicNumber]
    extension: Extension
    transform: TransformMatrix | None
    direct: list[list[KElement]]
    system: Matrix
    cap: int = 0

    @property
    def alpha(self) -> KElement:
        return self.extension.alpha

    def ensure_transform(self) -> TransformMatrix:
        if self.transform is None:
            Bn, M, used = desingularize_at(self.system, self.alpha, self.cap)
            self.transform = TransformMatrix(self.extension.field, M, Bn, _det_poly(M), used, [self.alpha])
        return self.transform

    def M_at_alpha(self) -> list[list[KElement]]:
        return self.ensure_transform().at(self.alpha)


@dataclass
class Desingularization:
    system: SystemMatrix
    roots: RootSet
    points: list[PointData]
    global_transform: TransformMatrix | None
    iteration_cap: int
    fast: bool = False


def desingularize(S: SystemMatrix, roots: RootSet | None = None, iteration_cap: int | None = None,
                  fast: bool = False) -> Desingularization:
    """Process every nonzero root of ``u_0``; global when all roots lie in K."""
    K = S.u0.field
    if roots is None:
        roots = nonzero_roots(S)
    cap = iteration_cap if iteration_cap is not None else default_iteration_cap(S, roots)
    gT = None
    if not fast and all(g.factor.degree == 1 for g in roots.groups):
        gT = compute_M(S, roots, cap)
    points = []
    steps = 0
    for g in roots.groups:
        ext = compose_extension(K, g.roots[0])
        # roots[0] is the representative; conjugates reuse its computation
        L, a = ext.field, ext.alpha
        B = [[x.map(ext) for x in row] for row in S.B]
        k = pole_order(B, a)
        direct = relations_at_singularity(B, a)[1] if k > 0 else []
        if gT is not None and L is K:
            T = gT
        elif fast and k > 0 and _direct_pins(direct, 0) is not None:
            T = None  # computed on demand
        else:
            Bn, M, used = desingularize_at(B, a, cap)
            steps += used
            T = TransformMatrix(L, M, Bn, _det_poly(M), used, [a])
        points.append(PointData(g.factor, g.roots, ext, T, direct, B, cap))
    return Desingularization(S, roots, points, gT, cap, fast)


def _direct_pins(rows: list[list[KElement]], j: int) -> KElement | None:
    """Value of ``f^(j)`` forced by a relation supported on ``{1, f^(j)}``."""
    idx = j + 1
    for row in rows:
        if row[idx].is_zero():
            continue
        if all(row[t].is_zero() for t in range(1, len(row)) if t != idx):
            return -row[0] / row[idx]
    return None


def conjugate_value(v: KElement, ext: Extension, alpha: AlgebraicNumber) -> AlgebraicNumber:
    """Value at a conjugate root: ``v`` is a polynomial in ``b + k*alpha``."""
    if v.is_rational():
        return AlgebraicNumber.from_rational(v.rational())
    if ext.field is ext.base:
        return AlgebraicNumber.from_element(v)
    m = minimal_polynomial_over_Q(v)
    K = ext.base
    prec = DEFAULT_PREC
    while True:
        with ctx.workprec(prec):
            gamma = K.root(prec) + ext.shift * alpha.enclosure(prec)
            acc = acb(0)
            for c in reversed(v.poly.coeffs()):
                acc = acc * gamma + acb(arb(c))
        roots = isolate_roots(m, prec)
        hits = [r for r in roots if r.overlaps(acc)]
        if len(hits) == 1:
            return AlgebraicNumber(m, hits[0])
        prec *= 2
        if prec > MAX_PREC:  # pragma: no cover
            raise ArithmeticError("could not place the conjugate value")


@dataclass
class ExceptionalPoint:
    alpha: AlgebraicNumber
    value: AlgebraicNumber
    certificate: dict


@dataclass
class ExceptionalSet:
    derivative: int
    entries: list[ExceptionalPoint]

    def as_pairs(self) -> set[tuple[AlgebraicNumber, AlgebraicNumber]]:
        return {(e.alpha, e.value) for e in self.entries}

    def points(self) -> list[AlgebraicNumber]:
        return [e.alpha for e in self.entries]


def _cokernel_value(Malpha: list[list[KElement]], row: int) -> KElement | None:
    """``-beta`` when ``(beta, 0.., 1 at row, 0..)`` is in the left kernel of M(alpha)."""
    target = Malpha[row]
    if any(not target[j].is_zero() for j in range(1, len(target))):
        return None
    return target[0]


def _point_value(pd: PointData, j: int, fast: bool) -> tuple[KElement | None, dict]:
    cert: dict = {}
    direct = _direct_pins(pd.direct, j) if pd.direct else None
    if direct is not None:
        cert["direct_relation"] = [x for x in pd.direct[[i for i, r in enumerate(pd.direct)
                                                          if not r[j + 1].is_zero()][0]]]
    if fast and direct is not None:
        cert["kind"] = "direct"
        return direct, cert
    Ma = pd.M_at_alpha()
    val = _cokernel_value(Ma, j + 1)
    cert["kind"] = "cokernel"
    if val is not None:
        lam = [pd.extension.field.zero] * len(Ma)
        lam[0] = -val
        lam[j + 1] = pd.extension.field.one
        cert["vector"] = lam
    if direct is not None and (val is None or val != direct):
        raise InternalInconsistencyError(
            "direct relation and terminal cokernel test disagree")
    return val, cert


def exceptional_derivative_values(D: Desingularization, j: int, f: LazySeries | None = None) -> ExceptionalSet:
    """Points where ``f^(j)`` is algebraic (0 included when ``f`` is given)."""
    s = D.system.dim - 1
    if not 0 <= j <= s - 1:
        raise ValueError(f"derivative index must lie in 0..{s - 1}")
    entries = []
    if f is not None:
        c = f.coefficients(j)[j]
        fact = 1
        for t in range(2, j + 1):
            fact *= t
        entries.append(ExceptionalPoint(AlgebraicNumber.from_rational(0),
                                        AlgebraicNumber.from_element(c * fact),
                                        {"kind": "taylor", "index": j}))
    for pd in D.points:
        val, cert = _point_value(pd, j, D.fast)
        if val is None:
            continue
        cert["field"] = pd.extension.field
        cert["value_element"] = val
        for alpha in pd.roots:
            entries.append(ExceptionalPoint(alpha, conjugate_value(val, pd.extension, alpha), cert))
    return ExceptionalSet(j, entries)


def exceptional_points(D: Desingularization, roots: RootSet | None, f: LazySeries) -> ExceptionalSet:
    """The complete set of algebraic points where ``f`` takes an algebraic value."""
    return exceptional_derivative_values(D, 0, f)


def exceptional_set_for(eq: InhomEq, S: SystemMatrix, f: LazySeries, fast: bool = False,
                        iteration_cap: int | None = None) -> tuple[Desingularization, ExceptionalSet]:
    D = desingularize(S, iteration_cap=iteration_cap, fast=fast)
    return D, exceptional_points(D, D.roots, f)


# decomposition f = p + prod (z - alpha_j)^{m_j} g

def _higher_rows(T: TransformMatrix, count: int) -> list[list[list[KRatFun]]]:
    """``Phi_i`` with ``v^(i) = Phi_i w``: ``Phi_0 = M``, ``Phi_{i+1} = Phi_i' + Phi_i N``."""
    Phi = [[KRatFun(x) for x in row] for row in T.M]
    out = [Phi]
    for _ in range(count - 1):
        Phi = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(rf_derivative(Phi), rf_matmul(Phi, T.N))]
        out.append(Phi)
    return out


@dataclass
class Decomposition:
    p: KPoly
    points: list[AlgebraicNumber]
    multiplicities: list[int]
    values: list[list[KElement]]
    g: LazySeries
    elements: list[KElement] = dc_field(default_factory=list)


class QuotientSeries(LazySeries):
    """``(f - p) / prod (z - alpha_j)^{m_j}`` expanded at 0."""

    def __init__(self, f: LazySeries, p: KPoly, den: KPoly):
        self.f, self.p, self.den = f, p, den
        self.field = f.field

    def coefficients(self, upto: int) -> list[KElement]:
        c = self.f.coefficients(upto)
        num = [c[n] - self.p[n] for n in range(upto + 1)]
        return series_div(num, list(self.den.coeffs), upto + 1, self.field)


def polynomial_part_decomposition(D: Desingularization, exc: ExceptionalSet, f: LazySeries,
                                  max_multiplicity: int = 64) -> Decomposition:
    """Hermite interpolant ``p`` of the algebraic derivative values at the
    nonzero exceptional points, their multiplicities, and the quotient series."""
    K = f.field
    nonzero = [e for e in exc.entries if not (e.alpha.is_rational() and e.alpha.rational() == 0)]
    if not nonzero:
        raise ValueError("no nonzero exceptional point")
    pts, mults, vals = [], [], []
    for pd in D.points:
        if not any(e.alpha in pd.roots for e in nonzero):
            continue
        if pd.extension.field is not K:
            raise NotImplementedError("decomposition needs exceptional points in the coefficient field")
        a = pd.alpha
        Phis = None
        count = 2
        while True:
            Phis = _higher_rows(pd.ensure_transform(), count)
            row = [x(a) for x in Phis[-1][1]]
            if any(not x.is_zero() for x in row[1:]):
                break
            if count > max_multiplicity:  # pragma: no cover
                raise RuntimeError("derivative values stay algebraic beyond the multiplicity limit")
            count += 1
        m = count - 1
        derivs = [Phis[i][1][0](a) for i in range(m)]
        pts.append(a)
        mults.append(m)
        vals.append(derivs)
    p = hermite_interpolate(K, pts, mults, vals)
    den = KPoly.constant(K, 1)
    for a, m in zip(pts, mults):
        den = den * KPoly(K, [-a, K.one]) ** m
    algs = [AlgebraicNumber.from_element(a) for a in pts]
    return Decomposition(p, algs, mults, vals, QuotientSeries(f, p, den), pts)


def hermite_interpolate(K: NumberField, pts: list[KElement], mults: list[int],
                        vals: list[list[KElement]]) -> KPoly:
    """Polynomial of degree < sum(mults) with prescribed derivatives."""
    from .linalg import k_nullspace  # local: only used here

    n = sum(mults)
    rows = []
    for a, m, vs in zip(pts, mults, vals):
        for i in range(m):
            # i-th derivative of z^e at a, for e < n, augmented with -value
            row = []
            for e in range(n):
                if e < i:
                    row.append(K.zero)
                else:
                    coef = 1
                    for t in range(i):
                        coef *= e - t
                    row.append(a ** (e - i) * coef)
            row.append(-vs[i])
            rows.append(row)
    ker = k_nullspace(rows, K, n + 1)
    for v in ker:
        if not v[n].is_zero():
            inv = v[n].inverse()
            return KPoly(K, [x * inv for x in v[:n]])
    raise InternalInconsistencyError("Hermite interpolation system is singular")  # pragma: no cover


__all__ = [
    "Decomposition",
    "Desingularization",
    "ExceptionalPoint",
    "ExceptionalSet",
    "IterationCapExceeded",
    "PointData",
    "TransformMatrix",
    "compute_M",
    "split_system",
    "conjugate_value",
    "desingularize",
    "desingularize_at",
    "exceptional_derivative_values",
    "exceptional_points",
    "hermite_interpolate",
    "local_certificate",
    "polynomial_part_decomposition",
    "relations_at_singularity",
    "remove_singularity",
    "terminal_certificate",
]
