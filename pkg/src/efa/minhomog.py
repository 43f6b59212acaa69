"""Minimal homogeneous operator annihilating an E-function.

Candidates come from the left kernel of the block-Toeplitz sieve matrix built
from truncated expansions of ``f, f', ..., f^(r)``.  A candidate ``M`` is
accepted only after an exact proof that ``M f = 0``: ``M f`` is annihilated by
``A = annihilator_of_image(L, M)``, and a power-series solution of ``A`` whose
first ``m_A`` coefficients vanish is zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .arith import KElement
from .linalg import k_nullspace, nullity_mod_p
from .operators import DiffOp, annihilator_of_image, to_recurrence
from .poly import KPoly
from .series import EFunctionInput, InputValidationError, LazySeries, RecurrenceSeries, derivative_streams

N_LIMIT = 1 << 14


class SieveLimitExceeded(RuntimeError):
    """The truncation order needed to separate candidates passed ``N_LIMIT``."""


@dataclass
class SieveMatrix:
    """Rows indexed by (j, t), columns by n; entry = coefficient n - t of g_j."""

    r: int
    delta: int
    N: int
    rows: list[list[KElement]]

    def transpose(self) -> list[list[KElement]]:
        return [list(col) for col in zip(*self.rows)]


def sieve_matrix(g: list[LazySeries], delta: int, N: int) -> SieveMatrix:
    K = g[0].field
    rows = []
    for gj in g:
        c = gj.coefficients(N)
        for t in range(delta + 1):
            rows.append([c[n - t] if n >= t else K.zero for n in range(N + 1)])
    return SieveMatrix(len(g) - 1, delta, N, rows)


def _decode(v: list[KElement], r: int, delta: int) -> list[KPoly]:
    K = v[0].field
    return [KPoly(K, v[j * (delta + 1):(j + 1) * (delta + 1)]) for j in range(r + 1)]


def cokernel_candidates(g: list[LazySeries], delta: int, N: int) -> list[list[KPoly]]:
    """Polynomial tuples ``(P_0..P_r)`` of degree <= delta with
    ``ord_0(sum P_j g_j) >= N + 1``, as a basis of the left kernel."""
    S = sieve_matrix(g, delta, N)
    K = g[0].field
    ncols = (S.r + 1) * (delta + 1)
    kernel = k_nullspace(S.transpose(), K, ncols)
    return [_decode(v, S.r, delta) for v in kernel]


def _cokernel_nullity(g: list[LazySeries], delta: int, N: int) -> int:
    S = sieve_matrix(g, delta, N)
    K = g[0].field
    ncols = (S.r + 1) * (delta + 1)
    nul = nullity_mod_p(S.transpose(), K, ncols)
    return ncols if nul is None else nul


def series_refutation(M: DiffOp, f: LazySeries, order: int) -> int | None:
    """Index of the first nonzero coefficient of ``M f`` up to ``order``, if any.

    A hit is an exact disproof of ``M f = 0``; no hit proves nothing.
    """
    image = M.apply_series(f.coefficients(order + M.order))[: order + 1]
    return next((n for n, c in enumerate(image) if not c.is_zero()), None)


def certify_relation(L: DiffOp, M_cand: DiffOp, f: LazySeries, screen: int = 64) -> bool:
    """Exact proof (or refutation) that ``M_cand`` annihilates ``f``.

    ``L`` must annihilate ``f``.  A cheap series screen to ``screen`` terms
    runs first; only survivors pay for the annihilator computation.
    """
    if series_refutation(M_cand.primitive(), f, screen) is not None:
        return False
    return certification_data(L, M_cand, f)[0]


def certification_data(L: DiffOp, M_cand: DiffOp, f: LazySeries) -> tuple[bool, DiffOp, int]:
    M = M_cand.primitive()
    A = annihilator_of_image(L, M)
    m_A = to_recurrence(A).m
    if m_A == 0:
        return True, A, 0
    r = M.order
    coeffs = f.coefficients(m_A - 1 + r)
    image = M.apply_series(coeffs)[:m_A]
    return all(c.is_zero() for c in image), A, m_A


@dataclass
class MinOperatorResult:
    operator: DiffOp
    order: int
    degree: int
    minimal_within_cap: bool
    degree_cap: int
    certificate: dict = dc_field(default_factory=dict)
    log: list[str] = dc_field(default_factory=list)


def _to_operator(P: list[KPoly]) -> DiffOp:
    K = P[0].field
    return DiffOp(K, P).primitive()


def _search_order(L: DiffOp, f: LazySeries, g: list[LazySeries], r: int, cap: int, log: list[str],
                  n_start: int | None = None, max_tries: int = 4):
    """Certified order-r relation of minimal degree <= cap, or None."""
    N_cap = (r + 1) * (cap + 1) + 10
    if _cokernel_nullity(g, cap, N_cap) == 0:
        log.append(f"order {r}: no relation of degree <= {cap} (sieve at N={N_cap} has full rank)")
        return None
    rejected = 0
    for delta in range(cap + 1):
        N = n_start if n_start is not None else (r + 1) * (delta + 1) + 10
        while True:
            if _cokernel_nullity(g, delta, N) == 0:
                break
            cands = [c for c in cokernel_candidates(g, delta, N) if not c[r].is_zero()]
            if not cands:
                break
            for P in cands[:max_tries]:
                M = _to_operator(P)
                hit = series_refutation(M, f, 2 * N + 16)
                if hit is not None:
                    log.append(f"order {r}, degree {delta}, N={N}: candidate rejected "
                               f"(coefficient {hit} of M f is nonzero)")
                    rejected += 1
                    continue
                ok, A, m_A = certification_data(L, M, f)
                log.append(f"order {r}, degree {delta}, N={N}: candidate "
                           f"{'certified' if ok else 'rejected'} (m_A={m_A})")
                if ok:
                    return M, {"r": r, "delta": delta, "N": N, "annihilator": A,
                               "m_A": m_A, "rejected": rejected}
                rejected += 1
            N *= 2
            if N > N_LIMIT:  # pragma: no cover - spurious kernels die out long before
                raise SieveLimitExceeded(f"sieve truncation order exceeded {N_LIMIT} at order {r}, degree {delta}")
    return None


def find_min_operator(inp: EFunctionInput, degree_cap: int | None = None,
                      n_start: int | None = None) -> MinOperatorResult:
    """Certified minimal-order operator annihilating the input function.

    ``n_start`` overrides the first sieve truncation order (tests use a tiny
    value to provoke spurious candidates; certification still decides).
    """
    L = inp.operator
    f = RecurrenceSeries(inp)
    if degree_cap is None:
        degree_cap = 4 * L.degree + 16
    if degree_cap < L.degree:
        raise InputValidationError(f"degree cap {degree_cap} is below the operator degree {L.degree}", "operator", degree_cap)
    r0 = L.order
    check = f.coefficients(max(inp.recurrence.m, 1) - 1)
    if all(c.is_zero() for c in check):
        raise InputValidationError("the input function is identically zero", "initial-coefficients")
    log: list[str] = []
    g = derivative_streams(f, r0)
    for r in range(1, r0):
        found = _search_order(L, f, g[: r + 1], r, degree_cap, log, n_start)
        if found is not None:
            M, cert = found
            return MinOperatorResult(M, M.order, M.degree, M.order >= 2, degree_cap, cert, log)
    log.append(f"order {r0}: input operator is minimal within the degree cap")
    cert = {"r": r0, "delta": L.degree, "N": None, "annihilator": None, "m_A": 0, "rejected": 0}
    return MinOperatorResult(L, r0, L.degree, r0 >= 2, degree_cap, cert, log)


__all__ = [
    "MinOperatorResult",
    "SieveLimitExceeded",
    "SieveMatrix",
    "certify_relation",
    "cokernel_candidates",
    "find_min_operator",
    "series_refutation",
    "sieve_matrix",
]
