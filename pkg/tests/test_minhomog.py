import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load
from efa.arith import QQ
from efa.linalg import k_nullspace
from efa.minhomog import (
    certification_data,
    certify_relation,
    cokernel_candidates,
    find_min_operator,
    series_refutation,
    sieve_matrix,
)
from efa.operators import DiffOp
from efa.poly import KPoly
from efa.series import EFunctionInput, ExplicitSeries, InputValidationError, derivative_streams

z = KPoly.z(QQ)


def apery_operator():
    return DiffOp(QQ, [-(3 + z), 1 - 22 * z - z * z, z * (3 - 11 * z), z * z])


def test_exp_candidate_at_degree_zero():
    f = load("exp").series()
    cands = cokernel_candidates(derivative_streams(f, 1), 0, 10)
    assert len(cands) == 1
    P = cands[0]
    assert DiffOp(QQ, P).same_up_to_factor(DiffOp(QQ, [-1, 1]))


def test_apery_operator_in_sieve_kernel():
    f = load("apery").series()
    cands = cokernel_candidates(derivative_streams(f, 3), 2, 40)
    assert len(cands) == 1
    assert DiffOp(QQ, cands[0]).same_up_to_factor(apery_operator())


def test_no_constant_relation_between_one_and_z():
    g = [ExplicitSeries(QQ, [1]), ExplicitSeries(QQ, [0, 1])]
    assert cokernel_candidates(g, 0, 3) == []


def test_certify_relation_accepts_and_refutes():
    f = load("exp_nonminimal").series()
    L = load("exp_nonminimal").operator
    assert certify_relation(L, DiffOp(QQ, [-1, 1]), f)
    assert not certify_relation(L, DiffOp(QQ, [0, 1]), f)
    # D - 1 + z^5 agrees with e^z only modulo z^5
    assert not certify_relation(L, DiffOp(QQ, [z ** 5 - 1, 1]), f)


def test_annihilator_route_refutes_without_the_screen():
    f = load("exp_nonminimal").series()
    L = load("exp_nonminimal").operator
    ok, A, m_A = certification_data(L, DiffOp(QQ, [z ** 5 - 1, 1]), f)
    assert not ok and m_A > 5
    ok, _, _ = certification_data(L, DiffOp(QQ, [-1, 1]), f)
    assert ok


def test_series_refutation_index():
    f = load("exp").series()
    assert series_refutation(DiffOp(QQ, [z ** 5 - 1, 1]), f, 20) == 5
    assert series_refutation(DiffOp(QQ, [-1, 1]), f, 20) is None


def test_min_operator_of_exp_from_nonminimal_input():
    res = find_min_operator(load("exp_nonminimal"))
    assert res.operator.same_up_to_factor(DiffOp(QQ, [-1, 1]))
    assert res.order == 1 and res.certificate["m_A"] >= 0


def test_apery_operator_is_already_minimal():
    inp = load("apery")
    res = find_min_operator(inp)
    assert res.order == 3
    assert res.operator.same_up_to_factor(apery_operator())
    assert res.minimal_within_cap


def test_two_exponentials_order_drops():
    full = find_min_operator(load("two_exponentials_nonminimal"))
    base = find_min_operator(load("two_exponentials"))
    assert full.order == base.order
    assert full.operator.same_up_to_factor(base.operator)
    assert certify_relation(load("two_exponentials_nonminimal").operator, full.operator,
                            load("two_exponentials_nonminimal").series())


def test_no_lower_order_relation_within_cap():
    inp = load("central_binomial")
    res = find_min_operator(inp)
    r, cap = res.order, res.degree_cap
    f = inp.series()
    g = derivative_streams(f, r - 1)
    N = (r + 1) * (cap + 1) + 10
    S = sieve_matrix(g, cap, N)
    assert k_nullspace(S.transpose(), QQ, r * (cap + 1)) == []


@pytest.mark.parametrize("n_start", [1, 2, 3, 5])
def test_tiny_truncation_order_still_certifies(n_start):
    ref = find_min_operator(load("two_exponentials_nonminimal"))
    res = find_min_operator(load("two_exponentials_nonminimal"), n_start=n_start)
    assert res.operator.same_up_to_factor(ref.operator)
    assert res.certificate["rejected"] > 0


def test_degree_cap_below_operator_degree_rejected():
    with pytest.raises(InputValidationError):
        find_min_operator(load("apery"), degree_cap=1)


def test_zero_function_rejected():
    with pytest.raises(InputValidationError):
        find_min_operator(EFunctionInput(QQ, DiffOp(QQ, [-1, 1]), [0]))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2), st.integers(3, 25))
def test_candidates_kill_the_series_to_truncation_order(delta, N):
    f = load("central_binomial").series()
    g = derivative_streams(f, 2)
    for P in cokernel_candidates(g, delta, N):
        total = [QQ.zero] * (N + 1)
        for Pj, gj in zip(P, g):
            c = gj.coefficients(N)
            for t, a in enumerate(Pj.coeffs):
                for n in range(t, N + 1):
                    total[n] = total[n] + a * c[n - t]
        assert all(x.is_zero() for x in total)
