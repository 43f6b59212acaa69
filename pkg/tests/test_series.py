import threading

import pytest

from conftest import load
from efa.arith import QQ
from efa.operators import DiffOp
from efa.poly import KPoly, KRatFun
from efa.series import (
    EFunctionInput,
    ExplicitSeries,
    InputValidationError,
    InternalInconsistencyError,
    coefficients,
    combination_constant_term,
)
from oracles import apery_coefficients, central_binomial_coefficients

z = KPoly.z(QQ)
Z = KRatFun.z(QQ)


def test_exp_coefficients():
    f = EFunctionInput(QQ, DiffOp(QQ, [-1, 1]), [1]).series()
    assert coefficients(f, 5) == [QQ(x) for x in ("1", "1", "1/2", "1/6", "1/24", "1/120")]


def test_central_binomial_prefix():
    f = load("central_binomial").series()
    assert coefficients(f, 3) == [QQ(0), QQ(0), QQ("1/8"), QQ("1/6")]
    assert coefficients(f, 40) == [QQ(x) for x in central_binomial_coefficients(40)]


def test_apery_prefix():
    # a_2 = 1 + 2^2*3 + 6 = 19, so f_2 = 19/2
    f = load("apery").series()
    assert coefficients(f, 2) == [QQ(1), QQ(3), QQ("19/2")]
    assert coefficients(f, 40) == [QQ(x) for x in apery_coefficients(40)]


def test_prefix_stability():
    f = load("apery").series()
    short = list(coefficients(f, 10))
    coefficients(f, 60)
    assert coefficients(f, 10) == short


def test_concurrent_extension_is_consistent():
    f = load("central_binomial").series()
    out = {}

    def work(k):
        out[k] = coefficients(f, 30 + 5 * k)

    threads = [threading.Thread(target=work, args=(k,)) for k in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    ref = coefficients(f, 60)
    assert all(v == ref[: len(v)] for v in out.values())


def test_short_initial_segment_rejected():
    with pytest.raises(InputValidationError) as e:
        EFunctionInput(QQ, DiffOp(QQ, [-z, z - 1]), [-1])
    assert e.value.clause == "initial-coefficients"
    assert "start-up length" in str(e.value)


def test_oracle_flag_required():
    with pytest.raises(InputValidationError) as e:
        EFunctionInput(QQ, DiffOp(QQ, [-1, 1]), [1], oracle_flag=False)
    assert e.value.clause == "oracle"
    assert "not guaranteed to be an E-function" in str(e.value)


def test_inconsistent_seed_rejected():
    with pytest.raises(InputValidationError) as e:
        EFunctionInput(QQ, DiffOp(QQ, [-z, z - 1]), [-1, 5])
    assert e.value.clause == "initial-coefficients" and e.value.datum == 1


def test_undetermined_index_named():
    # z f'' - f' = 0 has f = 1 + c z^2: f_2 is free and must be supplied
    inp = EFunctionInput(QQ, DiffOp(QQ, [0, -1, z]), [1, 0, 0])
    assert coefficients(inp.series(), 5)[2] == QQ(0)
    with pytest.raises(InputValidationError):
        EFunctionInput(QQ, DiffOp(QQ, [0, -1, z]), [1, 0])


def test_constant_term_examples():
    zero = ExplicitSeries(QQ, [QQ(0)] * 30)
    assert combination_constant_term([KRatFun.constant(QQ, 1)], zero) == QQ(0)
    zs = ExplicitSeries(QQ, [QQ(0), QQ(1)] + [QQ(0)] * 30)
    assert combination_constant_term([KRatFun.constant(QQ, 1) / Z], zs) == QQ(1)


def test_constant_term_of_central_binomial_relation():
    f = load("central_binomial").series()
    Q = [KRatFun.constant(QQ, 1),
         KRatFun((1 - z) * (1 - z + 2 * z * z), z * (1 + z)),
         KRatFun((1 - z) ** 2, 1 + z)]
    assert combination_constant_term(Q, f) == QQ("1/2")


def test_nonconstant_combination_is_an_internal_error():
    f = load("exp").series()
    with pytest.raises(InternalInconsistencyError):
        combination_constant_term([KRatFun.constant(QQ, 1)], f)
