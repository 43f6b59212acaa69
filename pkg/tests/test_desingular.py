import pytest

from conftest import load
from efa.arith import QQ, AlgebraicNumber
from efa.desingular import (
    compute_M,
    desingularize,
    exceptional_derivative_values,
    exceptional_set_for,
    local_certificate,
    pole_order,
    polynomial_part_decomposition,
    relations_at_singularity,
    remove_singularity,
    split_system,
    terminal_certificate,
)
from efa.inhomog import minimal_inhomogeneous, normalize
from efa.linalg import rf_matmul
from efa.minhomog import find_min_operator
from efa.poly import KPoly, KRatFun
from oracles import exp_coefficients

z = KPoly.z(QQ)
Q = AlgebraicNumber.from_rational


def system(name):
    inp = load(name)
    f = inp.series()
    eq = minimal_inhomogeneous(find_min_operator(inp).operator, f)
    return eq, normalize(eq), f


def test_pole_relation_for_shifted_exp():
    _, S, _ = system("shifted_exp")
    k, C = relations_at_singularity(S.B, QQ(1))
    assert k == 1
    assert C == [[QQ(0), QQ(0)], [QQ(0), QQ(1)]]
    with pytest.raises(ValueError):
        relations_at_singularity(S.B, QQ(2))


def test_single_shear_for_shifted_exp():
    _, S, _ = system("shifted_exp")
    Bn, T, c, p = remove_singularity(S.B, QQ(1))
    assert p == 1
    assert T == [[KPoly.constant(QQ, 1), KPoly.constant(QQ, 0)], [KPoly.constant(QQ, 0), z - 1]]
    assert pole_order(Bn, QQ(1)) == 0


def _shear_identity_holds(B, Bn, T):
    # v = T w, v' = B v, w' = Bn w  <=>  T Bn + T' = B T
    Tr = [[KRatFun(x) for x in row] for row in T]
    lhs = rf_matmul(Tr, Bn)
    lhs = [[a + b.derivative() for a, b in zip(r1, r2)] for r1, r2 in zip(lhs, Tr)]
    return lhs == rf_matmul(B, Tr)


def test_central_binomial_needs_two_shears_at_one():
    _, S, _ = system("central_binomial")
    B = S.B
    steps = 0
    while pole_order(B, QQ(1)) > 0:
        Bn, T, _, _ = remove_singularity(B, QQ(1))
        assert _shear_identity_holds(B, Bn, T)
        B = Bn
        steps += 1
    assert steps == 2


def test_global_transform_certificate():
    for name in ("central_binomial", "shifted_exp", "two_exponentials"):
        _, S, _ = system(name)
        T = compute_M(S)
        ok, _ = terminal_certificate(S, T)
        assert ok, name


def test_local_transform_over_extension():
    _, S, _ = system("sqrt2_points")
    D = desingularize(S)
    assert D.global_transform is None
    for pd in D.points:
        ok, _ = local_certificate(pd.system, pd.ensure_transform(), pd.alpha)
        assert ok


def test_global_transform_over_splitting_field():
    _, S, _ = system("sqrt2_points")
    SL = split_system(S)
    assert SL.u0.field.degree == 2
    T = compute_M(SL)
    ok, N = terminal_certificate(SL, T)
    assert ok and not T.det.is_zero()
    assert split_system(system("central_binomial")[1]).u0.field is QQ


def _series_times_poly(p, s, upto):
    out = [QQ.zero] * (upto + 1)
    for t, a in enumerate(p.coeffs):
        for n in range(t, upto + 1):
            out[n] = out[n] + a * s[n - t]
    return out


def test_sheared_vector_solves_new_system_to_order_80():
    # w = T^{-1} v on the actual solution v = (1, f, f') of the central binomial system
    _, S, f = system("central_binomial")
    N = 80
    c = f.coefficients(N + 3)
    v = [[QQ.one] + [QQ.zero] * (N + 2), c, [c[n + 1] * (n + 1) for n in range(N + 2)]]
    Bn, T, cvec, p = remove_singularity(S.B, QQ(1))
    # w_p = (c . v) / (z - 1), expanded at 0
    comb = [sum((cvec[i] * v[i][n] for i in range(3)), QQ.zero) for n in range(N + 2)]
    wp, acc = [], QQ.zero
    for n in range(N + 2):  # 1/(z-1) = -sum z^n
        acc = acc + comb[n]
        wp.append(-acc)
    w = [v[i] if i != p else wp for i in range(3)]
    for i in range(3):
        den = KPoly.constant(QQ, 1)
        for x in Bn[i]:
            den = den * x.den
        deriv = [w[i][n + 1] * (n + 1) for n in range(N)]
        lhs = _series_times_poly(den, deriv, N - 4)
        rhs = [QQ.zero] * (N - 3)
        for j in range(3):
            coeff = (Bn[i][j] * KRatFun(den))
            assert coeff.is_polynomial()
            part = _series_times_poly(coeff.num, w[j], N - 4)
            rhs = [a + b for a, b in zip(rhs, part)]
        assert lhs == rhs


def test_central_binomial_cokernel_vector():
    eq, S, f = system("central_binomial")
    D = desingularize(S)
    exc = exceptional_derivative_values(D, 0, f)
    assert exc.as_pairs() == {(Q(0), Q(0)), (Q(1), Q("1/2"))}
    cert = [e.certificate for e in exc.entries if e.alpha == Q(1)][0]
    assert cert["vector"] == [QQ("-1/2"), QQ(1), QQ(0)]


def test_two_exponentials_value_and_derivative():
    _, S, f = system("two_exponentials")
    D = desingularize(S)
    assert exceptional_derivative_values(D, 0, f).as_pairs() == {(Q(0), Q(0))}
    assert exceptional_derivative_values(D, 1, f).as_pairs() == {(Q(0), Q(1)), (Q(-1), Q(0))}
    with pytest.raises(ValueError):
        exceptional_derivative_values(D, 5, f)


@pytest.mark.parametrize("fast", [False, True])
def test_fast_mode_agrees(fast):
    for name in ("central_binomial", "shifted_exp", "gaussian", "sqrt2_points"):
        eq, S, f = system(name)
        _, ref = exceptional_set_for(eq, S, f)
        _, got = exceptional_set_for(eq, S, f, fast=fast)
        assert got.as_pairs() == ref.as_pairs(), name


def test_gaussian_and_sqrt2_points():
    eq, S, f = system("gaussian")
    _, exc = exceptional_set_for(eq, S, f)
    i = AlgebraicNumber([1, 0, 1], 1j)
    three_minus_i = AlgebraicNumber([10, -6, 1], 3 - 1j)
    assert exc.as_pairs() == {(Q(0), three_minus_i), (i, Q(3))}
    eq, S, f = system("sqrt2_points")
    _, exc = exceptional_set_for(eq, S, f)
    r2 = AlgebraicNumber([-2, 0, 1], 1.41)
    mr2 = AlgebraicNumber([-2, 0, 1], -1.41)
    assert exc.as_pairs() == {(Q(0), Q(-1)), (r2, Q(1)), (mr2, Q(1))}


def test_decomposition_of_shifted_exp():
    eq, S, f = system("shifted_exp")
    D, exc = exceptional_set_for(eq, S, f)
    dec = polynomial_part_decomposition(D, exc, f)
    assert dec.p.is_zero()
    assert dec.multiplicities == [1]
    assert dec.g.coefficients(15) == [QQ(x) for x in exp_coefficients(15)]


def test_decomposition_of_central_binomial():
    eq, S, f = system("central_binomial")
    D, exc = exceptional_set_for(eq, S, f)
    dec = polynomial_part_decomposition(D, exc, f)
    assert dec.p == KPoly.constant(QQ, QQ("1/2"))
    assert dec.multiplicities == [1]
    # g = (f - 1/2)/(z - 1) reproduces f
    g = dec.g.coefficients(30)
    back = [QQ.zero] * 31
    for n in range(31):
        back[n] = (g[n - 1] if n else QQ.zero) - g[n]
    back[0] = back[0] + QQ("1/2")
    assert back == f.coefficients(30)
