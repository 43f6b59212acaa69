"""
Exponential polynomials: conjugate points and derivatives
=========================================================

For f = (z^2 - 2) e^z + 1 the exceptional points are 0 and the two square
roots of 2.  They are found over Q even though they live in Q(sqrt 2).  For
f = z e^z + z^2 e^(2z) no nonzero point is exceptional, while f'(-1) = 0.
"""

from efa.arith import QQ
from efa.desingular import desingularize, exceptional_derivative_values
from efa.inhomog import minimal_inhomogeneous, normalize
from efa.minhomog import find_min_operator
from efa.operators import DiffOp, op_mul
from efa.poly import KPoly
from efa.report import AnalysisConfig, analyze
from efa.series import EFunctionInput

z = KPoly.z(QQ)

# (z^2 - 2) e^z + 1 is killed by the third-order operator (D - 1)^3 D
D1 = DiffOp(QQ, [-1, 1])
L = op_mul(op_mul(op_mul(D1, D1), D1), DiffOp.d(QQ))
# z^2 e^z contributes n(n-1)/n!, -2 e^z contributes -2/n!, and the 1 sits at n = 0
coeffs = []
fact = 1
for n in range(6):
    fact = fact * n if n else 1
    coeffs.append(QQ(n * (n - 1) - 2) / fact + (QQ(1) if n == 0 else QQ(0)))
inp = EFunctionInput(QQ, L, coeffs)

rep = analyze(inp, AnalysisConfig(digits=30))
print("L_min:", rep.min_operator)
for e in rep.exceptional:
    print(f"  f({e.alpha.approx(20)}) = {e.value.approx(20)}")
print("points processed over:", [str(p.field.min_poly) for p in rep.points])
for note in rep.notes:
    print("  note:", note)

# z e^z + z^2 e^(2z), operator cleared by z^2 (1 + z), and the derivative variant
c = [QQ(0), QQ(1), QQ(2), QQ(5) / 2, QQ(13) / 6]
L2 = DiffOp(QQ, [2 * (z + 1) ** 3, -(3 * z * z + 6 * z + 2) * z, z ** 3 + z * z])
inp2 = EFunctionInput(QQ, L2, c)
f2 = inp2.series()
eq = minimal_inhomogeneous(find_min_operator(inp2).operator, f2)
D = desingularize(normalize(eq))
for j in (0, 1):
    got = exceptional_derivative_values(D, j, f2)
    print(f"f^({j}):", sorted((e.alpha.approx(), e.value.approx()) for e in got.entries))
