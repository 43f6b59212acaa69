"""
Step by step: where does f(z) = sum n^2 C(2n,n)/(n+1)^2 (z/2)^(n+1)/n! take algebraic values?
================================================================================================

Each stage of the pipeline is called on its own so the intermediate objects
can be inspected.  ``efa analyze`` runs the same chain in one go.
"""

from pathlib import Path

from efa.arith import QQ, AlgebraicNumber
from efa.desingular import desingularize, exceptional_points, polynomial_part_decomposition, relations_at_singularity
from efa.inhomog import minimal_inhomogeneous, normalize
from efa.io import parse_input
from efa.minhomog import find_min_operator
from efa.numeric import evaluate_series
from efa.ratsol import LinearSystem, rational_solution_basis

DATA = Path(__file__).resolve().parent.parent / "src" / "efa" / "data"
inp = parse_input(DATA / "central_binomial.json")
f = inp.series()
print("first coefficients:", f.coefficients(6))

# the operator shipped with the input is already minimal; the sieve confirms it
res = find_min_operator(inp)
print("L_min:", res.operator)
for line in res.log:
    print("   ", line)

# the companion system has a rational solution, so there is a relation of order 2 with a constant
print("rational solutions:", rational_solution_basis(LinearSystem.companion(res.operator)))
eq = minimal_inhomogeneous(res.operator, f)
print(f"relation of order {eq.s}, constant c = {eq.c}, u_0 = {eq.u0}")

# the only nonzero singularity is z = 1; its leading pole coefficient already pins f(1)
S = normalize(eq)
k, C = relations_at_singularity(S.B, QQ(1))
print(f"pole of order {k} at 1, relations on (1, f(1), f'(1)):", C)

D = desingularize(S)
exc = exceptional_points(D, D.roots, f)
for e in exc.entries:
    print(f"f({e.alpha.approx()}) = {e.value.approx()}   via {e.certificate['kind']}")

# f = 1/2 + (z - 1) g(z)
dec = polynomial_part_decomposition(D, exc, f)
print("p =", dec.p, " multiplicities", dec.multiplicities, " g starts", dec.g.coefficients(5))

# numeric sanity check at 50 digits
ev = evaluate_series(f, AlgebraicNumber.from_rational(1), digits=50)
print("f(1) ~", ev.enclosure.str(50))
