"""Share of tau in [-T, T] giving an eps-translate, against the Kronecker box density."""
import math

import mpmath

from dirichlet_translates import Rectangle, TwistVector, density_of_translates, twist, zeta_series
from dirichlet_translates.kronecker import KroneckerProblem, density_estimate

F = zeta_series(200).series
Y = TwistVector.sparse({0: mpmath.pi / 3, 1: mpmath.pi / 5}, length=len(F.exponents.basis))
f = twist(F, Y)
K = Rectangle(2.5, 3.0, -0.5, 0.5)
print("T,series_density,stderr")
for T in (1e2, 1e3, 1e4, 1e5):
    d = density_of_translates([F], [f], [K], 0.3, T, samples=4000, seed=0)
    print(f"{T:g},{d.estimate:.4f},{d.stderr:.4f}")

print("\nL,delta,kronecker_density,expected")
primes = [2, 3, 5, 7]
for L in range(1, 5):
    p = KroneckerProblem.build([mpmath.log(q) for q in primes[:L]], [1.0] * L, delta=0.1)
    r = density_estimate(p, 1e5, 200_000, seed=0)
    print(f"{L},0.1,{r.estimate:.5f},{0.2 ** L:.5f}")
