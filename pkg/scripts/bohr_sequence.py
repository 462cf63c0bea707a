"""Bohr example: sup |F(s + i tau_m) + F(s)| on [2,3]x[-1,1] for tau_m = 2 pi (2m-1)!!."""
import math

from dirichlet_translates import Rectangle, bohr_example, verify_translate
from dirichlet_translates.corpus import bohr_tau
from dirichlet_translates.series import ConstantCoefficients

F = bohr_example(40).series
f = F.with_coefficients(ConstantCoefficients(-1.0))
K = Rectangle(2, 3, -1, 1)
print("m,sup_error,analytic")
for m in range(1, 9):
    r = verify_translate([F], [f], [K], bohr_tau(m), precision=256)
    # terms n > m carry the error: 2 sum_{n>m} e^{-2 lambda_n}
    analytic = 2 * math.exp(-2 * (2 * m + 1)) / (1 - math.exp(-4))
    print(f"{m},{r.sup_error[0]:.3e},{analytic:.3e}")
