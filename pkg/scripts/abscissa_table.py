"""Uniform-convergence abscissa proxies for the corpus."""
import math

from dirichlet_translates import bohr_example, dirichlet_L, sigma_uniform_estimate, smooth_zeta, zeta_series

cases = {
    "zeta": (zeta_series(int(math.exp(15)) + 10).series, [4.5 + k for k in range(11)]),
    "L mod 4": (dirichlet_L(4, 1, int(math.exp(11)) + 10).series, [4.5 + k for k in range(7)]),
    "bohr": (bohr_example(60).series, [3.5 + 2 * k for k in range(19)]),
    "smooth(2,3)": (smooth_zeta((2, 3), 2000).series, [2.5 + k for k in range(12)]),
}
print("series,estimate,last_ratios")
for name, (F, grid) in cases.items():
    e = sigma_uniform_estimate(F, grid)
    tail = " ".join(f"{r:.3f}" for r in e.ratios[-4:])
    print(f"{name},{e.estimate:.4f},{tail}")
