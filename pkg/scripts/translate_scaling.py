"""How large tau gets as epsilon shrinks: zeta(500) against its (pi/3, pi/5) twist."""
import argparse
import time

import mpmath

from dirichlet_translates import Rectangle, TwistVector, find_translate, twist, zeta_series
from dirichlet_translates.rigidity import BudgetError, SearchExhausted


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=500)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.5, 0.3, 0.2, 0.15, 0.12, 0.1])
    args = ap.parse_args()
    F = zeta_series(args.n_max).series
    Y = TwistVector.sparse({0: mpmath.pi / 3, 1: mpmath.pi / 5}, length=len(F.exponents.basis))
    f = twist(F, Y)
    K = Rectangle(1.6, 2.2, -1, 1)
    print("eps,active,delta,log10_tau,bound,strategy,seconds")
    for eps in args.eps:
        t0 = time.perf_counter()
        try:
            c = find_translate([F], [f], [K], eps)
        except (BudgetError, SearchExhausted) as exc:
            print(f"{eps},,,,,{type(exc).__name__},{time.perf_counter() - t0:.2f}")
            continue
        lt = float(mpmath.log10(abs(c.tau))) if c.tau else 0.0
        strat = c.kronecker.strategy if c.kronecker else "-"
        print(f"{eps},{len(c.budget.active_coords)},{c.budget.delta:.3g},{lt:.1f},{max(c.report.bound):.4f},{strat},{time.perf_counter() - t0:.2f}")


if __name__ == "__main__":
    main()
