"""Acceptance suite: one test per criterion, each prints a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` or ``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import math
import time

import mpmath
import numpy as np
import pytest

from dirichlet_translates import (
    ConstantCoefficients,
    DirichletSeries,
    Incompatible,
    PolarCoefficients,
    Rectangle,
    TwistDetection,
    TwistVector,
    UniformBound,
    audit_budget,
    bohr_example,
    detect_twist,
    find_translate,
    helly_limit,
    limit_series,
    ordinary_spec,
    sigma_uniform_estimate,
    smooth_zeta,
    twist,
    value_set_check,
    verify_translate,
    zeta_series,
)
from dirichlet_translates.corpus import bohr_tau
from dirichlet_translates.kronecker import KroneckerProblem, density_estimate, solve
from dirichlet_translates.rigidity import resample
from dirichlet_translates.series import evaluate_at

RESULTS: dict[int, tuple[bool, str]] = {}


def record(k: int, ok: bool, detail: str, t0: float, limit: float):
    dt = time.perf_counter() - t0
    ok = bool(ok) and dt < limit
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}  ({dt:.1f}s / {limit:.0f}s)"
    RESULTS[k] = (ok, line)
    print(line)
    assert ok, line


def _wrap(x):
    return (np.asarray(x) + np.pi) % (2 * np.pi) - np.pi


# ---------------------------------------------------------------------------


def test_c01_twist_algebra():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    n_max = 64
    spec = ordinary_spec(n_max)
    L = len(spec.basis)
    worst_mod = 0.0
    worst_phase = 0.0
    for _ in range(1000):
        a = rng.normal(size=n_max) + 1j * rng.normal(size=n_max)
        a[rng.random(n_max) < 0.1] = 0
        F = DirichletSeries(spec, PolarCoefficients.from_complex(a), UniformBound(float(np.abs(a).max())))
        Y1 = TwistVector.from_angles([mpmath.mpf(v) for v in rng.uniform(-50, 50, L)], precision=128)
        Y2 = TwistVector.from_angles([mpmath.mpf(v) for v in rng.uniform(-50, 50, L)], precision=128)
        G = twist(F, Y1)
        m0, p0 = F.coefficients.polar(1, n_max + 1)
        m1, p1 = twist(G, Y2).coefficients.polar(1, n_max + 1)
        m2, p2 = twist(F, Y1 + Y2).coefficients.polar(1, n_max + 1)
        worst_mod = max(worst_mod, float(np.abs(G.coefficients.modulus(1, n_max + 1) - m0).max()))
        nz = m0 > 0
        worst_phase = max(worst_phase, float(np.abs(_wrap(p1 - p2))[nz].max()))
        assert np.array_equal(m1, m2)
    record(1, worst_mod == 0.0 and worst_phase < 1e-12, f"|b|-|a| max {worst_mod:.1e}, composition phase error {worst_phase:.2e}", t0, 10)


def test_c02_detect_round_trip():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    F = zeta_series(200).series
    spec = F.exponents
    primes = [p for p in range(2, 51) if all(p % q for q in range(2, p))]
    worst = 0.0
    ok = True
    for _ in range(5):
        Y = TwistVector.sparse({spec.basis.index_of(p): rng.uniform(0, 2 * np.pi) for p in primes}, length=len(spec.basis))
        G = twist(F, Y)
        det = detect_twist(F, G, 200)
        if not isinstance(det, TwistDetection):
            ok = False
            break
        _, want = G.coefficients.polar(1, 201)
        _, got = twist(F, det.Y).coefficients.polar(1, 201)
        worst = max(worst, float(np.abs(_wrap(got - want)).max()))
    record(2, ok and worst < 1e-9, f"max phase mismatch {worst:.2e}", t0, 10)


def test_c03_twist_abscissa():
    t0 = time.perf_counter()
    grid = [4.5 + 2 * k for k in range(9)]
    F = zeta_series(int(math.exp(21)) + 10).series
    rng = np.random.default_rng(3)
    # twist the primes up to 13
    Y = TwistVector.sparse(dict(enumerate(rng.uniform(0, 2 * np.pi, 6))), length=len(F.exponents.basis))
    G = twist(F, Y)
    eF = sigma_uniform_estimate(F, grid)
    eG = sigma_uniform_estimate(G, grid)
    gap = max(abs(a - b) for a, b in zip(eF.ratios, eG.ratios))
    ok = gap < 0.05 and abs(eF.estimate - eG.estimate) < 0.05 and 0.85 <= eF.estimate <= 1.0
    record(3, ok, f"zeta {eF.estimate:.4f}, twist {eG.estimate:.4f}, max gap on grid {gap:.3f}", t0, 60)


def _oracle_scan(beta, y, delta, R=60.0, h=1e-4):
    """Every tau in h*Z with |tau| <= R meeting the tolerance (float64)."""
    taus = np.arange(-round(R / h), round(R / h) + 1) * h
    x = (-beta * taus - y) / (2 * np.pi)
    return taus[np.abs(x - np.rint(x)) < delta]


def _indep_distance(beta, y, tau):
    with mpmath.workprec(300):
        x = (-mpmath.mpf(beta) * mpmath.mpf(tau) - mpmath.mpf(y)) / (2 * mpmath.pi)
        return float(abs(x - mpmath.nint(x)))


def test_c04_kronecker():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    y = rng.uniform(0, 2 * np.pi, 2)
    prob = KroneckerProblem.build([mpmath.log(2), mpmath.log(3)], list(y), Q=1, delta=1e-3)
    sol = solve(prob)
    d2 = [_indep_distance(b, t, sol.tau) for b, t in zip((mpmath.log(2), mpmath.log(3)), y)]
    ok = sol.found and max(d2) < 1e-3
    agree = 0
    h = 1e-4
    for _ in range(20):
        beta = float(rng.uniform(0.3, 5.0))
        yy = float(rng.uniform(0, 2 * np.pi))
        delta = float(rng.choice([1e-2, 3e-3, 1e-3]))
        p = KroneckerProblem.build([beta], [yy], delta=delta)
        grid = _oracle_scan(beta, yy, delta, h=h)
        good = len(grid) > 0
        for strat in ("cf", "lattice"):
            s = solve(p, strat, step=h)
            u = float(s.tau) / h
            on_grid = abs(u - round(u)) < 1e-6
            in_oracle = abs(float(s.tau)) > 60 or np.any(np.abs(grid - float(s.tau)) < h / 2)
            good &= s.found and _indep_distance(beta, yy, s.tau) < delta and on_grid and bool(in_oracle)
        agree += good
    ok = ok and agree == 20
    record(4, ok, f"L=2 distances {max(d2):.2e} ({sol.strategy}); cf/lattice agree with scan on {agree}/20", t0, 60)


def test_c05_density():
    t0 = time.perf_counter()
    p1 = KroneckerProblem.build([mpmath.log(2)], [1.0], delta=0.05)
    r1 = density_estimate(p1, 1e4, 100_000, seed=0)
    p2 = KroneckerProblem.build([mpmath.log(2), mpmath.log(3)], [1.0, 2.0], delta=0.05)
    r2 = density_estimate(p2, 1e4, 100_000, seed=0)
    ok = abs(r1.estimate - 0.10) <= 0.01 and abs(r2.estimate - 0.01) <= 0.005
    record(5, ok, f"L=1 {r1.estimate:.4f}, L=2 {r2.estimate:.4f}", t0, 60)


def _zeta_twist_case():
    F = zeta_series(500).series
    Y = TwistVector.sparse({0: mpmath.pi / 3, 1: mpmath.pi / 5}, length=len(F.exponents.basis))
    return F, twist(F, Y, "zeta~twist"), Y


def test_c06_end_to_end():
    t0 = time.perf_counter()
    F, f, _ = _zeta_twist_case()
    K = Rectangle(1.6, 2.2, -1, 1)
    cert = find_translate([F], [f], [K], 0.1)
    again = resample(cert, [F], [f], [K])
    ok = cert.verified and audit_budget(cert.budget) and max(again.bound) < 0.1
    record(6, ok, f"{cert.status}, tau ~ {float(cert.tau):.3e}, bound {max(cert.report.bound):.4f}, resampled {max(again.bound):.4f}", t0, 300)


def test_c07_bohr():
    t0 = time.perf_counter()
    F = bohr_example(30).series
    f = F.with_coefficients(ConstantCoefficients(-1.0), "-bohr")
    K = Rectangle(2, 3, -1, 1)
    rep = verify_translate([F], [f], [K], bohr_tau(4))
    analytic = 2 * math.exp(-18) / (1 - math.exp(-4))
    det = detect_twist(F, f, 30)
    ok = rep.sup_error[0] < 1e-7 and rep.sup_error[0] <= analytic and isinstance(det, Incompatible)
    record(7, ok, f"sup {rep.sup_error[0]:.2e} vs analytic {analytic:.2e}, equiv {det.to_json()['status']}", t0, 10)


def test_c08_helly():
    t0 = time.perf_counter()
    F = smooth_zeta((2, 3), 400).series
    taus = [m * mpmath.sqrt(2) for m in range(1, 5001)]
    table = helly_limit(taus, F.exponents.basis_values(count=2), 1e-2)
    (G,), _ = limit_series([F], table)
    ma, _ = F.coefficients.polar(1, 401)
    mb, _ = G.coefficients.polar(1, 401)
    det = detect_twist(F, G, 400)
    ok = float(table.spread.max()) < 1e-2 and np.array_equal(ma, mb) and isinstance(det, TwistDetection)
    record(8, ok, f"{len(table.indices)} indices, spread {table.spread.max():.2e}, detect {det.to_json()['status']}", t0, 60)


def test_c09_value_sets():
    t0 = time.perf_counter()
    F, f, _ = _zeta_twist_case()
    V = Rectangle(1.5, 3, -2, 2)
    v = complex(evaluate_at(f, [2.0], 500)[0])
    w = complex(evaluate_at(F, [2.0], 500)[0])
    (a,) = value_set_check(F, f, V, [v])
    (b,) = value_set_check(f, F, V, [w])
    ok = a.status == "Certified" and b.status == "Certified" and a.winding_target >= 1 and a.winding_translate >= 1
    record(9, ok, f"f(2) in S_F: {a.status} (winding {a.winding_translate}); F(2) in S_f: {b.status}", t0, 300)


def test_c10_bohr_abscissa():
    t0 = time.perf_counter()
    F = bohr_example(60).series
    grid = [2.5 + k for k in range(38)]
    est = sigma_uniform_estimate(F, grid)
    ok = est.estimate < 0.1 and max(est.ratios) < 0.1
    record(10, ok, f"estimate {est.estimate:.4f} on x <= {grid[-1]}", t0, 10)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
