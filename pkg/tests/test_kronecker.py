import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirichlet_translates.kronecker import KroneckerProblem, density_estimate, lattice_precision, solve


def oracle_distance(beta, y, tau, Q=1):
    with mpmath.workprec(400):
        x = (-mpmath.mpf(beta) * mpmath.mpf(tau) - mpmath.mpf(y)) / (2 * mpmath.pi * Q)
        return float(abs(x - mpmath.nint(x)))


def grid_scan(beta, y, delta, R, h=1e-4):
    taus = np.arange(-round(R / h), round(R / h) + 1) * h
    x = (-beta * taus - y) / (2 * np.pi)
    ok = np.abs(x - np.rint(x)) < delta
    return taus[ok]


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 20), st.floats(0, 2 * math.pi), st.sampled_from([1e-2, 1e-3, 1e-5]))
def test_exact_single_frequency(beta, y, delta):
    p = KroneckerProblem.build([beta], [y], delta=delta)
    s = solve(p, "exact")
    assert s.found and oracle_distance(beta, y, s.tau) < delta
    # least |tau|: nothing closer to 0 on a fine grid does better than half a period
    assert abs(float(s.tau)) <= math.pi / beta + 1e-9


@pytest.mark.parametrize("seed", range(8))
def test_cf_on_grid_matches_scan(seed):
    rng = np.random.default_rng(seed)
    beta, y, delta, h = rng.uniform(0.3, 4), rng.uniform(0, 6), 2e-3, 1e-4
    p = KroneckerProblem.build([beta], [y], delta=delta)
    s = solve(p, "cf", step=h)
    assert s.found
    tau = float(s.tau)
    assert abs(tau / h - round(tau / h)) < 1e-6
    assert oracle_distance(beta, y, s.tau) < delta
    hits = grid_scan(beta, y, delta, max(abs(tau), 1.0) + 1)
    assert np.any(np.abs(hits - tau) < h / 2)


def test_integer_steps_large_tau():
    # tau restricted to Z: ||tau beta/2pi - c|| needs the continued fraction of beta/2pi
    beta = mpmath.log(2)
    p = KroneckerProblem.build([beta], [1.0], delta=1e-8, precision=200)
    for strat in ("cf", "lattice"):
        s = solve(p, strat, step=1.0)
        assert s.found, strat
        assert float(s.tau) == int(s.tau)
        assert oracle_distance(beta, 1.0, s.tau) < 1e-8


@pytest.mark.parametrize("L,tol", [(2, 1e-3), (3, 1e-3), (5, 1e-4)])
def test_lattice_several_frequencies(L, tol):
    primes = [2, 3, 5, 7, 11][:L]
    rng = np.random.default_rng(L)
    y = rng.uniform(0, 2 * np.pi, L)
    bits = lattice_precision([tol] * L, L)
    p = KroneckerProblem.build([mpmath.log(q) for q in primes], list(y), delta=tol, precision=bits)
    s = solve(p, "lattice")
    assert s.found
    for q, t in zip(primes, y):
        assert oracle_distance(mpmath.log(q), t, s.tau) < tol


def test_scan_agrees_with_direct_check():
    p = KroneckerProblem.build([mpmath.log(2), mpmath.log(3)], [0.3, 2.0], delta=1e-2)
    s = solve(p, "scan")
    assert s.found
    d = [oracle_distance(b, y, s.tau) for b, y in zip((mpmath.log(2), mpmath.log(3)), (0.3, 2.0))]
    assert max(d) < 1e-2
    assert np.allclose(sorted(d), sorted(s.distances), atol=1e-12)


def test_budget_exhaustion_keeps_best():
    p = KroneckerProblem.build([mpmath.log(q) for q in (2, 3, 5)], [1.0, 2.0, 3.0], delta=1e-6)
    s = solve(p, "scan", budget=50)
    assert s.status == "Exhausted"
    assert s.search_cost["evaluations"] >= 50
    assert s.max_distance < 0.5


def test_custom_scorer():
    p = KroneckerProblem.build([mpmath.log(2), mpmath.log(3)], [1.0, 2.0], delta=1e-3)
    # a weighted score: coordinate 0 counts double
    s = solve(p, "auto", scorer=lambda x: float(max(2 * abs(x[0]), abs(x[1])) / 1e-2))
    assert s.found
    assert 2 * s.distances[0] < 1e-2 and s.distances[1] < 1e-2


def test_offsets_are_signed():
    p = KroneckerProblem.build([1.0], [0.0], delta=0.1)
    assert p.offsets(-0.5)[0] > 0 and p.offsets(0.5)[0] < 0


def test_density_is_product_of_widths():
    p = KroneckerProblem.build([mpmath.log(2), mpmath.log(3), mpmath.log(5)], [0.1, 0.2, 0.3], delta=0.2)
    r = density_estimate(p, 1e5, 200_000, seed=1)
    assert abs(r.estimate - 0.4**3) < 4 * r.stderr + 2e-3


def test_bad_inputs():
    with pytest.raises(ValueError):
        KroneckerProblem.build([0.0], [1.0])
    with pytest.raises(ValueError):
        KroneckerProblem.build([1.0], [1.0], delta=0.7)
    with pytest.raises(ValueError):
        solve(KroneckerProblem.build([1.0, 2.0], [1.0, 2.0]), "cf")
