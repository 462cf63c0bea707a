import dataclasses
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirichlet_translates import (
    ConstantCoefficients,
    DirichletSeries,
    Disk,
    NotEquivalent,
    Rectangle,
    SearchExhausted,
    TwistVector,
    audit_budget,
    density_of_translates,
    dirichlet_L,
    error_budget,
    find_translate,
    symbolic_spec,
    twist,
    value_set_check,
    verify_translate,
    winding_number,
    zeta_series,
)
from dirichlet_translates.rigidity import strip_convergence
from dirichlet_translates.series import FiniteSupport, evaluate_at


@pytest.fixture(scope="module")
def zeta_pair():
    F = zeta_series(300).series
    Y = TwistVector.sparse({0: mpmath.pi / 3, 1: mpmath.pi / 5}, length=len(F.exponents.basis))
    return F, twist(F, Y)


def test_rectangle_needs_interior():
    with pytest.raises(ValueError):
        Rectangle(2, 2, 0, 1)
    with pytest.raises(ValueError):
        Disk(2 + 0j, 0)


def test_boundary_gap_bounds_sample_spacing():
    K = Rectangle(1.5, 2.5, -1, 2)
    pts = K.boundary(0.07)
    ring = np.concatenate([pts, pts[:1]])
    assert np.abs(np.diff(ring)).max() <= K.boundary_gap(0.07) + 1e-12


@pytest.mark.parametrize("eps", [0.5, 0.3, 0.2])
def test_budget_audit(zeta_pair, eps):
    F, _ = zeta_pair
    b = error_budget([F], [Rectangle(1.6, 2.2, -1, 1)], eps)
    assert audit_budget(b)
    bad = dataclasses.replace(b, delta=b.delta * 50, tolerances={l: min(0.5, d * 50) for l, d in b.tolerances.items()})
    assert not audit_budget(bad)


def test_budget_rejects_large_tail():
    F = zeta_series(20).series
    with pytest.raises(ValueError):
        error_budget([F], [Rectangle(1.2, 2, -1, 1)], 0.01)


def test_identity_translate_is_exact(zeta_pair):
    F, _ = zeta_pair
    r = verify_translate([F], [F], [Rectangle(1.6, 2.2, -1, 1)], 0)
    assert r.sup_error[0] == 0


def test_verify_matches_direct_sampling(zeta_pair):
    F, f = zeta_pair
    K = Rectangle(1.6, 2.2, -1, 1)
    tau = mpmath.mpf("98765.4321")
    r = verify_translate([F], [f], [K], tau)
    pts = K.boundary(0.01)
    direct = np.abs(evaluate_at(F, pts, 300, tau=tau) - evaluate_at(f, pts, 300)).max()
    assert direct <= r.sup_error[0] + r.lipschitz[0] + 1e-12
    assert r.sup_error[0] <= direct + 1e-9 or r.n_samples[0] > len(pts)


def test_role_inversion(zeta_pair):
    F, f = zeta_pair
    K = Rectangle(1.6, 2.2, -1, 1)
    with mpmath.workprec(200):
        tau = mpmath.mpf(10) ** 25 + mpmath.mpf("0.125")
        back = -tau  # negation rounds to the ambient precision
    a = verify_translate([F], [f], [K], tau)
    b = verify_translate([f], [F], [K.shifted(tau)], back)
    assert abs(a.sup_error[0] - b.sup_error[0]) < 1e-9


def test_find_translate_rejects_non_twist():
    F, G = zeta_series(200).series, dirichlet_L(4, 1, 200).series
    with pytest.raises(NotEquivalent):
        find_translate([F], [G], [Rectangle(1.6, 2.2, -1, 1)], 0.3)


def test_find_translate_budget(zeta_pair):
    F, f = zeta_pair
    with pytest.raises(SearchExhausted):
        find_translate([F], [f], [Rectangle(1.6, 2.2, -1, 1)], 0.2, 10, strategy="scan")


def test_find_translate_disk(zeta_pair):
    F, f = zeta_pair
    K = Disk(2.0 + 0.5j, 0.3)
    cert = find_translate([F], [f], [K], 0.2)
    assert cert.verified
    pts = K.boundary(0.01)
    direct = np.abs(evaluate_at(F, pts, 300, tau=cert.tau) - evaluate_at(f, pts, 300)).max()
    assert direct + cert.tail_used[0] < 0.2


def test_density_batch_agrees_with_verify(zeta_pair):
    F, f = zeta_pair
    K = Rectangle(1.6, 2.2, -1, 1)
    d = density_of_translates([F], [f], [K], 0.5, 1e5, samples=40, seed=3)
    for t, e in zip(d.taus[:5], d.errors[:5]):
        r = verify_translate([F], [f], [K], float(t))
        # the batch path samples fewer points but with a larger slack
        assert r.sup_error[0] <= e + 1e-9


def test_density_of_self_is_one_for_tiny_T(zeta_pair):
    F, _ = zeta_pair
    d = density_of_translates([F], [F], [Rectangle(1.6, 2.2, -1, 1)], 0.5, 1e-4, samples=200, seed=0)
    assert d.estimate == 1.0


def _geometric(K=12):
    spec = symbolic_spec(["log(2)"], [{0: k} if k else {} for k in range(K)])
    return DirichletSeries(spec, ConstantCoefficients(1.0), FiniteSupport(K))


def _roots_inside(K, v, center, radius):
    # F(s) = sum_k z^k with z = 2^{-s}; zeros of F - v come from the polynomial roots
    coeffs = np.ones(K, dtype=complex)
    coeffs[0] -= v
    count = 0
    period = 2 * math.pi / math.log(2)
    for z in np.roots(coeffs[::-1]):
        s = -np.log(z) / math.log(2)
        for m in range(-5, 6):
            if abs(s + 1j * m * period - center) < radius:
                count += 1
    return count


@pytest.mark.parametrize("center,radius", [(0.4 + 1j, 0.5), (0.1 + 2.0j, 0.8), (1.0 + 0j, 0.3)])
def test_winding_matches_polynomial_roots(center, radius):
    F = _geometric()
    v = complex(evaluate_at(F, [center + 0.1 * radius], 12)[0])
    w = winding_number(F, center, radius, v)
    assert w.winding == _roots_inside(12, v, center, radius)


def test_value_set_far_probe(zeta_pair):
    F, f = zeta_pair
    (r,) = value_set_check(F, f, Rectangle(1.5, 3, -2, 2), [10 + 10j])
    assert r.status == "Unattained"


def test_strip_convergence_shrinks(zeta_pair):
    F, f = zeta_pair
    taus = [find_translate([F], [f], [Rectangle(1.6, 2.2, -1, 1)], e).tau for e in (0.5, 0.15)]
    rep = strip_convergence([F], [f], (1.6, 2.2), [(-1, 1)], taus)
    assert rep.monotone
    assert rep.rows[-1]["bound"] < 0.15


def test_truncation_matches_integral_test():
    # smallest M with 1/((sigma - 1) M^(sigma - 1)) < eps/4 at sigma = 1.6, eps = 0.1
    oracle = math.ceil((1 / (0.6 * 0.025)) ** (1 / 0.6))
    b = error_budget([zeta_series(10_000).series], [Rectangle(1.6, 2.2, -1, 1)], 0.1)
    assert b.tail_quarter_rule and b.Q == 1
    assert abs(b.M - oracle) <= 0.02 * oracle
