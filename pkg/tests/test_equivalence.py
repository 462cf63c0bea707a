import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirichlet_translates import (
    ConstantCoefficients,
    DirichletSeries,
    HellyFailure,
    Incompatible,
    PolarCoefficients,
    TwistDetection,
    TwistVector,
    UniformBound,
    bohr_example,
    detect_twist,
    detect_vector_twist,
    dirichlet_L,
    helly_limit,
    limit_series,
    ordinary_spec,
    smooth_zeta,
    twist,
    zeta_series,
)
from dirichlet_translates.equivalence import TwistError, fractional_table, phase_limit, vertical_shift_vector
from dirichlet_translates.series import evaluate_at


def _wrap(x):
    return (np.asarray(x) + np.pi) % (2 * np.pi) - np.pi


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=10), st.integers(0, 2**32 - 1))
def test_twist_keeps_moduli(angles, seed):
    rng = np.random.default_rng(seed)
    n = 80
    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    F = DirichletSeries(ordinary_spec(n), PolarCoefficients.from_complex(a), UniformBound(5.0))
    Y = TwistVector.sparse(dict(enumerate(angles)), length=len(F.exponents.basis))
    G = twist(F, Y)
    assert np.array_equal(G.coefficients.modulus(1, n + 1), F.coefficients.modulus(1, n + 1))


def test_twist_is_multiplicative_phase():
    # b(n) = a(n) prod_p chi_p^{v_p(n)}: check b(12) against b(2)^2 b(3) directly
    F = zeta_series(50).series
    Y = TwistVector.sparse({0: 0.7, 1: -2.1}, length=15)
    b = F.with_coefficients(twist(F, Y).coefficients).coeffs(50)
    assert abs(b[11] - b[1] ** 2 * b[2]) < 1e-14
    assert abs(b[4] - 1) < 1e-14  # 5 untouched


def test_detect_recovers_twist():
    F = zeta_series(300).series
    rng = np.random.default_rng(7)
    Y = TwistVector.sparse({l: rng.uniform(-10, 10) for l in range(20)}, length=len(F.exponents.basis))
    G = twist(F, Y)
    det = detect_twist(F, G, 300)
    assert isinstance(det, TwistDetection)
    _, p1 = twist(F, det.Y).coefficients.polar(1, 301)
    _, p2 = G.coefficients.polar(1, 301)
    assert np.abs(_wrap(p1 - p2)).max() < 1e-9


def test_detect_modulus_mismatch():
    det = detect_twist(zeta_series(100).series, dirichlet_L(4, 1, 100).series, 100)
    assert isinstance(det, Incompatible) and det.kind == "modulus" and det.witness == 2


def test_detect_congruence_failure():
    n = 40
    F = zeta_series(n).series
    ph = np.zeros(n)
    ph[5] = 1.0  # b(6) not b(2) b(3)
    G = F.with_coefficients(PolarCoefficients(np.ones(n), ph))
    det = detect_twist(F, G, n)
    assert isinstance(det, Incompatible) and det.kind == "congruence"


def test_detect_vector_needs_common_Y():
    F1, F2 = zeta_series(60).series, dirichlet_L(3, 1, 60).series
    Y1 = TwistVector.sparse({0: 1.0}, length=17)
    Y2 = TwistVector.sparse({0: 2.0}, length=17)
    assert isinstance(detect_vector_twist([F1, F2], [twist(F1, Y1), twist(F2, Y1)], 60), TwistDetection)
    assert isinstance(detect_vector_twist([F1, F2], [twist(F1, Y1), twist(F2, Y2)], 60), Incompatible)


def test_bohr_is_incompatible():
    F = bohr_example(30).series
    det = detect_twist(F, F.with_coefficients(ConstantCoefficients(-1.0)), 30)
    assert isinstance(det, Incompatible) and det.kind == "unbounded-denominator"


def test_vertical_shift_is_translate():
    F = zeta_series(80).series
    tau0 = mpmath.mpf("123.456")
    Y = vertical_shift_vector(F.exponents, tau0, length=len(F.exponents.basis))
    G = twist(F, Y)
    s = np.array([2 + 0.5j, 1.7 - 1j])
    assert np.allclose(evaluate_at(G, s, 80), evaluate_at(F, s, 80, tau=tau0), atol=1e-10)


def test_vector_json_round_trip_large_angle():
    with mpmath.workprec(300):
        big = mpmath.mpf(10) ** 60 + mpmath.pi
    Y = TwistVector.sparse({3: big, 7: -0.5}, length=10, precision=300)
    Z = TwistVector.from_json(Y.to_json())
    assert Z.length == 10 and abs(Z.angle(3) - Y.angle(3)) < 1e-12 and Z.angle(7) == Y.angle(7)


def test_fractional_table_oracle():
    taus = [mpmath.mpf(m) * mpmath.sqrt(2) for m in (1, 10, 1000)]
    th = fractional_table(taus, [mpmath.log(2)], 128)
    for m, t in enumerate(taus):
        with mpmath.workprec(200):
            v = -t * mpmath.log(2) / (2 * mpmath.pi)
            assert abs(th[m, 0] - float(v - mpmath.floor(v))) < 1e-12


def _circ_spread(x):
    x = np.sort(np.mod(x, 1.0))
    gaps = np.diff(np.concatenate([x, [x[0] + 1]]))
    return 1.0 - gaps.max()


def test_helly_spread_checked_independently():
    F = smooth_zeta((2, 3), 200).series
    taus = [m * mpmath.sqrt(3) for m in range(1, 3001)]
    beta = F.exponents.basis_values(count=2)
    table = helly_limit(taus, beta, 0.05)
    assert len(table.indices) >= 2
    th = fractional_table([taus[i] for i in table.indices], beta, 128)
    for l in range(2):
        assert _circ_spread(th[:, l]) <= 0.05 + 1e-12


def test_helly_too_short():
    with pytest.raises(HellyFailure):
        helly_limit([mpmath.mpf(1), mpmath.mpf(2)], [mpmath.log(2), mpmath.log(3)], 1e-6)


def test_limit_series_is_a_twist():
    F = smooth_zeta((2, 3), 200).series
    taus = [m * mpmath.sqrt(2) for m in range(1, 2001)]
    table = helly_limit(taus, F.exponents.basis_values(count=2), 0.05)
    (G,), Y = limit_series([F], table)
    assert isinstance(detect_twist(F, G, 200), TwistDetection)
    # G is close to the translates along the subsequence
    s = np.array([1.5 + 0j])
    for i in table.indices:
        d = abs(evaluate_at(G, s, 200)[0] - evaluate_at(F, s, 200, tau=taus[i])[0])
        assert d < 2 * math.pi * 0.05 * 200


def test_limit_series_refuses_non_integral_basis():
    F = bohr_example(20).series
    taus = [mpmath.mpf(m) for m in range(1, 400)]
    table = helly_limit(taus, F.exponents.basis_values(count=1), 0.05)
    with pytest.raises(TwistError):
        limit_series([F], table)
    pt = phase_limit(taus, F.exponents, 3, 0.3)
    (G,) = limit_series([F], pt)
    assert G.size == 3
