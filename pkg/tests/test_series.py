import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirichlet_translates import (
    ConstantCoefficients,
    DirichletSeries,
    PolarCoefficients,
    UniformBound,
    bohr_example,
    dirichlet_L,
    evaluate,
    kuniyeda_Tx,
    ordinary_spec,
    sigma_absolute_estimate,
    symbolic_spec,
    tail_bound,
    zeta_series,
)
from dirichlet_translates.exponents import PrefixExhausted
from dirichlet_translates.series import (
    AccuracyUnreachable,
    FiniteSupport,
    SamplingPlan,
    evaluate_at,
    evaluation_trace,
    minimal_truncation,
    shifted_coefficients,
)


def test_zeta_at_two():
    F = zeta_series(100_000).series
    r = evaluate(F, 2.0, 1e-4)
    assert abs(r.value - float(mpmath.zeta(2))) <= r.tail_bound
    assert r.tail_bound <= 1e-4


def test_tail_bound_covers_true_tail():
    F = zeta_series(10_000).series
    for sigma, M in ((1.5, 200), (2.0, 50), (3.0, 10)):
        true = float(mpmath.zeta(sigma) - sum(mpmath.mpf(n) ** -sigma for n in range(1, M + 1)))
        assert 0 < true <= tail_bound(F, M, sigma)


def test_character_L_is_catalan():
    F = dirichlet_L(4, 1, 200_000).series
    r = evaluate(F, 2.0, 1e-4)
    assert abs(r.value - float(mpmath.catalan)) < 1e-4


def test_large_height_phases():
    # exponent phases at t ~ 1e30 checked against a direct 200-bit sum
    F = zeta_series(60).series
    with mpmath.workprec(200):
        t = mpmath.mpf(10) ** 30 + mpmath.mpf("0.25")
    got = complex(evaluate_at(F, [2.0 + 0j], 60, tau=t)[0])
    with mpmath.workprec(300):
        tt = mpmath.mpf(10) ** 30 + mpmath.mpf(1) / 4
        want = complex(mpmath.fsum(mpmath.power(n, -(2 + 1j * tt)) for n in range(1, 61)))
    assert abs(got - want) < 1e-11


def test_accuracy_unreachable_on_finite_prefix():
    F = zeta_series(50).series
    with pytest.raises(AccuracyUnreachable):
        minimal_truncation(F, 1.5, 1e-6)


def test_finite_support_has_zero_tail():
    a = [1, 0.5, 0.25]
    F = DirichletSeries(ordinary_spec(3), PolarCoefficients.from_complex(a), FiniteSupport(3))
    assert tail_bound(F, 3, 0.1) == 0


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=1, max_size=40),
    st.floats(1.2, 4), st.floats(-50, 50),
)
def test_modulus_below_absolute_sum(a, sigma, t):
    n = len(a)
    F = DirichletSeries(ordinary_spec(n), PolarCoefficients.from_complex(a), FiniteSupport(n))
    v = evaluate_at(F, [complex(sigma, t)], n)[0]
    assert abs(v) <= sum(abs(c) * (k + 1) ** -sigma for k, c in enumerate(a)) + 1e-12


def test_shifted_coefficients_match_direct():
    F = zeta_series(30).series
    c = shifted_coefficients(F, 30, 7.5)
    want = np.exp(-1j * np.log(np.arange(1, 31)) * 7.5)
    assert np.allclose(c, want, atol=1e-12)


def test_trace_ends_at_value():
    F = zeta_series(40).series
    rows = evaluation_trace(F, 2 + 1j, 40)
    v = complex(evaluate_at(F, [2 + 1j], 40)[0])
    assert abs(complex(rows[-1]["re_partial"], rows[-1]["im_partial"]) - v) < 1e-12


def test_window_sup_two_incommensurate_terms():
    # log 3 and log 5 share the window [1, 1.7): the torus sup of the two terms is 2
    spec = symbolic_spec(["log(3)", "log(5)"], [{0: 1}, {1: 1}, {0: 2}])
    F = DirichletSeries(spec, ConstantCoefficients(1.0), FiniteSupport(3))
    w = kuniyeda_Tx(F, 1.7)
    assert w.n_terms == 2 and abs(w.estimate - 2.0) < 1e-6


def test_integer_x_gives_empty_window():
    F = zeta_series(1000).series
    with pytest.warns(UserWarning):
        w = kuniyeda_Tx(F, 3.0)
    assert w.n_terms == 0


def test_window_beyond_prefix():
    with pytest.raises(PrefixExhausted):
        kuniyeda_Tx(zeta_series(100).series, 5.5)


def test_absolute_abscissa_trend():
    F = zeta_series(200_000).series
    est = sigma_absolute_estimate(F, [6.5, 8.5, 10.5, 11.5])
    assert 0.85 < est.estimate <= 1.0


def test_bohr_windows_have_one_term():
    F = bohr_example(40).series
    for x in (3.5, 10.5, 30.5):
        w = kuniyeda_Tx(F, x)
        assert w.n_terms <= 1 and w.estimate <= 1.0
