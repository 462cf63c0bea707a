import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy

from dirichlet_translates.corpus import (
    bohr_example,
    bohr_phase_turns,
    bohr_tau,
    character_count,
    character_table,
    dirichlet_L,
    hurwitz_series,
    is_primitive,
    smooth_numbers,
    smooth_zeta,
)
from dirichlet_translates.series import evaluate, evaluate_at


def _primitive_count(q):
    # sum_{d | q} mu(d) phi(q/d)
    return sum(sympy.mobius(d) * sympy.totient(q // d) for d in sympy.divisors(q))


@pytest.mark.parametrize("q", range(1, 21))
def test_character_group(q):
    n = character_count(q)
    assert n == sympy.totient(q)
    tables = [character_table(q, i) for i in range(n)]
    units = sorted(tables[0])
    for i, chi in enumerate(tables):
        for a in units:
            for b in units:
                assert abs(chi[a * b % q] - chi[a] * chi[b]) < 1e-12
        s = sum(chi.values())
        assert abs(s - (n if i == 0 else 0)) < 1e-9
    # distinct characters
    vecs = {tuple(round(chi[a].real, 9) + 1j * round(chi[a].imag, 9) for a in units) for chi in tables}
    assert len(vecs) == n
    assert sum(is_primitive(q, i) for i in range(n)) == _primitive_count(q)


def test_L_values_against_mpmath():
    # L(2, chi_{-3}) via Hurwitz zeta
    q = 3
    (idx,) = [i for i in range(2) if i]
    chi = character_table(q, idx)
    F = dirichlet_L(q, idx, 200_000).series
    want = sum(chi[a] * mpmath.zeta(2, mpmath.mpf(a) / q) for a in chi) / q**2
    assert abs(evaluate(F, 2.0, 1e-5).value - complex(want)) < 1e-5


def test_hurwitz_half_is_scaled_zeta():
    H = hurwitz_series("1/2", 2000).series
    s = 3.0 + 0.5j
    got = complex(evaluate_at(H, [s], 2000)[0])
    want = complex(mpmath.zeta(s, 0.5))
    assert abs(got - want) < 1e-5


def test_hurwitz_rejects_bad_alpha():
    with pytest.raises(ValueError):
        hurwitz_series("3/2")


def test_bohr_phases_exact():
    for m in (1, 3, 4):
        tau = bohr_tau(m)
        for n in range(1, 12):
            with mpmath.workprec(200):
                lam = mpmath.mpf(2 * n - 1) + mpmath.mpf(1) / (2 * (2 * n - 1))
                v = lam * bohr_tau(m) / (2 * mpmath.pi)
                frac = v - mpmath.floor(v)
            t = bohr_phase_turns(m, n)
            assert abs(float(frac) - float(t)) < 1e-12 or abs(abs(float(frac) - float(t)) - 1) < 1e-12


def test_bohr_first_terms_flip():
    # for n <= m the phase is exactly 1/2 turn: e^{-i lambda_n tau} = -1
    for n in range(1, 5):
        assert bohr_phase_turns(4, n) == Fraction(1, 2)


def test_smooth_numbers_oracle():
    got = [n for n, _ in smooth_numbers((2, 3, 5), 60)]
    want = sorted(n for n in range(1, 2000) if max(sympy.primefactors(n) or [1]) <= 5)[:60]
    assert got == want


def test_smooth_zeta_total():
    F = smooth_zeta((2, 3), 3000).series
    v = complex(evaluate_at(F, [1.0 + 0j], 3000)[0]).real
    assert abs(v - F.exponents.growth.total(1.0)) < 1e-2
