from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from dirichlet_translates.exponents import (
    BohrMatrix,
    DenominatorCapExceeded,
    ExplicitExponents,
    Generator,
    PrefixExhausted,
    SymbolicExponents,
    common_denominator,
    evaluate_expression,
    exact_mpf,
    integrality,
    mag_bits,
    mpf_text,
    ordinary_spec,
    p_adic_valuation,
    reconstruct,
    same_exponents,
    symbolic_spec,
)


def test_expression_matches_mpmath():
    with mpmath.workprec(200):
        want = mpmath.log(2) + mpmath.pi / 4 - mpmath.sqrt(3)
    got = evaluate_expression("log(2) + pi/4 - sqrt(3)", 200)
    with mpmath.workprec(200):
        assert abs(got - want) < mpmath.mpf(2) ** -190


def test_expression_rejects_names():
    with pytest.raises(ValueError):
        evaluate_expression("__import__('os')")


def test_ordinary_rows_rebuild_log_n():
    spec = ordinary_spec(300)
    for n in (1, 2, 12, 97, 210, 256, 299):
        with mpmath.workprec(220):
            assert abs(reconstruct(spec, n, 200) - mpmath.log(n)) < mpmath.mpf(2) ** -180


@given(st.integers(2, 10_000))
def test_valuation_against_sympy(n):
    for p in (2, 3, 5, 7):
        assert int(p_adic_valuation(np.array([n]), p)[0]) == sympy.multiplicity(p, n)


rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.dictionaries(st.integers(0, 3), rationals, max_size=3), min_size=1, max_size=12))
def test_integrality_and_denominator(rows):
    M = BohrMatrix(rows)
    rep = integrality(M, len(rows), cap=10**12)
    every = [v for r in M.rows() for v in r.values()]
    assert rep.is_integral == all(v.denominator == 1 for v in every)
    Q = common_denominator(M, len(rows), cap=10**12)
    assert all((Q * v).denominator == 1 for v in every)


def test_bohr_matrix_hits_cap():
    M = BohrMatrix(row_fn=lambda n: {0: Fraction(2 * n - 1) + Fraction(1, 2 * (2 * n - 1))}, n_rows=40)
    rep = integrality(M, 40, cap=10**6)
    assert not rep.is_integral and rep.unbounded and rep.witness == 1
    with pytest.raises(DenominatorCapExceeded):
        common_denominator(M, 40, cap=10**6)


def test_prefix_exhausted():
    with pytest.raises(PrefixExhausted):
        ordinary_spec(10).matrix.row(11)


def test_explicit_must_increase():
    with pytest.raises(ValueError):
        ExplicitExponents([0.1, 0.5, 0.5])


def test_symbolic_needs_basis_cover():
    with pytest.raises(ValueError):
        symbolic_spec(["log(2)"], [{0: 1}, {1: 1}])


def test_same_exponents_by_structure():
    a = symbolic_spec(["log(2)", "log(3)"], [{0: 1}, {1: 1}, {0: 2}])
    b = symbolic_spec(["log(2)", "log(3)"], [{0: 1}, {1: 1}, {0: 2}])
    c = symbolic_spec(["log(2)", "log(3)"], [{0: 1}, {1: 1}, {0: 1, 1: 1}])
    assert same_exponents(a, b) and not same_exponents(a, c)
    assert same_exponents(ordinary_spec(50), ordinary_spec(50))


def test_exact_mpf_keeps_large_integers():
    n = 3**200 + 1
    x = exact_mpf(n)
    assert int(x) == n
    assert mag_bits(x) >= n.bit_length() - 1
    y = exact_mpf(mpf_text(x))
    assert int(y) == n


def test_generator_precision_is_honoured():
    g = Generator.from_expr("log(7)")
    with mpmath.workprec(400):
        assert abs(g.value(400) - mpmath.log(7)) < mpmath.mpf(2) ** -390
