"""Built-in example series: zeta, Dirichlet L, Hurwitz, a Bohr-type example, smooth zeta."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np

from .exponents import (
    BohrMatrix,
    Generator,
    LinearGrowth,
    LogGrowth,
    SemigroupGrowth,
    SymbolicExponents,
    ordinary_spec,
    working_precision,
)
from .series import (
    TWO_PI,
    Coefficients,
    ConstantCoefficients,
    DirichletSeries,
    UniformBound,
    _wrap,
)


@dataclass(frozen=True)
class CorpusEntry:
    series: DirichletSeries
    known_facts: dict = field(default_factory=dict)
    notes: str = ""

    @property
    def name(self) -> str:
        return self.series.label


def zeta_series(n_max: int = 10_000) -> CorpusEntry:
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    F = DirichletSeries(ordinary_spec(n_max), ConstantCoefficients(1.0), UniformBound(1.0), "zeta")
    facts = {"sigma_a": 1.0, "sigma_u": 1.0, "basis": "prime logs", "integral": True}
    return CorpusEntry(F, facts, "a(n) = 1")


# ---------------------------------------------------------------------------
# Dirichlet characters for small moduli


def _primitive_root(pk: int, p: int) -> int:
    phi = pk - pk // p
    factors = [q for q in range(2, phi + 1) if phi % q == 0 and all(q % r for r in range(2, int(q**0.5) + 1))]
    for g in range(2, pk):
        if math.gcd(g, pk) == 1 and all(pow(g, phi // q, pk) != 1 for q in factors):
            return g
    raise ArithmeticError(f"no primitive root mod {pk}")


def _prime_powers(q: int) -> list[tuple[int, int]]:
    out, n, p = [], q, 2
    while n > 1:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1
    return out


@lru_cache(maxsize=None)
def _group_structure(q: int) -> tuple[list[int], dict[int, tuple[int, ...]]]:
    """Orders of the cyclic factors of (Z/q)^* and the discrete-log vector of every unit."""
    orders: list[int] = []
    comp_logs = []
    for p, k in _prime_powers(q):
        pk = p**k
        if p == 2:
            gens = [(pk - 1, 2)] if k >= 2 else []
            if k >= 3:
                gens.append((5, pk // 4))
        else:
            gens = [(_primitive_root(pk, p), pk - pk // p)]
        table = {1 % pk: ()}
        for g, o in gens:
            table = {v * pow(g, e, pk) % pk: idx + (e,) for v, idx in table.items() for e in range(o)}
        orders.extend(o for _, o in gens)
        comp_logs.append((pk, table))
    logs = {}
    for n in range(q):
        if math.gcd(n, q) == 1:
            logs[n] = sum((tab[n % pk] for pk, tab in comp_logs), ())
    return orders, logs


def character_count(q: int) -> int:
    return math.prod(_group_structure(q)[0])


def character_turns(q: int, index: int) -> dict[int, Fraction]:
    """chi(n) = exp(2 pi i turns[n]) for units n mod q; index 0 is principal."""
    if not 1 <= q <= 20:
        raise ValueError("characters are tabulated for moduli up to 20")
    orders, logs = _group_structure(q)
    count = math.prod(orders)
    if not 0 <= index < count:
        raise ValueError(f"character index must be in 0..{count - 1}")
    ks, r = [], index
    for o in orders:
        ks.append(r % o)
        r //= o
    return {n: sum((Fraction(k * e, o) for k, e, o in zip(ks, ind, orders)), Fraction(0)) % 1 for n, ind in logs.items()}


def character_table(q: int, index: int) -> dict[int, complex]:
    return {n: cmath.exp(2j * math.pi * t) for n, t in character_turns(q, index).items()}


def is_primitive(q: int, index: int) -> bool:
    turns = character_turns(q, index)
    for d in range(1, q):
        if q % d == 0 and all(turns[n] == 0 for n in turns if (n - 1) % d == 0):
            return False
    return True


class CharacterCoefficients(Coefficients):
    """a(n) = chi(n) with exact moduli 0/1 and phases from exact fractions of a turn."""

    def __init__(self, q: int, index: int, size: int | None = None):
        self.q, self.index, self.size = q, index, size
        turns = character_turns(q, index)
        self._mod = np.zeros(q)
        self._ph = np.zeros(q)
        for n, t in turns.items():
            self._mod[n] = 1.0
            self._ph[n] = float(t) * TWO_PI
        self._ph = _wrap(self._ph)

    def polar(self, i0, i1):
        self._check(i0, i1)
        r = np.arange(i0, i1, dtype=np.int64) % self.q
        return self._mod[r], self._ph[r]

    def max_modulus(self, i0, i1):
        return 1.0 if i1 > i0 else 0.0


def dirichlet_L(q: int, index: int, n_max: int = 10_000) -> CorpusEntry:
    """L(s, chi) for the character numbered ``index`` mod q (q <= 20)."""
    coeffs = CharacterCoefficients(q, index)
    prim = is_primitive(q, index)
    F = DirichletSeries(ordinary_spec(n_max), coeffs, UniformBound(1.0), f"L(s, chi_{q}[{index}])")
    facts = {
        "sigma_a": 1.0,
        "sigma_u": 1.0 if (prim and q > 1) or index == 0 else None,
        "primitive": prim,
        "principal": index == 0,
        "basis": "prime logs",
        "integral": True,
    }
    return CorpusEntry(F, facts, f"character {index} of {character_count(q)} mod {q}")


# ---------------------------------------------------------------------------
# Hurwitz


class _ShiftedLogBasis(Sequence):
    """(log(alpha), log(1 + alpha), log(2 + alpha), ...)"""

    def __init__(self, alpha: Generator, n: int):
        self.alpha, self.n = alpha, n

    def __len__(self):
        return self.n

    def __getitem__(self, k):
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(self.n))]
        if k < 0:
            k += self.n
        if not 0 <= k < self.n:
            raise IndexError(k)
        a = self.alpha
        expr = None if a.expr is None else f"log({k} + ({a.expr}))"
        return Generator(f"log({k}+{a.label})", lambda bits, k=k: mpmath.log(k + a.value(bits + 8)), expr)


def hurwitz_series(alpha: Generator | str, n_max: int = 2000, transcendental: bool = True) -> CorpusEntry:
    """zeta(s, alpha) = sum_{n >= 0} (n + alpha)^{-s}, exponents log(n + alpha) as their own basis.

    Transcendence of alpha is the caller's annotation and is not checked; it
    is what makes the exponents linearly independent.
    """
    a = alpha if isinstance(alpha, Generator) else Generator.from_expr(alpha)
    av = float(a.value(64))
    if not 0 < av <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    mat = BohrMatrix(row_fn=lambda n: {n - 1: Fraction(1)}, n_rows=n_max, integral=True)
    spec = SymbolicExponents(_ShiftedLogBasis(a, n_max), mat, LogGrowth(av - 1.0), check=False)
    F = DirichletSeries(spec, ConstantCoefficients(1.0), UniformBound(1.0), f"hurwitz({a.label})")
    facts = {"sigma_a": 1.0, "sigma_u": 1.0, "basis": "identity", "integral": True, "transcendental_declared": transcendental}
    return CorpusEntry(F, facts, "index n = 1 corresponds to the term alpha^{-s}")


# ---------------------------------------------------------------------------
# Bohr-type example with a non-integral basis


def bohr_exponent(n: int) -> Fraction:
    return Fraction(2 * n - 1) + Fraction(1, 2 * (2 * n - 1))


def bohr_example(n_max: int = 60) -> CorpusEntry:
    """lambda_n = 2n - 1 + 1/(2(2n - 1)) over the basis (1); f = -F is not a twist of F."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    one = Generator("1", lambda bits: mpmath.mpf(1), "1")
    mat = BohrMatrix(row_fn=lambda n: {0: bohr_exponent(n)}, n_rows=n_max, integral=False)
    # lambda_n >= 2n - 1
    spec = SymbolicExponents([one], mat, LinearGrowth(2.0, -1.0), check=False)
    F = DirichletSeries(spec, ConstantCoefficients(1.0), UniformBound(1.0), "bohr")
    facts = {"sigma_a": 0.0, "sigma_u": 0.0, "basis": "(1)", "integral": False}
    return CorpusEntry(F, facts, "f(s) = -F(s) is a limit of translates but not vector-equivalent")


def bohr_tau(m: int, precision: int | None = None):
    """2 pi prod_{n <= m} (2n - 1), as an mpf."""
    if m < 1:
        raise ValueError("m must be >= 1")
    k = math.prod(range(1, 2 * m, 2))
    with mpmath.workprec(working_precision(precision) + k.bit_length()):
        return 2 * mpmath.pi * k


def bohr_phase_turns(m: int, n: int) -> Fraction:
    """lambda_n * bohr_tau(m) / (2 pi) modulo 1, exactly."""
    return (bohr_exponent(n) * math.prod(range(1, 2 * m, 2))) % 1


# ---------------------------------------------------------------------------
# smooth numbers: finite-basis ordinary-type series


def smooth_numbers(primes: Sequence[int], count: int) -> list[tuple[int, tuple[int, ...]]]:
    """The first ``count`` integers whose prime factors lie in ``primes``, with exponents."""
    import heapq

    seen = {1}
    heap = [(1, (0,) * len(primes))]
    out = []
    while len(out) < count:
        n, e = heapq.heappop(heap)
        out.append((n, e))
        for i, p in enumerate(primes):
            m = n * p
            if m not in seen:
                seen.add(m)
                heapq.heappush(heap, (m, e[:i] + (e[i] + 1,) + e[i + 1 :]))
    return out


def smooth_zeta(primes: Sequence[int] = (2, 3), n_terms: int = 400) -> CorpusEntry:
    """sum over primes-smooth n of n^{-s}; exponents over the basis (log p)."""
    gens = [Generator(f"log {p}", lambda bits, p=p: mpmath.log(p), f"log({p})") for p in primes]
    nums = smooth_numbers(primes, n_terms)
    rows = [{l: Fraction(k) for l, k in enumerate(e) if k} for _, e in nums]
    mat = BohrMatrix(rows, integral=True)
    growth = SemigroupGrowth(tuple(math.log(p) for p in primes))
    spec = SymbolicExponents(gens, mat, growth, check=False)
    F = DirichletSeries(spec, ConstantCoefficients(1.0), UniformBound(1.0), f"smooth{tuple(primes)}")
    total = math.prod(1 / (1 - 1 / p) for p in primes)
    facts = {"sigma_a": 0.0, "sigma_u": 0.0, "basis": "prime logs", "integral": True, "value_at_1": total}
    return CorpusEntry(F, facts, f"first {n_terms} smooth integers")


CORPUS = {
    "zeta": zeta_series,
    "bohr": bohr_example,
    "hurwitz": hurwitz_series,
    "smooth": smooth_zeta,
}
