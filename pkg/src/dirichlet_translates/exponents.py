"""Exponent sequences, Bohr bases and Bohr matrices.

An exponent sequence is realized either from its structure (ordinary
``log n``, or a symbolic combination of declared generators with an exact
rational Bohr matrix) or from a list of high-precision numbers. Only the
structured kinds carry a basis; numeric relations between explicit values
are never inferred.
"""
from __future__ import annotations

import ast
import math
import operator
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

import mpmath
import numpy as np
import sympy

DEFAULT_PRECISION = 128
DEFAULT_DENOMINATOR_CAP = 10**6
PRECISION_ENV = "DTRANS_PRECISION"


def working_precision(bits: int | None = None) -> int:
    """Bits of working precision: explicit value, else env override, else 128."""
    if bits is not None:
        return int(bits)
    env = os.environ.get(PRECISION_ENV)
    return int(env) if env else DEFAULT_PRECISION


def exact_mpf(x) -> mpmath.mpf:
    """x as an mpf without rounding (ints and decimal strings get enough bits)."""
    if isinstance(x, mpmath.mpf):
        return x
    if isinstance(x, (int, np.integer)):
        with mpmath.workprec(max(53, int(x).bit_length() + 1)):
            return mpmath.mpf(int(x))
    if isinstance(x, str):
        digits = sum(ch.isdigit() for ch in x.split("e")[0].split("E")[0])
        with mpmath.workprec(max(working_precision(), int(digits * 3.33) + 16)):
            return mpmath.mpf(x)
    return mpmath.mpf(float(x))


def mpf_text(x) -> str:
    """Decimal string that reads back (through exact_mpf) to the same mpf."""
    x = exact_mpf(x)
    bc = x._mpf_[3] if x._mpf_[1] else 1
    return mpmath.libmp.to_str(x._mpf_, int(bc * 0.30103) + 3)


def mag_bits(x) -> int:
    """Bits needed for the integer part of |x|."""
    x = exact_mpf(x)
    if not x:
        return 0
    return max(0, int(mpmath.mag(x)))


class PrefixExhausted(ValueError):
    """Raised when an operation needs indices beyond the realized prefix."""


class DenominatorCapExceeded(ValueError):
    def __init__(self, row: int, lcm: int, cap: int):
        super().__init__(
            f"lcm of denominators exceeds cap {cap} at row {row} (partial lcm {lcm}); "
            "the basis is not integral at this truncation"
        )
        self.row = row
        self.lcm = lcm
        self.cap = cap


# ---------------------------------------------------------------------------
# generators

_FUNCS = {
    "log": mpmath.log,
    "exp": mpmath.exp,
    "sqrt": mpmath.sqrt,
    "sin": mpmath.sin,
    "cos": mpmath.cos,
    "atan": mpmath.atan,
}
_CONSTS = {"pi": lambda: +mpmath.pi, "e": lambda: +mpmath.e, "euler": lambda: +mpmath.euler}
_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def _eval_node(node: ast.AST):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        if isinstance(node.value, int):
            return mpmath.mpf(node.value)
        return mpmath.mpf(repr(node.value))
    if isinstance(node, ast.Name) and node.id in _CONSTS:
        return _CONSTS[node.id]()
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        val = _eval_node(node.operand)
        return -val if isinstance(node.op, ast.USub) else val
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id in _FUNCS
        and len(node.args) == 1
        and not node.keywords
    ):
        return _FUNCS[node.func.id](_eval_node(node.args[0]))
    raise ValueError(f"unsupported expression element: {ast.dump(node)}")


def evaluate_expression(expr: str, precision: int | None = None) -> mpmath.mpf:
    """Evaluate a closed-form real expression such as ``log(2)`` or ``pi/4``."""
    tree = ast.parse(expr, mode="eval")
    with mpmath.workprec(working_precision(precision) + 16):
        return _eval_node(tree)


@dataclass(frozen=True, eq=False)
class Generator:
    """A basis element: a label and an evaluator ``bits -> mpf``.

    ``expr`` is kept when the generator came from (or can be written as) a
    closed-form expression, so that specs can be serialized.
    """

    label: str
    evaluator: Callable[[int], mpmath.mpf]
    expr: str | None = None

    def value(self, precision: int | None = None) -> mpmath.mpf:
        bits = working_precision(precision)
        with mpmath.workprec(bits):
            val = +self.evaluator(bits)
        if not mpmath.isfinite(val) or val == 0:
            raise ValueError(f"generator {self.label!r} must be finite and nonzero")
        return val

    @classmethod
    def from_expr(cls, expr: str, label: str | None = None) -> "Generator":
        evaluate_expression(expr, 53)  # fail early on bad input
        return cls(label or expr, lambda bits: evaluate_expression(expr, bits), expr)

    def key(self):
        return ("expr", self.expr) if self.expr is not None else ("id", id(self))


# ---------------------------------------------------------------------------
# primes


class PrimeTable:
    """Prime lookups: a numpy sieve for small primes, sympy beyond it."""

    SIEVE_LIMIT = 1 << 22

    def __init__(self, limit: int):
        self.limit = int(limit)
        bound = max(2, min(self.limit, self.SIEVE_LIMIT))
        sieve = np.ones(bound + 1, dtype=bool)
        sieve[:2] = False
        for p in range(2, int(bound**0.5) + 1):
            if sieve[p]:
                sieve[p * p :: p] = False
        self._primes = np.flatnonzero(sieve)
        self._bound = bound

    @property
    def small(self) -> np.ndarray:
        return self._primes

    def count(self) -> int:
        if self.limit <= self._bound:
            return int(np.searchsorted(self._primes, self.limit, side="right"))
        return int(sympy.primepi(self.limit))

    def prime(self, index: int) -> int:
        """The prime with 0-based ``index`` (0 -> 2)."""
        if index < len(self._primes):
            return int(self._primes[index])
        return int(sympy.prime(index + 1))

    def index(self, p: int) -> int:
        if p <= self._bound:
            i = int(np.searchsorted(self._primes, p))
            if i < len(self._primes) and self._primes[i] == p:
                return i
            raise ValueError(f"{p} is not prime")
        if not sympy.isprime(p):
            raise ValueError(f"{p} is not prime")
        return int(sympy.primepi(p)) - 1


@lru_cache(maxsize=8)
def prime_table(limit: int) -> PrimeTable:
    return PrimeTable(limit)


@lru_cache(maxsize=200_000)
def _factor(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(sympy.factorint(n).items()))


def p_adic_valuation(n: np.ndarray, p: int) -> np.ndarray:
    """Vectorized v_p(n) for positive integers."""
    n = np.asarray(n, dtype=np.int64).copy()
    v = np.zeros(n.shape, dtype=np.int64)
    mask = n % p == 0
    while mask.any():
        v[mask] += 1
        n[mask] //= p
        mask = n % p == 0
    return v


# ---------------------------------------------------------------------------
# Bohr matrices


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"Bohr matrix entries must be exact rationals, got {type(x).__name__}")


class BohrMatrix:
    """Exact rational matrix R with Lambda = R B, rows indexed from 1.

    Rows are sparse ``{l: Fraction}`` with 0-based column indices. A matrix
    is either an explicit finite list of rows or a row procedure.
    """

    def __init__(
        self,
        rows: Sequence[Mapping[int, object]] | None = None,
        *,
        row_fn: Callable[[int], Mapping[int, Fraction]] | None = None,
        n_rows: int | None = None,
        integral: bool | None = None,
    ):
        if (rows is None) == (row_fn is None):
            raise ValueError("give exactly one of rows / row_fn")
        if rows is not None:
            cleaned = []
            for r in rows:
                row = {int(k): _as_fraction(v) for k, v in dict(r).items()}
                cleaned.append({k: v for k, v in row.items() if v != 0})
            self._rows: tuple[dict[int, Fraction], ...] | None = tuple(cleaned)
            self.n_rows = len(cleaned)
        else:
            self._rows = None
            if n_rows is None:
                raise ValueError("a procedural matrix needs n_rows")
            self.n_rows = int(n_rows)
        self._row_fn = row_fn
        self._integral_by_construction = integral

    def row(self, n: int) -> dict[int, Fraction]:
        if not 1 <= n <= self.n_rows:
            raise PrefixExhausted(f"row {n} outside 1..{self.n_rows}")
        if self._rows is not None:
            return self._rows[n - 1]
        return dict(self._row_fn(n))

    def rows(self, limit: int | None = None) -> list[dict[int, Fraction]]:
        limit = self.n_rows if limit is None else min(limit, self.n_rows)
        return [self.row(n) for n in range(1, limit + 1)]

    def support_size(self, limit: int | None = None) -> int:
        """1 + largest column index used by rows 1..limit (0 if all empty)."""
        top = -1
        for r in self.rows(limit):
            if r:
                top = max(top, max(r))
        return top + 1

    def row_weight(self, n: int) -> Fraction:
        """c_n = sum_l |r_{n,l}|."""
        return sum((abs(v) for v in self.row(n).values()), Fraction(0))

    def key(self):
        if self._rows is not None:
            return tuple(tuple(sorted(r.items())) for r in self._rows)
        return ("fn", id(self._row_fn), self.n_rows)


@dataclass(frozen=True)
class IntegralityReport:
    is_integral: bool
    lcm_of_denominators: int | None  # None stands for Unbounded
    witness: int | None = None
    cap_row: int | None = None
    n_inspected: int = 0

    @property
    def unbounded(self) -> bool:
        return self.lcm_of_denominators is None

    def to_dict(self) -> dict:
        return {
            "is_integral": self.is_integral,
            "lcm_of_denominators": "unbounded" if self.unbounded else self.lcm_of_denominators,
            "witness": self.witness,
            "cap_row": self.cap_row,
            "n_inspected": self.n_inspected,
        }


def integrality(
    matrix: BohrMatrix, n_limit: int, cap: int = DEFAULT_DENOMINATOR_CAP
) -> IntegralityReport:
    """Integrality of rows 1..n_limit and the lcm of their denominators."""
    n_limit = min(int(n_limit), matrix.n_rows)
    if matrix._integral_by_construction:
        return IntegralityReport(True, 1, None, None, n_limit)
    lcm = 1
    witness = None
    cap_row = None
    for n in range(1, n_limit + 1):
        for v in matrix.row(n).values():
            if v.denominator != 1:
                if witness is None:
                    witness = n
                if cap_row is None:
                    lcm = math.lcm(lcm, v.denominator)
                    if lcm > cap:
                        cap_row = n
    return IntegralityReport(
        witness is None, None if cap_row is not None else lcm, witness, cap_row, n_limit
    )


def common_denominator(matrix: BohrMatrix, M: int, cap: int = DEFAULT_DENOMINATOR_CAP) -> int:
    """Q = lcm of all denominators in rows 1..M; Q*r is then integral."""
    if matrix._integral_by_construction:
        return 1
    Q = 1
    for n in range(1, min(int(M), matrix.n_rows) + 1):
        for v in matrix.row(n).values():
            Q = math.lcm(Q, v.denominator)
        if Q > cap:
            raise DenominatorCapExceeded(n, Q, cap)
    return Q


# ---------------------------------------------------------------------------
# tail models for sum_{n>N} exp(-lambda_n sigma)


@dataclass(frozen=True)
class LogGrowth:
    """lambda_n >= log(n + shift) for every n."""

    shift: float = 0.0
    threshold: float = 1.0

    def tail_sum(self, N: int, sigma: float) -> float:
        if sigma <= 1:
            return math.inf
        start = N
        extra = 0.0
        while start + self.shift <= 0:
            start += 1
            extra += (start + self.shift) ** (-sigma) if start + self.shift > 0 else math.inf
        return extra + (start + self.shift) ** (1 - sigma) / (sigma - 1)

    def to_dict(self):
        return {"kind": "log", "shift": self.shift}


@dataclass(frozen=True)
class LinearGrowth:
    """lambda_n >= slope * n + intercept for every n."""

    slope: float
    intercept: float = 0.0
    threshold: float = 0.0

    def tail_sum(self, N: int, sigma: float) -> float:
        if sigma <= 0:
            return math.inf
        first = self.slope * (N + 1) + self.intercept
        return math.exp(-sigma * first) / -math.expm1(-sigma * self.slope)

    def to_dict(self):
        return {"kind": "linear", "slope": self.slope, "intercept": self.intercept}


@dataclass(frozen=True)
class SemigroupGrowth:
    """Lambda is every nonnegative integer combination of positive generators.

    The full sum has the closed form prod_l 1/(1 - exp(-beta_l sigma)), so
    the tail is the total minus the realized prefix.
    """

    generators: tuple[float, ...]
    threshold: float = 0.0

    def total(self, sigma: float) -> float:
        if sigma <= 0:
            return math.inf
        out = 1.0
        for b in self.generators:
            out /= -math.expm1(-b * sigma)
        return out

    def to_dict(self):
        return {"kind": "semigroup"}


GrowthModel = LogGrowth | LinearGrowth | SemigroupGrowth


# ---------------------------------------------------------------------------
# exponent specs


class ExponentSpec:
    """Strictly increasing exponents lambda_1 < lambda_2 < ... (1-based)."""

    kind: str = ""
    size: int = 0
    growth: GrowthModel | None = None
    has_basis: bool = False

    def __init__(self):
        self._float_cache: np.ndarray | None = None
        self._mp_cache: dict[int, list] = {}

    # subclasses provide _value_mp(n, bits)
    def value(self, n: int, precision: int | None = None) -> mpmath.mpf:
        if not 1 <= n <= self.size:
            raise PrefixExhausted(f"index {n} outside 1..{self.size}")
        bits = working_precision(precision)
        with mpmath.workprec(bits):
            return +self._value_mp(n, bits)

    def values_mp(self, M: int, precision: int | None = None) -> list:
        bits = working_precision(precision)
        if M > self.size:
            raise PrefixExhausted(f"need {M} exponents, spec has {self.size}")
        cached = self._mp_cache.get(bits)
        if cached is None or len(cached) < M:
            start = 0 if cached is None else len(cached)
            cached = list(cached or [])
            with mpmath.workprec(bits):
                cached.extend(+self._value_mp(n, bits) for n in range(start + 1, M + 1))
            self._mp_cache[bits] = cached
        return cached[:M]

    def values(self, M: int | None = None) -> np.ndarray:
        M = self.size if M is None else int(M)
        if M > self.size:
            raise PrefixExhausted(f"need {M} exponents, spec has {self.size}")
        if self._float_cache is None or len(self._float_cache) < M:
            self._float_cache = self._float_values(M)
        return self._float_cache[:M]

    def _float_values(self, M: int) -> np.ndarray:
        return np.array([float(v) for v in self.values_mp(M, 64)], dtype=float)

    @property
    def threshold(self) -> float:
        return self.growth.threshold if self.growth is not None else math.inf

    def exponent_tail(self, N: int, sigma: float) -> float:
        """Upper bound for sum_{n>N} exp(-lambda_n sigma) over the infinite sequence."""
        if self.growth is None:
            return math.inf
        if isinstance(self.growth, SemigroupGrowth):
            total = self.growth.total(sigma)
            if not math.isfinite(total):
                return math.inf
            head = float(np.exp(-sigma * self.values(min(N, self.size))).sum()) if N else 0.0
            return max(total - head, 0.0) + 1e-14 * total
        return self.growth.tail_sum(N, sigma)

    def index_window(self, lo: float, hi: float) -> tuple[int, int]:
        """1-based half-open index range [i0, i1) with lo <= lambda_n < hi."""
        lam = self.values()
        i0 = int(np.searchsorted(lam, lo, side="left"))
        i1 = int(np.searchsorted(lam, hi, side="left"))
        # settle float ties at the boundaries with 64-bit-plus arithmetic
        while i0 > 0 and self.value(i0, 96) >= lo:
            i0 -= 1
        while i0 < self.size and self.value(i0 + 1, 96) < lo:
            i0 += 1
        while i1 > 0 and self.value(i1, 96) >= hi:
            i1 -= 1
        while i1 < self.size and self.value(i1 + 1, 96) < hi:
            i1 += 1
        if i1 == self.size and not self._covers(hi):
            raise PrefixExhausted(f"window up to {hi} runs past the realized prefix")
        return i0 + 1, i1 + 1

    def _covers(self, x: float) -> bool:
        return self.size > 0 and float(self.values()[-1]) >= x

    def truncate(self, M: int) -> "ExponentSpec":
        raise NotImplementedError

    def key(self):
        raise NotImplementedError

    def check_increasing(self, precision: int | None = None) -> None:
        vals = self.values_mp(self.size, precision)
        for i in range(1, len(vals)):
            if not vals[i] > vals[i - 1]:
                raise ValueError(f"exponents not strictly increasing at index {i + 1}")


class PrimeLogBasis(Sequence):
    """Lazy basis (log 2, log 3, log 5, ...) of primes up to ``n_max``."""

    def __init__(self, n_max: int):
        self.n_max = n_max
        self.table = prime_table(n_max)
        self._len: int | None = None

    def __len__(self) -> int:
        if self._len is None:
            self._len = self.table.count()
        return self._len

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        if index < 0:
            index += len(self)
        p = self.table.prime(index)
        if p > self.n_max:
            raise IndexError(index)
        return Generator(f"log {p}", lambda bits, p=p: mpmath.log(p), f"log({p})")

    def prime(self, index: int) -> int:
        return self.table.prime(index)

    def index_of(self, p: int) -> int:
        return self.table.index(p)


class SymbolicExponents(ExponentSpec):
    kind = "symbolic"
    has_basis = True

    def __init__(
        self,
        basis: Sequence[Generator],
        matrix: BohrMatrix,
        growth: GrowthModel | None = None,
        *,
        check: bool = True,
    ):
        super().__init__()
        self.basis = basis
        self.matrix = matrix
        self.size = matrix.n_rows
        self.growth = growth
        self._beta_cache: dict[int, list] = {}
        if check:
            need = matrix.support_size()
            if need > len(basis):
                raise ValueError(
                    f"basis prefix of length {len(basis)} does not cover row support {need}"
                )
            self.check_increasing()

    def basis_values(self, precision: int | None = None, count: int | None = None) -> list:
        bits = working_precision(precision)
        count = len(self.basis) if count is None else count
        cached = self._beta_cache.setdefault(bits, [])
        if len(cached) < count:
            cached.extend(g.value(bits) for g in self.basis[len(cached) : count])
        return cached[:count]

    def _value_mp(self, n: int, bits: int):
        row = self.matrix.row(n)
        if not row:
            return mpmath.mpf(0)
        betas = self.basis_values(bits + 8, max(row) + 1)
        return mpmath.fsum(mpmath.mpf(v.numerator) / v.denominator * betas[l] for l, v in row.items())

    def truncate(self, M: int) -> "SymbolicExponents":
        return SymbolicExponents(self.basis, BohrMatrix(self.matrix.rows(M)), self.growth, check=False)

    def key(self):
        return ("symbolic", tuple(g.key() for g in self.basis), self.matrix.key())


class OrdinaryExponents(SymbolicExponents):
    """lambda_n = log n with the integral basis of prime logarithms."""

    kind = "ordinary"

    def __init__(self, n_max: int):
        if n_max < 1:
            raise ValueError("n_max must be >= 1")
        self.n_max = int(n_max)
        basis = PrimeLogBasis(self.n_max)
        table = basis.table

        def row_fn(n: int) -> dict[int, Fraction]:
            return {table.index(p): Fraction(k) for p, k in _factor(n)}

        matrix = BohrMatrix(row_fn=row_fn, n_rows=self.n_max, integral=True)
        super().__init__(basis, matrix, LogGrowth(0.0), check=False)

    def _value_mp(self, n: int, bits: int):
        return mpmath.log(n)

    def _float_values(self, M: int) -> np.ndarray:
        return np.log(np.arange(1, M + 1, dtype=float))

    def values(self, M: int | None = None) -> np.ndarray:
        M = self.size if M is None else int(M)
        if M > self.size:
            raise PrefixExhausted(f"need {M} exponents, spec has {self.size}")
        if M > 5_000_000:
            raise MemoryError("refusing to materialize more than 5e6 ordinary exponents")
        return super().values(M)

    def index_window(self, lo: float, hi: float) -> tuple[int, int]:
        with mpmath.workprec(128):
            a = mpmath.exp(mpmath.mpf(lo))
            b = mpmath.exp(mpmath.mpf(hi))
            i0 = max(1, int(mpmath.ceil(a)))
            i1 = max(1, int(mpmath.ceil(b)))
        if i1 - 1 > self.size:
            raise PrefixExhausted(f"window up to {hi} needs n < {i1}, spec has {self.size}")
        return i0, i1

    def row(self, n: int) -> dict[int, Fraction]:
        return self.matrix.row(n)

    def truncate(self, M: int) -> "OrdinaryExponents":
        return OrdinaryExponents(M)

    def key(self):
        return ("ordinary", self.n_max)


class ExplicitExponents(ExponentSpec):
    """Numeric exponents only; no basis operations."""

    kind = "explicit"

    def __init__(self, values: Iterable, growth: GrowthModel | None = None, precision: int | None = None):
        super().__init__()
        bits = working_precision(precision)
        with mpmath.workprec(bits):
            self._values = [mpmath.mpf(v) if not isinstance(v, str) else mpmath.mpf(v) for v in values]
        self._source = [v if isinstance(v, str) else mpmath.nstr(mpmath.mpf(v), 40) for v in values]
        self.size = len(self._values)
        self.growth = growth
        self.check_increasing(bits)

    def _value_mp(self, n: int, bits: int):
        return self._values[n - 1]

    def truncate(self, M: int) -> "ExplicitExponents":
        return ExplicitExponents(self._source[:M], self.growth)

    def key(self):
        return ("explicit", tuple(self._source))


# ---------------------------------------------------------------------------
# constructors


def ordinary_spec(n_max: int) -> OrdinaryExponents:
    return OrdinaryExponents(n_max)


def symbolic_spec(
    generators: Sequence[Generator | str],
    rows: Sequence[Mapping[int, object]],
    growth: GrowthModel | None = None,
) -> SymbolicExponents:
    gens = [g if isinstance(g, Generator) else Generator.from_expr(g) for g in generators]
    return SymbolicExponents(gens, BohrMatrix(rows), growth)


def explicit_spec(values: Iterable, growth: GrowthModel | None = None) -> ExplicitExponents:
    return ExplicitExponents(values, growth)


def realize(spec: ExponentSpec, n: int, precision: int | None = None) -> mpmath.mpf:
    return spec.value(n, precision)


def reconstruct(spec: SymbolicExponents, n: int, precision: int | None = None) -> mpmath.mpf:
    """sum_l r_{n,l} beta_l, evaluated from the basis regardless of shortcuts."""
    bits = working_precision(precision)
    row = spec.matrix.row(n)
    with mpmath.workprec(bits + 8):
        out = mpmath.mpf(0)
        for l, v in row.items():
            out += mpmath.mpf(v.numerator) / v.denominator * spec.basis[l].value(bits + 8)
    return out


def same_exponents(a: ExponentSpec, b: ExponentSpec) -> bool:
    return a is b or a.key() == b.key()
