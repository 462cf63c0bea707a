"""General Dirichlet series: coefficients, certified truncation, abscissae.

Coefficients are kept in polar form (modulus, phase) so that twisting
changes phases only and moduli stay bit-identical.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np

from .exponents import (
    ExponentSpec,
    OrdinaryExponents,
    PrefixExhausted,
    SymbolicExponents,
    exact_mpf,
    p_adic_valuation,
    working_precision,
)

TWO_PI = 2.0 * math.pi
_INFLATE = 1.0 + 1e-12
_CHUNK = 1 << 16


class AccuracyUnreachable(ValueError):
    def __init__(self, best_bound: float, M: int):
        super().__init__(
            f"accuracy unreachable within the available prefix: best tail bound {best_bound:.3e} at M={M}"
        )
        self.best_bound = best_bound
        self.M = M


# ---------------------------------------------------------------------------
# coefficient sources (1-based, half-open ranges [i0, i1))


class Coefficients:
    size: int | None = None  # None: defined for every n

    def polar(self, i0: int, i1: int) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def modulus(self, i0: int, i1: int) -> np.ndarray:
        return self.polar(i0, i1)[0]

    def values(self, i0: int, i1: int) -> np.ndarray:
        mod, ph = self.polar(i0, i1)
        return mod * np.exp(1j * ph)

    def at(self, n: int) -> complex:
        return complex(self.values(n, n + 1)[0])

    def abs_sum(self, i0: int, i1: int) -> float:
        total = 0.0
        for a in range(i0, i1, _CHUNK * 16):
            total += float(self.modulus(a, min(i1, a + _CHUNK * 16)).sum())
        return total

    def max_modulus(self, i0: int, i1: int) -> float:
        if i1 <= i0:
            return 0.0
        return max(float(self.modulus(a, min(i1, a + _CHUNK * 16)).max()) for a in range(i0, i1, _CHUNK * 16))

    # Euler structure a(n) = c * prod_p u_p^{v_p(n)} with finitely many u_p != 1
    def euler(self) -> tuple[complex, dict[int, complex]] | None:
        return None

    def _check(self, i0: int, i1: int):
        if i0 < 1 or i1 < i0:
            raise ValueError(f"bad coefficient range [{i0}, {i1})")
        if self.size is not None and i1 - 1 > self.size:
            raise PrefixExhausted(f"coefficients known up to n={self.size}, asked for {i1 - 1}")


def _wrap(phase: np.ndarray) -> np.ndarray:
    out = np.mod(phase, TWO_PI)
    # tiny negatives round up to exactly 2 pi
    return np.where(out >= TWO_PI, 0.0, out)


class PolarCoefficients(Coefficients):
    def __init__(self, modulus: Sequence[float], phase: Sequence[float]):
        self._mod = np.asarray(modulus, dtype=float)
        self._ph = _wrap(np.asarray(phase, dtype=float))
        if self._mod.shape != self._ph.shape or (self._mod < 0).any():
            raise ValueError("modulus/phase arrays must match and moduli be nonnegative")
        self.size = len(self._mod)

    @classmethod
    def from_complex(cls, values: Sequence[complex]) -> "PolarCoefficients":
        z = np.asarray(values, dtype=complex)
        return cls(np.abs(z), np.where(z == 0, 0.0, np.angle(z)))

    def polar(self, i0, i1):
        self._check(i0, i1)
        return self._mod[i0 - 1 : i1 - 1], self._ph[i0 - 1 : i1 - 1]


class ConstantCoefficients(Coefficients):
    def __init__(self, c: complex = 1.0, size: int | None = None):
        self.c = complex(c)
        self.size = size

    def polar(self, i0, i1):
        self._check(i0, i1)
        n = i1 - i0
        return np.full(n, abs(self.c)), np.full(n, _wrap(np.angle(self.c)) if self.c else 0.0)

    def abs_sum(self, i0, i1):
        return abs(self.c) * max(0, i1 - i0)

    def max_modulus(self, i0, i1):
        return abs(self.c) if i1 > i0 else 0.0

    def euler(self):
        return self.c, {}


class EulerCoefficients(Coefficients):
    """a(n) = c * prod_p u_p^{v_p(n)}, u_p given in polar form (|u_p|, arg u_p)."""

    def __init__(self, c: complex, units: dict[int, tuple[float, float]], size: int | None = None):
        self.c = complex(c)
        self.units = {int(p): (float(m), float(a) % TWO_PI) for p, (m, a) in units.items()}
        self.size = size

    def polar(self, i0, i1):
        self._check(i0, i1)
        n = np.arange(i0, i1, dtype=np.int64)
        mod = np.full(n.shape, abs(self.c))
        ph = np.full(n.shape, float(np.angle(self.c)) if self.c else 0.0)
        for p, (m, a) in self.units.items():
            v = p_adic_valuation(n, p)
            if m != 1.0:
                mod = mod * m**v
            ph = ph + v * a
        return mod, _wrap(ph)

    def abs_sum(self, i0, i1):
        if all(m == 1.0 for m, _ in self.units.values()):
            return abs(self.c) * max(0, i1 - i0)
        return super().abs_sum(i0, i1)

    def max_modulus(self, i0, i1):
        if all(m == 1.0 for m, _ in self.units.values()):
            return abs(self.c) if i1 > i0 else 0.0
        return super().max_modulus(i0, i1)

    def euler(self):
        return self.c, {p: m * complex(math.cos(a), math.sin(a)) for p, (m, a) in self.units.items()}


class FunctionCoefficients(Coefficients):
    """Coefficients from a vectorized rule ``n (int64 array) -> complex array``."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], size: int | None = None, name: str = ""):
        self.fn = fn
        self.size = size
        self.name = name

    def polar(self, i0, i1):
        self._check(i0, i1)
        z = np.asarray(self.fn(np.arange(i0, i1, dtype=np.int64)), dtype=complex)
        return np.abs(z), _wrap(np.where(z == 0, 0.0, np.angle(z)))


# ---------------------------------------------------------------------------
# tail majorants


@dataclass(frozen=True)
class UniformBound:
    A: float


@dataclass(frozen=True)
class FiniteSupport:
    N: int


@dataclass(frozen=True)
class ListedBounds:
    """blocks[i] = (last index of block i, bound on |a(n)| in the block).

    The bound of the final block also covers every later index.
    """

    blocks: tuple[tuple[int, float], ...]

    def bound_at(self, n: np.ndarray) -> np.ndarray:
        ends = np.array([b[0] for b in self.blocks])
        vals = np.array([b[1] for b in self.blocks])
        idx = np.minimum(np.searchsorted(ends, n, side="left"), len(vals) - 1)
        return vals[idx]


TailMajorant = UniformBound | FiniteSupport | ListedBounds


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DirichletSeries:
    exponents: ExponentSpec
    coefficients: Coefficients
    tail: TailMajorant
    label: str = ""
    spot_check: int = field(default=2000, repr=False)

    def __post_init__(self):
        csize = self.coefficients.size
        if csize is not None and csize < self.exponents.size and not isinstance(self.tail, FiniteSupport):
            raise ValueError("coefficients end before the exponent prefix")
        k = min(self.size, self.spot_check)
        if k:
            mod = self.coefficients.modulus(1, k + 1)
            if isinstance(self.tail, UniformBound) and (mod > self.tail.A * _INFLATE).any():
                n = int(np.argmax(mod > self.tail.A * _INFLATE)) + 1
                raise ValueError(f"|a({n})| exceeds the declared uniform bound {self.tail.A}")
            if isinstance(self.tail, ListedBounds):
                bad = mod > self.tail.bound_at(np.arange(1, k + 1)) * _INFLATE
                if bad.any():
                    raise ValueError(f"|a({int(np.argmax(bad)) + 1})| exceeds its listed bound")
            if isinstance(self.tail, FiniteSupport) and k > self.tail.N:
                if (mod[self.tail.N :] != 0).any():
                    raise ValueError("nonzero coefficient beyond the declared finite support")

    @property
    def size(self) -> int:
        """Number of terms that can be realized."""
        n = self.exponents.size
        if self.coefficients.size is not None:
            n = min(n, self.coefficients.size)
        if isinstance(self.tail, FiniteSupport):
            n = min(n, self.tail.N)
        return n

    @property
    def threshold(self) -> float:
        """Abscissa above which the majorant gives a finite tail."""
        if isinstance(self.tail, FiniteSupport):
            return -math.inf
        return self.exponents.threshold

    def lambdas(self, M: int) -> np.ndarray:
        return self.exponents.values(M)

    def coeffs(self, M: int) -> np.ndarray:
        return self.coefficients.values(1, M + 1)

    def with_coefficients(self, coefficients: Coefficients, label: str | None = None) -> "DirichletSeries":
        return DirichletSeries(self.exponents, coefficients, self.tail, self.label if label is None else label)


@dataclass(frozen=True)
class EvalResult:
    value: complex
    truncation_M: int
    tail_bound: float


# ---------------------------------------------------------------------------
# truncation


def _weights(series: DirichletSeries, i0: int, i1: int, sigma: float) -> float:
    total = 0.0
    for a in range(i0, i1, _CHUNK * 8):
        b = min(i1, a + _CHUNK * 8)
        lam = series.exponents.values(b - 1)[a - 1 : b - 1]
        total += float((series.coefficients.modulus(a, b) * np.exp(-sigma * lam)).sum())
    return total


_EXACT_LIMIT = 2_000_000


def tail_bound(series: DirichletSeries, M: int, sigma: float, *, check: bool = True) -> float:
    """Rigorous upper bound for sum_{n>M} |a(n)| exp(-lambda_n sigma)."""
    M = max(int(M), 0)
    tail = series.tail
    if isinstance(tail, FiniteSupport):
        N = min(tail.N, series.exponents.size)
        if M >= N:
            return 0.0
        return _weights(series, M + 1, N + 1, sigma) * _INFLATE
    if sigma <= series.threshold:
        if check:
            raise ValueError(f"sigma={sigma} not above the convergence threshold {series.threshold}")
        return math.inf
    spec = series.exponents
    N = series.size
    if isinstance(tail, UniformBound):
        A_beyond = tail.A
    else:
        A_beyond = max(b for _, b in tail.blocks)
    if M >= N or N - M > _EXACT_LIMIT:
        if isinstance(tail, ListedBounds):
            A_beyond = float(tail.bound_at(np.array([M + 1]))[0]) if M < tail.blocks[-1][0] else tail.blocks[-1][1]
            A_beyond = max([A_beyond] + [b for e, b in tail.blocks if e > M])
        return A_beyond * spec.exponent_tail(M, sigma) * _INFLATE
    exact = _weights(series, M + 1, N + 1, sigma)
    return (exact + A_beyond * spec.exponent_tail(N, sigma)) * _INFLATE


def _phases(spec: ExponentSpec, M: int, t: float, precision: int | None = None) -> np.ndarray:
    """-lambda_n * t mod 2pi for n <= M, accurate to ~1e-13 whatever |t|."""
    if M == 0:
        return np.zeros(0)
    if t == 0:
        return np.zeros(M)
    lam = spec.values(M)
    t = exact_mpf(t)
    scale = abs(t) * max(1.0, float(abs(lam).max()))
    if scale < 1e3:
        return np.mod(-lam * float(t), TWO_PI)
    bits = working_precision(precision) + int(mpmath.log(scale, 2)) + 16
    if isinstance(spec, OrdinaryExponents):
        # exact integer structure: -t log n = sum_p v_p(n) (-t log p)
        n = np.arange(1, M + 1, dtype=np.int64)
        out = np.zeros(M)
        with mpmath.workprec(bits):
            tt = t
            two_pi = 2 * mpmath.pi
            for p in spec.basis.table.small[spec.basis.table.small <= M]:
                ph = float(mpmath.fmod(-tt * mpmath.log(int(p)), two_pi))
                out += p_adic_valuation(n, int(p)) * ph
        return np.mod(out, TWO_PI)
    vals = spec.values_mp(M, bits)
    with mpmath.workprec(bits):
        tt = t
        two_pi = 2 * mpmath.pi
        return np.array([float(mpmath.fmod(-v * tt, two_pi)) for v in vals]) % TWO_PI


def shifted_coefficients(series: DirichletSeries, M: int, tau: float = 0.0) -> np.ndarray:
    """a(n) exp(-i lambda_n tau), n <= M: coefficients of F(s + i tau)."""
    mod, ph = series.coefficients.polar(1, M + 1)
    if tau:
        ph = ph + _phases(series.exponents, M, tau)
    return mod * np.exp(1j * ph)


def partial_sums(lam: np.ndarray, coeffs: np.ndarray, s: np.ndarray) -> np.ndarray:
    """sum_n coeffs[n] exp(-lam[n] s) at each point of ``s`` (moderate |Im s|)."""
    s = np.asarray(s, dtype=complex)
    flat = s.ravel()
    out = np.zeros(flat.shape, dtype=complex)
    if len(lam) == 0:
        return out.reshape(s.shape)
    step = max(1, (1 << 22) // max(1, len(lam)))
    for a in range(0, len(flat), step):
        blk = flat[a : a + step]
        out[a : a + step] = np.exp(-np.outer(blk, lam)) @ coeffs
    return out.reshape(s.shape)


def evaluate_at(series: DirichletSeries, s, M: int, tau: float = 0.0) -> np.ndarray:
    """Partial sums to M of F(s + i tau) on an array of points."""
    return partial_sums(series.lambdas(M), shifted_coefficients(series, M, tau), s)


def minimal_truncation(series: DirichletSeries, sigma: float, accuracy: float) -> tuple[int, float]:
    """Smallest M >= 1 with tail_bound(M, sigma) <= accuracy."""
    if not accuracy > 0:
        raise ValueError("accuracy must be positive")
    N = series.size
    if math.isinf(accuracy):
        return 1, tail_bound(series, 1, sigma)
    best = tail_bound(series, N, sigma)
    if best > accuracy:
        raise AccuracyUnreachable(best, N)
    lo, hi = 1, N
    if tail_bound(series, 1, sigma) <= accuracy:
        return 1, tail_bound(series, 1, sigma)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail_bound(series, mid, sigma) <= accuracy:
            hi = mid
        else:
            lo = mid
    return hi, tail_bound(series, hi, sigma)


def evaluate(series: DirichletSeries, s: complex, accuracy: float) -> EvalResult:
    s = complex(s)
    if not s.real > series.threshold:
        raise ValueError(f"Re(s)={s.real} not above the convergence threshold {series.threshold}")
    M, tb = minimal_truncation(series, s.real, accuracy)
    lam = series.lambdas(M)
    mod, ph = series.coefficients.polar(1, M + 1)
    ph = ph + _phases(series.exponents, M, s.imag)
    terms = mod * np.exp(-lam * s.real) * np.exp(1j * ph)
    value = complex(math.fsum(terms.real), math.fsum(terms.imag))
    return EvalResult(value, M, tb)


def evaluation_trace(series: DirichletSeries, s: complex, M: int) -> list[dict]:
    lam = series.lambdas(M)
    a = series.coeffs(M)
    terms = a * np.exp(-lam * s.real) * np.exp(1j * _phases(series.exponents, M, s.imag))
    ps = np.cumsum(terms)
    return [
        {
            "n": n + 1,
            "lambda": float(lam[n]),
            "re_a": float(a[n].real),
            "im_a": float(a[n].imag),
            "re_partial": float(ps[n].real),
            "im_partial": float(ps[n].imag),
        }
        for n in range(M)
    ]


def write_trace_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["n", "lambda", "re_a", "im_a", "re_partial", "im_partial"])
        w.writeheader()
        w.writerows(rows)


# ---------------------------------------------------------------------------
# Kuniyeda window sums


@dataclass(frozen=True)
class SamplingPlan:
    n_points: int = 2048
    refine_top: int = 3
    golden_iters: int = 40
    lift: bool = True
    lift_coords: int = 16
    lift_sweeps: int = 2
    lift_grid: int = 32
    t_span: float | None = None  # override for the sampled t-range length
    chunk: int = 64


@dataclass
class WindowSup:
    x: float
    window: tuple[int, int]
    n_terms: int
    sampled: float
    t_best: float
    lifted: float
    upper: float
    method: str
    empty: bool = False
    warning: str | None = None
    numerical_error: float = 0.0

    @property
    def estimate(self) -> float:
        return max(self.sampled, self.lifted)


def _golden_max(f: Callable[[float], float], a: float, b: float, iters: int) -> tuple[float, float]:
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


class _DirectWindow:
    """S(t) = sum a_n exp(-i (lambda_n - lambda_c) t) over an explicit window."""

    def __init__(self, lam: np.ndarray, a: np.ndarray):
        self.center = 0.5 * (lam[0] + lam[-1])
        self.dl = lam - self.center
        self.a = a

    def __call__(self, t: np.ndarray, chunk: int = 64) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty(len(t), dtype=complex)
        step = max(1, min(chunk, (1 << 23) // max(1, len(self.dl))))
        for k in range(0, len(t), step):
            out[k : k + step] = self.a @ np.exp(-1j * np.outer(self.dl, t[k : k + step]))
        return out


class _EulerWindow:
    """Window sums of c * prod u_p^{v_p(n)} n^{-it} over integer n in [i0, i1).

    With g(p^k) = u_p^{k-1}(u_p - 1) one has a = c (1 * g), so the window sum
    is c * sum_e g(e) e^{-it} Z(ceil(i0/e), ceil(i1/e), t) over P-smooth e,
    where Z(j0, j1, t) = sum_{j0 <= j < j1} j^{-it}. Z comes from a cumulative
    table for small j and Euler-Maclaurin (4 correction terms) beyond it.
    """

    K = 4
    _B = [mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k) for k in range(1, 5)]
    _B = [float(b) for b in _B]

    def __init__(self, c: complex, units: dict[int, complex], i0: int, i1: int):
        self.c = c
        self.i0, self.i1 = i0, i1
        self.set_units(units)

    def set_units(self, units: dict[int, complex]):
        self.units = {p: u for p, u in units.items() if u != 1}
        es = [1]
        gs = [1.0 + 0j]
        for p, u in sorted(self.units.items()):
            new_e, new_g = [], []
            for e, g in zip(es, gs):
                pk, k = e * p, 1
                while pk < self.i1:
                    new_e.append(pk)
                    new_g.append(g * u ** (k - 1) * (u - 1))
                    pk *= p
                    k += 1
            es += new_e
            gs += new_g
        e = np.array(es, dtype=np.int64)
        g = np.array(gs, dtype=complex)
        j0 = -(-self.i0 // e)
        j1 = -(-self.i1 // e)
        keep = (j1 > j0) & (g != 0)
        self.e, self.g, self.j0, self.j1 = e[keep], g[keep], j0[keep], j1[keep]
        self.loge = np.log(self.e.astype(float))

    def _em(self, a: np.ndarray, b: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, float]:
        """sum_{j=a}^{b} j^{-it} for a <= b, arrays over (a,b) x t."""
        s = 1j * t[None, :]
        la = np.log(a.astype(float))[:, None]
        lb = np.log(b.astype(float))[:, None]
        fa = np.exp(-s * la)
        fb = np.exp(-s * lb)
        A = a.astype(float)[:, None]
        Bv = b.astype(float)[:, None]
        out = (Bv * fb - A * fa) / (1 - s) + 0.5 * (fa + fb)
        poch = -s  # (-s)(-s-1)...(-s-m+1)
        m = 1
        da, db = fa / A, fb / Bv  # u^{-s-1}
        for k in range(self.K):
            # derivative of order 2k+1 is poch_{2k+1} u^{-s-2k-1}
            out += self._B[k] * poch * (db - da)
            poch = poch * (-s - m) * (-s - m - 1)
            m += 2
            da, db = da / (A * A), db / (Bv * Bv)
        # |R| <= 2 zeta(2K) (2pi)^{-2K} |(-s)_{2K}| a^{1-2K} / (2K-1)
        tmax = float(np.abs(t).max()) if len(t) else 0.0
        amin = float(a.min()) if len(a) else 1.0
        pk = 1.0
        for i in range(2 * self.K):
            pk *= tmax + i
        err = 2 * 1.0041 / (TWO_PI ** (2 * self.K)) * pk * amin ** (1 - 2 * self.K) / (2 * self.K - 1)
        return out, err * len(a)

    def __call__(self, t: np.ndarray, chunk: int = 64) -> tuple[np.ndarray, float]:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty(len(t), dtype=complex)
        err_total = 0.0
        for k in range(0, len(t), chunk):
            tc = t[k : k + chunk]
            tmax = float(np.abs(tc).max())
            Jd = int(max(1000, 16 * tmax))
            jj = np.arange(1, Jd + 1, dtype=float)
            table = np.zeros((Jd + 1, len(tc)), dtype=complex)
            table[1:] = np.cumsum(np.exp(-1j * np.outer(np.log(jj), tc)), axis=0)
            # table[j] = sum_{i <= j} i^{-it}; Z[j0, j1) on small j = table[j1-1] - table[j0-1]
            z = np.zeros((len(self.e), len(tc)), dtype=complex)
            small = self.j0 <= Jd
            if small.any():
                hi = np.minimum(self.j1[small], Jd + 1) - 1
                z[small] = table[hi] - table[self.j0[small] - 1]
            big = self.j1 > Jd + 1
            if big.any():
                a = np.maximum(self.j0[big], Jd + 1)
                b = self.j1[big] - 1
                zz, err = self._em(a, b, tc)
                z[big] += zz
                err_total = max(err_total, err * float(np.abs(self.g[big]).max()))
            pref = self.g[:, None] * np.exp(-1j * np.outer(self.loge, tc))
            out[k : k + chunk] = self.c * (pref * z).sum(axis=0)
        return out, err_total * abs(self.c)


def _window_coordinate_matrix(spec: SymbolicExponents, i0: int, i1: int, weights: np.ndarray, limit: int):
    """Integer exponent matrix (rows n in window, columns = heaviest basis coords) and per-column period scale."""
    if isinstance(spec, OrdinaryExponents):
        n = np.arange(i0, i1, dtype=np.int64)
        primes = [int(p) for p in spec.basis.table.small[:limit] if p < i1]
        mat = np.stack([p_adic_valuation(n, p) for p in primes], axis=1) if primes else None
        return mat, list(range(len(primes)))
    rows = [spec.matrix.row(n) for n in range(i0, i1)]
    score: dict[int, float] = {}
    for w, r in zip(weights, rows):
        for l, v in r.items():
            score[l] = score.get(l, 0.0) + w * abs(float(v))
    cols = sorted(score, key=lambda l: (-score[l], l))[:limit]
    if not cols:
        return None, []
    mat = np.zeros((len(rows), len(cols)), dtype=np.int64)
    den = []
    for j, l in enumerate(cols):
        q = 1
        for r in rows:
            if l in r:
                q = math.lcm(q, r[l].denominator)
        den.append(q)
        for i, r in enumerate(rows):
            if l in r:
                mat[i, j] = int(r[l] * q)
    return mat, cols


def _torus_lift_direct(w: np.ndarray, mat: np.ndarray, plan: SamplingPlan) -> float:
    """max over phi of |sum_n w_n exp(i sum_l mat[n,l] phi_l)| by coordinate ascent."""
    phi = np.zeros(mat.shape[1])
    base = w.copy()
    best = abs(base.sum())
    grid = np.linspace(0, TWO_PI, plan.lift_grid, endpoint=False)
    for _ in range(plan.lift_sweeps):
        for j in range(mat.shape[1]):
            col = mat[:, j]
            rest = base * np.exp(-1j * col * phi[j])

            def val(p, rest=rest, col=col):
                return abs((rest * np.exp(1j * col * p)).sum())

            vals = np.abs(np.exp(1j * np.outer(grid, col)) @ rest)
            k = int(np.argmax(vals))
            h = grid[1] - grid[0]
            p, v = _golden_max(val, grid[k] - h, grid[k] + h, 30)
            if vals[k] > v:
                p, v = grid[k], vals[k]
            if v > best:
                best = v
                phi[j] = p
                base = rest * np.exp(1j * col * p)
    return best


def _torus_lift_euler(
    win: _EulerWindow, units: dict[int, complex], t: float, plan: SamplingPlan, upper: float = math.inf
) -> float:
    primes = sorted(p for p, u in units.items() if u != 1)
    cur = dict(units)

    def evaluate(u):
        win.set_units(u)
        return abs(win(np.array([t]))[0][0])

    best = evaluate(cur)
    # the untwisted point u = 1 is on the torus closure as well
    flat = {p: abs(u) + 0j for p, u in units.items()}
    v = evaluate(flat)
    if v > best:
        best, cur = v, flat
    if best >= upper * (1 - 1e-9):
        win.set_units(units)
        return best
    grid = np.linspace(0, TWO_PI, max(8, plan.lift_grid // 2), endpoint=False)
    for _ in range(plan.lift_sweeps):
        for p in primes:
            r = abs(units[p])

            def val(a, p=p):
                trial = dict(cur)
                trial[p] = r * complex(math.cos(a), math.sin(a))
                return evaluate(trial)

            vals = [val(a) for a in grid]
            k = int(np.argmax(vals))
            h = grid[1] - grid[0]
            a, v = _golden_max(val, grid[k] - h, grid[k] + h, 16)
            if vals[k] > v:
                a, v = grid[k], vals[k]
            if v > best:
                best = v
                cur[p] = r * complex(math.cos(a), math.sin(a))
    win.set_units(units)
    return best


def kuniyeda_Tx(series: DirichletSeries, x: float, plan: SamplingPlan = SamplingPlan()) -> WindowSup:
    """Estimate T_x = sup_t |sum_{[x] <= lambda_n < x} a(n) exp(-i lambda_n t)|."""
    spec = series.exponents
    lam1 = float(spec.value(1, 64))
    if not x > lam1:
        raise ValueError(f"x={x} must exceed lambda_1={lam1}")
    lo = math.floor(x)
    if float(x) == lo:
        warnings.warn(f"integer x={x} gives the empty window [{lo}, {x})")
        return WindowSup(x, (0, 0), 0, 0.0, 0.0, 0.0, 0.0, "empty", True, "integer x: empty window")
    i0, i1 = spec.index_window(lo, x)
    if isinstance(series.tail, FiniteSupport):
        i1 = min(i1, series.tail.N + 1)
        i0 = min(i0, i1)
    if i1 - 1 > series.size:
        raise PrefixExhausted(f"window for x={x} needs n up to {i1 - 1}")
    count = i1 - i0
    coeffs = series.coefficients
    upper = coeffs.abs_sum(i0, i1) if count else 0.0
    if count == 0 or upper == 0:
        return WindowSup(x, (i0, i1), count, 0.0, 0.0, 0.0, 0.0, "empty", True, "empty window")
    if count == 1:
        v = float(coeffs.modulus(i0, i1)[0])
        return WindowSup(x, (i0, i1), 1, v, 0.0, v, v, "single")

    euler = coeffs.euler() if isinstance(spec, OrdinaryExponents) else None
    if euler is not None and count > 20_000:
        return _kuniyeda_euler(x, i0, i1, euler, upper, plan)
    if count > 5_000_000:
        raise ValueError(f"window at x={x} has {count} terms and no Euler structure")

    lam = spec.values(i1 - 1)[i0 - 1 :]
    a = coeffs.values(i0, i1)
    S = _DirectWindow(lam, a)
    span = float(lam[-1] - lam[0])
    period = _window_period(spec, i0, i1)
    if period is not None:
        ts = np.linspace(0.0, period, plan.n_points, endpoint=False)
        h = period / plan.n_points
    else:
        h = plan.t_span / plan.n_points if plan.t_span else 1.0 / (2.0 * span)
        ts = (np.arange(plan.n_points) - plan.n_points // 2) * h
    vals = np.abs(S(ts, plan.chunk))
    t_best, best = _refine(lambda t: abs(S(np.array([t]))[0]), ts, vals, h, plan)
    lifted = 0.0
    if plan.lift and spec.has_basis and best < upper * (1 - 1e-12):
        w = a * np.exp(-1j * S.dl * t_best)
        mat, cols = _window_coordinate_matrix(spec, i0, i1, np.abs(a), plan.lift_coords)
        if mat is not None:
            lifted = min(_torus_lift_direct(w, mat, plan), upper)
    return WindowSup(x, (i0, i1), count, min(best, upper), t_best, lifted, upper, "direct")


def _refine(f, ts, vals, h, plan) -> tuple[float, float]:
    order = np.argsort(-vals)[: plan.refine_top]
    t_best, best = float(ts[order[0]]), float(vals[order[0]])
    for k in order:
        t, v = _golden_max(f, ts[k] - h, ts[k] + h, plan.golden_iters)
        if v > best:
            t_best, best = t, v
    return t_best, best


def _window_period(spec: ExponentSpec, i0: int, i1: int) -> float | None:
    if not isinstance(spec, SymbolicExponents) or isinstance(spec, OrdinaryExponents):
        return None
    cols = set()
    q = 1
    for n in range(i0, i1):
        r = spec.matrix.row(n)
        cols.update(r)
        for v in r.values():
            q = math.lcm(q, v.denominator)
        if len(cols) > 1:
            return None
    if len(cols) != 1:
        return None
    beta = float(spec.basis[next(iter(cols))].value(64))
    return TWO_PI * q / abs(beta)


def _kuniyeda_euler(x, i0, i1, euler, upper, plan: SamplingPlan) -> WindowSup:
    c, units = euler
    win = _EulerWindow(c, units, i0, i1)
    span = math.log((i1 - 1) / i0)
    h = plan.t_span / plan.n_points if plan.t_span else 1.0 / (2.0 * span)
    ts = (np.arange(plan.n_points) - plan.n_points // 2) * h
    vals, err = win(ts, plan.chunk)
    vals = np.abs(vals)
    t_best, best = _refine(lambda t: abs(win(np.array([t]))[0][0]), ts, vals, h, plan)
    lifted = 0.0
    if plan.lift and win.units and best < upper * (1 - 1e-12):
        lifted = _torus_lift_euler(win, units, t_best, plan, upper)
    slack = err
    return WindowSup(
        x,
        (i0, i1),
        i1 - i0,
        min(max(best - slack, 0.0), upper),
        t_best,
        min(max(lifted - slack, 0.0), upper),
        upper,
        "euler",
        numerical_error=slack,
    )


# ---------------------------------------------------------------------------
# abscissae


@dataclass
class AbscissaEstimate:
    estimate: float
    grid: list[float]
    ratios: list[float]  # log(T_x)/x per grid point (-inf for empty windows)
    tail_half: list[float]
    all_empty: bool
    windows: list = field(default_factory=list)

    def rows(self) -> list[dict]:
        out = []
        for k, x in enumerate(self.grid):
            w = self.windows[k] if self.windows else None
            out.append(
                {
                    "x": x,
                    "log_T_over_x": self.ratios[k],
                    "T_estimate": getattr(w, "estimate", w),
                    "T_upper": getattr(w, "upper", w),
                    "n_terms": getattr(w, "n_terms", None),
                    "in_tail_half": x in self.tail_half,
                }
            )
        return out


def _tail_half(grid: Sequence[float]) -> list[float]:
    grid = list(grid)
    return grid[len(grid) - (len(grid) + 1) // 2 :]


def _summarize(grid, values, windows) -> AbscissaEstimate:
    ratios = [math.log(v) / x if v > 0 else -math.inf for x, v in zip(grid, values)]
    half = _tail_half(grid)
    top = ratios[len(grid) - len(half) :]
    est = max(top) if top else -math.inf
    return AbscissaEstimate(est, list(grid), ratios, half, all(v <= 0 for v in values), windows)


def _check_grid(x_grid):
    grid = [float(x) for x in x_grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("x_grid must be a nonempty increasing sequence")
    return grid


def sigma_uniform_estimate(
    series: DirichletSeries, x_grid: Sequence[float], plan: SamplingPlan = SamplingPlan()
) -> AbscissaEstimate:
    """Finite-grid proxy for limsup log(T_x)/x: max over the upper half of the grid."""
    grid = _check_grid(x_grid)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        windows = [kuniyeda_Tx(series, x, plan) for x in grid]
    return _summarize(grid, [w.estimate for w in windows], windows)


def sigma_absolute_estimate(series: DirichletSeries, x_grid: Sequence[float]) -> AbscissaEstimate:
    """Same proxy with sum |a(n)| over the window in place of T_x."""
    grid = _check_grid(x_grid)
    spec = series.exponents
    vals = []
    for x in grid:
        lo = math.floor(x)
        if x == lo:
            vals.append(0.0)
            continue
        i0, i1 = spec.index_window(lo, x)
        if isinstance(series.tail, FiniteSupport):
            i1 = min(i1, series.tail.N + 1)
            i0 = min(i0, i1)
        vals.append(series.coefficients.abs_sum(i0, i1) if i1 > i0 else 0.0)
    return _summarize(grid, vals, vals)
