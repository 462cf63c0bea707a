"""Inhomogeneous simultaneous approximation: find tau with

    || (-beta_l tau - y_l) / (2 pi Q) || < delta_l   for every l,

where ||.|| is the distance to the nearest integer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np

from .exponents import exact_mpf, mag_bits, mpf_text, working_precision

DEFAULT_BUDGET = 10**7


def _mp(x, bits):
    with mpmath.workprec(bits):
        return mpmath.mpf(x) if not isinstance(x, str) else mpmath.mpf(x)


@dataclass(frozen=True)
class KroneckerProblem:
    frequencies: tuple
    targets: tuple
    Q: int = 1
    delta: float = 1e-3
    tolerances: tuple | None = None  # per-coordinate delta_l, default delta everywhere
    precision: int = 128

    def __post_init__(self):
        if len(self.frequencies) < 1:
            raise ValueError("need at least one frequency")
        if len(self.targets) != len(self.frequencies):
            raise ValueError("targets and frequencies differ in length")
        if not 0 < self.delta < 0.5:
            raise ValueError("delta must lie in (0, 1/2)")
        if any(mpmath.mpf(b) == 0 for b in self.frequencies):
            raise ValueError("frequencies must be nonzero")
        if int(self.Q) < 1:
            raise ValueError("Q must be a positive integer")
        if self.tolerances is not None:
            if len(self.tolerances) != len(self.frequencies):
                raise ValueError("one tolerance per coordinate")
            if not all(0 < t <= 0.5 for t in self.tolerances):
                raise ValueError("tolerances must lie in (0, 1/2]")

    @classmethod
    def build(cls, frequencies, targets, Q=1, delta=1e-3, tolerances=None, precision=None):
        bits = working_precision(precision)
        f = tuple(_mp(b, bits) for b in frequencies)
        y = tuple(_mp(t, bits) for t in targets)
        tol = None if tolerances is None else tuple(float(t) for t in tolerances)
        return cls(f, y, int(Q), float(delta), tol, bits)

    @property
    def L(self) -> int:
        return len(self.frequencies)

    @property
    def tol(self) -> np.ndarray:
        if self.tolerances is None:
            return np.full(self.L, self.delta)
        return np.asarray(self.tolerances, dtype=float)

    def offsets(self, tau, precision: int | None = None) -> np.ndarray:
        """Signed x_l - nint(x_l) for x_l = (-beta_l tau - y_l)/(2 pi Q), in mpmath."""
        bits = working_precision(precision) if precision else self.precision
        tau = exact_mpf(tau)
        bits += mag_bits(tau) + 8
        out = np.empty(self.L)
        with mpmath.workprec(bits):
            two_pi_q = 2 * mpmath.pi * self.Q
            for l, (b, y) in enumerate(zip(self.frequencies, self.targets)):
                x = (-mpmath.mpf(b) * tau - mpmath.mpf(y)) / two_pi_q
                out[l] = float(x - mpmath.nint(x))
        return out

    def distances(self, tau, precision: int | None = None) -> np.ndarray:
        """Per-coordinate ||(-beta_l tau - y_l)/(2 pi Q)||."""
        return np.abs(self.offsets(tau, precision))

    def satisfied(self, d: np.ndarray) -> bool:
        return bool(np.all(d < self.tol))

    def to_json(self) -> dict:
        return {
            "frequencies": [mpmath.nstr(b, 30) for b in self.frequencies],
            "targets": [mpmath.nstr(y, 30) for y in self.targets],
            "Q": self.Q,
            "delta": self.delta,
            "tolerances": None if self.tolerances is None else list(self.tolerances),
        }


@dataclass
class KroneckerSolution:
    status: str  # "Found" | "Exhausted"
    tau: object  # mpf
    distances: np.ndarray
    strategy: str
    search_cost: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == "Found"

    @property
    def max_distance(self) -> float:
        return float(np.max(self.distances)) if len(self.distances) else 0.0

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "tau": mpf_text(self.tau),
            "tau_float": float(self.tau),
            "distances": [float(d) for d in self.distances],
            "max_distance": self.max_distance,
            "strategy": self.strategy,
            "search_cost": self.search_cost,
        }


Scorer = Callable[[np.ndarray], float]


def max_norm_score(problem: KroneckerProblem) -> Scorer:
    tol = problem.tol
    return lambda x: float(np.max(np.abs(x) / tol))


class _Tracker:
    """Best tau so far under a score of the signed offsets; a score below 1 qualifies."""

    def __init__(self, problem: KroneckerProblem, strategy: str, budget: int, scorer: Scorer | None = None):
        self.problem = problem
        self.strategy = strategy
        self.budget = budget
        self.scorer = scorer or max_norm_score(problem)
        self.custom = scorer is not None
        self.evals = 0
        self.best_tau = mpmath.mpf(0)
        x = problem.offsets(0)
        self.best_d = np.abs(x)
        self.best_score = self.scorer(x)
        self.extra: dict = {}

    def ok(self, score: float, d: np.ndarray) -> bool:
        return score < 1.0 if self.custom else self.problem.satisfied(d)

    def check(self, tau) -> bool:
        self.evals += 1
        x = self.problem.offsets(tau)
        score = self.scorer(x)
        if score < self.best_score:
            self.best_tau, self.best_d, self.best_score = exact_mpf(tau), np.abs(x), score
        return self.ok(score, np.abs(x))

    def exhausted(self) -> bool:
        return self.evals >= self.budget

    def result(self) -> KroneckerSolution:
        ok = self.ok(self.best_score, self.best_d)
        cost = {"evaluations": self.evals, "score": self.best_score, **self.extra}
        return KroneckerSolution("Found" if ok else "Exhausted", self.best_tau, self.best_d, self.strategy, cost)


# ---------------------------------------------------------------------------
# L = 1


def _solve_exact(problem: KroneckerProblem, tr: _Tracker) -> None:
    """Continuous tau for one frequency: tau = (-y - 2 pi Q k)/beta with least |tau|."""
    with mpmath.workprec(problem.precision + 16):
        b, y = problem.frequencies[0], problem.targets[0]
        two_pi_q = 2 * mpmath.pi * problem.Q
        k = mpmath.nint(-y / two_pi_q)
        tr.check((-y - two_pi_q * k) / b)


def _ostrowski(alpha, gamma, delta: float, max_steps: int = 200) -> int:
    """Integer u with ||u alpha - gamma|| small, by signed greedy expansion on convergents."""
    r = gamma - mpmath.nint(gamma)
    u = 0
    p_prev, q_prev = 1, 0
    p, q = int(mpmath.floor(alpha)), 1
    rest = alpha - mpmath.floor(alpha)
    for _ in range(max_steps):
        if abs(r) < delta / 4:
            break
        theta = q * alpha - p
        if theta != 0:
            m = int(mpmath.nint(r / theta))
            u += m * q
            r -= m * theta
        if rest == 0:
            break
        inv = 1 / rest
        a = int(mpmath.floor(inv))
        rest = inv - a
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
    return u


def _solve_cf(problem: KroneckerProblem, tr: _Tracker, step: float = 1.0) -> None:
    """tau restricted to step * Z, found through the continued fraction of beta*step/(2 pi Q)."""
    bits = problem.precision + 64
    with mpmath.workprec(bits):
        two_pi_q = 2 * mpmath.pi * problem.Q
        b, y = problem.frequencies[0], problem.targets[0]
        h = mpmath.mpf(step)
        alpha = -b * h / two_pi_q
        gamma = y / two_pi_q
        u = _ostrowski(alpha, gamma, float(problem.tol[0]))
        tr.extra["step"] = step
        for du in (0, 1, -1):
            if tr.check((u + du) * h):
                return


# ---------------------------------------------------------------------------
# grid scan


def _solve_scan(problem: KroneckerProblem, tr: _Tracker, max_windows: int | None = None) -> None:
    """Walk the solution windows of the most restrictive coordinate in order of |tau|."""
    L = problem.L
    tol = problem.tol
    beta = np.array([float(b) for b in problem.frequencies])
    y = np.array([float(v) for v in problem.targets])
    two_pi_q = 2 * math.pi * problem.Q
    piv = int(np.argmin(tol / 1.0))
    step = float(np.min(tol * two_pi_q / np.abs(beta))) / 4
    half = tol[piv] * two_pi_q / abs(beta[piv])
    offs = np.arange(-math.floor(half / step), math.floor(half / step) + 1) * step
    tr.extra.update({"pivot": piv, "grid_step": step, "window_points": len(offs)})
    k0 = -y[piv] / two_pi_q
    # centers tau_k = (-y_p - 2 pi Q k)/beta_p, ordered by |tau_k|
    base = int(round(k0))
    j = 0
    windows = 0
    while not tr.exhausted():
        for k in ((base,) if j == 0 else (base + j, base - j)):
            center = (-y[piv] - two_pi_q * k) / beta[piv]
            taus = center + offs
            if np.max(np.abs(taus)) * np.max(np.abs(beta)) > 1e12:
                tr.extra["stopped"] = "float range"
                return
            x = (-np.outer(taus, beta) - y) / two_pi_q
            d = np.abs(x - np.rint(x))
            tr.evals += len(taus)
            ok = np.all(d < tol * (1 - 1e-9), axis=1)
            if ok.any():
                cand = taus[ok]
                # least |tau| inside the window, then confirm in mpmath
                for t in cand[np.argsort(np.abs(cand))][:8]:
                    if tr.check(mpmath.mpf(float(t))):
                        return
            else:
                i = int(np.argmin(np.max(d / tol, axis=1)))
                tr.check(mpmath.mpf(float(taus[i])))
            windows += 1
            if max_windows is not None and windows >= max_windows:
                return
        j += 1


# ---------------------------------------------------------------------------
# lattice


def _refine_real(problem: KroneckerProblem, tau0, h: float, scorer: Scorer):
    """Shift tau0 within [-h/2, h/2] to lower the score (ternary search)."""
    tau0 = exact_mpf(tau0)
    bits = problem.precision + mag_bits(tau0) + 16
    with mpmath.workprec(bits):
        two_pi_q = 2 * mpmath.pi * problem.Q
        x0 = []
        for b, y in zip(problem.frequencies, problem.targets):
            x = (-b * tau0 - y) / two_pi_q
            x0.append(float(x - mpmath.nint(x)))
    x0 = np.array(x0)
    slope = np.array([float(b) for b in problem.frequencies]) / (2 * math.pi * problem.Q)

    def worst(e):
        x = x0 - slope * e
        return scorer(x - np.rint(x))

    a, b = -h / 2, h / 2
    for _ in range(80):
        m1, m2 = a + (b - a) / 3, b - (b - a) / 3
        if worst(m1) <= worst(m2):
            b = m2
        else:
            a = m1
    e = (a + b) / 2
    with mpmath.workprec(bits):
        return tau0 + e if worst(e) < worst(0.0) else tau0


def _solve_lattice(
    problem: KroneckerProblem, tr: _Tracker, step: float = 1.0, max_rounds: int = 6, round_bits: int | None = None
) -> None:
    """Weighted CVP: rows scaled by 1/delta_l, integer tau-coordinate u with tau = u*step.

    Each round that misses lengthens the search range for tau by round_bits bits.
    """
    from fpylll import BKZ, LLL, IntegerMatrix
    from fpylll.fplll.bkz_param import BKZParam

    L = problem.L
    tol = problem.tol
    w = 1.0 / tol
    # expected |u| for a hit: product of the per-coordinate densities
    need_bits = sum(math.log2(max(wl / 2.0, 1.0)) for wl in w)
    extra = 4
    round_bits = round_bits or max(2, L // 3)
    tr.extra.update({"dimension": L + 1, "rounds": 0})
    for rnd in range(max_rounds):
        t_bits = int(math.ceil(need_bits)) + extra + round_bits * rnd
        if t_bits + 32 > problem.precision:
            # frequencies are not known well enough to place tau ~ 2^t_bits
            tr.extra["stopped"] = f"precision {problem.precision} bits too low for tau ~ 2^{t_bits}"
            return
        scale_bits = t_bits + 40 + int(math.ceil(math.log2(max(w.max(), 1.0))))
        bits = scale_bits + t_bits + 64
        with mpmath.workprec(bits):
            S = mpmath.mpf(2) ** scale_bits
            two_pi_q = 2 * mpmath.pi * problem.Q
            h = mpmath.mpf(step)
            c = 2 ** max(scale_bits - t_bits, 0)
            rows = []
            first = [int(mpmath.nint(S * w[l] * (-problem.frequencies[l] * h / two_pi_q))) for l in range(L)]
            rows.append(first + [c])
            for l in range(L):
                r = [0] * (L + 1)
                r[l] = int(mpmath.nint(S * w[l]))
                rows.append(r)
            target = [int(mpmath.nint(S * w[l] * problem.targets[l] / two_pi_q)) for l in range(L)] + [0]
        A = IntegerMatrix.from_matrix(rows)
        LLL.reduction(A)
        tr.extra["rounds"] = rnd + 1
        tried = set()
        for attempt in ("lll", "bkz"):
            if attempt == "bkz":
                if L + 1 < 4:
                    break
                param = BKZParam(block_size=min(20, L + 1), max_loops=8)
                if scale_bits > 200:
                    BKZ.reduction(A, param, float_type="mpfr", precision=scale_bits + 64)
                else:
                    BKZ.reduction(A, param)
            B = [list(A[i]) for i in range(A.nrows)]
            v = _babai(B, target, scale_bits + 64)
            cands = [v]
            # neighbours along the shortest reduced vectors
            for i in range(min(L + 1, 6)):
                cands.append([a + b for a, b in zip(v, B[i])])
                cands.append([a - b for a, b in zip(v, B[i])])
            for vec in cands:
                u = vec[L] // c
                if u in tried:
                    continue
                tried.add(u)
                with mpmath.workprec(bits):
                    tau = mpmath.mpf(u) * h
                if tr.check(tau):
                    return
                tau2 = _refine_real(problem, tau, step, tr.scorer)
                if tau2 != tau and tr.check(tau2):
                    return
                if tr.exhausted():
                    return


def _babai(B: list[list[int]], target: list[int], bits: int) -> list[int]:
    """Nearest-plane lattice vector close to ``target`` (Gram-Schmidt in mpmath)."""
    n = len(B)
    with mpmath.workprec(bits + 2 * n):
        rows = [[mpmath.mpf(x) for x in r] for r in B]
        star, norms = [], []
        for i in range(n):
            v = rows[i][:]
            for j in range(i):
                mu = mpmath.fdot(rows[i], star[j]) / norms[j]
                v = [a - mu * b for a, b in zip(v, star[j])]
            star.append(v)
            norms.append(mpmath.fdot(v, v))
        t = [mpmath.mpf(x) for x in target]
        out = [0] * len(target)
        for i in reversed(range(n)):
            k = int(mpmath.nint(mpmath.fdot(t, star[i]) / norms[i]))
            if k:
                t = [a - k * b for a, b in zip(t, rows[i])]
                out = [a + k * b for a, b in zip(out, B[i])]
    return out


def lattice_precision(tolerances, L: int, max_rounds: int = 6, base: int = 128) -> int:
    """Bits the frequencies need so the lattice strategy can run ``max_rounds`` rounds."""
    need = sum(math.log2(max(1.0 / (2.0 * t), 1.0)) for t in tolerances)
    return base + int(math.ceil(need)) + 4 + max(2, L // 3) * max_rounds + 32


# ---------------------------------------------------------------------------


STRATEGIES = ("auto", "exact", "cf", "lattice", "scan")


def solve(
    problem: KroneckerProblem,
    strategy: str = "auto",
    budget: int = DEFAULT_BUDGET,
    *,
    step: float = 1.0,
    scorer: Scorer | None = None,
    max_rounds: int = 6,
) -> KroneckerSolution:
    """Find tau meeting every coordinate tolerance; Exhausted carries the best tau seen.

    ``scorer`` replaces the per-coordinate test by any score of the signed
    offsets (qualifying below 1); tolerances then only shape the lattice.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    tr = _Tracker(problem, strategy, budget, scorer)
    if tr.ok(tr.best_score, tr.best_d):
        tr.extra["note"] = "tau = 0 already qualifies"
        return tr.result()
    if strategy in ("exact", "cf") and problem.L != 1:
        raise ValueError(f"strategy {strategy!r} needs a single frequency")
    if strategy == "exact":
        _solve_exact(problem, tr)
    elif strategy == "cf":
        _solve_cf(problem, tr, step)
    elif strategy == "scan":
        _solve_scan(problem, tr)
    elif strategy == "lattice":
        _solve_lattice(problem, tr, step, max_rounds)
    else:
        if problem.L == 1 and scorer is None:
            _solve_exact(problem, tr)
            tr.strategy = "auto:exact"
        else:
            if problem.L <= 6:
                tr.budget = min(budget, 200_000)
                _solve_scan(problem, tr, max_windows=20_000)
                tr.strategy = "auto:scan"
            if not tr.ok(tr.best_score, tr.best_d):
                tr.budget = budget
                tr.strategy = "auto:lattice"
                _solve_lattice(problem, tr, step, max_rounds)
    return tr.result()


# ---------------------------------------------------------------------------


@dataclass
class DensityResult:
    estimate: float
    stderr: float
    samples: int
    T: float
    seed: int
    taus: np.ndarray | None = None
    qualified: np.ndarray | None = None

    def __float__(self):
        return self.estimate

    def csv_rows(self):
        if self.taus is None:
            return []
        return [{"tau": float(t), "qualified": int(q)} for t, q in zip(self.taus, self.qualified)]


def density_estimate(problem: KroneckerProblem, T: float, samples: int = 100_000, seed: int = 0, keep: bool = False) -> DensityResult:
    """Monte Carlo share of tau in [-T, T] meeting every tolerance."""
    if samples < 1000:
        raise ValueError("use at least 1000 samples")
    rng = np.random.default_rng(seed)
    taus = rng.uniform(-T, T, samples)
    beta = np.array([float(b) for b in problem.frequencies])
    y = np.array([float(v) for v in problem.targets])
    two_pi_q = 2 * math.pi * problem.Q
    ok = np.ones(samples, dtype=bool)
    tol = problem.tol
    for l in range(problem.L):
        x = (-beta[l] * taus - y[l]) / two_pi_q
        ok &= np.abs(x - np.rint(x)) < tol[l]
    p = float(ok.mean())
    return DensityResult(
        p, math.sqrt(max(p * (1 - p), 0.0) / samples), samples, float(T), seed,
        taus if keep else None, ok if keep else None,
    )
