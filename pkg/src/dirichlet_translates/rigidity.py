"""Translates F_j(s + i tau) approximating targets f_j on compact sets.

Error accounting for one tau, per series j, on a set K with left edge
sigma_min:

    |F(s+i tau) - f(s)| <= |D_M(s)| + tail_F(M) + tail_f(M),

where D_M is the difference of the M-term partial sums. D_M is analytic, so
its maximum over K sits on the boundary, and a Lipschitz bound turns a
sampled boundary maximum into a bound for the true one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .equivalence import (
    Incompatible,
    TwistVector,
    detect_vector_twist,
)
from .exponents import (
    DEFAULT_DENOMINATOR_CAP,
    OrdinaryExponents,
    SymbolicExponents,
    common_denominator,
    exact_mpf,
    mag_bits,
    mpf_text,
    same_exponents,
    working_precision,
)
from .kronecker import DEFAULT_BUDGET, KroneckerProblem, KroneckerSolution, lattice_precision, solve
from .series import (
    TWO_PI,
    DirichletSeries,
    FiniteSupport,
    _phases,
    minimal_truncation,
    partial_sums,
    tail_bound,
)

PI_UP = Fraction(355, 113)  # > pi


class BudgetError(ValueError):
    pass


class NotEquivalent(ValueError):
    def __init__(self, incompatible: Incompatible):
        super().__init__(incompatible.reason)
        self.incompatible = incompatible


class SearchExhausted(RuntimeError):
    def __init__(self, solution: KroneckerSolution, budget: "ErrorBudget"):
        super().__init__(f"no translate found within budget (best max distance {solution.max_distance:.3e})")
        self.solution = solution
        self.budget = budget


def _add(a, b) -> mpmath.mpf:
    """a + b without rounding away the fractional part of large values."""
    a, b = exact_mpf(a), exact_mpf(b)
    with mpmath.workprec(max(mag_bits(a), mag_bits(b)) + working_precision() + 64):
        return a + b


# ---------------------------------------------------------------------------
# compact sets


@dataclass(frozen=True)
class Rectangle:
    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float
    shift: object = 0  # extra vertical offset (mpf allowed), applied on top of t

    def __post_init__(self):
        if not (self.sigma_max > self.sigma_min and self.t_max > self.t_min):
            raise ValueError("rectangle needs nonempty interior")

    @property
    def left(self) -> float:
        return self.sigma_min

    @property
    def right(self) -> float:
        return self.sigma_max

    def boundary(self, spacing: float) -> np.ndarray:
        w, h = self.sigma_max - self.sigma_min, self.t_max - self.t_min
        nw = max(2, int(math.ceil(w / spacing)))
        nh = max(2, int(math.ceil(h / spacing)))
        a = complex(self.sigma_min, self.t_min)
        pts = [
            a + np.linspace(0, w, nw, endpoint=False),
            a + w + 1j * np.linspace(0, h, nh, endpoint=False),
            a + w + 1j * h - np.linspace(0, w, nw, endpoint=False),
            a + 1j * h - 1j * np.linspace(0, h, nh, endpoint=False),
        ]
        return np.concatenate(pts)

    def boundary_gap(self, spacing: float) -> float:
        w, h = self.sigma_max - self.sigma_min, self.t_max - self.t_min
        return max(w / max(2, math.ceil(w / spacing)), h / max(2, math.ceil(h / spacing)))

    def perimeter(self) -> float:
        return 2 * (self.sigma_max - self.sigma_min + self.t_max - self.t_min)

    def interior(self, n: int = 12) -> np.ndarray:
        s = np.linspace(self.sigma_min, self.sigma_max, n)
        t = np.linspace(self.t_min, self.t_max, n)
        return (s[None, :] + 1j * t[:, None]).ravel()

    def shifted(self, tau) -> "Rectangle":
        return Rectangle(self.sigma_min, self.sigma_max, self.t_min, self.t_max, _add(self.shift, tau))

    def to_json(self) -> dict:
        return {
            "kind": "rectangle",
            "sigma_min": self.sigma_min,
            "sigma_max": self.sigma_max,
            "t_min": self.t_min,
            "t_max": self.t_max,
            "shift": float(self.shift),
        }


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float
    shift: object = 0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def left(self) -> float:
        return complex(self.center).real - self.radius

    @property
    def right(self) -> float:
        return complex(self.center).real + self.radius

    @property
    def sigma_min(self) -> float:
        return self.left

    def boundary(self, spacing: float) -> np.ndarray:
        n = max(16, int(math.ceil(TWO_PI * self.radius / spacing)))
        return complex(self.center) + self.radius * np.exp(1j * np.linspace(0, TWO_PI, n, endpoint=False))

    def boundary_gap(self, spacing: float) -> float:
        n = max(16, int(math.ceil(TWO_PI * self.radius / spacing)))
        return TWO_PI * self.radius / n

    def perimeter(self) -> float:
        return TWO_PI * self.radius

    def interior(self, n: int = 12) -> np.ndarray:
        r = np.linspace(0, self.radius, n // 2 + 1)[1:-1]
        th = np.linspace(0, TWO_PI, n, endpoint=False)
        return np.concatenate([[complex(self.center)], (complex(self.center) + np.outer(r, np.exp(1j * th))).ravel()])

    def shifted(self, tau) -> "Disk":
        return Disk(self.center, self.radius, _add(self.shift, tau))

    def to_json(self) -> dict:
        c = complex(self.center)
        return {"kind": "disk", "center": [c.real, c.imag], "radius": self.radius, "shift": float(self.shift)}


CompactSet = Rectangle | Disk


def _check_set(F: DirichletSeries, K: CompactSet) -> None:
    if not K.left > F.threshold:
        raise ValueError(f"compact set reaches sigma={K.left}, not above the threshold {F.threshold} of {F.label or 'series'}")


def align_exponents(series_list: Sequence[DirichletSeries]) -> list[DirichletSeries]:
    """Bring series onto one exponent prefix (ordinary specs: the shortest common n_max)."""
    spec0 = series_list[0].exponents
    if all(same_exponents(F.exponents, spec0) for F in series_list):
        return list(series_list)
    if all(isinstance(F.exponents, OrdinaryExponents) for F in series_list):
        n = min(F.exponents.size for F in series_list)
        common = OrdinaryExponents(n)
        return [DirichletSeries(common, F.coefficients, F.tail, F.label) for F in series_list]
    raise ValueError("series use different non-ordinary exponent specs; give them a common spec")


# ---------------------------------------------------------------------------
# error budget


@dataclass
class ErrorBudget:
    epsilon: float
    M: int
    C: Fraction
    H: float
    Q: int
    delta: float
    active_coords: list[int]
    tolerances: dict  # l -> per-coordinate Kronecker tolerance d_l = delta / W_l
    W: dict  # l -> weight W_l
    sigma_min: list[float]
    tails: list[float]  # tail bound per j at sigma_min (same for F_j and its twist)
    head_bounds: list[float]
    head_budget: float
    reserve: float
    tail_quarter_rule: bool
    chain: list[dict]
    term_weights: list[np.ndarray] = field(repr=False, default_factory=list)
    m_rows: list[dict] = field(repr=False, default_factory=list)
    m_dense: np.ndarray | None = field(repr=False, default=None)

    @property
    def coords(self) -> list[int]:
        """Basis coordinates that appear in some row n <= M."""
        return sorted(self.W)

    def head_at(self, offsets: np.ndarray) -> list[float]:
        """Head bounds per j for actual signed offsets x_l (indexed like ``coords``).

        |exp(-i lambda_n tau) - exp(i (RY)_n)| <= min(2, 2 pi |sum_l m_nl x_l|).
        """
        x = np.zeros(self.m_dense.shape[1])
        x[self.coords] = offsets
        per_term = np.minimum(2.0, TWO_PI * np.abs(self.m_dense @ x) * (1 + 1e-12) + 1e-15)
        return [float(w @ per_term) for w in self.term_weights]

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "M": self.M,
            "C": str(self.C),
            "H": self.H,
            "Q": self.Q,
            "delta": self.delta,
            "active_coords": self.active_coords,
            "tolerances": {str(k): v for k, v in self.tolerances.items()},
            "sigma_min": self.sigma_min,
            "tails": self.tails,
            "head_bounds": self.head_bounds,
            "head_budget": self.head_budget,
            "reserve": self.reserve,
            "tail_quarter_rule": self.tail_quarter_rule,
            "chain": self.chain,
        }


def _m_matrix(spec: SymbolicExponents, M: int, Q: int) -> tuple[list[dict], int]:
    rows = []
    width = 0
    for n in range(1, M + 1):
        r = {l: int(v * Q) for l, v in spec.matrix.row(n).items()}
        rows.append(r)
        if r:
            width = max(width, max(r) + 1)
    return rows, width


def _head_bound(weights: np.ndarray, absm: np.ndarray, d: np.ndarray) -> float:
    per_term = np.minimum(2.0, TWO_PI * (absm @ d))
    return float(weights @ per_term)


def error_budget(
    F_list: Sequence[DirichletSeries],
    K_list: Sequence[CompactSet],
    epsilon: float,
    *,
    reserve: float = 0.02,
    M: int | None = None,
    cap: int = DEFAULT_DENOMINATOR_CAP,
) -> ErrorBudget:
    """Truncation M, constants C, H, Q and the Kronecker tolerance delta.

    Per series j and term n, if every coordinate distance ||x_l|| < d_l then
    |exp(-i lambda_n tau) - exp(i (RY)_n)| <= min(2, 2 pi sum_l |m_nl| d_l).
    Coordinates get d_l = min(1/2, delta / W_l) with
    W_l = max_j 2 pi sum_n |a_j(n)| e^{-lambda_n sigma_j} |m_nl|, and delta is
    the largest value keeping every head bound within
    epsilon (1 - reserve) - 2 tail_j.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    F_list = align_exponents(F_list)
    if len(K_list) != len(F_list):
        raise ValueError("one compact set per series")
    for F, K in zip(F_list, K_list):
        _check_set(F, K)
    spec = F_list[0].exponents
    if not isinstance(spec, SymbolicExponents):
        raise BudgetError("translate search needs a basis (symbolic or ordinary exponents)")
    size = min(F.size for F in F_list)
    sig = [K.left for K in K_list]

    quarter = True
    if M is None:
        Ms = []
        for F, s in zip(F_list, sig):
            try:
                Ms.append(minimal_truncation(F, s, epsilon / 4 * (1 - 1e-9))[0])
            except ValueError:
                Ms.append(size)
                quarter = False
        M = min(max(Ms), size)
    tails = [tail_bound(F, M, s) for F, s in zip(F_list, sig)]
    quarter = quarter and all(t < epsilon / 4 for t in tails)
    head_budget = epsilon * (1 - reserve) - 2 * max(tails)
    if head_budget <= 0:
        raise BudgetError(
            f"tail majorant too weak: 2*tail = {2 * max(tails):.4g} leaves nothing of epsilon={epsilon} at M={M}"
        )

    Q = common_denominator(spec.matrix, M, cap)
    m_rows, width = _m_matrix(spec, M, Q)
    C = max((sum((abs(v) for v in spec.matrix.row(n).values()), Fraction(0)) for n in range(1, M + 1)), default=Fraction(0))
    lam = spec.values(M)
    weights = []
    for F, s in zip(F_list, sig):
        wj = F.coefficients.modulus(1, M + 1) * np.exp(-lam * s)
        weights.append(wj * (1 + 1e-12))
    H = max(float(w.sum()) for w in weights)

    mden = np.zeros((M, max(width, 1)))
    for n, r in enumerate(m_rows):
        for l, v in r.items():
            mden[n, l] = v
    absm = np.abs(mden)
    W = np.max([TWO_PI * (w @ absm) for w in weights], axis=0)
    used = np.flatnonzero(W > 0)

    def d_of(delta):
        d = np.full(absm.shape[1], 0.5)
        d[used] = np.minimum(0.5, delta / W[used])
        return d

    def worst(delta):
        d = d_of(delta)
        return max(_head_bound(w, absm, d) for w in weights)

    if worst(0.0) > head_budget:
        raise BudgetError("no delta works: head budget is negative")
    lo, hi = 0.0, float(W.max()) if len(used) else 1.0
    if worst(hi) <= head_budget:
        lo = hi
    else:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if worst(mid) <= head_budget:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * hi:
                break
    delta = lo
    d = d_of(delta)
    active = [int(l) for l in used if d[l] < 0.5]
    heads = [_head_bound(w, absm, d) for w in weights]
    chain = [
        {
            "step": "kronecker",
            "statement": "W_l * ||x_l|| < delta for every active l, where x_l = (-beta_l tau - y_l)/(2 pi Q)",
            "delta": delta,
        },
        {
            "step": "phase",
            "statement": "|exp(-i lambda_n tau) - exp(i (RY)_n)| <= min(2, 2 pi sum_l |m_nl| d_l), d_l = min(1/2, delta/W_l)",
        },
    ]
    for j, (hb, t) in enumerate(zip(heads, tails)):
        chain.append({"step": "head", "j": j, "lhs": hb, "rhs": head_budget, "holds": hb <= head_budget})
        total = hb + 2 * t
        chain.append(
            {
                "step": "total",
                "j": j,
                "lhs": total,
                "rhs": epsilon * (1 - reserve),
                "holds": total <= epsilon * (1 - reserve),
                "detail": "head + tail_F + tail_f, leaving epsilon*reserve for sampling slack",
            }
        )
    return ErrorBudget(
        epsilon, M, C, H, Q, delta, active,
        {l: float(d[l]) for l in active}, {int(l): float(W[l]) for l in used},
        sig, tails, heads, head_budget, reserve, quarter, chain, weights, m_rows, mden,
    )


def audit_budget(b: ErrorBudget) -> bool:
    """Re-evaluate the recorded chain with exact rationals (pi bounded above by 355/113)."""
    eps = Fraction(b.epsilon)
    room = eps * (1 - Fraction(b.reserve))
    if not room < eps:
        return False
    d = {l: Fraction(v) for l, v in b.tolerances.items()}
    delta = Fraction(b.delta)
    for l, W in b.W.items():
        if l in d:
            if not Fraction(W) * d[l] <= delta * (1 + Fraction(1, 10**9)):
                return False
    for j, w in enumerate(b.term_weights):
        head = Fraction(0)
        for n, r in enumerate(b.m_rows):
            s = sum((abs(v) * d.get(l, Fraction(1, 2)) for l, v in r.items()), Fraction(0))
            head += Fraction(float(w[n])) * min(Fraction(2), 2 * PI_UP * s)
        # the float head bound used pi itself; allow the 355/113 excess
        if not head + 2 * Fraction(b.tails[j]) <= room * (1 + Fraction(1, 10**6)):
            return False
        if not Fraction(b.head_bounds[j]) + 2 * Fraction(b.tails[j]) <= room:
            return False
    return True


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerifyReport:
    sup_error: list[float]  # sampled max of |D_M| per j
    tail_F: list[float]
    tail_f: list[float]
    lipschitz: list[float]
    n_samples: list[int]
    spacing: list[float]
    precision: int
    M: int

    @property
    def slack(self) -> list[float]:
        return [a + b + c for a, b, c in zip(self.tail_F, self.tail_f, self.lipschitz)]

    @property
    def bound(self) -> list[float]:
        return [e + s for e, s in zip(self.sup_error, self.slack)]

    def to_json(self) -> dict:
        return {
            "sup_error": self.sup_error,
            "tail_F": self.tail_F,
            "tail_f": self.tail_f,
            "lipschitz_slack": self.lipschitz,
            "bound": self.bound,
            "n_samples": self.n_samples,
            "spacing": self.spacing,
            "precision": self.precision,
            "M": self.M,
        }


def _shifted_coeffs(series: DirichletSeries, M: int, shift, precision: int) -> np.ndarray:
    mod, ph = series.coefficients.polar(1, M + 1)
    if shift != 0:
        ph = ph + _phases(series.exponents, M, shift, precision)
    return mod * np.exp(1j * ph)


def difference_coefficients(F: DirichletSeries, f: DirichletSeries, M: int, tau, shift=0, precision: int | None = None) -> np.ndarray:
    """Coefficients of F_M(s + i(shift + tau)) - f_M(s + i shift)."""
    bits = working_precision(precision)
    return _shifted_coeffs(F, M, _add(shift, tau), bits) - _shifted_coeffs(f, M, exact_mpf(shift), bits)


def _lipschitz(lam: np.ndarray, c: np.ndarray, K: CompactSet) -> float:
    """sup over K of |D'(s)| <= sum |lambda_n c_n| e^{-lambda_n sigma} at the worse edge."""
    e = np.maximum(np.exp(-lam * K.left), np.exp(-lam * K.right))
    return float(np.sum(np.abs(lam) * np.abs(c) * e))


def verify_translate(
    F_list: Sequence[DirichletSeries],
    f_list: Sequence[DirichletSeries],
    K_list: Sequence[CompactSet],
    tau,
    *,
    M: int | None = None,
    slack_target: float | None = None,
    density: float = 1.0,
    precision: int | None = None,
    max_samples: int = 40_000,
) -> VerifyReport:
    """Sampled sup of |F_j(s + i tau) - f_j(s)| over each K_j plus rigorous slack."""
    bits = working_precision(precision)
    F_list = align_exponents(list(F_list) + list(f_list))
    n = len(F_list) // 2
    F_list, f_list = F_list[:n], F_list[n:]
    sup, tF, tf, lip, ns, sp = [], [], [], [], [], []
    Muse = M if M is not None else min(min(F.size, f.size) for F, f in zip(F_list, f_list))
    for F, f, K in zip(F_list, f_list, K_list):
        _check_set(F, K)
        lam = F.lambdas(Muse)
        c = difference_coefficients(F, f, Muse, tau, K.shift, bits)
        L = _lipschitz(lam, c, K)
        target = slack_target if slack_target is not None else 1e-3
        spacing = K.perimeter() / 64
        if L > 0:
            spacing = min(spacing, 2 * target / L)
        spacing = max(spacing / density, K.perimeter() / max_samples)
        pts = np.concatenate([K.boundary(spacing), K.interior()])
        vals = np.abs(partial_sums(lam, c, pts))
        gap = K.boundary_gap(spacing)
        sup.append(float(vals.max()))
        lip.append(L * gap / 2 * (1 + 1e-9))
        tF.append(tail_bound(F, Muse, K.left))
        tf.append(tail_bound(f, Muse, K.left))
        ns.append(len(pts))
        sp.append(gap)
    return VerifyReport(sup, tF, tf, lip, ns, sp, bits, Muse)


# ---------------------------------------------------------------------------
# find


@dataclass
class TranslateCertificate:
    tau: object
    sup_error_per_j: list[float]
    budget: ErrorBudget
    tail_used: list[float]
    status: str  # "Verified" | "Failed"
    report: VerifyReport
    kronecker: KroneckerSolution | None = None
    twist: TwistVector | None = None
    sampling: dict = field(default_factory=dict)
    achieved_head: list[float] = field(default_factory=list)  # head bound at the actual offsets

    @property
    def verified(self) -> bool:
        return self.status == "Verified"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "tau": mpf_text(self.tau),
            "tau_float": float(self.tau),
            "sup_error_per_j": self.sup_error_per_j,
            "bound_per_j": self.report.bound,
            "tail_used": self.tail_used,
            "budget": self.budget.to_json(),
            "verification": self.report.to_json(),
            "kronecker": None if self.kronecker is None else self.kronecker.to_json(),
            "sampling": self.sampling,
            "achieved_head": self.achieved_head,
        }


def _resolve_twist(F_list, f_list, M, Y, cap) -> TwistVector:
    if Y is not None:
        return Y
    det = detect_vector_twist(F_list, f_list, M, cap=cap)
    if isinstance(det, Incompatible):
        raise NotEquivalent(det)
    return det.Y


def find_translate(
    F_list: Sequence[DirichletSeries],
    f_list: Sequence[DirichletSeries],
    K_list: Sequence[CompactSet],
    epsilon: float,
    budget: int = DEFAULT_BUDGET,
    *,
    Y: TwistVector | None = None,
    strategy: str = "auto",
    reserve: float = 0.02,
    cap: int = DEFAULT_DENOMINATOR_CAP,
    precision: int | None = None,
    max_rounds: int = 12,
) -> TranslateCertificate:
    """tau with max_j sup_{K_j} |F_j(s + i tau) - f_j(s)| < epsilon, certified."""
    F_list = align_exponents(F_list)
    f_list = align_exponents(list(F_list[:1]) + list(f_list))[1:]
    eb = error_budget(F_list, K_list, epsilon, reserve=reserve, cap=cap)
    Yv = _resolve_twist(F_list, f_list, eb.M, Y, cap)
    spec = F_list[0].exponents
    bits = working_precision(precision)
    coords = eb.coords
    achieved = [0.0] * len(F_list)
    sol = None
    tau = mpmath.mpf(0)
    if coords:
        tols = [eb.tolerances.get(l, 0.5) for l in coords]
        pbits = max(bits + 64, lattice_precision(tols, len(tols), max_rounds, bits))
        betas = [spec.basis[l].value(pbits) for l in coords]
        with mpmath.workprec(pbits):
            ys = [+Yv.raw.get(l, mpmath.mpf(0)) for l in coords]
        prob = KroneckerProblem.build(betas, ys, eb.Q, min(min(tols), 0.49), tols, pbits)

        def scorer(x):
            return max(eb.head_at(x)) / eb.head_budget

        sol = solve(prob, strategy, budget, scorer=scorer, max_rounds=max_rounds)
        if not sol.found:
            raise SearchExhausted(sol, eb)
        tau = sol.tau
        achieved = eb.head_at(prob.offsets(tau))
    bits = max(bits, int(mpmath.log(abs(tau) + 2, 2)) + 64)
    rep = verify_translate(F_list, f_list, K_list, tau, M=eb.M, slack_target=epsilon / 10, precision=bits)
    ok = all(b < epsilon for b in rep.bound)
    return TranslateCertificate(
        tau, rep.sup_error, eb, [a + b for a, b in zip(rep.tail_F, rep.tail_f)],
        "Verified" if ok else "Failed", rep, sol, Yv,
        {"slack_target": epsilon / 10, "spacing": rep.spacing, "n_samples": rep.n_samples, "precision": bits},
        achieved,
    )


def resample(cert: TranslateCertificate, F_list, f_list, K_list) -> VerifyReport:
    """Independent re-check: doubled density and doubled precision."""
    return verify_translate(
        F_list, f_list, K_list, cert.tau, M=cert.budget.M,
        slack_target=cert.budget.epsilon / 10, density=2.0,
        precision=2 * cert.sampling.get("precision", working_precision()),
    )


# ---------------------------------------------------------------------------
# density and strips


@dataclass
class TranslateDensity:
    estimate: float
    stderr: float
    samples: int
    T: float
    seed: int
    taus: np.ndarray = field(repr=False, default=None)
    errors: np.ndarray = field(repr=False, default=None)

    def csv_rows(self):
        return [{"tau": float(t), "bound": float(e), "qualified": int(q)} for t, e, q in zip(self.taus, self.errors, self.errors < self._eps)]


def density_of_translates(
    F_list: Sequence[DirichletSeries],
    f_list: Sequence[DirichletSeries],
    K_list: Sequence[CompactSet],
    epsilon: float,
    T: float,
    samples: int = 10_000,
    seed: int = 0,
    *,
    M: int | None = None,
    batch: int = 256,
) -> TranslateDensity:
    """Share of tau ~ U[-T, T] for which the verified bound is below epsilon.

    Boundary samples and slack are fixed up front (the Lipschitz bound uses
    |c_n| <= |a_n| + |b_n|, valid for every tau), so each tau costs one
    matrix product.
    """
    F_list = align_exponents(list(F_list) + list(f_list))
    N = len(F_list) // 2
    F_list, f_list = F_list[:N], F_list[N:]
    rng = np.random.default_rng(seed)
    taus = rng.uniform(-T, T, samples)
    worst = np.zeros(samples)
    for F, f, K in zip(F_list, f_list, K_list):
        _check_set(F, K)
        Mj = M or min(F.size, f.size)
        lam = F.lambdas(Mj)
        a = F.coeffs(Mj)
        b = f.coeffs(Mj)
        cbound = np.abs(a) + np.abs(b)
        L = _lipschitz(lam, cbound, K)
        spacing = min(K.perimeter() / 64, 2 * (epsilon / 10) / max(L, 1e-300))
        spacing = max(spacing, K.perimeter() / 4000)
        pts = np.concatenate([K.boundary(spacing), K.interior(8)])
        slack = L * K.boundary_gap(spacing) / 2 + tail_bound(F, Mj, K.left) + tail_bound(f, Mj, K.left)
        E = np.exp(-np.outer(pts, lam))
        shift = float(K.shift)
        for i in range(0, samples, batch):
            tt = taus[i : i + batch]
            C = a[:, None] * np.exp(-1j * np.outer(lam, tt + shift)) - b[:, None] * np.exp(-1j * lam * shift)[:, None]
            sup = np.abs(E @ C).max(axis=0)
            worst[i : i + batch] = np.maximum(worst[i : i + batch], sup + slack)
    ok = worst < epsilon
    p = float(ok.mean())
    out = TranslateDensity(p, math.sqrt(p * (1 - p) / samples), samples, T, seed, taus, worst)
    out._eps = epsilon
    return out


@dataclass
class StripReport:
    rows: list[dict]
    monotone: bool
    violations: list[int]

    def to_json(self) -> dict:
        return {"rows": self.rows, "monotone": self.monotone, "violations": self.violations}


def strip_convergence(
    F_list: Sequence[DirichletSeries],
    f_list: Sequence[DirichletSeries],
    sigma_range: tuple[float, float],
    t_windows: Sequence[tuple[float, float]],
    tau_sequence: Sequence,
    *,
    M: int | None = None,
    slack_target: float = 1e-3,
) -> StripReport:
    """Sup errors of F_j(s + i tau_k) - f_j(s) on expanding windows of a vertical strip."""
    rows = []
    per_k = []
    for k, tau in enumerate(tau_sequence):
        worst = 0.0
        for (t0, t1) in t_windows:
            R = Rectangle(sigma_range[0], sigma_range[1], t0, t1)
            rep = verify_translate(F_list, f_list, [R] * len(F_list), tau, M=M, slack_target=slack_target)
            rows.append(
                {
                    "k": k,
                    "tau": float(tau),
                    "window": [t0, t1],
                    "sup_error": max(rep.sup_error),
                    "bound": max(rep.bound),
                }
            )
            worst = max(worst, max(rep.sup_error))
        per_k.append(worst)
    viol = [k for k in range(1, len(per_k)) if per_k[k] > per_k[k - 1] * (1 + 1e-9) + 1e-15]
    return StripReport(rows, not viol, viol)


def translate_sequence(F_list, f_list, K_list, ks: Sequence[int], budget: int = DEFAULT_BUDGET, **kw) -> list:
    """tau_k from find_translate with epsilon = 1/k."""
    return [find_translate(F_list, f_list, K_list, 1.0 / k, budget, **kw).tau for k in ks]


# ---------------------------------------------------------------------------
# winding numbers and value sets


class ContourError(ValueError):
    pass


@dataclass
class WindingResult:
    winding: int
    min_modulus: float
    accuracy: float
    samples: int
    max_depth: int
    raw: float

    def to_json(self) -> dict:
        return {
            "winding": self.winding,
            "min_modulus": self.min_modulus,
            "accuracy": self.accuracy,
            "samples": self.samples,
            "max_depth": self.max_depth,
        }


def _constant_value(F: DirichletSeries) -> complex | None:
    """Value of F if it is a finitely supported constant (single lambda = 0 term or empty)."""
    if not isinstance(F.tail, FiniteSupport):
        return None
    a = F.coeffs(F.size)
    nz = np.flatnonzero(a)
    if len(nz) == 0:
        return 0j
    if len(nz) == 1 and F.lambdas(F.size)[nz[0]] == 0:
        return complex(a[nz[0]])
    return None


def winding_number(
    F: DirichletSeries,
    center: complex,
    radius: float,
    v: complex,
    samples: int = 256,
    *,
    tau=0,
    M: int | None = None,
    max_depth: int = 20,
) -> WindingResult:
    """Winding of s -> F(s + i tau) - v around the circle |s - center| = radius."""
    D = Disk(complex(center), radius)
    _check_set(F, D)
    M = M or F.size
    const = _constant_value(F)
    if const is not None:
        if const == v:
            raise ContourError("constant series equal to v everywhere")
        return WindingResult(0, abs(const - v), 0.0, 0, 0, 0.0)
    lam = F.lambdas(M)
    c = _shifted_coeffs(F, M, exact_mpf(tau), working_precision())
    acc = tail_bound(F, M, D.left)

    def g(theta: np.ndarray) -> np.ndarray:
        s = complex(center) + radius * np.exp(1j * theta)
        return partial_sums(lam, c, s) - v

    th = np.linspace(0, TWO_PI, samples + 1)
    vals = g(th)
    depth = 0
    while True:
        dphi = np.angle(vals[1:] / vals[:-1])
        bad = np.flatnonzero(np.abs(dphi) >= math.pi / 2)
        if len(bad) == 0:
            break
        depth += 1
        if depth > max_depth:
            raise ContourError("argument jumps persist after 20 refinements; change the radius")
        mids = 0.5 * (th[bad] + th[bad + 1])
        th = np.insert(th, bad + 1, mids)
        vals = np.insert(vals, bad + 1, g(mids))
    mn = float(np.abs(vals).min())
    if not mn > 4 * acc:
        raise ContourError(
            f"|F - v| gets down to {mn:.3e} on the contour, not above 4x the evaluation accuracy {acc:.3e}; change the radius"
        )
    total = float(np.sum(np.angle(vals[1:] / vals[:-1]))) / TWO_PI
    return WindingResult(int(round(total)), mn, acc, len(th), depth, total)


@dataclass
class ProbeReport:
    probe: complex
    status: str  # "Certified" | "Unattained" | "Failed"
    direction: str
    s_attained: complex | None = None
    radius: float | None = None
    eta: float | None = None
    tau: object = None
    sup_error: float | None = None
    winding_target: int | None = None
    winding_translate: int | None = None
    note: str = ""

    def to_json(self) -> dict:
        c = lambda z: None if z is None else [complex(z).real, complex(z).imag]
        return {
            "probe": c(self.probe),
            "status": self.status,
            "direction": self.direction,
            "s_attained": c(self.s_attained),
            "radius": self.radius,
            "eta": self.eta,
            "tau": None if self.tau is None else mpf_text(self.tau),
            "sup_error": self.sup_error,
            "winding_target": self.winding_target,
            "winding_translate": self.winding_translate,
            "note": self.note,
        }


def _solve_value(f: DirichletSeries, V: Rectangle, v: complex, M: int, grid: int = 48):
    """A point s in V with f_M(s) close to v, by grid search and Newton steps."""
    lam = f.lambdas(M)
    c = f.coeffs(M)
    pts = V.interior(grid)
    vals = np.abs(partial_sums(lam, c, pts) - v)
    s = complex(pts[int(np.argmin(vals))])
    for _ in range(60):
        fs = complex(partial_sums(lam, c, np.array([s]))[0]) - v
        dfs = complex(partial_sums(lam, -lam * c, np.array([s]))[0])
        if dfs == 0:
            break
        step = fs / dfs
        s = s - step
        if abs(step) < 1e-15 * max(1.0, abs(s)):
            break
    fs = abs(complex(partial_sums(lam, c, np.array([s]))[0]) - v)
    inside = V.sigma_min < s.real < V.sigma_max and V.t_min < s.imag < V.t_max
    return s, fs, inside


def _one_direction(F, f, V, v, direction, budget, radii, M, strategy) -> ProbeReport:
    M = M or min(F.size, f.size)
    s0, res, inside = _solve_value(f, V, v, M)
    if not inside or res > 1e-9 * max(1.0, abs(v)):
        return ProbeReport(v, "Unattained", direction, note=f"closest residual {res:.3e}")
    room = min(s0.real - V.sigma_min, V.sigma_max - s0.real, s0.imag - V.t_min, V.t_max - s0.imag)
    lam = f.lambdas(M)
    c = f.coeffs(M)
    last = ""
    for r in radii:
        if r >= room:
            continue
        D = Disk(s0, r)
        if not D.left > max(F.threshold, f.threshold):
            continue
        circle = D.boundary(r * 0.02)
        eta = float(np.abs(partial_sums(lam, c, circle) - v).min())
        tails = tail_bound(f, M, D.left)
        # guard the sampled minimum by the Lipschitz bound on the circle
        eta_low = eta - _lipschitz(lam, c, D) * D.boundary_gap(r * 0.02) / 2 - tails
        if eta_low <= 4 * tails:
            last = f"r={r}: eta {eta_low:.3e} too small against tails {tails:.3e}"
            continue
        try:
            wt = winding_number(f, s0, r, v, M=M)
        except ContourError as exc:
            last = str(exc)
            continue
        if wt.winding < 1:
            last = f"r={r}: target winding {wt.winding}"
            continue
        try:
            cert = find_translate([F], [f], [D], eta_low * 0.95, budget, strategy=strategy)
        except (SearchExhausted, ValueError) as exc:
            last = f"r={r}: {exc}"
            continue
        if not cert.verified:
            last = f"r={r}: certificate not verified"
            continue
        try:
            wF = winding_number(F, s0, r, v, tau=cert.tau, M=M)
        except ContourError as exc:
            last = str(exc)
            continue
        status = "Certified" if wF.winding >= 1 else "Failed"
        return ProbeReport(
            v, status, direction, s0, r, eta_low, cert.tau, max(cert.report.bound), wt.winding, wF.winding,
            "root of F(s + i tau) = v inside the disk, so v is attained at s + i tau",
        )
    return ProbeReport(v, "Failed", direction, s0, note=last)


def value_set_check(
    F: DirichletSeries,
    f: DirichletSeries,
    V: Rectangle,
    probes: Sequence[complex],
    tau_budget: int = DEFAULT_BUDGET,
    *,
    symmetric: bool = False,
    radii: Sequence[float] = (0.2, 0.15, 0.1, 0.07, 0.05),
    M: int | None = None,
    strategy: str = "auto",
) -> list[ProbeReport]:
    """For each probe v attained by f in V, certify v in S_F(V) (translate plus winding).

    With ``symmetric`` the swapped direction (v attained by F gives v in S_f)
    runs too.
    """
    out = []
    for v in probes:
        out.append(_one_direction(F, f, V, complex(v), "f->F", tau_budget, radii, M, strategy))
        if symmetric:
            out.append(_one_direction(f, F, V, complex(v), "F->f", tau_budget, radii, M, strategy))
    return out
