"""Bohr equivalence: twists, twist detection and Helly-type limits.

A twist by Y multiplies a(n) by exp(i (RY)_n). For integral matrices the
angles only matter mod 2pi; for rational matrices they do not, so a
TwistVector keeps its raw angles and exposes the reduced ones separately.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .exponents import (
    DEFAULT_DENOMINATOR_CAP,
    DenominatorCapExceeded,
    ExponentSpec,
    OrdinaryExponents,
    SymbolicExponents,
    common_denominator,
    exact_mpf,
    integrality,
    mag_bits,
    mpf_text,
    p_adic_valuation,
    same_exponents,
    working_precision,
)
from .series import (
    TWO_PI,
    Coefficients,
    ConstantCoefficients,
    DirichletSeries,
    EulerCoefficients,
    _wrap,
)

DEFAULT_TOLERANCE = 1e-9


class TwistError(ValueError):
    pass


def _mpf(x, bits: int):
    if isinstance(x, mpmath.mpf):
        return x
    with mpmath.workprec(bits):
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        return mpmath.mpf(x)


@dataclass(frozen=True)
class TwistVector:
    """Sparse angle vector over a basis prefix of ``length`` coordinates.

    ``raw`` holds the angles as given (mpf); ``angle(l)`` is the canonical
    representative in [0, 2pi). Missing coordinates are 0.
    """

    raw: dict
    length: int
    precision: int = 128

    @classmethod
    def from_angles(cls, angles: Sequence, precision: int | None = None) -> "TwistVector":
        bits = working_precision(precision)
        return cls({l: _mpf(a, bits) for l, a in enumerate(angles) if a != 0}, len(angles), bits)

    @classmethod
    def sparse(cls, angles: dict, length: int, precision: int | None = None) -> "TwistVector":
        bits = working_precision(precision)
        bad = [l for l in angles if not 0 <= l < length]
        if bad:
            raise ValueError(f"coordinate {bad[0]} outside the prefix of length {length}")
        return cls({int(l): _mpf(a, bits) for l, a in angles.items() if a != 0}, int(length), bits)

    @classmethod
    def zero(cls, length: int) -> "TwistVector":
        return cls({}, int(length))

    def __post_init__(self):
        for v in self.raw.values():
            if not mpmath.isfinite(v):
                raise ValueError("twist angles must be finite")

    def angle(self, l: int) -> float:
        v = self.raw.get(l)
        if v is None:
            return 0.0
        with mpmath.workprec(self.precision + mag_bits(v) + 8):
            return float(mpmath.fmod(mpmath.fmod(v, 2 * mpmath.pi) + 2 * mpmath.pi, 2 * mpmath.pi)) % TWO_PI

    @property
    def angles(self) -> list[float]:
        """Canonical angles in [0, 2pi), dense over the prefix (small prefixes only)."""
        return [self.angle(l) for l in range(self.length)]

    def support(self) -> list[int]:
        return sorted(self.raw)

    def reduced(self) -> "TwistVector":
        return TwistVector({l: _mpf(self.angle(l), self.precision) for l in self.raw if self.angle(l)}, self.length, self.precision)

    def extended(self, length: int) -> "TwistVector":
        if length < self.length:
            raise ValueError("cannot shrink a twist vector")
        return TwistVector(dict(self.raw), int(length), self.precision)

    def __add__(self, other: "TwistVector") -> "TwistVector":
        bits = max(self.precision, other.precision)
        out = dict(self.raw)
        with mpmath.workprec(bits):
            for l, v in other.raw.items():
                out[l] = out.get(l, mpmath.mpf(0)) + v
        return TwistVector({l: v for l, v in out.items() if v != 0}, max(self.length, other.length), bits)

    def __neg__(self) -> "TwistVector":
        return TwistVector({l: -v for l, v in self.raw.items()}, self.length, self.precision)

    def scaled(self, c) -> "TwistVector":
        with mpmath.workprec(self.precision):
            return TwistVector({l: v * c for l, v in self.raw.items()}, self.length, self.precision)

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "angles": {str(l): mpf_text(v) for l, v in sorted(self.raw.items())},
            "canonical": {str(l): self.angle(l) for l in sorted(self.raw)},
        }

    @classmethod
    def from_json(cls, d: dict) -> "TwistVector":
        angles = d["angles"]
        if isinstance(angles, list):
            return cls.from_angles([exact_mpf(str(a)) for a in angles])
        return cls.sparse({int(k): exact_mpf(str(v)) for k, v in angles.items()}, int(d["length"]))


def vertical_shift_vector(spec: SymbolicExponents, tau0, length: int | None = None, precision: int | None = None) -> TwistVector:
    """Y = -tau0 * beta: for an integral basis this twist is s -> s + i tau0."""
    length = spec.matrix.support_size() if length is None else length
    tau0 = exact_mpf(tau0)
    bits = working_precision(precision) + mag_bits(tau0)
    betas = [g.value(bits) for g in spec.basis[:length]]
    with mpmath.workprec(bits):
        t = mpmath.mpf(tau0)
        return TwistVector({l: -t * b for l, b in enumerate(betas)}, length, bits)


# ---------------------------------------------------------------------------
# twisted coefficients


def _matrix_is_integral(spec: SymbolicExponents) -> bool:
    if isinstance(spec, OrdinaryExponents):
        return True
    return integrality(spec.matrix, spec.size, cap=10**30).is_integral


def _check_cover(spec: SymbolicExponents, Y: TwistVector) -> None:
    if isinstance(spec, OrdinaryExponents):
        needed = len(spec.basis)
        if Y.length < needed:
            p = spec.basis.prime(Y.length)
            raise TwistError(f"twist vector of length {Y.length} does not cover n={p} (coordinate {Y.length})")
        return
    for n in range(1, spec.size + 1):
        r = spec.matrix.row(n)
        if r and max(r) >= Y.length:
            raise TwistError(f"twist vector of length {Y.length} does not cover n={n} (coordinate {max(r)})")


class TwistedCoefficients(Coefficients):
    """b(n) = a(n) exp(i (RY)_n); moduli are passed through untouched."""

    def __init__(self, base: Coefficients, spec: SymbolicExponents, Y: TwistVector):
        self.base = base
        self.spec = spec
        self.Y = Y
        self.size = base.size
        self.integral = _matrix_is_integral(spec)
        self._cache: dict[int, float] = {}

    def twist_phase(self, i0: int, i1: int) -> np.ndarray:
        spec, Y = self.spec, self.Y
        if isinstance(spec, OrdinaryExponents) and len(Y.raw) <= 256:
            n = np.arange(i0, i1, dtype=np.int64)
            out = np.zeros(len(n))
            for l in Y.raw:
                p = spec.basis.prime(l)
                if p < i1:
                    out += p_adic_valuation(n, p) * Y.angle(l)
            return _wrap(out)
        out = np.empty(i1 - i0)
        for k, n in enumerate(range(i0, i1)):
            v = self._cache.get(n)
            if v is None:
                v = self._row_phase(spec.matrix.row(n))
                self._cache[n] = v
            out[k] = v
        return out

    def _row_phase(self, row: dict) -> float:
        if self.integral:
            return math.fsum(int(r) * self.Y.angle(l) for l, r in row.items()) % TWO_PI
        big = max((abs(self.Y.raw.get(l, 0)) for l in row), default=0)
        bits = working_precision(self.Y.precision) + max(0, int(mpmath.log(big + 1, 2))) + 16
        with mpmath.workprec(bits):
            acc = mpmath.mpf(0)
            for l, r in row.items():
                y = self.Y.raw.get(l)
                if y is not None:
                    acc += y * r.numerator / r.denominator
            return float(mpmath.fmod(acc, 2 * mpmath.pi)) % TWO_PI

    def polar(self, i0, i1):
        mod, ph = self.base.polar(i0, i1)
        return mod, _wrap(ph + self.twist_phase(i0, i1))

    def modulus(self, i0, i1):
        return self.base.modulus(i0, i1)

    def abs_sum(self, i0, i1):
        return self.base.abs_sum(i0, i1)

    def max_modulus(self, i0, i1):
        return self.base.max_modulus(i0, i1)


class PhaseShiftCoefficients(Coefficients):
    """b(n) = a(n) exp(2 pi i theta_n) for a per-exponent phase table."""

    def __init__(self, base: Coefficients, theta: np.ndarray):
        self.base = base
        self.theta = np.asarray(theta, dtype=float)
        self.size = len(self.theta) if base.size is None else min(base.size, len(self.theta))

    def polar(self, i0, i1):
        self._check(i0, i1)
        mod, ph = self.base.polar(i0, i1)
        return mod, _wrap(ph + TWO_PI * self.theta[i0 - 1 : i1 - 1])

    def modulus(self, i0, i1):
        self._check(i0, i1)
        return self.base.modulus(i0, i1)


def _spec_of(series: DirichletSeries) -> SymbolicExponents:
    spec = series.exponents
    if not isinstance(spec, SymbolicExponents):
        raise TwistError("twists need a symbolic or ordinary exponent spec (explicit specs have no basis)")
    return spec


def twist(series: DirichletSeries, Y: TwistVector, label: str | None = None) -> DirichletSeries:
    spec = _spec_of(series)
    _check_cover(spec, Y)
    base = series.coefficients
    lab = label if label is not None else f"{series.label}~twist"
    if isinstance(spec, OrdinaryExponents) and isinstance(base, (ConstantCoefficients, EulerCoefficients)) and len(Y.raw) <= 4096:
        units = {} if isinstance(base, ConstantCoefficients) else dict(base.units)
        for l in Y.raw:
            p = spec.basis.prime(l)
            m, a = units.get(p, (1.0, 0.0))
            units[p] = (m, (a + Y.angle(l)) % TWO_PI)
        return series.with_coefficients(EulerCoefficients(base.c, units, base.size), lab)
    return series.with_coefficients(TwistedCoefficients(base, spec, Y), lab)


def vector_twist(series_list: Sequence[DirichletSeries], Y: TwistVector) -> list[DirichletSeries]:
    return [twist(F, Y) for F in series_list]


# ---------------------------------------------------------------------------
# detection


@dataclass
class Incompatible:
    reason: str
    kind: str  # "modulus" | "congruence" | "unbounded-denominator" | "spec"
    witness: int | None
    series_index: int | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "status": "Incompatible",
            "kind": self.kind,
            "reason": self.reason,
            "witness": self.witness,
            "series_index": self.series_index,
            "detail": self.detail,
        }


@dataclass
class TwistDetection:
    Y: TwistVector
    residuals: np.ndarray  # wrapped (RY)_n - arg(b/a) per constrained n
    constrained: list  # (j, n) pairs
    Q: int
    free_coords: list[int]
    flags: list[str] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return float(np.abs(self.residuals).max()) if len(self.residuals) else 0.0

    def to_json(self) -> dict:
        return {
            "status": "Equivalent",
            "Y": self.Y.to_json(),
            "Q": self.Q,
            "max_residual": self.max_residual,
            "free_coords": self.free_coords,
            "flags": self.flags,
        }


def _wrap_signed(x: float) -> float:
    return (x + math.pi) % TWO_PI - math.pi


class _Echelon:
    """Incremental integer row echelon form for A z = phi (mod 2pi)."""

    def __init__(self, tol: float):
        self.rows: dict[int, tuple[dict[int, int], float]] = {}
        self.tol = tol

    def insert(self, row: dict[int, int], phi: float) -> float | None:
        """Add a congruence; returns the residual if it reduces to 0 = phi."""
        row = {l: v for l, v in row.items() if v}
        # pivot on the last column: ordinary rows then stay unit vectors
        while row:
            p = max(row)
            if p not in self.rows:
                self.rows[p] = (row, phi % TWO_PI)
                return None
            erow, ephi = self.rows[p]
            d, c = erow[p], row[p]
            g, u, v = _xgcd(d, c)
            new_pivot = _combine(erow, u, row, v)
            new_phi = (u * ephi + v * phi) % TWO_PI
            rest = _combine(erow, c // g, row, -(d // g))
            rest_phi = ((c // g) * ephi - (d // g) * phi) % TWO_PI
            self.rows[p] = (new_pivot, new_phi)
            row, phi = rest, rest_phi
        res = _wrap_signed(phi)
        return res if abs(res) > self.tol else None

    def solve(self) -> dict[int, float]:
        """Back-substitution; free coordinates 0, pivot branch of least modulus."""
        z: dict[int, float] = {}
        for p in sorted(self.rows):
            row, phi = self.rows[p]
            d = row[p]
            acc = phi - math.fsum(v * z.get(l, 0.0) for l, v in row.items() if l != p)
            # z_p = (acc + 2 pi k)/d, pick k minimizing |z_p|
            k = round(-acc / TWO_PI)
            z[p] = (acc + TWO_PI * k) / d
        return z


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _combine(r1: dict, c1: int, r2: dict, c2: int) -> dict:
    out = {}
    for l in set(r1) | set(r2):
        v = c1 * r1.get(l, 0) + c2 * r2.get(l, 0)
        if v:
            out[l] = v
    return out


def detect_vector_twist(
    F_list: Sequence[DirichletSeries],
    G_list: Sequence[DirichletSeries],
    n_limit: int,
    tol: float = DEFAULT_TOLERANCE,
    cap: int = DEFAULT_DENOMINATOR_CAP,
) -> TwistDetection | Incompatible:
    """One common Y with b_j(n) = a_j(n) exp(i (RY)_n) for every j and n <= n_limit."""
    if len(F_list) != len(G_list) or not F_list:
        raise ValueError("need matching nonempty series lists")
    spec = F_list[0].exponents
    for F, G in zip(F_list, G_list):
        if not (same_exponents(F.exponents, spec) and same_exponents(G.exponents, spec)):
            return Incompatible("series do not share one exponent spec", "spec", None)
    if not isinstance(spec, SymbolicExponents):
        return Incompatible("explicit exponents carry no basis; equivalence is not decidable here", "spec", None)
    n_limit = min(int(n_limit), min(min(F.size, G.size) for F, G in zip(F_list, G_list)))

    # moduli first
    constrained: list[tuple[int, int, float]] = []
    for j, (F, G) in enumerate(zip(F_list, G_list)):
        a = F.coeffs(n_limit)
        b = G.coeffs(n_limit)
        ma, mb = np.abs(a), np.abs(b)
        bad = np.abs(ma - mb) > tol * np.maximum(1.0, ma)
        if bad.any():
            n = int(np.argmax(bad)) + 1
            return Incompatible(
                f"|b({n})| = {mb[n - 1]:.17g} differs from |a({n})| = {ma[n - 1]:.17g}",
                "modulus",
                n,
                j,
            )
        nz = np.flatnonzero(ma > 0)
        phase = np.angle(b[nz] / a[nz])
        constrained.extend((j, int(i) + 1, float(ph)) for i, ph in zip(nz, phase))
    constrained.sort(key=lambda c: (c[1], c[0]))

    rows_needed = sorted({n for _, n, _ in constrained})
    try:
        Q = common_denominator(_RowsView(spec, rows_needed), len(rows_needed), cap)
    except DenominatorCapExceeded as exc:
        n_bad = rows_needed[exc.row - 1]
        return Incompatible(
            f"lcm of row denominators exceeds {cap} at n={n_bad}: prefix solutions, if any, "
            "grow without bound, so no fixed Y is found",
            "unbounded-denominator",
            n_bad,
            detail={"partial_lcm": exc.lcm, "cap": cap},
        )

    ech = _Echelon(tol)
    for j, n, ph in constrained:
        row = {l: int(v * Q) for l, v in spec.matrix.row(n).items()}
        res = ech.insert(row, ph)
        if res is not None:
            return Incompatible(
                f"congruence system inconsistent at n={n} (residual {res:.3e} rad)",
                "congruence",
                n,
                j,
                {"residual": res},
            )
    z = ech.solve()
    length = spec.matrix.support_size(max(rows_needed) if rows_needed else 1) if rows_needed else 0
    if isinstance(spec, OrdinaryExponents):
        length = len(spec.basis) if spec.size <= n_limit else _ordinary_prefix(spec, n_limit)
    with mpmath.workprec(128):
        Y = TwistVector({l: mpmath.mpf(v) * Q for l, v in z.items() if v}, max(length, 1 + max(z, default=-1)))
    residuals = []
    for j, n, ph in constrained:
        got = math.fsum(float(r) * float(Y.raw.get(l, 0.0)) for l, r in spec.matrix.row(n).items())
        residuals.append(_wrap_signed(got - ph))
    residuals = np.array(residuals)
    touched = set()
    for _, n, _ in constrained:
        touched.update(spec.matrix.row(n))
    free = sorted(set(range(Y.length)) - touched)
    if len(residuals) and np.abs(residuals).max() > tol:
        k = int(np.argmax(np.abs(residuals)))
        return Incompatible(
            f"back-substitution residual {residuals[k]:.3e} rad at n={constrained[k][1]}",
            "congruence",
            constrained[k][1],
            constrained[k][0],
        )
    flags = ["least-modulus branch per pivot; untouched coordinates set to 0"]
    return TwistDetection(Y, residuals, [(j, n) for j, n, _ in constrained], Q, free, flags)


def _ordinary_prefix(spec: OrdinaryExponents, n_limit: int) -> int:
    return spec.basis.table.count() if n_limit >= spec.size else int(np.searchsorted(spec.basis.table.small, n_limit, side="right"))


class _RowsView:
    """Selected rows of a matrix, renumbered 1..k, for common_denominator."""

    def __init__(self, spec: SymbolicExponents, rows: list[int]):
        self.spec = spec
        self.idx = rows
        self.n_rows = len(rows)
        self._integral_by_construction = isinstance(spec, OrdinaryExponents)

    def row(self, k: int):
        return self.spec.matrix.row(self.idx[k - 1])


def detect_twist(F: DirichletSeries, G: DirichletSeries, n_limit: int, tol: float = DEFAULT_TOLERANCE, cap: int = DEFAULT_DENOMINATOR_CAP):
    return detect_vector_twist([F], [G], n_limit, tol, cap)


# ---------------------------------------------------------------------------
# Helly selection at finite truncation


class HellyFailure(ValueError):
    def __init__(self, achieved: float, length: int):
        super().__init__(f"sequence too short for the requested tolerance; achieved spread {achieved:.3e} with {length} terms")
        self.achieved = achieved
        self.length = length


@dataclass
class HellyTable:
    entries: np.ndarray  # theta[m, l] in [0, 1)
    limits: np.ndarray  # theta_l
    indices: np.ndarray  # selected m_k (0-based into the tau list)
    spread: np.ndarray  # per coordinate, circular diameter of the selected entries
    tolerance: float

    @property
    def twist_angles(self) -> list[float]:
        return [TWO_PI * float(t) for t in self.limits]

    def to_json(self) -> dict:
        return {
            "limits": [float(t) for t in self.limits],
            "indices": [int(i) for i in self.indices],
            "spread": [float(s) for s in self.spread],
            "tolerance": self.tolerance,
        }


@dataclass
class PhaseLimitTable:
    limits: np.ndarray  # theta_n per exponent, n = 1..N
    indices: np.ndarray
    spread: np.ndarray
    tolerance: float

    def to_json(self) -> dict:
        return {
            "phases": [float(t) for t in self.limits],
            "indices": [int(i) for i in self.indices],
            "max_spread": float(self.spread.max()) if len(self.spread) else 0.0,
            "tolerance": self.tolerance,
        }


def fractional_table(taus: Sequence, freqs: Sequence, precision: int | None = None) -> np.ndarray:
    """theta[m, l] = {-tau_m * freq_l / 2pi}, computed in mpmath."""
    bits = working_precision(precision)
    bits += max((mag_bits(t) for t in taus), default=0)
    with mpmath.workprec(bits):
        two_pi = 2 * mpmath.pi
        fr = [mpmath.mpf(f) / two_pi for f in freqs]
        out = np.empty((len(taus), len(freqs)))
        for m, t in enumerate(taus):
            t = exact_mpf(t)
            for l, f in enumerate(fr):
                v = -t * f
                out[m, l] = float(v - mpmath.floor(v))
    out[out >= 1.0] = 0.0
    return out


def _best_windows(vals: np.ndarray, width: float, top: int) -> list[tuple[int, np.ndarray, float]]:
    """Circular windows [v, v + width) anchored at data points, best counts first."""
    order = np.argsort(vals, kind="stable")
    sv = vals[order]
    ext = np.concatenate([sv, sv + 1.0])
    ends = np.searchsorted(ext, sv + width, side="left")
    counts = ends - np.arange(len(sv))
    cand = np.argsort(-counts, kind="stable")[:top]
    out = []
    for i in cand:
        members = order[np.arange(i, ends[i]) % len(sv)]
        out.append((int(counts[i]), np.sort(members), float(sv[i])))
    return out


def _circular_spread(v: np.ndarray) -> tuple[float, float]:
    """(diameter, midpoint) of the smallest arc holding all points."""
    if len(v) == 0:
        return 0.0, 0.0
    s = np.sort(v)
    gaps = np.diff(np.concatenate([s, [s[0] + 1.0]]))
    k = int(np.argmax(gaps))
    start = s[(k + 1) % len(s)]
    diam = 1.0 - gaps[k]
    return float(diam), float((start + diam / 2) % 1.0)


def _extract(theta: np.ndarray, tolerance: float, beam: int, min_length: int):
    width = tolerance * (1 - 1e-9)
    states = [np.arange(theta.shape[0])]
    for l in range(theta.shape[1]):
        cands = []
        for st in states:
            for cnt, members, _ in _best_windows(theta[st, l], width, beam):
                cands.append((cnt, st[members]))
        cands.sort(key=lambda c: -c[0])
        seen, states = set(), []
        for cnt, idx in cands:
            key = idx.tobytes()
            if key not in seen:
                seen.add(key)
                states.append(idx)
            if len(states) >= beam:
                break
    best = max(states, key=len)
    return best


def helly_limit(
    tau_sequence: Sequence,
    basis_values: Sequence,
    tolerance: float,
    *,
    min_length: int = 2,
    beam: int = 64,
    precision: int | None = None,
) -> HellyTable:
    """Subsequence along which every {-tau_m beta_l / 2pi} settles within ``tolerance``.

    Coordinates are processed in order; for each one the sliding windows of
    width ``tolerance`` holding the most surviving indices are kept (a beam of
    candidates), which is a finite form of the diagonal argument.
    """
    if not 0 < tolerance < 1:
        raise ValueError("tolerance must lie in (0, 1)")
    theta = fractional_table(tau_sequence, basis_values, precision)
    idx = _extract(theta, tolerance, beam, min_length)
    if len(idx) < min_length:
        w = tolerance
        while w < 1:
            w *= 2
            if len(_extract(theta, min(w, 0.999), beam, min_length)) >= min_length:
                break
        raise HellyFailure(min(w, 1.0), len(tau_sequence))
    spreads, mids = zip(*(_circular_spread(theta[idx, l]) for l in range(theta.shape[1])))
    return HellyTable(theta, np.array(mids), idx, np.array(spreads), tolerance)


def phase_limit(
    tau_sequence: Sequence,
    spec: ExponentSpec,
    n_terms: int,
    tolerance: float,
    *,
    min_length: int = 2,
    beam: int = 16,
    precision: int | None = None,
) -> PhaseLimitTable:
    """Per-exponent version: theta_{m,n} = {-tau_m lambda_n / 2pi}, n <= n_terms."""
    bits = working_precision(precision)
    lams = spec.values_mp(n_terms, bits + 64)
    theta = fractional_table(tau_sequence, lams, bits + 64)
    idx = _extract(theta, tolerance, beam, min_length)
    if len(idx) < min_length:
        raise HellyFailure(1.0, len(tau_sequence))
    spreads, mids = zip(*(_circular_spread(theta[idx, n]) for n in range(n_terms)))
    return PhaseLimitTable(np.array(mids), idx, np.array(spreads), tolerance)


def limit_series(series_list: Sequence[DirichletSeries], table: HellyTable | PhaseLimitTable):
    """Limit series G_j of the translates F_j(s + i tau_{m_k}).

    HellyTable: needs an integral matrix; returns (G_list, Y) with Y = 2 pi theta.
    PhaseLimitTable: b(n) = a(n) exp(2 pi i theta_n) on the tabulated prefix.
    """
    if isinstance(table, HellyTable):
        out_Y = None
        G = []
        for F in series_list:
            spec = _spec_of(F)
            if not _matrix_is_integral(spec):
                rep = integrality(spec.matrix, spec.size)
                raise TwistError(
                    f"the basis is not integral (first non-integral row n={rep.witness}); "
                    "exp(2 pi i sum_l r_nl theta_l) is not well defined, use the per-exponent path"
                )
            need = spec.matrix.support_size() if not isinstance(spec, OrdinaryExponents) else len(spec.basis)
            if len(table.limits) > need:
                need = len(table.limits)
            Y = TwistVector.from_angles(table.twist_angles).extended(need)
            out_Y = Y
            G.append(twist(F, Y, f"{F.label}~limit"))
        return G, out_Y
    G = []
    for F in series_list:
        N = min(len(table.limits), F.size)
        spec = F.exponents.truncate(N)
        coeffs = PhaseShiftCoefficients(F.coefficients, table.limits[:N])
        G.append(DirichletSeries(spec, coeffs, F.tail, f"{F.label}~limit"))
    return G
