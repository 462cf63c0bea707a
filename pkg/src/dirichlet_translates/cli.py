"""dtrans: command-line front end.

Exit codes: 0 success, 1 negative answer (Incompatible / not Verified),
2 bad input, 3 search budget exhausted.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import mpmath
import numpy as np

from . import corpus
from .equivalence import (
    HellyFailure,
    Incompatible,
    TwistError,
    TwistVector,
    detect_twist,
    helly_limit,
    limit_series,
    twist,
)
from .exponents import (
    PRECISION_ENV,
    PrefixExhausted,
    DenominatorCapExceeded,
    SymbolicExponents,
    common_denominator,
    exact_mpf,
    integrality,
)
from .kronecker import DEFAULT_BUDGET
from .rigidity import (
    BudgetError,
    Disk,
    NotEquivalent,
    Rectangle,
    SearchExhausted,
    density_of_translates,
    find_translate,
    value_set_check,
    verify_translate,
)
from .series import ConstantCoefficients, SamplingPlan, sigma_absolute_estimate, sigma_uniform_estimate
from .specfile import SpecError, canonical_json, emit_series, load_series

log = logging.getLogger("dtrans")

OK, NEGATIVE, BAD_INPUT, EXHAUSTED = 0, 1, 2, 3


class _Out:
    def __init__(self, args):
        self.canonical = args.canonical
        self.path = getattr(args, "out", None)

    def json(self, doc: dict) -> None:
        if not self.canonical:
            doc = dict(doc)
            doc["meta"] = {"generated": time.strftime("%Y-%m-%dT%H:%M:%S")}
        self.write(canonical_json(doc))

    def csv(self, rows: list[dict]) -> None:
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: (format(v, ".17g") if isinstance(v, float) else v) for k, v in r.items()})
        self.write(buf.getvalue())

    def write(self, text: str) -> None:
        if self.path:
            Path(self.path).write_text(text)
        else:
            sys.stdout.write(text)


def _rect(text: str) -> Rectangle:
    try:
        s0, s1, t0, t1 = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise SpecError(f"rectangle is 'sigma_min,sigma_max,t_min,t_max', got {text!r}") from exc
    return Rectangle(s0, s1, t0, t1)


def _grid(text: str) -> list[float]:
    try:
        a, b, h = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise SpecError(f"grid is 'start:stop:step', got {text!r}") from exc
    n = int(round((b - a) / h))
    return [a + k * h for k in range(n + 1)]


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc


def _twist_vector(path) -> TwistVector:
    d = _read_json(path)
    try:
        return TwistVector.from_json(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"bad twist vector file: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommands


def cmd_basis(args, out: _Out) -> int:
    F = load_series(args.spec)
    spec = F.exponents
    if not isinstance(spec, SymbolicExponents):
        raise SpecError("basis needs a symbolic or ordinary exponent spec")
    n = min(args.n_limit or spec.size, spec.size)
    rep = integrality(spec.matrix, n, args.cap).to_dict()
    rep["basis"] = [g.label for g in spec.basis[: spec.matrix.support_size(n)]]
    try:
        rep["Q"] = common_denominator(spec.matrix, n, args.cap)
    except DenominatorCapExceeded:
        rep["Q"] = None
    out.json(rep)
    return OK


def cmd_sigma(args, out: _Out) -> int:
    F = load_series(args.spec)
    if args.grid:
        grid = _grid(args.grid)
    else:
        # half-integer points whose windows fit in the prefix
        lo = float(F.exponents.value(1, 64))
        hi = float(F.exponents.value(F.size, 64))
        grid = [k + 0.5 for k in range(math.floor(lo), math.floor(hi)) if lo < k + 0.5 < hi]
        if not grid:
            raise SpecError("prefix too short for any window; pass --grid")
    est = sigma_absolute_estimate(F, grid) if args.absolute else sigma_uniform_estimate(F, grid, SamplingPlan())
    rows = est.rows()
    for r in rows:
        r["estimate"] = est.estimate
    out.csv(rows)
    return OK


def cmd_twist(args, out: _Out) -> int:
    F = load_series(args.spec)
    Y = _twist_vector(args.y)
    G = twist(F, Y, args.label or f"{F.label}~twist")
    out.json(emit_series(G))
    return OK


def cmd_equiv(args, out: _Out) -> int:
    F, G = load_series(args.a), load_series(args.b)
    n = args.n_limit or min(F.size, G.size)
    det = detect_twist(F, G, n, cap=args.cap)
    out.json(det.to_json())
    return NEGATIVE if isinstance(det, Incompatible) else OK


def cmd_find_tau(args, out: _Out) -> int:
    F, G = load_series(args.a), load_series(args.b)
    K = _rect(args.k)
    Y = _twist_vector(args.y) if args.y else None
    try:
        cert = find_translate([F], [G], [K], args.eps, args.budget, Y=Y, strategy=args.strategy)
    except NotEquivalent as exc:
        out.json(exc.incompatible.to_json())
        return NEGATIVE
    except SearchExhausted as exc:
        out.json({"status": "Exhausted", "kronecker": exc.solution.to_json(), "budget": exc.budget.to_json()})
        return EXHAUSTED
    out.json(cert.to_json())
    return OK if cert.verified else NEGATIVE


def cmd_verify(args, out: _Out) -> int:
    F, G = load_series(args.a), load_series(args.b)
    K = _rect(args.k)
    tau = exact_mpf(args.tau)
    rep = verify_translate([F], [G], [K], tau, M=args.M, slack_target=args.slack)
    doc = rep.to_json()
    doc["tau"] = args.tau
    out.json(doc)
    return OK


def cmd_density(args, out: _Out) -> int:
    F, G = load_series(args.a), load_series(args.b)
    K = _rect(args.k)
    res = density_of_translates([F], [G], [K], args.eps, args.T, args.samples, args.seed, M=args.M)
    if args.per_sample:
        with open(args.per_sample, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["tau", "bound", "qualified"], lineterminator="\n")
            w.writeheader()
            w.writerows(res.csv_rows())
    out.csv([{"estimate": res.estimate, "stderr": res.stderr, "samples": res.samples, "T": res.T, "seed": res.seed, "epsilon": args.eps}])
    return OK


def _read_taus(path) -> list:
    text = Path(path).read_text()
    try:
        vals = json.loads(text)
    except json.JSONDecodeError:
        vals = [v for v in text.split() if v]
    return [exact_mpf(str(v)) for v in vals]


def cmd_lemma2(args, out: _Out) -> int:
    F = load_series(args.spec)
    spec = F.exponents
    if not isinstance(spec, SymbolicExponents):
        raise SpecError("lemma2 needs a basis")
    taus = _read_taus(args.taus)
    L = args.coords or spec.matrix.support_size()
    try:
        table = helly_limit(taus, spec.basis_values(count=L), args.tolerance)
    except HellyFailure as exc:
        out.json({"status": "Failed", "reason": str(exc)})
        return NEGATIVE
    doc = {"status": "Found", "table": table.to_json()}
    try:
        G, Y = limit_series([F], table)
        doc["twist"] = Y.to_json()
        doc["limit_series"] = [emit_series(g) for g in G]
    except TwistError as exc:
        doc["limit_series"] = None
        doc["note"] = str(exc)
    out.json(doc)
    return OK


def _probe(v) -> complex:
    return complex(v[0], v[1]) if isinstance(v, list) else complex(v)


def cmd_values(args, out: _Out) -> int:
    F, G = load_series(args.a), load_series(args.b)
    V = _rect(args.v)
    probes = [_probe(v) for v in _read_json(args.probes)]
    reps = value_set_check(F, G, V, probes, args.budget, symmetric=args.symmetric)
    out.json({"reports": [r.to_json() for r in reps]})
    return OK if all(r.status in ("Certified", "Unattained") for r in reps) else NEGATIVE


# ---------------------------------------------------------------------------
# demos


def _demo_bohr(out: _Out) -> int:
    F = corpus.bohr_example(30).series
    f = F.with_coefficients(ConstantCoefficients(-1.0), "-bohr")
    rep = integrality(F.exponents.matrix, 30)
    tau = corpus.bohr_tau(4)
    K = Rectangle(2, 3, -1, 1)
    ver = verify_translate([F], [f], [K], tau)
    det = detect_twist(F, f, 30)
    ok = rep.unbounded or not rep.is_integral
    ok = ok and ver.sup_error[0] < 1e-7 and isinstance(det, Incompatible)
    out.json(
        {
            "demo": "bohr",
            "integrality": rep.to_dict(),
            "tau": "210*pi",
            "verify": ver.to_json(),
            "tail_estimate": 2 * float(np.exp(-18)) / (1 - float(np.exp(-4))),
            "equiv": det.to_json(),
            "passed": bool(ok),
        }
    )
    return OK if ok else NEGATIVE


def _demo_zeta(out: _Out) -> int:
    F = corpus.zeta_series(500).series
    Y = TwistVector.sparse({0: mpmath.pi / 3, 1: mpmath.pi / 5}, length=len(F.exponents.basis))
    f = twist(F, Y, "zeta~twist")
    K = Rectangle(1.6, 2.2, -1, 1)
    cert = find_translate([F], [f], [K], 0.1)
    out.json({"demo": "zeta", "certificate": cert.to_json(), "passed": cert.verified})
    return OK if cert.verified else NEGATIVE


def _demo_hurwitz(out: _Out) -> int:
    H = corpus.hurwitz_series("1/e", 400).series
    # the identity basis makes any per-exponent phase table a twist
    rng = np.random.default_rng(0)
    Y = TwistVector.sparse({l: float(a) for l, a in enumerate(rng.uniform(0, 2 * np.pi, 3))}, length=400)
    h = twist(H, Y, "hurwitz~twist")
    det = detect_twist(H, h, 400)
    K = Disk(complex(2.5, 0), 0.3)
    cert = find_translate([H], [h], [K], 0.5, Y=Y)
    out.json(
        {
            "demo": "hurwitz",
            "integrality": integrality(H.exponents.matrix, 400).to_dict(),
            "equiv": det.to_json(),
            "certificate": cert.to_json(),
            "passed": cert.verified and not isinstance(det, Incompatible),
        }
    )
    return OK if cert.verified else NEGATIVE


DEMOS = {"bohr": _demo_bohr, "zeta": _demo_zeta, "hurwitz": _demo_hurwitz}


def cmd_demo(args, out: _Out) -> int:
    return DEMOS[args.name](out)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def common(default):
        c = argparse.ArgumentParser(add_help=False)
        kw = {} if default else {"default": argparse.SUPPRESS}
        c.add_argument("--precision", type=int, help=f"working precision in bits (also ${PRECISION_ENV})", **({"default": None} if default else kw))
        c.add_argument("--canonical", action="store_true", help="omit timestamps so identical runs give identical bytes", **kw)
        c.add_argument("--seed", type=int, help="RNG seed (default 0)", **({"default": 0} if default else kw))
        c.add_argument("-o", "--out", help="write output here instead of stdout", **({"default": None} if default else kw))
        c.add_argument("-v", "--verbose", action="store_true", **kw)
        return c

    p = argparse.ArgumentParser(
        prog="dtrans", description="Translates and twists of general Dirichlet series.", parents=[common(True)]
    )
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser
    sub.add_parser = lambda *a, **k: _add(*a, parents=[common(False)], **k)

    s = sub.add_parser("basis", help="integrality report of the Bohr matrix")
    s.add_argument("spec")
    s.add_argument("--n-limit", type=int)
    s.add_argument("--cap", type=int, default=10**6)
    s.set_defaults(fn=cmd_basis)

    s = sub.add_parser("sigma", help="abscissa estimates over an x-grid (CSV)")
    s.add_argument("spec")
    s.add_argument("--grid", help="start:stop:step (default: half-integers inside the prefix)")
    s.add_argument("--absolute", action="store_true")
    s.set_defaults(fn=cmd_sigma)

    s = sub.add_parser("twist", help="apply a twist vector, write the twisted spec")
    s.add_argument("spec")
    s.add_argument("--y", required=True)
    s.add_argument("--label")
    s.set_defaults(fn=cmd_twist)

    s = sub.add_parser("equiv", help="decide whether B is a twist of A")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--n-limit", type=int)
    s.add_argument("--cap", type=int, default=10**6)
    s.set_defaults(fn=cmd_equiv)

    s = sub.add_parser("find-tau", help="find and certify tau with |A(s+i tau) - B(s)| < eps on K")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--k", required=True, help="sigma_min,sigma_max,t_min,t_max")
    s.add_argument("--y", help="twist vector file (skips detection)")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--strategy", default="auto")
    s.set_defaults(fn=cmd_find_tau)

    s = sub.add_parser("verify", help="sup error of A(s+i tau) - B(s) on K with slack")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--tau", required=True)
    s.add_argument("--k", required=True)
    s.add_argument("--M", type=int)
    s.add_argument("--slack", type=float, default=1e-3)
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("density", help="share of tau in [-T, T] that pass verification (CSV)")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--k", required=True)
    s.add_argument("--T", type=float, required=True)
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--M", type=int)
    s.add_argument("--per-sample", help="also write one CSV row per sampled tau")
    s.set_defaults(fn=cmd_density)

    s = sub.add_parser("lemma2", help="convergent subsequence of phases and the limit series")
    s.add_argument("spec")
    s.add_argument("--taus", required=True)
    s.add_argument("--tolerance", type=float, default=1e-2)
    s.add_argument("--coords", type=int)
    s.set_defaults(fn=cmd_lemma2)

    s = sub.add_parser("values", help="certify probe values in the value set of A on a strip")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--probes", required=True)
    s.add_argument("--v", required=True, help="sigma_min,sigma_max,t_min,t_max")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--symmetric", action="store_true")
    s.set_defaults(fn=cmd_values)

    s = sub.add_parser("demo", help="scripted end-to-end scenarios")
    s.add_argument("name", choices=sorted(DEMOS))
    s.set_defaults(fn=cmd_demo)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.precision:
        os.environ[PRECISION_ENV] = str(args.precision)
    np.random.seed(args.seed)
    out = _Out(args)
    try:
        return args.fn(args, out)
    except (SpecError, BudgetError, PrefixExhausted, ValueError) as exc:
        print(f"dtrans: {exc}", file=sys.stderr)
        return BAD_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
