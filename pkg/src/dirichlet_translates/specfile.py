"""JSON series specs and canonical JSON output."""
from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .corpus import CharacterCoefficients
from .exponents import (
    BohrMatrix,
    ExplicitExponents,
    Generator,
    LinearGrowth,
    LogGrowth,
    OrdinaryExponents,
    SemigroupGrowth,
    SymbolicExponents,
)
from .series import (
    ConstantCoefficients,
    DirichletSeries,
    EulerCoefficients,
    FiniteSupport,
    ListedBounds,
    PolarCoefficients,
    UniformBound,
)


class SpecError(ValueError):
    pass


# ---------------------------------------------------------------------------
# canonical JSON


def _canon(obj):
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_canon(v) for v in obj.tolist()]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return [_canon(obj.real), _canon(obj.imag)]
    return obj


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return json.dumps("inf" if x > 0 else "-inf" if x < 0 else "nan")
    return format(x, ".17g")


def _dump(obj, level: int) -> str:
    pad = "  " * (level + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_dump(obj[k], level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_dump(v, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _dump(v, level + 1) for v in obj) + "\n" + "  " * level + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(str(obj))


def canonical_json(obj) -> str:
    """Sorted keys, floats at 17 significant digits."""
    return _dump(_canon(obj), 0) + "\n"


# ---------------------------------------------------------------------------
# parse


def _frac(v) -> Fraction:
    if isinstance(v, bool):
        raise SpecError("booleans are not rationals")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecError(f"bad rational {v!r}") from exc
    raise SpecError(f"rationals are written as integers or 'p/q' strings, got {v!r}")


def _growth(d, basis=None):
    if d is None:
        return None
    kind = d.get("kind")
    if kind == "log":
        return LogGrowth(float(d.get("shift", 0.0)))
    if kind == "linear":
        return LinearGrowth(float(d["slope"]), float(d.get("intercept", 0.0)))
    if kind == "semigroup":
        if basis is None:
            raise SpecError("semigroup growth needs a basis")
        return SemigroupGrowth(tuple(float(g.value(64)) for g in basis))
    raise SpecError(f"unknown growth kind {kind!r}")


def parse_exponents(d: dict):
    kind = d.get("kind")
    if kind == "ordinary":
        return OrdinaryExponents(int(d["n_max"]))
    if kind == "symbolic":
        gens = []
        for g in d["generators"]:
            if isinstance(g, str):
                gens.append(Generator.from_expr(g))
            else:
                gens.append(Generator.from_expr(g["expr"], g.get("label")))
        rows = []
        for r in d["rows"]:
            rows.append({int(l): _frac(v) for l, v in r})
        growth = _growth(d.get("growth"), gens)
        spec = SymbolicExponents(gens, BohrMatrix(rows), growth)
        return spec
    if kind == "explicit":
        return ExplicitExponents([_frac(v) if isinstance(v, str) else v for v in d["values"]], _growth(d.get("growth")))
    raise SpecError(f"unknown exponents kind {kind!r}")


def parse_coefficients(d: dict, size: int):
    kind = d.get("kind")
    if kind == "list":
        vals = [complex(v[0], v[1]) if isinstance(v, list) else complex(v) for v in d["values"]]
        return PolarCoefficients.from_complex(vals)
    if kind == "polar":
        return PolarCoefficients(d["modulus"], d["phase"])
    if kind == "constant":
        v = d.get("value", 1.0)
        return ConstantCoefficients(complex(v[0], v[1]) if isinstance(v, list) else complex(v))
    if kind == "builtin":
        name = d.get("name")
        if name in ("one", "zeta"):
            return ConstantCoefficients(1.0)
        if name == "character":
            return CharacterCoefficients(int(d["q"]), int(d["index"]))
        if name == "euler":
            units = {int(p): (float(m), float(a)) for p, (m, a) in d["units"].items()}
            c = d.get("c", 1.0)
            return EulerCoefficients(complex(c[0], c[1]) if isinstance(c, list) else complex(c), units)
        raise SpecError(f"unknown builtin coefficients {name!r}")
    raise SpecError(f"unknown coefficients kind {kind!r}")


def parse_tail(d: dict, coeff_size):
    kind = d.get("kind")
    if kind == "uniform":
        return UniformBound(float(d["A"]))
    if kind == "finite":
        N = d.get("N", coeff_size)
        if N is None:
            raise SpecError("finite tail needs N or a coefficient list")
        return FiniteSupport(int(N))
    if kind == "listed":
        return ListedBounds(tuple((int(e), float(b)) for e, b in d["blocks"]))
    raise SpecError(f"unknown tail kind {kind!r}")


def parse_series(doc: dict) -> DirichletSeries:
    try:
        spec = parse_exponents(doc["exponents"])
        coeffs = parse_coefficients(doc["coefficients"], spec.size)
        tail = parse_tail(doc.get("tail", {"kind": "uniform", "A": 1.0}), coeffs.size)
        return DirichletSeries(spec, coeffs, tail, doc.get("label", ""))
    except SpecError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SpecError(f"bad series spec: {exc}") from exc


def load_series(path) -> DirichletSeries:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc
    return parse_series(doc)


# ---------------------------------------------------------------------------
# emit


def _growth_json(g):
    return None if g is None else g.to_dict()


def emit_exponents(spec) -> dict:
    if isinstance(spec, OrdinaryExponents):
        return {"kind": "ordinary", "n_max": spec.n_max}
    if isinstance(spec, SymbolicExponents):
        gens = []
        need = spec.matrix.support_size()
        for g in spec.basis[:need]:
            if g.expr is None:
                raise SpecError(f"generator {g.label!r} has no closed form to write")
            gens.append({"label": g.label, "expr": g.expr})
        rows = [[[l, str(v)] for l, v in sorted(spec.matrix.row(n).items())] for n in range(1, spec.size + 1)]
        out = {"kind": "symbolic", "generators": gens, "rows": rows}
        if spec.growth is not None:
            out["growth"] = _growth_json(spec.growth)
        return out
    if isinstance(spec, ExplicitExponents):
        out = {"kind": "explicit", "values": [float(v) for v in spec.values(spec.size)]}
        if spec.growth is not None:
            out["growth"] = _growth_json(spec.growth)
        return out
    raise SpecError(f"cannot write exponents of type {type(spec).__name__}")


def emit_coefficients(coeffs, size: int) -> dict:
    if type(coeffs) is ConstantCoefficients:
        c = coeffs.c
        return {"kind": "builtin", "name": "one"} if c == 1 else {"kind": "constant", "value": [c.real, c.imag]}
    if isinstance(coeffs, CharacterCoefficients):
        return {"kind": "builtin", "name": "character", "q": coeffs.q, "index": coeffs.index}
    if type(coeffs) is EulerCoefficients:
        return {
            "kind": "builtin",
            "name": "euler",
            "c": [coeffs.c.real, coeffs.c.imag],
            "units": {str(p): [m, a] for p, (m, a) in sorted(coeffs.units.items())},
        }
    n = size if coeffs.size is None else min(size, coeffs.size)
    mod, ph = coeffs.polar(1, n + 1)
    return {"kind": "polar", "modulus": [float(x) for x in mod], "phase": [float(x) for x in ph]}


def emit_series(F: DirichletSeries) -> dict:
    tail = F.tail
    if isinstance(tail, UniformBound):
        t = {"kind": "uniform", "A": tail.A}
    elif isinstance(tail, FiniteSupport):
        t = {"kind": "finite", "N": tail.N}
    else:
        t = {"kind": "listed", "blocks": [[e, b] for e, b in tail.blocks]}
    return {
        "label": F.label,
        "exponents": emit_exponents(F.exponents),
        "coefficients": emit_coefficients(F.coefficients, F.size),
        "tail": t,
    }


def canonical_spec(doc: dict) -> str:
    return canonical_json(emit_series(parse_series(doc)))
