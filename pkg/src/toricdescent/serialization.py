"""JSON loaders and writers.  Rationals are always written as strings."""

from __future__ import annotations

import json
from dataclasses import fields, is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from .cone_monoid import AffineMonoid, Cone, affine_monoid, cone, monoid_from_cone
from .exact_geometry import Polytope, convex_hull
from .hochschild import Chain
from .lambda_ring import SLOTS, BasisMonomial, DescentInstance, build_instance
from .rational import format_rational, parse_integer, parse_rational


class InputError(ValueError):
    """Malformed input file or value."""


def load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def to_jsonable(obj: Any) -> Any:
    """Convert results to plain JSON values with deterministic ordering."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj if abs(obj) < 2 ** 53 else str(obj)
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, BasisMonomial):
        return {"slot": obj.slot, "point": [to_jsonable(x) for x in obj.point], "degree": to_jsonable(obj.degree)}
    if isinstance(obj, Polytope):
        return {"vertices": [to_jsonable(v) for v in obj.vertices],
                "facets": [{"normal": to_jsonable(a), "offset": to_jsonable(b)} for a, b in obj.facets],
                "dim": obj.dim}
    if isinstance(obj, Cone):
        return {"rays": [to_jsonable(r) for r in obj.rays]}
    if isinstance(obj, AffineMonoid):
        return {"generators": [to_jsonable(g) for g in obj.generators]}
    if is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k) if isinstance(k, str) else json.dumps(to_jsonable(k), sort_keys=True): to_jsonable(v)
                for k, v in obj.items()}
    if isinstance(obj, (frozenset, set)):
        items = [to_jsonable(x) for x in obj]
        return sorted(items, key=lambda x: json.dumps(x, sort_keys=True))
    if isinstance(obj, (list, tuple)):
        if obj and all(isinstance(x, bool) for x in obj):
            return "".join("+" if x else "-" for x in obj)
        return [to_jsonable(x) for x in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path: str | Path, obj: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


# ---------------------------------------------------------------------------
# domain loaders


def _points(data, key: str) -> list:
    if isinstance(data, dict):
        for k in (key, "points", "vertices", "rays", "generators"):
            if k in data:
                data = data[k]
                break
        else:
            raise InputError(f"missing '{key}'")
    if not isinstance(data, list) or not data or not all(isinstance(p, list) for p in data):
        raise InputError("expected a nonempty list of points")
    if len({len(p) for p in data}) != 1:
        raise InputError("points have different lengths")
    return data


def parse_points(data, key: str = "points") -> list[tuple[Fraction, ...]]:
    try:
        return [tuple(parse_rational(x) for x in p) for p in _points(data, key)]
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def parse_int_points(data, key: str = "rays") -> list[tuple[int, ...]]:
    try:
        return [tuple(parse_integer(x) for x in p) for p in _points(data, key)]
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def load_polytope(data) -> Polytope:
    return convex_hull(parse_points(data, "vertices"))


def load_cone(data) -> Cone:
    return cone(parse_int_points(data, "rays"))


def load_monoid(data) -> AffineMonoid:
    """``{"generators": …}`` or ``{"cone": …}`` (the normal monoid C ∩ ℤⁿ)."""
    if isinstance(data, dict) and "cone" in data:
        return monoid_from_cone(cone(parse_int_points(data["cone"])))
    return affine_monoid(parse_int_points(data, "generators"))


def load_instance(data, i: int | None = None, s: int | None = None,
                  t=None) -> DescentInstance:
    """Instance file: N, M (monoids), D, Dprime (cones), v, t, i, s."""
    if not isinstance(data, dict):
        raise InputError("instance must be a JSON object")
    missing = [k for k in ("N", "M", "D", "Dprime", "v", "t") if k not in data]
    if missing:
        raise InputError(f"instance is missing {missing}")
    try:
        N = load_monoid(data["N"])
        M = load_monoid(data["M"])
        D = load_cone(data["D"])
        Dp = load_cone(data["Dprime"])
        v = [parse_rational(x) for x in data["v"]]
        tt = [parse_integer(x) for x in (t if t is not None else data["t"])]
        ii = int(i if i is not None else data.get("i", 1))
        ss = int(s if s is not None else data.get("s", 2))
    except (TypeError, KeyError) as exc:
        raise InputError(str(exc)) from exc
    return build_instance(N, M, D, Dp, v, tt, ii, ss)


def load_chain(data, inst: DescentInstance) -> Chain:
    if not isinstance(data, list):
        raise InputError("chain must be a list of terms")
    out: Chain = {}
    for term in data:
        try:
            coeff = parse_rational(term["coeff"])
            factors = []
            for f in term["factors"]:
                if f["slot"] not in SLOTS:
                    raise InputError(f"unknown slot {f['slot']}")
                factors.append(inst.monomial(f["slot"], [parse_integer(x) for x in f["point"]]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad chain term {term!r}") from exc
        key = tuple(factors)
        val = out.get(key, 0) + coeff
        if val:
            out[key] = val
        else:
            out.pop(key, None)
    return out


def dump_chain(z: Chain) -> list:
    terms = sorted(z.items(), key=lambda kv: tuple(f.sort_key() for f in kv[0]))
    return [{"coeff": format_rational(c),
             "factors": [{"slot": f.slot, "point": [to_jsonable(x) for x in f.point]} for f in t]}
            for t, c in terms]
