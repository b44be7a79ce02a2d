"""Text and JSON serialization of divisors, reports and theorem data."""

from __future__ import annotations

import dataclasses
import json
import re
from fractions import Fraction

from .downgrade import Section
from .exactmath import as_rat, format_rat
from .poly import MultiPoly, parse_poly
from .segdiv import Segment, SegmentalDivisor
from .surface import SurfaceModel, blowup_model, fan_from_weights, fan_model
from .threefold import TheoremData

BASE = ("u", "v")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


class FormatError(ValueError):
    pass


def _rat(text: str, lineno: int) -> Fraction:
    try:
        return as_rat(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"line {lineno}: bad rational {text!r}") from exc


def _int(text: str, lineno: int) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise FormatError(f"line {lineno}: bad integer {text!r}") from exc


def _build_model(kind: str, d: int | None, rays: dict, curves: dict) -> SurfaceModel:
    curve_polys = {n: parse_poly(h, BASE) if isinstance(h, str) else h for n, h in curves.items()}
    for n, h in curve_polys.items():
        if h.variables != BASE:
            raise FormatError(f"curve {n} may only use the variables u and v")
    if kind == "blowup":
        return blowup_model(d, {tuple(r): n for n, r in rays.items()} or None, curve_polys)
    if not rays:
        raise FormatError("a fan model needs at least one ray")
    fan = fan_from_weights(list(rays.values()))
    if sorted(fan.rays) != sorted(tuple(r) for r in rays.values()):
        raise FormatError("fan rays must be primitive and distinct")
    return fan_model(fan, {tuple(r): n for n, r in rays.items()}, curve_polys)


def parse_divisor(text: str) -> SegmentalDivisor:
    """Read the line-oriented divisor format (``model``/``divisor``/``seg``)."""
    kind, d = None, None
    rays: dict[str, tuple[int, int]] = {}
    curves: dict[str, str] = {}
    segs: dict[str, Segment] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        head = words[0]
        if head == "model":
            if kind is not None:
                raise FormatError(f"line {lineno}: repeated model line")
            if words[1:2] == ["fan"] and len(words) == 2:
                kind = "fan"
            elif words[1:2] == ["blowup"] and len(words) == 3 and words[2].startswith("d="):
                kind, d = "blowup", _int(words[2][2:], lineno)
            else:
                raise FormatError(f"line {lineno}: expected 'model blowup d=N' or 'model fan'")
        elif head == "divisor":
            if len(words) < 3 or not _NAME.match(words[1]):
                raise FormatError(f"line {lineno}: expected 'divisor NAME ray A B' or 'divisor NAME curve POLY'")
            name = words[1]
            if name in rays or name in curves:
                raise FormatError(f"line {lineno}: divisor {name} declared twice")
            if words[2] == "ray" and len(words) == 5:
                rays[name] = (_int(words[3], lineno), _int(words[4], lineno))
            elif words[2] == "curve" and len(words) >= 4:
                curves[name] = line.split(None, 3)[3]
            else:
                raise FormatError(f"line {lineno}: expected 'divisor NAME ray A B' or 'divisor NAME curve POLY'")
        elif head == "seg":
            if len(words) != 4:
                raise FormatError(f"line {lineno}: expected 'seg NAME LO HI'")
            if words[1] in segs:
                raise FormatError(f"line {lineno}: segment for {words[1]} given twice")
            lo, hi = _rat(words[2], lineno), _rat(words[3], lineno)
            if lo > hi:
                raise FormatError(f"line {lineno}: segment has lo > hi")
            segs[words[1]] = Segment(lo, hi)
        else:
            raise FormatError(f"line {lineno}: unknown directive {head!r}")
    if kind is None:
        raise FormatError("missing model line")
    try:
        model = _build_model(kind, d, rays, curves)
        return SegmentalDivisor.of(model, segs)
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def _model_kind(model: SurfaceModel) -> str:
    return "blowup" if model.blowup_d is not None else "fan"


def format_divisor(d: SegmentalDivisor) -> str:
    model = d.model
    lines = [f"model blowup d={model.blowup_d}" if model.blowup_d else "model fan"]
    for name, ray in model.toric:
        lines.append(f"divisor {name} ray {ray[0]} {ray[1]}")
    for name, h in model.curves:
        lines.append(f"divisor {name} curve {h}")
    for name, seg in d.terms:
        lines.append(f"seg {name} {format_rat(seg.lo)} {format_rat(seg.hi)}")
    return "\n".join(lines) + "\n"


def divisor_to_json(d: SegmentalDivisor) -> dict:
    model = d.model
    return {
        "model": {"kind": _model_kind(model), "d": model.blowup_d},
        "divisors": [{"name": n, "ray": list(r)} for n, r in model.toric]
                    + [{"name": n, "curve": str(h)} for n, h in model.curves],
        "terms": [{"name": n, "lo": format_rat(s.lo), "hi": format_rat(s.hi)} for n, s in d.terms],
        "text": str(d),
    }


def divisor_from_json(obj: dict) -> SegmentalDivisor:
    try:
        head = obj["model"]
        rays = {e["name"]: tuple(e["ray"]) for e in obj["divisors"] if "ray" in e}
        curves = {e["name"]: e["curve"] for e in obj["divisors"] if "curve" in e}
        model = _build_model(head["kind"], head.get("d"), rays, curves)
        terms = {t["name"]: Segment(as_rat(t["lo"]), as_rat(t["hi"])) for t in obj["terms"]}
        return SegmentalDivisor.of(model, terms)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed divisor JSON: {exc}") from exc
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def read_divisor(path: str) -> SegmentalDivisor:
    """Load a divisor from a text file, or from JSON when the file starts with ``{``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from exc
        return divisor_from_json(obj.get("divisor", obj))
    return parse_divisor(text)


def dumps(obj) -> str:
    """Stable JSON: sorted keys, two-space indent, rationals as strings."""
    return json.dumps(jsonable(obj), sort_keys=True, indent=2)


def jsonable(obj):
    if isinstance(obj, Fraction):
        return format_rat(obj)
    if isinstance(obj, SegmentalDivisor):
        return divisor_to_json(obj)
    if isinstance(obj, (MultiPoly, Segment)):
        return str(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        return out
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [jsonable(x) for x in obj]
        return sorted(items) if isinstance(obj, (set, frozenset)) else items
    return obj


def theorem_data_from_json(obj: dict) -> TheoremData:
    """``{"weights", "section", "f", "g", "param_f", "param_g", "mu_weights"}``;
    polynomials are strings, parametrizations pairs of strings in ``t``."""
    try:
        t = ("t",)
        return TheoremData(
            weights=tuple(int(a) for a in obj["weights"]),
            section=Section(tuple(obj["section"])),
            f=parse_poly(obj["f"], BASE),
            g=parse_poly(obj["g"], BASE),
            param_f=tuple(parse_poly(p, t) for p in obj["param_f"]),
            param_g=tuple(parse_poly(p, t) for p in obj["param_g"]),
            mu_weights=tuple(int(w) for w in obj["mu_weights"]),
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed theorem data: {exc}") from exc
