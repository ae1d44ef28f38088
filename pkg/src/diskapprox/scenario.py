"""Scenario files: a versioned JSON description of one experiment.

A scenario names the radial weight, the boundary weight, the targets and
the degrees to examine.  Parsing never runs numerics; every problem is
reported as a :class:`ScenarioError` carrying the offending field path and,
when it can be located, the line in the source text.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import DiskApproxError, ScenarioError
from .sets import Arc, CantorPart, CircleSet, FatCantorSpec, FULL_CIRCLE
from .weights import (
    BoundaryWeight,
    CantorIndicator,
    ChordPower,
    Const,
    ExpCusp,
    PowerCusp,
    RadialWeight,
    Zero,
)
from .approx import MeasureSpec, TargetSpec

__all__ = ["SCHEMA", "Scenario", "parse_scenario", "load_scenario", "bundled", "bundled_names",
           "radial_from_dict", "radial_to_dict", "boundary_from_list"]

SCHEMA = "diskapprox-scenario/1"

_RADIAL_KEYS = {
    "power": ("beta",),
    "expdec": ("c",),
    "stretched": ("c", "alpha"),
    "double-exp": ("c",),
    "table": ("x", "m"),
}
_TOP_KEYS = {"schema", "name", "precision", "seed", "G", "w", "targets", "N_list", "witness",
             "annihilator", "variation", "moments", "output", "description"}


@dataclass
class Scenario:
    name: str
    G: RadialWeight | None
    w: BoundaryWeight | None
    targets: list
    N_list: list
    precision: int = 128
    seed: int = 0
    witness: dict | None = None
    annihilator: dict | None = None
    variation: dict | None = None
    moments: dict | None = None
    output: str | None = None
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def measure(self) -> MeasureSpec:
        return MeasureSpec(self.G, self.w)

    def with_overrides(self, precision=None, seed=None) -> "Scenario":
        s = copy.copy(self)
        if precision is not None:
            if precision < 64:
                raise ScenarioError("precision must be at least 64 bits", field="precision")
            s.precision = int(precision)
        if seed is not None:
            s.seed = int(seed)
        return s


# --------------------------------------------------------------------------
# locating fields in the source


class _Locator:
    """Best-effort map from a field path to a line of the JSON text."""

    def __init__(self, text: str | None):
        self.text = text

    def line(self, path) -> int | None:
        if not self.text:
            return None
        pos, found = 0, None
        for key in path:
            if isinstance(key, int):
                continue
            i = self.text.find(f'"{key}"', pos)
            if i < 0:
                break
            pos, found = i, i
        if found is None:
            return None
        return self.text.count("\n", 0, found) + 1


def _path_str(path) -> str:
    out = ""
    for k in path:
        out += f"[{k}]" if isinstance(k, int) else (f".{k}" if out else str(k))
    return out


class _Ctx:
    def __init__(self, locator: _Locator):
        self.loc = locator

    def fail(self, path, message):
        raise ScenarioError(message, field=_path_str(path), line=self.loc.line(path))

    def get(self, d, key, path, kind=None, required=True, default=None):
        if not isinstance(d, dict):
            self.fail(path, "expected an object")
        if key not in d:
            if required:
                self.fail(path + [key], "missing required field")
            return default
        v = d[key]
        if kind is not None and not _is_kind(v, kind):
            self.fail(path + [key], f"expected {_kind_name(kind)}, got {type(v).__name__}")
        return v

    def fraction(self, v, path):
        try:
            if isinstance(v, bool):
                raise ValueError
            return Fraction(v) if isinstance(v, (int, str)) else Fraction(str(v))
        except (ValueError, ZeroDivisionError, TypeError):
            self.fail(path, f"not a number or fraction string: {v!r}")

    def arc(self, v, path) -> Arc:
        if not isinstance(v, list) or len(v) != 2:
            self.fail(path, "an arc is a two-element list [start, end] in turns")
        try:
            return Arc(self.fraction(v[0], path + [0]), self.fraction(v[1], path + [1]))
        except DiskApproxError as e:
            self.fail(path, str(e))


def _is_kind(v, kind):
    if kind is float:
        return isinstance(v, (int, float)) and not isinstance(v, bool)
    if kind is int:
        return isinstance(v, int) and not isinstance(v, bool)
    return isinstance(v, kind)


def _kind_name(kind):
    return {float: "a number", int: "an integer", str: "a string", list: "a list",
            dict: "an object", bool: "a boolean"}.get(kind, str(kind))


# --------------------------------------------------------------------------
# weights


def radial_from_dict(d: dict, ctx: _Ctx | None = None, path=None) -> RadialWeight:
    ctx = ctx or _Ctx(_Locator(None))
    path = path or ["G"]
    fam = ctx.get(d, "family", path, str)
    if fam not in _RADIAL_KEYS:
        ctx.fail(path + ["family"], f"unknown radial family {fam!r}; expected one of "
                 + ", ".join(sorted(_RADIAL_KEYS)))
    norm = ctx.get(d, "normalize", path, bool, required=False, default=True)
    args = {}
    for key in _RADIAL_KEYS[fam]:
        args[key] = ctx.get(d, key, path, list if fam == "table" else float)
    extra = set(d) - set(_RADIAL_KEYS[fam]) - {"family", "normalize"}
    if extra:
        ctx.fail(path + [sorted(extra)[0]], f"field not used by family {fam!r}")
    try:
        if fam == "table":
            return RadialWeight.table(args["x"], args["m"], normalize=norm)
        return RadialWeight(fam, normalize=norm, **{k: float(v) for k, v in args.items()})
    except DiskApproxError as e:
        ctx.fail(path, str(e))


def radial_to_dict(G: RadialWeight) -> dict:
    d = {"family": G.family}
    if G.family == "table":
        d.update(x=list(G.table_x), m=list(G.table_m))
    else:
        for key in _RADIAL_KEYS[G.family]:
            d[key] = getattr(G, key)
    d["normalize"] = G.normalize
    return d


def _cantor_spec(d: dict, ctx: _Ctx, path) -> FatCantorSpec:
    base = ctx.arc(d["base"], path + ["base"]) if "base" in d else FULL_CIRCLE
    schedule = ctx.get(d, "schedule", path, str, required=False, default="telescoping")
    param = ctx.fraction(d.get("parameter", "1/2"), path + ["parameter"])
    try:
        return FatCantorSpec(base, schedule, param)
    except DiskApproxError as e:
        ctx.fail(path, str(e))


def _profile(d: dict, ctx: _Ctx, path):
    kind = ctx.get(d, "kind", path, str)
    try:
        if kind == "zero":
            return Zero()
        if kind == "const":
            return Const(float(ctx.get(d, "v", path, float)))
        if kind in ("power-cusp", "exp-cusp", "chord-power"):
            cls = {"power-cusp": PowerCusp, "exp-cusp": ExpCusp, "chord-power": ChordPower}[kind]
            return cls(float(ctx.get(d, "t0", path, float, required=False, default=0.0)),
                       float(ctx.get(d, "exponent", path, float)),
                       float(ctx.get(d, "scale", path, float, required=False, default=1.0)))
        if kind == "cantor-indicator":
            return CantorIndicator(_cantor_spec(d, ctx, path),
                                   float(ctx.get(d, "v", path, float, required=False, default=1.0)),
                                   ctx.get(d, "stage", path, int, required=False, default=20))
    except DiskApproxError as e:
        ctx.fail(path, str(e))
    ctx.fail(path + ["kind"], f"unsupported profile kind {kind!r}")


def boundary_from_list(pieces: list, ctx: _Ctx | None = None, path=None) -> BoundaryWeight:
    ctx = ctx or _Ctx(_Locator(None))
    path = path or ["w"]
    if not isinstance(pieces, list) or not pieces:
        ctx.fail(path, "expected a nonempty list of pieces")
    out = []
    for i, p in enumerate(pieces):
        arc = ctx.arc(p["arc"], path + [i, "arc"]) if isinstance(p, dict) and "arc" in p else FULL_CIRCLE
        out.append((arc, _profile(p, ctx, path + [i])))
    try:
        return BoundaryWeight(tuple(out))
    except DiskApproxError as e:
        ctx.fail(path, str(e))


# --------------------------------------------------------------------------
# targets and lists


def _target(d: dict, ctx: _Ctx, path) -> TargetSpec:
    kind = ctx.get(d, "kind", path, str)
    label = ctx.get(d, "label", path, str, required=False, default="")
    if kind == "zero":
        return TargetSpec.zero()
    if kind == "coefficients":
        raw = ctx.get(d, "coefficients", path, dict)
        coeffs = {}
        for k, v in raw.items():
            try:
                idx = int(k)
            except ValueError:
                ctx.fail(path + ["coefficients", k], "coefficient keys are integers")
            if _is_kind(v, float):
                coeffs[idx] = complex(v)
            elif isinstance(v, list) and len(v) == 2 and all(_is_kind(x, float) for x in v):
                coeffs[idx] = complex(v[0], v[1])
            else:
                ctx.fail(path + ["coefficients", k], "coefficient is a number or [re, im]")
        return TargetSpec.from_coefficients(coeffs, label)
    if kind == "indicator":
        arcs = [ctx.arc(a, path + ["arcs", i]) for i, a in enumerate(d.get("arcs", []))]
        parts = []
        for i, c in enumerate(d.get("cantor", [])):
            p = path + ["cantor", i]
            parts.append(CantorPart(_cantor_spec(c, ctx, p),
                                    ctx.get(c, "stage", p, int, required=False, default=20)))
        try:
            S = CircleSet(arcs=tuple(arcs), cantor_parts=tuple(parts))
        except DiskApproxError as e:
            ctx.fail(path, str(e))
        return TargetSpec.indicator(S, label)
    ctx.fail(path + ["kind"], f"unsupported target kind {kind!r}")


def _N_list(v, ctx: _Ctx, path) -> list:
    if isinstance(v, dict):
        start = ctx.get(v, "start", path, int)
        stop = ctx.get(v, "stop", path, int)
        step = ctx.get(v, "step", path, int, required=False, default=1)
        if step <= 0:
            ctx.fail(path + ["step"], "step must be positive")
        v = list(range(start, stop + 1, step))
    if not isinstance(v, list) or not all(_is_kind(n, int) and n >= 0 for n in v):
        ctx.fail(path, "expected a list of nonnegative integers or {start, stop, step}")
    return sorted(set(v))


def _section(d, key, ctx, defaults: dict, path=None):
    path = path or [key]
    v = d.get(key)
    if v is None:
        return None
    if not isinstance(v, dict):
        ctx.fail(path, "expected an object or null")
    out = dict(defaults)
    for k, val in v.items():
        if k not in defaults:
            ctx.fail(path + [k], "unknown field")
        out[k] = val
    return out


# --------------------------------------------------------------------------
# entry points


def parse_scenario(data: dict | str, text: str | None = None) -> Scenario:
    """Build a :class:`Scenario` from parsed JSON (or JSON text)."""
    if isinstance(data, str):
        text = data
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ScenarioError(f"invalid JSON: {e.msg}", line=e.lineno) from None
    ctx = _Ctx(_Locator(text))
    if not isinstance(data, dict):
        ctx.fail([], "a scenario is a JSON object")
    schema = ctx.get(data, "schema", [], str)
    if schema != SCHEMA:
        ctx.fail(["schema"], f"unsupported schema {schema!r}; expected {SCHEMA!r}")
    unknown = sorted(set(data) - _TOP_KEYS)
    if unknown:
        ctx.fail([unknown[0]], "unknown field")
    name = ctx.get(data, "name", [], str)
    precision = ctx.get(data, "precision", [], int, required=False, default=128)
    if precision < 64:
        ctx.fail(["precision"], "precision must be at least 64 bits")
    seed = ctx.get(data, "seed", [], int, required=False, default=0)
    if seed < 0:
        ctx.fail(["seed"], "seed must be nonnegative")

    G = data.get("G")
    G = None if G is None else radial_from_dict(G, ctx, ["G"])
    w = data.get("w")
    w = None if w is None else boundary_from_list(w, ctx, ["w"])
    if G is None and w is None:
        ctx.fail(["G"], "at least one of G and w must be given")

    targets = [_target(t, ctx, ["targets", i]) for i, t in enumerate(ctx.get(data, "targets", [], list))]
    labels = [t.label for t in targets]
    if len(set(labels)) != len(labels):
        ctx.fail(["targets"], "target labels must be unique")
    N_list = _N_list(data.get("N_list", []), ctx, ["N_list"])

    witness = _section(data, "witness", ctx, {"N": [10, 100, 1000], "refine": 4})
    if witness is not None:
        if not isinstance(witness["N"], list) or not all(_is_kind(n, float) and n > 0 for n in witness["N"]):
            ctx.fail(["witness", "N"], "expected a list of positive numbers")
        if G is None or w is None:
            ctx.fail(["witness"], "witness families need both G and w")
    ann = _section(data, "annihilator", ctx, {"arc": None, "N_max": 200, "boxes": 64, "resolution": 64})
    if ann is not None:
        ann["arc"] = ctx.arc(ann["arc"], ["annihilator", "arc"]) if ann["arc"] is not None else FULL_CIRCLE
        if not _is_kind(ann["N_max"], int) or ann["N_max"] < 1:
            ctx.fail(["annihilator", "N_max"], "expected a positive integer")
        if G is None:
            ctx.fail(["annihilator"], "an annihilator needs a disk part")
    var = _section(data, "variation", ctx, {"families": 500, "max_arcs": 50, "radii": [0, 0.9, 0.99, 0.999]})
    mom = _section(data, "moments", ctx, {"N": None, "P_grid": []})
    if mom is not None and G is None:
        ctx.fail(["moments"], "moments need a disk part")
    out = ctx.get(data, "output", [], str, required=False, default=None)
    return Scenario(name, G, w, targets, N_list, precision, seed, witness, ann, var, mom, out, data)


def load_scenario(path) -> Scenario:
    """Parse a scenario file or the name of a bundled scenario."""
    p = Path(path)
    if not p.exists() and str(path) in bundled_names():
        return bundled(str(path))
    try:
        text = p.read_text()
    except OSError as e:
        raise ScenarioError(f"cannot read scenario: {e.strerror}") from None
    return parse_scenario(text)


def bundled_names() -> list:
    root = resources.files("diskapprox") / "scenarios"
    return sorted(f.name[:-5] for f in root.iterdir() if f.name.endswith(".json"))


def bundled(name: str) -> Scenario:
    f = resources.files("diskapprox") / "scenarios" / f"{name}.json"
    if not f.is_file():
        raise ScenarioError(f"no bundled scenario named {name!r}")
    return parse_scenario(f.read_text())
