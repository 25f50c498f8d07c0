"""JSON model files and report encoding.

Rationals are written as ``"p/q"`` strings (integers as ``"n"``) and read
from strings or JSON integers.  Effects are flat lists ``[c, v_1, ..., v_d]``.
Model layout::

    {"state_space": {"type": "polytope", "vertices": [[...], ...]}
                  | {"type": "ball", "dim": n},
     "meters": {"name": [[c, v...], ...]},
     "effect_restrictions": {"name": [[c, v...], ...]},
     "restrictions": {"name": {"kind": "sim", "generators": ["meter", ...]}
                            | {"kind": "effects", "generators": "er-name" or [[c, v...], ...]}
                            | {"kind": "noise", "t": "1/2"}},
     "states": {"name": [x...]}}
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .core import Ball, Effect, Meter, Polytope, StateSpace, meter_violations
from .errors import GptError, ValidationError
from .numerics import FarkasCertificate
from .numerics.surd import from_json_number, to_json_number
from .restrictions import EffectRestriction, MeterRestriction
from .simulation import PostProcessing


class ModelError(GptError):
    """A model file that cannot be parsed, with its location."""

    def __init__(self, path: str, pointer: str, reason: str):
        super().__init__(f"{path}: {pointer or '/'}: {reason}")
        self.path = path
        self.pointer = pointer
        self.reason = reason


def rational(x) -> str:
    return str(Fraction(x))


def parse_rational(v, where: str = "", path: str = "<model>") -> Fraction:
    if isinstance(v, bool):
        raise ModelError(path, where, "expected a rational, got a boolean")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(repr(v))
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise ModelError(path, where, f"cannot parse {v!r} as a rational") from None
    raise ModelError(path, where, f"expected a rational, got {type(v).__name__}")


def effect_to_json(e: Effect) -> list[str]:
    return [rational(x) for x in e.vector]


def effect_from_json(v, d: int, where: str = "", path: str = "<model>") -> Effect:
    if not isinstance(v, list):
        raise ModelError(path, where, "an effect is a list [c, v_1, ..., v_d]")
    if len(v) != d + 1:
        raise ModelError(path, where, f"effect has {len(v)} entries, expected {d + 1}")
    return Effect.from_vector([parse_rational(x, f"{where}/{i}", path) for i, x in enumerate(v)])


def meter_to_json(m: Meter) -> list[list[str]]:
    return [effect_to_json(e) for e in m.effects]


def space_to_json(space: StateSpace) -> dict:
    if isinstance(space, Ball):
        return {"type": "ball", "dim": space.d}
    return {"type": "polytope", "vertices": [[rational(x) for x in v] for v in space.vertices]}


def space_from_json(v, path: str = "<model>") -> StateSpace:
    where = "/state_space"
    if not isinstance(v, dict) or "type" not in v:
        raise ModelError(path, where, "missing state space descriptor with a 'type'")
    if v["type"] == "ball":
        dim = v.get("dim")
        if not isinstance(dim, int) or dim < 1:
            raise ModelError(path, where + "/dim", "ball dimension must be a positive integer")
        return Ball(dim)
    if v["type"] == "polytope":
        verts = v.get("vertices")
        if not isinstance(verts, list) or not verts:
            raise ModelError(path, where + "/vertices", "need a nonempty vertex list")
        pts = []
        for i, p in enumerate(verts):
            if not isinstance(p, list):
                raise ModelError(path, f"{where}/vertices/{i}", "a vertex is a list of coordinates")
            pts.append([parse_rational(x, f"{where}/vertices/{i}/{j}", path) for j, x in enumerate(p)])
        try:
            return Polytope(pts)
        except (ValidationError, ValueError) as exc:
            raise ModelError(path, where + "/vertices", str(exc)) from None
    raise ModelError(path, where + "/type", f"unknown state space type {v['type']!r}")


def pp_to_json(nu: PostProcessing) -> list[list[str]]:
    return [[rational(x) for x in row] for row in nu.matrix]


def pp_from_json(v) -> PostProcessing:
    return PostProcessing(tuple(tuple(Fraction(x) for x in row) for row in v))


def farkas_to_json(c: FarkasCertificate) -> dict:
    return {"y_eq": [rational(x) for x in c.y_eq], "y_ub": [rational(x) for x in c.y_ub]}


def farkas_from_json(v) -> FarkasCertificate:
    return FarkasCertificate(tuple(Fraction(x) for x in v["y_eq"]), tuple(Fraction(x) for x in v["y_ub"]))


number_to_json = to_json_number
number_from_json = from_json_number


@dataclass
class Model:
    path: str
    space: StateSpace
    meters: dict[str, Meter] = field(default_factory=dict)
    meter_problems: dict[str, list[str]] = field(default_factory=dict)
    effect_restrictions: dict[str, EffectRestriction] = field(default_factory=dict)
    restrictions: dict[str, MeterRestriction] = field(default_factory=dict)
    restriction_problems: dict[str, list[str]] = field(default_factory=dict)
    states: dict[str, tuple[Fraction, ...]] = field(default_factory=dict)

    def meter(self, name: str) -> Meter:
        if name not in self.meters:
            raise ModelError(self.path, f"/meters/{name}", "no such meter")
        problems = self.meter_problems.get(name)
        if problems:
            raise ValidationError(f"meter {name!r} is invalid: " + "; ".join(problems), problems)
        return self.meters[name]

    def restriction(self, name: str) -> MeterRestriction:
        if name not in self.restrictions and name not in self.restriction_problems:
            raise ModelError(self.path, f"/restrictions/{name}", "no such restriction")
        problems = self.restriction_problems.get(name)
        if problems:
            raise ValidationError(f"restriction {name!r} is invalid: " + "; ".join(problems), problems)
        return self.restrictions[name]


def load_model(path) -> Model:
    """Parse a model file; structural problems raise :class:`ModelError`.

    Meters that parse but break normalization or validity are kept with
    their violation messages so that ``validate`` can report them.
    """
    path = str(path)
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ModelError(path, "", f"cannot read file: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ModelError(path, "", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return model_from_dict(raw, path)


def model_from_dict(raw, path: str = "<model>") -> Model:
    if not isinstance(raw, dict):
        raise ModelError(path, "", "top level must be an object")
    space = space_from_json(raw.get("state_space"), path)
    d = space.d
    model = Model(path, space)
    for name, effs in _section(raw, "meters", path).items():
        where = f"/meters/{name}"
        if not isinstance(effs, list) or not effs:
            raise ModelError(path, where, "a meter is a nonempty list of effects")
        effects = tuple(effect_from_json(e, d, f"{where}/{i}", path) for i, e in enumerate(effs))
        problems = meter_violations(space, effects)
        model.meters[name] = Meter(space, effects, check=False)
        if problems:
            model.meter_problems[name] = problems
    for name, effs in _section(raw, "effect_restrictions", path).items():
        where = f"/effect_restrictions/{name}"
        if not isinstance(effs, list) or not effs:
            raise ModelError(path, where, "an effect restriction is a nonempty list of effects")
        gens = tuple(effect_from_json(e, d, f"{where}/{i}", path) for i, e in enumerate(effs))
        model.effect_restrictions[name] = EffectRestriction(space, gens)
    for name, desc in _section(raw, "states", path).items():
        where = f"/states/{name}"
        if not isinstance(desc, list) or len(desc) != d:
            raise ModelError(path, where, f"a state is a list of {d} coordinates")
        x = tuple(parse_rational(c, f"{where}/{i}", path) for i, c in enumerate(desc))
        if not space.contains(x):
            raise ModelError(path, where, "point lies outside the state space")
        model.states[name] = x
    for name, desc in _section(raw, "restrictions", path).items():
        _load_restriction(model, name, desc, path)
    return model


def _section(raw: dict, key: str, path: str) -> dict:
    sec = raw.get(key, {})
    if not isinstance(sec, dict):
        raise ModelError(path, f"/{key}", "expected an object keyed by name")
    return sec


def _load_restriction(model: Model, name: str, desc, path: str) -> None:
    where = f"/restrictions/{name}"
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ModelError(path, where, "restriction descriptor needs a 'kind'")
    kind = desc["kind"]
    space = model.space
    if kind == "sim":
        names = desc.get("generators")
        if not isinstance(names, list) or not names:
            raise ModelError(path, where + "/generators", "list the generator meter names")
        missing = [n for n in names if n not in model.meters]
        if missing:
            raise ModelError(path, where + "/generators", f"unknown meters {missing}")
        problems = [f"generator {n!r}: {p}" for n in names for p in model.meter_problems.get(n, [])]
        if problems:
            model.restriction_problems[name] = problems
            return
        model.restrictions[name] = MeterRestriction.by_simulation([model.meters[n] for n in names])
    elif kind == "effects":
        gens = desc.get("generators")
        if isinstance(gens, str):
            if gens not in model.effect_restrictions:
                raise ModelError(path, where + "/generators", f"unknown effect restriction {gens!r}")
            er = model.effect_restrictions[gens]
        elif isinstance(gens, list) and gens:
            er = EffectRestriction(space, tuple(
                effect_from_json(e, space.d, f"{where}/generators/{i}", path) for i, e in enumerate(gens)))
        else:
            raise ModelError(path, where + "/generators", "name an effect restriction or list effects")
        model.restrictions[name] = MeterRestriction.by_effects(er)
    elif kind == "noise":
        t = parse_rational(desc.get("t"), where + "/t", path)
        if not 0 <= t <= 1:
            raise ModelError(path, where + "/t", "t must lie in [0, 1]")
        model.restrictions[name] = MeterRestriction.noise(space, t)
    else:
        raise ModelError(path, where + "/kind", f"unknown restriction kind {kind!r}")


def dumps(report: dict) -> str:
    """Deterministic JSON rendering of a report."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False)


__all__ = [
    "Model",
    "ModelError",
    "dumps",
    "effect_from_json",
    "effect_to_json",
    "farkas_from_json",
    "farkas_to_json",
    "load_model",
    "meter_to_json",
    "model_from_dict",
    "number_from_json",
    "number_to_json",
    "parse_rational",
    "pp_from_json",
    "pp_to_json",
    "space_from_json",
    "space_to_json",
]
