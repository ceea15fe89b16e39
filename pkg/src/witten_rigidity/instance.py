"""JSON instance files: schema, parsing and canonical serialization.

Numbers that feed the high-precision engines (pairings, tau, t) are decimal
strings so they are parsed at the configured precision, never via binary
floats. Variables default to degree 2; the odd variable of ``E`` has degree 1.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from .bundles import WeightedSummand
from .errors import InstanceError, RigidityError
from .genus import ManifoldData
from .jets import IntegrationFunctional
from .model import CaseSelector, EquivariantData, FixedComponent, OddEData
from .precision import PrecisionConfig, Tau, parse_complex, working_precision
from .qseries import DEFAULT_TRUNCATION

_DECIMAL = {"type": "string", "pattern": r"^[+-]?([0-9]+\.?[0-9]*|\.[0-9]+)([eE][+-]?[0-9]+)?$"}
_NUMBER = {"oneOf": [{"type": "integer"}, _DECIMAL]}
_COMPLEX = {"type": "string", "minLength": 1}
_NAME = {"type": "string", "pattern": r"^[A-Za-z_][A-Za-z0-9_]*$"}
_EXPR = {"type": "string", "minLength": 1}

_FUNCTIONAL = {
    "type": "object",
    "additionalProperties": False,
    "required": ["top_degree"],
    "properties": {
        "top_degree": {"type": "integer", "minimum": 0},
        "pairings": {"type": "object", "additionalProperties": _NUMBER},
    },
}

_GROUP = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "root_names": {"type": "array", "items": _EXPR},
    },
}


def _group(rot_key: str, count_key: str) -> dict:
    g = json.loads(json.dumps(_GROUP))
    g["required"] = [rot_key]
    g["properties"][rot_key] = {"type": "integer"}
    g["properties"][count_key] = {"type": "integer", "minimum": 1}
    return g


SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "theta-rigidity instance",
    "type": "object",
    "additionalProperties": False,
    "required": ["case", "components"],
    "properties": {
        "name": {"type": "string"},
        "case": {
            "type": "object",
            "additionalProperties": False,
            "required": ["dimension_class", "lambda", "k"],
            "properties": {
                "dimension_class": {"enum": ["4k", "4k+2", "4k-1", "4k+1"]},
                "lambda": {"enum": [1, 2, 3, "all"]},
                "e_lambda": {"enum": [1, 2, 3, "all"]},
                "k": {"type": "integer", "minimum": 0},
            },
        },
        "precision": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "digits": {"type": "integer", "minimum": 15},
                "q_order": {"type": "integer", "minimum": 0},
            },
        },
        "evaluation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"tau": _COMPLEX, "t": _COMPLEX},
        },
        "variables": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 1}},
        "components": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["s", "sigma", "functional"],
                "properties": {
                    "name": {"type": "string"},
                    "s": {"type": "integer", "minimum": 0},
                    "tangent_roots": {"type": "array", "items": _EXPR},
                    "normal": {"type": "array", "items": _group("m", "mult")},
                    "V": {"type": "array", "items": _group("n", "pairs")},
                    "sigma": {"type": "integer"},
                    "u_name": _EXPR,
                    "functional": _FUNCTIONAL,
                },
            },
        },
        "E": {
            "type": "object",
            "additionalProperties": False,
            "required": ["N", "odd_variable", "trace_components"],
            "properties": {
                "N": {"type": "integer", "minimum": 2, "multipleOf": 2},
                "odd_variable": _NAME,
                "c3_is_zero": {"type": "boolean"},
                "trace_components": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["w", "a"],
                        "properties": {"w": _EXPR, "a": _EXPR},
                    },
                },
            },
        },
        "manifold": {
            "type": "object",
            "additionalProperties": False,
            "required": ["dim", "functional"],
            "properties": {
                "dim": {"type": "integer", "minimum": 1},
                "tangent_roots": {"type": "array", "items": _EXPR},
                "line_root": _EXPR,
                "V": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["root"],
                        "properties": {"root": _EXPR, "pairs": {"type": "integer", "minimum": 1}},
                    },
                },
                "functional": _FUNCTIONAL,
            },
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)

DEFAULT_TAU = "0.3+0.8i"
DEFAULT_T = "0.21+0.13i"


@dataclass
class Instance:
    """A parsed instance plus the raw canonical document it came from."""

    data: EquivariantData
    cfg: PrecisionConfig
    q_order: int
    tau: Tau
    t: object
    manifold: ManifoldData | None
    document: dict

    @property
    def name(self) -> str:
        return self.data.name


def _decimal(value) -> str:
    return str(value)


def _functional(doc: dict) -> IntegrationFunctional:
    pairings = {m: _decimal(v) for m, v in doc.get("pairings", {}).items()}
    return IntegrationFunctional(doc["top_degree"], pairings)


def _groups(items, rot_key, count_key) -> tuple:
    out = []
    for g in items:
        count = g.get(count_key, 1)
        roots = g.get("root_names", ["0"] * count)
        if len(roots) != count:
            raise InstanceError(f"{count_key}={count} but {len(roots)} root_names given")
        for r in roots:
            out.append(WeightedSummand(r, g[rot_key], 1))
    # merge identical (root, rotation) lines into one summand with multiplicity
    merged: dict = {}
    for s in out:
        merged[(s.root, s.rotation)] = merged.get((s.root, s.rotation), 0) + 1
    return tuple(WeightedSummand(r, m, c) for (r, m), c in merged.items())


def _format_errors(errors) -> str:
    lines = []
    for err in errors:
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        lines.append(f"  at {where}: {err.message}")
    return "\n".join(lines)


def validate_document(doc) -> None:
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        raise InstanceError("instance failed schema validation:\n" + _format_errors(errors))


def parse_instance(doc: dict) -> Instance:
    """Validate and build an :class:`Instance` from a decoded JSON document."""
    validate_document(doc)
    prec = doc.get("precision", {})
    cfg = PrecisionConfig(digits=prec.get("digits", 60))
    q_order = prec.get("q_order", DEFAULT_TRUNCATION)
    degrees = dict(doc.get("variables", {}))
    E = None
    try:
        with working_precision(cfg):
            if "E" in doc:
                e = doc["E"]
                degrees[e["odd_variable"]] = 1
                E = OddEData(e["N"], tuple((tc["w"], tc["a"]) for tc in e["trace_components"]),
                             e.get("c3_is_zero", True))
            # every other name defaults to degree 2
            for comp in doc["components"]:
                for mono in comp["functional"].get("pairings", {}):
                    for factor in mono.split("*"):
                        name = factor.split("^")[0].strip()
                        if name and name != "1":
                            degrees.setdefault(name, 2)
                for expr in (comp.get("tangent_roots", []) + [comp.get("u_name", "0")]
                             + [r for g in comp.get("normal", []) + comp.get("V", [])
                                for r in g.get("root_names", [])]):
                    _collect_names(expr, degrees)
            if "E" in doc:
                for tc in doc["E"]["trace_components"]:
                    _collect_names(tc["a"], degrees)
            case_doc = doc["case"]
            case = CaseSelector(case_doc["dimension_class"], case_doc["lambda"], case_doc["k"],
                                case_doc.get("e_lambda"))
            comps = []
            for i, c in enumerate(doc["components"]):
                comps.append(FixedComponent(
                    c.get("name", f"F{i}"), c["s"], tuple(c.get("tangent_roots", [])),
                    _groups(c.get("normal", []), "m", "mult"),
                    _groups(c.get("V", []), "n", "pairs"),
                    c["sigma"], c.get("u_name", "0"), _functional(c["functional"]), dict(degrees)))
            data = EquivariantData(case, tuple(comps), E, doc.get("name", "instance"))
            manifold = None
            if "manifold" in doc:
                m = doc["manifold"]
                mdeg = dict(degrees)
                for expr in m.get("tangent_roots", []) + [m.get("line_root", "0")]:
                    _collect_names(expr, mdeg)
                for mono in m["functional"].get("pairings", {}):
                    for factor in mono.split("*"):
                        name = factor.split("^")[0].strip()
                        if name and name != "1":
                            mdeg.setdefault(name, 2)
                manifold = ManifoldData(
                    m["dim"], tuple(m.get("tangent_roots", [])), m.get("line_root", "0"),
                    tuple(WeightedSummand(v["root"], 0, v.get("pairs", 1)) for v in m.get("V", [])),
                    E, _functional(m["functional"]), mdeg)
            ev = doc.get("evaluation", {})
            tau = Tau(ev.get("tau", DEFAULT_TAU))
            tau.value  # parse now so a bad tau is an input error
            t = parse_complex(ev.get("t", DEFAULT_T))
    except InstanceError:
        raise
    except (RigidityError, ValueError) as exc:
        raise InstanceError(f"invalid instance: {exc}") from exc
    return Instance(data, cfg, q_order, tau, t, manifold, canonical_document(doc))


def _collect_names(expr: str, degrees: dict) -> None:
    for name in re.findall(r"[A-Za-z_][A-Za-z0-9_]*", expr):
        degrees.setdefault(name, 2)


def canonical_document(doc: dict) -> dict:
    """Normalised copy of a document: defaults filled in, keys in a fixed order."""
    out: dict = {}
    if "name" in doc:
        out["name"] = doc["name"]
    case = doc["case"]
    out["case"] = {"dimension_class": case["dimension_class"], "lambda": case["lambda"], "k": case["k"]}
    if "e_lambda" in case:
        out["case"]["e_lambda"] = case["e_lambda"]
    prec = doc.get("precision", {})
    out["precision"] = {"digits": prec.get("digits", 60), "q_order": prec.get("q_order", DEFAULT_TRUNCATION)}
    ev = doc.get("evaluation", {})
    out["evaluation"] = {"tau": ev.get("tau", DEFAULT_TAU), "t": ev.get("t", DEFAULT_T)}
    if doc.get("variables"):
        out["variables"] = {k: doc["variables"][k] for k in sorted(doc["variables"])}
    out["components"] = []
    for i, c in enumerate(doc["components"]):
        comp = {"name": c.get("name", f"F{i}"), "s": c["s"], "tangent_roots": list(c.get("tangent_roots", []))}
        comp["normal"] = [_canon_group(g, "m", "mult") for g in c.get("normal", [])]
        comp["V"] = [_canon_group(g, "n", "pairs") for g in c.get("V", [])]
        comp["sigma"] = c["sigma"]
        comp["u_name"] = c.get("u_name", "0")
        comp["functional"] = _canon_functional(c["functional"])
        out["components"].append(comp)
    if "E" in doc:
        e = doc["E"]
        out["E"] = {"N": e["N"], "odd_variable": e["odd_variable"], "c3_is_zero": e.get("c3_is_zero", True),
                    "trace_components": [{"w": tc["w"], "a": tc["a"]} for tc in e["trace_components"]]}
    if "manifold" in doc:
        m = doc["manifold"]
        out["manifold"] = {
            "dim": m["dim"], "tangent_roots": list(m.get("tangent_roots", [])),
            "line_root": m.get("line_root", "0"),
            "V": [{"root": v["root"], "pairs": v.get("pairs", 1)} for v in m.get("V", [])],
            "functional": _canon_functional(m["functional"]),
        }
    return out


def _canon_group(g: dict, rot_key: str, count_key: str) -> dict:
    count = g.get(count_key, 1)
    return {rot_key: g[rot_key], count_key: count, "root_names": list(g.get("root_names", ["0"] * count))}


def _canon_functional(f: dict) -> dict:
    pairings = f.get("pairings", {})
    return {"top_degree": f["top_degree"],
            "pairings": {k: pairings[k] for k in sorted(pairings)}}


def dumps(doc: dict) -> str:
    return json.dumps(canonical_document(doc), indent=2, ensure_ascii=False) + "\n"


DATA_DIR = Path(__file__).parent / "data"


def bundled_instances() -> list[str]:
    return sorted(p.name for p in DATA_DIR.glob("*.json"))


def resolve_path(path) -> Path:
    """A filesystem path, or the name of a bundled instance (with or without ``.json``)."""
    p = Path(path)
    if p.exists():
        return p
    name = p.name if p.suffix == ".json" else p.name + ".json"
    if (DATA_DIR / name).exists() and len(p.parts) == 1:
        return DATA_DIR / name
    return p


def load_instance(path) -> Instance:
    """Read, decode and validate an instance file (bundled names are accepted too)."""
    path = resolve_path(path)
    text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_instance(doc)
