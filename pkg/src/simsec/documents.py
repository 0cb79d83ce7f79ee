"""JSON model documents.

A document looks like::

    {"agents": ["a", "b"],
     "vertices": [{"id": "u0", "colour": "a"}, ...],
     "facets": [["u0", "w1"], ...],
     "valuation": {"u0+w1": ["p"], ...},
     "neighborhoods": {"u0": [["u0+w1", "u0+w2"]], ...}}

Facet keys are the sorted vertex ids joined by ``+``. The canonical dump
sorts every key and list, lists every facet in the valuation, and omits
vertices whose neighborhood is empty.
"""

from __future__ import annotations

import json
from pathlib import Path

from .complex import facet_key, parse_facet_key, validate_complex
from .model import SecrecyModel, validate_model


class DocumentError(ValueError):
    """The JSON is well-formed but does not have the document shape."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DocumentError(msg)


def model_from_document(doc) -> SecrecyModel:
    _require(isinstance(doc, dict), "model document must be a JSON object")
    for key in ("agents", "vertices", "facets"):
        _require(key in doc, f"missing field {key!r}")
    agents = doc["agents"]
    _require(isinstance(agents, list) and all(isinstance(a, str) for a in agents), "'agents' must be a list of strings")
    vertices = []
    _require(isinstance(doc["vertices"], list), "'vertices' must be a list")
    for entry in doc["vertices"]:
        _require(isinstance(entry, dict) and isinstance(entry.get("id"), str) and isinstance(entry.get("colour"), str),
                 "each vertex must be {\"id\": str, \"colour\": str}")
        vertices.append((entry["id"], entry["colour"]))
    facets = doc["facets"]
    _require(isinstance(facets, list) and all(isinstance(f, list) and all(isinstance(v, str) for v in f) for f in facets),
             "'facets' must be a list of vertex-id lists")
    complex_ = validate_complex(agents, vertices, facets)

    valuation = {}
    raw_val = doc.get("valuation", {})
    _require(isinstance(raw_val, dict), "'valuation' must be an object")
    for key, atoms in raw_val.items():
        _require(isinstance(atoms, list) and all(isinstance(p, str) for p in atoms), f"valuation of {key!r} must be a list of atoms")
        valuation[parse_facet_key(key)] = atoms

    neighborhoods = {}
    raw_nb = doc.get("neighborhoods", {})
    _require(isinstance(raw_nb, dict), "'neighborhoods' must be an object")
    for v, events in raw_nb.items():
        _require(isinstance(events, list) and all(isinstance(U, list) for U in events),
                 f"neighborhood of {v!r} must be a list of facet-key lists")
        neighborhoods[v] = [[parse_facet_key(k) for k in U] for U in events]
    return validate_model(complex_, valuation, neighborhoods)


def model_to_document(m: SecrecyModel) -> dict:
    c = m.complex
    return {
        "agents": sorted(c.agents),
        "vertices": [{"id": v, "colour": c.colour[v]} for v in c.vertices],
        "facets": [list(f) for f in c.facets],
        "valuation": {facet_key(f): sorted(m.valuation[f]) for f in c.facets},
        "neighborhoods": {
            v: sorted(sorted(facet_key(f) for f in U) for U in events)
            for v, events in sorted(m.neighborhoods.items())
            if events
        },
    }


def dumps_model(m: SecrecyModel) -> str:
    return json.dumps(model_to_document(m), indent=2, sort_keys=True) + "\n"


def loads_model(text: str) -> SecrecyModel:
    return model_from_document(json.loads(text))


def load_model(path) -> SecrecyModel:
    return loads_model(Path(path).read_text(encoding="utf-8"))


def save_model(m: SecrecyModel, path) -> None:
    Path(path).write_text(dumps_model(m), encoding="utf-8")
