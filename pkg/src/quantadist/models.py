"""JSON (de)serialization of functors, terms, models, and certificates,
plus the bundled example fixtures.

Rationals travel as lowest-term strings ("7/10"), infinity as "inf",
booleans as JSON booleans.  A model file is either a coalgebra
(functor, monad, states, labels, per-state transition terms) or a bare
distance matrix with optional named distributions (used by the
transportation example).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Dict

from .behaviour import Certificate, CoalgebraModel, SparseDist
from .functor import (ConstF, ConstLeaf, CoprodF, IdF, IdLeaf, Inl, Inr, ProdF,
                      Tup, const_atoms, const_values, pow_functor)
from .monadlift import SubDist, subdist, tvalue_from_json, tvalue_to_json
from .quantale import Quantale, get_quantale
from .vgraph import VGraph, carrier, vgraph_from_json


class ModelFormatError(ValueError):
    """The document does not describe a valid model or certificate."""


# -- functor expressions ---------------------------------------------------------

def functor_to_json(f) -> object:
    if isinstance(f, ConstF):
        if f.atoms is None:
            return {"const": "value"}
        return {"const": {"atoms": list(f.atoms),
                          "evals": [{a: str(v) for a, v in e} for e in f.evals]}}
    if isinstance(f, IdF):
        return "id"
    if isinstance(f, ProdF):
        if f.labels is not None and all(p == f.parts[0] for p in f.parts):
            return {"pow": {"labels": list(f.labels),
                            "body": functor_to_json(f.parts[0])}}
        return {"prod": [functor_to_json(p) for p in f.parts]}
    if isinstance(f, CoprodF):
        return {"coprod": [functor_to_json(f.left), functor_to_json(f.right)]}
    raise ModelFormatError(f"not a functor expression: {f!r}")


def functor_from_json(doc, q: Quantale):
    if doc == "id":
        return IdF()
    if not isinstance(doc, dict) or len(doc) != 1:
        raise ModelFormatError(f"bad functor document: {doc!r}")
    key, body = next(iter(doc.items()))
    if key == "const":
        if body == "value":
            return const_values()
        atoms = body["atoms"]
        evals = [{a: q.value_from_json(v) for a, v in e.items()}
                 for e in body.get("evals", [])]
        return const_atoms(atoms, evals)
    if key == "prod":
        return ProdF(tuple(functor_from_json(p, q) for p in body))
    if key == "pow":
        return pow_functor(body["labels"], functor_from_json(body["body"], q))
    if key == "coprod":
        left, right = body
        return CoprodF(functor_from_json(left, q), functor_from_json(right, q))
    raise ModelFormatError(f"unknown functor node {key!r}")


# -- terms -------------------------------------------------------------------------

def term_to_json(functor, term, monad: str, q: Quantale) -> object:
    if isinstance(functor, ConstF):
        if functor.atoms is None:
            return {"const": q.value_to_json(term.atom)}
        return {"const": {"atom": term.atom}}
    if isinstance(functor, IdF):
        return {"id": tvalue_to_json(monad, term.payload)}
    if isinstance(functor, ProdF):
        if functor.labels is not None:
            return {"pow": {lab: term_to_json(part, item, monad, q)
                            for lab, part, item
                            in zip(functor.labels, functor.parts, term.items)}}
        return {"tuple": [term_to_json(part, item, monad, q)
                          for part, item in zip(functor.parts, term.items)]}
    if isinstance(functor, CoprodF):
        if isinstance(term, Inl):
            return {"inl": term_to_json(functor.left, term.item, monad, q)}
        return {"inr": term_to_json(functor.right, term.item, monad, q)}
    raise ModelFormatError(f"not a functor expression: {functor!r}")


def term_from_json(functor, doc, monad: str, q: Quantale):
    if not isinstance(doc, dict) or len(doc) != 1:
        raise ModelFormatError(f"bad term document: {doc!r}")
    key, body = next(iter(doc.items()))
    if key == "const":
        if not isinstance(functor, ConstF):
            raise ModelFormatError(f"constant leaf where {functor!r} was expected")
        if functor.atoms is None:
            return ConstLeaf(q.value_from_json(body))
        return ConstLeaf(body["atom"])
    if key == "id":
        if not isinstance(functor, IdF):
            raise ModelFormatError(f"identity leaf where {functor!r} was expected")
        return IdLeaf(tvalue_from_json(monad, body))
    if key == "tuple":
        if not isinstance(functor, ProdF) or len(body) != len(functor.parts):
            raise ModelFormatError(f"tuple arity mismatch at {doc!r}")
        return Tup(tuple(term_from_json(part, item, monad, q)
                         for part, item in zip(functor.parts, body)))
    if key == "pow":
        if not isinstance(functor, ProdF) or functor.labels is None:
            raise ModelFormatError(f"labelled tuple where {functor!r} was expected")
        missing = [lab for lab in functor.labels if lab not in body]
        if missing:
            raise ModelFormatError(f"missing labels {missing} in {doc!r}")
        return Tup(tuple(term_from_json(part, body[lab], monad, q)
                         for lab, part in zip(functor.labels, functor.parts)))
    if key == "inl":
        if not isinstance(functor, CoprodF):
            raise ModelFormatError(f"injection where {functor!r} was expected")
        return Inl(term_from_json(functor.left, body, monad, q))
    if key == "inr":
        if not isinstance(functor, CoprodF):
            raise ModelFormatError(f"injection where {functor!r} was expected")
        return Inr(term_from_json(functor.right, body, monad, q))
    raise ModelFormatError(f"unknown term node {key!r}")


# -- models ---------------------------------------------------------------------------

@dataclass
class DistanceInstance:
    """A bare distance matrix plus optional named distributions."""

    graph: VGraph
    distributions: Dict[str, SubDist]


def model_from_json(doc: dict):
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    kind = doc.get("kind", "coalgebra")
    if kind == "vgraph":
        graph = vgraph_from_json(doc)
        dists = {name: subdist({x: Fraction(w) for x, w in weights.items()})
                 for name, weights in doc.get("distributions", {}).items()}
        return DistanceInstance(graph, dists)
    if kind != "coalgebra":
        raise ModelFormatError(f"unknown model kind {kind!r}")
    try:
        q = get_quantale(doc["quantale"])
        monad = doc["monad"]
        functor = functor_from_json(doc["functor"], q)
        states = carrier(doc["states"])
        labels = carrier(doc.get("labels", []))
        transitions = {
            state: term_from_json(functor, term_doc, monad, q)
            for state, term_doc in doc["transitions"].items()
        }
    except KeyError as exc:
        raise ModelFormatError(f"missing model field {exc}") from None
    return CoalgebraModel(q, functor, monad, states, labels, transitions)


def model_to_json(model: CoalgebraModel) -> dict:
    return {
        "kind": "coalgebra",
        "quantale": model.quantale.ident,
        "monad": model.monad,
        "functor": functor_to_json(model.functor),
        "states": list(model.states.elements),
        "labels": list(model.labels.elements),
        "transitions": {
            s: term_to_json(model.functor, t, model.monad, model.quantale)
            for s, t in model.transitions.items()
        },
    }


# -- certificates -----------------------------------------------------------------------

def certificate_from_json(doc: dict, model: CoalgebraModel) -> Certificate:
    q = model.quantale
    monad = model.monad
    try:
        entries = {}
        for row in doc["entries"]:
            pair = (tvalue_from_json(monad, row["lhs"]),
                    tvalue_from_json(monad, row["rhs"]))
            entries[pair] = q.value_from_json(row["value"])
        witnesses = {}
        for row in doc.get("witnesses", []):
            pair = (tvalue_from_json(monad, row["lhs"]),
                    tvalue_from_json(monad, row["rhs"]))
            parts = []
            for part in row["parts"]:
                left = tvalue_from_json(monad, part["lhs"])
                right = tvalue_from_json(monad, part["rhs"])
                if monad == "powerset":
                    parts.append((left, right))
                else:
                    parts.append((Fraction(part["weight"]), (left, right)))
            witnesses.setdefault(pair, []).append(tuple(parts))
    except KeyError as exc:
        raise ModelFormatError(f"missing certificate field {exc}") from None
    return Certificate(monad, SparseDist(q, entries), witnesses)


def certificate_to_json(cert: Certificate, q: Quantale) -> dict:
    entries = [{"lhs": tvalue_to_json(cert.monad, l),
                "rhs": tvalue_to_json(cert.monad, r),
                "value": q.value_to_json(v)}
               for (l, r), v in cert.candidate.entries.items()]
    witnesses = []
    for (l, r), wits in cert.witnesses.items():
        for w in wits:
            if cert.monad == "powerset":
                parts = [{"lhs": tvalue_to_json(cert.monad, a),
                          "rhs": tvalue_to_json(cert.monad, b)} for a, b in w]
            else:
                parts = [{"weight": str(weight),
                          "lhs": tvalue_to_json(cert.monad, a),
                          "rhs": tvalue_to_json(cert.monad, b)}
                         for weight, (a, b) in w]
            witnesses.append({"lhs": tvalue_to_json(cert.monad, l),
                              "rhs": tvalue_to_json(cert.monad, r),
                              "parts": parts})
    return {"entries": entries, "witnesses": witnesses}


# -- files and fixtures ---------------------------------------------------------------------

def load_json_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from None


def load_model_file(path: str):
    return model_from_json(load_json_file(path))


def fixture_text(name: str) -> str:
    return resources.files("quantadist.fixtures").joinpath(name).read_text("utf-8")


def load_fixture(name: str) -> dict:
    return json.loads(fixture_text(name))


def fixture_model(name: str):
    return model_from_json(load_fixture(name))


def fixture_certificate(name: str, model: CoalgebraModel) -> Certificate:
    return certificate_from_json(load_fixture(name), model)
