"""Finite quantale-valued graphs and categories.

A VGraph is a finite carrier of named points together with a square
matrix of quantale values (no axioms).  A V-category additionally
satisfies reflexivity (unit below the diagonal) and the tensor-triangle
inequality; `metric_closure` computes the least V-category above a
graph by shortest-path style saturation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

from .quantale import Quantale


class CarrierMismatchError(ValueError):
    """Operands live over different carriers (or the wrong quantale)."""


@dataclass(frozen=True)
class Carrier:
    """Ordered tuple of distinct element names; the order is canonical."""

    elements: Tuple[str, ...]

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise ValueError(f"duplicate carrier elements: {self.elements}")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.elements

    def index(self, x: str) -> int:
        try:
            return self.elements.index(x)
        except ValueError:
            raise CarrierMismatchError(f"{x!r} is not a carrier element") from None


def carrier(elements: Iterable[str]) -> Carrier:
    return Carrier(tuple(elements))


@dataclass
class VGraph:
    quantale: Quantale
    carrier: Carrier
    dist: List[List[object]]

    def __post_init__(self):
        n = len(self.carrier)
        if len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise ValueError("distance matrix does not match the carrier size")
        self.dist = [[self.quantale.validate(v) for v in row] for row in self.dist]

    def at(self, x: str, y: str):
        return self.dist[self.carrier.index(x)][self.carrier.index(y)]

    def at_idx(self, i: int, j: int):
        return self.dist[i][j]

    def copy(self) -> "VGraph":
        return VGraph(self.quantale, self.carrier, [row[:] for row in self.dist])

    def pairs(self):
        els = self.carrier.elements
        for i, x in enumerate(els):
            for j, y in enumerate(els):
                yield x, y, self.dist[i][j]


def constant_graph(q: Quantale, c: Carrier, value) -> VGraph:
    n = len(c)
    return VGraph(q, c, [[value] * n for _ in range(n)])


def all_top(q: Quantale, c: Carrier) -> VGraph:
    return constant_graph(q, c, q.top)


def all_bottom(q: Quantale, c: Carrier) -> VGraph:
    return constant_graph(q, c, q.bottom)


def graph_from_entries(q: Quantale, c: Carrier, entries: Dict[Tuple[str, str], object],
                       default=None) -> VGraph:
    """Build a graph from an entry map; missing entries use ``default``
    (the quantale top if not given)."""
    default = q.top if default is None else default
    g = constant_graph(q, c, default)
    for (x, y), v in entries.items():
        g.dist[c.index(x)][c.index(y)] = q.validate(v)
    return g


def _require_same(d1: VGraph, d2: VGraph):
    if d1.quantale is not d2.quantale:
        raise CarrierMismatchError("graphs over different quantales")
    if d1.carrier != d2.carrier:
        raise CarrierMismatchError("graphs over different carriers")


def graph_leq(d1: VGraph, d2: VGraph) -> bool:
    """Pointwise quantale order."""
    _require_same(d1, d2)
    q = d1.quantale
    n = len(d1.carrier)
    return all(q.leq(d1.dist[i][j], d2.dist[i][j]) for i in range(n) for j in range(n))


def graph_equal(d1: VGraph, d2: VGraph) -> bool:
    _require_same(d1, d2)
    return d1.dist == d2.dist


@dataclass
class FiniteMap:
    """A total map between carriers."""

    domain: Carrier
    codomain: Carrier
    assignment: Dict[str, str]

    def __post_init__(self):
        missing = [x for x in self.domain if x not in self.assignment]
        if missing:
            raise ValueError(f"map not total, missing {missing}")
        bad = [y for y in self.assignment.values() if y not in self.codomain]
        if bad:
            raise ValueError(f"map image not inside the codomain: {bad}")

    def __call__(self, x: str) -> str:
        return self.assignment[x]


def identity_map(c: Carrier) -> FiniteMap:
    return FiniteMap(c, c, {x: x for x in c})


def compose_maps(f: FiniteMap, g: FiniteMap) -> FiniteMap:
    """g after f."""
    if f.codomain != g.domain:
        raise CarrierMismatchError("maps do not compose")
    return FiniteMap(f.domain, g.codomain, {x: g(f(x)) for x in f.domain})


def reindex(f: FiniteMap, d_cod: VGraph) -> VGraph:
    """Pull a graph on the codomain back along f (d o (f x f))."""
    if f.codomain != d_cod.carrier:
        raise CarrierMismatchError("reindex: codomain does not match the graph carrier")
    q = d_cod.quantale
    dom = f.domain
    dist = [[d_cod.at(f(x), f(y)) for y in dom] for x in dom]
    return VGraph(q, dom, dist)


def direct_image(f: FiniteMap, d_dom: VGraph) -> VGraph:
    """Push a graph forward along f: the join over preimage pairs.

    Pairs with an empty preimage get the empty join, i.e. bottom.
    """
    if f.domain != d_dom.carrier:
        raise CarrierMismatchError("direct_image: domain does not match the graph carrier")
    q = d_dom.quantale
    cod = f.codomain
    out = all_bottom(q, cod)
    for x1 in f.domain:
        for x2 in f.domain:
            i = cod.index(f(x1))
            j = cod.index(f(x2))
            out.dist[i][j] = q.join2(out.dist[i][j], d_dom.at(x1, x2))
    return out


def is_vcat(d: VGraph) -> bool:
    """Reflexivity (unit below every diagonal entry) plus the triangle law."""
    q = d.quantale
    n = len(d.carrier)
    m = d.dist
    for i in range(n):
        if not q.leq(q.unit, m[i][i]):
            return False
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if not q.leq(q.tensor(m[i][j], m[j][k]), m[i][k]):
                    return False
    return True


def metric_closure(d: VGraph) -> VGraph:
    """Least V-category above ``d``.

    Saturates the diagonal with the unit and the off-diagonal entries
    with tensor-composites until a fixpoint is reached (a generalized
    all-pairs shortest-path closure).
    """
    q = d.quantale
    n = len(d.carrier)
    out = d.copy()
    m = out.dist
    for i in range(n):
        m[i][i] = q.join2(m[i][i], q.unit)
    changed = True
    while changed:
        changed = False
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    cand = q.tensor(m[i][k], m[k][j])
                    new = q.join2(m[i][j], cand)
                    if new != m[i][j]:
                        m[i][j] = new
                        changed = True
    return out


# -- JSON ------------------------------------------------------------------

def vgraph_to_json(d: VGraph) -> dict:
    q = d.quantale
    return {
        "quantale": q.ident,
        "elements": list(d.carrier.elements),
        "dist": [[q.value_to_json(v) for v in row] for row in d.dist],
    }


def vgraph_from_json(doc: dict) -> VGraph:
    from .quantale import get_quantale

    q = get_quantale(doc["quantale"])
    c = carrier(doc["elements"])
    dist = [[q.value_from_json(v) for v in row] for row in doc["dist"]]
    return VGraph(q, c, dist)
