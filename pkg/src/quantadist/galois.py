"""Predicate sets, the generating/observing Galois pair, and extensions.

``alpha`` turns a set of quantale-valued predicates into the greatest
conformance making them all non-expansive; ``gamma_enum`` enumerates
the non-expansive predicates with values restricted to a finite grid
(exact for the boolean quantale, a finite approximation otherwise).
The pair restricts to a contravariant Galois connection, and
``alpha(gamma(d))`` is the metric closure of ``d``.

``extension_largest`` and ``extension_smallest`` realize the two
canonical non-expansive extensions of a predicate defined on a
sub-carrier of a V-category; note that "largest"/"smallest" refer to
the quantale order, which is the reversed numeric order on the
real-valued quantales.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .quantale import BOOLEAN, INF, Quantale, QuantaleError
from .vgraph import Carrier, VGraph, all_top, is_vcat, metric_closure

#: Predicates are total dicts element -> value.
Pred = Dict[str, object]


class BudgetError(RuntimeError):
    """An enumeration would exceed its configured budget."""


@dataclass
class PredSet:
    quantale: Quantale
    carrier: Carrier
    preds: List[Pred]

    def __post_init__(self):
        for p in self.preds:
            for x in self.carrier:
                if x not in p:
                    raise ValueError(f"predicate not total: missing {x!r}")

    def __len__(self):
        return len(self.preds)


@dataclass(frozen=True)
class Grid:
    """Finite value grid used by enumeration oracles.

    For unit-oplus the grid is {0, 1/k, ..., 1}; for ext-plus it is
    {0, 1/k, ..., cap} plus infinity; for boolean it is the whole
    quantale regardless of the resolution.
    """

    resolution: int
    cap: int = 4

    def __post_init__(self):
        if self.resolution < 1:
            raise ValueError("grid resolution must be >= 1")


def grid_values(q: Quantale, grid: Grid) -> List[object]:
    if q is BOOLEAN or q.ident == "boolean":
        return [False, True]
    k = grid.resolution
    if q.ident == "unit-oplus":
        return [Fraction(i, k) for i in range(k + 1)]
    if q.ident == "ext-plus":
        vals: List[object] = [Fraction(i, k) for i in range(k * grid.cap + 1)]
        vals.append(INF)
        return vals
    raise QuantaleError(f"no grid for quantale {q.ident!r}")


def alpha(preds: PredSet) -> VGraph:
    """Greatest conformance turning every predicate into a non-expansive map.

    The empty predicate set yields the all-top graph.
    """
    q = preds.quantale
    c = preds.carrier
    out = all_top(q, c)
    for p in preds.preds:
        for i, x in enumerate(c.elements):
            for j, y in enumerate(c.elements):
                out.dist[i][j] = q.meet2(out.dist[i][j], q.residuate(p[x], p[y]))
    return out


def nonexpansive_into_value(q: Quantale, d: VGraph, p: Pred) -> Optional[Tuple[str, str]]:
    """Return a violating pair if ``p`` fails d <= d_V o (p x p), else None."""
    for x, y, v in d.pairs():
        if not q.leq(v, q.residuate(p[x], p[y])):
            return (x, y)
    return None


def gamma_enum(d: VGraph, grid: Grid, budget: int = 10 ** 6) -> PredSet:
    """All grid-valued predicates that are non-expansive from ``d`` into
    the residuation distance.

    Exact for the boolean quantale; a finite under-approximation of the
    full predicate class otherwise.  Refuses (rather than truncating)
    when the candidate space exceeds ``budget``.
    """
    q = d.quantale
    vals = grid_values(q, grid)
    n = len(d.carrier)
    total = len(vals) ** n
    if total > budget:
        raise BudgetError(
            f"gamma enumeration needs {total} candidates, budget is {budget}"
        )
    els = d.carrier.elements
    preds: List[Pred] = []
    for combo in product(vals, repeat=n):
        p = dict(zip(els, combo))
        if nonexpansive_into_value(q, d, p) is None:
            preds.append(p)
    return PredSet(q, d.carrier, preds)


def reindex_preds(preds: PredSet, f) -> PredSet:
    """Precompose every predicate with a finite map (predicate reindexing)."""
    if f.codomain != preds.carrier:
        raise ValueError("predicate reindexing: carrier mismatch")
    out = [{x: p[f(x)] for x in f.domain} for p in preds.preds]
    return PredSet(preds.quantale, f.domain, out)


def _closed_input(d: VGraph) -> VGraph:
    if is_vcat(d):
        return d
    warnings.warn(
        "extension applied to a V-graph; using its metric closure",
        stacklevel=3,
    )
    return metric_closure(d)


def _check_partial_nonexpansive(q: Quantale, d: VGraph, sub: Sequence[str], f: Pred):
    for x in sub:
        for y in sub:
            if not q.leq(d.at(x, y), q.residuate(f[x], f[y])):
                raise ValueError(
                    f"predicate is not non-expansive on the sub-carrier at ({x!r}, {y!r})"
                )


def extension_largest(d: VGraph, sub: Sequence[str], f: Pred) -> Pred:
    """The greatest (in the quantale order) non-expansive extension of ``f``.

    On the real-valued quantales this is the numerically smallest
    extension.
    """
    d = _closed_input(d)
    q = d.quantale
    _check_partial_nonexpansive(q, d, sub, f)
    return {
        x: q.meet(q.residuate(d.at(x, y), f[y]) for y in sub)
        for x in d.carrier
    }


def extension_smallest(d: VGraph, sub: Sequence[str], f: Pred) -> Pred:
    """The least non-expansive extension (numerically largest on the reals)."""
    d = _closed_input(d)
    q = d.quantale
    _check_partial_nonexpansive(q, d, sub, f)
    return {
        x: q.join(q.tensor(f[y], d.at(y, x)) for y in sub)
        for x in d.carrier
    }


# -- JSON ------------------------------------------------------------------

def predset_to_json(preds: PredSet) -> list:
    q = preds.quantale
    return [{x: q.value_to_json(p[x]) for x in preds.carrier} for p in preds.preds]


def predset_from_json(q: Quantale, c: Carrier, doc: list) -> PredSet:
    preds = [{x: q.value_from_json(entry[x]) for x in c} for entry in doc]
    return PredSet(q, c, preds)
