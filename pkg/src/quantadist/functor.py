"""Finite-coproduct polynomial functors: syntax, terms, generated
evaluation maps, closed-form lifted distances, and the generic meet
formula for the Kantorovich lifting.

Functor grammar: constants (either over named atoms with explicit
evaluation predicates, or over the quantale's own values with the
identity evaluation), the identity functor, finite labelled products,
and binary coproducts.  Powers are sugar for labelled products of
copies of the body.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .canon import canon_key
from .galois import Grid, Pred, PredSet, gamma_enum, nonexpansive_into_value
from .monadlift import ev_monad, monad_map
from .quantale import Quantale
from .vgraph import Carrier, VGraph, metric_closure


class ShapeError(ValueError):
    """A term does not match the functor it is used with."""


# -- functor expressions ------------------------------------------------------

@dataclass(frozen=True)
class ConstF:
    """Constant functor.

    ``atoms is None`` means the constant carrier is the quantale itself
    and evaluation is the identity (the usual choice for payoff
    components); otherwise ``evals`` lists total predicates on the
    named atoms, encoded as sorted tuples of (atom, value) pairs.
    """

    atoms: Optional[Tuple[str, ...]] = None
    evals: Optional[Tuple[Tuple[Tuple[str, object], ...], ...]] = None

    def eval_preds(self) -> List[Optional[Dict[str, object]]]:
        if self.atoms is None or self.evals is None:
            return [None]  # identity on quantale values
        return [dict(e) for e in self.evals]


@dataclass(frozen=True)
class IdF:
    pass


@dataclass(frozen=True)
class ProdF:
    parts: Tuple["FunctorExpr", ...]
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if not self.parts:
            raise ValueError("empty product")
        if self.labels is not None and len(self.labels) != len(self.parts):
            raise ValueError("label count does not match the component count")


@dataclass(frozen=True)
class CoprodF:
    left: "FunctorExpr"
    right: "FunctorExpr"


FunctorExpr = object  # ConstF | IdF | ProdF | CoprodF

ID = IdF()


def const_values() -> ConstF:
    return ConstF(None, None)


def const_atoms(atoms: Sequence[str], evals: Sequence[Dict[str, object]]) -> ConstF:
    frozen = tuple(tuple(sorted(e.items())) for e in evals)
    return ConstF(tuple(atoms), frozen)


def pow_functor(labels: Sequence[str], body: FunctorExpr) -> ProdF:
    labels = tuple(labels)
    return ProdF(parts=(body,) * len(labels), labels=labels)


def machine_functor(labels: Sequence[str]) -> ProdF:
    """Payoff paired with a labelled family of successors."""
    return ProdF(parts=(const_values(), pow_functor(labels, ID)), labels=None)


def exception_functor(labels: Sequence[str]) -> CoprodF:
    """Either a terminal output value or a labelled family of successors."""
    return CoprodF(const_values(), pow_functor(labels, ID))


# -- terms --------------------------------------------------------------------

@dataclass(frozen=True)
class ConstLeaf:
    atom: object  # str atom name, or a quantale value

    def canon(self) -> str:
        return f"c({canon_key(self.atom)})"


@dataclass(frozen=True)
class IdLeaf:
    payload: object  # carrier element, quantale value, or T-value

    def canon(self) -> str:
        return f"i({canon_key(self.payload)})"


@dataclass(frozen=True)
class Tup:
    items: Tuple[object, ...]

    def canon(self) -> str:
        return "(" + ",".join(canon_key(t) for t in self.items) + ")"


@dataclass(frozen=True)
class Inl:
    item: object

    def canon(self) -> str:
        return f"l({canon_key(self.item)})"


@dataclass(frozen=True)
class Inr:
    item: object

    def canon(self) -> str:
        return f"r({canon_key(self.item)})"


FTerm = object


def term_key(t) -> str:
    return canon_key(t)


def shape_check(functor: FunctorExpr, term) -> None:
    if isinstance(functor, ConstF):
        if not isinstance(term, ConstLeaf):
            raise ShapeError(f"expected a constant leaf, got {term!r}")
        if functor.atoms is not None and term.atom not in functor.atoms:
            raise ShapeError(f"unknown constant atom {term.atom!r}")
        return
    if isinstance(functor, IdF):
        if not isinstance(term, IdLeaf):
            raise ShapeError(f"expected an identity leaf, got {term!r}")
        return
    if isinstance(functor, ProdF):
        if not isinstance(term, Tup) or len(term.items) != len(functor.parts):
            raise ShapeError(f"expected a {len(functor.parts)}-tuple, got {term!r}")
        for part, item in zip(functor.parts, term.items):
            shape_check(part, item)
        return
    if isinstance(functor, CoprodF):
        if isinstance(term, Inl):
            shape_check(functor.left, term.item)
        elif isinstance(term, Inr):
            shape_check(functor.right, term.item)
        else:
            raise ShapeError(f"expected an injection, got {term!r}")
        return
    raise ShapeError(f"not a functor expression: {functor!r}")


def map_payloads(term, fn: Callable[[object], object]):
    """Apply ``fn`` at every identity leaf, preserving structure."""
    if isinstance(term, IdLeaf):
        return IdLeaf(fn(term.payload))
    if isinstance(term, ConstLeaf):
        return term
    if isinstance(term, Tup):
        return Tup(tuple(map_payloads(t, fn) for t in term.items))
    if isinstance(term, Inl):
        return Inl(map_payloads(term.item, fn))
    if isinstance(term, Inr):
        return Inr(map_payloads(term.item, fn))
    raise ShapeError(f"not a term: {term!r}")


def iter_payloads(term):
    if isinstance(term, IdLeaf):
        yield term.payload
    elif isinstance(term, Tup):
        for t in term.items:
            yield from iter_payloads(t)
    elif isinstance(term, (Inl, Inr)):
        yield from iter_payloads(term.item)
    elif not isinstance(term, ConstLeaf):
        raise ShapeError(f"not a term: {term!r}")


def fmap(functor: FunctorExpr, fn, term):
    """Functorial action on a shape-checked term.

    ``fn`` may be a callable or a dict over the payload carrier.
    """
    shape_check(functor, term)
    if isinstance(fn, dict):
        mapping = fn
        fn = lambda x: mapping[x]
    return map_payloads(term, fn)


# -- evaluation maps ----------------------------------------------------------

@dataclass(frozen=True)
class ConstEval:
    pred: Optional[Tuple[Tuple[str, object], ...]] = None  # None = identity

    def describe(self) -> str:
        return "const-id" if self.pred is None else f"const{dict(self.pred)}"


@dataclass(frozen=True)
class IdEval:
    def describe(self) -> str:
        return "id"


@dataclass(frozen=True)
class ProjEval:
    index: int
    inner: object
    label: Optional[str] = None

    def describe(self) -> str:
        tag = self.label if self.label is not None else str(self.index)
        return f"pi[{tag}].{self.inner.describe()}"


@dataclass(frozen=True)
class CoprodEval:
    side: str  # 'left' = [ev, top], 'right' = [bottom, ev], 'split' = [bottom, top]
    inner: object = None

    def describe(self) -> str:
        if self.side == "left":
            return f"[{self.inner.describe()},top]"
        if self.side == "right":
            return f"[bottom,{self.inner.describe()}]"
        return "[bottom,top]"


@dataclass(frozen=True)
class MonadEval:
    monad: str

    def describe(self) -> str:
        return {"powerset": "sup", "subdist": "expect"}[self.monad]


@dataclass(frozen=True)
class StarEval:
    """ev_outer composed with the outer functor's action on ev_inner."""

    outer: object
    inner: object

    def describe(self) -> str:
        return f"{self.outer.describe()}*{self.inner.describe()}"


EvalMap = object


def eval_map(q: Quantale, ev, term):
    if isinstance(ev, ConstEval):
        if not isinstance(term, ConstLeaf):
            raise ShapeError(f"constant evaluation on {term!r}")
        if ev.pred is None:
            return q.validate(term.atom)
        return q.validate(dict(ev.pred)[term.atom])
    if isinstance(ev, IdEval):
        if not isinstance(term, IdLeaf):
            raise ShapeError(f"identity evaluation on {term!r}")
        return q.validate(term.payload)
    if isinstance(ev, ProjEval):
        if not isinstance(term, Tup):
            raise ShapeError(f"projection on {term!r}")
        return eval_map(q, ev.inner, term.items[ev.index])
    if isinstance(ev, CoprodEval):
        if isinstance(term, Inl):
            if ev.side == "left":
                return eval_map(q, ev.inner, term.item)
            return q.bottom
        if isinstance(term, Inr):
            if ev.side == "right":
                return eval_map(q, ev.inner, term.item)
            return q.top
        raise ShapeError(f"coproduct evaluation on {term!r}")
    if isinstance(ev, MonadEval):
        return ev_monad(ev.monad, term, q)
    if isinstance(ev, StarEval):
        if isinstance(ev.outer, MonadEval):
            mapped = monad_map(ev.outer.monad, lambda s: eval_map(q, ev.inner, s), term)
            return ev_monad(ev.outer.monad, mapped, q)
        mapped = map_payloads(term, lambda s: eval_map(q, ev.inner, s))
        return eval_map(q, ev.outer, mapped)
    raise TypeError(f"not an evaluation map: {ev!r}")


def build_lambda(functor: FunctorExpr) -> List[EvalMap]:
    """The generated evaluation-map set of a polynomial functor."""
    if isinstance(functor, ConstF):
        if functor.atoms is None:
            return [ConstEval(None)]
        return [ConstEval(e) for e in functor.evals]
    if isinstance(functor, IdF):
        return [IdEval()]
    if isinstance(functor, ProdF):
        out: List[EvalMap] = []
        for i, part in enumerate(functor.parts):
            label = functor.labels[i] if functor.labels else None
            for inner in build_lambda(part):
                out.append(ProjEval(i, inner, label))
        return out
    if isinstance(functor, CoprodF):
        out = [CoprodEval("left", e) for e in build_lambda(functor.left)]
        out += [CoprodEval("right", e) for e in build_lambda(functor.right)]
        out.append(CoprodEval("split"))
        return out
    raise TypeError(f"not a functor expression: {functor!r}")


def star(lam_outer: Sequence[EvalMap], lam_inner: Sequence[EvalMap]) -> List[EvalMap]:
    """All pairwise compositions ev_outer o F(ev_inner)."""
    return [StarEval(a, b) for a in lam_outer for b in lam_inner]


# -- closed-form lifted distance ----------------------------------------------

def polynomial_distance(q: Quantale, functor: FunctorExpr, leaf_dist, s, t):
    """Structural lifted distance with a caller-supplied distance at
    identity leaves.

    Constants take the meet over the node's evaluation predicates of
    the residuated values; products take the componentwise meet;
    coproducts compare same-side terms recursively, give top on
    left-versus-right and bottom on right-versus-left.
    """
    if isinstance(functor, ConstF):
        if not (isinstance(s, ConstLeaf) and isinstance(t, ConstLeaf)):
            raise ShapeError("constant distance on non-constant terms")
        values = []
        for pred in functor.eval_preds():
            if pred is None:
                values.append(q.residuate(s.atom, t.atom))
            else:
                values.append(q.residuate(pred[s.atom], pred[t.atom]))
        return q.meet(values)
    if isinstance(functor, IdF):
        if not (isinstance(s, IdLeaf) and isinstance(t, IdLeaf)):
            raise ShapeError("identity distance on non-identity terms")
        return leaf_dist(s.payload, t.payload)
    if isinstance(functor, ProdF):
        return q.meet(
            polynomial_distance(q, part, leaf_dist, s.items[i], t.items[i])
            for i, part in enumerate(functor.parts)
        )
    if isinstance(functor, CoprodF):
        if isinstance(s, Inl) and isinstance(t, Inl):
            return polynomial_distance(q, functor.left, leaf_dist, s.item, t.item)
        if isinstance(s, Inr) and isinstance(t, Inr):
            return polynomial_distance(q, functor.right, leaf_dist, s.item, t.item)
        if isinstance(s, Inl) and isinstance(t, Inr):
            return q.top
        if isinstance(s, Inr) and isinstance(t, Inl):
            return q.bottom
        raise ShapeError("coproduct distance on non-injection terms")
    raise TypeError(f"not a functor expression: {functor!r}")


def _term_carrier(terms: Sequence[object]) -> Carrier:
    keys = [term_key(t) for t in terms]
    if len(set(keys)) != len(keys):
        raise ValueError("duplicate terms in the term carrier")
    return Carrier(tuple(keys))


def lift_closed(functor: FunctorExpr, d: VGraph, terms: Sequence[object]) -> VGraph:
    """Closed-form lifted distance on an explicit finite term carrier.

    Identity leaves are compared with the metric closure of ``d``
    (payloads must be elements of d's carrier).
    """
    for t in terms:
        shape_check(functor, t)
    q = d.quantale
    dc = metric_closure(d)
    leaf = lambda x, y: dc.at(x, y)
    out_carrier = _term_carrier(terms)
    n = len(terms)
    dist = [[polynomial_distance(q, functor, leaf, terms[i], terms[j])
             for j in range(n)] for i in range(n)]
    return VGraph(q, out_carrier, dist)


# -- generic Kantorovich formula ------------------------------------------------

def _default_fmap(term, pred: Pred):
    return map_payloads(term, lambda x: pred[x])


def kantorovich_generic(functor: FunctorExpr, evals: Sequence[EvalMap], d: VGraph,
                        preds: PredSet, terms: Sequence[object],
                        fmap_fn=None) -> VGraph:
    """The meet over evaluation maps and supplied predicates of the
    residuated evaluation differences.

    With the full boolean predicate class this computes the lifting
    exactly; with grid predicate sets it is a quantale-order
    under-approximation.  Every predicate must be non-expansive for
    ``d`` (rejected with a witness pair otherwise).
    """
    q = d.quantale
    for f in preds.preds:
        witness = nonexpansive_into_value(q, d, f)
        if witness is not None:
            raise ValueError(f"predicate not non-expansive at pair {witness}")
    if functor is not None and fmap_fn is None:
        for t in terms:
            shape_check(functor, t)
    apply_pred = fmap_fn if fmap_fn is not None else _default_fmap
    out_carrier = _term_carrier(terms)
    n = len(terms)
    dist = [[q.top] * n for _ in range(n)]
    for ev in evals:
        for f in preds.preds:
            scores = [eval_map(q, ev, apply_pred(t, f)) for t in terms]
            for i in range(n):
                for j in range(n):
                    dist[i][j] = q.meet2(dist[i][j], q.residuate(scores[i], scores[j]))
    return VGraph(q, out_carrier, dist)


def composed_fmap(term, pred: Pred):
    """Predicate application for flat two-layer terms: the identity
    leaves of the outer layer hold inner terms whose own identity
    leaves hold carrier elements."""
    return map_payloads(term, lambda inner: map_payloads(inner, lambda x: pred[x]))


def check_compositionality(outer: FunctorExpr, lam_outer: Sequence[EvalMap],
                           inner: FunctorExpr, lam_inner: Sequence[EvalMap],
                           d: VGraph, inner_terms: Sequence[object],
                           composed_terms: Sequence[object],
                           grid: Optional[Grid] = None) -> dict:
    """Compare the two-step lifting with the single combined-map lifting.

    Exact on the boolean quantale (full predicate enumeration); with a
    grid on the real-valued quantales both sides are grid
    approximations and the result is tagged accordingly.  The report
    also checks the one inequality that holds unconditionally: the
    composed lifting is below the combined one in the quantale order.
    """
    q = d.quantale
    if q.ident == "boolean":
        grid = Grid(1)
        method = "exact-boolean"
    else:
        if grid is None:
            raise ValueError("a grid is required over real-valued quantales")
        method = f"grid-{grid.resolution}"

    inner_graph = kantorovich_generic(
        inner, lam_inner, d, gamma_enum(d, grid), inner_terms)
    outer_terms = [map_payloads(t, term_key) for t in composed_terms]
    lhs = kantorovich_generic(
        outer, lam_outer, inner_graph, gamma_enum(inner_graph, grid), outer_terms)
    rhs = kantorovich_generic(
        outer, star(lam_outer, lam_inner), d, gamma_enum(d, grid),
        composed_terms, fmap_fn=composed_fmap)
    n = len(composed_terms)
    equal = all(lhs.dist[i][j] == rhs.dist[i][j] for i in range(n) for j in range(n))
    composed_below_combined = all(
        q.leq(lhs.dist[i][j], rhs.dist[i][j]) for i in range(n) for j in range(n))
    return {
        "lhs": lhs,
        "rhs": rhs,
        "equal": equal,
        "composed_below_combined": composed_below_combined,
        "method": method,
    }
