"""Behaviour distances on determinized systems.

The one-step behaviour function reindexes the closed-form polynomial
lifting along the determinized transition structure.  Its greatest
fixpoint in the quantale order (the numerically least one) is the
behavioural distance; Kleene iteration from the top graph descends
towards it, so truncated runs are sound quantale-order upper bounds
(numeric lower bounds).

Upper bounds in the numeric order come from certificates: sparse
candidate distances whose support pairs are post-fixpoints up to the
algebraic structure of the monad.  The checker bounds the up-to
function through explicit decomposition witnesses (unions for the
powerset monad, convex combinations for subdistributions) and never
computes it exactly; ``u_exact`` exists only as a desk-scale oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain, combinations, product
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .canon import canon_key
from .distlaw import DetCoalgebra, DistLaw
from .functor import (ConstF, CoprodF, IdF, Inl, ProdF, iter_payloads,
                      polynomial_distance, shape_check)
from .galois import BudgetError
from .monadlift import FinSubset, SubDist, finsubset, subdist
from .quantale import Quantale, is_inf
from .vgraph import Carrier, VGraph, metric_closure


class ModelError(ValueError):
    """Malformed coalgebra model."""


@dataclass
class CoalgebraModel:
    quantale: Quantale
    functor: object
    monad: str
    states: Carrier
    labels: Carrier
    transitions: Dict[str, object]

    def __post_init__(self):
        for labels in _labelled_products(self.functor):
            if labels != self.labels.elements:
                raise ModelError(
                    f"labelled product over {labels} does not match the "
                    f"model labels {self.labels.elements}")
        for x in self.states:
            if x not in self.transitions:
                raise ModelError(f"state {x!r} has no transition")
        for x, term in self.transitions.items():
            if x not in self.states:
                raise ModelError(f"transition for unknown state {x!r}")
            shape_check(self.functor, term)
            for payload in iter_payloads(term):
                members = payload.members if isinstance(payload, FinSubset) \
                    else payload.support()
                for m in members:
                    if m not in self.states:
                        raise ModelError(f"successor {m!r} of {x!r} is not a state")

    def law(self) -> DistLaw:
        return DistLaw(self.functor, self.monad, self.quantale)

    def det(self, max_states: int = 100_000) -> DetCoalgebra:
        return DetCoalgebra(self.law(), self.transitions, max_states=max_states)


def _labelled_products(functor):
    """Yield the label tuples of every labelled product in the functor."""
    if isinstance(functor, ProdF):
        if functor.labels is not None:
            yield functor.labels
        else:
            for part in functor.parts:
                yield from _labelled_products(part)
    elif isinstance(functor, CoprodF):
        yield from _labelled_products(functor.left)
        yield from _labelled_products(functor.right)


def _is_value_const(f) -> bool:
    return isinstance(f, ConstF) and f.atoms is None


def _is_power_of_id(f) -> bool:
    return isinstance(f, ProdF) and f.labels is not None and \
        all(isinstance(p, IdF) for p in f.parts)


def model_kind(model: CoalgebraModel) -> Optional[str]:
    """Recognize the two trace-characterized shapes."""
    f = model.functor
    if model.monad == "subdist" and isinstance(f, ProdF) and f.labels is None \
            and len(f.parts) == 2 and _is_value_const(f.parts[0]) \
            and _is_power_of_id(f.parts[1]):
        return "machine"
    if model.monad == "powerset" and isinstance(f, CoprodF) \
            and _is_value_const(f.left) and _is_power_of_id(f.right):
        return "exception"
    return None


# -- the behaviour function -----------------------------------------------------

def beh_value(det: DetCoalgebra, dfun: Callable[[object, object], object],
              p, q):
    """One-step behaviour bound at a pair, with the distance at identity
    leaves supplied by the caller (already-saturated bounds plug in
    directly; no closure is re-applied here)."""
    law = det.law
    sp = det.successor(p)
    sq = det.successor(q)
    return polynomial_distance(law.quantale, law.functor, dfun, sp, sq)


def beh_apply(det: DetCoalgebra, d: Dict[Tuple[object, object], object],
              pairs: Iterable[Tuple[object, object]]):
    """Apply the behaviour function to a pair-indexed bound table."""

    def leaf(x, y):
        try:
            return d[(x, y)]
        except KeyError:
            raise ModelError(
                f"no bound for successor pair ({canon_key(x)}, {canon_key(y)})"
            ) from None

    return {(p, q): beh_value(det, leaf, p, q) for p, q in pairs}


@dataclass
class KleeneResult:
    states: List[object]
    graph: VGraph
    converged: bool
    iterations: int

    def at(self, p, q):
        return self.graph.at(canon_key(p), canon_key(q))


def kleene_gfp(det: DetCoalgebra, states: Sequence[object],
               max_iters: int = 1000) -> KleeneResult:
    """Iterate the behaviour function from the all-top graph.

    The carrier must be closed under one-step successors.  On exact
    stabilization the result is the greatest fixpoint; otherwise the
    last iterate is returned flagged as an approximation (still a
    quantale-order upper bound on the fixpoint, i.e. a numeric lower
    bound on every distance).
    """
    states = list(dict.fromkeys(states))
    known = set(states)
    for s in states:
        for succ in det.successor_states(s):
            if succ not in known:
                raise ModelError(
                    f"carrier not closed under successors: {canon_key(s)} "
                    f"reaches {canon_key(succ)}")
    q = det.law.quantale
    pairs = [(p, r) for p in states for r in states]
    current = {pair: q.top for pair in pairs}
    converged = False
    iterations = 0
    for _ in range(max_iters):
        new = beh_apply(det, current, pairs)
        iterations += 1
        if new == current:
            converged = True
            break
        current = new
    keys = Carrier(tuple(canon_key(s) for s in states))
    n = len(states)
    dist = [[current[(states[i], states[j])] for j in range(n)] for i in range(n)]
    return KleeneResult(states, VGraph(q, keys, dist), converged, iterations)


def reachable_states(det: DetCoalgebra, seeds: Sequence[object],
                     max_states: int = 100_000) -> List[object]:
    """Successor-closure of the seeds (for finite determinized systems)."""
    out: List[object] = []
    seen: Set[object] = set()
    queue = list(seeds)
    while queue:
        s = queue.pop(0)
        if s in seen:
            continue
        if len(seen) >= max_states:
            raise BudgetError(f"reachable carrier exceeds {max_states} states")
        seen.add(s)
        out.append(s)
        queue.extend(det.successor_states(s))
    return out


# -- trace oracles ----------------------------------------------------------------

def _machine_out(det: DetCoalgebra, state):
    return det.successor(state).items[0].atom


def _machine_step(det: DetCoalgebra, state, label_index: int):
    return det.successor(state).items[1].items[label_index].payload


def _exception_probe(det: DetCoalgebra, state, word: Sequence[int]):
    """First-throw time and value along a word (None, None when the word
    never reaches a throwing state)."""
    current = state
    for k in range(len(word) + 1):
        step = det.successor(current)
        if isinstance(step, Inl):
            return k, step.item.atom
        if k < len(word):
            current = step.item.items[word[k]].payload
    return None, None


def trace_lower_bound(model: CoalgebraModel, p, q, max_words: int):
    """Numeric lower bound on the behavioural distance at (p, q) from
    all words of length strictly below ``max_words``.

    Monotone (numerically non-decreasing) in ``max_words``.
    """
    kind = model_kind(model)
    if kind is None:
        raise ModelError("trace bounds need a machine- or exception-shaped model")
    det = model.det()
    qt = model.quantale
    n_labels = len(model.labels)
    best = qt.top  # the empty word set gives the trivial numeric-0 bound
    for length in range(max_words):
        for word in product(range(n_labels), repeat=length):
            if kind == "machine":
                sp, sq = p, q
                for i in word:
                    sp = _machine_step(det, sp, i)
                    sq = _machine_step(det, sq, i)
                value = qt.residuate(_machine_out(det, sp), _machine_out(det, sq))
            else:
                value = _exception_word_distance(det, qt, p, q, word)
            best = qt.meet2(best, value)  # numeric max
    return best


def _exception_word_distance(det, qt, left_state, right_state, word):
    ec1, val1 = _exception_probe(det, left_state, word)
    ec2, val2 = _exception_probe(det, right_state, word)
    if ec2 is None:
        return qt.top
    if ec1 is None:
        return qt.bottom
    if ec1 == ec2:
        return qt.residuate(val1, val2)
    if ec1 > ec2:
        return qt.bottom
    return qt.top


# -- candidates, witnesses, certificates --------------------------------------------

@dataclass
class SparseDist:
    """Sparse candidate distance on determinized states; off-support
    pairs default to bottom (the trivial claim)."""

    quantale: Quantale
    entries: Dict[Tuple[object, object], object] = field(default_factory=dict)

    def __post_init__(self):
        self.entries = {pair: self.quantale.validate(v)
                        for pair, v in self.entries.items()}

    def value_at(self, pair):
        return self.entries.get(pair, self.quantale.bottom)

    def support(self):
        return list(self.entries)


#: A powerset witness is a tuple of (left, right) subset pairs; a
#: subdistribution witness is a tuple of (weight, (left, right)) triples.
Witness = tuple


@dataclass
class Certificate:
    monad: str
    candidate: SparseDist
    witnesses: Dict[Tuple[object, object], List[Witness]] = field(default_factory=dict)


class WitnessError(ValueError):
    """A decomposition witness fails its marginal conditions."""


def _check_marginals(monad: str, pair, witness: Witness):
    left, right = pair
    if monad == "powerset":
        lhs = finsubset(chain.from_iterable(a.members for a, _b in witness))
        rhs = finsubset(chain.from_iterable(b.members for _a, b in witness))
    else:
        lhs = _mix([(w, a) for w, (a, _b) in witness])
        rhs = _mix([(w, b) for w, (_a, b) in witness])
    if lhs != left:
        raise WitnessError(
            f"left marginal {canon_key(lhs)} differs from {canon_key(left)}")
    if rhs != right:
        raise WitnessError(
            f"right marginal {canon_key(rhs)} differs from {canon_key(right)}")


def _mix(weighted: Sequence[Tuple[Fraction, SubDist]]) -> SubDist:
    acc: List[Tuple[object, Fraction]] = []
    for w, dist in weighted:
        for x, v in dist.items():
            acc.append((x, w * v))
    return subdist(acc)


def _witness_value(q: Quantale, monad: str, lookup, witness: Witness):
    if monad == "powerset":
        return q.meet(lookup(a, b) for a, b in witness)  # numeric max
    total = Fraction(0)
    for w, (a, b) in witness:
        v = lookup(a, b)
        if is_inf(v):
            return q.bottom
        total += Fraction(w) * v
    return q.validate(total)


def witness_bound(cert: Certificate, pair, q: Quantale):
    """The best (quantale-largest, numerically smallest) available bound
    on the up-to function at a pair: the candidate entry itself (the
    unit witness) together with the value of every listed decomposition."""
    bounds = [cert.candidate.value_at(pair)]
    lookup = lambda a, b: cert.candidate.value_at((a, b))
    for witness in cert.witnesses.get(pair, []):
        _check_marginals(cert.monad, pair, witness)
        bounds.append(_witness_value(q, cert.monad, lookup, witness))
    return q.join(bounds)  # numeric min


@dataclass
class Verdict:
    accepted: bool
    failures: List[Tuple[object, object, str]] = field(default_factory=list)
    checked: int = 0

    def reason(self) -> str:
        if self.accepted:
            return f"accepted ({self.checked} support pairs verified)"
        pair_l, pair_r, why = self.failures[0]
        return (f"rejected at ({canon_key(pair_l)}, {canon_key(pair_r)}): {why}")


def certify(cert: Certificate, model: CoalgebraModel) -> Verdict:
    """Check that the candidate is a post-fixpoint up to the monad
    structure, which certifies it as a numeric upper bound on the
    behavioural distance at every pair.

    For each support pair, the one-step behaviour value is computed
    with identity leaves bounded by ``witness_bound`` at the successor
    pairs; the pair passes when the candidate entry is below that value
    in the quantale order (numerically at least it).  Off-support pairs
    carry the trivial bottom claim and need no check.
    """
    if cert.monad != model.monad:
        raise ModelError("certificate and model monads differ")
    q = model.quantale
    det = model.det()
    failures: List[Tuple[object, object, str]] = []
    support = cert.candidate.support()
    for pair in support:
        p_state, q_state = pair
        stated = cert.candidate.value_at(pair)
        try:
            leaf = lambda x, y: witness_bound(cert, (x, y), q)
            bound = beh_value(det, leaf, p_state, q_state)
        except (WitnessError, ModelError, KeyError) as exc:
            failures.append((p_state, q_state, str(exc)))
            continue
        if not q.leq(stated, bound):
            failures.append((
                p_state, q_state,
                f"one-step bound {canon_key(bound)} exceeds the stated "
                f"{canon_key(stated)} numerically"))
    return Verdict(not failures, failures, len(support))


# -- exact up-to oracle -------------------------------------------------------------

def _subsets_with_union(universe: Sequence[FinSubset], target: FinSubset):
    """All collections of the given subsets whose union is the target."""
    usable = [s for s in universe if all(m in target.members for m in s.members)]
    out = []
    for size in range(len(usable) + 1):
        for combo in combinations(usable, size):
            union = finsubset(chain.from_iterable(s.members for s in combo))
            if union == target:
                out.append(list(combo))
    return out


def u_exact(model: CoalgebraModel, cand: SparseDist, pair,
            budget: int = 10 ** 6):
    """Exact up-to value by enumerating every decomposition of the pair:
    the join (numeric min) over all monad values with the right
    flattened marginals of the lifted candidate distance.

    Only the powerset monad is enumerable; subdistribution decompositions
    form a continuum and are refused.
    """
    if model.monad != "powerset":
        raise BudgetError("exact up-to values are only enumerable for powerset")
    q = model.quantale
    base = list(model.states.elements)
    if (2 ** len(base)) ** 3 > budget:
        raise BudgetError(
            f"closing the candidate over {2 ** len(base)} monad states exceeds "
            f"the budget of {budget}")
    all_subsets = [finsubset(c) for size in range(len(base) + 1)
                   for c in combinations(base, size)]
    left_options = _subsets_with_union(all_subsets, pair[0])
    right_options = _subsets_with_union(all_subsets, pair[1])
    if len(left_options) * len(right_options) > budget:
        raise BudgetError(
            f"{len(left_options) * len(right_options)} decompositions exceed "
            f"the budget of {budget}")
    keys = Carrier(tuple(canon_key(s) for s in all_subsets))
    n = len(all_subsets)
    index = {canon_key(s): i for i, s in enumerate(all_subsets)}
    dist = [[cand.value_at((all_subsets[i], all_subsets[j])) for j in range(n)]
            for i in range(n)]
    graph = VGraph(q, keys, dist)
    closed = metric_closure(graph)

    def lifted(collection_a, collection_b):
        # Directed Hausdorff over the candidate graph on monad states.
        return q.meet(
            q.join(closed.at_idx(index[canon_key(a)], index[canon_key(b)])
                   for a in collection_a)
            for b in collection_b)

    return q.join(lifted(t1, t2)
                  for t1 in left_options for t2 in right_options)
