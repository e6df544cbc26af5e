"""Inductive exchange laws between a monad and a polynomial functor,
determinization, and the law suites that license the lifting.

The coproduct case routes through a prioritizing transformation that
keeps the left summand whenever it is inhabited: for the powerset
monad the left intersection (if non-empty), for the subdistribution
monad the restriction to the left part of the support.  ``law_suite``
checks the monad/functor exchange diagrams, the compatibility and
well-behavedness of the prioritizing transformation, the evaluation
exchange identity, and non-expansiveness of the exchange components
between the two composite liftings.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Dict, List, Optional, Sequence, Set

from .canon import canon_key
from .functor import (ConstF, ConstLeaf, CoprodF, IdF, IdLeaf, Inl, Inr, MonadEval,
                      ProdF, StarEval, Tup, build_lambda, eval_map,
                      iter_payloads, map_payloads, term_key)
from .galois import Grid, gamma_enum, grid_values
from .monadlift import (SubDist, ev_monad, finsubset,
                        kantorovich_lp, monad_map, monad_mult, monad_unit, subdist)
from .quantale import EXT_PLUS, UNIT_OPLUS, Quantale
from .suites import CheckResult, all_bool_graphs
from .vgraph import Carrier, VGraph


class StateBudgetError(RuntimeError):
    """Determinization would explore more states than allowed."""


PRIORITY_LEFT = "priority-left"
ALWAYS_LEFT = "always-left"  # law-suite mutant: drops the priority test


@dataclass
class DistLaw:
    """An exchange law for a monad over a polynomial functor.

    Constant nodes must be quantale-valued; their algebra is the monad
    evaluation map (numeric sup for powerset, expectation for
    subdistributions), which is an algebra homomorphism into itself.
    """

    functor: object
    monad: str
    quantale: Quantale
    g_variant: str = PRIORITY_LEFT

    def __post_init__(self):
        _check_value_consts(self.functor)
        if self.g_variant not in (PRIORITY_LEFT, ALWAYS_LEFT):
            raise ValueError(f"unknown g variant {self.g_variant!r}")


def _check_value_consts(functor):
    if isinstance(functor, ConstF):
        if functor.atoms is not None:
            raise ValueError(
                "exchange laws require quantale-valued constant nodes "
                "(no canonical algebra exists on named atoms)")
    elif isinstance(functor, ProdF):
        for part in functor.parts:
            _check_value_consts(part)
    elif isinstance(functor, CoprodF):
        _check_value_consts(functor.left)
        _check_value_consts(functor.right)
    elif not isinstance(functor, IdF):
        raise TypeError(f"not a functor expression: {functor!r}")


def apply_g(monad: str, t, in_left: Callable[[object], bool],
            variant: str = PRIORITY_LEFT):
    """The prioritizing transformation: tag and restrict a monad value
    over a disjoint union.

    Returns (side, restricted) where side is 'left' when the left part
    is inhabited (always, for the mutant variant), 'right' otherwise.
    """
    if monad == "powerset":
        left_members = [m for m in t.members if in_left(m)]
        if variant == ALWAYS_LEFT or left_members:
            return "left", finsubset(left_members)
        return "right", t
    left_pairs = [(x, w) for x, w in t.items() if in_left(x)]
    if variant == ALWAYS_LEFT or left_pairs:
        return "left", SubDist(tuple(left_pairs))
    return "right", t


def apply_g_carriers(monad: str, part1: Sequence[str], part2: Sequence[str], t,
                     variant: str = PRIORITY_LEFT):
    """Carrier-level wrapper: elements are split by membership in part1."""
    left = set(part1)
    overlap = left & set(part2)
    if overlap:
        raise ValueError(f"carriers are not disjoint: {sorted(overlap)}")
    return apply_g(monad, t, lambda x: x in left, variant)


def apply_zeta(law: DistLaw, t):
    """One component of the exchange law: a monad value of F-terms
    becomes an F-term over monad values."""
    return _zeta(law, law.functor, t)


def _members(monad: str, t):
    return t.members if monad == "powerset" else t.support()


def _zeta(law: DistLaw, functor, t):
    monad = law.monad
    if isinstance(functor, ConstF):
        values = monad_map(monad, lambda m: m.atom, t)
        return ConstLeaf(ev_monad(monad, values, law.quantale))
    if isinstance(functor, IdF):
        return IdLeaf(monad_map(monad, lambda m: m.payload, t))
    if isinstance(functor, ProdF):
        parts = []
        for i, part in enumerate(functor.parts):
            parts.append(_zeta(law, part, monad_map(monad, lambda m: m.items[i], t)))
        return Tup(tuple(parts))
    if isinstance(functor, CoprodF):
        side, restricted = apply_g(monad, t, lambda m: isinstance(m, Inl),
                                   law.g_variant)
        if side == "left":
            stripped = monad_map(monad, lambda m: m.item, restricted)
            return Inl(_zeta(law, functor.left, stripped))
        stripped = monad_map(monad, lambda m: m.item, restricted)
        return Inr(_zeta(law, functor.right, stripped))
    raise TypeError(f"not a functor expression: {functor!r}")


# -- determinization -----------------------------------------------------------

@dataclass
class DetCoalgebra:
    """Memoized determinized transition structure over monad states."""

    law: DistLaw
    transitions: Dict[str, object]
    memo: Dict[object, object] = field(default_factory=dict)
    frontier: Set[object] = field(default_factory=set)
    max_states: int = 100_000

    def successor(self, state):
        if state in self.memo:
            return self.memo[state]
        if len(self.memo) >= self.max_states:
            raise StateBudgetError(
                f"determinization exceeded the budget of {self.max_states} states")
        lifted = monad_map(self.law.monad, lambda x: self.transitions[x], state)
        step = apply_zeta(self.law, lifted)
        out = map_payloads(step, lambda tt: monad_mult(self.law.monad, tt))
        self.memo[state] = out
        self.frontier.discard(state)
        return out

    def successor_states(self, state):
        return list(iter_payloads(self.successor(state)))


def determinize(law: DistLaw, transitions: Dict[str, object],
                seeds: Sequence[object], depth: Optional[int] = None,
                max_states: int = 100_000) -> DetCoalgebra:
    """Memoize the determinized step on everything reachable from the
    seeds within ``depth`` steps (to exhaustion when depth is None).

    States left unexplored (because of the depth bound) are reported in
    the frontier.  Exceeding ``max_states`` raises StateBudgetError
    with the count rather than truncating silently.
    """
    det = DetCoalgebra(law, transitions, max_states=max_states)
    level = list(dict.fromkeys(seeds))
    steps = 0
    while level:
        if depth is not None and steps > depth:
            det.frontier.update(level)
            break
        next_level = []
        seen_next = set()
        for state in level:
            if state in det.memo:
                continue
            for succ in det.successor_states(state):
                if succ not in det.memo and succ not in seen_next:
                    seen_next.add(succ)
                    next_level.append(succ)
        level = next_level
        steps += 1
    return det


# -- law suites -----------------------------------------------------------------

def _f_terms_over(functor, payloads, const_vals):
    """All F-terms over the given payloads with constants from const_vals."""
    if isinstance(functor, ConstF):
        return [ConstLeaf(v) for v in const_vals]
    if isinstance(functor, IdF):
        return [IdLeaf(p) for p in payloads]
    if isinstance(functor, ProdF):
        parts = [_f_terms_over(p, payloads, const_vals) for p in functor.parts]
        return [Tup(combo) for combo in product(*parts)]
    if isinstance(functor, CoprodF):
        return ([Inl(t) for t in _f_terms_over(functor.left, payloads, const_vals)]
                + [Inr(t) for t in _f_terms_over(functor.right, payloads, const_vals)])
    raise TypeError(functor)


def _small_subsets(items, max_size):
    out = [finsubset([])]
    for size in range(1, max_size + 1):
        out.extend(finsubset(c) for c in combinations(items, size))
    return out


def _sample_subdist(rng: random.Random, items, denom: int = 4,
                    max_support: int = 2) -> SubDist:
    size = rng.randint(0, max_support)
    chosen = rng.sample(list(items), min(size, len(items)))
    remaining = denom
    weights = []
    for x in chosen:
        w = rng.randint(0, remaining)
        remaining -= w
        weights.append((x, Fraction(w, denom)))
    return subdist(weights)


def _tvalues(law: DistLaw, rng: random.Random, items, count: int, max_size: int = 2):
    if law.monad == "powerset":
        return _small_subsets(items, max_size)
    out = []
    seen = set()
    for _ in range(count):
        t = _sample_subdist(rng, items)
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def _unit_compat(law: DistLaw, terms) -> CheckResult:
    name = f"{law.monad}/{_shape_name(law)}: exchange respects the unit"
    for t in terms:
        lhs = apply_zeta(law, monad_unit(law.monad, t))
        rhs = map_payloads(t, lambda p: monad_unit(law.monad, p))
        if lhs != rhs:
            return CheckResult(name, False, f"term {term_key(t)}")
    return CheckResult(name, True)


def _pentagon(law: DistLaw, doubles) -> CheckResult:
    name = f"{law.monad}/{_shape_name(law)}: exchange respects the multiplication"
    for tt in doubles:
        lhs = apply_zeta(law, monad_mult(law.monad, tt))
        inner = monad_map(law.monad, lambda t: apply_zeta(law, t), tt)
        rhs = map_payloads(apply_zeta(law, inner),
                           lambda nested: monad_mult(law.monad, nested))
        if lhs != rhs:
            return CheckResult(name, False, f"input {canon_key(tt)}")
    return CheckResult(name, True)


def _g_compat_unit(law: DistLaw) -> CheckResult:
    name = f"{law.monad} ({law.g_variant}): prioritizer compatible with the unit"
    elements = ["l_a", "l_b", "r_a", "r_b"]
    in_left = lambda x: x.startswith("l")
    for x in elements:
        side, restricted = apply_g(law.monad, monad_unit(law.monad, x), in_left,
                                   law.g_variant)
        want_side = "left" if in_left(x) else "right"
        if side != want_side or restricted != monad_unit(law.monad, x):
            return CheckResult(name, False, f"unit at {x}: got {side} {canon_key(restricted)}")
    return CheckResult(name, True)


def _g_as_tagged(law: DistLaw, t, in_left):
    """Run g and re-tag elements so both sides live in one set again."""
    side, restricted = apply_g(law.monad, t, in_left, law.g_variant)
    return side, restricted


def _g_compat_mult(law: DistLaw, rng: random.Random) -> CheckResult:
    name = f"{law.monad} ({law.g_variant}): prioritizer compatible with the multiplication"
    elements = ["l_a", "l_b", "r_a", "r_b"]
    in_left = lambda x: x.startswith("l")
    inners = _tvalues(law, rng, elements, 12)
    doubles = _tvalues(law, rng, inners, 40) if law.monad == "subdist" else \
        _small_subsets(inners, 2)
    for tt in doubles:
        lhs = _g_as_tagged(law, monad_mult(law.monad, tt), in_left)
        # Right side: apply g inside, tag, apply g at the outer level on
        # the tags, then flatten the surviving side.
        tagged = monad_map(law.monad, lambda t: _g_as_tagged(law, t, in_left), tt)
        outer_side, outer = apply_g(law.monad, tagged,
                                    lambda pair: pair[0] == "left", law.g_variant)
        flattened = monad_mult(law.monad,
                               monad_map(law.monad, lambda pair: pair[1], outer))
        rhs = (outer_side, flattened)
        if lhs != rhs:
            return CheckResult(name, False,
                               f"input {canon_key(tt)}: {lhs} vs {rhs}")
    return CheckResult(name, True)


def _well_behaved(law: DistLaw, rng: random.Random) -> CheckResult:
    """The three squares relating g to the monad evaluation map.

    These are quantale-specific statements: the expectation square
    needs the extended reals (a positive weight times bottom = infinity
    must stay bottom), so the subdistribution check always runs there;
    the powerset check runs over the law's own quantale.
    """
    q = EXT_PLUS if law.monad == "subdist" else law.quantale
    name = f"{law.monad} over {q.ident} ({law.g_variant}): prioritizer well-behaved"
    left_els = ["l_a", "l_b"]
    right_els = ["r_a", "r_b"]
    in_left = lambda x: x.startswith("l")
    vals = grid_values(q, Grid(2, cap=1))
    fs = [dict(zip(left_els + right_els, combo))
          for combo in _sampled_combos(rng, vals, 4, 40)]
    ts = _tvalues(law, rng, left_els + right_els, 40)

    def run_side(t, bracket):
        mapped = monad_map(law.monad, bracket, t)
        return ev_monad(law.monad, mapped, q)

    for t in ts:
        side, restricted = apply_g(law.monad, t, in_left, law.g_variant)
        for f in fs:
            cases = [
                ("left-eval", lambda x: f[x] if in_left(x) else q.top,
                 (lambda: run_side(restricted, lambda x: f[x]) if side == "left" else q.top)),
                ("right-eval", lambda x: q.bottom if in_left(x) else f[x],
                 (lambda: q.bottom if side == "left"
                  else run_side(restricted, lambda x: f[x]))),
                ("split", lambda x: q.bottom if in_left(x) else q.top,
                 (lambda: q.bottom if side == "left" else q.top)),
            ]
            for tag, bracket, via_g in cases:
                direct = run_side(t, bracket)
                routed = via_g()
                if direct != routed:
                    return CheckResult(
                        name, False,
                        f"{tag} square at {canon_key(t)}, f={ {k: canon_key(v) for k, v in f.items()} }: "
                        f"{canon_key(direct)} vs {canon_key(routed)}")
    return CheckResult(name, True)


def _sampled_combos(rng, vals, width, count):
    seen = set()
    out = []
    for _ in range(count):
        combo = tuple(rng.choice(vals) for _ in range(width))
        if combo not in seen:
            seen.add(combo)
            out.append(combo)
    return out


def _exchange_identity(law: DistLaw, rng: random.Random) -> CheckResult:
    """Composite evaluation maps agree across the exchange component."""
    q = law.quantale
    name = f"{law.monad}/{_shape_name(law)}: evaluation-map exchange identity"
    vals = grid_values(q, Grid(2, cap=1))
    f_terms = _f_terms_over(law.functor, vals, vals)
    if len(f_terms) > 24:
        f_terms = f_terms[:: max(1, len(f_terms) // 24)]
    inputs = _tvalues(law, rng, f_terms, 60)
    lam_f = build_lambda(law.functor)
    ev_t = MonadEval(law.monad)

    def via_zeta_vector(ev):
        return tuple(canon_key(eval_map(q, StarEval(ev, ev_t), apply_zeta(law, t)))
                     for t in inputs)

    def direct_vector(ev):
        return tuple(canon_key(eval_map(q, StarEval(ev_t, ev), t)) for t in inputs)

    lhs = sorted(via_zeta_vector(ev) for ev in lam_f)
    rhs = sorted(direct_vector(ev) for ev in lam_f)
    if lhs != rhs:
        return CheckResult(name, False, "composite evaluations differ on grid inputs")
    return CheckResult(name, True)


def _const_algebra_hom(law: DistLaw, rng: random.Random) -> CheckResult:
    q = law.quantale
    name = f"{law.monad} over {q.ident}: constant algebras are evaluation homomorphisms"
    vals = grid_values(q, Grid(2, cap=1))
    for t in _tvalues(law, rng, vals, 30):
        # Identity evaluation on quantale-valued constants: the algebra
        # itself must commute with the monad evaluation map.
        if ev_monad(law.monad, t, q) != ev_monad(law.monad, monad_map(law.monad, lambda v: v, t), q):
            return CheckResult(name, False, canon_key(t))
    return CheckResult(name, True)


def _zeta_nonexpansive_boolean(law: DistLaw) -> CheckResult:
    """Exact non-expansiveness of the exchange component between the two
    composite liftings, over the boolean quantale (powerset only)."""
    from .functor import kantorovich_generic

    name = f"{law.monad}/{_shape_name(law)}: exchange component non-expansive (boolean exact)"
    if law.monad != "powerset":
        return CheckResult(name, True, "skipped: expectation is not boolean-valued")
    from .quantale import BOOLEAN

    bool_law = DistLaw(law.functor, law.monad, BOOLEAN, law.g_variant)
    c = Carrier(("x", "y"))
    f_terms = _f_terms_over(law.functor, list(c.elements), [False, True])
    tf_terms = _small_subsets(f_terms, 2)[:12]
    lam_f = build_lambda(law.functor)
    ev_t = MonadEval(law.monad)
    tf_evals = [StarEval(ev_t, ev) for ev in lam_f]
    ft_evals = [StarEval(ev, ev_t) for ev in lam_f]

    def tf_fmap(t, p):
        return monad_map(law.monad,
                         lambda term: map_payloads(term, lambda x: p[x]), t)

    def ft_fmap(t, p):
        return map_payloads(t, lambda tv: monad_map(law.monad, lambda x: p[x], tv))

    for d in all_bool_graphs(c):
        preds = gamma_enum(d, Grid(1))
        d_tf = kantorovich_generic(None, tf_evals, d, preds, tf_terms,
                                   fmap_fn=tf_fmap)
        ft_terms = [apply_zeta(bool_law, t) for t in tf_terms]
        # The images may collide; key them by position instead.
        n = len(tf_terms)
        value = {}
        for ev in ft_evals:
            for f in preds.preds:
                scores = [eval_map(BOOLEAN, ev, ft_fmap(t, f)) for t in ft_terms]
                for i in range(n):
                    for j in range(n):
                        key = (i, j)
                        cur = value.get(key, BOOLEAN.top)
                        value[key] = BOOLEAN.meet2(
                            cur, BOOLEAN.residuate(scores[i], scores[j]))
        for i in range(n):
            for j in range(n):
                if not BOOLEAN.leq(d_tf.dist[i][j], value.get((i, j), BOOLEAN.top)):
                    return CheckResult(
                        name, False,
                        f"d={d.dist} at pair ({canon_key(tf_terms[i])}, {canon_key(tf_terms[j])})")
    return CheckResult(name, True)


def _zeta_nonexpansive_machine_lp(law: DistLaw, rng: random.Random) -> CheckResult:
    """Exact check for the product-shaped subdistribution law: both
    composite liftings reduce to output differences plus per-label
    transport problems, and the exchange component preserves them."""
    name = f"{law.monad}/{_shape_name(law)}: exchange component non-expansive (transport exact)"
    if law.monad != "subdist" or not isinstance(law.functor, ProdF):
        return CheckResult(name, True, "skipped: shape covered elsewhere")
    q = law.quantale
    c = Carrier(("x", "y"))
    labels = law.functor.parts[1].labels or ("a",)
    vals = [Fraction(0), Fraction(1, 2), Fraction(1)]
    f_terms = _f_terms_over(law.functor, list(c.elements), vals)
    grid = [Fraction(i, 4) for i in range(5)]
    for _ in range(6):
        d = VGraph(q, c, [[rng.choice(grid) for _ in c.elements] for _ in c.elements])
        dists = [t for t in (_sample_subdist(rng, f_terms, 4, 2) for _ in range(24))
                 if t.mass() == 1][:6]
        for mu in dists:
            for nu in dists:
                out_diff = q.residuate(
                    ev_monad("subdist", monad_map("subdist", lambda t: t.items[0].atom, mu), q),
                    ev_monad("subdist", monad_map("subdist", lambda t: t.items[0].atom, nu), q))
                label_vals = []
                for i, _lab in enumerate(labels):
                    push = lambda t, i=i: t.items[1].items[i].payload
                    label_vals.append(kantorovich_lp(
                        d, monad_map("subdist", push, mu), monad_map("subdist", push, nu)))
                lhs = q.meet([out_diff] + label_vals)
                zm, zn = apply_zeta(law, mu), apply_zeta(law, nu)
                rhs_out = q.residuate(zm.items[0].atom, zn.items[0].atom)
                rhs_vals = [kantorovich_lp(d, zm.items[1].items[i].payload,
                                           zn.items[1].items[i].payload)
                            for i in range(len(labels))]
                rhs = q.meet([rhs_out] + rhs_vals)
                if lhs != rhs or not q.leq(lhs, rhs):
                    return CheckResult(name, False,
                                       f"{canon_key(mu)} vs {canon_key(nu)}")
    return CheckResult(name, True)


def _shape_name(law: DistLaw) -> str:
    f = law.functor
    if isinstance(f, ProdF):
        return "product-shape"
    if isinstance(f, CoprodF):
        return "coproduct-shape"
    return type(f).__name__


def law_suite(law: DistLaw, seed: int = 0, samples: int = 100) -> List[CheckResult]:
    """Run every exchange-law check for one monad/functor combination."""
    rng = random.Random(seed)
    q = law.quantale
    vals = grid_values(q, Grid(2, cap=1))
    payloads = ["s0", "s1"]
    f_terms = _f_terms_over(law.functor, payloads, vals)
    if len(f_terms) > 12:
        f_terms = f_terms[:: max(1, len(f_terms) // 12)]
    singles = _tvalues(law, rng, f_terms, samples)
    doubles = (_small_subsets(singles, 2)[:150] if law.monad == "powerset"
               else _tvalues(law, rng, singles, samples))
    results = [
        _unit_compat(law, f_terms),
        _pentagon(law, doubles),
        _g_compat_unit(law),
        _g_compat_mult(law, rng),
        _well_behaved(law, rng),
        _const_algebra_hom(law, rng),
        _exchange_identity(law, rng),
        _zeta_nonexpansive_boolean(law),
        _zeta_nonexpansive_machine_lp(law, rng),
    ]
    return results


def case_study_laws() -> Dict[str, DistLaw]:
    """The three standard law instances exercised by the suite."""
    from .functor import exception_functor, machine_functor

    return {
        "machine-subdist": DistLaw(machine_functor(["a"]), "subdist", UNIT_OPLUS),
        "exception-powerset": DistLaw(exception_functor(["a", "b"]), "powerset",
                                      UNIT_OPLUS),
        "exception-subdist": DistLaw(exception_functor(["a"]), "subdist", EXT_PLUS),
    }
