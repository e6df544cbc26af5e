"""Reusable property suites over fixed enumerable grids.

Each suite returns a list of CheckResult rows; a row failing carries a
counterexample string.  The suites are shared between the test
harness, the acceptance gate, and the command line front end.  Grids
are fixed (no random reals) so that any failure is reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import List, Sequence

from .canon import canon_key
from .galois import (Grid, Pred, PredSet, alpha, gamma_enum, grid_values,
                     reindex_preds)
from .quantale import BOOLEAN, EXT_PLUS, UNIT_OPLUS, Quantale
from .vgraph import (Carrier, FiniteMap, VGraph, carrier, direct_image,
                     graph_equal, graph_leq, is_vcat, metric_closure, reindex)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        suffix = f"  [{self.detail}]" if (self.detail and not self.passed) else ""
        return f"{status}  {self.name}{suffix}"


def _all(name: str, cases, predicate) -> CheckResult:
    for case in cases:
        if not predicate(case):
            return CheckResult(name, False, f"counterexample: {case!r}")
    return CheckResult(name, True)


# -- quantale laws -----------------------------------------------------------

def residuation_lemma_suite(q: Quantale, values: Sequence) -> List[CheckResult]:
    """The ten internal-hom properties, checked on all value triples."""
    vals = list(values)
    triples = list(product(vals, repeat=3))
    res = q.residuate
    out = [
        _all(f"{q.ident}: largest-u characterization (item 1)", triples,
             lambda c: q.leq(q.tensor(res(c[1], c[2]), c[1]), c[2])
             and all(not q.leq(q.tensor(u, c[1]), c[2]) or q.leq(u, res(c[1], c[2]))
                     for u in vals)),
        _all(f"{q.ident}: reflexivity (item 2)", vals,
             lambda v: q.leq(q.unit, res(v, v))),
        _all(f"{q.ident}: triangle (item 3)", triples,
             lambda c: q.leq(q.tensor(res(c[0], c[1]), res(c[1], c[2])), res(c[0], c[2]))),
        _all(f"{q.ident}: unit law (item 4)", vals,
             lambda w: res(q.unit, w) == w),
        _all(f"{q.ident}: from-bottom (item 5)", vals,
             lambda w: res(q.bottom, w) == q.top),
        _all(f"{q.ident}: to-top (item 6)", vals,
             lambda v: res(v, q.top) == q.top),
        CheckResult(f"{q.ident}: top-to-bottom (item 7)",
                    res(q.top, q.bottom) == q.bottom),
        _all(f"{q.ident}: left self-distribution bound (item 8)", triples,
             lambda c: q.leq(res(c[0], c[2]), res(res(c[1], c[0]), res(c[1], c[2])))),
        _all(f"{q.ident}: right self-distribution bound (item 9)", triples,
             lambda c: q.leq(res(c[0], c[2]), res(res(c[2], c[1]), res(c[0], c[1])))),
        _all(f"{q.ident}: meet-family bound (item 10)",
             list(product(vals, repeat=4))[: 160000],
             lambda c: q.leq(q.meet([res(c[0], c[1]), res(c[2], c[3])]),
                             res(q.meet([c[0], c[2]]), q.meet([c[1], c[3]])))),
    ]
    return out


def adjunction_suite(q: Quantale, values: Sequence) -> List[CheckResult]:
    triples = list(product(list(values), repeat=3))
    return [_all(
        f"{q.ident}: tensor-residuation adjunction", triples,
        lambda c: q.leq(q.tensor(c[0], c[1]), c[2]) == q.leq(c[1], q.residuate(c[0], c[2])))]


def distributivity_suite(q: Quantale, values: Sequence) -> List[CheckResult]:
    vals = list(values)
    cases = [(a, rest) for a in vals
             for rest in [vals[:0], vals[:1], vals[:3], vals[-3:]]]
    return [_all(
        f"{q.ident}: tensor distributes over finite joins", cases,
        lambda c: q.tensor(c[0], q.join(c[1])) == q.join(q.tensor(c[0], b) for b in c[1]))]


def quantale_suite(grid: int = 8, ext_cap: int = 4) -> List[CheckResult]:
    out: List[CheckResult] = []
    value_sets = {
        BOOLEAN: [False, True],
        UNIT_OPLUS: grid_values(UNIT_OPLUS, Grid(grid)),
        EXT_PLUS: grid_values(EXT_PLUS, Grid(4, cap=ext_cap)),
    }
    for q, vals in value_sets.items():
        out.extend(residuation_lemma_suite(q, vals))
        out.extend(adjunction_suite(q, vals))
        out.extend(distributivity_suite(q, vals))
    return out


# -- helpers for exhaustive boolean graph/predicate enumeration ---------------

def all_bool_graphs(c: Carrier) -> List[VGraph]:
    n = len(c)
    out = []
    for bits in product([False, True], repeat=n * n):
        dist = [list(bits[i * n:(i + 1) * n]) for i in range(n)]
        out.append(VGraph(BOOLEAN, c, dist))
    return out


def all_bool_preds(c: Carrier) -> List[Pred]:
    els = c.elements
    return [dict(zip(els, combo)) for combo in product([False, True], repeat=len(els))]


def all_maps(dom: Carrier, cod: Carrier) -> List[FiniteMap]:
    out = []
    for combo in product(cod.elements, repeat=len(dom)):
        out.append(FiniteMap(dom, cod, dict(zip(dom.elements, combo))))
    return out


def _pred_key(p: Pred) -> str:
    return "|".join(f"{x}={canon_key(v)}" for x, v in sorted(p.items()))


def _predset_keys(preds: PredSet) -> frozenset:
    return frozenset(_pred_key(p) for p in preds.preds)


# -- Galois-pair laws ----------------------------------------------------------

def galois_suite(max_size: int = 3) -> List[CheckResult]:
    """Boolean-exact checks of the generating/observing adjunction and
    its consequences, exhaustively on small carriers."""
    out: List[CheckResult] = []
    full = Grid(1)

    # Galois connection + co-closure on carriers of size 2 and 3.
    for n in range(2, max_size + 1):
        c = carrier([f"e{i}" for i in range(n)])
        graphs = all_bool_graphs(c)
        preds = all_bool_preds(c)
        gammas = {}
        for idx, d in enumerate(graphs):
            gammas[idx] = _predset_keys(gamma_enum(d, full))
        ok_gc = True
        witness = ""
        pred_keys = [_pred_key(p) for p in preds]
        for pbits in product([False, True], repeat=len(preds)):
            chosen = [preds[i] for i in range(len(preds)) if pbits[i]]
            chosen_keys = frozenset(pred_keys[i] for i in range(len(preds)) if pbits[i])
            ag = alpha(PredSet(BOOLEAN, c, chosen))
            for idx, d in enumerate(graphs):
                lhs = graph_leq(d, ag)
                rhs = chosen_keys <= gammas[idx]
                if lhs != rhs:
                    ok_gc = False
                    witness = f"n={n} S={sorted(chosen_keys)} d={d.dist}"
                    break
            if not ok_gc:
                break
        out.append(CheckResult(f"boolean Galois connection, {n}-point carrier",
                               ok_gc, witness))

        ok_cc = True
        witness = ""
        for d in graphs:
            if not graph_equal(alpha(gamma_enum(d, full)), metric_closure(d)):
                ok_cc = False
                witness = f"d={d.dist}"
                break
        out.append(CheckResult(
            f"boolean co-closure equals metric closure, {n}-point carrier",
            ok_cc, witness))

        ok_cat = all(is_vcat(alpha(PredSet(BOOLEAN, c, list(sub))))
                     for sub in [preds[:0], preds[:1], preds[:3], preds])
        out.append(CheckResult(
            f"alpha lands in V-Cat, {n}-point carrier", ok_cat))

    # Naturality of alpha; lax naturality of gamma, strict on V-categories.
    x2 = carrier(["a0", "a1"])
    x3 = carrier(["b0", "b1", "b2"])
    ok_nat = True
    ok_lax = True
    ok_strict = True
    nat_wit = lax_wit = strict_wit = ""
    for dom, cod in [(x2, x2), (x2, x3), (x3, x2)]:
        cod_preds = all_bool_preds(cod)
        for f in all_maps(dom, cod):
            for pbits in product([False, True], repeat=len(cod_preds)):
                chosen = [cod_preds[i] for i in range(len(cod_preds)) if pbits[i]]
                pset = PredSet(BOOLEAN, cod, chosen)
                lhs = alpha(reindex_preds(pset, f))
                rhs = reindex(f, alpha(pset))
                if not graph_equal(lhs, rhs):
                    ok_nat = False
                    nat_wit = f"f={f.assignment} S={[sorted(p.items()) for p in chosen]}"
            for d in all_bool_graphs(cod):
                pulled = _predset_keys(reindex_preds(gamma_enum(d, full), f))
                direct = _predset_keys(gamma_enum(reindex(f, d), full))
                if not pulled <= direct:
                    ok_lax = False
                    lax_wit = f"f={f.assignment} d={d.dist}"
                if is_vcat(d) and pulled != direct:
                    ok_strict = False
                    strict_wit = f"f={f.assignment} d={d.dist}"
    out.append(CheckResult("alpha is natural (boolean, small carriers)", ok_nat, nat_wit))
    out.append(CheckResult("gamma is laxly natural (boolean)", ok_lax, lax_wit))
    out.append(CheckResult("gamma is natural on V-categories (boolean)",
                           ok_strict, strict_wit))

    # Direct image is left adjoint to reindexing on the fibre lattices.
    ok_adj = True
    adj_wit = ""
    for dom, cod in [(x2, x2), (x3, x2)]:
        for f in all_maps(dom, cod):
            for d in all_bool_graphs(dom):
                sigma = direct_image(f, d)
                for e in all_bool_graphs(cod):
                    if graph_leq(sigma, e) != graph_leq(d, reindex(f, e)):
                        ok_adj = False
                        adj_wit = f"f={f.assignment} d={d.dist} e={e.dist}"
    out.append(CheckResult("direct image adjoint to reindexing (boolean)",
                           ok_adj, adj_wit))
    return out


# -- non-expansive extension properties ------------------------------------------

# -- polynomial-functor laws ----------------------------------------------------

def polyfunctor_suite() -> List[CheckResult]:
    """Boolean-exact compositionality and construction laws for the two
    case-study functor shapes."""
    from fractions import Fraction
    from .functor import (ConstLeaf, CoprodF, IdF, IdLeaf, Inl, Inr, Tup,
                          build_lambda, check_compositionality, const_values,
                          exception_functor, lift_closed, machine_functor)
    from .vgraph import graph_from_entries

    out: List[CheckResult] = []
    c = carrier(["x", "y"])
    shapes = {
        "machine": machine_functor(["a"]),
        "exception": exception_functor(["a"]),
    }
    inners = {
        "identity": (IdF(), [IdLeaf("x"), IdLeaf("y")]),
        "coproduct": (CoprodF(const_values(), IdF()),
                      [Inl(ConstLeaf(False)), Inl(ConstLeaf(True)),
                       Inr(IdLeaf("x")), Inr(IdLeaf("y"))]),
    }
    for shape_name, outer in shapes.items():
        for inner_name, (inner, g_terms) in inners.items():
            if shape_name == "machine":
                fg_terms = [Tup((ConstLeaf(b), Tup((IdLeaf(g),))))
                            for b in (False, True) for g in g_terms]
            else:
                fg_terms = [Inl(ConstLeaf(b)) for b in (False, True)] + \
                    [Inr(Tup((IdLeaf(g),))) for g in g_terms]
            lam_f = build_lambda(outer)
            lam_g = build_lambda(inner)
            ok = True
            witness = ""
            for d in all_bool_graphs(c):
                report = check_compositionality(outer, lam_f, inner, lam_g, d,
                                                g_terms, fg_terms)
                if not (report["equal"] and report["composed_below_combined"]):
                    ok = False
                    witness = f"d={d.dist}"
                    break
            out.append(CheckResult(
                f"compositionality: {shape_name} after {inner_name} "
                "(boolean, exhaustive)", ok, witness))

    # Associativity of the coproduct evaluation-set construction, read
    # off the induced lifted distances.
    d = graph_from_entries(UNIT_OPLUS, c, {("x", "y"): Fraction(1, 2)},
                           default=Fraction(0))
    left_assoc = CoprodF(CoprodF(const_values(), IdF()), IdF())
    right_assoc = CoprodF(const_values(), CoprodF(IdF(), IdF()))
    ltr = [Inl(Inl(ConstLeaf(Fraction(1, 4)))), Inl(Inr(IdLeaf("x"))),
           Inr(IdLeaf("y"))]
    rtr = [Inl(ConstLeaf(Fraction(1, 4))), Inr(Inl(IdLeaf("x"))),
           Inr(Inr(IdLeaf("y")))]
    assoc_ok = lift_closed(left_assoc, d, ltr).dist == \
        lift_closed(right_assoc, d, rtr).dist
    out.append(CheckResult("coproduct evaluation sets associate "
                           "(via lifted distances)", assoc_ok))
    return out


def _random_vcat(rng: random.Random, q: Quantale, c: Carrier, vals) -> VGraph:
    n = len(c)
    dist = [[rng.choice(vals) for _ in range(n)] for _ in range(n)]
    return metric_closure(VGraph(q, c, dist))


def extension_suite(instances: int = 120, seed: int = 7) -> List[CheckResult]:
    from .galois import extension_largest, extension_smallest

    rng = random.Random(seed)
    quantales = {
        BOOLEAN: [False, True],
        UNIT_OPLUS: grid_values(UNIT_OPLUS, Grid(4)),
        EXT_PLUS: grid_values(EXT_PLUS, Grid(2, cap=2)),
    }
    checked = 0
    for _ in range(instances):
        q = rng.choice(list(quantales))
        vals = quantales[q]
        size = rng.choice([2, 3])
        c = carrier([f"p{i}" for i in range(size)])
        d = _random_vcat(rng, q, c, vals)
        sub = sorted(rng.sample(list(c.elements), rng.randint(1, size)))
        # Restrictions of globally non-expansive maps are non-expansive.
        base = rng.choice(list(c.elements))
        f = {x: d.at(base, x) for x in sub}
        big = extension_largest(d, sub, f)
        small = extension_smallest(d, sub, f)
        for g, tag in ((big, "largest"), (small, "smallest")):
            for x in sub:
                if g[x] != f[x]:
                    return [CheckResult("extension suite", False,
                                        f"{tag} does not agree on the sub-carrier")]
            for x in c:
                for y in c:
                    if not q.leq(d.at(x, y), q.residuate(g[x], g[y])):
                        return [CheckResult("extension suite", False,
                                            f"{tag} extension is expansive at ({x},{y})")]
        # Extremality against every grid-valued non-expansive extension.
        free = [x for x in c if x not in sub]
        for combo in product(vals, repeat=len(free)):
            h = dict(f)
            h.update(dict(zip(free, combo)))
            ok = all(q.leq(d.at(x, y), q.residuate(h[x], h[y]))
                     for x in c for y in c)
            if not ok:
                continue
            for x in c:
                if not q.leq(h[x], big[x]):
                    return [CheckResult("extension suite", False,
                                        f"a valid extension exceeds the largest at {x}")]
                if not q.leq(small[x], h[x]):
                    return [CheckResult("extension suite", False,
                                        f"a valid extension is below the smallest at {x}")]
        for x in c:
            if not q.leq(small[x], big[x]):
                return [CheckResult("extension suite", False,
                                    "smallest above largest in the quantale order")]
        checked += 1
    return [CheckResult(f"extension properties on {checked} random instances", True)]
