from fractions import Fraction as F

import pytest

from quantadist.behaviour import (Certificate, CoalgebraModel, ModelError,
                                  SparseDist, WitnessError, beh_apply, beh_value,
                                  certify, kleene_gfp, model_kind,
                                  reachable_states, trace_lower_bound, u_exact,
                                  witness_bound)
from quantadist.functor import (ConstLeaf, IdLeaf, Inl, Inr, Tup,
                                exception_functor)
from quantadist.galois import BudgetError
from quantadist.monadlift import dirac, finsubset, subdist
from quantadist.quantale import UNIT_OPLUS
from quantadist.vgraph import carrier



S = lambda *xs: finsubset(list(xs))
q = UNIT_OPLUS


def exception_certificate(n=3):
    entries = {(S("x0", "y0"), S("z0")): F(1, 4)}
    for i in range(1, n + 1):
        entries[(S(f"x{i}"), S(f"z{i}"))] = F(1, 4)
        entries[(S(f"y{i}"), S(f"z{i}"))] = F(1, 6)
    wits = {
        (S("x0", "x1", "y0"), S("z0", "z1")):
            [((S("x0", "y0"), S("z0")), (S("x1"), S("z1")))],
        (S("x0", "y0", "y1"), S("z0", "z1")):
            [((S("x0", "y0"), S("z0")), (S("y1"), S("z1")))],
    }
    return Certificate("powerset", SparseDist(q, entries), wits)


def probchain_certificate():
    dx, dxp, dy = dirac("x"), dirac("x'"), dirac("y")
    half = subdist({"x": F(1, 2), "x'": F(1, 2)})
    cand = SparseDist(q, {(dx, dy): F(1, 2), (dxp, dy): F(1, 2),
                          (dy, dx): F(1, 2), (dy, dxp): F(1, 2)})
    wits = {
        (half, dy): [((F(1, 2), (dx, dy)), (F(1, 2), (dxp, dy)))],
        (dy, half): [((F(1, 2), (dy, dx)), (F(1, 2), (dy, dxp)))],
    }
    return Certificate("subdist", cand, wits)


# -- the behaviour function -------------------------------------------------------

def test_model_kind_recognition(probchain, exceptions3):
    assert model_kind(probchain) == "machine"
    assert model_kind(exceptions3) == "exception"


def test_beh_machine_formula(probchain):
    det = probchain.det()
    dx, dy = dirac("x"), dirac("y")
    half = subdist({"x": F(1, 2), "x'": F(1, 2)})
    table = {(half, dy): F(1, 3)}
    value = beh_value(det, lambda a, b: table.get((a, b), F(1)), dx, dy)
    # output difference is 0; the successor entry decides.
    assert value == F(1, 3)


def test_beh_exception_injection_cases(exceptions3):
    det = exceptions3.det()
    thrower = S("x3")      # terminal, raises 1/4
    stepper = S("x0")      # keeps transitioning
    bottom_case = beh_value(det, lambda a, b: F(0), stepper, thrower)
    assert bottom_case == q.bottom  # transition versus throw is the worst case
    top_case = beh_value(det, lambda a, b: F(1), thrower, stepper)
    assert top_case == q.top        # throw versus transition costs nothing
    both = beh_value(det, lambda a, b: F(1), thrower, S("z3"))
    assert both == F(1, 4)          # 1/2 minus 1/4


def test_beh_top_bound_keeps_output_differences(probchain):
    det = probchain.det()
    dxp, dy = dirac("x'"), dirac("y")
    value = beh_value(det, lambda a, b: q.top, dy, dxp)
    assert value == F(1, 2)  # outputs 1/2 versus 1


def test_beh_apply_missing_pair_raises(probchain):
    det = probchain.det()
    with pytest.raises(ModelError, match="no bound"):
        beh_apply(det, {}, [(dirac("x"), dirac("y"))])


# -- Kleene iteration ----------------------------------------------------------------

def test_kleene_exception_case_study(exceptions3):
    det = exceptions3.det()
    seeds = [S("x0", "y0"), S("z0")]
    states = reachable_states(det, seeds)
    assert len(states) == 19
    result = kleene_gfp(det, states)
    assert result.converged
    assert result.at(seeds[0], seeds[1]) == F(1, 4)
    # Iterates descend in the quantale order (ascend numerically) and
    # the fixpoint is genuinely reached.
    again = kleene_gfp(det, states, max_iters=result.iterations + 5)
    assert again.graph.dist == result.graph.dist
    probes = []
    for k in range(1, result.iterations + 1):
        truncated = kleene_gfp(det, states, max_iters=k)
        probes.append(truncated.at(seeds[0], seeds[1]))
    assert probes == sorted(probes)
    assert probes[-1] == F(1, 4)


def test_kleene_single_absorbing_state(probchain):
    det = probchain.det()
    dy = dirac("y")
    result = kleene_gfp(det, [dy], max_iters=5)
    assert result.converged and result.iterations == 1
    assert result.at(dy, dy) == q.top


def test_kleene_requires_successor_closed_carrier(probchain):
    det = probchain.det()
    with pytest.raises(ModelError, match="closed"):
        kleene_gfp(det, [dirac("x")])


def test_kleene_truncated_iterates_match_trace_bounds(probchain):
    # A depth-truncated run padded with top at the frontier computes
    # exactly the word-bounded trace values.
    det = probchain.det()
    dy, dx = dirac("y"), dirac("x")
    for depth in range(1, 7):
        frontier_pairs = {}
        value = _bounded_iterate(det, dy, dx, depth)
        assert value == trace_lower_bound(probchain, dy, dx, depth)


def _bounded_iterate(det, p, r, depth):
    def go(a, b, k):
        if k == 0:
            return det.law.quantale.top
        return beh_value(det, lambda x, y: go(x, y, k - 1), a, b)

    return go(p, r, depth)


# -- trace oracles ----------------------------------------------------------------------

def test_trace_table_values(probchain):
    det = probchain.det()
    # Expected payoffs after reading a^k from the two start states.
    state = dirac("x")
    payoffs = []
    for _ in range(4):
        payoffs.append(det.successor(state).items[0].atom)
        state = det.successor(state).items[1].items[0].payload
    assert payoffs == [F(1, 2), F(3, 4), F(7, 8), F(15, 16)]
    state = dirac("y")
    for _ in range(4):
        assert det.successor(state).items[0].atom == F(1, 2)
        state = det.successor(state).items[1].items[0].payload


def test_trace_bound_probchain_values(probchain):
    dy, dx = dirac("y"), dirac("x")
    for length in (1, 2, 5, 10):
        expected = F(1, 2) - F(1, 2 ** length)
        assert trace_lower_bound(probchain, dy, dx, length) == expected
    # The other orientation never sees a positive difference.
    assert trace_lower_bound(probchain, dx, dy, 10) == F(0)


def test_trace_bound_monotone_in_length(exceptions3):
    pair = (S("x0", "y0"), S("z0"))
    values = [trace_lower_bound(exceptions3, pair[0], pair[1], L)
              for L in range(1, 6)]
    assert values == sorted(values)
    assert values[-1] == F(1, 4)
    assert trace_lower_bound(exceptions3, pair[0], pair[1], 3) == F(0)


def test_trace_bound_shape_guard():
    # An exception-shaped functor paired with the wrong monad has no
    # trace characterization.
    bad = CoalgebraModel(UNIT_OPLUS, exception_functor(["a"]), "subdist",
                         carrier(["s"]), carrier(["a"]),
                         {"s": Inl(ConstLeaf(F(0)))})
    with pytest.raises(ModelError, match="machine- or exception-shaped"):
        trace_lower_bound(bad, dirac("s"), dirac("s"), 2)


# -- witnesses and certificates ------------------------------------------------------------

def test_witness_bound_powerset_example(exceptions3):
    cert = exception_certificate()
    extended = dict(cert.witnesses)
    pair = (S("x0", "x1", "y0"), S("z0", "z1"))
    value = witness_bound(cert, pair, q)
    assert value == F(1, 4)  # max(1/4, 1/4) beats the default 1


def test_witness_bound_subdist_example():
    cert = probchain_certificate()
    half = subdist({"x": F(1, 2), "x'": F(1, 2)})
    assert witness_bound(cert, (half, dirac("y")), q) == F(1, 2)


def test_witness_bound_unit_only():
    cand = SparseDist(q, {(S("a"), S("b")): F(1, 3)})
    cert = Certificate("powerset", cand, {})
    assert witness_bound(cert, (S("a"), S("b")), q) == F(1, 3)
    assert witness_bound(cert, (S("b"), S("a")), q) == q.bottom


def test_witness_marginal_mismatch_rejected():
    cand = SparseDist(q, {(S("a", "b"), S("c")): F(1, 2)})
    bad_witness = ((S("a"), S("c")),)  # union misses b
    cert = Certificate("powerset", cand,
                       {(S("a", "b"), S("c")): [bad_witness]})
    with pytest.raises(WitnessError, match="marginal"):
        witness_bound(cert, (S("a", "b"), S("c")), q)


def test_certify_exception_case_study(exceptions3):
    verdict = certify(exception_certificate(), exceptions3)
    assert verdict.accepted and verdict.checked == 7


def test_certify_probchain_case_study(probchain):
    verdict = certify(probchain_certificate(), probchain)
    assert verdict.accepted and verdict.checked == 4


def test_certify_rejects_lowered_entry(exceptions3):
    cert = exception_certificate()
    cert.candidate.entries[(S("x0", "y0"), S("z0"))] = F(1, 5)
    verdict = certify(cert, exceptions3)
    assert not verdict.accepted
    bad_pair = verdict.failures[0][:2]
    assert bad_pair == (S("x0", "y0"), S("z0"))
    assert "1/4" in verdict.failures[0][2]


def test_certify_monotone_under_uniform_weakening(exceptions3):
    # Raising every entry by the same amount weakens all claims at
    # least as fast as it raises the one-step bounds.
    cert = exception_certificate()
    for pair in list(cert.candidate.entries):
        cert.candidate.entries[pair] = min(
            F(1), cert.candidate.entries[pair] + F(1, 8))
    assert certify(cert, exceptions3).accepted


def test_certify_not_monotone_under_single_entry_weakening(exceptions3):
    # Raising a single entry that other support pairs lean on can
    # genuinely break their checks: the up-to bound is monotone in the
    # candidate, so the main pair stops being covered.
    cert = exception_certificate()
    cert.candidate.entries[(S("y1"), S("z1"))] = F(1, 2)
    verdict = certify(cert, exceptions3)
    assert not verdict.accepted
    assert verdict.failures[0][:2] == (S("x0", "y0"), S("z0"))


def test_certify_needs_matching_monad(probchain):
    with pytest.raises(ModelError, match="monad"):
        certify(exception_certificate(), probchain)


def test_model_rejects_mismatched_labels():
    with pytest.raises(ModelError, match="labels"):
        CoalgebraModel(UNIT_OPLUS, exception_functor(["a", "b"]), "powerset",
                       carrier(["s"]), carrier(["a"]),
                       {"s": Inl(ConstLeaf(F(0)))})


def test_kleene_fixpoint_is_vcat(exceptions3):
    from quantadist.vgraph import is_vcat

    det = exceptions3.det()
    states = reachable_states(det, [S("x0", "y0"), S("z0")])
    result = kleene_gfp(det, states)
    assert result.converged
    assert is_vcat(result.graph)


# -- exact up-to oracle ------------------------------------------------------------------------

def tiny_powerset_model():
    func = exception_functor(["a"])
    trans = {
        "p": Inr(Tup((IdLeaf(S("p")),))),
        "r": Inl(ConstLeaf(F(1, 2))),
    }
    return CoalgebraModel(q, func, "powerset", carrier(["p", "r"]),
                          carrier(["a"]), trans)


def test_u_exact_extensive_and_below_witness_bounds():
    model = tiny_powerset_model()
    pairs = [(a, b) for a in [S("p"), S("r"), S("p", "r")]
             for b in [S("p"), S("r"), S("p", "r")]]
    cand = SparseDist(q, {pair: F(1, 4) for pair in pairs})
    cert = Certificate("powerset", cand, {})
    for pair in pairs:
        exact = u_exact(model, cand, pair)
        assert exact <= cand.value_at(pair)          # extensive (numeric)
        assert witness_bound(cert, pair, q) >= exact  # witnesses over-approximate


def test_u_exact_matches_hand_enumeration():
    model = tiny_powerset_model()
    cand = SparseDist(q, {(S("p"), S("r")): F(1, 3),
                          (S("p", "r"), S("r")): F(1, 8)})
    # Decompositions of ({p}, {r}): the left side only splits as
    # collections of subsets of {p} covering it, i.e. {p} itself or
    # {p} plus the empty set; similarly on the right.
    value = u_exact(model, cand, (S("p"), S("r")))
    # Hand enumeration: the direct pair gives 1/3; adding the empty set
    # on either side can only worsen (the empty set pairs at bottom),
    # except as an extra left member which can only help the inner join.
    assert value == F(1, 3)
    # A pair defaulting to bottom stays at bottom without witnesses.
    assert u_exact(model, cand, (S("r"), S("p"))) == q.bottom


def test_u_exact_boolean_toy_matches_hand_enumeration():
    from quantadist.quantale import BOOLEAN

    func = exception_functor(["a"])
    trans = {
        "p": Inr(Tup((IdLeaf(S("p")),))),
        "r": Inr(Tup((IdLeaf(S("r")),))),
    }
    model = CoalgebraModel(BOOLEAN, func, "powerset", carrier(["p", "r"]),
                           carrier(["a"]), trans)
    cand = SparseDist(BOOLEAN, {(S("p"), S("r")): True,
                                (S("p", "r"), S("r")): True})
    # By hand: every decomposition of ({p},{r}) is covered by the direct
    # pair (join of top-valued lifts stays top); the reverse pair only
    # admits bottom-valued decompositions.
    assert u_exact(model, cand, (S("p"), S("r"))) is True
    assert u_exact(model, cand, (S("r"), S("p"))) is False
    # The union pair is decomposable through the top-valued entries.
    assert u_exact(model, cand, (S("p", "r"), S("r"))) is True


def test_u_exact_budget_refusals(probchain, exceptions3):
    cand = SparseDist(q, {})
    with pytest.raises(BudgetError, match="powerset"):
        u_exact(probchain, cand, (dirac("x"), dirac("y")))
    with pytest.raises(BudgetError, match="budget"):
        u_exact(exceptions3, cand, (S("x0"), S("z0")), budget=100)


def test_soundness_sandwich(exceptions3, probchain):
    # trace bounds <= converged fixpoint <= certified candidate, numerically.
    det = exceptions3.det()
    seeds = [S("x0", "y0"), S("z0")]
    states = reachable_states(det, seeds)
    fixpoint = kleene_gfp(det, states).at(seeds[0], seeds[1])
    cert_value = exception_certificate().candidate.value_at((seeds[0], seeds[1]))
    for L in range(1, 6):
        assert trace_lower_bound(exceptions3, seeds[0], seeds[1], L) <= fixpoint
    assert fixpoint <= cert_value
    dy, dx = dirac("y"), dirac("x")
    cand = probchain_certificate().candidate.value_at((dy, dx))
    for L in range(1, 11):
        assert trace_lower_bound(probchain, dy, dx, L) <= cand
