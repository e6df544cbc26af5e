import random
from fractions import Fraction as F
from itertools import product

import pytest

from quantadist.quantale import BOOLEAN, EXT_PLUS, UNIT_OPLUS
from quantadist.vgraph import (CarrierMismatchError, FiniteMap, VGraph, all_top,
                               carrier, compose_maps, direct_image,
                               graph_equal, graph_leq, graph_from_entries,
                               identity_map, is_vcat, metric_closure, reindex,
                               vgraph_from_json, vgraph_to_json)
from quantadist.suites import all_bool_graphs


def geo_graph():
    # The symmetric three-point road map used by the transport instance.
    c = carrier(["A", "B", "C"])
    return graph_from_entries(EXT_PLUS, c, {
        ("A", "B"): F(3), ("B", "A"): F(3),
        ("A", "C"): F(5), ("C", "A"): F(5),
        ("B", "C"): F(4), ("C", "B"): F(4),
        ("A", "A"): F(0), ("B", "B"): F(0), ("C", "C"): F(0),
    })


def test_graph_leq_reflexive_and_bottom():
    d = geo_graph()
    assert graph_leq(d, d)
    c = carrier(["x", "y"])
    ones = VGraph(UNIT_OPLUS, c, [[F(1)] * 2] * 2)
    zeros = VGraph(UNIT_OPLUS, c, [[F(0)] * 2] * 2)
    assert graph_leq(ones, zeros)  # numeric 1 is bottom
    assert not graph_leq(zeros, ones)


def test_graph_leq_matches_entrywise_reversed_numeric():
    rng = random.Random(3)
    c = carrier(["p", "q", "r"])
    grid = [F(i, 4) for i in range(5)]
    for _ in range(20):
        d1 = VGraph(UNIT_OPLUS, c, [[rng.choice(grid) for _ in range(3)] for _ in range(3)])
        d2 = VGraph(UNIT_OPLUS, c, [[rng.choice(grid) for _ in range(3)] for _ in range(3)])
        expected = all(d1.dist[i][j] >= d2.dist[i][j] for i in range(3) for j in range(3))
        assert graph_leq(d1, d2) == expected


def test_graph_leq_carrier_mismatch():
    with pytest.raises(CarrierMismatchError):
        graph_leq(geo_graph(), all_top(EXT_PLUS, carrier(["A", "B"])))


def test_reindex():
    d = geo_graph()
    ident = identity_map(d.carrier)
    assert graph_equal(reindex(ident, d), d)
    dom = carrier(["u", "v"])
    const = FiniteMap(dom, d.carrier, {"u": "B", "v": "B"})
    pulled = reindex(const, d)
    assert all(v == F(0) for _x, _y, v in pulled.pairs())
    surj = FiniteMap(carrier(["u", "v", "w"]), carrier(["A", "B"]),
                     {"u": "A", "v": "B", "w": "B"})
    target = graph_from_entries(EXT_PLUS, carrier(["A", "B"]),
                                {("A", "B"): F(3), ("B", "A"): F(7)})
    out = reindex(surj, target)
    assert out.at("u", "v") == F(3) and out.at("v", "u") == F(7)
    assert out.at("v", "w") == EXT_PLUS.top  # copied diagonal entry


def test_reindex_functorial():
    a = carrier(["a0", "a1"])
    b = carrier(["b0", "b1", "b2"])
    f = FiniteMap(a, b, {"a0": "b1", "a1": "b2"})
    g = FiniteMap(b, a, {"b0": "a0", "b1": "a1", "b2": "a0"})
    d = graph_from_entries(UNIT_OPLUS, a, {("a0", "a1"): F(1, 2), ("a1", "a0"): F(1, 4)},
                           default=F(0))
    gf = compose_maps(f, g)
    assert graph_equal(reindex(gf, d), reindex(f, reindex(g, d)))
    assert graph_equal(reindex(identity_map(a), d), d)


def test_direct_image():
    d = geo_graph()
    assert graph_equal(direct_image(identity_map(d.carrier), d), d)
    one = carrier(["*"])
    collapse = FiniteMap(d.carrier, one, {x: "*" for x in d.carrier})
    out = direct_image(collapse, d)
    assert out.at("*", "*") == EXT_PLUS.join(v for _x, _y, v in d.pairs())
    # Non-surjective map: unreached pairs get the empty join = bottom.
    two = carrier(["im", "miss"])
    inj = FiniteMap(carrier(["A"]), two, {"A": "im"})
    tiny = graph_from_entries(EXT_PLUS, carrier(["A"]), {("A", "A"): F(2)})
    out = direct_image(inj, tiny)
    assert out.at("im", "im") == F(2)
    assert out.at("im", "miss") is EXT_PLUS.bottom
    assert out.at("miss", "miss") is EXT_PLUS.bottom


def test_is_vcat():
    assert is_vcat(geo_graph())
    c = carrier(["x"])
    bad_diag = VGraph(UNIT_OPLUS, c, [[F(1, 5)]])
    assert not is_vcat(bad_diag)
    tri = graph_from_entries(EXT_PLUS, carrier(["A", "B", "C"]),
                             {("A", "B"): F(3), ("B", "C"): F(4), ("A", "C"): F(8)},
                             default=F(0))
    assert not is_vcat(tri)


def brute_force_least_vcat(d):
    """Exhaustive oracle: least V-category above d over the value set
    generated by d's entries (valid for boolean graphs)."""
    assert d.quantale is BOOLEAN
    n = len(d.carrier)
    best = None
    for bits in product([False, True], repeat=n * n):
        cand = VGraph(BOOLEAN, d.carrier, [list(bits[i * n:(i + 1) * n]) for i in range(n)])
        if is_vcat(cand) and graph_leq(d, cand):
            if best is None or graph_leq(cand, best):
                best = cand
    return best


def test_metric_closure_examples():
    tri = graph_from_entries(EXT_PLUS, carrier(["A", "B", "C"]),
                             {("A", "B"): F(3), ("B", "C"): F(4), ("A", "C"): F(8)},
                             default=F(0))
    closed = metric_closure(tri)
    assert closed.at("A", "C") == F(7)
    assert is_vcat(closed)
    # A V-category is left unchanged.
    geo = geo_graph()
    assert graph_equal(metric_closure(geo), geo)
    # Diagonal saturation.
    c = carrier(["x"])
    d = VGraph(UNIT_OPLUS, c, [[F(1, 5)]])
    assert metric_closure(d).at("x", "x") == F(0)


def test_metric_closure_least_and_idempotent_boolean():
    c = carrier(["x", "y"])
    for d in all_bool_graphs(c):
        closed = metric_closure(d)
        assert is_vcat(closed)
        assert graph_leq(d, closed)
        assert graph_equal(metric_closure(closed), closed)
        oracle = brute_force_least_vcat(d)
        assert graph_equal(closed, oracle)
    # Monotone in the graph order.
    graphs = all_bool_graphs(c)
    for d1 in graphs[:16]:
        for d2 in graphs[:16]:
            if graph_leq(d1, d2):
                assert graph_leq(metric_closure(d1), metric_closure(d2))


def test_metric_closure_least_among_grid_vcats_unit():
    c = carrier(["x", "y", "z"])
    grid = [F(0), F(1, 2), F(1)]
    rng = random.Random(11)
    for _ in range(4):
        d = VGraph(UNIT_OPLUS, c, [[rng.choice(grid) for _ in range(3)] for _ in range(3)])
        closed = metric_closure(d)
        assert is_vcat(closed) and graph_leq(d, closed)
        for bits in product(grid, repeat=9):
            e = VGraph(UNIT_OPLUS, c, [list(bits[0:3]), list(bits[3:6]), list(bits[6:9])])
            if is_vcat(e) and graph_leq(d, e):
                assert graph_leq(closed, e)


def test_vgraph_json_roundtrip():
    d = geo_graph()
    doc = vgraph_to_json(d)
    assert doc["quantale"] == "ext-plus"
    assert doc["dist"][0][1] == "3"
    assert graph_equal(vgraph_from_json(doc), d)
