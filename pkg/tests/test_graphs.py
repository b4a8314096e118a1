"""Graph construction, quotients, ghost slots, the boundary operator."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evenloop.graphs import (Graph, GraphError, PercolationConfig,
                             attach_ghost, build_graph, components, enhance,
                             full_config, graph_from_json, graph_to_json,
                             odd_boundary, parse_family_spec, unwire,
                             wired_quotient)


def test_family_examples():
    k4 = build_graph("complete", 4)
    assert (k4.n, k4.m) == (4, 6)
    lad = build_graph("ladder", 3)
    assert (lad.n, lad.m) == (6, 7)
    c5 = build_graph("cycle", 5)
    assert (c5.n, c5.m) == (5, 5)
    g = build_graph("grid", 2, 3)
    assert (g.n, g.m) == (6, 7)
    t = build_graph("tree", 2)
    assert (t.n, t.m) == (7, 6)


def test_family_errors():
    with pytest.raises(GraphError):
        build_graph("nosuch", 3)
    with pytest.raises(GraphError):
        build_graph("path", 0)
    with pytest.raises(GraphError):
        build_graph("torus", 1, 3)


def test_parse_family_spec():
    g = parse_family_spec("ladder:12")
    assert (g.n, g.m) == (24, 34)
    g2 = parse_family_spec("grid:6:4")
    assert g2.n == 24
    with pytest.raises(GraphError):
        parse_family_spec("grid")
    with pytest.raises(GraphError):
        parse_family_spec("grid:x")


def test_no_self_loops():
    with pytest.raises(GraphError):
        Graph(3, ((0, 0),))
    with pytest.raises(GraphError):
        Graph(2, ((0, 3),))


def test_wired_quotient_path():
    q = wired_quotient(build_graph("path", 5), [1, 2, 3])
    assert (q.n, q.m) == (4, 4)
    assert q.wired == 3
    assert all(u != v for u, v in q.edges)


def test_wired_quotient_cycle4_hand_enumeration():
    c4 = build_graph("cycle", 4)
    # adjacent pair kept: triangle with Delta, three edges survive
    adj = wired_quotient(c4, [0, 1])
    assert (adj.n, adj.m) == (3, 3)
    # opposite pair kept: Delta double-edged to both survivors
    opp = wired_quotient(c4, [0, 2])
    assert (opp.n, opp.m) == (3, 4)
    from collections import Counter

    pair_counts = Counter(tuple(sorted(e)) for e in opp.edges)
    assert sorted(pair_counts.values()) == [2, 2]


def test_wired_quotient_preserves_edge_ids():
    c4 = build_graph("cycle", 4)
    q = wired_quotient(c4, [0, 2])
    # dropped edges are exactly those with both endpoints glued (none here)
    assert set(q.edge_ids) <= set(c4.edge_ids)
    surviving = [i for i, (u, v) in enumerate(c4.edges)
                 if u in (0, 2) or v in (0, 2)]
    assert list(q.edge_ids) == surviving

    p6 = build_graph("path", 6)
    q2 = wired_quotient(p6, [2, 3])
    gone = [i for i, (u, v) in enumerate(p6.edges)
            if u not in (2, 3) and v not in (2, 3)]
    assert set(q2.edge_ids) == set(range(p6.m)) - set(gone)


def test_wired_quotient_errors():
    g = build_graph("path", 4)
    with pytest.raises(GraphError):
        wired_quotient(g, [])
    with pytest.raises(GraphError):
        wired_quotient(g, range(4))


def test_attach_ghost():
    p3 = build_graph("path", 3)
    gs = attach_ghost(p3, [0, 1, 2])
    assert gs.has_ghost and len(gs.ghost_sites) == 3
    isolated = attach_ghost(p3, [])
    assert isolated.has_ghost and not isolated.ghost_sites
    with pytest.raises(GraphError):
        attach_ghost(gs, [0])


def test_ghost_identified_with_delta_on_quotient():
    p5 = attach_ghost(build_graph("path", 5), range(5))
    q = wired_quotient(p5, [1, 2, 3])
    assert q.has_ghost
    assert q.ghost_vertex == q.wired
    # glued sites lose their slots (their ghost edges became self loops)
    assert len(q.ghost_sites) == 3
    free = unwire(q)
    assert free.ghost_vertex == free.n


def test_enhance():
    k3 = build_graph("cycle", 3)
    empty = enhance(k3, PercolationConfig(0, 0))
    assert empty.m == 0 and empty.n == 3
    full = enhance(k3, full_config(k3))
    assert sorted(full.edges) == sorted(k3.edges)

    gs = attach_ghost(k3, [2])
    cfg = PercolationConfig(0b011, 0b100)
    sub = enhance(gs, cfg)
    assert sub.n == 4                     # ghost materialised as vertex 3
    assert sub.m == 3
    assert (2, 3) in sub.edges
    assert sub.edge_ids == (0, 1, 3 + 2)  # slot ids: edge positions, m + site


def test_enhance_dimension_mismatch():
    k3 = build_graph("cycle", 3)
    with pytest.raises(GraphError):
        enhance(k3, PercolationConfig(1 << 5, 0))
    with pytest.raises(GraphError):
        enhance(k3, PercolationConfig(0, 0b1))   # no ghost slot there


def test_odd_boundary_examples():
    k3 = build_graph("cycle", 3)
    assert odd_boundary(k3, PercolationConfig(0b001, 0)) == {0, 1}
    assert odd_boundary(k3, PercolationConfig(0b111, 0)) == frozenset()
    gs = attach_ghost(k3, [2])
    assert odd_boundary(gs, PercolationConfig(0, 0b100)) == {2}


def test_odd_boundary_excludes_delta():
    q = wired_quotient(build_graph("path", 5), [1, 2, 3])
    # single edge to Delta leaves only its ordinary endpoint odd
    for i, (u, v) in enumerate(q.edges):
        if q.wired in (u, v):
            other = u if v == q.wired else v
            assert odd_boundary(q, PercolationConfig(1 << i, 0)) == {other}
            break


def test_components():
    p4 = build_graph("path", 4)
    singletons = components(p4, PercolationConfig(0, 0))
    assert len(singletons) == 4
    assert len(components(p4, full_config(p4))) == 1
    g4 = Graph(4, ((0, 1), (2, 3)))
    assert len(components(g4, full_config(g4))) == 2
    # open ghost slot joins the ghost node
    gs = attach_ghost(build_graph("path", 2), [0, 1])
    comps = components(gs, PercolationConfig(0, 0b11))
    assert any({0, 1, 2} <= c for c in comps)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_handshake_parity(data):
    """Odd boundaries have even size on graphs with no ghost and no Delta."""
    n = data.draw(st.integers(2, 6))
    edges = data.draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
        .filter(lambda e: e[0] != e[1]), min_size=1, max_size=10))
    g = Graph(n, tuple(edges))
    bits = data.draw(st.integers(0, (1 << g.m) - 1))
    assert len(odd_boundary(g, PercolationConfig(bits, 0))) % 2 == 0


def test_enhance_full_config_reproduces_host():
    for spec in ("cycle:5", "grid:2:3", "complete:4"):
        g = parse_family_spec(spec)
        sub = enhance(g, full_config(g))
        assert sorted(sub.edges) == sorted(g.edges)
        assert list(sub.edge_ids) == list(range(g.m))


def test_json_roundtrip(tmp_path):
    g = attach_ghost(build_graph("grid", 2, 3), [0, 5])
    data = graph_to_json(g)
    g2 = graph_from_json(data)
    assert g2.n == g.n and g2.edges == g.edges
    assert g2.ghost_sites == g.ghost_sites

    q = wired_quotient(build_graph("path", 5), [1, 2, 3])
    d = graph_to_json(q)
    assert d["wired"] is True
    q2 = graph_from_json(d)
    assert q2.wired == q2.n - 1 == q.wired

    with pytest.raises(GraphError):
        graph_from_json({"vertices": 2})
