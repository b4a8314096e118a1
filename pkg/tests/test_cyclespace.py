"""GF(2) algebra, generating-set constructions, counting, projections.

Enumeration over all configurations is the oracle throughout: spans must
coincide with the enumerated even-subgraph sets as exact set equalities.
"""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evenloop.cyclespace import (EdgeVector, bfs_edge_order, coin_pushforward,
                                 config_to_vector, count_even_subgraphs,
                                 face_generating_set, forest_generating_set,
                                 fundamental_cycles, gaussian_basis,
                                 greedy_generating_set, in_span, project,
                                 project_space, remap_bits,
                                 sample_uniform_even, same_span, span_members,
                                 spanning_tree, vector_to_config, xor_sum)
from evenloop.exact import enumerate_configs
from evenloop.graphs import (Graph, GraphError, attach_ghost, build_graph,
                             odd_boundary, wired_quotient)
from evenloop.verify import corpus25, enumerate_even_count


def even_vectors(g, boundary=()):
    """Oracle: all even configurations of g as packed slot vectors."""
    out = []
    B = set(boundary)
    for cfg in enumerate_configs(g):
        if odd_boundary(g, cfg) <= B:
            out.append(config_to_vector(g, cfg))
    return out


def test_xor_sum():
    k3 = build_graph("cycle", 3)
    tri = EdgeVector(k3, 0b111)
    assert xor_sum([tri, tri]).bits == 0
    a, b = EdgeVector(k3, 0b011), EdgeVector(k3, 0b110)
    assert xor_sum([a, b]).bits == 0b101
    other = EdgeVector(build_graph("cycle", 3), 0b1)
    with pytest.raises(GraphError):
        xor_sum([tri, other])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**10 - 1), st.integers(0, 2**10 - 1), st.integers(0, 2**10 - 1))
def test_xor_group_laws(a, b, c):
    assert a ^ b == b ^ a
    assert (a ^ b) ^ c == a ^ (b ^ c)
    assert a ^ a == 0


def test_gaussian_basis():
    v = 0b1010
    assert gaussian_basis([v, v]) == [v]
    assert gaussian_basis([]) == []
    assert gaussian_basis([0]) == []
    k4 = build_graph("complete", 4)
    basis = gaussian_basis(even_vectors(k4))
    assert len(basis) == k4.m - k4.n + 1 == 3
    assert len(span_members(basis)) == 8


def test_gaussian_basis_canonical():
    rng = random.Random(5)
    vecs = [rng.getrandbits(12) for _ in range(8)]
    b1 = gaussian_basis(vecs)
    shuffled = vecs[:]
    rng.shuffle(shuffled)
    assert gaussian_basis(shuffled) == b1
    # basis spans the same set
    assert set(span_members(b1)) == set(span_members(gaussian_basis(vecs)))


def test_fundamental_cycles_examples():
    k3 = build_graph("cycle", 3)
    gen = fundamental_cycles(k3, {0, 1})
    assert gen.elements == (0b111,)

    c5 = build_graph("cycle", 5)
    gen5 = fundamental_cycles(c5, {0, 1, 2, 3})
    assert len(gen5) == 1 and gen5.elements[0].bit_count() == 5

    k4 = build_graph("complete", 4)
    star = {i for i, e in enumerate(k4.edges) if 0 in e}
    gen4 = fundamental_cycles(k4, star)
    assert len(gen4) == 3
    assert all(v.bit_count() == 3 for v in gen4.elements)  # three triangles


def test_fundamental_cycles_validation():
    k3 = build_graph("cycle", 3)
    with pytest.raises(GraphError):
        fundamental_cycles(k3, {0, 1, 2})        # contains a cycle
    two = Graph(4, ((0, 1), (2, 3), (0, 2), (1, 3)))
    with pytest.raises(GraphError):
        fundamental_cycles(two, {0})              # not spanning


def test_fundamental_cycles_per_component():
    g = Graph(6, ((0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)))
    tree = spanning_tree(g)
    gen = fundamental_cycles(g, tree)
    assert len(gen) == 2
    assert same_span(gen.elements, even_vectors(g))


def test_span_equality_on_corpus():
    """Greedy, fundamental-cycle (and forest where wired) spans all equal the
    enumerated even sets, exactly."""
    for name, g in corpus25():
        enumerated = even_vectors(g, boundary={g.wired} if g.wired is not None else ())
        mode = "wired" if g.wired is not None else "free"
        greedy = greedy_generating_set(g, mode=mode)
        assert same_span(greedy.elements, enumerated), name
        if g.wired is None:
            fund = fundamental_cycles(g, spanning_tree(g))
            assert same_span(fund.elements, enumerated), name
        else:
            from evenloop.loops import _ordinary_forest

            forest = forest_generating_set(g, _ordinary_forest(g),
                                           allow_isolated=True)
            assert same_span(forest.elements, enumerated), name


def test_greedy_examples():
    k3 = build_graph("cycle", 3)
    gen = greedy_generating_set(k3)
    assert len(gen) == 1 and gen.elements[0] == 0b111
    tree = build_graph("tree", 2)
    assert len(greedy_generating_set(tree)) == 0
    k4 = build_graph("complete", 4)
    gen4 = greedy_generating_set(k4, edge_order=bfs_edge_order(k4))
    assert len(gen4) == 3
    assert len(span_members(gaussian_basis(gen4.elements))) == 8


def test_greedy_span_is_order_independent():
    k4 = build_graph("complete", 4)
    rng = random.Random(3)
    base = gaussian_basis(greedy_generating_set(k4).elements)
    for _ in range(10):
        order = list(range(k4.m))
        rng.shuffle(order)
        gen = greedy_generating_set(k4, edge_order=order)
        assert gaussian_basis(gen.elements) == base


def test_greedy_wired_mode_spans_ghost_space():
    g = attach_ghost(build_graph("path", 3), [0, 1, 2])
    gen = greedy_generating_set(g, mode="wired")
    assert same_span(gen.elements, even_vectors(g))
    assert any(k == "ghost-ray-cycle" for k in gen.kinds)


def test_forest_generating_set_ladder():
    """Rails as the forest: every rung yields a Delta-through path using the
    designated rail rays."""
    lad = build_graph("ladder", 3)
    big = build_graph("ladder", 5)
    gq = wired_quotient(big, [2, 3, 4, 5, 6, 7])   # middle three rungs kept
    rails = {i for i, (u, v) in enumerate(gq.edges)
             if gq.wired not in (u, v) and abs(u - v) == 2}
    gen = forest_generating_set(gq, rails)
    kinds = sorted(gen.kinds)
    assert "path-to-boundary" in kinds
    rungs = [i for i, (u, v) in enumerate(gq.edges)
             if gq.wired not in (u, v) and abs(u - v) == 1]
    for r in rungs:
        elem = next(e for e in gen.elements if e >> r & 1)
        # the rung's generator walks both rails out to Delta
        touching_delta = [i for i in range(gq.m)
                          if elem >> i & 1 and gq.wired in gq.edges[i]]
        assert len(touching_delta) == 2
    assert same_span(gen.elements, even_vectors(gq, boundary={gq.wired}))


def test_forest_generating_set_reduces_to_fundamental_cycle():
    # non-forest edge inside one tree component gives a plain cycle
    c4 = build_graph("cycle", 4)
    gq = wired_quotient(c4, [0, 1, 2])
    forest = {i for i, e in enumerate(gq.edges)
              if gq.wired not in e and i != 1}
    gen = forest_generating_set(gq, spanning_forest_of(gq))
    finite = [e for e, k in zip(gen.elements, gen.kinds) if k == "finite-cycle"]
    through = [e for e, k in zip(gen.elements, gen.kinds) if k == "path-to-boundary"]
    assert same_span(gen.elements, even_vectors(gq, boundary={gq.wired}))
    assert len(gen) == gq.m - (gq.n - 1)


def spanning_forest_of(gq):
    from evenloop.loops import _ordinary_forest

    return _ordinary_forest(gq)


def test_forest_generating_set_ghost_ray():
    q = wired_quotient(build_graph("path", 5), [1, 2, 3])
    qg = attach_ghost(q, [0, 1, 2])
    gen = forest_generating_set(qg, spanning_forest_of(qg))
    rays = [e for e, k in zip(gen.elements, gen.kinds) if k == "ghost-ray-cycle"]
    assert rays
    for elem in rays:
        ghost_slots = [s for s in range(qg.m, qg.m + qg.n) if elem >> s & 1]
        assert len(ghost_slots) >= 1
    assert same_span(gen.elements, even_vectors(qg, boundary={qg.wired}))


def test_forest_generating_set_errors():
    g5 = Graph(5, ((0, 1), (1, 2), (2, 0), (3, 4), (2, 4)), wired=4)
    # triangle tree and the singleton at 3 both reach Delta directly
    gen = forest_generating_set(g5, {0, 1})
    assert same_span(gen.elements, even_vectors(g5, boundary={4}))

    isolated = Graph(5, ((0, 1), (1, 2), (2, 0), (2, 3)), wired=4)
    with pytest.raises(GraphError):
        forest_generating_set(isolated, {0, 1, 3})
    gen = forest_generating_set(isolated, {0, 1, 3}, allow_isolated=True)
    assert same_span(gen.elements, even_vectors(isolated, boundary={4}))


def test_face_generating_set():
    from evenloop.planar import cycle_map, grid_map

    m22 = grid_map(2, 2)
    gen = face_generating_set(m22)
    assert len(gen) == 1
    m33 = grid_map(3, 3)
    gen33 = face_generating_set(m33)
    assert len(gen33) == 4
    c6 = cycle_map(6)
    genc = face_generating_set(c6)
    assert len(genc) == 1 and genc.elements[0].bit_count() == 6
    # spans equal fundamental cycles on every planar test map
    for pm in (m22, m33, c6, grid_map(2, 4)):
        fund = fundamental_cycles(pm.graph, spanning_tree(pm.graph))
        assert same_span(face_generating_set(pm).elements, fund.elements)


def test_euler_formula_on_maps():
    from evenloop.planar import cycle_map, grid_map

    for pm in (cycle_map(4), cycle_map(6), grid_map(2, 2), grid_map(3, 3),
               grid_map(2, 4)):
        g = pm.graph
        assert g.n - g.m + len(pm.faces()) == 2


def test_sample_uniform_even():
    k3 = build_graph("cycle", 3)
    empty = fundamental_cycles(k3, {0, 1, 2} - {2})
    rng = random.Random(0)
    from evenloop.cyclespace import GeneratingSet

    none = GeneratingSet(k3, (), ())
    assert sample_uniform_even(none, rng).bits == 0

    tri = fundamental_cycles(k3, {0, 1})
    hits = sum(sample_uniform_even(tri, random.Random(i)).bits == 0b111
               for i in range(2000))
    assert abs(hits / 2000 - 0.5) < 0.05


def test_coin_pushforward_uniform_on_span():
    """Lemma-style exactness: the coin law is uniform on the span even when
    the generating set is redundant."""
    k4 = build_graph("complete", 4)
    gen = greedy_generating_set(k4)
    law = coin_pushforward(gen)
    members = set(span_members(gaussian_basis(gen.elements)))
    assert set(law) == members
    assert all(p == Fraction(1, len(members)) for p in law.values())

    # redundant set: add a dependent element
    from evenloop.cyclespace import GeneratingSet

    redundant = GeneratingSet(
        k4, gen.elements + (gen.elements[0] ^ gen.elements[1],),
        gen.kinds + ("finite-cycle",))
    law2 = coin_pushforward(redundant)
    assert set(law2) == members
    assert all(p == Fraction(1, len(members)) for p in law2.values())


def test_count_even_subgraphs_examples():
    k3 = build_graph("cycle", 3)
    assert count_even_subgraphs(k3) == 2
    k4 = build_graph("complete", 4)
    assert count_even_subgraphs(k4) == 8
    p3 = build_graph("path", 3)
    assert count_even_subgraphs(p3, boundary=[0, 2]) == 2
    assert count_even_subgraphs(p3, boundary=[0, 2]) == enumerate_even_count(p3, [0, 2])


def test_count_even_subgraphs_matches_enumeration_with_boundaries():
    cases = [
        (build_graph("cycle", 4), [0, 1]),
        (build_graph("complete", 4), [0]),
        (build_graph("grid", 2, 3), [0, 5]),
        (attach_ghost(build_graph("cycle", 3), [0, 1]), []),
        (attach_ghost(build_graph("path", 3), [0, 1, 2]), [1]),
        (wired_quotient(build_graph("cycle", 4), [0, 2]), []),
    ]
    for g, B in cases:
        assert count_even_subgraphs(g, B) == enumerate_even_count(g, B)


def test_count_even_subgraphs_on_corpus():
    for name, g in corpus25():
        assert count_even_subgraphs(g) == enumerate_even_count(g), name


def test_project():
    assert project(0b111, []) == 0
    assert project(0b111, [0]) == 1
    assert project(0b101, [0, 2]) == 0b11
    assert project(0b101, [2, 0]) == 0b11      # window order is sorted


def test_project_space_monotone_rank():
    k4 = build_graph("complete", 4)
    vecs = even_vectors(k4)
    prev_rank = None
    for width in range(k4.m, -1, -1):
        rank = len(project_space(vecs, range(width)))
        if prev_rank is not None:
            assert rank <= prev_rank
        prev_rank = rank


def test_projection_commutes_with_span():
    """proj(span) equals span(proj) as sets, by enumeration."""
    rng = random.Random(9)
    for name, g in corpus25()[:12]:
        vecs = even_vectors(g, boundary={g.wired} if g.wired is not None else ())
        window = sorted(rng.sample(range(g.m), k=max(1, g.m // 2)))
        basis = project_space(vecs, window)
        direct = {project(v, window) for v in vecs}
        assert set(span_members(basis)) == direct, name


def test_remap_bits():
    assert remap_bits(0b101, [3, 1, 7]) == (1 << 3) | (1 << 7)


def test_vector_config_roundtrip():
    g = attach_ghost(build_graph("path", 3), [0, 2])
    for cfg in enumerate_configs(g):
        assert vector_to_config(g, config_to_vector(g, cfg)) == cfg


def test_generating_set_json_and_local_finiteness():
    k4 = build_graph("complete", 4)
    gen = greedy_generating_set(k4)
    data = gen.to_json()
    from evenloop.cyclespace import GeneratingSet

    back = GeneratingSet.from_json(k4, data)
    assert back.elements == gen.elements and back.kinds == gen.kinds
    counts = gen.slot_use_counts()
    assert all(isinstance(c, int) and c >= 1 for c in counts.values())
    total = sum(e.bit_count() for e in gen.elements)
    assert sum(counts.values()) == total
