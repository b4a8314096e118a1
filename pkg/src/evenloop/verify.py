"""Verification suites over a fixed corpus of small graphs.

The corpus holds 25 ghost-free graphs with at most 10 edges, several of them
multigraph quotients; ghosted variants with |E| + #sites <= 12 feed the
coupling checks.  The CLI exposes each suite; the acceptance tests call the
same functions.
"""

from __future__ import annotations

import random
from fractions import Fraction

from ._util import derive_seed
from .cyclespace import (GeneratingSet, bfs_edge_order, coin_pushforward,
                         config_to_vector, count_even_subgraphs,
                         face_generating_set, fundamental_cycles,
                         forest_generating_set, gaussian_basis,
                         greedy_generating_set, project, span_members,
                         spanning_tree)
from .exact import (bernoulli_site_distribution, config_universe,
                    enumerate_configs, pushforward, tv_distance)
from .fk import FKParams, exact_fk_distribution
from .graphs import (Graph, PercolationConfig, attach_ghost, build_graph,
                     odd_boundary, wired_quotient)
from .loops import (LoopParams, coupling_pushforward, exact_loop_distribution,
                    loop_params)


def corpus25() -> list[tuple[str, Graph]]:
    """25 graphs with |E| <= 10, including multigraphs from wired quotients."""
    ladder4 = build_graph("ladder", 4)
    entries = [
        ("path2", build_graph("path", 2)),
        ("path3", build_graph("path", 3)),
        ("path4", build_graph("path", 4)),
        ("path5", build_graph("path", 5)),
        ("cycle3", build_graph("cycle", 3)),
        ("cycle4", build_graph("cycle", 4)),
        ("cycle5", build_graph("cycle", 5)),
        ("cycle6", build_graph("cycle", 6)),
        ("complete4", build_graph("complete", 4)),
        ("ladder2", build_graph("ladder", 2)),
        ("ladder3", build_graph("ladder", 3)),
        ("grid22", build_graph("grid", 2, 2)),
        ("grid23", build_graph("grid", 2, 3)),
        ("grid24", build_graph("grid", 2, 4)),
        ("tree2", build_graph("tree", 2)),
        ("torus22", build_graph("torus", 2, 2)),
        ("wired-path3", wired_quotient(build_graph("path", 5), [1, 2, 3])),
        ("wired-path5", wired_quotient(build_graph("path", 7), [1, 2, 3, 4, 5])),
        ("wired-cycle4-adjacent", wired_quotient(build_graph("cycle", 4), [0, 1])),
        ("wired-cycle4-opposite", wired_quotient(build_graph("cycle", 4), [0, 2])),
        ("wired-cycle6", wired_quotient(build_graph("cycle", 6), [0, 1, 2, 3])),
        ("wired-ladder2", wired_quotient(ladder4, [2, 3, 4, 5])),
        ("wired-grid-center", wired_quotient(build_graph("grid", 3, 3), [4])),
        ("wired-tree1", wired_quotient(build_graph("tree", 2), [0, 1, 2])),
        ("wired-cycle3", wired_quotient(build_graph("cycle", 3), [0])),
    ]
    assert len(entries) == 25
    assert all(g.m <= 10 for _, g in entries)
    return entries


def coupling_corpus(max_sites: int = 12) -> list[tuple[str, Graph]]:
    """Corpus members plus ghosted variants, capped at |E| + #sites."""
    base = dict(corpus25())
    out = []
    for name in ("path3", "cycle3", "cycle5", "complete4", "grid23", "tree2",
                 "torus22", "wired-path3", "wired-path5", "wired-ladder2",
                 "wired-cycle4-opposite"):
        g = base[name]
        if g.m <= max_sites:
            out.append((name, g))
    ghosted = [
        ("path3+ghost", attach_ghost(base["path3"], [0, 1, 2])),
        ("cycle3+ghost", attach_ghost(base["cycle3"], [0, 1, 2])),
        ("cycle4+ghost2", attach_ghost(base["cycle4"], [0, 2])),
        ("complete4+ghost", attach_ghost(base["complete4"], [0, 1, 2, 3])),
        ("grid23+ghost3", attach_ghost(base["grid23"], [0, 2, 4])),
        ("ladder2+ghost", attach_ghost(base["ladder2"], [0, 1, 2, 3])),
        ("wired-path3+ghost", attach_ghost(base["wired-path3"], [0, 1, 2])),
        ("wired-cycle4-opposite+ghost",
         attach_ghost(base["wired-cycle4-opposite"], [0, 1])),
    ]
    for name, g in ghosted:
        if g.m + len(g.ghost_sites) <= max_sites:
            out.append((name, g))
    return out


def enumerate_even_count(g: Graph, boundary=()) -> int:
    """Independent oracle for the even-subgraph count: direct enumeration."""
    B = set(boundary)
    forced = 0
    for v in B:
        if v != g.wired and v in g.ghost_sites:
            forced |= 1 << v
    count = 0
    for cfg in enumerate_configs(g):
        if cfg.vertex_bits & forced != forced:
            continue
        if odd_boundary(g, cfg) <= B:
            count += 1
    return count


# ---------------------------------------------------------------------------
# suites


def suite_counting() -> dict:
    """Even-subgraph counts: formula vs enumeration on the corpus."""
    failures = []
    for name, g in corpus25():
        formula = count_even_subgraphs(g)
        enumerated = enumerate_even_count(g)
        if formula != enumerated:
            failures.append({"graph": name, "formula": formula,
                             "enumerated": enumerated})
    return {"suite": "counting", "checks": 25, "failures": failures,
            "ok": not failures}


def corpus_generating_sets(name: str, g: Graph) -> list[tuple[str, GeneratingSet]]:
    """Greedy, fundamental-cycle, forest and face constructions, as defined
    for the graph at hand."""
    out = [("greedy", greedy_generating_set(g, mode="wired" if g.wired is not None else "free")),
           ("fundamental-bfs", fundamental_cycles(g, spanning_tree(g, "bfs"))),
           ("fundamental-dfs", fundamental_cycles(g, spanning_tree(g, "dfs")))]
    if g.wired is not None:
        from .loops import _ordinary_forest

        out.append(("forest", forest_generating_set(
            g, _ordinary_forest(g), allow_isolated=True)))
    if name in _PLANAR_BUILDERS:
        out.append(("face", face_generating_set(_PLANAR_BUILDERS[name]())))
    return out


def _cycle_map3():
    from .planar import cycle_map

    return cycle_map(3)


def _cycle_map6():
    from .planar import cycle_map

    return cycle_map(6)


def _grid_map22():
    from .planar import grid_map

    return grid_map(2, 2)


def _grid_map23():
    from .planar import grid_map

    return grid_map(2, 3)


_PLANAR_BUILDERS = {
    "cycle3": _cycle_map3,
    "cycle6": _cycle_map6,
    "grid22": _grid_map22,
    "grid23": _grid_map23,
}


def suite_uniformity() -> dict:
    """Coin-vector pushforward equals the uniform law on the span, exactly,
    for every corpus generating set."""
    failures = []
    checks = 0
    for name, g in corpus25():
        for kind, gen in corpus_generating_sets(name, g):
            checks += 1
            law = coin_pushforward(gen)
            members = set(span_members(gaussian_basis(gen.elements)))
            expected = Fraction(1, len(members))
            if set(law) != members or any(p != expected for p in law.values()):
                failures.append({"graph": name, "generating_set": kind})
    return {"suite": "uniformity", "checks": checks, "failures": failures,
            "ok": not failures}


def _xy_grid():
    vals = [0.0, 0.25, 0.5, 0.75, 1.0]
    return [(x, y) for x in vals for y in vals]


def or_pushforward_fast(g: Graph, params: LoopParams):
    """The coupling pushforward, distributing each loop configuration over
    the supersets it can OR into (same convolution, factored)."""
    from .cyclespace import vector_to_config
    from .graphs import site_mask

    loop = exact_loop_distribution(g, params)
    x, y = params.x, params.y
    smask = site_mask(g)
    out: dict[int, float] = {}
    for eta, p_eta in zip(loop.support, loop.probs):
        base = config_to_vector(g, eta)
        free_slots = [i for i in range(g.m) if not base >> i & 1]
        free_slots += [g.m + v for v in range(g.n)
                       if smask >> v & 1 and not base >> (g.m + v) & 1]
        masses = {base: p_eta}
        for s in free_slots:
            q = x if s < g.m else y
            nxt: dict[int, float] = {}
            for bits, mass in masses.items():
                if q != 1:
                    nxt[bits] = nxt.get(bits, 0) + mass * (1 - q)
                if q != 0:
                    up = bits | (1 << s)
                    nxt[up] = nxt.get(up, 0) + mass * q
            masses = nxt
        for bits, mass in masses.items():
            out[bits] = out.get(bits, 0) + mass
    from .exact import ExactDistribution

    support = [vector_to_config(g, b) for b in out]
    return ExactDistribution(support, list(out.values()), config_universe(g))


def suite_coupling(max_sites: int = 12, tol: float = 1e-12) -> dict:
    """The union-with-Bernoulli identity: loop OR Bernoulli(x, y) must equal
    FK at p = 2x/(1+x), p_h = 2y/(1+y), for both boundary conditions."""
    from .graphs import unwire
    from .loops import fk_params_for

    failures = []
    checks = 0
    for name, g in coupling_corpus(max_sites):
        variants = [("free", unwire(g))] if g.wired is not None else [("free", g)]
        if g.wired is not None:
            variants.append(("wired", g))
        for boundary, host in variants:
            for x, y in _xy_grid():
                params = loop_params(host, x, y, boundary)
                checks += 1
                lhs = or_pushforward_fast(host, params)
                rhs = exact_fk_distribution(host, fk_params_for(host, params))
                tv = tv_distance(lhs, rhs)
                if tv > tol:
                    failures.append({"graph": name, "boundary": boundary,
                                     "x": x, "y": y, "tv": float(tv)})
    return {"suite": "coupling", "checks": checks, "failures": failures,
            "ok": not failures}


def suite_order(seed: int = 0, n_graphs: int = 10, trials: int = 10) -> dict:
    """Popping-order invariance over random connected graphs."""
    from .wilson import legal_order_invariance_check

    failures = []
    checks = 0
    for gi in range(n_graphs):
        g = random_connected_graph(derive_seed(seed, "order", gi))
        report = legal_order_invariance_check(g, 0, derive_seed(seed, gi),
                                              n_trials=trials)
        checks += trials
        if not report["ok"]:
            failures.append({"graph_index": gi, "failures": report["failures"]})
    return {"suite": "order", "checks": checks, "failures": failures,
            "ok": not failures}


def suite_duality(tol: float = 1e-10) -> dict:
    """Gradient-of-spins versus the boundary-wired loop measure on the dual."""
    from .planar import cycle_map, duality_check, grid_map

    failures = []
    checks = 0
    maps = [("cycle6", cycle_map(6)), ("grid22", grid_map(2, 2)),
            ("grid23", grid_map(2, 3))]
    for beta in (0.0, 0.4, 0.8):
        for name, pm in maps:
            checks += 1
            report = duality_check(pm, beta)
            if report["tv_free_to_wired_dual"] > tol or \
               report["tv_plus_to_free_dual"] > tol:
                failures.append({"map": name, "beta": beta, **report})
    return {"suite": "duality", "checks": checks, "failures": failures,
            "ok": not failures}


def random_connected_graph(seed: int, n_lo: int = 4, n_hi: int = 8) -> Graph:
    """Seeded random connected simple graph for the popping trials."""
    rng = random.Random(seed)
    n = rng.randint(n_lo, n_hi)
    while True:
        edges = []
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < 0.45:
                    edges.append((u, v))
        if not edges:
            continue
        g = Graph(n, tuple(edges), family="custom")
        from .graphs import components

        if len(components(g)) == 1:
            return g


SUITES = {
    "counting": lambda seed: suite_counting(),
    "uniformity": lambda seed: suite_uniformity(),
    "coupling": lambda seed: suite_coupling(),
    "order": lambda seed: suite_order(seed),
    "duality": lambda seed: suite_duality(),
}


def run_suites(names, seed: int = 0) -> dict:
    if "all" in names:
        names = list(SUITES)
    reports = [SUITES[name](seed) for name in names]
    return {"suites": reports, "ok": all(r["ok"] for r in reports)}
