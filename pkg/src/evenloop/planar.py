"""Planar maps as rotation systems: faces, duals, spins and the gradient.

A dart is an edge side: dart 2e points from edges[e][0] to edges[e][1] and
dart 2e+1 is its reverse.  Faces are the orbits of d -> successor of the
twin of d in the rotation at head(d); Euler's formula is checked whenever
faces are traced.  The dual shares edge indices with the primal, so a
configuration on dual edges is addressed exactly like one on primal edges.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import cached_property

from .exact import ExactDistribution, exact_distribution, pushforward
from .fk import FKParams, exact_fk_distribution
from .graphs import Graph, GraphError, PercolationConfig, UnionFind, components
from .loops import LoopParams, exact_loop_distribution

SpinConfig = tuple  # one of +1/-1 per vertex


@dataclass(frozen=True)
class PlanarMap:
    graph: Graph
    rotation: tuple  # per vertex, cyclic tuple of darts leaving it
    outer_face: int = 0

    def __post_init__(self):
        g = self.graph
        seen = set()
        if len(self.rotation) != g.n:
            raise GraphError("rotation needs one cycle per vertex")
        for v, darts in enumerate(self.rotation):
            for d in darts:
                e, side = d >> 1, d & 1
                if not (0 <= e < g.m) or d in seen:
                    raise GraphError(f"bad dart {d} at vertex {v}")
                if g.edges[e][side] != v:
                    raise GraphError(f"dart {d} does not leave vertex {v}")
                seen.add(d)
        if len(seen) != 2 * g.m:
            raise GraphError("rotation misses some edge sides")

    def dart_tail(self, d: int) -> int:
        return self.graph.edges[d >> 1][d & 1]

    def dart_head(self, d: int) -> int:
        return self.graph.edges[d >> 1][1 - (d & 1)]

    @cached_property
    def _next_in_face(self) -> dict:
        succ = {}
        for darts in self.rotation:
            for i, d in enumerate(darts):
                succ[d] = darts[(i + 1) % len(darts)]
        return {d: succ[d ^ 1] for d in succ}

    def faces(self) -> list[tuple[int, ...]]:
        """Face orbits, each starting from its smallest dart, sorted by it."""
        nxt = self._next_in_face
        out = []
        visited = set()
        for d0 in sorted(nxt):
            if d0 in visited:
                continue
            face = []
            d = d0
            while True:
                face.append(d)
                visited.add(d)
                d = nxt[d]
                if d == d0:
                    break
            out.append(tuple(face))
        g = self.graph
        n_comp = len(components(g))
        if g.n - g.m + len(out) != 1 + n_comp:
            raise GraphError("rotation system is not planar (Euler check failed)")
        return out

    def face_of_dart(self) -> dict[int, int]:
        return {d: fi for fi, face in enumerate(self.faces()) for d in face}


def _biggest_face(faces) -> int:
    return max(range(len(faces)), key=lambda i: (len(faces[i]), -i))


def cycle_map(n: int) -> PlanarMap:
    g = Graph(n, tuple((i, (i + 1) % n) for i in range(n)), family="cycle")
    rotation = []
    for v in range(n):
        fwd = 2 * v            # dart of edge (v, v+1) leaving v
        back = 2 * ((v - 1) % n) + 1
        rotation.append((fwd, back))
    pm = PlanarMap(g, tuple(rotation), 0)
    return PlanarMap(g, tuple(rotation), _biggest_face(pm.faces()))


def grid_map(rows: int, cols: int) -> PlanarMap:
    """The rows x cols vertex grid with its planar rotations."""
    from .graphs import build_graph

    g = build_graph("grid", rows, cols)
    pos = {}
    for i, (u, v) in enumerate(g.edges):
        pos[(u, v)] = i
        pos[(v, u)] = i

    def dart(u, v):
        e = pos[(u, v)]
        return 2 * e if g.edges[e][0] == u else 2 * e + 1

    rotation = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            cyc = []
            if c + 1 < cols:
                cyc.append(dart(v, v + 1))        # east
            if r > 0:
                cyc.append(dart(v, v - cols))     # north
            if c > 0:
                cyc.append(dart(v, v - 1))        # west
            if r + 1 < rows:
                cyc.append(dart(v, v + cols))     # south
            rotation.append(tuple(cyc))
    pm = PlanarMap(g, tuple(rotation), 0)
    return PlanarMap(g, tuple(rotation), _biggest_face(pm.faces()))


def map_from_json(data: dict) -> PlanarMap:
    """Map wire format: graph fields plus per-vertex cyclic edge-id lists."""
    from .graphs import graph_from_json

    g = graph_from_json(data)
    try:
        edge_lists = data["rotation"]
    except KeyError as exc:
        raise GraphError("map JSON needs a 'rotation' entry") from exc
    rotation = []
    for v, eids in enumerate(edge_lists):
        darts = []
        for e in eids:
            if not (0 <= e < g.m):
                raise GraphError(f"rotation at {v} names unknown edge {e}")
            u, w = g.edges[e]
            if u == v:
                darts.append(2 * e)
            elif w == v:
                darts.append(2 * e + 1)
            else:
                raise GraphError(f"edge {e} is not incident to vertex {v}")
        rotation.append(tuple(darts))
    pm = PlanarMap(g, tuple(rotation), 0)
    outer = data.get("outer_face")
    if outer is None:
        outer = _biggest_face(pm.faces())
    return PlanarMap(g, tuple(rotation), int(outer))


def map_to_json(pm: PlanarMap) -> dict:
    from .graphs import graph_to_json

    data = graph_to_json(pm.graph)
    data["rotation"] = [[d >> 1 for d in darts] for darts in pm.rotation]
    data["outer_face"] = pm.outer_face
    return data


def dual_map(pm: PlanarMap) -> PlanarMap:
    """Dual map with edge bijection e <-> e-dagger as the identity on indices.

    Dual vertex i is face i of the primal; the dual edge of e joins the two
    faces holding darts 2e and 2e+1.  A bridge would give a self-loop, which
    is rejected.
    """
    faces = pm.faces()
    face_of = {d: fi for fi, face in enumerate(faces) for d in face}
    g = pm.graph
    dual_edges = []
    for e in range(g.m):
        f1, f2 = face_of[2 * e], face_of[2 * e + 1]
        if f1 == f2:
            raise GraphError(f"edge {e} is a bridge; its dual is degenerate")
        dual_edges.append((f1, f2))
    dual_graph = Graph(len(faces), tuple(dual_edges), edge_ids=g.edge_ids,
                       family=g.family)
    rotation = tuple(tuple(d for d in face) for face in faces)
    pm_dual = PlanarMap(dual_graph, rotation, 0)
    return PlanarMap(dual_graph, rotation, _biggest_face(pm_dual.faces()))


def dual_isomorphism(pm: PlanarMap, dual: PlanarMap | None = None) -> dict[int, int]:
    """Vertex bijection showing dual(dual(m)) is m again.

    Every face of the dual collects exactly the darts leaving one primal
    vertex, so the double dual's vertices biject with m's; the bijection
    must send each edge of the double dual to the same-index edge of m.
    """
    dual = dual if dual is not None else dual_map(pm)
    dd = dual_map(dual)
    mapping = {}
    for fi, face in enumerate(dual.faces()):
        tails = {pm.dart_tail(d) for d in face}
        if len(tails) != 1:
            raise GraphError("dual face does not match a primal vertex")
        mapping[fi] = tails.pop()
    for e, (a, b) in enumerate(dd.graph.edges):
        if {mapping[a], mapping[b]} != set(pm.graph.edges[e]):
            raise GraphError("double dual edge endpoints do not match")
    return mapping


# ---------------------------------------------------------------------------
# spins


def ising_weight(g: Graph, spins: SpinConfig, beta: float, h: float = 0.0,
                 boundary_spin: int | None = None) -> float:
    """exp(beta * sum of edge agreements + h * sum of spins); Delta's spin is
    pinned to boundary_spin when given."""
    if boundary_spin is not None and g.wired is None and not g.has_ghost:
        raise GraphError("boundary spin needs wired or ghost structure")
    if g.wired is not None and boundary_spin is not None:
        if spins[g.wired] != boundary_spin:
            return 0.0
    energy = sum(spins[u] * spins[v] for u, v in g.edges)
    field = sum(spins[v] for v in g.ghost_sites)
    return math.exp(beta * energy + h * field)


def exact_ising_distribution(g: Graph, beta: float, h: float = 0.0,
                             boundary_spin: int | None = None) -> ExactDistribution:
    support, weights = [], []
    for code in range(1 << g.n):
        spins = tuple(1 if code >> v & 1 else -1 for v in range(g.n))
        w = ising_weight(g, spins, beta, h, boundary_spin)
        if w:
            support.append(spins)
            weights.append(w)
    total = sum(weights)
    return ExactDistribution(support, [w / total for w in weights],
                             universe=("spins", g.n, g.m))


def ising_from_fk(g: Graph, omega: PercolationConfig, boundary_spin=None,
                  rng=None) -> SpinConfig:
    """Color each cluster of omega uniformly; ghost or Delta clusters take
    the boundary spin."""
    if boundary_spin is not None and g.wired is None and not g.has_ghost:
        raise GraphError("boundary spin needs wired or ghost structure")
    rng = rng or random.Random(0)
    special = set()
    if boundary_spin is not None:
        if g.wired is not None:
            special.add(g.wired)
        if g.has_ghost:
            special.add(g.ghost_vertex)
    spins = [0] * g.n
    for cluster in components(g, omega):
        if special & cluster:
            s = boundary_spin
        else:
            s = 1 if rng.random() < 0.5 else -1
        for v in cluster:
            if v < g.n:
                spins[v] = s
    return tuple(spins)


def fk_to_ising_pushforward(g: Graph, params: FKParams,
                            boundary_spin=None) -> ExactDistribution:
    """Exact law of the cluster coloring applied to the exact FK table."""
    fk = exact_fk_distribution(g, params)
    out: dict = {}
    special = set()
    if boundary_spin is not None:
        if g.wired is not None:
            special.add(g.wired)
        if g.has_ghost:
            special.add(g.ghost_vertex)
    for omega, p in zip(fk.support, fk.probs):
        clusters = components(g, omega)
        free_clusters = [c for c in clusters if not (special & c)]
        forced = {v for c in clusters if special & c for v in c if v < g.n}
        share = p / (2 ** len(free_clusters))
        for code in range(1 << len(free_clusters)):
            spins = [0] * g.n
            for v in forced:
                spins[v] = boundary_spin
            for j, c in enumerate(free_clusters):
                s = 1 if code >> j & 1 else -1
                for v in c:
                    if v < g.n:
                        spins[v] = s
            key = tuple(spins)
            out[key] = out.get(key, 0) + share
    support = list(out)
    return ExactDistribution(support, [out[s] for s in support],
                             universe=("spins", g.n, g.m))


# ---------------------------------------------------------------------------
# gradient and duality


def gradient(spins: SpinConfig, pm: PlanarMap) -> PercolationConfig:
    """Dual-edge disagreement indicator; always even at every dual vertex."""
    g = pm.graph
    bits = 0
    for e, (u, v) in enumerate(g.edges):
        if spins[u] != spins[v]:
            bits |= 1 << e
    for face in pm.faces():
        crossings = sum(bits >> (d >> 1) & 1 for d in face)
        if crossings % 2:
            raise AssertionError("gradient image is odd at a dual vertex")
    return PercolationConfig(bits, 0)


def wired_dual_graph(pm: PlanarMap) -> Graph:
    """The dual as a graph whose Delta is the outer-face vertex."""
    dual = dual_map(pm)
    g = dual.graph
    return Graph(g.n, g.edges, g.edge_ids, wired=pm.outer_face, family=g.family)


def duality_check(pm: PlanarMap, beta: float) -> dict:
    """Exact comparison of the gradient of the free spin measure on the map
    with the boundary-wired loop measure on its dual at x = exp(-2 beta).

    On a finite map the outer-face dual vertex is the boundary vertex; with
    that convention the pushforward identity is exact, and the plus-boundary
    pairing degenerates to the same table (spin flip symmetry).
    """
    if pm.graph.wired is not None or pm.graph.has_ghost:
        raise GraphError("duality check expects a plain planar map")
    x = math.exp(-2 * beta)
    dualg = wired_dual_graph(pm)
    universe = ("dual-edges", dualg.n, dualg.m)

    ising = exact_ising_distribution(pm.graph, beta)
    lhs = pushforward(ising, lambda s: gradient(s, pm).edge_bits,
                      universe=universe)

    loop = exact_loop_distribution(
        dualg, LoopParams(x, 0, frozenset({dualg.wired})))
    rhs = pushforward(loop, lambda c: c.edge_bits, universe=universe)

    from .exact import tv_distance
    tv_free_wired = tv_distance(lhs, rhs)

    # plus-boundary spins on the map vs the free loop measure on the dual:
    # at finite size both sides coincide with the tables above.
    plus = exact_ising_distribution(pm.graph, beta, boundary_spin=None)
    pinned = plus.restrict(lambda s: s[0] == 1)
    lhs_plus = pushforward(pinned, lambda s: gradient(s, pm).edge_bits,
                           universe=universe)
    free_dual = Graph(dualg.n, dualg.edges, dualg.edge_ids, family=dualg.family)
    loop_free = exact_loop_distribution(free_dual, LoopParams(x, 0))
    rhs_free = pushforward(loop_free, lambda c: c.edge_bits, universe=universe)
    tv_plus_free = tv_distance(lhs_plus, rhs_free)

    return {"beta": beta, "x": x,
            "tv_free_to_wired_dual": tv_free_wired,
            "tv_plus_to_free_dual": tv_plus_free,
            "dual_vertices": dualg.n, "edges": dualg.m}
