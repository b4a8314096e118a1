"""GF(2) linear algebra over edge sets and the generating-set constructions.

Vectors are Python ints used as bitmasks over a graph's *slot space*: bit i
(i < m) is edge position i, bit m + v is the ghost-edge slot at vertex v.
Word-parallel XOR on ints is the workhorse; spans of rank up to ~20 are
enumerated directly in the oracle tests.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .graphs import Graph, GraphError, PercolationConfig, UnionFind, check_config


def slot_width(g: Graph) -> int:
    return g.m + (g.n if g.has_ghost else 0)


def config_to_vector(g: Graph, cfg: PercolationConfig) -> int:
    check_config(g, cfg)
    return cfg.edge_bits | (cfg.vertex_bits << g.m)


def vector_to_config(g: Graph, bits: int) -> PercolationConfig:
    return PercolationConfig(bits & ((1 << g.m) - 1), bits >> g.m)


def remap_bits(bits: int, slot_ids) -> int:
    """Translate position-indexed bits through a per-position slot-id table."""
    out = 0
    while bits:
        i = (bits & -bits).bit_length() - 1
        out |= 1 << slot_ids[i]
        bits &= bits - 1
    return out


@dataclass(frozen=True)
class EdgeVector:
    host: Graph
    bits: int

    def __xor__(self, other: "EdgeVector") -> "EdgeVector":
        if other.host is not self.host:
            raise GraphError("host mismatch in XOR")
        return EdgeVector(self.host, self.bits ^ other.bits)

    def to_config(self) -> PercolationConfig:
        return vector_to_config(self.host, self.bits)


def xor_sum(vectors) -> EdgeVector:
    """Symmetric difference of any number of vectors on a common host."""
    vectors = list(vectors)
    if not vectors:
        raise GraphError("xor_sum of nothing has no host; use EdgeVector(g, 0)")
    host = vectors[0].host
    bits = 0
    for v in vectors:
        if v.host is not host:
            raise GraphError("host mismatch in xor_sum")
        bits ^= v.bits
    return EdgeVector(host, bits)


@dataclass(frozen=True)
class GeneratingSet:
    """Ordered collection of even-subgraph vectors with provenance tags."""

    host: Graph
    elements: tuple[int, ...]
    kinds: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def vectors(self) -> list[EdgeVector]:
        return [EdgeVector(self.host, b) for b in self.elements]

    def slot_use_counts(self) -> dict[int, int]:
        """Local finiteness witness: per slot, how many elements contain it."""
        counts: dict[int, int] = {}
        for b in self.elements:
            while b:
                i = (b & -b).bit_length() - 1
                counts[i] = counts.get(i, 0) + 1
                b &= b - 1
        return counts

    def to_json(self) -> list[dict]:
        return [{"slots": bit_positions(b), "kind": k}
                for b, k in zip(self.elements, self.kinds)]

    @classmethod
    def from_json(cls, host: Graph, data) -> "GeneratingSet":
        elems, kinds = [], []
        for entry in data:
            bits = 0
            for s in entry["slots"]:
                bits |= 1 << s
            elems.append(bits)
            kinds.append(entry["kind"])
        return cls(host, tuple(elems), tuple(kinds))


def bit_positions(bits: int) -> list[int]:
    out = []
    while bits:
        out.append((bits & -bits).bit_length() - 1)
        bits &= bits - 1
    return out


# ---------------------------------------------------------------------------
# Gaussian elimination


def gaussian_basis(vectors) -> list[int]:
    """Canonical reduced basis of the span, highest pivot first.

    Two vector collections span the same space iff their bases are equal as
    lists.
    """
    rows: list[int] = []
    for v in vectors:
        v = _reduce(v, rows)
        if not v:
            continue
        pivot = v.bit_length()
        # back-substitute to keep rows fully reduced
        rows = [r ^ v if r >> (pivot - 1) & 1 else r for r in rows]
        rows.append(v)
        rows.sort(key=int.bit_length, reverse=True)
    return rows


def _reduce(v: int, rows) -> int:
    for r in rows:
        if v >> (r.bit_length() - 1) & 1:
            v ^= r
    return v


def in_span(basis, v: int) -> bool:
    return _reduce(v, basis) == 0


def span_members(basis):
    """All 2^rank elements of the span (rank kept small by callers)."""
    members = [0]
    for b in basis:
        members += [x ^ b for x in members]
    return members


def same_span(vectors_a, vectors_b) -> bool:
    return gaussian_basis(vectors_a) == gaussian_basis(vectors_b)


def project(bits: int, window) -> int:
    """Restrict to the window slots, re-indexed in the window's sort order."""
    out = 0
    for j, s in enumerate(sorted(window)):
        if s < 0:
            raise GraphError("invalid window slot")
        if bits >> s & 1:
            out |= 1 << j
    return out


def project_space(vectors, window) -> list[int]:
    """Canonical basis of the projection of span(vectors) onto the window."""
    return gaussian_basis(project(v, window) for v in vectors)


# ---------------------------------------------------------------------------
# generating-set constructions


def _tree_paths(adj, root, n_nodes):
    """BFS parents over an adjacency list of (slot, other) pairs."""
    parent = {root: (None, None)}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for slot, y in adj[x]:
            if y not in parent:
                parent[y] = (slot, x)
                queue.append(y)
    return parent


def _path_bits(parent, v) -> int:
    bits = 0
    while parent[v][0] is not None:
        slot, v = parent[v]
        bits |= 1 << slot
    return bits


def fundamental_cycles(g: Graph, tree_edges) -> GeneratingSet:
    """One cycle per non-tree edge: the unique cycle in T + e.

    ``tree_edges`` is a set of edge positions forming a spanning tree of each
    connected component of g.
    """
    tree = set(tree_edges)
    uf = UnionFind(g.n)
    for i in tree:
        u, v = g.edges[i]
        if uf.find(u) == uf.find(v):
            raise GraphError("tree edges contain a cycle")
        uf.union(u, v)
    whole = UnionFind(g.n)
    for u, v in g.edges:
        whole.union(u, v)
    roots_tree = {uf.find(v) for v in range(g.n)}
    roots_whole = {whole.find(v) for v in range(g.n)}
    if len(roots_tree) != len(roots_whole):
        raise GraphError("edge set does not span every component")

    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for i in sorted(tree):
        u, v = g.edges[i]
        adj[u].append((i, v))
        adj[v].append((i, u))
    parents = {}
    for v in range(g.n):
        r = uf.find(v)
        if r not in parents:
            parents[r] = _tree_paths(adj, r, g.n)
    elems = []
    for i, (u, v) in enumerate(g.edges):
        if i in tree:
            continue
        par = parents[uf.find(u)]
        cycle = (1 << i) ^ _path_bits(par, u) ^ _path_bits(par, v)
        elems.append(cycle)
    return GeneratingSet(g, tuple(elems), ("finite-cycle",) * len(elems))


def spanning_tree(g: Graph, order: str = "bfs") -> set[int]:
    """Deterministic spanning tree (edge positions), BFS or DFS per component,
    rooted at the lowest-index vertex of each component."""
    inc = g.incident()
    seen = [False] * g.n
    tree: set[int] = set()
    for root in range(g.n):
        if seen[root]:
            continue
        seen[root] = True
        frontier = deque([root])
        while frontier:
            x = frontier.popleft() if order == "bfs" else frontier.pop()
            for slot, y in inc[x]:
                if not seen[y]:
                    seen[y] = True
                    tree.add(slot)
                    frontier.append(y)
    return tree


def forest_generating_set(gstar: Graph, forest_edges,
                          allow_isolated: bool = False) -> GeneratingSet:
    """Generators of the wired even space from a forest rooted toward Delta.

    ``forest_edges`` spans the ordinary vertices of each ordinary component
    and avoids Delta; a forest component reaches Delta through its designated
    ray, the lowest-index edge or ghost slot leading there (the truncation of
    the component's ray to infinity).  Each remaining slot e yields the
    unique cycle in (forest + rays) + e: a finite cycle when both endpoints
    share a tree, otherwise a path threaded through Delta.

    Components with no route to Delta are an error unless ``allow_isolated``
    is set, in which case their non-forest edges contribute plain
    fundamental cycles.
    """
    if gstar.wired is None:
        raise GraphError("forest generating set needs a wired vertex")
    delta = gstar.wired
    forest = set(forest_edges)
    uf = UnionFind(gstar.n)
    for i in forest:
        u, v = gstar.edges[i]
        if delta in (u, v):
            raise GraphError("forest edges must avoid Delta")
        if uf.find(u) == uf.find(v):
            raise GraphError("forest edges contain a cycle")
        uf.union(u, v)

    # designated ray per forest component: lowest slot reaching Delta
    attach: dict[int, int] = {}
    for i, (u, v) in enumerate(gstar.edges):
        if i in forest:
            continue
        if v == delta:
            u, v = v, u
        if u == delta and v != delta:
            root = uf.find(v)
            attach[root] = min(attach.get(root, i), i)
    for v in sorted(gstar.ghost_sites):
        attach.setdefault(uf.find(v), gstar.m + v)
    isolated_roots = set()
    for v in range(gstar.n):
        if v != delta and uf.find(v) not in attach:
            if not allow_isolated:
                raise GraphError(f"forest component of vertex {v} has no route to Delta")
            isolated_roots.add(uf.find(v))
    # an edge between two trees is fine when both thread through Delta;
    # otherwise the forest cannot span the even space
    for i, (u, v) in enumerate(gstar.edges):
        if i in forest or delta in (u, v):
            continue
        ru, rv = uf.find(u), uf.find(v)
        if ru != rv and (ru in isolated_roots or rv in isolated_roots):
            raise GraphError("cross-tree edge touches a tree with no Delta route")

    rays = set(attach.values())
    adj: list[list[tuple[int, int]]] = [[] for _ in range(gstar.n)]

    def endpoints(slot: int) -> tuple[int, int]:
        if slot < gstar.m:
            return gstar.edges[slot]
        return slot - gstar.m, delta

    for slot in sorted(forest | rays):
        u, v = endpoints(slot)
        adj[u].append((slot, v))
        adj[v].append((slot, u))
    parent = _tree_paths(adj, delta, gstar.n)
    for root in sorted(isolated_roots):
        start = min(v for v in range(gstar.n) if v != delta and uf.find(v) == root)
        parent.update(_tree_paths(adj, start, gstar.n))

    elems, kinds = [], []
    ghost_mask = ((1 << gstar.n) - 1) << gstar.m
    for slot in range(slot_width(gstar)):
        if slot in forest or slot in rays:
            continue
        if slot >= gstar.m and (slot - gstar.m) not in gstar.ghost_sites:
            continue
        u, v = endpoints(slot)
        cycle = (1 << slot) ^ _path_bits(parent, u) ^ _path_bits(parent, v)
        if cycle & ghost_mask:
            kind = "ghost-ray-cycle"
        elif _touches(gstar, cycle, delta):
            kind = "path-to-boundary"
        else:
            kind = "finite-cycle"
        elems.append(cycle)
        kinds.append(kind)
    return GeneratingSet(gstar, tuple(elems), tuple(kinds))


def _touches(g: Graph, bits: int, vertex: int) -> bool:
    for i in bit_positions(bits):
        if i < g.m and vertex in g.edges[i]:
            return True
        if i >= g.m and vertex == g.wired:
            return True
    return False


def bfs_edge_order(g: Graph) -> list[int]:
    """Default scan order: edges listed as BFS from vertex 0 reaches them."""
    inc = g.incident()
    seen_v = [False] * g.n
    seen_e = [False] * g.m
    order: list[int] = []
    for root in range(g.n):
        if seen_v[root]:
            continue
        seen_v[root] = True
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for slot, y in inc[x]:
                if not seen_e[slot]:
                    seen_e[slot] = True
                    order.append(slot)
                if not seen_v[y]:
                    seen_v[y] = True
                    queue.append(y)
    return order


def greedy_generating_set(g: Graph, edge_order=None, mode: str = "free") -> GeneratingSet:
    """Scan slots in order; emit a shortest even subgraph through each slot
    that avoids all previously scanned slots, whenever one exists.

    Free mode admits finite cycles among ordinary vertices only; wired mode
    also routes through Delta and the ghost slots.  Which cycle gets emitted
    when several qualify is a free parameter of the construction; the span is
    not affected, and this implementation pops the BFS-shortest one.
    """
    if mode not in ("free", "wired"):
        raise GraphError(f"unknown mode {mode!r}")
    if mode == "wired" and g.wired is None and not g.has_ghost:
        mode = "free"
    order = list(edge_order) if edge_order is not None else bfs_edge_order(g)
    if sorted(o for o in order if o < g.m) != list(range(g.m)):
        raise GraphError("edge_order must be a permutation of the edges")
    if mode == "wired":
        order += [g.m + v for v in sorted(g.ghost_sites) if g.m + v not in order]

    delta = g.wired
    gv = g.ghost_vertex
    n_nodes = g.n_nodes

    def endpoints(slot: int) -> tuple[int, int]:
        if slot < g.m:
            return g.edges[slot]
        return slot - g.m, gv

    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_nodes)]
    allowed_slots = list(range(g.m))
    if mode == "wired":
        allowed_slots += [g.m + v for v in sorted(g.ghost_sites)]
    for slot in allowed_slots:
        u, v = endpoints(slot)
        adj[u].append((slot, v))
        adj[v].append((slot, u))

    used: set[int] = set()
    elems, kinds = [], []
    for slot in order:
        u, v = endpoints(slot)
        banned_v = {delta} if (mode == "free" and delta is not None) else set()
        path = _shortest_path(adj, u, v, banned_slots=used | {slot},
                              banned_vertices=banned_v, n_nodes=n_nodes)
        if path is not None:
            cycle = (1 << slot)
            for s in path:
                cycle |= 1 << s
            ghost_mask = ((1 << g.n) - 1) << g.m
            if cycle & ghost_mask:
                kind = "ghost-ray-cycle"
            elif delta is not None and _touches(g, cycle, delta):
                kind = "path-to-boundary"
            else:
                kind = "finite-cycle"
            elems.append(cycle)
            kinds.append(kind)
        used.add(slot)
    return GeneratingSet(g, tuple(elems), tuple(kinds))


def _shortest_path(adj, src, dst, banned_slots, banned_vertices, n_nodes):
    if src in banned_vertices or dst in banned_vertices:
        return None
    prev = {src: (None, None)}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            path = []
            while prev[x][0] is not None:
                slot, x = prev[x]
                path.append(slot)
            return path
        for slot, y in adj[x]:
            if slot in banned_slots or y in banned_vertices or y in prev:
                continue
            prev[y] = (slot, x)
            queue.append(y)
    return None


def face_generating_set(pmap) -> GeneratingSet:
    """All bounded-face boundary cycles of a planar map (GF(2) boundaries)."""
    g = pmap.graph
    elems = []
    for fi, face in enumerate(pmap.faces()):
        if fi == pmap.outer_face:
            continue
        bits = 0
        for dart in face:
            bits ^= 1 << (dart >> 1)
        elems.append(bits)
    return GeneratingSet(g, tuple(elems), ("face",) * len(elems))


# ---------------------------------------------------------------------------
# sampling and counting


def sample_uniform_even(gen: GeneratingSet, rng) -> EdgeVector:
    """XOR of an independent fair-coin subset of the generators; the result
    is uniform on span(gen)."""
    bits = 0
    if len(gen):
        coins = rng.getrandbits(len(gen))
        for i, b in enumerate(gen.elements):
            if coins >> i & 1:
                bits ^= b
    return EdgeVector(gen.host, bits)


def coin_pushforward(gen: GeneratingSet) -> dict[int, object]:
    """Exact law of the coin-vector XOR over all 2^len(gen) coin vectors.

    Used as the oracle side of the uniform-sampling lemma; exact rationals.
    """
    from fractions import Fraction

    counts: dict[int, int] = {}
    total = 1 << len(gen)
    for coins in range(total):
        bits = 0
        c = coins
        i = 0
        while c:
            if c & 1:
                bits ^= gen.elements[i]
            c >>= 1
            i += 1
        counts[bits] = counts.get(bits, 0) + 1
    return {b: Fraction(k, total) for b, k in counts.items()}


def count_even_subgraphs(g: Graph, boundary=()) -> int:
    """Number of configurations with odd boundary inside B and forced bits on
    B, via 2^(|E|-|V|+m) on the identified enhanced graph."""
    B = set(boundary)
    for v in B:
        if not (0 <= v < g.n):
            raise GraphError("boundary vertex out of range")
    merged = set(B)
    gv = g.ghost_vertex
    if g.has_ghost and B:
        merged.add(gv)

    # node relabelling: merged block becomes one node, if present
    nodes = [v for v in range(g.n_nodes) if v not in merged]
    idx = {v: i for i, v in enumerate(nodes)}
    block = len(nodes) if merged else None
    n_h = len(nodes) + (1 if merged else 0)

    def remap(v: int) -> int:
        return idx[v] if v in idx else block

    uf = UnionFind(n_h)
    n_edges = 0
    for u, v in g.edges:
        ru, rv = remap(u), remap(v)
        n_edges += 1            # self-loops at the block stay in the count
        if ru != rv:
            uf.union(ru, rv)
    if g.has_ghost:
        for v in g.ghost_sites:
            if v in B:
                continue        # forced bit, not an edge of H
            ru, rv = remap(v), remap(gv)
            n_edges += 1
            if ru != rv:
                uf.union(ru, rv)
    m_comp = len({uf.find(x) for x in range(n_h)})
    exponent = n_edges - n_h + m_comp
    return 1 << exponent
