"""Finite multigraphs with optional ghost and boundary vertices.

Vertices are integers 0..n-1.  Edges are unordered endpoint pairs; parallel
edges are allowed, self-loops are not.  Two distinguished vertices may exist:

* the boundary vertex Delta (``wired``), produced by gluing the outside of a
  truncation into a single vertex, and
* the ghost vertex v*, which is never stored as a row of the vertex set.
  A vertex ``v`` in ``ghost_sites`` owns one ghost-edge slot; configurations
  address that slot through their vertex bit at ``v``.  When the graph is
  wired, the ghost vertex is identified with Delta, so an open slot at ``v``
  means an open edge {v, Delta}.

Delta carries no vertex bit: its would-be ghost edge is a self-loop and is
erased.  "Ordinary" vertices are all vertices other than Delta.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace


class GraphError(ValueError):
    """Malformed graph construction or dimension mismatch."""


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    edge_ids: tuple[int, ...] = ()
    ghost_sites: frozenset[int] = frozenset()
    has_ghost: bool = False
    wired: int | None = None
    family: str = "custom"

    def __post_init__(self):
        if self.n <= 0:
            raise GraphError("graph needs at least one vertex")
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge endpoint out of range: {(u, v)}")
            if u == v:
                raise GraphError(f"self-loop at {u} is forbidden")
        if not self.edge_ids:
            object.__setattr__(self, "edge_ids", tuple(range(len(self.edges))))
        if len(self.edge_ids) != len(self.edges):
            raise GraphError("edge_ids length mismatch")
        if self.wired is not None and not (0 <= self.wired < self.n):
            raise GraphError("wired vertex out of range")
        if not self.has_ghost and self.ghost_sites:
            raise GraphError("ghost sites without a ghost vertex")
        for v in self.ghost_sites:
            if not (0 <= v < self.n) or v == self.wired:
                raise GraphError(f"invalid ghost site {v}")

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def ordinary(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n) if v != self.wired)

    @property
    def ghost_vertex(self) -> int | None:
        """Node id used for v* in connectivity computations.

        Identified with Delta on wired graphs; otherwise the synthetic id n.
        """
        if not self.has_ghost:
            return None
        return self.wired if self.wired is not None else self.n

    @property
    def n_nodes(self) -> int:
        """Vertex count including the synthetic ghost node, if separate."""
        extra = 1 if (self.has_ghost and self.wired is None) else 0
        return self.n + extra

    def incident(self) -> list[list[tuple[int, int]]]:
        """Per vertex, list of (edge index, other endpoint)."""
        inc: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for i, (u, v) in enumerate(self.edges):
            inc[u].append((i, v))
            inc[v].append((i, u))
        return inc

    def degree(self, v: int) -> int:
        return sum(1 for u, w in self.edges for x in (u, w) if x == v)


@dataclass(frozen=True)
class PercolationConfig:
    """A 0/1 assignment on edges and ordinary vertices, packed as bitmasks.

    Bit i of ``edge_bits`` is edge position i; bit v of ``vertex_bits`` is the
    ghost-edge slot at vertex v.
    """

    edge_bits: int = 0
    vertex_bits: int = 0

    def __or__(self, other: "PercolationConfig") -> "PercolationConfig":
        return PercolationConfig(self.edge_bits | other.edge_bits,
                                 self.vertex_bits | other.vertex_bits)

    def __xor__(self, other: "PercolationConfig") -> "PercolationConfig":
        return PercolationConfig(self.edge_bits ^ other.edge_bits,
                                 self.vertex_bits ^ other.vertex_bits)

    def __le__(self, other: "PercolationConfig") -> bool:
        return (self.edge_bits & other.edge_bits) == self.edge_bits and \
               (self.vertex_bits & other.vertex_bits) == self.vertex_bits

    def open_edge_count(self) -> int:
        return self.edge_bits.bit_count()

    def open_vertex_count(self) -> int:
        return self.vertex_bits.bit_count()


def check_config(g: Graph, cfg: PercolationConfig) -> None:
    if cfg.edge_bits >> g.m:
        raise GraphError("edge bits exceed edge count")
    sites_mask = site_mask(g)
    if cfg.vertex_bits & ~sites_mask:
        raise GraphError("vertex bit outside the ghost sites")


def site_mask(g: Graph) -> int:
    mask = 0
    for v in g.ghost_sites:
        mask |= 1 << v
    return mask


def full_config(g: Graph) -> PercolationConfig:
    return PercolationConfig((1 << g.m) - 1, site_mask(g))


def zero_config(g: Graph) -> PercolationConfig:
    return PercolationConfig(0, 0)


# ---------------------------------------------------------------------------
# standard families


def build_graph(family: str, *params: int) -> Graph:
    """Construct a named graph family with deterministic numbering."""
    for p in params:
        if p <= 0:
            raise GraphError("size parameters must be positive")
    if family == "path":
        (n,) = params
        return Graph(n, tuple((i, i + 1) for i in range(n - 1)), family="path")
    if family == "cycle":
        (n,) = params
        if n < 2:
            raise GraphError("cycle needs at least 2 vertices")
        return Graph(n, tuple((i, (i + 1) % n) for i in range(n)), family="cycle")
    if family == "complete":
        (n,) = params
        edges = tuple((i, j) for i in range(n) for j in range(i + 1, n))
        return Graph(n, edges, family="complete")
    if family == "ladder":
        (n,) = params
        # vertex (i, s) -> 2i + s; n rungs, 2(n-1) rail edges
        edges = [(2 * i, 2 * i + 1) for i in range(n)]
        for i in range(n - 1):
            edges.append((2 * i, 2 * i + 2))
            edges.append((2 * i + 1, 2 * i + 3))
        return Graph(2 * n, tuple(edges), family="ladder")
    if family == "grid":
        n, m = params if len(params) == 2 else (params[0], params[0])
        edges = []
        for i in range(n):
            for j in range(m):
                v = i * m + j
                if j + 1 < m:
                    edges.append((v, v + 1))
                if i + 1 < n:
                    edges.append((v, v + m))
        return Graph(n * m, tuple(edges), family="grid")
    if family == "torus":
        n, m = params if len(params) == 2 else (params[0], params[0])
        if n < 2 or m < 2:
            raise GraphError("torus sides must be at least 2")
        edges = []
        for i in range(n):
            for j in range(m):
                v = i * m + j
                edges.append((v, i * m + (j + 1) % m))
                edges.append((v, ((i + 1) % n) * m + j))
        return Graph(n * m, tuple(edges), family="torus")
    if family == "tree":
        (d,) = params
        n = 2 ** (d + 1) - 1
        edges = tuple(((v - 1) // 2, v) for v in range(1, n))
        return Graph(n, edges, family="tree")
    raise GraphError(f"unknown family {family!r}")


def parse_family_spec(spec: str) -> Graph:
    """Parse CLI strings such as ``ladder:12`` or ``grid:6:4``."""
    parts = spec.split(":")
    name, args = parts[0], parts[1:]
    try:
        params = tuple(int(a) for a in args)
    except ValueError as exc:
        raise GraphError(f"bad family parameters in {spec!r}") from exc
    if not params:
        raise GraphError(f"family spec {spec!r} needs a size parameter")
    return build_graph(name, *params)


# ---------------------------------------------------------------------------
# constructions


def wired_quotient(g: Graph, keep) -> Graph:
    """Glue every vertex outside ``keep`` into Delta and drop self-loops.

    Kept vertices are renumbered in sorted order, Delta gets the last index.
    Surviving edges keep their pre-image identities.  A pre-existing ghost
    vertex is identified with Delta, so ghost slots at glued sites vanish.
    """
    keep = sorted(set(keep))
    ordinary = set(g.ordinary)
    if not keep:
        raise GraphError("keep set is empty")
    if not set(keep) <= ordinary:
        raise GraphError("keep must consist of ordinary vertices")
    if set(keep) == ordinary:
        raise GraphError("keep must be a proper subset")
    idx = {v: i for i, v in enumerate(keep)}
    delta = len(keep)

    def remap(v: int) -> int:
        return idx.get(v, delta)

    edges, ids = [], []
    for eid, (u, v) in zip(g.edge_ids, g.edges):
        ru, rv = remap(u), remap(v)
        if ru == rv:
            continue
        edges.append((ru, rv))
        ids.append(eid)
    sites = frozenset(idx[v] for v in g.ghost_sites if v in idx)
    return Graph(delta + 1, tuple(edges), tuple(ids),
                 ghost_sites=sites, has_ghost=g.has_ghost,
                 wired=delta, family=g.family)


def attach_ghost(g: Graph, sites) -> Graph:
    """Add the ghost vertex with one edge slot per site."""
    if g.has_ghost:
        raise GraphError("ghost vertex already present")
    sites = frozenset(sites)
    if g.wired in sites:
        raise GraphError("Delta cannot be a ghost site")
    return replace(g, has_ghost=True, ghost_sites=sites)


def unwire(g: Graph) -> Graph:
    """Forget the boundary marking: Delta becomes a plain vertex.

    Free measures on a quotient multigraph act on this relabeling, where
    Delta is parity constrained like everyone else and the ghost vertex, if
    any, stays separate.
    """
    return replace(g, wired=None)


def enhance(g: Graph, cfg: PercolationConfig) -> Graph:
    """The spanning subgraph with open edges plus open ghost edges.

    Edge identities of the result are host slot indices: edge position i for
    graph edges, m + v for the ghost edge at site v.  The ghost vertex is
    materialised as a real vertex (Delta itself on wired graphs).
    """
    check_config(g, cfg)
    gv = g.ghost_vertex
    n = g.n
    if g.has_ghost and g.wired is None:
        n = g.n + 1
    edges, ids = [], []
    for i, (u, v) in enumerate(g.edges):
        if cfg.edge_bits >> i & 1:
            edges.append((u, v))
            ids.append(i)
    for v in sorted(g.ghost_sites):
        if cfg.vertex_bits >> v & 1:
            edges.append((v, gv))
            ids.append(g.m + v)
    return Graph(n, tuple(edges), tuple(ids), wired=g.wired, family=g.family)


def odd_boundary(g: Graph, cfg: PercolationConfig) -> frozenset[int]:
    """Ordinary vertices whose vertex bit plus open edge degree is odd."""
    check_config(g, cfg)
    parity = [0] * g.n
    bits = cfg.edge_bits
    while bits:
        i = (bits & -bits).bit_length() - 1
        u, v = g.edges[i]
        parity[u] ^= 1
        parity[v] ^= 1
        bits &= bits - 1
    vbits = cfg.vertex_bits
    while vbits:
        v = (vbits & -vbits).bit_length() - 1
        parity[v] ^= 1
        vbits &= vbits - 1
    return frozenset(v for v in range(g.n) if parity[v] and v != g.wired)


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))
        self.count = size

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra
            self.count -= 1


def components(g: Graph, restricted_to: PercolationConfig | None = None) -> list[frozenset[int]]:
    """Connected components over open edges and open ghost edges.

    With no configuration all edges and slots count as open.  The synthetic
    ghost node (id n) appears in the partition when the ghost is not wired.
    """
    cfg = restricted_to if restricted_to is not None else full_config(g)
    check_config(g, cfg)
    uf = UnionFind(g.n_nodes)
    for i, (u, v) in enumerate(g.edges):
        if cfg.edge_bits >> i & 1:
            uf.union(u, v)
    gv = g.ghost_vertex
    vbits = cfg.vertex_bits
    while vbits:
        v = (vbits & -vbits).bit_length() - 1
        uf.union(v, gv)
        vbits &= vbits - 1
    groups: dict[int, set[int]] = {}
    for x in range(g.n_nodes):
        groups.setdefault(uf.find(x), set()).add(x)
    return [frozenset(s) for s in groups.values()]


# ---------------------------------------------------------------------------
# JSON graph format


def graph_to_json(g: Graph) -> dict:
    return {
        "vertices": g.n,
        "edges": [list(e) for e in g.edges],
        "ghost_sites": sorted(g.ghost_sites),
        "wired": g.wired is not None,
    }


def graph_from_json(data: dict) -> Graph:
    """Load the wire format; ``wired: true`` marks the last vertex as Delta."""
    try:
        n = int(data["vertices"])
        edges = tuple((int(u), int(v)) for u, v in data["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed graph JSON: {exc}") from exc
    sites = frozenset(int(v) for v in data.get("ghost_sites", []))
    wired = n - 1 if data.get("wired") else None
    return Graph(n, edges, ghost_sites=sites, has_ghost=bool(sites),
                 wired=wired, family=data.get("family", "custom"))


def load_graph(path: str) -> Graph:
    with open(path) as fh:
        return graph_from_json(json.load(fh))
