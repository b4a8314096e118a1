"""Loop-erased walks and cycle popping from stacks of arrows.

Each vertex owns a replayable stack of outgoing-edge choices derived from
(seed, vertex, color).  Running random walks that consume the stacks and
erasing loops chronologically yields a uniformly distributed spanning tree
oriented toward the sink; popping exposed cycles in any legal order consumes
the same colored cycles and leaves the same tree.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

from ._util import derive_seed, uniform_index
from .graphs import Graph, GraphError

STEP_CAP = 10_000_000


@dataclass
class ArrowStacks:
    """Deterministic per-vertex arrow sequences; color indices start at 1.

    ``arrow(v, i)`` is a uniform pick among the edges at v, the same for
    every call with the same (seed, v, i).  The sink never gets arrows.
    """

    graph: Graph
    seed: int
    sink: int
    _incident: list = field(init=False, repr=False)

    def __post_init__(self):
        self._incident = self.graph.incident()
        if not (0 <= self.sink < self.graph.n):
            raise GraphError("sink out of range")

    def arrow(self, v: int, color: int) -> tuple[int, int]:
        """(edge position, head vertex) of the color-th arrow at v."""
        if v == self.sink:
            raise GraphError("the sink has no arrows")
        if color < 1:
            raise GraphError("colors start at 1")
        inc = self._incident[v]
        if not inc:
            raise GraphError(f"vertex {v} has no outgoing edges")
        j = uniform_index(f"{self.seed}:{v}:{color}", len(inc))
        return inc[j]


@dataclass(frozen=True, eq=True)
class OrientedTree:
    sink: int
    parent: dict  # vertex -> (edge position, next vertex toward the sink)

    def edge_set(self) -> frozenset[int]:
        return frozenset(e for e, _ in self.parent.values())


def lerw(g: Graph, start: int, absorbing, rng, cap: int = STEP_CAP):
    """Loop-erasure of a simple random walk stopped on the absorbing set.

    Returns (vertices, edges): the path vertex sequence and the edge
    positions between consecutive entries.
    """
    absorbing = set(absorbing)
    if start in absorbing:
        return [start], []
    inc = g.incident()
    verts = [start]
    edges: list[int] = []
    pos = {start: 0}
    steps = 0
    while verts[-1] not in absorbing:
        steps += 1
        if steps > cap:
            raise RuntimeError("walk step cap exceeded; is the target reachable?")
        x = verts[-1]
        if not inc[x]:
            raise GraphError(f"vertex {x} has no edges; absorbing set unreachable")
        e, y = inc[x][rng.randrange(len(inc[x]))]
        if y in pos:
            j = pos[y]
            for w in verts[j + 1:]:
                del pos[w]
            del verts[j + 1:]
            del edges[j:]
        else:
            pos[y] = len(verts)
            verts.append(y)
            edges.append(e)
    return verts, edges


def wilson_ust(g: Graph, sink: int, vertex_order=None, seed: int = 0,
               stacks: ArrowStacks | None = None) -> OrientedTree:
    """Wilson's algorithm driven by arrow stacks.

    Walks start from each vertex in order, consume the first unused arrow at
    every visited vertex, stop on the growing tree, and get loop-erased.
    The tree's law is uniform over spanning trees and does not depend on the
    order; with fixed stacks, the realization itself is order-independent.
    """
    if stacks is None:
        stacks = ArrowStacks(g, seed, sink)
    order = list(vertex_order) if vertex_order is not None else list(range(g.n))
    color = [1] * g.n
    in_tree = [False] * g.n
    in_tree[sink] = True
    parent: dict[int, tuple[int, int]] = {}
    for v0 in order:
        if in_tree[v0]:
            continue
        verts = [v0]
        edges: list[int] = []
        pos = {v0: 0}
        steps = 0
        while not in_tree[verts[-1]]:
            steps += 1
            if steps > STEP_CAP:
                raise RuntimeError("stack walk exceeded the step cap")
            x = verts[-1]
            e, y = stacks.arrow(x, color[x])
            color[x] += 1
            if y in pos:
                j = pos[y]
                for w in verts[j + 1:]:
                    del pos[w]
                del verts[j + 1:]
                del edges[j:]
            else:
                pos[y] = len(verts)
                verts.append(y)
                edges.append(e)
        for i in range(len(verts) - 1):
            parent[verts[i]] = (edges[i], verts[i + 1])
            in_tree[verts[i]] = True
    return OrientedTree(sink, parent)


def wilson_wired(gq: Graph, seed: int = 0) -> OrientedTree:
    """Delta-rooted spanning tree of a wired quotient; its restriction to
    ordinary vertices is the wired spanning forest of the truncation."""
    if gq.wired is None:
        raise GraphError("wired sampling needs a graph with Delta")
    return wilson_ust(gq, gq.wired, seed=seed)


# ---------------------------------------------------------------------------
# cycle popping


def _canonical_cycle(triples) -> tuple:
    k = min(range(len(triples)), key=lambda i: triples[i])
    return tuple(triples[k:] + triples[:k])


class _PopState:
    def __init__(self, g: Graph, sink: int, stacks: ArrowStacks):
        self.g = g
        self.sink = sink
        self.stacks = stacks
        self.color = [1] * g.n
        self.popped: Counter = Counter()
        self.pops = 0

    def exposed(self, v: int) -> tuple[int, int]:
        return self.stacks.arrow(v, self.color[v])

    def cycle_through(self, v: int):
        """The unique exposed cycle through v, or None."""
        x = v
        seen = {v}
        while True:
            if x == self.sink:
                return None
            _, y = self.exposed(x)
            if y == v:
                break
            if y in seen:
                return None          # v leads into a cycle it is not on
            seen.add(y)
            x = y
        triples = []
        x = v
        while True:
            e, y = self.exposed(x)
            triples.append((x, self.color[x], e))
            if y == v:
                return triples
            x = y

    def pop(self, triples) -> None:
        self.popped[_canonical_cycle(triples)] += 1
        for v, _, _ in triples:
            self.color[v] += 1
        self.pops += len(triples)
        if self.pops > STEP_CAP:
            raise RuntimeError("cycle popping exceeded the step cap")

    def all_cycles(self) -> list[list[tuple]]:
        out = []
        claimed = set()
        for v in range(self.g.n):
            if v == self.sink or v in claimed:
                continue
            triples = self.cycle_through(v)
            if triples and not any(t[0] in claimed for t in triples):
                out.append(triples)
                claimed.update(t[0] for t in triples)
        return out

    def final_config(self) -> dict[int, tuple[int, int]]:
        config = {v: self.exposed(v) for v in range(self.g.n) if v != self.sink}
        for v in config:                       # must be a tree toward the sink
            x, hops = v, 0
            while x != self.sink:
                x = config[x][1]
                hops += 1
                if hops > self.g.n:
                    raise AssertionError("exposed arrows still contain a cycle")
        return config


def cycle_pop_run(g: Graph, sink: int, stacks: ArrowStacks, order="sweep"):
    """Pop exposed cycles until none remain.

    ``order`` selects the popping rule: "sweep" revisits vertices round-robin
    in index order, "shuffle:<seed>" re-shuffles the visiting sequence every
    sweep, and "largest_first"/"smallest_first" pop whole cycles by size.
    Any rule in which every vertex recurs is legal; the popped colored-cycle
    multiset and the final arrows do not depend on the choice.

    Returns (final arrow configuration, Counter of colored cycles).
    """
    state = _PopState(g, sink, stacks)
    if order in ("largest_first", "smallest_first"):
        while True:
            cycles = state.all_cycles()
            if not cycles:
                break
            key = (lambda c: (len(c), _canonical_cycle(c)))
            pick = max(cycles, key=key) if order == "largest_first" else min(cycles, key=key)
            state.pop(pick)
    else:
        if order == "sweep":
            sequence = lambda sweep: [v for v in range(g.n) if v != sink]
        elif isinstance(order, str) and order.startswith("shuffle:"):
            shuffle_rng = random.Random(derive_seed("pop-order", order))
            def sequence(sweep):
                vs = [v for v in range(g.n) if v != sink]
                shuffle_rng.shuffle(vs)
                return vs
        else:
            base = [v for v in order if v != sink]
            if set(base) != set(range(g.n)) - {sink}:
                raise GraphError("popping order must cover every non-sink vertex")
            sequence = lambda sweep: base
        sweep = 0
        while True:
            popped_any = False
            for v in sequence(sweep):
                triples = state.cycle_through(v)
                if triples:
                    state.pop(triples)
                    popped_any = True
            sweep += 1
            if not popped_any:
                break
    return state.final_config(), state.popped


def legal_order_invariance_check(g: Graph, sink: int, seed: int,
                                 n_trials: int = 10) -> dict:
    """Run pairs of popping orders over shared stacks and compare outcomes.

    Reports any counterexample verbatim; the expected count is zero.
    """
    orders = ["sweep", "largest_first", "smallest_first"]
    failures = []
    runs = []
    for t in range(n_trials):
        stacks = ArrowStacks(g, derive_seed(seed, "stacks", t), sink)
        orders_t = orders + [f"shuffle:{seed}:{t}:a", f"shuffle:{seed}:{t}:b"]
        results = [(o, cycle_pop_run(g, sink, stacks, o)) for o in orders_t]
        base_name, (base_cfg, base_cycles) = results[0]
        runs.append(sum(base_cycles.values()))
        for name, (cfg, cycles) in results[1:]:
            if cycles != base_cycles or cfg != base_cfg:
                failures.append({
                    "trial": t, "orders": (base_name, name),
                    "cycles": (sorted(base_cycles.items()), sorted(cycles.items())),
                })
    return {"trials": n_trials, "orders_per_trial": len(orders) + 2,
            "cycles_popped": runs, "failures": failures, "ok": not failures}
