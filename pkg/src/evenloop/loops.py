"""The loop measure on near-even configurations and its coupled sampler.

A configuration gets weight x^open_edges * y^open_vertices when its odd
boundary sits inside the boundary set B and its bits on B are open; the
boundary vertex Delta carries no bit, so B = {Delta} only relaxes the parity
constraint there.  Sampling goes through the random-cluster measure: draw
omega from FK at p = 2x/(1+x), p_h = 2y/(1+y), then take a uniform even
subgraph of the enhanced graph omega*.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from ._util import derive_seed
from .cyclespace import (GeneratingSet, config_to_vector, fundamental_cycles,
                         forest_generating_set, remap_bits,
                         sample_uniform_even, spanning_tree, vector_to_config)
from .exact import (ExactDistribution, bernoulli_site_distribution,
                    config_universe, exact_distribution, pushforward)
from .fk import FKParams, cftp_sample, exact_fk_distribution
from .graphs import (Graph, GraphError, PercolationConfig, check_config,
                     enhance, odd_boundary, site_mask)


@dataclass(frozen=True)
class LoopParams:
    x: object
    y: object = 0
    boundary_set: frozenset = frozenset()

    def __post_init__(self):
        if self.x < 0 or self.y < 0:
            raise ValueError("activities must be nonnegative")
        object.__setattr__(self, "boundary_set", frozenset(self.boundary_set))

    def exact(self) -> bool:
        return isinstance(self.x, (int, Fraction)) and isinstance(self.y, (int, Fraction))

    def sampleable(self) -> bool:
        return self.x <= 1 and self.y <= 1


def loop_params(g: Graph, x, y=0, boundary: str = "free") -> LoopParams:
    """Build parameters with B = {} (free) or B = {Delta} (wired)."""
    if boundary == "free":
        return LoopParams(x, y)
    if boundary == "wired":
        if g.wired is None:
            raise GraphError("wired boundary needs a graph with Delta")
        return LoopParams(x, y, frozenset({g.wired}))
    raise ValueError("boundary must be 'free' or 'wired'")


def fk_params_for(g: Graph, params: LoopParams) -> FKParams:
    """Cluster-weight parameters matching the loop activities.

    On a graph with Delta the boundary set must contain it; the free measure
    of a quotient lives on its unwired relabeling (see ``graphs.unwire``),
    where Delta is a plain parity-constrained vertex.
    """
    if g.wired is not None and g.wired not in params.boundary_set:
        raise GraphError("free measures on a quotient need unwire(g)")
    boundary = "wired" if g.wired is not None else "free"
    return FKParams(x_to_p(params.x), x_to_p(params.y), boundary)


# ---------------------------------------------------------------------------
# parameter maps


def x_to_p(x):
    """Edge activity to random-cluster weight, p = 2x/(1+x)."""
    if not (0 <= x <= 1):
        raise ValueError("activity out of [0, 1]")
    return 2 * x / (1 + x)


def p_to_x(p):
    if not (0 <= p <= 1):
        raise ValueError("weight out of [0, 1]")
    return p / (2 - p)


def beta_to_x(beta: float) -> float:
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    return math.tanh(beta)


def beta_to_p(beta: float) -> float:
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    return 1 - math.exp(-2 * beta)


def h_to_y(h: float) -> float:
    return beta_to_x(h)


def h_to_ph(h: float) -> float:
    return beta_to_p(h)


# ---------------------------------------------------------------------------
# weights and exact tables


def loop_weight(g: Graph, cfg: PercolationConfig, params: LoopParams):
    check_config(g, cfg)
    B = params.boundary_set
    for v in B:
        if not (0 <= v < g.n):
            raise GraphError("boundary vertex out of range")
    if not odd_boundary(g, cfg) <= B:
        return 0
    forced = 0
    for v in B:
        if v != g.wired:
            forced |= 1 << v
    if cfg.vertex_bits & forced != forced:
        return 0
    x, y = params.x, params.y
    one = Fraction(1) if params.exact() else 1.0
    ne, nv = cfg.open_edge_count(), cfg.open_vertex_count()
    wx = one if ne == 0 else (one * x) ** ne
    wy = one if nv == 0 else (one * y) ** nv
    return wx * wy


def exact_loop_distribution(g: Graph, params: LoopParams) -> ExactDistribution:
    return exact_distribution(g, lambda cfg: loop_weight(g, cfg, params))


# ---------------------------------------------------------------------------
# the coupling


def bernoulli_union(g: Graph, cfg: PercolationConfig, x, y, rng) -> PercolationConfig:
    """Pointwise OR with independent Bernoulli bits (x on edges, y on slots)."""
    check_config(g, cfg)
    ebits = cfg.edge_bits
    for i in range(g.m):
        if rng.random() < x:
            ebits |= 1 << i
    vbits = cfg.vertex_bits
    for v in g.ghost_sites:
        if rng.random() < y:
            vbits |= 1 << v
    return PercolationConfig(ebits, vbits)


def even_generating_set(gstar: Graph, boundary: str,
                        tree_order: str = "bfs") -> GeneratingSet:
    """Generators of the even space of an enhanced subgraph.

    Free mode: fundamental cycles of a spanning forest (the ghost vertex is
    an ordinary vertex of the enhanced graph).  Wired mode: forest
    generators routed through Delta, with plain fundamental cycles on the
    components that never reach Delta.
    """
    if boundary == "free" or gstar.wired is None:
        return fundamental_cycles(gstar, spanning_tree(gstar, tree_order))
    forest = _ordinary_forest(gstar, tree_order)
    return forest_generating_set(gstar, forest, allow_isolated=True)


def _ordinary_forest(gstar: Graph, tree_order: str = "bfs") -> set[int]:
    """Spanning forest over ordinary vertices using edges that avoid Delta,
    rooted at the lowest index of each ordinary component."""
    from collections import deque

    delta = gstar.wired
    inc = gstar.incident()
    seen = [False] * gstar.n
    if delta is not None:
        seen[delta] = True
    forest: set[int] = set()
    for root in range(gstar.n):
        if seen[root]:
            continue
        seen[root] = True
        frontier = deque([root])
        while frontier:
            x = frontier.popleft() if tree_order == "bfs" else frontier.pop()
            for slot, y in inc[x]:
                if y == delta or seen[y]:
                    continue
                seen[y] = True
                forest.add(slot)
                frontier.append(y)
    return forest


def couple_sample(g: Graph, params: LoopParams, seed,
                  tree_order: str = "bfs") -> PercolationConfig:
    """Two-stage exact sample: FK through CFTP, then a uniform even subgraph
    of the enhanced configuration."""
    if not params.sampleable():
        raise ValueError("sampling needs x, y in [0, 1]")
    boundary = "wired" if (g.wired is not None and g.wired in params.boundary_set) else "free"
    fkp = fk_params_for(g, params)
    omega = cftp_sample(g, fkp, derive_seed(seed, "fk"))
    return _even_stage(g, omega, boundary, derive_seed(seed, "even"), tree_order)


def _even_stage(g: Graph, omega: PercolationConfig, boundary: str, seed,
                tree_order: str = "bfs") -> PercolationConfig:
    gstar = enhance(g, omega)
    gen = even_generating_set(gstar, boundary, tree_order)
    rng = random.Random(seed)
    vec = sample_uniform_even(gen, rng)
    host_bits = remap_bits(vec.bits, gstar.edge_ids)
    eta = vector_to_config(g, host_bits)
    B = frozenset({g.wired}) if boundary == "wired" and g.wired is not None else frozenset()
    if not odd_boundary(g, eta) <= B:
        raise AssertionError("sampled configuration violates its boundary constraint")
    if not eta <= omega:
        raise AssertionError("even stage left the sampled cluster configuration")
    return eta


def couple_samples(g: Graph, params: LoopParams, seed, n: int,
                   tree_order: str = "bfs"):
    for i in range(n):
        yield couple_sample(g, params, derive_seed(seed, i), tree_order)


# ---------------------------------------------------------------------------
# exact verification helpers (the Prop-style identities, by enumeration)


def coupling_pushforward(g: Graph, params: LoopParams) -> ExactDistribution:
    """Exact law of eta OR X for eta from the loop measure and X independent
    Bernoulli(x, y); the claim under test is that this equals FK at the
    mapped parameters."""
    loop = exact_loop_distribution(g, params)
    bern = bernoulli_site_distribution(g, params.x, params.y)
    return pushforward(loop, lambda a, b: a | b, aux=bern,
                       universe=config_universe(g))


def conditional_uniformity_check(g: Graph, params: LoopParams) -> dict:
    """From the exact joint of (eta, eta'), verify the conditional of eta
    given eta' is uniform on {omega <= eta': boundary-admissible}."""
    loop = exact_loop_distribution(g, params)
    x, y = params.x, params.y
    one = Fraction(1) if params.exact() else 1.0
    joint: dict[PercolationConfig, dict[PercolationConfig, object]] = {}
    width = g.m + g.n
    smask = site_mask(g)
    for eta, p_eta in zip(loop.support, loop.probs):
        base = config_to_vector(g, eta)
        free_slots = [i for i in range(g.m) if not base >> i & 1]
        free_slots += [g.m + v for v in range(g.n)
                       if smask >> v & 1 and not base >> (g.m + v) & 1]
        masses = {base: p_eta * one}
        for s in free_slots:
            q = x if s < g.m else y
            nxt: dict[int, object] = {}
            for bits, mass in masses.items():
                if q != 1:
                    nxt[bits] = nxt.get(bits, 0) + mass * (one - q)
                if q != 0:
                    up = bits | (1 << s)
                    nxt[up] = nxt.get(up, 0) + mass * q
            masses = nxt
        for bits, mass in masses.items():
            prime = vector_to_config(g, bits)
            joint.setdefault(prime, {})[eta] = joint.get(prime, {}).get(eta, 0) + mass

    tol = 0 if params.exact() else 1e-12
    report = {"graph_sites": width, "cases": 0, "max_deviation": 0.0,
              "support_mismatches": 0, "ok": True}
    for prime, cond in joint.items():
        total = sum(cond.values())
        probs = [p / total for p in cond.values()]
        dev = max(probs) - min(probs)
        report["cases"] += 1
        report["max_deviation"] = max(report["max_deviation"], float(dev))
        if dev > tol:
            report["ok"] = False
        expected = _admissible_below(g, prime, params.boundary_set)
        if set(cond.keys()) != expected:
            report["support_mismatches"] += 1
            report["ok"] = False
    return report


def _admissible_below(g: Graph, prime: PercolationConfig, B) -> set:
    """{omega <= prime : odd boundary in B, bits on B open}, by enumeration
    over subsets of prime's open slots."""
    open_slots = [i for i in range(g.m) if prime.edge_bits >> i & 1]
    open_slots += [g.m + v for v in range(g.n) if prime.vertex_bits >> v & 1]
    forced = 0
    for v in B:
        if v != g.wired:
            forced |= 1 << v
    out = set()
    for code in range(1 << len(open_slots)):
        bits = 0
        for j, s in enumerate(open_slots):
            if code >> j & 1:
                bits |= 1 << s
        cfg = vector_to_config(g, bits)
        if cfg.vertex_bits & forced != forced:
            continue
        if odd_boundary(g, cfg) <= B:
            out.add(cfg)
    return out
