"""The q=2 random-cluster (FK-Ising) measure with external field.

Exact tables on tiny graphs, exact sampling on moderate graphs through
monotone coupling from the past.  Wired boundary conditions treat the
boundary vertex Delta as permanently ghost-open: its cluster never counts
toward the 2^k factor, which is the quotient-graph reading of conditioning
on an open boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .exact import ExactDistribution, config_universe, exact_distribution
from .graphs import (Graph, GraphError, PercolationConfig, UnionFind,
                     check_config, site_mask)


class CoalescenceFailure(RuntimeError):
    """Coupling from the past did not coalesce within the step cap."""


@dataclass(frozen=True)
class FKParams:
    p: object
    p_h: object = 0
    boundary: str = "free"

    def __post_init__(self):
        if not (0 <= self.p <= 1 and 0 <= self.p_h <= 1):
            raise ValueError("p and p_h must lie in [0, 1]")
        if self.boundary not in ("free", "wired"):
            raise ValueError("boundary must be 'free' or 'wired'")

    def exact(self) -> bool:
        return isinstance(self.p, (int, Fraction)) and isinstance(self.p_h, (int, Fraction))


def _check_boundary(g: Graph, params: FKParams) -> None:
    if params.boundary == "wired" and g.wired is None:
        raise GraphError("wired boundary needs a graph with Delta")


def cluster_count(g: Graph, cfg: PercolationConfig, wired: bool) -> int:
    """Clusters of the open edge graph that avoid open vertices and, under
    wired conditions, avoid Delta."""
    uf = UnionFind(g.n)
    bits = cfg.edge_bits
    while bits:
        i = (bits & -bits).bit_length() - 1
        u, v = g.edges[i]
        uf.union(u, v)
        bits &= bits - 1
    excluded = set()
    vbits = cfg.vertex_bits
    while vbits:
        v = (vbits & -vbits).bit_length() - 1
        excluded.add(uf.find(v))
        vbits &= vbits - 1
    if wired:
        excluded.add(uf.find(g.wired))
    roots = {uf.find(v) for v in range(g.n)}
    return len(roots) - len(roots & excluded)


def fk_weight(g: Graph, cfg: PercolationConfig, params: FKParams):
    """(p/(1-p))^open_edges (p_h/(1-p_h))^open_vertices 2^k.

    Weight-one bits are forced: an extreme parameter with the matching bit
    closed gives weight zero rather than an error.
    """
    check_config(g, cfg)
    _check_boundary(g, params)
    p, ph = params.p, params.p_h
    one = Fraction(1) if params.exact() else 1.0
    ne, nv = cfg.open_edge_count(), cfg.open_vertex_count()
    n_sites = len(g.ghost_sites)

    def factor(q, count, total):
        if q == 1:
            return one if count == total else 0
        odds = q / (one - q)
        return odds ** count

    we = factor(p, ne, g.m)
    wv = factor(ph, nv, n_sites)
    if we == 0 or wv == 0:
        return 0
    k = cluster_count(g, cfg, params.boundary == "wired")
    return we * wv * (2 ** k)


def exact_fk_distribution(g: Graph, params: FKParams) -> ExactDistribution:
    _check_boundary(g, params)
    return exact_distribution(g, lambda cfg: fk_weight(g, cfg, params))


def fk_marginals(g: Graph, params: FKParams) -> tuple[list[float], dict[int, float]]:
    """Exact per-edge and per-site open probabilities.

    Sums the vertex bits analytically per edge-cluster, so only the 2^|E|
    edge configurations are enumerated: a cluster with s ghost sites
    contributes (1+w)^s + 1 with w the site odds, the extra 1 being the 2^k
    bonus of the all-closed choice.  Pure algebra on the measure; the sampler
    never touches this code path.
    """
    _check_boundary(g, params)
    p, ph = float(params.p), float(params.p_h)
    wired = params.boundary == "wired"
    sites = sorted(g.ghost_sites)
    pos = {v: j for j, v in enumerate(sites)}
    open_odds = 1.0 if p == 1 else p / (1 - p)
    w = 0.0 if ph == 1 else ph / (1 - ph)

    Z = 0.0
    edge_mass = [0.0] * g.m
    site_mass = [0.0] * len(sites)
    full = (1 << g.m) - 1
    for code in range(1 << g.m):
        if (p == 1 and code != full) or (p == 0 and code != 0):
            continue
        uf = UnionFind(g.n)
        bits, n_open = code, 0
        while bits:
            i = (bits & -bits).bit_length() - 1
            uf.union(*g.edges[i])
            n_open += 1
            bits &= bits - 1
        root_sites: dict[int, int] = {}
        for v in range(g.n):
            root_sites.setdefault(uf.find(v), 0)
        for v in sites:
            root_sites[uf.find(v)] += 1
        delta_root = uf.find(g.wired) if wired else None

        total = open_odds ** n_open
        factors: dict[int, float] = {}
        for root, s in root_sites.items():
            if ph == 1:
                f = 2.0 if (s == 0 and root != delta_root) else 1.0
            elif root == delta_root:
                f = (1 + w) ** s
            else:
                f = (1 + w) ** s + 1.0
            factors[root] = f
            total *= f
        Z += total
        bits = code
        while bits:
            i = (bits & -bits).bit_length() - 1
            edge_mass[i] += total
            bits &= bits - 1
        for v in sites:
            root = uf.find(v)
            if ph == 1:
                site_mass[pos[v]] += total
            elif ph > 0:
                s = root_sites[root]
                f1 = w * (1 + w) ** (s - 1)
                site_mass[pos[v]] += total / factors[root] * f1
    edge_probs = [mass / Z for mass in edge_mass]
    site_probs = {v: site_mass[pos[v]] / Z for v in sites}
    return edge_probs, site_probs


# ---------------------------------------------------------------------------
# heat-bath dynamics


def _site_table(g: Graph, params: FKParams):
    """Endpoints and thresholds for every site (edges then ghost slots)."""
    _check_boundary(g, params)
    gv = g.ghost_vertex
    endpoints = list(g.edges)
    sites = sorted(g.ghost_sites)
    endpoints += [(v, gv) for v in sites]
    p, ph = float(params.p), float(params.p_h)
    thresholds = [(p, p / (2 - p))] * g.m + [(ph, ph / (2 - ph))] * len(sites)
    return endpoints, thresholds, sites


class HeatBath:
    """Single-site heat-bath dynamics for one (graph, params) pair.

    Sites are indexed edges-first: site i < m is edge i, site m + j is the
    ghost slot at the j-th site vertex.  Under wired boundary conditions
    Delta is the ghost vertex, so connectivity queries automatically treat it
    as ghost-open.
    """

    def __init__(self, g: Graph, params: FKParams):
        self.graph = g
        self.params = params
        endpoints, thresholds, self.sites = _site_table(g, params)
        self.n_sites = len(endpoints)
        n_nodes = g.n_nodes
        # wired without open-vertex rule: Delta's cluster must read as ghost
        # connected even with no ghost sites, which the k-rule handles in
        # weights; for dynamics, connectivity to Delta is what matters and
        # Delta is a real node here.
        (self.site_a, self.site_b, self.thr_conn, self.thr_disc, self.indptr,
         self.adj_site, self.adj_other) = _kernels.build_site_arrays(
            n_nodes, endpoints, thresholds)
        self.n_nodes = n_nodes
        self._visited = np.zeros(n_nodes, dtype=np.int64)
        self._queue = np.zeros(n_nodes, dtype=np.int32)
        self._stamp = 0

    # -- config packing ----------------------------------------------------
    def state_from_config(self, cfg: PercolationConfig) -> np.ndarray:
        state = np.zeros(self.n_sites, dtype=np.int8)
        for i in range(self.graph.m):
            state[i] = cfg.edge_bits >> i & 1
        for j, v in enumerate(self.sites):
            state[self.graph.m + j] = cfg.vertex_bits >> v & 1
        return state

    def config_from_state(self, state) -> PercolationConfig:
        ebits = 0
        for i in range(self.graph.m):
            if state[i]:
                ebits |= 1 << i
        vbits = 0
        for j, v in enumerate(self.sites):
            if state[self.graph.m + j]:
                vbits |= 1 << v
        return PercolationConfig(ebits, vbits)

    # -- updates -----------------------------------------------------------
    def update(self, state, site: int, u: float) -> None:
        _kernels.py_heat_bath(state, site, u, self.site_a, self.site_b,
                              self.thr_conn, self.thr_disc, self.indptr,
                              self.adj_site, self.adj_other)

    def evolve_pair(self, lo, hi, sites, us, t_len) -> None:
        if _kernels.HAS_NUMBA:
            self._stamp = _kernels.evolve_pair(
                lo, hi, sites, us, t_len, self.site_a, self.site_b,
                self.thr_conn, self.thr_disc, self.indptr, self.adj_site,
                self.adj_other, self._visited, self._queue, self._stamp)
        else:
            _kernels.py_evolve_pair(lo, hi, sites, us, t_len, self.site_a,
                                    self.site_b, self.thr_conn, self.thr_disc,
                                    self.indptr, self.adj_site, self.adj_other)


def glauber_step(g: Graph, cfg: PercolationConfig, site: int, u: float,
                 params: FKParams) -> PercolationConfig:
    """Resample one site bit from its exact conditional given the rest.

    ``site`` indexes edges first; ghost slots follow in site-vertex order.
    The update is monotone in ``cfg`` for fixed ``u``.
    """
    hb = HeatBath(g, params)
    if not (0 <= site < hb.n_sites):
        raise GraphError("site index out of range")
    state = hb.state_from_config(cfg)
    hb.update(state, site, u)
    return hb.config_from_state(state)


# ---------------------------------------------------------------------------
# coupling from the past


DEFAULT_CAP = 1 << 22


def _sample_once(hb: HeatBath, rng, cap: int) -> np.ndarray:
    n_sites = hb.n_sites
    sites = np.empty(0, dtype=np.int64)
    us = np.empty(0, dtype=np.float64)
    t_len = max(2 * n_sites, 16)
    while True:
        if t_len > cap:
            raise CoalescenceFailure(f"no coalescence within {cap} steps")
        if len(sites) < t_len:
            extra = t_len - len(sites)
            sites = np.concatenate([sites, rng.integers(0, n_sites, size=extra)])
            us = np.concatenate([us, rng.random(extra)])
        lo = np.zeros(n_sites, dtype=np.int8)
        hi = np.ones(n_sites, dtype=np.int8)
        hb.evolve_pair(lo, hi, sites, us, t_len)
        if np.array_equal(lo, hi):
            return lo
        t_len *= 2


def cftp_sample(g: Graph, params: FKParams, seed, cap: int = DEFAULT_CAP) -> PercolationConfig:
    """One exact sample via monotone coupling from the past."""
    hb = HeatBath(g, params)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return hb.config_from_state(_sample_once(hb, rng, cap))


def cftp_samples(g: Graph, params: FKParams, seed: int, n: int,
                 cap: int = DEFAULT_CAP):
    """Stream of n independent exact samples; replica i uses seed (seed, i)."""
    hb = HeatBath(g, params)
    for i in range(n):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence((seed, i))))
        yield hb.config_from_state(_sample_once(hb, rng, cap))


# ---------------------------------------------------------------------------
# coupled sandwich across an exhaustion


class _CoupledChain:
    """One graph in the grand coupling; consumes the shared site stream."""

    def __init__(self, g: Graph, params: FKParams, site_keys):
        self.graph = g
        self.hb = HeatBath(g, params)
        self.local = {}
        for j, key in enumerate(site_keys):
            self.local[key] = j
        self.lo = None
        self.hi = None

    def reset(self):
        self.lo = np.zeros(self.hb.n_sites, dtype=np.int8)
        self.hi = np.ones(self.hb.n_sites, dtype=np.int8)

    def apply(self, key, u):
        j = self.local.get(key)
        if j is None:
            return
        self.hb.update(self.lo, j, u)
        self.hb.update(self.hi, j, u)

    def coalesced(self) -> bool:
        return np.array_equal(self.lo, self.hi)


def coupled_sandwich_run(chains: list[_CoupledChain], universe_keys, rng,
                         cap: int = DEFAULT_CAP):
    """Run CFTP for every chain on one shared randomness stream.

    Returns the list of coalesced states (one per chain).  The shared stream
    is indexed by global site keys so that larger truncations dominate or are
    dominated pointwise on every single run.
    """
    keys = list(universe_keys)
    moves: list[tuple[object, float]] = []
    t_len = 16 * len(keys)
    while True:
        if t_len > cap:
            raise CoalescenceFailure(f"no coalescence within {cap} steps")
        while len(moves) < t_len:
            moves.append((keys[rng.integers(0, len(keys))], rng.random()))
        for c in chains:
            c.reset()
        for t in range(t_len - 1, -1, -1):
            key, u = moves[t]
            for c in chains:
                c.apply(key, u)
        if all(c.coalesced() for c in chains):
            return [c.lo.copy() for c in chains]
        t_len *= 2


def _family_site_keys(g: Graph, coords) -> list:
    """Global keys: edge ids for edges, vertex coordinates for ghost slots."""
    keys = [("e", eid) for eid in g.edge_ids]
    for v in sorted(g.ghost_sites):
        keys.append(("v", coords[v]))
    return keys


def monotone_sandwich_trace(family, params_pair, n_range, seed,
                            n_runs: int = 1, cap: int = DEFAULT_CAP) -> dict:
    """Coupled free and wired samples along an exhaustion.

    Free samples increase in n and wired samples decrease, with free below
    wired, pointwise on every run; the sandwich is asserted on the global
    edge-id universe (absent edges read 0 for free chains and 1 for wired
    chains).  ``params_pair`` is (p, p_h).
    """
    from .graphs import attach_ghost

    p, p_h = params_pair
    ns = sorted(n_range)
    chains: list[_CoupledChain] = []
    labels: list[tuple[str, int]] = []
    universe: list = []
    for n in ns:
        gf, cf = family.free_with_coords(n)
        gw, cw = family.wired_with_coords(n)
        if p_h > 0:
            gf = attach_ghost(gf, range(gf.n))
            gw = attach_ghost(gw, gw.ordinary)
        chains.append(_CoupledChain(gf, FKParams(p, p_h, "free"),
                                    _family_site_keys(gf, cf)))
        labels.append(("free", n))
        chains.append(_CoupledChain(gw, FKParams(p, p_h, "wired"),
                                    _family_site_keys(gw, cw)))
        labels.append(("wired", n))
        if n == ns[-1]:
            universe = _family_site_keys(gw, cw)

    runs = []
    for r in range(n_runs):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence((seed, r))))
        states = coupled_sandwich_run(chains, universe, rng, cap)
        grids = {}
        for (mode, n), chain, state in zip(labels, chains, states):
            default = 0 if mode == "free" else 1
            bits = {}
            for key, j in chain.local.items():
                bits[key] = int(state[j])
            grids[(mode, n)] = (bits, default)
        _assert_sandwich(grids, ns, universe)
        runs.append({label: dict(grids[label][0]) for label in grids})
    return {"n_values": ns, "p": p, "p_h": p_h, "runs": runs,
            "sandwich_ok": True}


def _assert_sandwich(grids, ns, universe) -> None:
    def value(label, key):
        bits, default = grids[label]
        return bits.get(key, default)

    chain_order = [("free", n) for n in ns] + [("wired", n) for n in reversed(ns)]
    for key in universe:
        values = [value(label, key) for label in chain_order]
        for a, b in zip(values, values[1:]):
            if a > b:
                raise AssertionError(f"sandwich violated at site {key}")
