"""Brute-force exact machinery: enumeration, tables, pushforwards, TV.

Every sampler in the package is validated against tables built here.  Weights
given as ``Fraction`` or ``int`` propagate through exact rational arithmetic;
float weights fall back to floats with 1e-12 tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graphs import Graph, GraphError, PercolationConfig, site_mask

ENUM_CAP = 22
NORM_TOL = 1e-12


class CapExceeded(RuntimeError):
    """State space larger than the enumeration cap."""


class ZeroPartition(ValueError):
    """Every configuration has weight zero."""


@dataclass
class ExactDistribution:
    """Explicit probability table over hashable outcomes.

    ``universe`` identifies the outcome space; distances are only defined
    between tables over the same universe.
    """

    support: list
    probs: list
    universe: object = None

    def __post_init__(self):
        if len(self.support) != len(self.probs):
            raise ValueError("support/probs length mismatch")
        if len(set(self.support)) != len(self.support):
            raise ValueError("support entries must be distinct")
        total = sum(self.probs)
        if any(p < 0 for p in self.probs):
            raise ValueError("negative probability")
        if abs(float(total) - 1.0) > NORM_TOL:
            raise ValueError(f"probabilities sum to {float(total)}")

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.probs))

    def prob(self, x) -> object:
        try:
            idx = self.support.index(x)
        except ValueError:
            return 0
        return self.probs[idx]

    def restrict(self, predicate) -> "ExactDistribution":
        """Condition on an event of positive probability."""
        pairs = [(x, p) for x, p in zip(self.support, self.probs) if predicate(x)]
        total = sum(p for _, p in pairs)
        if total == 0:
            raise ZeroPartition("conditioning event has probability zero")
        return ExactDistribution([x for x, _ in pairs],
                                 [p / total for _, p in pairs], self.universe)

    def map(self, f, universe=None) -> "ExactDistribution":
        return pushforward(self, f, universe=universe)

    def marginal(self, f, universe=None) -> dict:
        out: dict = {}
        for x, p in zip(self.support, self.probs):
            y = f(x)
            out[y] = out.get(y, 0) + p
        return out


def config_universe(g: Graph) -> tuple:
    return ("config", g.n, g.m, site_mask(g), g.wired)


def enumerate_configs(g: Graph):
    """Lexicographic enumeration of all 2^(|E| + #sites) configurations."""
    sites = sorted(g.ghost_sites)
    dims = g.m + len(sites)
    if dims > ENUM_CAP:
        raise CapExceeded(f"{dims} bits exceed the enumeration cap {ENUM_CAP}")
    for code in range(1 << dims):
        edge_bits = code & ((1 << g.m) - 1)
        vbits = 0
        for j, v in enumerate(sites):
            if code >> (g.m + j) & 1:
                vbits |= 1 << v
        yield PercolationConfig(edge_bits, vbits)


def exact_distribution(g: Graph, weight_fn, universe=None) -> ExactDistribution:
    """Normalise a nonnegative weight function over all configurations."""
    support, weights = [], []
    for cfg in enumerate_configs(g):
        w = weight_fn(cfg)
        if w:
            support.append(cfg)
            weights.append(w)
    total = sum(weights)
    if not total:
        raise ZeroPartition("zero partition function")
    if isinstance(total, Fraction) or isinstance(total, int):
        probs = [Fraction(w, 1) / total for w in weights]
    else:
        probs = [w / total for w in weights]
    return ExactDistribution(support, probs, universe or config_universe(g))


def pushforward(d: ExactDistribution, f, aux: ExactDistribution | None = None,
                universe=None) -> ExactDistribution:
    """Exact image distribution of ``f``, convolving ``aux`` when supplied."""
    out: dict = {}
    if aux is None:
        for x, p in zip(d.support, d.probs):
            y = f(x)
            out[y] = out.get(y, 0) + p
    else:
        for x, p in zip(d.support, d.probs):
            for a, q in zip(aux.support, aux.probs):
                y = f(x, a)
                out[y] = out.get(y, 0) + p * q
    support = list(out.keys())
    return ExactDistribution(support, [out[s] for s in support], universe)


def bernoulli_site_distribution(g: Graph, x, y) -> ExactDistribution:
    """Product Bernoulli percolation: parameter x on edges, y on ghost slots."""
    sites = sorted(g.ghost_sites)
    one = Fraction(1) if isinstance(x, (Fraction, int)) and isinstance(y, (Fraction, int)) else 1.0
    support, probs = [PercolationConfig(0, 0)], [one]
    for i in range(g.m):
        support, probs = _extend(support, probs, 1 << i, 0, x, one)
    for v in sites:
        support, probs = _extend(support, probs, 0, 1 << v, y, one)
    return ExactDistribution(support, probs, config_universe(g))


def _extend(support, probs, ebit, vbit, q, one):
    if q == 0:
        return support, probs
    if q == 1:
        return ([PercolationConfig(c.edge_bits | ebit, c.vertex_bits | vbit)
                 for c in support], probs)
    new_s, new_p = [], []
    for c, p in zip(support, probs):
        new_s.append(c)
        new_p.append(p * (one - q))
        new_s.append(PercolationConfig(c.edge_bits | ebit, c.vertex_bits | vbit))
        new_p.append(p * q)
    return new_s, new_p


def tv_distance(d1: ExactDistribution, d2: ExactDistribution) -> float:
    if d1.universe != d2.universe:
        raise ValueError("total variation needs a common support universe")
    p, q = d1.as_dict(), d2.as_dict()
    keys = set(p) | set(q)
    total = sum(abs(p.get(k, 0) - q.get(k, 0)) for k in keys)
    return total / 2


def empirical_distribution(samples, universe=None) -> ExactDistribution:
    counts: dict = {}
    n = 0
    for s in samples:
        counts[s] = counts.get(s, 0) + 1
        n += 1
    if not n:
        raise ValueError("no samples")
    support = list(counts.keys())
    return ExactDistribution(support, [Fraction(counts[s], n) for s in support],
                             universe)
