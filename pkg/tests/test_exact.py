"""The brute-force oracle layer itself."""

from fractions import Fraction

import pytest

from evenloop.exact import (CapExceeded, ExactDistribution, ZeroPartition,
                            bernoulli_site_distribution, config_universe,
                            empirical_distribution, enumerate_configs,
                            exact_distribution, pushforward, tv_distance)
from evenloop.graphs import PercolationConfig, attach_ghost, build_graph


def test_enumerate_counts():
    k3 = build_graph("cycle", 3)
    assert sum(1 for _ in enumerate_configs(k3)) == 8
    p2g = attach_ghost(build_graph("path", 2), [0, 1])
    assert sum(1 for _ in enumerate_configs(p2g)) == 8


def test_enumeration_cap():
    big = build_graph("grid", 5, 5)
    with pytest.raises(CapExceeded):
        list(enumerate_configs(big))


def test_exact_distribution_uniform_and_zero():
    k3 = build_graph("cycle", 3)
    d = exact_distribution(k3, lambda c: Fraction(1))
    assert len(d.support) == 8
    assert all(p == Fraction(1, 8) for p in d.probs)
    with pytest.raises(ZeroPartition):
        exact_distribution(k3, lambda c: 0)


def test_distribution_validation():
    with pytest.raises(ValueError):
        ExactDistribution(["a", "a"], [Fraction(1, 2), Fraction(1, 2)])
    with pytest.raises(ValueError):
        ExactDistribution(["a", "b"], [Fraction(3, 4), Fraction(3, 4)])


def test_pushforward_identity_constant_and_mass():
    k3 = build_graph("cycle", 3)
    d = exact_distribution(k3, lambda c: Fraction(1 + c.open_edge_count()))
    ident = pushforward(d, lambda c: c, universe=d.universe)
    assert tv_distance(ident, d) == 0
    const = pushforward(d, lambda c: "x")
    assert const.support == ["x"] and const.probs == [Fraction(1)]
    assert sum(const.probs) == 1


def test_pushforward_with_aux():
    k3 = build_graph("cycle", 3)
    d = exact_distribution(k3, lambda c: Fraction(1))
    aux = bernoulli_site_distribution(k3, Fraction(1, 3), 0)
    joint = pushforward(d, lambda a, b: a | b, aux=aux,
                        universe=config_universe(k3))
    assert abs(float(sum(joint.probs)) - 1) < 1e-12
    # OR with an independent uniform dominates pointwise marginals
    p_open = sum(p for c, p in zip(joint.support, joint.probs)
                 if c.edge_bits & 1)
    assert p_open == Fraction(1, 2) + Fraction(1, 2) * Fraction(1, 3)


def test_tv_metric():
    u = ExactDistribution(["a", "b"], [Fraction(1, 2), Fraction(1, 2)], "u")
    pa = ExactDistribution(["a"], [Fraction(1)], "u")
    pb = ExactDistribution(["b"], [Fraction(1)], "u")
    assert tv_distance(u, u) == 0
    assert tv_distance(pa, pb) == 1
    assert tv_distance(u, pa) == Fraction(1, 2)
    assert tv_distance(pa, u) == tv_distance(u, pa)
    assert tv_distance(pa, pb) <= tv_distance(pa, u) + tv_distance(u, pb)
    with pytest.raises(ValueError):
        tv_distance(u, ExactDistribution(["a"], [Fraction(1)], "other"))


def test_empirical():
    d = empirical_distribution(["a", "a", "b", "a"], "u")
    assert d.prob("a") == Fraction(3, 4)
    with pytest.raises(ValueError):
        empirical_distribution([], "u")


def test_bernoulli_extremes():
    k3 = build_graph("cycle", 3)
    zero = bernoulli_site_distribution(k3, 0, 0)
    assert zero.support == [PercolationConfig(0, 0)]
    one = bernoulli_site_distribution(k3, 1, 0)
    assert one.support == [PercolationConfig(0b111, 0)]
