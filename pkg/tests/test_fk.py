"""Random-cluster weights, exact tables, heat-bath dynamics, CFTP."""

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evenloop.exact import (config_universe, empirical_distribution,
                            enumerate_configs, exact_distribution, tv_distance)
from evenloop.fk import (FKParams, HeatBath, cftp_sample, cftp_samples,
                         cluster_count, exact_fk_distribution, fk_marginals,
                         fk_weight, glauber_step, monotone_sandwich_trace)
from evenloop.graphs import (GraphError, PercolationConfig, attach_ghost,
                             build_graph, unwire, wired_quotient)

K3 = build_graph("cycle", 3)
HALF = Fraction(1, 2)


def test_fk_weight_examples():
    gk3 = attach_ghost(K3, [0, 1, 2])
    w = fk_weight(gk3, PercolationConfig(0, 0), FKParams(HALF, HALF))
    assert w == 8                      # odds one, three clusters
    assert fk_weight(K3, PercolationConfig(0b111, 0), FKParams(HALF, 0)) == 2
    p2 = attach_ghost(build_graph("path", 2), [0, 1])
    w3 = fk_weight(p2, PercolationConfig(0, 0b01), FKParams(HALF, HALF))
    assert w3 == 2                     # only the closed vertex's cluster counts


def test_fk_weight_extremes():
    params = FKParams(1, 0)
    assert fk_weight(K3, PercolationConfig(0b011, 0), params) == 0
    assert fk_weight(K3, PercolationConfig(0b111, 0), params) == 2
    d = exact_fk_distribution(K3, FKParams(0, 0))
    assert d.support == [PercolationConfig(0, 0)]
    d1 = exact_fk_distribution(K3, FKParams(1, 0))
    assert d1.support == [PercolationConfig(0b111, 0)]


def test_exact_fk_k3_hand_normalised():
    """Eq-style arithmetic by hand: weights 2^k at odds one."""
    d = exact_fk_distribution(K3, FKParams(HALF, 0))
    table = d.as_dict()
    # 1 empty config (k=3), 3 singles (k=2), 3 doubles (k=1), 1 triangle (k=1)
    z = 8 + 3 * 4 + 3 * 2 + 2
    assert table[PercolationConfig(0, 0)] == Fraction(8, z)
    assert table[PercolationConfig(0b1, 0)] == Fraction(4, z)
    assert table[PercolationConfig(0b111, 0)] == Fraction(2, z)


def test_cluster_count_wired():
    q = wired_quotient(build_graph("path", 5), [1, 2, 3])
    cfg = PercolationConfig(0, 0)
    assert cluster_count(q, cfg, wired=False) == 4
    assert cluster_count(q, cfg, wired=True) == 3


def test_wired_equals_conditioned_free():
    """The quotient's wired table equals the free table of the relabeled
    quotient with a ghost slot at Delta, conditioned on that slot being open,
    then marginalised."""
    q = wired_quotient(build_graph("path", 5), [1, 2, 3])
    p, ph = Fraction(2, 5), Fraction(1, 3)
    qg = attach_ghost(q, [0, 1, 2])
    wired = exact_fk_distribution(qg, FKParams(p, ph, "wired"))

    plain = unwire(q)                      # Delta as a plain vertex
    ref = attach_ghost(plain, [0, 1, 2, plain.wired or 3])
    free = exact_fk_distribution(ref, FKParams(p, ph, "free"))
    delta_bit = 1 << 3
    cond = free.restrict(lambda c: c.vertex_bits & delta_bit)
    margin = {}
    for c, pr in zip(cond.support, cond.probs):
        key = PercolationConfig(c.edge_bits, c.vertex_bits & ~delta_bit)
        margin[key] = margin.get(key, 0) + pr
    wired_table = wired.as_dict()
    assert set(margin) == set(wired_table)
    assert all(margin[k] == wired_table[k] for k in margin)


def test_glauber_pinned_examples():
    params = FKParams(1, 0)
    out = glauber_step(K3, PercolationConfig(0, 0), 0, 0.999, params)
    assert out.edge_bits & 1               # p = 1 always opens
    gk3 = attach_ghost(K3, [0])
    params0 = FKParams(HALF, 0)
    out = glauber_step(gk3, PercolationConfig(0, 1), gk3.m + 0, 0.0001, params0)
    assert out.vertex_bits == 0            # p_h = 0 always closes


def test_glauber_matches_exact_conditional():
    """The heat-bath threshold equals the exact conditional probability from
    the weight table, at every site and every surrounding configuration."""
    graphs = [
        ("k3+ghost", attach_ghost(K3, [0, 1]), FKParams(0.37, 0.22, "free")),
        ("wired-path3", wired_quotient(build_graph("path", 5), [1, 2, 3]),
         FKParams(0.6, 0.0, "wired")),
        ("wired+ghost", attach_ghost(
            wired_quotient(build_graph("path", 5), [1, 2, 3]), [0, 1, 2]),
         FKParams(0.55, 0.3, "wired")),
    ]
    for name, g, params in graphs:
        hb = HeatBath(g, params)
        rng = random.Random(7)
        for cfg in enumerate_configs(g):
            for site in range(hb.n_sites):
                state = hb.state_from_config(cfg)
                state[site] = 1
                w_open = fk_weight(g, hb.config_from_state(state), params)
                state[site] = 0
                w_closed = fk_weight(g, hb.config_from_state(state), params)
                p_cond = float(w_open / (w_open + w_closed))
                below = glauber_step(g, cfg, site, p_cond - 1e-9, params)
                above = glauber_step(g, cfg, site, p_cond + 1e-9, params)
                idx = site if site < g.m else None
                if idx is not None:
                    assert below.edge_bits >> idx & 1 == 1, name
                    assert above.edge_bits >> idx & 1 == 0, name
                else:
                    v = hb.sites[site - g.m]
                    assert below.vertex_bits >> v & 1 == 1, name
                    assert above.vertex_bits >> v & 1 == 0, name


def test_glauber_monotone_exhaustive_small():
    g = attach_ghost(build_graph("path", 3), [0, 2])
    params = FKParams(0.45, 0.3)
    hb = HeatBath(g, params)
    configs = list(enumerate_configs(g))
    us = [0.1, 0.22, 0.5, 0.9]
    for lo, hi in itertools.product(configs, configs):
        if not lo <= hi:
            continue
        for site in range(hb.n_sites):
            for u in us:
                a = glauber_step(g, lo, site, u, params)
                b = glauber_step(g, hi, site, u, params)
                assert a <= b


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**12 - 1), st.integers(0, 2**12 - 1),
       st.integers(0, 11), st.floats(0.001, 0.999))
def test_glauber_monotone_randomized(bits_a, bits_b, site, u):
    g = build_graph("grid", 3, 4)     # 12 vertices, 17 edges
    mask = (1 << g.m) - 1
    lo = PercolationConfig(bits_a & bits_b & mask, 0)
    hi = PercolationConfig((bits_a | bits_b) & mask, 0)
    params = FKParams(0.58, 0)
    a = glauber_step(g, lo, site, u, params)
    b = glauber_step(g, hi, site, u, params)
    assert a <= b


def test_kernel_matches_python_reference():
    from evenloop import _kernels

    if not _kernels.HAS_NUMBA:
        pytest.skip("numba not installed")
    g = attach_ghost(build_graph("grid", 2, 3), [0, 3, 5])
    params = FKParams(0.52, 0.31)
    hb = HeatBath(g, params)
    rng = np.random.Generator(np.random.PCG64(12))
    n_steps = 400
    sites = rng.integers(0, hb.n_sites, size=n_steps)
    us = rng.random(n_steps)
    lo_k = np.zeros(hb.n_sites, dtype=np.int8)
    hi_k = np.ones(hb.n_sites, dtype=np.int8)
    hb.evolve_pair(lo_k, hi_k, sites, us, n_steps)
    lo_p = np.zeros(hb.n_sites, dtype=np.int8)
    hi_p = np.ones(hb.n_sites, dtype=np.int8)
    _kernels.py_evolve_pair(lo_p, hi_p, sites, us, n_steps, hb.site_a,
                            hb.site_b, hb.thr_conn, hb.thr_disc, hb.indptr,
                            hb.adj_site, hb.adj_other)
    assert np.array_equal(lo_k, lo_p) and np.array_equal(hi_k, hi_p)


def test_cftp_point_masses():
    assert cftp_sample(K3, FKParams(0, 0), seed=5) == PercolationConfig(0, 0)
    assert cftp_sample(K3, FKParams(1, 0), seed=5) == PercolationConfig(0b111, 0)


def test_cftp_replay_is_deterministic():
    g = build_graph("grid", 2, 3)
    params = FKParams(0.6, 0)
    a = [cftp_sample(g, params, seed=(3, i)) for i in range(5)]
    b = [cftp_sample(g, params, seed=(3, i)) for i in range(5)]
    assert a == b


def test_cftp_matches_exact_distribution():
    gk3 = attach_ghost(K3, [0, 1, 2])
    params = FKParams(0.5, 0.3)
    n = 8000
    emp = empirical_distribution(cftp_samples(gk3, params, seed=2, n=n),
                                 config_universe(gk3))
    exact = exact_fk_distribution(gk3, params)
    assert tv_distance(emp, exact) < 0.035   # ~3 sigma at 64 support points

    q = wired_quotient(build_graph("path", 4), [1, 2])
    paramsw = FKParams(0.5, 0, "wired")
    empw = empirical_distribution(cftp_samples(q, paramsw, seed=4, n=n),
                                  config_universe(q))
    exw = exact_fk_distribution(q, paramsw)
    assert tv_distance(empw, exw) < 0.03


def test_fk_marginals_against_enumeration():
    cases = [
        (attach_ghost(build_graph("grid", 2, 3), [0, 2, 4]),
         FKParams(0.45, 0.35, "free")),
        (attach_ghost(wired_quotient(build_graph("path", 5), [1, 2, 3]),
                      [0, 1, 2]), FKParams(0.6, 0.4, "wired")),
        (build_graph("cycle", 4), FKParams(0.7, 0.0, "free")),
    ]
    for g, params in cases:
        em, sm = fk_marginals(g, params)
        exact = exact_fk_distribution(g, params)
        for i in range(g.m):
            direct = sum(float(p) for c, p in zip(exact.support, exact.probs)
                         if c.edge_bits >> i & 1)
            assert abs(direct - em[i]) < 1e-12
        for v in g.ghost_sites:
            direct = sum(float(p) for c, p in zip(exact.support, exact.probs)
                         if c.vertex_bits >> v & 1)
            assert abs(direct - sm[v]) < 1e-12


def test_wired_params_need_delta():
    with pytest.raises(GraphError):
        exact_fk_distribution(K3, FKParams(0.5, 0, "wired"))


def test_monotone_sandwich_trace():
    from evenloop.families import get_family

    fam = get_family("path")
    rep = monotone_sandwich_trace(fam, (0.55, 0.25), [2, 3, 4], seed=6,
                                  n_runs=40)
    assert rep["sandwich_ok"]
    # pointwise domination makes the empirical marginals monotone in n
    edge_key = ("e", 0)
    free_means = []
    wired_means = []
    for n in rep["n_values"]:
        fvals = [run[("free", n)].get(edge_key, 0) for run in rep["runs"]]
        wvals = [run[("wired", n)].get(edge_key, 1) for run in rep["runs"]]
        free_means.append(sum(fvals) / len(fvals))
        wired_means.append(sum(wvals) / len(wvals))
    assert all(a <= b + 1e-12 for a, b in zip(free_means, free_means[1:]))
    assert all(a >= b - 1e-12 for a, b in zip(wired_means, wired_means[1:]))
    assert all(f <= w + 1e-12 for f, w in zip(free_means, wired_means))
