"""Compiled inner loop for heat-bath dynamics and coupling from the past.

The kernel operates on flat arrays: sites are edges followed by ghost slots,
states are int8 vectors, and the enhanced-graph adjacency is CSR.  A pure
Python mirror with identical semantics backs the public ``glauber_step`` and
serves as fallback when numba is unavailable.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f
        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def _connected_off(state, skip, a, b, indptr, adj_site, adj_other, visited, queue, stamp):
    if a == b:
        return True
    visited[a] = stamp
    queue[0] = a
    qlen = 1
    qpos = 0
    while qpos < qlen:
        x = queue[qpos]
        qpos += 1
        for k in range(indptr[x], indptr[x + 1]):
            s2 = adj_site[k]
            if s2 == skip or state[s2] == 0:
                continue
            y = adj_other[k]
            if visited[y] != stamp:
                if y == b:
                    return True
                visited[y] = stamp
                queue[qlen] = y
                qlen += 1
    return False


@njit(cache=True)
def _heat_bath(state, s, u, site_a, site_b, thr_conn, thr_disc,
               indptr, adj_site, adj_other, visited, queue, stamp):
    conn = _connected_off(state, s, site_a[s], site_b[s],
                          indptr, adj_site, adj_other, visited, queue, stamp)
    thr = thr_conn[s] if conn else thr_disc[s]
    state[s] = 1 if u < thr else 0


@njit(cache=True)
def evolve_pair(lo, hi, sites, us, t_len, site_a, site_b, thr_conn, thr_disc,
                indptr, adj_site, adj_other, visited, queue, stamp0):
    """Run both sandwich chains over moves[t_len-1] .. moves[0] (oldest first).

    Returns the updated BFS stamp counter; chains share the visited/queue
    scratch via distinct stamps.
    """
    stamp = stamp0
    for t in range(t_len - 1, -1, -1):
        s = sites[t]
        u = us[t]
        stamp += 1
        _heat_bath(lo, s, u, site_a, site_b, thr_conn, thr_disc,
                   indptr, adj_site, adj_other, visited, queue, stamp)
        stamp += 1
        _heat_bath(hi, s, u, site_a, site_b, thr_conn, thr_disc,
                   indptr, adj_site, adj_other, visited, queue, stamp)
    return stamp


def py_connected_off(state, skip, a, b, indptr, adj_site, adj_other):
    """Reference implementation of the off-site connectivity query."""
    if a == b:
        return True
    seen = {a}
    stack = [a]
    while stack:
        x = stack.pop()
        for k in range(indptr[x], indptr[x + 1]):
            s2 = adj_site[k]
            if s2 == skip or not state[s2]:
                continue
            y = adj_other[k]
            if y == b:
                return True
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return False


def py_heat_bath(state, s, u, site_a, site_b, thr_conn, thr_disc,
                 indptr, adj_site, adj_other):
    conn = py_connected_off(state, s, site_a[s], site_b[s],
                            indptr, adj_site, adj_other)
    thr = thr_conn[s] if conn else thr_disc[s]
    state[s] = 1 if u < thr else 0


def py_evolve_pair(lo, hi, sites, us, t_len, site_a, site_b, thr_conn,
                   thr_disc, indptr, adj_site, adj_other):
    for t in range(t_len - 1, -1, -1):
        s = sites[t]
        u = us[t]
        py_heat_bath(lo, s, u, site_a, site_b, thr_conn, thr_disc,
                     indptr, adj_site, adj_other)
        py_heat_bath(hi, s, u, site_a, site_b, thr_conn, thr_disc,
                     indptr, adj_site, adj_other)


def build_site_arrays(n_nodes, endpoints, thresholds):
    """CSR adjacency and per-site threshold arrays for the kernel."""
    n_sites = len(endpoints)
    site_a = np.empty(n_sites, dtype=np.int32)
    site_b = np.empty(n_sites, dtype=np.int32)
    thr_conn = np.empty(n_sites, dtype=np.float64)
    thr_disc = np.empty(n_sites, dtype=np.float64)
    degree = np.zeros(n_nodes + 1, dtype=np.int64)
    for s, ((a, b), (tc, td)) in enumerate(zip(endpoints, thresholds)):
        site_a[s] = a
        site_b[s] = b
        thr_conn[s] = tc
        thr_disc[s] = td
        degree[a + 1] += 1
        degree[b + 1] += 1
    indptr = np.cumsum(degree)
    adj_site = np.empty(indptr[-1], dtype=np.int32)
    adj_other = np.empty(indptr[-1], dtype=np.int32)
    fill = indptr[:-1].copy()
    for s in range(n_sites):
        a, b = site_a[s], site_b[s]
        adj_site[fill[a]] = s
        adj_other[fill[a]] = b
        fill[a] += 1
        adj_site[fill[b]] = s
        adj_other[fill[b]] = a
        fill[b] += 1
    return site_a, site_b, thr_conn, thr_disc, indptr.astype(np.int64), adj_site, adj_other
