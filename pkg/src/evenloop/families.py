"""Nested truncation families with index-stable edge identities.

Edges of the underlying infinite graph are enumerated shell by shell around
a fixed anchor, so the free truncation of size n carries exactly the first
ids and G_n is a prefix of G_{n+1} as an edge-id set.  The wired truncation
glues everything one step further out into Delta, keeping pre-image ids, so
windows project consistently across the whole exhaustion.
"""

from __future__ import annotations

from collections import deque

from .graphs import Graph, GraphError, wired_quotient


class ExhaustionFamily:
    name = "abstract"
    two_ended = False

    # subclasses: coordinates, sorted deterministically
    def vertex_coords(self, n: int) -> list:
        raise NotImplementedError

    def edge_coords(self, n: int) -> list:
        """List of (sortkey, coord_a, coord_b); sortkey leads with the shell."""
        raise NotImplementedError

    def anchor(self):
        raise NotImplementedError

    # ------------------------------------------------------------------
    def free_with_coords(self, n: int) -> tuple[Graph, list]:
        if n < 1:
            raise GraphError("truncation index must be positive")
        coords = sorted(self.vertex_coords(n))
        idx = {c: i for i, c in enumerate(coords)}
        edges = sorted(self.edge_coords(n))
        pairs = tuple((idx[a], idx[b]) for _, a, b in edges)
        return Graph(len(coords), pairs, family=self.name), coords

    def free(self, n: int) -> Graph:
        return self.free_with_coords(n)[0]

    def wired_with_coords(self, n: int) -> tuple[Graph, list]:
        outer, outer_coords = self.free_with_coords(n + 1)
        inner = set(self.vertex_coords(n))
        keep = [i for i, c in enumerate(outer_coords) if c in inner]
        gq = wired_quotient(outer, keep)
        coords = [c for c in outer_coords if c in inner]
        return gq, coords

    def wired(self, n: int) -> Graph:
        return self.wired_with_coords(n)[0]

    def window(self, k: int) -> tuple[int, ...]:
        """Global ids of the edges induced on the radius-k ball at the anchor."""
        g, coords = self.free_with_coords(max(k, 1) + 1)
        idx = {c: i for i, c in enumerate(coords)}
        dist = {idx[self.anchor()]: 0}
        queue = deque([idx[self.anchor()]])
        inc = g.incident()
        while queue:
            x = queue.popleft()
            if dist[x] >= k:
                continue
            for _, y in inc[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        ball = {v for v, d in dist.items() if d <= k}
        ids = [g.edge_ids[i] for i, (u, v) in enumerate(g.edges)
               if u in ball and v in ball]
        return tuple(sorted(ids))


def window_positions(g: Graph, window_ids) -> list[int]:
    """Edge positions in g corresponding to global window ids."""
    pos = {eid: i for i, eid in enumerate(g.edge_ids)}
    try:
        return [pos[eid] for eid in window_ids]
    except KeyError as exc:
        raise GraphError(f"window edge {exc} missing from the truncation") from exc


class PathFamily(ExhaustionFamily):
    name = "path"
    two_ended = True

    def vertex_coords(self, n):
        return list(range(-n, n + 1))

    def edge_coords(self, n):
        out = []
        for i in range(-n, n):
            shell = max(abs(i), abs(i + 1))
            out.append(((shell, i), i, i + 1))
        return out

    def anchor(self):
        return 0


class LadderFamily(ExhaustionFamily):
    name = "ladder"
    two_ended = True

    def vertex_coords(self, n):
        return [(i, s) for i in range(-n, n + 1) for s in (0, 1)]

    def edge_coords(self, n):
        out = []
        for i in range(-n, n + 1):
            out.append(((abs(i), 0, i, 0), (i, 0), (i, 1)))           # rung
        for i in range(-n, n):
            shell = max(abs(i), abs(i + 1))
            for s in (0, 1):
                out.append(((shell, 1, i, s), (i, s), (i + 1, s)))    # rail
        return out

    def anchor(self):
        return (0, 0)

    def rail_cut(self, position: int) -> tuple[int, int]:
        """Global ids of the two rail edges crossing position -> position+1."""
        i = position
        shell = max(abs(i), abs(i + 1))
        edges = sorted(self.edge_coords(max(shell, 1)))
        ids = [j for j, (key, _, _) in enumerate(edges)
               if key[:2] == (shell, 1) and key[2] == i]
        if len(ids) != 2:
            raise GraphError(f"no rail pair at position {position}")
        return tuple(ids)


class GridFamily(ExhaustionFamily):
    """Quarter-plane boxes anchored at the corner; one-ended limit."""

    name = "grid"

    def vertex_coords(self, n):
        return [(i, j) for i in range(n + 1) for j in range(n + 1)]

    def edge_coords(self, n):
        out = []
        for i in range(n + 1):
            for j in range(n + 1):
                if j + 1 <= n:
                    shell = max(i, j + 1)
                    out.append(((shell, 0, i, j), (i, j), (i, j + 1)))
                if i + 1 <= n:
                    shell = max(i + 1, j)
                    out.append(((shell, 1, i, j), (i, j), (i + 1, j)))
        return out

    def anchor(self):
        return (0, 0)


class BinaryTreeFamily(ExhaustionFamily):
    """Depth truncations of the rooted binary tree (heap indexing)."""

    name = "tree"

    def vertex_coords(self, n):
        return list(range(2 ** (n + 1) - 1))

    def edge_coords(self, n):
        out = []
        for v in range(1, 2 ** (n + 1) - 1):
            depth = (v + 1).bit_length() - 1
            out.append(((depth, v), (v - 1) // 2, v))
        return out

    def anchor(self):
        return 0


class CylinderFamily(ExhaustionFamily):
    name = "cylinder"
    two_ended = True

    def __init__(self, circumference: int = 4):
        if circumference < 2:
            raise GraphError("cylinder circumference must be at least 2")
        self.circumference = circumference

    def vertex_coords(self, n):
        return [(i, j) for i in range(-n, n + 1) for j in range(self.circumference)]

    def edge_coords(self, n):
        m = self.circumference
        out = []
        for i in range(-n, n + 1):
            for j in range(m):
                out.append(((abs(i), 0, i, j), (i, j), (i, (j + 1) % m)))
        for i in range(-n, n):
            shell = max(abs(i), abs(i + 1))
            for j in range(m):
                out.append(((shell, 1, i, j), (i, j), (i + 1, j)))
        return out

    def anchor(self):
        return (0, 0)


def get_family(name: str, **kwargs) -> ExhaustionFamily:
    if name == "path":
        return PathFamily()
    if name == "ladder":
        return LadderFamily()
    if name == "grid":
        return GridFamily()
    if name in ("tree", "binary-tree-truncation"):
        return BinaryTreeFamily()
    if name == "cylinder":
        return CylinderFamily(**kwargs)
    raise GraphError(f"unknown exhaustion family {name!r}")
