"""BFS, PageRank and k-core peeling over raw or compressed hypergraphs.

The algorithms only see a :class:`TraversalSource`, so the same code runs on
an uncompressed :class:`~hybhuff.hypergraph.Hypergraph` and on a
:class:`~hybhuff.archive.HybridArchive`. Entities are visited in ascending ID
order everywhere.
"""

from collections import deque

import numpy as np

from .archive import adjacency_iterator
from .exceptions import DomainError
from .hypergraph import Hypergraph, Side, invert_csr, offsets_from_degrees

UNREACHED = -1


class TraversalSource:
    """Neighbour access for both sides of a hypergraph."""

    num_vertices = 0
    num_hyperedges = 0

    def vertex_neighbors(self, v):
        raise NotImplementedError

    def hyperedge_neighbors(self, h):
        raise NotImplementedError

    def incidence_arrays(self):
        """``(vertex_offsets, vertex_adj, hyperedge_offsets, hyperedge_adj)``."""
        raise NotImplementedError


class RawSource(TraversalSource):
    def __init__(self, hypergraph):
        self.hypergraph = hypergraph
        self.num_vertices = hypergraph.num_vertices
        self.num_hyperedges = hypergraph.num_hyperedges
        self._v_off = hypergraph.vertex_offsets.tolist()
        self._v_adj = hypergraph.vertex_adjacency.tolist()
        self._h_off = hypergraph.hyperedge_offsets.tolist()
        self._h_adj = hypergraph.hyperedge_adjacency.tolist()

    def vertex_neighbors(self, v):
        return self._v_adj[self._v_off[v] : self._v_off[v + 1]]

    def hyperedge_neighbors(self, h):
        return self._h_adj[self._h_off[h] : self._h_off[h + 1]]

    def incidence_arrays(self):
        h = self.hypergraph
        return h.vertex_offsets, h.vertex_adjacency, h.hyperedge_offsets, h.hyperedge_adjacency


class ArchiveSource(TraversalSource):
    """Reads the stored side through the lazy decoder and inverts it for the other."""

    def __init__(self, archive):
        self.archive = archive
        self.num_vertices = archive.num_vertices
        self.num_hyperedges = archive.num_hyperedges
        lists = list(adjacency_iterator(archive))
        offsets = offsets_from_degrees([len(x) for x in lists])
        flat = np.fromiter((s for x in lists for s in x), dtype=np.int64, count=int(offsets[-1]))
        dual_offsets, dual_flat = invert_csr(offsets, flat, archive.num_targets)
        stored = (offsets, flat)
        dual = (dual_offsets, dual_flat)
        if archive.side is Side.VERTICES:
            self._v, self._h = stored, dual
        else:
            self._v, self._h = dual, stored
        self._v_lists = _split(*self._v)
        self._h_lists = _split(*self._h)

    def vertex_neighbors(self, v):
        return self._v_lists[v]

    def hyperedge_neighbors(self, h):
        return self._h_lists[h]

    def incidence_arrays(self):
        return (*self._v, *self._h)


def _split(offsets, flat):
    flat = flat.tolist()
    bounds = offsets.tolist()
    return [flat[a:b] for a, b in zip(bounds, bounds[1:])]


def as_source(obj):
    if isinstance(obj, TraversalSource):
        return obj
    if isinstance(obj, Hypergraph):
        return RawSource(obj)
    return ArchiveSource(obj)


def bfs(source, root):
    """Vertex-hop levels from ``root``; unreachable vertices get ``UNREACHED``."""
    src = as_source(source)
    if not 0 <= root < src.num_vertices:
        raise DomainError(f"root {root} outside [0, {src.num_vertices})")
    level = [UNREACHED] * src.num_vertices
    seen_edge = [False] * src.num_hyperedges
    level[root] = 0
    frontier = [root]
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for v in frontier:
            for h in src.vertex_neighbors(v):
                if seen_edge[h]:
                    continue
                seen_edge[h] = True
                for u in src.hyperedge_neighbors(h):
                    if level[u] == UNREACHED:
                        level[u] = depth
                        nxt.append(u)
        frontier = sorted(nxt)
    return np.asarray(level, dtype=np.int64)


def pagerank(source, damping=0.85, iterations=20):
    """Two-step random walk (vertex -> hyperedge -> vertex) with uniform splits.

    Mass held by vertices without hyperedges is spread uniformly.
    """
    if iterations < 0:
        raise DomainError("iterations must be non-negative")
    if not 0.0 < damping < 1.0:
        raise DomainError(f"damping must lie in (0, 1), got {damping}")
    src = as_source(source)
    n_v, n_h = src.num_vertices, src.num_hyperedges
    if n_v == 0:
        return np.zeros(0)
    v_off, v_adj, h_off, h_adj = src.incidence_arrays()
    v_deg = np.diff(v_off)
    h_deg = np.diff(h_off)
    v_src = np.repeat(np.arange(n_v), v_deg)
    h_src = np.repeat(np.arange(n_h), h_deg)
    dangling = v_deg == 0
    v_inv = np.divide(1.0, v_deg, out=np.zeros(n_v), where=~dangling)
    h_inv = np.divide(1.0, h_deg, out=np.zeros(n_h), where=h_deg > 0)

    rank = np.full(n_v, 1.0 / n_v)
    for _ in range(iterations):
        edge_mass = np.bincount(v_adj, weights=(rank * v_inv)[v_src], minlength=n_h)
        inflow = np.bincount(h_adj, weights=(edge_mass * h_inv)[h_src], minlength=n_v)
        leaked = rank[dangling].sum()
        rank = (1.0 - damping) / n_v + damping * (inflow + leaked / n_v)
    return rank


def kcore_label_propagation(source, k):
    """Membership labels (1 = in the k-core) after peeling to a fixpoint.

    A vertex is removed once fewer than ``k`` live hyperedges contain it; a
    hyperedge is removed once it keeps fewer than two live vertices.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    src = as_source(source)
    n_v, n_h = src.num_vertices, src.num_hyperedges
    v_live = [len(src.vertex_neighbors(v)) for v in range(n_v)]
    h_live = [len(src.hyperedge_neighbors(h)) for h in range(n_h)]
    v_alive = [True] * n_v
    h_alive = [True] * n_h
    queue = deque()
    for v in range(n_v):
        if v_live[v] < k:
            v_alive[v] = False
            queue.append((0, v))
    for h in range(n_h):
        if h_live[h] < 2:
            h_alive[h] = False
            queue.append((1, h))
    while queue:
        kind, x = queue.popleft()
        if kind == 0:
            for h in src.vertex_neighbors(x):
                if h_alive[h]:
                    h_live[h] -= 1
                    if h_live[h] < 2:
                        h_alive[h] = False
                        queue.append((1, h))
        else:
            for v in src.hyperedge_neighbors(x):
                if v_alive[v]:
                    v_live[v] -= 1
                    if v_live[v] < k:
                        v_alive[v] = False
                        queue.append((0, v))
    return np.asarray(v_alive, dtype=np.int64)
