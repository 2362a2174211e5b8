"""Finite simple graphs with cached distance matrices and cliques."""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from peria.errors import GraphError

UNREACHABLE = np.iinfo(np.int32).max // 4


class FiniteGraph:
    """Undirected simple graph on vertices ``0..n-1``."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        self.n = int(n)
        es = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u},{v}) out of range for {self.n} vertices")
            es.add((u, v) if u < v else (v, u))
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(es))
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        self.adj: tuple[frozenset[int], ...] = tuple(frozenset(a) for a in adj)

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> tuple["FiniteGraph", list]:
        nodes = list(g.nodes())
        pos = {v: i for i, v in enumerate(nodes)}
        return cls(len(nodes), [(pos[u], pos[v]) for u, v in g.edges()]), nodes

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def __repr__(self) -> str:
        return f"FiniteGraph(n={self.n}, m={len(self.edges)})"

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def sparse(self) -> csr_matrix:
        if not self.edges:
            return csr_matrix((self.n, self.n), dtype=np.int8)
        e = np.asarray(self.edges)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            a[u, v] = a[v, u] = True
        return a

    @cached_property
    def dist(self) -> np.ndarray:
        """All-pairs BFS distances (int32); unreachable pairs hold ``UNREACHABLE``."""
        if self.n == 0:
            return np.zeros((0, 0), dtype=np.int32)
        d = shortest_path(self.sparse, method="D", unweighted=True, directed=False)
        d[np.isinf(d)] = UNREACHABLE
        return d.astype(np.int32)

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        ncomp, _ = connected_components(self.sparse, directed=False)
        return ncomp == 1

    def require_connected(self) -> None:
        if not self.is_connected():
            raise GraphError("graph is not connected")

    @cached_property
    def diameter(self) -> int:
        return int(self.dist.max()) if self.n else 0

    @cached_property
    def cliques(self) -> tuple[tuple[int, ...], ...]:
        """Maximal cliques with at least two vertices, sorted (isolated vertices contribute none)."""
        out = [tuple(sorted(c)) for c in nx.find_cliques(self.to_networkx()) if len(c) >= 2]
        return tuple(sorted(out))

    def interval(self, x: int, y: int) -> np.ndarray:
        d = self.dist
        return np.flatnonzero(d[x] + d[:, y] == d[x, y])

    def is_convex(self, vertices: Iterable[int]) -> bool:
        s = np.fromiter(sorted(set(vertices)), dtype=np.int64)
        if len(s) <= 1:
            return True
        inside = np.zeros(self.n, dtype=bool)
        inside[s] = True
        d = self.dist
        sub = d[np.ix_(s, s)]
        for i, a in enumerate(s):
            # vertices on some geodesic from a to another member
            on = (d[a][None, :] + d[s, :]) == sub[i][:, None]
            if np.any(on[:, ~inside]):
                return False
        return True

    def induced(self, vertices: Sequence[int]) -> "FiniteGraph":
        pos = {v: i for i, v in enumerate(vertices)}
        return FiniteGraph(len(vertices), [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos])

    def is_isometric_subgraph(self, sub: "FiniteGraph", embedding: Sequence[int]) -> bool:
        emb = np.asarray(embedding)
        return bool(np.array_equal(self.dist[np.ix_(emb, emb)], sub.dist))

    def is_geodesic(self, path: Sequence[int]) -> bool:
        if any(not self.has_edge(a, b) for a, b in zip(path, path[1:])):
            return False
        return int(self.dist[path[0], path[-1]]) == len(path) - 1

    def to_text(self) -> str:
        return "\n".join([str(self.n)] + [f"{u} {v}" for u, v in self.edges]) + "\n"


def parse_graph(text: str) -> FiniteGraph:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphError("empty graph file")
    try:
        n = int(lines[0])
        edges = [tuple(int(t) for t in ln.split()) for ln in lines[1:]]
    except ValueError as exc:
        raise GraphError(f"malformed graph file: {exc}") from None
    if any(len(e) != 2 for e in edges):
        raise GraphError("each edge line must hold exactly two vertex ids")
    return FiniteGraph(n, edges)


def load_graph(path) -> FiniteGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


# -- standard graphs ------------------------------------------------------

def cycle_graph(n: int) -> FiniteGraph:
    return FiniteGraph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> FiniteGraph:
    return FiniteGraph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> FiniteGraph:
    return FiniteGraph(n, itertools.combinations(range(n), 2))


def complete_bipartite(a: int, b: int) -> FiniteGraph:
    return FiniteGraph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def hypercube(d: int) -> FiniteGraph:
    return FiniteGraph(1 << d, [(x, x ^ (1 << i)) for x in range(1 << d) for i in range(d) if x < x ^ (1 << i)])


def house_graph() -> FiniteGraph:
    """Square 0-1-2-3 with a roof vertex 4 on the edge 2-3."""
    return FiniteGraph(5, [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (3, 4)])


def wheel_of_three_squares() -> FiniteGraph:
    """Three 4-cycles around a common centre; the 3-cube with one vertex deleted."""
    cube = hypercube(3)
    keep = [v for v in range(8) if v != 7]
    return cube.induced(keep)


def cartesian_product(g: FiniteGraph, h: FiniteGraph) -> FiniteGraph:
    idx = lambda a, b: a * h.n + b  # noqa: E731
    edges = [(idx(u, b), idx(v, b)) for u, v in g.edges for b in range(h.n)]
    edges += [(idx(a, u), idx(a, v)) for a in range(g.n) for u, v in h.edges]
    return FiniteGraph(g.n * h.n, edges)


def hamming_graph(sizes: Sequence[int]) -> FiniteGraph:
    g = complete_graph(sizes[0])
    for k in sizes[1:]:
        g = cartesian_product(g, complete_graph(k))
    return g
