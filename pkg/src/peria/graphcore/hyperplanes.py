"""Cliques, gates, parallelism, hyperplanes and sectors of clique-gated graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from peria.errors import GraphError, NotCliqueGatedError, ParallelismNotTransitiveError
from peria.graphcore.graphs import FiniteGraph


@dataclass
class CliqueGates:
    cliques: tuple[tuple[int, ...], ...]
    # gates[c][x] = vertex of clique c closest to x, or -1 when x has no gate on c
    gates: np.ndarray
    clique_gated: bool
    first_failure: tuple[int, tuple[int, ...]] | None = None
    edge_clique: dict[tuple[int, int], int] = field(default_factory=dict)

    def gate(self, x: int, c: int) -> int:
        g = int(self.gates[c, x])
        if g < 0:
            raise NotCliqueGatedError(x, self.cliques[c])
        return g


def compute_cliques_and_gates(g: FiniteGraph) -> CliqueGates:
    """Maximal cliques and the gate of every vertex on every clique."""
    g.require_connected()
    cached = g.__dict__.get("_clique_gates")
    if cached is not None:
        return cached
    cliques = g.cliques
    d = g.dist
    gates = np.full((len(cliques), g.n), -1, dtype=np.int64)
    ok = True
    failure = None
    for ci, c in enumerate(cliques):
        arr = np.asarray(c)
        dc = d[:, arr]
        m = dc.min(axis=1)
        is_min = dc == m[:, None]
        good = (is_min.sum(axis=1) == 1) & np.all(is_min | (dc == (m + 1)[:, None]), axis=1)
        gates[ci, good] = arr[np.argmin(dc[good], axis=1)]
        if not good.all():
            if ok:
                failure = (int(np.flatnonzero(~good)[0]), c)
            ok = False
    edge_clique = {}
    for ci, c in enumerate(cliques):
        for i, u in enumerate(c):
            for v in c[i + 1:]:
                edge_clique.setdefault((u, v), ci)
    res = CliqueGates(cliques, gates, ok, failure, edge_clique)
    g.__dict__["_clique_gates"] = res
    return res


@dataclass
class ParallelismData:
    parallel: list[set[int]]
    transitive: bool
    witness: tuple[int, int, int] | None


def clique_parallelism(g: FiniteGraph, cg: CliqueGates | None = None) -> ParallelismData:
    """Parallel pairs of cliques: the projection of one onto the other is a bijection."""
    cg = cg or compute_cliques_and_gates(g)
    if not cg.clique_gated:
        x, c = cg.first_failure
        raise NotCliqueGatedError(x, c)
    k = len(cg.cliques)
    sizes = np.array([len(c) for c in cg.cliques])
    kmax = int(sizes.max()) if k else 0
    pad = np.full((k, kmax), -1, dtype=np.int64)
    for i, c in enumerate(cg.cliques):
        pad[i, : len(c)] = c
    parallel = [set() for _ in range(k)]
    for j in range(k):
        gv = np.append(cg.gates[j], -2)  # index -1 (padding) maps to sentinel
        proj = gv[pad]
        proj = np.sort(proj, axis=1)
        valid = proj >= 0
        distinct = valid.sum(axis=1) - np.sum((proj[:, 1:] == proj[:, :-1]) & valid[:, 1:], axis=1)
        hits = np.flatnonzero((sizes == sizes[j]) & (distinct == sizes[j]))
        parallel[j].update(int(i) for i in hits)
    # projections are either singletons or bijections; symmetry is a sanity check
    for i in range(k):
        for j in parallel[i]:
            if i not in parallel[j]:
                raise GraphError(f"asymmetric parallelism between cliques {cg.cliques[i]} and {cg.cliques[j]}")
    witness = None
    for b in range(k):
        for a in sorted(parallel[b]):
            if a == b:
                continue
            missing = [c for c in sorted(parallel[b]) if c != b and c != a and c not in parallel[a]]
            if missing:
                witness = (a, b, missing[0])
                break
        if witness:
            break
    return ParallelismData(parallel, witness is None, witness)


@dataclass
class HyperplaneStructure:
    graph: FiniteGraph
    cliques: tuple[tuple[int, ...], ...]
    classes: list[list[int]]              # hyperplane id -> clique ids
    clique_hyperplane: np.ndarray         # clique id -> hyperplane id
    sector_labels: np.ndarray             # (hyperplanes, n): index of sector containing each vertex
    gates: np.ndarray
    edge_clique: dict[tuple[int, int], int]

    @property
    def count(self) -> int:
        return len(self.classes)

    def edges(self, j: int) -> list[tuple[int, int]]:
        out = []
        for c in self.classes[j]:
            cl = self.cliques[c]
            out.extend((u, v) for i, u in enumerate(cl) for v in cl[i + 1:])
        return sorted(out)

    def edge_hyperplane(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        return int(self.clique_hyperplane[self.edge_clique[key]])

    def sectors(self, j: int) -> list[frozenset[int]]:
        lab = self.sector_labels[j]
        return [frozenset(np.flatnonzero(lab == s).tolist()) for s in range(int(lab.max()) + 1)]

    def sector_count(self, j: int) -> int:
        return int(self.sector_labels[j].max()) + 1

    def separates(self, j: int, x: int, y: int) -> bool:
        return self.sector_labels[j, x] != self.sector_labels[j, y]

    def separating(self, x: int, y: int) -> np.ndarray:
        return np.flatnonzero(self.sector_labels[:, x] != self.sector_labels[:, y])

    def representative(self, j: int) -> tuple[int, ...]:
        return self.cliques[self.classes[j][0]]

    def thickness(self, j: int, clique_metrics: dict | None = None) -> int:
        if clique_metrics is None:
            return 1
        c = self.classes[j][0]
        m = clique_metrics.get(self.cliques[c])
        return 1 if m is None else int(np.max(m))

    @cached_property
    def _transverse_rows(self) -> dict[int, np.ndarray]:
        return {}

    def transverse_row(self, j: int) -> np.ndarray:
        """Boolean vector: hyperplanes transverse to ``j`` (every sector of one meets every sector of the other)."""
        rows = self._transverse_rows
        hit = rows.get(j)
        if hit is not None:
            return hit
        labs = self.sector_labels
        h = self.count
        counts = labs.max(axis=1) + 1
        ok = np.ones(h, dtype=bool)
        present = np.zeros((h, int(counts.max())), dtype=bool)
        idx = np.arange(h)[:, None]
        for t in range(int(counts[j])):
            present[:] = False
            cols = labs[:, labs[j] == t]
            present[idx, cols] = True
            ok &= present.sum(axis=1) == counts
        ok[j] = False
        rows[j] = ok
        return ok

    @property
    def transverse_matrix(self) -> np.ndarray:
        return np.array([self.transverse_row(j) for j in range(self.count)], dtype=bool).reshape(self.count, self.count)

    def transverse(self, a: int, b: int) -> bool:
        rows = self._transverse_rows
        if a in rows:
            return bool(rows[a][b])
        if b in rows:
            return bool(rows[b][a])
        if a == b:
            return False
        labs = self.sector_labels
        ca, cb = int(labs[a].max()) + 1, int(labs[b].max()) + 1
        return bool(np.count_nonzero(np.bincount(labs[a] * cb + labs[b], minlength=ca * cb)) == ca * cb)


def compute_hyperplanes(g: FiniteGraph, verify: bool = True) -> HyperplaneStructure:
    """Hyperplanes as parallelism classes of cliques, with sectors as gate fibres."""
    cached = g.__dict__.get("_hyperplanes")
    if cached is not None:
        return cached
    cg = compute_cliques_and_gates(g)
    par = clique_parallelism(g, cg)
    if not par.transitive:
        a, b, c = par.witness
        raise ParallelismNotTransitiveError((cg.cliques[a], cg.cliques[b], cg.cliques[c]))
    k = len(cg.cliques)
    cls_of = np.full(k, -1, dtype=np.int64)
    classes: list[list[int]] = []
    for c in range(k):
        if cls_of[c] >= 0:
            continue
        members = sorted(par.parallel[c] | {c})
        for m in members:
            cls_of[m] = len(classes)
        classes.append(members)
    labels = np.zeros((len(classes), g.n), dtype=np.int64)
    for j, members in enumerate(classes):
        rep = cg.cliques[members[0]]
        pos = {v: i for i, v in enumerate(rep)}
        gv = cg.gates[members[0]]
        labels[j] = np.vectorize(pos.__getitem__, otypes=[np.int64])(gv) if g.n else labels[j]
    hs = HyperplaneStructure(g, cg.cliques, classes, cls_of, labels, cg.gates, cg.edge_clique)
    if verify:
        _verify_sectors(hs)
    g.__dict__["_hyperplanes"] = hs
    return hs


def _verify_sectors(hs: HyperplaneStructure) -> None:
    g = hs.graph
    if not g.edges:
        return
    e = np.asarray(g.edges)
    edge_h = np.array([hs.clique_hyperplane[hs.edge_clique[tuple(x)]] for x in g.edges])
    for j in range(hs.count):
        keep = e[edge_h != j]
        m = csr_matrix((np.ones(len(keep)), (keep[:, 0], keep[:, 1])), shape=(g.n, g.n))
        ncomp, comp = connected_components(m, directed=False)
        lab = hs.sector_labels[j]
        if ncomp != hs.sector_count(j):
            raise GraphError(f"hyperplane {j}: {ncomp} components but {hs.sector_count(j)} gate fibres")
        # components and gate fibres must induce the same partition
        pairs = set(zip(comp.tolist(), lab.tolist()))
        if len(pairs) != ncomp:
            raise GraphError(f"hyperplane {j}: sectors differ from gate fibres")


def hamming_embedding(g: FiniteGraph, base: int = 0) -> np.ndarray:
    """Coordinates ``(n, hyperplanes)``; coordinate ``j`` is the sector index of the vertex for hyperplane ``j``.

    Sector ``i`` of hyperplane ``j`` is the fibre of the ``i``-th vertex of the
    representative clique, so the coordinate is the projection onto that clique.
    The embedding is checked to be isometric before returning.
    """
    hs = compute_hyperplanes(g)
    coords = hs.sector_labels.T.copy()
    ham = (coords[:, None, :] != coords[None, :, :]).sum(axis=2)
    if not np.array_equal(ham, g.dist):
        raise GraphError("internal error: Hamming coordinates are not isometric")
    return coords


def parallel_cliques_gated_projection(hs: HyperplaneStructure, c1: int, c2: int) -> dict[int, int]:
    """Projection map of clique ``c1`` onto clique ``c2``."""
    return {v: int(hs.gates[c2, v]) for v in hs.cliques[c1]}


def sectors_of(hs: HyperplaneStructure, j: int) -> list[frozenset[int]]:
    return hs.sectors(j)


def is_paraclique(g: FiniteGraph) -> bool:
    cg = compute_cliques_and_gates(g)
    if not cg.clique_gated:
        return False
    return clique_parallelism(g, cg).transitive


def crossing_sequence(hs: HyperplaneStructure, path: Sequence[int]) -> list[int]:
    return [hs.edge_hyperplane(a, b) for a, b in zip(path, path[1:])]
