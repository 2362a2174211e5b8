"""Clique metrics, the extended metric delta, and well-separation of hyperplanes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from peria.errors import GraphError, IncoherentMetricsError
from peria.graphcore.graphs import FiniteGraph
from peria.graphcore.hyperplanes import HyperplaneStructure, compute_hyperplanes


class CliqueMetrics:
    """One symmetric distance matrix per clique, indexed by the clique's sorted vertices."""

    def __init__(self, hs: HyperplaneStructure, matrices: Mapping[tuple[int, ...], np.ndarray] | None = None):
        self.hs = hs
        self.matrices: dict[tuple[int, ...], np.ndarray] = {}
        for c in hs.cliques:
            m = None if matrices is None else matrices.get(c)
            if m is None:
                m = 1 - np.eye(len(c), dtype=np.int64)
            m = np.asarray(m, dtype=np.int64)
            if m.shape != (len(c), len(c)):
                raise GraphError(f"metric for clique {c} has shape {m.shape}")
            self.matrices[c] = m
        self._pos = {c: {v: i for i, v in enumerate(c)} for c in hs.cliques}

    @classmethod
    def from_hyperplane_metrics(cls, hs: HyperplaneStructure, per_hyperplane: Sequence[np.ndarray]) -> "CliqueMetrics":
        """Coherent system: clique ``C`` in hyperplane ``J`` gets ``M_J`` on sector indices."""
        mats = {}
        for j, members in enumerate(hs.classes):
            mj = np.asarray(per_hyperplane[j])
            for c in members:
                cl = hs.cliques[c]
                lab = hs.sector_labels[j, list(cl)]
                mats[cl] = mj[np.ix_(lab, lab)]
        return cls(hs, mats)

    def d(self, clique: tuple[int, ...], u: int, v: int) -> int:
        pos = self._pos[clique]
        return int(self.matrices[clique][pos[u], pos[v]])

    def edge_weight(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        c = self.hs.cliques[self.hs.edge_clique[key]]
        return self.d(c, u, v)

    def check_metric_axioms(self) -> None:
        for c, m in self.matrices.items():
            if (m != m.T).any() or (np.diag(m) != 0).any() or (m[~np.eye(len(c), dtype=bool)] <= 0).any():
                raise GraphError(f"clique metric on {c} is not a metric")
            # m[a, c] <= m[a, b] + m[b, c]
            if (m[:, None, :] > m[:, :, None] + m[None, :, :]).any():
                raise GraphError(f"clique metric on {c} violates the triangle inequality")

    def check_coherent(self) -> None:
        hs = self.hs
        for members in hs.classes:
            base = members[0]
            cb = hs.cliques[base]
            for other in members[1:]:
                co = hs.cliques[other]
                proj = [int(hs.gates[base, v]) for v in co]
                mo = self.matrices[co]
                pb = self._pos[cb]
                mb = self.matrices[cb][np.ix_([pb[p] for p in proj], [pb[p] for p in proj])]
                if not np.array_equal(mo, mb):
                    raise IncoherentMetricsError(co, cb)

    def hyperplane_distance(self, j: int, x: int, y: int) -> int:
        c = self.hs.cliques[self.hs.classes[j][0]]
        ci = self.hs.classes[j][0]
        return self.d(c, int(self.hs.gates[ci, x]), int(self.hs.gates[ci, y]))

    def thickness(self, j: int) -> int:
        c = self.hs.cliques[self.hs.classes[j][0]]
        return int(self.matrices[c].max())


@dataclass
class DeltaResult:
    value: int
    geodesic_min: int
    geodesic_max: int
    hyperplane_sum: int
    infimum: int

    @property
    def consistent(self) -> bool:
        return self.value == self.geodesic_min == self.geodesic_max == self.hyperplane_sum == self.infimum


def _geodesic_sums(g: FiniteGraph, cm: CliqueMetrics, x: int, y: int) -> tuple[int, int]:
    d = g.dist
    if x == y:
        return 0, 0
    layer_of = d[x]
    on = np.flatnonzero(d[x] + d[:, y] == d[x, y])
    by_layer: dict[int, list[int]] = {}
    for v in on.tolist():
        by_layer.setdefault(int(layer_of[v]), []).append(v)
    lo = {x: 0}
    hi = {x: 0}
    for k in range(1, int(d[x, y]) + 1):
        for v in by_layer[k]:
            best_lo, best_hi = math.inf, -math.inf
            for u in g.adj[v]:
                if u in lo and layer_of[u] == k - 1:
                    w = cm.edge_weight(u, v)
                    best_lo = min(best_lo, lo[u] + w)
                    best_hi = max(best_hi, hi[u] + w)
            lo[v], hi[v] = best_lo, best_hi
    return int(lo[y]), int(hi[y])


def weighted_infimum(g: FiniteGraph, cm: CliqueMetrics) -> np.ndarray:
    """All-pairs infimum over clique-hopping paths (Dijkstra on clique-metric edge weights)."""
    if not g.edges:
        return np.zeros((g.n, g.n), dtype=np.int64)
    e = np.asarray(g.edges)
    w = np.array([cm.edge_weight(u, v) for u, v in g.edges], dtype=float)
    m = csr_matrix((np.concatenate([w, w]), (np.concatenate([e[:, 0], e[:, 1]]), np.concatenate([e[:, 1], e[:, 0]]))),
                   shape=(g.n, g.n))
    return np.rint(dijkstra(m, directed=False)).astype(np.int64)


def delta_distance(g: FiniteGraph, cm: CliqueMetrics | None, x: int, y: int,
                   infimum: np.ndarray | None = None) -> DeltaResult:
    """Sum of clique distances along a geodesic, certified against every geodesic and the hyperplane sum."""
    hs = compute_hyperplanes(g)
    cm = cm or CliqueMetrics(hs)
    cm.check_coherent()
    lo, hi = _geodesic_sums(g, cm, x, y)
    hsum = sum(cm.hyperplane_distance(int(j), x, y) for j in hs.separating(x, y))
    inf = int((infimum if infimum is not None else weighted_infimum(g, cm))[x, y])
    res = DeltaResult(lo, lo, hi, int(hsum), inf)
    if not res.consistent:
        raise GraphError(f"internal error: delta({x},{y}) inconsistent: {res}")
    return res


def random_coherent_metrics(hs: HyperplaneStructure, rng: np.random.Generator, max_weight: int = 6) -> CliqueMetrics:
    """Random metric per hyperplane (shortest-path closure of random weights) spread over its cliques."""
    mats = []
    for j in range(hs.count):
        k = hs.sector_count(j)
        w = rng.integers(1, max_weight + 1, size=(k, k))
        w = np.triu(w, 1)
        w = w + w.T
        m = w.astype(float)
        for t in range(k):
            m = np.minimum(m, m[:, t][:, None] + m[t][None, :])
        mats.append(m.astype(np.int64))
    return CliqueMetrics.from_hyperplane_metrics(hs, mats)


# -- well separation ------------------------------------------------------

def _hyperplane_side(hs: HyperplaneStructure, a: int, h: int) -> int | None:
    """Sector of ``h`` containing every edge of hyperplane ``a``, or None."""
    lab = hs.sector_labels[h]
    sides = set()
    for u, v in hs.edges(a):
        sides.add(int(lab[u]))
        sides.add(int(lab[v]))
        if len(sides) > 1:
            return None
    return sides.pop() if sides else None


def separates_hyperplanes(hs: HyperplaneStructure, h: int, a: int, b: int) -> bool:
    sa, sb = _hyperplane_side(hs, a, h), _hyperplane_side(hs, b, h)
    return sa is not None and sb is not None and sa != sb


def is_facing_triple(hs: HyperplaneStructure, a: int, b: int, c: int) -> bool:
    if hs.transverse(a, b) or hs.transverse(b, c) or hs.transverse(a, c):
        return False
    return not (separates_hyperplanes(hs, a, b, c) or separates_hyperplanes(hs, b, a, c)
                or separates_hyperplanes(hs, c, a, b))


@dataclass
class WellSeparation:
    separated: bool
    L: float
    family: tuple[int, ...]


def well_separated_check(hs: HyperplaneStructure, j: int, k: int,
                         weights: Sequence[int] | Mapping[int, int] | None = None,
                         family_bound: int = 48) -> WellSeparation:
    """Maximal total thickness of a facing-triple-free family of hyperplanes transverse to both ``j`` and ``k``.

    ``separated`` is False only when ``j`` and ``k`` are transverse (``L`` is then infinite).
    """
    if j == k:
        raise GraphError("well-separation needs two distinct hyperplanes")
    if hs.transverse(j, k):
        return WellSeparation(False, math.inf, ())
    th = (lambda h: 1) if weights is None else (lambda h: int(weights[h]))
    both = hs.transverse_row(j) & hs.transverse_row(k)
    cand = [int(h) for h in np.flatnonzero(both) if h not in (j, k)]
    if len(cand) > family_bound:
        raise GraphError(f"{len(cand)} candidate hyperplanes exceed the family bound {family_bound}")
    facing = {c: [] for c in cand}
    for a, b, c in itertools.combinations(cand, 3):
        if is_facing_triple(hs, a, b, c):
            for x, y, z in ((a, b, c), (b, a, c), (c, a, b)):
                facing[x].append((y, z))
    cand.sort(key=lambda h: -th(h))
    suffix = [0] * (len(cand) + 1)
    for i in range(len(cand) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + th(cand[i])
    best = [0, ()]

    def search(i: int, chosen: list[int], total: int) -> None:
        if total > best[0]:
            best[0], best[1] = total, tuple(sorted(chosen))
        if i == len(cand) or total + suffix[i] <= best[0]:
            return
        h = cand[i]
        cs = set(chosen)
        if not any(y in cs and z in cs for y, z in facing[h]):
            chosen.append(h)
            search(i + 1, chosen, total + th(h))
            chosen.pop()
        search(i + 1, chosen, total)

    search(0, [], 0)
    return WellSeparation(True, best[0], best[1])
