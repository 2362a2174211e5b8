"""Exhaustive recognizers for paraclique, mediangle and quasi-median graphs."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from peria.errors import GraphError
from peria.graphcore.graphs import FiniteGraph
from peria.graphcore.hyperplanes import clique_parallelism, compute_cliques_and_gates

DEFAULT_SIZE_BOUND = 5000


@dataclass
class Verdict:
    ok: bool
    counterexample: tuple | None = None

    def as_dict(self) -> dict:
        return {"ok": self.ok, "counterexample": None if self.counterexample is None else list(self.counterexample)}


@dataclass
class AxiomReport:
    conditions: dict[str, Verdict] = field(default_factory=dict)

    @property
    def paraclique(self) -> bool:
        c = self.conditions
        return c["clique_gated"].ok and c["parallelism_transitive"].ok

    @property
    def quasimedian(self) -> bool:
        c = self.conditions
        return all(c[k].ok for k in ("triangle", "k4_minus_free", "quadrangle", "k32_free"))

    @property
    def mediangle(self) -> bool:
        c = self.conditions
        return all(c[k].ok for k in ("triangle", "k4_minus_free", "cycle", "even_cycle_intersection"))

    def as_dict(self) -> dict:
        out = {"paraclique": self.paraclique, "mediangle": self.mediangle, "quasimedian": self.quasimedian}
        out["conditions"] = {k: v.as_dict() for k, v in self.conditions.items()}
        return out


def _common_neighbours(g: FiniteGraph, x: int, y: int) -> list[int]:
    return sorted(g.adj[x] & g.adj[y])


def triangle_condition(g: FiniteGraph) -> Verdict:
    d = g.dist
    for x, y in g.edges:
        bad = d[:, x] == d[:, y]
        cn = _common_neighbours(g, x, y)
        if cn:
            good = np.any(d[:, cn] == (d[:, x] - 1)[:, None], axis=1)
            bad &= ~good
        if bad.any():
            return Verdict(False, (int(np.flatnonzero(bad)[0]), x, y))
    return Verdict(True)


def k4_minus_free(g: FiniteGraph) -> Verdict:
    for x, y in g.edges:
        cn = _common_neighbours(g, x, y)
        for a, b in itertools.combinations(cn, 2):
            if not g.has_edge(a, b):
                return Verdict(False, (x, y, a, b))
    return Verdict(True)


def k32_free(g: FiniteGraph) -> Verdict:
    for a in range(g.n):
        for b in range(a + 1, g.n):
            if g.has_edge(a, b):
                continue
            cn = _common_neighbours(g, a, b)
            if len(cn) < 3:
                continue
            for p, q, r in itertools.combinations(cn, 3):
                if not (g.has_edge(p, q) or g.has_edge(q, r) or g.has_edge(p, r)):
                    return Verdict(False, (a, b, p, q, r))
    return Verdict(True)


def quadrangle_condition(g: FiniteGraph) -> Verdict:
    d = g.dist
    for z in range(g.n):
        for x, y in itertools.combinations(sorted(g.adj[z]), 2):
            bad = (d[:, x] == d[:, y]) & (d[:, z] == d[:, x] + 1)
            if not bad.any():
                continue
            cn = [w for w in _common_neighbours(g, x, y) if w != z]
            if cn:
                bad &= ~np.any(d[:, cn] == (d[:, x] - 1)[:, None], axis=1)
            if bad.any():
                return Verdict(False, (int(np.flatnonzero(bad)[0]), x, y, z))
    return Verdict(True)


class ConvexCycles:
    """Convex even cycles, found as intervals ``I(z, w)`` that induce a ``2 d(z, w)``-cycle."""

    def __init__(self, g: FiniteGraph):
        self.g = g
        d = g.dist
        self.by_apex: dict[int, list[tuple[int, frozenset[int]]]] = {}
        self.cycles: dict[frozenset[int], tuple[int, ...]] = {}
        conv_cache: dict[frozenset[int], bool] = {}
        for z in range(g.n):
            # m[w, v] is True when v lies on a geodesic from z to w
            m = (d[z][None, :] + d) == d[z][:, None]
            sizes = m.sum(axis=1)
            cand = np.flatnonzero((d[z] >= 2) & (sizes == 2 * d[z]))
            for w in cand.tolist():
                verts = np.flatnonzero(m[w]).tolist()
                order = self._cycle_order(verts)
                if order is None:
                    continue
                key = frozenset(verts)
                if key not in conv_cache:
                    conv_cache[key] = g.is_convex(verts)
                if not conv_cache[key]:
                    continue
                self.by_apex.setdefault(z, []).append((w, key))
                self.cycles.setdefault(key, order)

    def _cycle_order(self, verts: list[int]) -> tuple[int, ...] | None:
        vs = set(verts)
        nb = {v: [u for u in self.g.adj[v] if u in vs] for v in verts}
        if any(len(a) != 2 for a in nb.values()):
            return None
        start = verts[0]
        order = [start]
        prev, cur = None, start
        while True:
            a, b = nb[cur]
            nxt = a if a != prev else b
            if nxt == start:
                break
            order.append(nxt)
            prev, cur = cur, nxt
        return tuple(order) if len(order) == len(verts) else None

    def through(self, z: int, x: int, y: int) -> list[int]:
        """Antipodes ``w`` of convex even cycles containing the path ``x - z - y``."""
        return [w for w, key in self.by_apex.get(z, []) if x in key and y in key]


def cycle_condition(g: FiniteGraph, cc: ConvexCycles | None = None) -> Verdict:
    cc = cc or ConvexCycles(g)
    d = g.dist
    for z in range(g.n):
        for x, y in itertools.combinations(sorted(g.adj[z]), 2):
            bad = (d[:, x] == d[:, y]) & (d[:, z] == d[:, x] + 1)
            if not bad.any():
                continue
            ws = cc.through(z, x, y)
            if ws:
                good = np.any(
                    (d[:, ws] + d[ws, x][None, :] == d[:, x][:, None])
                    & (d[:, ws] + d[ws, y][None, :] == d[:, y][:, None]),
                    axis=1,
                )
                bad &= ~good
            if bad.any():
                return Verdict(False, (int(np.flatnonzero(bad)[0]), x, y, z))
    return Verdict(True)


def even_cycle_intersection(g: FiniteGraph, cc: ConvexCycles | None = None) -> Verdict:
    cc = cc or ConvexCycles(g)
    keys = sorted(cc.cycles, key=lambda k: cc.cycles[k])
    for a, b in itertools.combinations(keys, 2):
        common = a & b
        if len(common) < 3:
            continue
        shared = sum(1 for u, v in itertools.combinations(common, 2) if g.has_edge(u, v))
        if shared > 1:
            return Verdict(False, (cc.cycles[a], cc.cycles[b]))
    return Verdict(True)


def check_axioms(g: FiniteGraph, size_bound: int = DEFAULT_SIZE_BOUND) -> AxiomReport:
    if g.n > size_bound:
        raise GraphError(f"graph has {g.n} vertices, above the configured bound {size_bound}")
    g.require_connected()
    rep = AxiomReport()
    c = rep.conditions
    cg = compute_cliques_and_gates(g)
    c["clique_gated"] = Verdict(cg.clique_gated, None if cg.first_failure is None else
                                (cg.first_failure[0], tuple(cg.first_failure[1])))
    if cg.clique_gated:
        par = clique_parallelism(g, cg)
        c["parallelism_transitive"] = Verdict(
            par.transitive, None if par.witness is None else tuple(cg.cliques[i] for i in par.witness))
    else:
        c["parallelism_transitive"] = Verdict(False, ("not clique-gated",))
    c["triangle"] = triangle_condition(g)
    c["k4_minus_free"] = k4_minus_free(g)
    c["quadrangle"] = quadrangle_condition(g)
    c["k32_free"] = k32_free(g)
    cc = ConvexCycles(g)
    c["cycle"] = cycle_condition(g, cc)
    c["even_cycle_intersection"] = even_cycle_intersection(g, cc)
    return rep


def hyperplanes_by_cycles(g: FiniteGraph) -> list[frozenset[tuple[int, int]]]:
    """Edge classes generated by 'same triangle' and 'opposite in a convex even cycle'."""
    idx = g.edge_index
    parent = list(range(len(g.edges)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(e, f):
        a, b = find(idx[e]), find(idx[f])
        if a != b:
            parent[max(a, b)] = min(a, b)

    def key(u, v):
        return (u, v) if u < v else (v, u)

    for x, y in g.edges:
        for z in g.adj[x] & g.adj[y]:
            union(key(x, y), key(x, z))
    for order in ConvexCycles(g).cycles.values():
        m = len(order)
        half = m // 2
        for i in range(half):
            e = key(order[i], order[(i + 1) % m])
            f = key(order[i + half], order[(i + half + 1) % m])
            union(e, f)
    classes: dict[int, set] = {}
    for e, i in idx.items():
        classes.setdefault(find(i), set()).add(e)
    return sorted((frozenset(s) for s in classes.values()), key=min)
