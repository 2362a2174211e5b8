"""Spaces with partitions, their quasi-cubulation, and quasi-median closures of paraclique graphs."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from peria.errors import GraphError, PartitionSpaceError, ResourceBoundError
from peria.graphcore.axioms import check_axioms
from peria.graphcore.graphs import FiniteGraph
from peria.graphcore.hyperplanes import clique_parallelism, compute_cliques_and_gates, compute_hyperplanes

DEFAULT_ORIENTATION_BOUND = 200_000


@dataclass
class PartitionSpace:
    size: int
    partitions: list[tuple[frozenset[int], ...]]

    @classmethod
    def from_lists(cls, size: int, partitions: Sequence[Sequence[Sequence[int]]]) -> "PartitionSpace":
        return cls(size, [tuple(frozenset(s) for s in p) for p in partitions])

    def validate(self) -> None:
        ground = frozenset(range(self.size))
        seen = set()
        for i, p in enumerate(self.partitions):
            if len(p) < 2:
                raise PartitionSpaceError(f"partition {i} has fewer than two sectors")
            if any(not s for s in p):
                raise PartitionSpaceError(f"partition {i} has an empty sector")
            if sum(len(s) for s in p) != self.size or frozenset().union(*p) != ground:
                raise PartitionSpaceError(f"partition {i} does not partition the ground set")
            key = frozenset(p)
            if key in seen:
                raise PartitionSpaceError(f"partition {i} is repeated")
            seen.add(key)
        for i, j in itertools.combinations(range(len(self.partitions)), 2):
            p, q = self.partitions[i], self.partitions[j]
            if any(a <= b for a in p for b in q) or any(b <= a for a in p for b in q):
                if not nested(p, q):
                    raise PartitionSpaceError(
                        f"nestedness axiom fails for partitions {i} and {j}: a sector of one lies in a "
                        f"sector of the other but they are not nested")

    def separating(self, x: int, y: int) -> list[int]:
        return [i for i, p in enumerate(self.partitions) if not any(x in s and y in s for s in p)]


def nested(p: Sequence[frozenset], q: Sequence[frozenset]) -> bool:
    for a in p:
        for b in q:
            if all(d <= a for d in q if d != b) and all(d <= b for d in p if d != a):
                return True
    return False


def transverse_partitions(p: Sequence[frozenset], q: Sequence[frozenset]) -> bool:
    return not any(a <= b or b <= a for a in p for b in q)


def parse_parts(text: str) -> PartitionSpace:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise PartitionSpaceError("empty partition file")
    try:
        size = int(lines[0])
        parts = [[[int(t) for t in sec.split()] for sec in ln.split("|")] for ln in lines[1:]]
    except ValueError as exc:
        raise PartitionSpaceError(f"malformed partition file: {exc}") from None
    return PartitionSpace.from_lists(size, parts)


@dataclass
class QuasiCubulation:
    graph: FiniteGraph
    orientations: list[tuple[int, ...]]       # per vertex: sector index chosen in each partition
    principal: list[int]                      # ground point -> vertex id
    hyperplane_of_partition: list[int] = field(default_factory=list)


def quasi_cubulate(ps: PartitionSpace, bound: int = DEFAULT_ORIENTATION_BOUND, verify: bool = True) -> QuasiCubulation:
    """Graph of orientations reachable from principal ones by single-partition flips."""
    ps.validate()
    parts = ps.partitions
    masks = [[sum(1 << x for x in s) for s in p] for p in parts]
    k = len(parts)

    def principal(x: int) -> tuple[int, ...]:
        return tuple(next(i for i, s in enumerate(p) if x in s) for p in parts)

    start = [principal(x) for x in range(ps.size)]
    index: dict[tuple[int, ...], int] = {}
    order: list[tuple[int, ...]] = []
    queue = deque()
    for o in start:
        if o not in index:
            index[o] = len(order)
            order.append(o)
            queue.append(o)
    while queue:
        o = queue.popleft()
        chosen = [masks[j][o[j]] for j in range(k)]
        for i in range(k):
            others = [chosen[j] for j in range(k) if j != i]
            for s in range(len(parts[i])):
                if s == o[i]:
                    continue
                m = masks[i][s]
                if all(m & c for c in others):
                    nxt = o[:i] + (s,) + o[i + 1:]
                    if nxt not in index:
                        index[nxt] = len(order)
                        order.append(nxt)
                        if len(order) > bound:
                            raise ResourceBoundError("quasi-cubulation size", bound)
                        queue.append(nxt)
    edges = []
    for i in range(k):
        groups: dict[tuple, list[int]] = {}
        for vid, o in enumerate(order):
            groups.setdefault(o[:i] + o[i + 1:], []).append(vid)
        for grp in groups.values():
            edges.extend(itertools.combinations(grp, 2))
    g = FiniteGraph(len(order), edges)
    qc = QuasiCubulation(g, order, [index[o] for o in start])
    if verify:
        _verify_cubulation(ps, qc)
    return qc


def _verify_cubulation(ps: PartitionSpace, qc: QuasiCubulation) -> None:
    g = qc.graph
    ori = np.asarray(qc.orientations, dtype=np.int64).reshape(g.n, len(ps.partitions))
    ham = (ori[:, None, :] != ori[None, :, :]).sum(axis=2)
    if not np.array_equal(ham, g.dist):
        raise GraphError("internal error: orientation distance differs from partition count")
    if not ps.partitions:
        return
    hs = compute_hyperplanes(g)
    mapping = []
    for i in range(len(ps.partitions)):
        hyps = set()
        for u, v in g.edges:
            diff = np.flatnonzero(ori[u] != ori[v])
            if len(diff) == 1 and diff[0] == i:
                hyps.add(hs.edge_hyperplane(u, v))
        if len(hyps) != 1:
            raise GraphError(f"internal error: partition {i} maps to {len(hyps)} hyperplanes")
        mapping.append(hyps.pop())
    if sorted(mapping) != list(range(hs.count)):
        raise GraphError("internal error: partitions and hyperplanes are not in bijection")
    for i, j in itertools.combinations(range(len(ps.partitions)), 2):
        t = transverse_partitions(ps.partitions[i], ps.partitions[j])
        if t != hs.transverse(mapping[i], mapping[j]):
            raise GraphError(f"internal error: transversality of partitions {i},{j} not preserved")
    qc.hyperplane_of_partition = mapping


def hyperplane_partitions(g: FiniteGraph) -> PartitionSpace:
    hs = compute_hyperplanes(g)
    return PartitionSpace(g.n, [tuple(hs.sectors(j)) for j in range(hs.count)])


@dataclass
class QMClosure:
    graph: FiniteGraph
    embedding: list[int]
    checks: dict[str, bool]


def qm_closure(g: FiniteGraph, verify: bool = True) -> QMClosure:
    """Quasi-median closure of a paraclique graph with its embedding and checks of properties (i)-(iv)."""
    cg = compute_cliques_and_gates(g)
    if not cg.clique_gated or not clique_parallelism(g, cg).transitive:
        raise GraphError("graph is not paraclique")
    ps = hyperplane_partitions(g)
    qc = quasi_cubulate(ps)
    m = qc.graph
    emb = qc.principal
    checks = {}
    if verify:
        checks = closure_checks(g, m, emb)
        failed = [k for k, v in checks.items() if not v]
        if failed:
            raise GraphError(f"internal error: closure checks failed: {failed}")
    return QMClosure(m, emb, checks)


def closure_checks(x: FiniteGraph, m: FiniteGraph, emb: Sequence[int]) -> dict[str, bool]:
    out = {}
    out["isometric"] = m.is_isometric_subgraph(x, emb)
    out["quasimedian"] = check_axioms(m).quasimedian
    hx, hm = compute_hyperplanes(x), compute_hyperplanes(m)
    m_cliques = {c: i for i, c in enumerate(hm.cliques)}
    img = []
    ok_i = True
    for c in hx.cliques:
        key = tuple(sorted(emb[v] for v in c))
        if key not in m_cliques:
            ok_i = False
            img.append(None)
        else:
            img.append(m_cliques[key])
    out["cliques_preserved"] = ok_i
    if not ok_i:
        return out
    # (ii) every clique of M is parallel to the image of a clique of X
    hyp_of_image = {int(hm.clique_hyperplane[i]) for i in img}
    out["every_clique_parallel_to_source"] = all(int(h) in hyp_of_image for h in hm.clique_hyperplane)
    # (iii) parallelism preserved and reflected
    ok_iii = True
    for a, b in itertools.combinations(range(len(hx.cliques)), 2):
        px = hx.clique_hyperplane[a] == hx.clique_hyperplane[b]
        pm = hm.clique_hyperplane[img[a]] == hm.clique_hyperplane[img[b]]
        if px != pm:
            ok_iii = False
            break
    out["parallelism_preserved"] = ok_iii
    # (iv) transversality preserved and reflected
    to_m = [int(hm.clique_hyperplane[img[hx.classes[j][0]]]) for j in range(hx.count)]
    out["transversality_preserved"] = all(
        hx.transverse(a, b) == hm.transverse(to_m[a], to_m[b])
        for a, b in itertools.combinations(range(hx.count), 2)
    )
    return out
