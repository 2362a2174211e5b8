"""Finite-radius exploration of periagroup Cayley graphs.

Two generating sets are supported: ``full`` (every nonidentity element of
every vertex group, giving M(Gamma, lambda, G)) and ``S`` (the declared
finite generating sets).  Hyperplane data on a ball is computed from the
ambient word metric ``d(x, y) = |x^-1 y|``, so it agrees with the infinite
graph restricted to the ball; answers that depend on it are tagged with the
radius used.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from peria.errors import PeriaError, RadiusError, ResourceBoundError
from peria.graphcore.graphs import FiniteGraph
from peria.graphcore.hyperplanes import HyperplaneStructure, compute_hyperplanes
from peria.graphcore.metrics import _hyperplane_side, well_separated_check
from peria.presentation import PeriagroupPresentation
from peria.words import Syllable, Word, engine, format_word

DEFAULT_BALL_BOUND = 2_000_000
DEFAULT_METRIC_BOUND = 6000

FULL = "full"
S_MODE = "S"


def generators(p: PeriagroupPresentation, mode: str, exponent_cap: int | None = None) -> list[Syllable]:
    gens = []
    for v, spec in enumerate(p.specs):
        if spec.is_opaque:
            raise PeriaError(f"vertex {p.names[v]} is opaque: cannot explore the Cayley graph")
        if mode == FULL:
            if spec.is_finite:
                gens.extend((v, e) for e in spec.nonidentity())
            elif exponent_cap is not None:
                gens.extend((v, e) for k in range(1, exponent_cap + 1) for e in (k, -k))
            else:
                raise PeriaError(
                    f"full mode needs finite vertex groups; {p.names[v]} is infinite (set an exponent cap)")
        elif mode == S_MODE:
            gens.extend((v, e) for e in spec.symmetric_gens)
        else:
            raise PeriaError(f"unknown generating-set mode {mode!r}")
    return gens


class ExploredBall:
    """Ball of a Cayley graph around ``center``; vertex ids follow breadth-first order."""

    def __init__(self, p: PeriagroupPresentation, center: Word, radius: int, mode: str,
                 exponent_cap: int | None = None, bound: int = DEFAULT_BALL_BOUND):
        if radius < 0:
            raise PeriaError("radius must be non-negative")
        self.p = p
        self.radius = radius
        self.mode = mode
        self.exponent_cap = exponent_cap
        self.gens = generators(p, mode, exponent_cap)
        eng = self.engine = engine(p)
        self.center = eng.canonical(center)
        self.words: list[Word] = [self.center]
        self.index: dict[Word, int] = {self.center: 0}
        self.parent: list[tuple[int, int]] = [(-1, -1)]
        levels = [0]
        right: list[list[int]] = []
        frontier = [0]
        for r in range(1, radius + 1):
            nxt = []
            for i in frontier:
                row = self._row(i, right)
                x = self.words[i]
                for si, s in enumerate(self.gens):
                    y = eng.append_canonical(x, s)
                    j = self.index.get(y)
                    if j is None:
                        j = len(self.words)
                        if j >= bound:
                            raise ResourceBoundError("ball size", bound)
                        self.index[y] = j
                        self.words.append(y)
                        self.parent.append((i, si))
                        levels.append(r)
                        nxt.append(j)
                    row[si] = j
            frontier = nxt
        # boundary rows: neighbours inside the ball only
        for i in frontier:
            row = self._row(i, right)
            x = self.words[i]
            for si, s in enumerate(self.gens):
                y = eng.append_canonical(x, s)
                row[si] = self.index.get(y, -1)
        for i in range(len(self.words)):
            self._row(i, right)
        self.right = np.asarray(right, dtype=np.int64).reshape(len(self.words), len(self.gens))
        self.level = np.asarray(levels, dtype=np.int64)

    def _row(self, i: int, right: list[list[int]]) -> list[int]:
        while len(right) <= i:
            right.append([-1] * len(self.gens))
        return right[i]

    def __len__(self) -> int:
        return len(self.words)

    @property
    def full(self) -> bool:
        return self.mode == FULL

    def sphere_sizes(self) -> list[int]:
        return np.bincount(self.level, minlength=self.radius + 1).tolist()

    @cached_property
    def graph(self) -> FiniteGraph:
        edges = set()
        for i in range(len(self.words)):
            for j in self.right[i]:
                if j >= 0 and j != i:
                    edges.add((i, int(j)) if i < j else (int(j), i))
        return FiniteGraph(len(self.words), edges)

    def edge_label(self, i: int, j: int) -> int:
        """Gamma-vertex labelling the edge ``i - j``."""
        row = self.right[i]
        hits = np.flatnonzero(row == j)
        if not len(hits):
            raise PeriaError(f"{i} and {j} are not adjacent in the ball")
        return self.gens[int(hits[0])][0]

    def word_length(self, w: Word) -> int:
        if self.mode == FULL:
            return len(self.engine.reduce(w))
        return self.engine.length_S(w)

    def relative(self, i: int, j: int) -> Word:
        """Canonical form of ``x_i^-1 x_j``."""
        eng = self.engine
        return eng.canonical(eng.invert(self.words[i]) + self.words[j])

    @cached_property
    def ambient_dist(self) -> np.ndarray:
        """``|x_i^-1 x_j|`` in the ambient Cayley graph, for all pairs of ball vertices."""
        n = len(self.words)
        if n > DEFAULT_METRIC_BOUND:
            raise ResourceBoundError("ambient metric size", DEFAULT_METRIC_BOUND)
        eng = self.engine
        step: dict[tuple[Word, int], Word] = {}
        length: dict[Word, int] = {}

        def mul(z: Word, si: int) -> Word:
            key = (z, si)
            hit = step.get(key)
            if hit is None:
                hit = step[key] = eng.canonical_of_reduced(eng._append(z, self.gens[si]))
            return hit

        def ln(z: Word) -> int:
            hit = length.get(z)
            if hit is None:
                hit = length[z] = len(z) if self.mode == FULL else eng.length_S(z)
            return hit

        out = np.zeros((n, n), dtype=np.int32)
        for i in range(n):
            rel: list[Word] = [()] * n
            rel[0] = eng.canonical(eng.invert(self.words[i]) + self.center)
            out[i, 0] = ln(rel[0])
            for j in range(1, n):
                par, si = self.parent[j]
                z = mul(rel[par], si)
                rel[j] = z
                out[i, j] = ln(z)
        return out

    @cached_property
    def metric_graph(self) -> FiniteGraph:
        """The ball graph carrying the ambient metric (used for cliques, gates and hyperplanes).

        Balls of graph products are isometric subgraphs (geodesics to the
        median of ``center, x, y`` stay inside), so their own distances are
        used; other balls can be non-isometric and get ``ambient_dist``.
        """
        if self.p.is_graph_product:
            return self.graph
        g = FiniteGraph(self.graph.n, self.graph.edges)
        g.__dict__["dist"] = self.ambient_dist
        return g

    def hyperplanes(self) -> HyperplaneStructure:
        if self.mode == FULL and self.exponent_cap is not None and not all(s.is_finite for s in self.p.specs):
            raise PeriaError("hyperplane analysis is disabled for capped infinite cliques")
        if self.mode == S_MODE and not median_s_mode(self.p):
            raise PeriaError("S-mode hyperplanes need every vertex group to be Z/2 or Z with generators +-1")
        return compute_hyperplanes(self.metric_graph, verify=False)

    def translate(self, g: Word, i: int) -> int:
        """Ball id of ``g * x_i`` or -1."""
        return self.index.get(self.engine.canonical(tuple(g) + self.words[i]), -1)

    def to_graph_text(self) -> str:
        return self.graph.to_text()

    def vertex_table(self) -> str:
        return "\n".join(f"{i}\t{format_word(self.p, w)}" for i, w in enumerate(self.words)) + "\n"


def median_s_mode(p: PeriagroupPresentation) -> bool:
    """True when Cay(Pi, S) is a median graph by construction (graph product of Z/2 and standard Z)."""
    if not p.is_graph_product:
        return all(s.kind == "cyclic" and s.order == 2 for s in p.specs)
    for s in p.specs:
        if s.kind == "cyclic" and s.order == 2:
            continue
        if s.kind == "cyclic-inf" and s.symmetric_gens == (-1, 1):
            continue
        return False
    return True


def explore_ball(p: PeriagroupPresentation, center: Word = (), radius: int = 3, mode: str = FULL,
                 exponent_cap: int | None = None, bound: int = DEFAULT_BALL_BOUND) -> ExploredBall:
    return ExploredBall(p, center, radius, mode, exponent_cap, bound)


# -- hyperplane typing ----------------------------------------------------------

@dataclass
class HyperplaneType:
    hyperplane: int
    labels: tuple[str, ...]
    right: bool
    carrier_in_star_coset: bool | None
    radius: int


def hyperplane_type_and_label(ball: ExploredBall, j: int) -> HyperplaneType:
    if not ball.full:
        raise PeriaError("hyperplane typing needs a full-mode ball")
    hs = ball.hyperplanes()
    if not 0 <= j < hs.count:
        raise PeriaError(f"hyperplane {j} is not in the ball")
    p = ball.p
    labels = sorted({ball.edge_label(u, v) for u, v in hs.edges(j)})
    names = tuple(p.names[v] for v in labels)
    if len(labels) != 1:
        return HyperplaneType(j, names, False, None, ball.radius)
    u = labels[0]
    right = all(p.label(u, w) == 2 for w in p.link(u))
    carrier_ok = None
    if right:
        carrier = sorted({v for c in hs.classes[j] for v in hs.cliques[c]})
        star = p.star(u)
        base = carrier[0]
        carrier_ok = all({v for v, _ in ball.relative(base, y)} <= star for y in carrier)
    return HyperplaneType(j, names, right, carrier_ok, ball.radius)


# -- parabolic gates ----------------------------------------------------------------

@dataclass(frozen=True)
class ParabolicCoset:
    representative: Word
    vertices: frozenset[int]

    @property
    def height(self) -> int:
        return len(self.vertices)


def parabolic_projection(p: PeriagroupPresentation, h: Word, lam: Iterable[int]) -> tuple[Word, Word]:
    """Split ``h = a * b`` with ``a`` in <lam> maximal and ``|h| = |a| + |b|``."""
    eng = engine(p)
    lam = set(lam)
    a: list[Syllable] = []
    cur = eng.canonical(h)
    while True:
        if eng.gp:
            pick = None
            for i, (v, e) in enumerate(cur):
                if v in lam and all(eng._commute[cur[k][0]][v] for k in range(i)):
                    pick = i
                    break
            if pick is None:
                break
            a.append(cur[pick])
            cur = eng.canonical_of_reduced(cur[:pick] + cur[pick + 1:])
        else:
            starts = [m for m in eng.move_class(cur) if m and m[0][0] in lam]
            if not starts:
                break
            m = min(starts)
            a.append(m[0])
            cur = eng.canonical_of_reduced(m[1:])
    return eng.canonical(tuple(a)), cur


@dataclass
class GateResult:
    gate: int
    gate_word: Word
    labels: frozenset[int]
    certified_radius: int


def parabolic_gate(ball: ExploredBall, x: int, coset: ParabolicCoset) -> GateResult:
    """Gate of ball vertex ``x`` on the coset ``g<Lambda>``; raises RadiusError if it leaves the ball."""
    eng = ball.engine
    g = eng.canonical(coset.representative)
    h = eng.canonical(eng.invert(g) + ball.words[x])
    a, b = parabolic_projection(ball.p, h, coset.vertices)
    gate_word = eng.canonical(g + a)
    gi = ball.index.get(gate_word)
    if gi is None:
        raise RadiusError("gate lies outside the explored ball: increase radius")
    members = [i for i, w in enumerate(ball.words)
               if {v for v, _ in eng.canonical(eng.invert(g) + w)} <= set(coset.vertices)]
    d = ball.ambient_dist
    for y in members:
        if d[x, y] != d[x, gi] + d[gi, y]:
            raise PeriaError("internal error: computed gate fails the gate identity")
    return GateResult(gi, gate_word, frozenset(v for v, _ in b), ball.radius)


# -- contraction diagnostics ---------------------------------------------------------

@dataclass
class ContractionRow:
    radius: int
    centers: int
    max_projection_diameter: int


@dataclass
class ContractionProfile:
    bounded_orbit: bool
    rows: list[ContractionRow] = field(default_factory=list)
    orbit_range: int = 0


def element_order(p: PeriagroupPresentation, g: Word, limit: int = 64) -> float:
    eng = engine(p)
    g = eng.canonical(g)
    if not g:
        return 1
    cur = g
    for k in range(2, limit + 1):
        cur = eng.multiply(cur, g)
        if not cur:
            return k
    return math.inf


def contraction_profile(p: PeriagroupPresentation, g: Word, radius: int, rho_cap: int = 2,
                        sample: int = 400, seed: int = 0) -> ContractionProfile:
    """Max projection diameter onto <g>.1 of balls B(c, rho) missing the orbit, per center length |c|."""
    eng = engine(p)
    g = eng.canonical(g)
    if element_order(p, g) != math.inf:
        return ContractionProfile(True)
    ln = eng.length_S
    # orbit points g^k for |k| <= K, K grown until the ends are far from the explored region
    ginv = eng.invert(g)
    step = max(ln(g), 1)
    K = (2 * (radius + rho_cap)) // step + 3
    pos, neg = [()], []
    cur = ()
    for _ in range(K):
        cur = eng.multiply(cur, g)
        pos.append(cur)
    cur = ()
    for _ in range(K):
        cur = eng.multiply(cur, ginv)
        neg.append(cur)
    orbit = neg[::-1] + pos
    orbit_inv = [eng.invert(o) for o in orbit]
    orbit_len = [ln(o) for o in orbit]
    by_len = sorted(range(len(orbit)), key=orbit_len.__getitem__)
    region = explore_ball(p, (), radius + rho_cap, S_MODE)
    proj_memo: dict[int, list[int]] = {}
    dist_memo: dict[int, int] = {}

    def project(i: int) -> list[int]:
        """Indices of the orbit points nearest to region vertex ``i``."""
        hit = proj_memo.get(i)
        if hit is not None:
            return hit
        w = region.words[i]
        lw = int(region.level[i])
        best, hits = math.inf, []
        for k in by_len:
            if orbit_len[k] - lw > best:
                break
            dk = ln(orbit_inv[k] + w)
            if dk < best:
                best, hits = dk, [k]
            elif dk == best:
                hits.append(k)
        hits.sort()
        if hits[0] == 0 or hits[-1] == len(orbit) - 1:
            raise RadiusError("orbit segment too short for the explored region")
        proj_memo[i], dist_memo[i] = hits, best
        return hits

    pair_d: dict[tuple[int, int], int] = {}

    def odist(a: int, b: int) -> int:
        key = (a, b) if a <= b else (b, a)
        hit = pair_d.get(key)
        if hit is None:
            hit = pair_d[key] = ln(orbit_inv[key[0]] + orbit[key[1]])
        return hit

    graph = region.graph
    rng = random.Random(seed)
    rows = []
    for r in range(1, radius + 1):
        sphere = np.flatnonzero(region.level == r).tolist()
        if len(sphere) > sample:
            sphere = sorted(rng.sample(sphere, sample))
        best = 0
        used = 0
        for c in sphere:
            project(c)
            dc = dist_memo[c]
            if dc == 0:
                continue
            used += 1
            rho = min(dc - 1, rho_cap)
            # breadth-first ball of radius rho around c (stays inside the region)
            seen = {c}
            frontier = [c]
            for _ in range(rho):
                frontier = [v for u in frontier for v in graph.adj[u] if v not in seen and not seen.add(v)]
            ks = sorted({k for v in seen for k in project(v)})
            diam = max(odist(a, b) for a in ks for b in ks)
            best = max(best, diam)
        rows.append(ContractionRow(r, used, best))
    return ContractionProfile(False, rows, K)


# -- skewering ------------------------------------------------------------------------

@dataclass
class SkewerWitness:
    hyperplane: int
    edge: tuple[Word, Word]
    power: int
    image: int
    L: float
    radius: int
    L_next: float | None = None

    @property
    def stable(self) -> bool:
        """L is unchanged when the pair is re-examined at radius + 1."""
        return self.L_next is not None and self.L_next == self.L and self.L != math.inf


def _skewer_ball(p: PeriagroupPresentation, radius: int) -> ExploredBall:
    if all(s.is_finite for s in p.specs):
        return explore_ball(p, (), radius, FULL)
    if median_s_mode(p):
        return explore_ball(p, (), radius, S_MODE)
    raise PeriaError("skewer search needs finite vertex groups or a median S-mode Cayley graph")


def _powers(p: PeriagroupPresentation, g: Word, count: int) -> list[Word]:
    eng = engine(p)
    out, cur = [], ()
    for _ in range(count):
        cur = eng.multiply(cur, g)
        out.append(cur)
    return out


def _image(ball: ExploredBall, hs: HyperplaneStructure, j: int, gn: Word) -> tuple[int, tuple[int, int]] | None:
    for u, v in hs.edges(j):
        a, b = ball.translate(gn, u), ball.translate(gn, v)
        if a >= 0 and b >= 0:
            return hs.edge_hyperplane(a, b), (u, v)
    return None


def _skewers(ball: ExploredBall, hs: HyperplaneStructure, j: int, image: int, gn: Word) -> bool:
    if image == j or hs.transverse(j, image):
        return False
    side_k_in_j = _hyperplane_side(hs, image, j)   # sector of J containing K
    side_j_in_k = _hyperplane_side(hs, j, image)   # sector of K containing J
    if side_k_in_j is None or side_j_in_k is None:
        return False
    # g^n carries the J-sector containing K to a K-sector; it must be the one avoiding J
    for x in np.flatnonzero(hs.sector_labels[j] == side_k_in_j).tolist():
        y = ball.translate(gn, x)
        if y >= 0:
            return int(hs.sector_labels[image, y]) != side_j_in_k
    return False


def skewer_witnesses(p: PeriagroupPresentation, g: Word, radius: int,
                     max_power: int | None = None) -> list[SkewerWitness]:
    """Hyperplanes ``J`` and powers ``n`` such that ``g^n`` maps a sector of ``J`` strictly inside itself.

    Each witness carries the in-ball well-separation value ``L`` of ``(J, g^n J)``
    at ``radius`` and, as ``L_next``, the value for the same pair at ``radius + 1``.
    """
    g = engine(p).canonical(g)
    if element_order(p, g) != math.inf:
        return []
    powers = _powers(p, g, max_power or radius)
    ball = _skewer_ball(p, radius)
    hs = ball.hyperplanes()
    out = []
    for n, gn in enumerate(powers, start=1):
        for j in range(hs.count):
            hit = _image(ball, hs, j, gn)
            if hit is None or not _skewers(ball, hs, j, hit[0], gn):
                continue
            (u, v) = hit[1]
            ws = well_separated_check(hs, j, hit[0])
            out.append(SkewerWitness(j, (ball.words[u], ball.words[v]), n, hit[0], ws.L, radius))
    if out:
        big = _skewer_ball(p, radius + 1)
        bhs = big.hyperplanes()
        for w in out:
            j = bhs.edge_hyperplane(big.index[w.edge[0]], big.index[w.edge[1]])
            hit = _image(big, bhs, j, powers[w.power - 1])
            if hit is not None and hit[0] != j:
                w.L_next = well_separated_check(bhs, j, hit[0]).L
    return out


@dataclass
class SkewerReport:
    witness: SkewerWitness | None
    witnesses: int
    well_separated: int
    radius: int


def skewer_witness(p: PeriagroupPresentation, g: Word, radius: int) -> SkewerReport:
    """Preferred witness: stable ones first, then least L, least power."""
    ws = skewer_witnesses(p, g, radius)
    if not ws:
        return SkewerReport(None, 0, 0, radius)
    best = min(ws, key=lambda w: (not w.stable, w.L, w.power, w.hyperplane))
    return SkewerReport(best, len(ws), sum(w.stable for w in ws), radius)
