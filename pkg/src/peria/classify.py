"""Group-level and element-level classification of periagroups.

Every report names the single rule that decided it.  Verdicts are the
strings ``"yes"``, ``"no"`` and ``"unknown"``; ``unknown`` only arises when a
property of an opaque vertex group is decisive.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from peria.coxeter import classify_irreducible, diagram_of, irreducible_components
from peria.errors import PeriaError, ResourceBoundError
from peria.presentation import PeriagroupPresentation, gp_cox_decomposition, star2_decomposition
from peria.words import Word, engine, format_word

YES, NO, UNKNOWN = "yes", "no", "unknown"
DEFAULT_JOIN_BOUND = 1 << 22
DEFAULT_ENUM_BOUND = 200_000


@dataclass
class ClassificationReport:
    verdict: str
    rule: str
    factors: list[dict] = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "rule": self.rule, "factors": self.factors, "witnesses": self.witnesses}


def _is_z2(spec) -> bool:
    return spec.is_finite and spec.order == 2


def _names(p: PeriagroupPresentation, vs: Iterable[int]) -> list[str]:
    return p.vertex_names(vs)


# -- finiteness -------------------------------------------------------------

def _coxeter_order(t) -> int:
    n = t.rank
    fam = t.family
    if fam == "A":
        return math.factorial(n + 1)
    if fam == "B":
        return 2 ** n * math.factorial(n)
    if fam == "D":
        return 2 ** (n - 1) * math.factorial(n)
    if fam == "I2":
        return 2 * t.param
    return {("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600, ("F", 4): 1152,
            ("H", 3): 120, ("H", 4): 14400}[(fam, n)]


@dataclass
class FactorInfo:
    vertices: frozenset[int]
    finite: bool
    order: float
    kind: str          # "vertex", "coxeter", "graph-product", "mixed"
    coxeter_type: str | None = None
    witness: str | None = None

    def as_dict(self, p: PeriagroupPresentation) -> dict:
        out = {"vertices": _names(p, self.vertices), "finite": self.finite,
               "order": None if math.isinf(self.order) else int(self.order), "kind": self.kind}
        if self.coxeter_type is not None:
            out["coxeter_type"] = self.coxeter_type
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def factor_info(p: PeriagroupPresentation, factor: Iterable[int]) -> FactorInfo:
    """Finiteness of a *2-irreducible factor."""
    f = frozenset(factor)
    if len(f) == 1:
        (u,) = f
        spec = p.specs[u]
        return FactorInfo(f, spec.is_finite, spec.size, "vertex")
    if all(_is_z2(p.specs[u]) for u in f):
        t = classify_irreducible(diagram_of(p, f))
        finite = t.tag == "spherical"
        return FactorInfo(f, finite, _coxeter_order(t) if finite else math.inf, "coxeter", t.name)
    # some vertex w of order >= 3 has a partner x with no edge (labels > 2 need two Z/2 ends),
    # so <w, x> = G_w * G_x is infinite
    w = next(u for u in sorted(f) if not _is_z2(p.specs[u]))
    x = next(v for v in sorted(f) if v != w and p.label(w, v) is None)
    kind = "graph-product" if all(p.label(u, v) in (None, 2) for u, v in itertools.combinations(f, 2)) else "mixed"
    return FactorInfo(f, False, math.inf, kind, witness=f"free product <{p.names[w]}> * <{p.names[x]}>")


def factors(p: PeriagroupPresentation, vertices: Iterable[int] | None = None) -> list[FactorInfo]:
    return [factor_info(p, f) for f in star2_decomposition(p, vertices).factors]


def is_finite(p: PeriagroupPresentation) -> ClassificationReport:
    fs = factors(p)
    finite = all(f.finite for f in fs)
    order = math.prod(f.order for f in fs) if finite else math.inf
    rule = "every *2-factor is finite" if finite else "some *2-factor is infinite"
    wit = {"order": int(order)} if finite else {"infinite_factor": _names(p, next(f for f in fs if not f.finite).vertices)}
    return ClassificationReport(YES if finite else NO, rule, [f.as_dict(p) for f in fs], wit)


def _subgroup_finite(p: PeriagroupPresentation, vertices: Iterable[int]) -> bool:
    vs = list(vertices)
    return not vs or all(f.finite for f in factors(p, vs))


# -- contracting elements -------------------------------------------------------

def _coxeter_contracting(p: PeriagroupPresentation) -> str:
    """Direct evaluation of the Coxeter criterion: all factors finite but one, which is non-affine or D_inf."""
    d = diagram_of(p)
    infinite = []
    for comp in irreducible_components(d):
        t = classify_irreducible(d.induced(comp))
        if t.tag != "spherical":
            infinite.append(t)
    if len(infinite) != 1:
        return NO
    t = infinite[0]
    return YES if t.tag == "other" or t.infinite_dihedral else NO


def contracting_exists(p: PeriagroupPresentation, force_cox: Iterable[int] = ()) -> ClassificationReport:
    fs = factors(p)
    fd = [f.as_dict(p) for f in fs]
    inf = [f for f in fs if not f.finite]
    wit: dict = {}
    if p.is_coxeter:
        wit["coxeter_crosscheck"] = _coxeter_contracting(p)
    if not inf:
        return ClassificationReport(NO, "finite group", fd, wit)
    if len(inf) >= 2:
        wit["infinite_factors"] = [_names(p, f.vertices) for f in inf]
        return ClassificationReport(NO, "product of two infinite *2-factors", fd, wit)
    F = inf[0]
    wit["factor"] = _names(p, F.vertices)
    if len(F.vertices) == 1:
        (u,) = F.vertices
        spec = p.specs[u]
        if spec.kind == "cyclic-inf":
            return ClassificationReport(YES, "single infinite cyclic vertex", fd, wit)
        return ClassificationReport(UNKNOWN, f"single opaque vertex {p.names[u]}: contracting elements not declared",
                                    fd, wit)
    sub = p.induced(F.vertices)
    forced = [sub.index[p.names[u]] for u in force_cox if u in F.vertices]
    gp, cox = gp_cox_decomposition(sub, forced)
    wit["gp_part"] = sub.vertex_names(gp)
    wit["cox_part"] = sub.vertex_names(cox)
    if not gp:
        t = classify_irreducible(diagram_of(sub))
        wit["coxeter_type"] = t.name
        if t.tag == "other":
            return ClassificationReport(YES, "(i) Coxeter factor neither spherical nor affine", fd, wit)
        if t.infinite_dihedral:
            return ClassificationReport(YES, "(i) infinite dihedral factor", fd, wit)
        return ClassificationReport(NO, "(i) affine Coxeter factor", fd, wit)
    if not cox:
        if large_join_containing(p, F.vertices) is None:
            return ClassificationReport(YES, "(ii) graph-product factor neither complete nor in a large join", fd, wit)
        return ClassificationReport(NO, "(ii) graph-product factor in a large join", fd, wit)
    return ClassificationReport(YES, "(iii) both GP and Coxeter parts non-empty", fd, wit)


# -- graph products: element level ------------------------------------------------

def _gp_infinite(p: PeriagroupPresentation, vs: Iterable[int]) -> bool:
    vs = list(vs)
    if any(not p.specs[u].is_finite for u in vs):
        return True
    return any(not p.commute(u, v) for u, v in itertools.combinations(vs, 2))


def is_complete(p: PeriagroupPresentation, vs: Iterable[int]) -> bool:
    return all(p.commute(u, v) for u, v in itertools.combinations(sorted(vs), 2))


def large_join_containing(p: PeriagroupPresentation, lam: Iterable[int],
                          bound: int = DEFAULT_JOIN_BOUND) -> tuple[frozenset[int], frozenset[int]] | None:
    """A join ``L1 * L2`` with both sides generating infinite subgroups and ``lam`` inside ``L1 | L2``."""
    lam = sorted(set(lam))
    outside = [v for v in range(p.n) if v not in lam]
    steps = 0
    for mask in range(1 << len(lam)):
        a = frozenset(lam[i] for i in range(len(lam)) if mask >> i & 1)
        b = frozenset(lam) - a
        if not all(p.commute(x, y) for x in a for y in b):
            continue
        # extra vertices on the a-side must commute with all of b (and the b-side extras)
        cand = [v for v in outside if all(p.commute(v, y) for y in b)]
        for k in range(len(cand) + 1):
            for extra in itertools.combinations(cand, k):
                steps += 1
                if steps > bound:
                    raise ResourceBoundError("large-join search", bound)
                left = a | frozenset(extra)
                right = b | frozenset(v for v in outside if v not in left and all(p.commute(v, x) for x in left))
                if _gp_infinite(p, left) and _gp_infinite(p, right):
                    return left, right
    return None


def _require_gp(p: PeriagroupPresentation) -> None:
    if not p.is_graph_product:
        raise PeriaError("element classification needs a graph product (all labels 2)")


def essential_support(p: PeriagroupPresentation, g: Word) -> tuple[Word, frozenset[int]]:
    return engine(p).cyclic_reduce(g)


def element_contracting_gp(p: PeriagroupPresentation, g: Word) -> ClassificationReport:
    _require_gp(p)
    red, lam = essential_support(p, g)
    wit = {"cyclic_reduction": format_word(p, red), "essential_support": _names(p, lam)}
    if not lam or (is_complete(p, lam) and all(p.specs[u].is_finite for u in lam)):
        return ClassificationReport(NO, "finite order", witnesses=wit)
    join = large_join_containing(p, lam)
    if join is not None:
        wit["large_join"] = [_names(p, join[0]), _names(p, join[1])]
        return ClassificationReport(NO, "converse by product obstruction: support in a large join", witnesses=wit)
    if not is_complete(p, lam):
        return ClassificationReport(YES, "support neither complete nor in a large join", witnesses=wit)
    return ClassificationReport(UNKNOWN, "complete support of infinite order: no rule applies", witnesses=wit)


def element_morse_gp(p: PeriagroupPresentation, g: Word) -> ClassificationReport:
    _require_gp(p)
    red, lam = essential_support(p, g)
    wit = {"cyclic_reduction": format_word(p, red), "essential_support": _names(p, lam)}
    if lam and not is_complete(p, lam) and large_join_containing(p, lam) is None:
        return ClassificationReport(YES, "(a) support neither complete nor in a large join", witnesses=wit)
    unknown_at = None
    for u in range(p.n):
        link = p.link(u)
        if not is_complete(p, link) or not all(p.specs[v].is_finite for v in link):
            continue
        if not lam <= (link | {u}):
            continue
        a = [s for s in red if s[0] == u]
        if not a:
            continue
        spec = p.specs[u]
        if spec.kind == "cyclic-inf":
            wit["vertex"] = p.names[u]
            return ClassificationReport(YES, "(b) Morse element of <u> times an element of <link(u)>", witnesses=wit)
        if spec.is_opaque:
            unknown_at = u
    if unknown_at is not None:
        wit["vertex"] = p.names[unknown_at]
        return ClassificationReport(UNKNOWN, "(b) Morse elements of an opaque vertex group are not declared",
                                    witnesses=wit)
    return ClassificationReport(NO, "neither clause applies", witnesses=wit)


# -- acylindrical hyperbolicity ---------------------------------------------------------

def acylindrically_hyperbolic(p: PeriagroupPresentation) -> ClassificationReport:
    fs = factors(p)
    fd = [f.as_dict(p) for f in fs]
    inf = [f for f in fs if not f.finite]
    if not inf:
        return ClassificationReport(NO, "finite group", fd)
    if len(inf) >= 2:
        return ClassificationReport(NO, "two infinite *2-factors", fd,
                                    {"infinite_factors": [_names(p, f.vertices) for f in inf]})
    F = inf[0]
    vs = sorted(F.vertices)
    wit = {"factor": _names(p, vs)}
    if len(vs) == 1:
        spec = p.specs[vs[0]]
        if spec.is_opaque:
            flag = spec.acylhyp
            verdict = {"yes": YES, "no": NO}.get(flag, UNKNOWN)
            return ClassificationReport(verdict, "single vertex: declared acylindrical hyperbolicity", fd, wit)
        return ClassificationReport(NO, "single vertex with a virtually cyclic group", fd, wit)
    all_two = all(p.label(u, v) in (None, 2) for u, v in itertools.combinations(vs, 2))
    if all_two:
        z2z2 = len(vs) == 2 and all(_is_z2(p.specs[u]) for u in vs)
        if not z2z2:
            return ClassificationReport(YES, "graph product with at least two vertices, not Z2*Z2", fd, wit)
    if all(_is_z2(p.specs[u]) for u in vs):
        t = classify_irreducible(diagram_of(p, vs))
        wit["coxeter_type"] = t.name
        if t.tag == "other":
            return ClassificationReport(YES, "Coxeter group neither spherical nor affine", fd, wit)
    has2 = any(_is_z2(p.specs[u]) for u in vs)
    has3 = any(not p.specs[u].is_finite or p.specs[u].order >= 3 for u in vs)
    if has2 and has3:
        return ClassificationReport(YES, "mixed: a Z2 vertex and a vertex of order at least 3", fd, wit)
    return ClassificationReport(NO, "no clause applies to the infinite factor", fd, wit)


# -- finite group enumeration ----------------------------------------------------------

def enumerate_subgroup(p: PeriagroupPresentation, vertices: Iterable[int], bound: int = DEFAULT_ENUM_BOUND) -> list[Word]:
    """Elements of the finite parabolic subgroup <vertices>, as canonical words of ``p``."""
    eng = engine(p)
    gens = [(v, e) for v in sorted(set(vertices)) for e in p.specs[v].nonidentity()]
    seen = {(): None}
    order = [()]
    queue = deque([()])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = eng.canonical_of_reduced(eng._append(x, s))
            if y not in seen:
                seen[y] = None
                order.append(y)
                if len(order) > bound:
                    raise ResourceBoundError("subgroup enumeration", bound)
                queue.append(y)
    return order


# -- Coxeter cosets ----------------------------------------------------------------------

@dataclass
class DisjointCosets:
    exists: bool
    factor: list[str] | None
    witness: Word | None
    verified: bool | None


def _require_coxeter(p: PeriagroupPresentation, vs: Iterable[int]) -> None:
    if not all(_is_z2(p.specs[u]) for u in vs):
        raise PeriaError("disjoint cosets are defined for Coxeter sub-presentations (all vertex groups Z/2)")


def _opposite_path(p: PeriagroupPresentation, factor: frozenset[int], a: int, b: int) -> list[int]:
    prev = {a: None}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if x == b:
            break
        for y in sorted(factor):
            if y not in prev and y != x and not p.commute(x, y):
                prev[y] = x
                queue.append(y)
    path = [b]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def disjoint_coset_exists(p: PeriagroupPresentation, psi: Iterable[int], lam1: Iterable[int], lam2: Iterable[int],
                          verify: bool = True) -> DisjointCosets:
    """Is there ``g`` in <psi> with ``g<lam1>`` disjoint from ``<lam2>``?"""
    psi = frozenset(psi)
    lam1, lam2 = frozenset(lam1), frozenset(lam2)
    _require_coxeter(p, psi)
    if not (lam1 <= psi and lam2 <= psi):
        raise PeriaError("Lambda_1 and Lambda_2 must lie in Psi")
    fs = star2_decomposition(p, psi).factors
    free = [f for f in fs if not f <= lam1 and not f <= lam2]
    if not free:
        res = DisjointCosets(False, None, None, None)
    else:
        f = free[0]
        c1, c2 = sorted(f - lam1), sorted(f - lam2)
        if lam1 & f == lam2 & f:
            word = [c1[0]]
        else:
            a1 = c1[0]
            a2 = next(x for x in c2 if x != a1) if len(c2) > 1 or c2[0] != a1 else None
            if a2 is None:
                a2 = c2[0]
                a1 = next(x for x in c1 if x != a2)
            word = _opposite_path(p, f, a2, a1)
        g = engine(p).canonical(tuple((v, 1) for v in word))
        res = DisjointCosets(True, _names(p, f), g, None)
    if verify and _subgroup_finite(p, psi):
        res.verified = _verify_cosets(p, psi, lam1, lam2, res)
    return res


def _verify_cosets(p: PeriagroupPresentation, psi, lam1, lam2, res: DisjointCosets) -> bool:
    eng = engine(p)
    group = enumerate_subgroup(p, psi)
    h1 = enumerate_subgroup(p, lam1)
    h2 = set(enumerate_subgroup(p, lam2))

    def disjoint(g: Word) -> bool:
        return all(eng.canonical(g + h) not in h2 for h in h1)

    if res.exists:
        return disjoint(res.witness)
    return not any(disjoint(g) for g in group)


def coset_index(p: PeriagroupPresentation, psi: Iterable[int], lam: Iterable[int]) -> float:
    """``[<psi> : <lam>]``, factor by factor; infinite factors not inside ``lam`` give infinity."""
    psi, lam = frozenset(psi), frozenset(lam)
    eng = engine(p)
    total = 1
    for f in star2_decomposition(p, psi).factors:
        if f <= lam:
            continue
        if not _subgroup_finite(p, f):
            return math.inf
        sub = f & lam
        elements = enumerate_subgroup(p, f)
        # minimal coset representatives: no reduced spelling ends in a letter of ``sub``
        gens = [(v, e) for v in sub for e in p.specs[v].nonidentity()]
        reps = sum(1 for w in elements if all(len(eng.canonical(w + (s,))) > len(w) for s in gens))
        order_sub = len(enumerate_subgroup(p, sub)) if sub else 1
        if reps * order_sub != len(elements):
            raise PeriaError("internal error: coset count disagrees with Lagrange")
        total *= reps
    return total


@dataclass
class CentraliserReport:
    vertices: frozenset[int]
    finite: bool
    psi: frozenset[int]
    psi_c: frozenset[int]


def centraliser_of_rot(p: PeriagroupPresentation, force_cox: Iterable[int] = ()) -> CentraliserReport:
    gp, cox = gp_cox_decomposition(p, force_cox)
    if not cox:
        return CentraliserReport(frozenset(), True, cox, gp)
    link = p.link_of(gp) if gp else frozenset(range(p.n))
    lam = frozenset().union(*[f for f in star2_decomposition(p, cox).factors if f <= link])
    return CentraliserReport(lam, _subgroup_finite(p, lam), cox, gp)


@dataclass
class OmegaReport:
    psi: frozenset[int]
    psi_c: frozenset[int]
    fibers: dict[int, float]
    complete_bipartite: dict[tuple[int, int], bool]
    graph: tuple[list[tuple[int, int]], list[tuple[int, int]]] | None = None   # (vertices (u, coset id), edges)


def omega_fibers(p: PeriagroupPresentation, force_cox: Iterable[int] = (), build: bool = True) -> OmegaReport:
    """Fibre sizes of the labelling map Omega -> Psi^c and the adjacency rule between fibres."""
    gp, cox = gp_cox_decomposition(p, force_cox)
    fibers = {u: coset_index(p, cox, p.link(u) & cox) if cox else 1 for u in sorted(gp)}
    comps = star2_decomposition(p, cox).factors if cox else ()
    bip = {}
    for u, v in itertools.combinations(sorted(gp), 2):
        if p.label(u, v) is not None:
            bip[(u, v)] = all(f <= p.link(u) or f <= p.link(v) for f in comps)
    rep = OmegaReport(cox, gp, fibers, bip)
    if build and all(not math.isinf(x) for x in fibers.values()):
        rep.graph = omega_graph(p, cox, gp)
    return rep


def omega_graph(p: PeriagroupPresentation, cox: frozenset[int], gp: frozenset[int]):
    """Omega by coset enumeration: a vertex per coset ``a<link(u) & Psi>``; fibres of adjacent ``u, v`` are
    joined when the cosets meet."""
    group = enumerate_subgroup(p, cox) if cox else [()]
    cosets: dict[int, list[frozenset[Word]]] = {}
    eng = engine(p)
    for u in sorted(gp):
        h = enumerate_subgroup(p, p.link(u) & cox)
        seen: dict[frozenset[Word], None] = {}
        for a in group:
            seen.setdefault(frozenset(eng.canonical(a + x) for x in h), None)
        cosets[u] = list(seen)
    verts = [(u, i) for u in sorted(gp) for i in range(len(cosets[u]))]
    pos = {x: k for k, x in enumerate(verts)}
    edges = []
    for u, v in itertools.combinations(sorted(gp), 2):
        if p.label(u, v) is None:
            continue
        for i, cu in enumerate(cosets[u]):
            for j, cv in enumerate(cosets[v]):
                if cu & cv:
                    edges.append((pos[(u, i)], pos[(v, j)]))
    return verts, edges


def is_join(n: int, edges: Iterable[tuple[int, int]]) -> bool:
    """Whether a graph on ``n`` vertices splits as a join of two non-empty subgraphs."""
    if n < 2:
        return False
    adj = [set() for _ in range(n)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in range(n):
            if y != x and y not in adj[x] and y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) < n
