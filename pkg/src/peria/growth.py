"""Spherical and conjugacy growth series of periagroups."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from peria.cayley import S_MODE, explore_ball
from peria.classify import (
    UNKNOWN,
    YES,
    ClassificationReport,
    contracting_exists,
    factors,
    is_finite,
)
from peria.coxeter import classify_irreducible, diagram_of
from peria.errors import PeriaError
from peria.presentation import PeriagroupPresentation
from peria.words import Word, format_word

SATURATION = "saturation"
EXACT_GP = "exact-gp"
RATE_MARGIN = 0.05


@dataclass
class GrowthSeries:
    coefficients: list[int]

    @property
    def truncation(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, n: int) -> int:
        return self.coefficients[n]

    def to_line(self) -> str:
        return ",".join(str(c) for c in self.coefficients)


@dataclass
class ConjugacyClassTable:
    representatives: list[list[Word]]
    method: str
    slack: int | None = None
    stable: bool | None = None

    def series(self) -> GrowthSeries:
        return GrowthSeries([len(r) for r in self.representatives])


def spherical_growth(p: PeriagroupPresentation, N: int, mode: str = S_MODE) -> GrowthSeries:
    return GrowthSeries(explore_ball(p, (), N, mode).sphere_sizes())


# -- saturation --------------------------------------------------------------

def _inverse_table(p: PeriagroupPresentation, ball) -> np.ndarray:
    """Index of ``x^-1`` for every ``x`` of a ball about the identity."""
    gens = ball.gens
    sinv = np.array([gens.index((v, p.specs[v].inv(e))) for v, e in gens], dtype=np.int64)
    par = np.array([a for a, _ in ball.parent], dtype=np.int64)
    pgen = np.array([g for _, g in ball.parent], dtype=np.int64)
    # x = s_1 ... s_k along the tree, so x^-1 = s_k^-1 ... s_1^-1
    node = np.arange(len(ball))
    cur = np.zeros(len(ball), dtype=np.int64)
    live = node != 0
    while live.any():
        idx = np.flatnonzero(live)
        cur[idx] = ball.right[cur[idx], sinv[pgen[node[idx]]]]
        node[idx] = par[node[idx]]
        live[idx] = node[idx] != 0
    return cur


def _saturation_classes(p: PeriagroupPresentation, N: int, slack: int) -> list[list[Word]]:
    """Conjugacy classes met by the radius-``N`` sphere, merged by generator conjugation in the radius ``N + slack`` ball."""
    ball = explore_ball(p, (), N + slack, S_MODE)
    n = len(ball)
    right = ball.right
    inv = _inverse_table(p, ball)
    rows, cols = [], []
    ids = np.arange(n)
    for si in range(len(ball.gens)):
        xs = right[:, si]                        # x s
        ok = xs >= 0
        # s^-1 (x s) = ((x s)^-1 s)^-1
        t = np.full(n, -1, dtype=np.int64)
        t[ok] = right[inv[xs[ok]], si]
        ok &= t >= 0
        conj = np.full(n, -1, dtype=np.int64)
        conj[ok] = inv[t[ok]]
        ok &= conj >= 0
        rows.append(ids[ok])
        cols.append(conj[ok])
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    m = csr_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(n, n))
    _, comp = connected_components(m, directed=False)
    level = ball.level
    best: dict[int, int] = {}
    for i in np.flatnonzero(level <= N).tolist():
        k = int(comp[i])
        j = best.get(k)
        if j is None or (level[i], ball.words[i]) < (level[j], ball.words[j]):
            best[k] = i
    table: list[list[Word]] = [[] for _ in range(N + 1)]
    for k, i in best.items():
        table[int(level[i])].append(ball.words[i])
    for row in table:
        row.sort()
    return table


def _exact_gp_classes(p: PeriagroupPresentation, N: int) -> list[list[Word]]:
    if not p.is_graph_product or not all(s.kind in ("cyclic", "cyclic-inf") for s in p.specs):
        raise PeriaError("exact-gp needs a graph product of cyclic groups")
    ball = explore_ball(p, (), N, S_MODE)
    eng = ball.engine
    best: dict[Word, tuple[int, Word]] = {}
    for w, lev in zip(ball.words, ball.level.tolist()):
        key, _ = eng.cyclic_reduce(w)
        cur = best.get(key)
        if cur is None or (lev, w) < cur:
            best[key] = (lev, w)
    table: list[list[Word]] = [[] for _ in range(N + 1)]
    for lev, w in best.values():
        table[lev].append(w)
    for row in table:
        row.sort()
    return table


def conjugacy_growth(p: PeriagroupPresentation, N: int, method: str = SATURATION,
                     slack: int = 2) -> tuple[GrowthSeries, ConjugacyClassTable]:
    if method == EXACT_GP:
        table = ConjugacyClassTable(_exact_gp_classes(p, N), EXACT_GP)
    elif method == SATURATION:
        if slack < 0:
            raise PeriaError("slack must be non-negative")
        first = _saturation_classes(p, N, slack)
        second = _saturation_classes(p, N, slack + 1)
        stable = [len(r) for r in first] == [len(r) for r in second]
        table = ConjugacyClassTable(first, SATURATION, slack, stable)
    else:
        raise PeriaError(f"unknown method {method!r}")
    return table.series(), table


def series_product(a: GrowthSeries, b: GrowthSeries) -> GrowthSeries:
    n = min(a.truncation, b.truncation)
    conv = np.convolve(np.asarray(a.coefficients[: n + 1], dtype=object), np.asarray(b.coefficients[: n + 1], dtype=object))
    return GrowthSeries([int(x) for x in conv[: n + 1]])


# -- asymptotics ---------------------------------------------------------------

@dataclass
class RateEstimate:
    estimate: float
    low: float
    high: float


def estimate_growth_rate(s: GrowthSeries, window: int = 3) -> RateEstimate:
    """Root and ratio estimates of the exponential growth rate from the tail of ``s``."""
    c = [x for x in s.coefficients]
    N = len(c) - 1
    if N < 2 or c[N] == 0:
        return RateEstimate(0.0, 0.0, 0.0)
    ratios = [c[k] / c[k - 1] for k in range(max(2, N - window + 1), N + 1) if c[k - 1]]
    root = c[N] ** (1.0 / N)
    vals = ratios + [root]
    return RateEstimate(ratios[-1] if ratios else root, min(vals), max(vals))


@dataclass
class AsymptoticDiagnostic:
    applicable: bool
    ratios: list[tuple[int, float]] = field(default_factory=list)
    low: float | None = None
    high: float | None = None

    @property
    def band(self) -> float | None:
        if not self.applicable or not self.low:
            return None
        return self.high / self.low


def asymptotic_diagnostic(c: GrowthSeries, alpha: float, start: int = 1, stop: int | None = None,
                          eps: float = 1e-6) -> AsymptoticDiagnostic:
    """Ratios ``c(n) n / alpha^n`` over ``start <= n <= stop``."""
    if alpha <= 1 + eps:
        return AsymptoticDiagnostic(False)
    stop = c.truncation if stop is None else stop
    rs = [(n, c[n] * n / alpha ** n) for n in range(max(start, 1), stop + 1)]
    vals = [r for _, r in rs]
    return AsymptoticDiagnostic(True, rs, min(vals), max(vals))


# -- transcendence ---------------------------------------------------------------

def _factor_kind(p: PeriagroupPresentation, f) -> str:
    """``finite``, ``virtually-cyclic``, ``virtually-abelian`` or ``general`` for a *2-factor."""
    if f.finite:
        return "finite"
    vs = sorted(f.vertices)
    if len(vs) == 1:
        return "virtually-cyclic" if p.specs[vs[0]].kind == "cyclic-inf" else "general"
    if f.kind == "coxeter":
        t = classify_irreducible(diagram_of(p, vs))
        if t.infinite_dihedral:
            return "virtually-cyclic"
        if t.tag == "affine":
            return "virtually-abelian"
    return "general"


def transcendence_verdict(p: PeriagroupPresentation, radius: int = 8) -> ClassificationReport:
    fs = factors(p)
    kinds = [_factor_kind(p, f) for f in fs]
    fd = [dict(f.as_dict(p), growth_kind=k) for f, k in zip(fs, kinds)]
    if is_finite(p).verdict == YES:
        return ClassificationReport("rational", "finite group: polynomial series", fd)
    if all(k != "general" for k in kinds):
        return ClassificationReport("rational", "virtually abelian: rational conjugacy growth series", fd)
    ce = contracting_exists(p)
    infinite = [k for k in kinds if k != "finite"]
    if ce.verdict == YES and not (len(infinite) == 1 and infinite[0] == "virtually-cyclic"):
        return ClassificationReport("transcendental", "contracting element in a non-elementary group", fd,
                                    {"contracting_rule": ce.rule})
    # direct products: one factor strictly faster and contracting-positive
    rates = []
    for f, k in zip(fs, kinds):
        if k == "finite":
            continue
        sub = p.induced(f.vertices)
        if k != "general":
            est = RateEstimate(1.0, 1.0, 1.0)
        elif sub.has_opaque:
            return ClassificationReport("open", "opaque factor: growth rate unavailable", fd)
        else:
            est = estimate_growth_rate(spherical_growth(sub, radius))
        rates.append((f, sub, est))
    wit = {"rates": [[p.vertex_names(f.vertices), round(e.low, 4), round(e.high, 4)] for f, _, e in rates]}
    if len(rates) >= 2:
        rates.sort(key=lambda t: -t[2].low)
        top, rest = rates[0], rates[1:]
        if all(top[2].low > e.high + RATE_MARGIN for _, _, e in rest):
            sub_ce = contracting_exists(top[1])
            if sub_ce.verdict == YES and _factor_kind(p, top[0]) == "general":
                wit["dominant_factor"] = p.vertex_names(top[0].vertices)
                return ClassificationReport("transcendental", "direct product with a dominant contracting factor",
                                            fd, wit)
    verdict = "open"
    if ce.verdict == UNKNOWN:
        return ClassificationReport(verdict, "contracting elements undecided (opaque vertex group)", fd, wit)
    return ClassificationReport(verdict, "no rule applies", fd, wit)


def format_classes(p: PeriagroupPresentation, table: ConjugacyClassTable) -> list[list[str]]:
    return [[format_word(p, w) for w in row] for row in table.representatives]
