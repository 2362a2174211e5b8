"""Spherical / affine / other classification of Coxeter diagrams.

Two independent methods are provided: structural matching against the
standard tables, and the signature of the Gram form
``B[u][v] = -cos(pi / m(u, v))``.  Labels in {2, 3, 4, 5, 6, inf} are handled
with exact arithmetic in Q(sqrt2, sqrt3, sqrt5); other labels fall back to
interval arithmetic with increasing precision.
"""

from __future__ import annotations

import itertools
import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from peria.errors import PeriaError, PrecisionError, PresentationError
from peria.presentation import PeriagroupPresentation

INF = math.inf

POSITIVE_DEFINITE = "positive-definite"
SEMIDEFINITE_CORANK_1 = "semidefinite-corank-1"
INDEFINITE = "indefinite"


@dataclass(frozen=True)
class CoxeterDiagram:
    n: int
    labels: dict = field(default_factory=dict)   # (u, v) with u < v -> m >= 3 or INF
    names: tuple[str, ...] = ()

    def __post_init__(self):
        clean = {}
        for (u, v), m in self.labels.items():
            if u == v or not (0 <= u < self.n and 0 <= v < self.n):
                raise PeriaError(f"bad diagram edge ({u},{v})")
            if m != INF and (int(m) != m or m < 2):
                raise PeriaError(f"bad Coxeter label {m}")
            if m == 2:
                continue
            clean[(min(u, v), max(u, v))] = m if m == INF else int(m)
        object.__setattr__(self, "labels", clean)
        if not self.names:
            object.__setattr__(self, "names", tuple(str(i) for i in range(self.n)))

    def m(self, u: int, v: int) -> float:
        if u == v:
            return 1
        return self.labels.get((min(u, v), max(u, v)), 2)

    def neighbours(self, u: int) -> list[int]:
        return [v for v in range(self.n) if v != u and self.m(u, v) != 2]

    def induced(self, verts: Sequence[int]) -> "CoxeterDiagram":
        verts = list(verts)
        pos = {v: i for i, v in enumerate(verts)}
        labels = {(pos[u], pos[v]): m for (u, v), m in self.labels.items() if u in pos and v in pos}
        return CoxeterDiagram(len(verts), labels, tuple(self.names[v] for v in verts))

    def relabel(self, perm: Sequence[int]) -> "CoxeterDiagram":
        """Diagram with vertex ``i`` renamed ``perm[i]``."""
        labels = {(perm[u], perm[v]): m for (u, v), m in self.labels.items()}
        return CoxeterDiagram(self.n, labels)

    def to_text(self) -> str:
        lines = [f"coxeter {self.n}"]
        for (u, v), m in sorted(self.labels.items()):
            lines.append(f"m {u} {v} {'inf' if m == INF else m}")
        return "\n".join(lines) + "\n"


def parse_diagram(text: str) -> CoxeterDiagram:
    lines = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0][0] != "coxeter" or len(lines[0]) != 2:
        raise PresentationError("diagram must start with 'coxeter <n>'")
    n = int(lines[0][1])
    labels = {}
    for toks in lines[1:]:
        if toks[0] != "m" or len(toks) != 4:
            raise PresentationError(f"expected 'm u v <label|inf>', got {' '.join(toks)!r}")
        u, v = int(toks[1]), int(toks[2])
        labels[(u, v)] = INF if toks[3] == "inf" else int(toks[3])
    return CoxeterDiagram(n, labels)


def diagram_of(p: PeriagroupPresentation, vertices: Iterable[int] | None = None) -> CoxeterDiagram:
    """Coxeter diagram of an all-Z/2 sub-presentation: a missing Gamma-edge becomes m = inf."""
    verts = sorted(range(p.n) if vertices is None else vertices)
    for v in verts:
        s = p.specs[v]
        if not (s.kind == "cyclic" and s.order == 2) and not (s.kind == "table" and s.order == 2):
            raise PresentationError(f"vertex {p.names[v]} is not of order 2")
    labels = {}
    for i, u in enumerate(verts):
        for j in range(i + 1, len(verts)):
            lab = p.label(u, verts[j])
            labels[(i, j)] = INF if lab is None else lab
    return CoxeterDiagram(len(verts), labels, tuple(p.names[v] for v in verts))


def irreducible_components(d: CoxeterDiagram) -> list[list[int]]:
    seen = set()
    comps = []
    for s in range(d.n):
        if s in seen:
            continue
        comp, stack = [s], [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            for v in d.neighbours(u):
                if v not in seen:
                    seen.add(v)
                    comp.append(v)
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


@dataclass(frozen=True)
class IrreducibleCoxeterType:
    tag: str                   # "spherical", "affine" or "other"
    family: str | None = None  # e.g. "A", "B", "I2"; affine families carry a leading "~"
    rank: int | None = None
    param: int | None = None   # m for I2(m)
    infinite_dihedral: bool = False

    @property
    def name(self) -> str:
        if self.tag == "other":
            return "other"
        if self.family == "I2":
            return f"I2({self.param})"
        if self.family.startswith("~"):
            return f"~{self.family[1:]}{self.rank}"
        return f"{self.family}{self.rank}"


def _path_order(d: CoxeterDiagram) -> list[int]:
    ends = [v for v in range(d.n) if len(d.neighbours(v)) == 1]
    start = min(ends)
    order, prev = [start], None
    while len(order) < d.n:
        nxt = [v for v in d.neighbours(order[-1]) if v != prev][0]
        prev = order[-1]
        order.append(nxt)
    return order


def _classify_path(labels: list) -> IrreducibleCoxeterType | None:
    n = len(labels) + 1
    rev = labels[::-1]
    for seq in (labels, rev):
        if all(m == 3 for m in seq):
            return IrreducibleCoxeterType("spherical", "A", n)
        if seq[-1] == 4 and all(m == 3 for m in seq[:-1]):
            return IrreducibleCoxeterType("spherical", "B", n)
        if n >= 3 and seq[0] == 4 and seq[-1] == 4 and all(m == 3 for m in seq[1:-1]):
            return IrreducibleCoxeterType("affine", "~C", n - 1)
        if seq == [3, 4, 3]:
            return IrreducibleCoxeterType("spherical", "F", 4)
        if seq == [3, 3, 4, 3]:
            return IrreducibleCoxeterType("affine", "~F", 4)
        if seq == [5, 3]:
            return IrreducibleCoxeterType("spherical", "H", 3)
        if seq == [5, 3, 3]:
            return IrreducibleCoxeterType("spherical", "H", 4)
        if seq == [6, 3]:
            return IrreducibleCoxeterType("affine", "~G", 2)
    return None


def classify_irreducible(d: CoxeterDiagram) -> IrreducibleCoxeterType:
    """Match an irreducible diagram against the spherical and affine tables."""
    if len(irreducible_components(d)) != 1:
        raise PeriaError("diagram is not irreducible")
    n = d.n
    if n == 1:
        return IrreducibleCoxeterType("spherical", "A", 1)
    if n == 2:
        m = d.m(0, 1)
        if m == INF:
            return IrreducibleCoxeterType("affine", "~A", 1, infinite_dihedral=True)
        return IrreducibleCoxeterType("spherical", "I2", 2, param=int(m))
    labels = list(d.labels.values())
    if any(m == INF for m in labels):
        return IrreducibleCoxeterType("other")
    deg = [len(d.neighbours(v)) for v in range(n)]
    edges = len(d.labels)
    if edges == n:
        if all(x == 2 for x in deg) and all(m == 3 for m in labels):
            return IrreducibleCoxeterType("affine", "~A", n - 1)
        return IrreducibleCoxeterType("other")
    if edges != n - 1:
        return IrreducibleCoxeterType("other")
    # trees from here on
    if max(deg) <= 2:
        order = _path_order(d)
        got = _classify_path([d.m(a, b) for a, b in zip(order, order[1:])])
        return got or IrreducibleCoxeterType("other")
    branch = [v for v in range(n) if deg[v] >= 3]
    if max(deg) == 4:
        if n == 5 and all(m == 3 for m in labels):
            return IrreducibleCoxeterType("affine", "~D", 4)
        return IrreducibleCoxeterType("other")
    if max(deg) > 4:
        return IrreducibleCoxeterType("other")
    if len(branch) == 2:
        if all(m == 3 for m in labels):
            a, b = branch
            leaves_ok = all(sum(1 for w in d.neighbours(x) if deg[w] == 1) == 2 for x in branch)
            if leaves_ok:
                return IrreducibleCoxeterType("affine", "~D", n - 1)
        return IrreducibleCoxeterType("other")
    if len(branch) > 2:
        return IrreducibleCoxeterType("other")
    c = branch[0]
    arms = []
    for start in d.neighbours(c):
        arm, prev, cur = [start], c, start
        while True:
            nxt = [w for w in d.neighbours(cur) if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            arm.append(cur)
        arms.append(arm)
    arm_labels = []
    for arm in arms:
        chain = [c] + arm
        arm_labels.append([d.m(a, b) for a, b in zip(chain, chain[1:])])
    big = [(i, lab) for i, labs in enumerate(arm_labels) for lab in labs if lab != 3]
    lengths = sorted(len(a) for a in arms)
    if not big:
        if lengths[0] == 1 and lengths[1] == 1:
            return IrreducibleCoxeterType("spherical", "D", n)
        table = {(1, 2, 2): ("spherical", "E", 6), (1, 2, 3): ("spherical", "E", 7),
                 (1, 2, 4): ("spherical", "E", 8), (2, 2, 2): ("affine", "~E", 6),
                 (1, 3, 3): ("affine", "~E", 7), (1, 2, 5): ("affine", "~E", 8)}
        hit = table.get(tuple(lengths))
        return IrreducibleCoxeterType(*hit) if hit else IrreducibleCoxeterType("other")
    if len(big) == 1 and big[0][1] == 4:
        i = big[0][0]
        others = [len(a) for j, a in enumerate(arms) if j != i]
        if others == [1, 1] and arm_labels[i][-1] == 4:
            return IrreducibleCoxeterType("affine", "~B", n - 1)
    return IrreducibleCoxeterType("other")


def classify_diagram(d: CoxeterDiagram) -> list[tuple[list[int], IrreducibleCoxeterType]]:
    return [(comp, classify_irreducible(d.induced(comp))) for comp in irreducible_components(d)]


# -- exact arithmetic in Q(sqrt2, sqrt3, sqrt5) -----------------------------

_PRIMES = (2, 3, 5)


@contextmanager
def _iv_precision(bits: int):
    saved = mpmath.iv.prec
    mpmath.iv.prec = bits
    try:
        yield
    finally:
        mpmath.iv.prec = saved


def _basis_product(a: int, b: int) -> tuple[int, int]:
    """sqrt(P_a) * sqrt(P_b) = coeff * sqrt(P_{a xor b}) for squarefree products indexed by bitmasks."""
    coeff = 1
    for i, p in enumerate(_PRIMES):
        if a >> i & 1 and b >> i & 1:
            coeff *= p
    return coeff, a ^ b


_MUL = [[_basis_product(a, b) for b in range(8)] for a in range(8)]


class QSurd:
    """Element of Q(sqrt2, sqrt3, sqrt5) as rational coordinates on sqrt(2^a 3^b 5^c)."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = tuple(Fraction(x) for x in coeffs)

    @classmethod
    def rational(cls, q) -> "QSurd":
        return cls((q,) + (0,) * 7)

    def __add__(self, o: "QSurd") -> "QSurd":
        return QSurd(tuple(a + b for a, b in zip(self.c, o.c)))

    def __sub__(self, o: "QSurd") -> "QSurd":
        return QSurd(tuple(a - b for a, b in zip(self.c, o.c)))

    def __neg__(self) -> "QSurd":
        return QSurd(tuple(-a for a in self.c))

    def __mul__(self, o: "QSurd") -> "QSurd":
        out = [Fraction(0)] * 8
        for i, a in enumerate(self.c):
            if not a:
                continue
            for j, b in enumerate(o.c):
                if b:
                    k, idx = _MUL[i][j]
                    out[idx] += k * a * b
        return QSurd(out)

    def is_zero(self) -> bool:
        return not any(self.c)

    def interval(self, prec: int):
        with _iv_precision(prec):
            total = mpmath.iv.mpf(0)
            for mask, q in enumerate(self.c):
                if not q:
                    continue
                rad = 1
                for i, p in enumerate(_PRIMES):
                    if mask >> i & 1:
                        rad *= p
                total += mpmath.iv.mpf(q.numerator) / q.denominator * mpmath.iv.sqrt(rad)
            return total

    def sign(self, max_prec: int = 4096) -> int:
        if self.is_zero():
            return 0
        prec = 64
        while prec <= max_prec:
            iv = self.interval(prec)
            if iv.a > 0:
                return 1
            if iv.b < 0:
                return -1
            prec *= 2
        raise PrecisionError("could not certify the sign of a nonzero surd")


# cos(pi / m) for the exactly supported labels; basis index is the bitmask over (2, 3, 5)
_HALF = Fraction(1, 2)
_EXACT_COS = {
    2: QSurd.rational(0),
    3: QSurd.rational(_HALF),
    4: QSurd((0, _HALF, 0, 0, 0, 0, 0, 0)),
    5: QSurd((Fraction(1, 4), 0, 0, 0, Fraction(1, 4), 0, 0, 0)),
    6: QSurd((0, 0, _HALF, 0, 0, 0, 0, 0)),
    INF: QSurd.rational(1),
}


def _gram_exact(d: CoxeterDiagram) -> list[list[QSurd]] | None:
    if any(m not in _EXACT_COS for m in d.labels.values()):
        return None
    one = QSurd.rational(1)
    return [[one if u == v else -_EXACT_COS[d.m(u, v)] for v in range(d.n)] for u in range(d.n)]


def _gram_interval(d: CoxeterDiagram, prec: int):
    with _iv_precision(prec):
        def entry(u, v):
            if u == v:
                return mpmath.iv.mpf(1)
            m = d.m(u, v)
            if m == INF:
                return mpmath.iv.mpf(-1)
            return -mpmath.iv.cos(mpmath.iv.pi / m)
        return [[entry(u, v) for v in range(d.n)] for u in range(d.n)]


def _leading_minors(mat, rows: Sequence[int]):
    """Determinants of the leading principal minors of ``mat`` restricted to ``rows``.

    Laplace expansion along the newest row, memoized over column subsets.
    """
    k = len(rows)
    out = []
    prev = {0: None}  # column bitmask -> determinant on the first popcount(mask) rows; None stands for 1
    for r in range(k):
        cur = {}
        row = mat[rows[r]]
        for mask, val in prev.items():
            for c in range(k):
                if mask >> c & 1:
                    continue
                term = row[rows[c]] if val is None else val * row[rows[c]]
                if bin(mask >> (c + 1)).count("1") % 2:
                    term = -term
                nm = mask | (1 << c)
                cur[nm] = term if nm not in cur else cur[nm] + term
        prev = cur
        out.append(prev[(1 << (r + 1)) - 1])
    return out


def _signs_exact(mat, rows) -> list[int]:
    return [m.sign() for m in _leading_minors(mat, rows)]


def _signs_interval(d: CoxeterDiagram, rows, max_prec: int = 2048) -> list[int]:
    prec = 64
    while prec <= max_prec:
        with _iv_precision(prec):
            mat = _gram_interval(d, prec)
            minors = _leading_minors(mat, rows)
            signs = []
            ok = True
            for x in minors:
                if x.a > 0:
                    signs.append(1)
                elif x.b < 0:
                    signs.append(-1)
                else:
                    ok = False
                    break
            if ok:
                return signs
        prec *= 2
    raise PrecisionError("Gram minors could not be separated from zero")


def _is_positive_definite(d: CoxeterDiagram, rows: Sequence[int], exact) -> bool:
    if not rows:
        return True
    signs = _signs_exact(exact, rows) if exact is not None else _signs_interval(d, rows)
    return all(s > 0 for s in signs)


# Float eigenvalues are off by at most n * eps * ||B|| (Weyl); anything beyond this margin is certain.
_EIG_MARGIN = 1e-8


def _float_signature(d: CoxeterDiagram) -> str | None:
    b = np.array([[1.0 if u == v else (-1.0 if d.m(u, v) == INF else -math.cos(math.pi / d.m(u, v)))
                   for v in range(d.n)] for u in range(d.n)])
    low = float(np.linalg.eigvalsh(b)[0])
    if low > _EIG_MARGIN:
        return POSITIVE_DEFINITE
    if low < -_EIG_MARGIN:
        return INDEFINITE
    return None


def gram_signature(d: CoxeterDiagram, exact_only: bool = False) -> str:
    """Certified signature class of the Gram form of an irreducible diagram."""
    if not exact_only:
        quick = _float_signature(d)
        if quick is not None:
            return quick
    exact = _gram_exact(d)
    rows = list(range(d.n))
    if _is_positive_definite(d, rows, exact):
        return POSITIVE_DEFINITE
    if exact is not None:
        det_zero = _leading_minors(exact, rows)[-1].is_zero()
    else:
        # without exact arithmetic a vanishing determinant cannot be certified
        try:
            _signs_interval(d, rows)
            det_zero = False
        except PrecisionError:
            raise PrecisionError("determinant of the Gram form is numerically zero but cannot be certified")
    if det_zero and all(_is_positive_definite(d, [r for r in rows if r != k], exact) for k in rows):
        return SEMIDEFINITE_CORANK_1
    return INDEFINITE


def expected_signature(t: IrreducibleCoxeterType) -> str:
    return {"spherical": POSITIVE_DEFINITE, "affine": SEMIDEFINITE_CORANK_1}.get(t.tag, INDEFINITE)


def canonical_key(d: CoxeterDiagram) -> tuple:
    """Isomorphism-invariant key (minimum over vertex permutations; fine for small rank)."""
    best = None
    for perm in itertools.permutations(range(d.n)):
        key = tuple(sorted(((min(perm[u], perm[v]), max(perm[u], perm[v])), -1 if m == INF else m)
                           for (u, v), m in d.labels.items()))
        if best is None or key < best:
            best = key
    return (d.n, best)
