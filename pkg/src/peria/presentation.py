"""Periagroup presentations: vertex groups, labelled graphs, parsing and decompositions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from peria.errors import PeriaSyntaxError, PresentationError

ACYLHYP_FLAGS = ("yes", "no", "unknown")
TABLE_FULL_CHECK_LIMIT = 64


@dataclass(frozen=True)
class VertexGroupSpec:
    """One vertex group together with its chosen generating set.

    ``kind`` is one of ``"cyclic"`` (order ``order``), ``"cyclic-inf"``,
    ``"table"`` (multiplication table, identity = 0) or ``"opaque"``.
    Elements are plain integers: exponents for the cyclic kinds (reduced
    mod ``order`` when finite), table indices otherwise.
    """

    kind: str
    order: int | None = None
    table: tuple[tuple[int, ...], ...] | None = None
    acylhyp: str = "unknown"
    gens: tuple[int, ...] = ()

    @classmethod
    def cyclic(cls, m: int, gens: Sequence[int] | None = None) -> "VertexGroupSpec":
        return cls("cyclic", order=m, gens=tuple(gens) if gens else (1,))

    @classmethod
    def cyclic_infinite(cls, gens: Sequence[int] | None = None) -> "VertexGroupSpec":
        return cls("cyclic-inf", gens=tuple(gens) if gens else (1,))

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]], gens: Sequence[int] | None = None) -> "VertexGroupSpec":
        rows = tuple(tuple(int(x) for x in row) for row in table)
        spec = cls("table", order=len(rows), table=rows, gens=tuple(gens) if gens else ())
        if not spec.gens:
            object.__setattr__(spec, "gens", tuple(range(1, len(rows))))
        return spec

    @classmethod
    def opaque(cls, acylhyp: str = "unknown") -> "VertexGroupSpec":
        return cls("opaque", acylhyp=acylhyp)

    @property
    def is_opaque(self) -> bool:
        return self.kind == "opaque"

    @property
    def is_finite(self) -> bool:
        return self.kind in ("cyclic", "table")

    @property
    def size(self) -> float:
        """Group order; ``math.inf`` for infinite groups."""
        return self.order if self.is_finite else math.inf

    def _require_elements(self) -> None:
        if self.is_opaque:
            raise PresentationError("opaque vertex groups admit no element-level operations")

    def normalize(self, e: int) -> int:
        self._require_elements()
        if self.kind == "cyclic":
            return e % self.order
        if self.kind == "table" and not 0 <= e < self.order:
            raise PresentationError(f"table element {e} out of range 0..{self.order - 1}")
        return e

    def mul(self, a: int, b: int) -> int:
        if self.kind == "cyclic":
            return (a + b) % self.order
        if self.kind == "cyclic-inf":
            return a + b
        if self.kind == "table":
            return self.table[a][b]
        self._require_elements()

    def inv(self, a: int) -> int:
        if self.kind == "cyclic":
            return (-a) % self.order
        if self.kind == "cyclic-inf":
            return -a
        if self.kind == "table":
            return self._inverses[a]
        self._require_elements()

    @cached_property
    def _inverses(self) -> tuple[int, ...]:
        inv = []
        for a in range(self.order):
            inv.append(next(b for b in range(self.order) if self.table[a][b] == 0))
        return tuple(inv)

    def nonidentity(self) -> list[int]:
        """All nonidentity elements of a finite group, in index order."""
        if not self.is_finite:
            raise PresentationError("cannot list the elements of an infinite vertex group")
        return list(range(1, self.order))

    @cached_property
    def symmetric_gens(self) -> tuple[int, ...]:
        """``S_G`` closed under inverses, sorted, identity removed."""
        self._require_elements()
        out = set()
        for s in self.gens:
            s = self.normalize(s)
            out.add(s)
            out.add(self.inv(s))
        out.discard(0)
        return tuple(sorted(out))

    @cached_property
    def _finite_lengths(self) -> dict[int, int]:
        dist = {0: 0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for s in self.symmetric_gens:
                    y = self.mul(x, s)
                    if y not in dist:
                        dist[y] = dist[x] + 1
                        nxt.append(y)
            frontier = nxt
        return dist

    def s_length(self, e: int) -> int:
        """Word length of ``e`` over ``S_G`` and its inverses (breadth-first search)."""
        if self.kind == "cyclic-inf":
            return _integer_length(e, self.symmetric_gens)
        self._require_elements()
        lengths = self._finite_lengths
        if e not in lengths:
            raise PresentationError(f"generating set {self.gens} does not generate the vertex group")
        return lengths[e]

    def generates(self) -> bool:
        if self.is_opaque:
            return True
        if self.kind == "cyclic-inf":
            return bool(self.gens) and math.gcd(*[abs(s) for s in self.gens]) == 1
        return len(self._finite_lengths) == self.order

    def element_order(self, e: int) -> float:
        if self.kind == "cyclic-inf":
            return 1 if e == 0 else math.inf
        k, x = 1, e
        while x != 0:
            x = self.mul(x, e)
            k += 1
        return k if e != 0 else 1

    def describe(self) -> str:
        if self.kind == "cyclic":
            return f"Z/{self.order}"
        if self.kind == "cyclic-inf":
            return "Z"
        if self.kind == "table":
            return f"table({self.order})"
        return f"opaque(acylhyp={self.acylhyp})"


def _integer_length(e: int, steps: Sequence[int]) -> int:
    if e == 0:
        return 0
    if set(steps) == {1, -1}:
        return abs(e)
    reach = max(abs(s) for s in steps)
    lo, hi = min(0, e) - reach, max(0, e) + reach
    dist = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for s in steps:
                y = x + s
                if lo <= y <= hi and y not in dist:
                    if y == e:
                        return dist[x] + 1
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    raise PresentationError(f"generating set {tuple(steps)} does not generate Z")


def check_table(table: Sequence[Sequence[int]]) -> list[str]:
    """Return the group-axiom failures of a multiplication table (empty when it is a group)."""
    k = len(table)
    problems = []
    if k == 0:
        return ["empty table"]
    if any(len(row) != k for row in table):
        return [f"table is not {k}x{k}"]
    if any(not 0 <= x < k for row in table for x in row):
        return ["table entry out of range"]
    for a in range(k):
        if table[0][a] != a or table[a][0] != a:
            problems.append(f"index 0 is not an identity for element {a}")
            break
    for a in range(k):
        if not any(table[a][b] == 0 and table[b][a] == 0 for b in range(k)):
            problems.append(f"element {a} has no inverse")
    if k <= TABLE_FULL_CHECK_LIMIT and not problems:
        for a in range(k):
            row_a = table[a]
            for b in range(k):
                ab = row_a[b]
                for c in range(k):
                    if table[ab][c] != row_a[table[b][c]]:
                        problems.append(f"associativity fails on ({a},{b},{c})")
                        return problems
    return problems


@dataclass(frozen=True)
class LabelledGraph:
    vertices: tuple[str, ...]
    labels: dict[tuple[int, int], int] = field(default_factory=dict)

    def label(self, u: int, v: int) -> int | None:
        return self.labels.get((u, v) if u < v else (v, u))

    @cached_property
    def neighbours(self) -> tuple[frozenset[int], ...]:
        nbrs = [set() for _ in self.vertices]
        for u, v in self.labels:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(n) for n in nbrs)


class PeriagroupPresentation:
    """A periagroup over a labelled graph with vertex groups.

    Vertices are referred to by their index in declaration order; ``names``
    maps indices back to the names used in files and words.
    """

    def __init__(
        self,
        names: Sequence[str],
        specs: Sequence[VertexGroupSpec],
        labels: dict[tuple[int, int], int] | None = None,
    ) -> None:
        if len(names) != len(specs):
            raise PresentationError("every vertex needs exactly one group spec")
        self.names = tuple(names)
        self.specs = tuple(specs)
        norm = {}
        for (u, v), lab in (labels or {}).items():
            if u == v:
                raise PresentationError(f"self-loop at {self.names[u]}")
            key = (u, v) if u < v else (v, u)
            if key in norm:
                raise PresentationError(f"repeated edge {self.names[key[0]]}-{self.names[key[1]]}")
            norm[key] = int(lab)
        self.graph = LabelledGraph(self.names, norm)
        self.index = {name: i for i, name in enumerate(self.names)}
        self._cache: dict = {}

    # -- graph queries -------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def labels(self) -> dict[tuple[int, int], int]:
        return self.graph.labels

    def label(self, u: int, v: int) -> int | None:
        return self.graph.label(u, v)

    def commute(self, u: int, v: int) -> bool:
        """True when ``u``, ``v`` are joined by an edge labelled 2."""
        return u != v and self.graph.label(u, v) == 2

    def link(self, u: int) -> frozenset[int]:
        return self.graph.neighbours[u]

    def star(self, u: int) -> frozenset[int]:
        return self.graph.neighbours[u] | {u}

    def link_of(self, vertices: Iterable[int]) -> frozenset[int]:
        """Vertices outside ``vertices`` adjacent to every vertex of it."""
        vs = set(vertices)
        out = set(range(self.n)) - vs
        for u in vs:
            out &= self.graph.neighbours[u]
        return frozenset(out)

    @cached_property
    def is_graph_product(self) -> bool:
        return all(lab == 2 for lab in self.labels.values())

    @cached_property
    def is_coxeter(self) -> bool:
        return all(s.kind == "cyclic" and s.order == 2 for s in self.specs)

    @cached_property
    def is_dyer(self) -> bool:
        return all(s.kind in ("cyclic", "cyclic-inf") for s in self.specs)

    @cached_property
    def has_opaque(self) -> bool:
        return any(s.is_opaque for s in self.specs)

    def vertex_ids(self, names: Iterable[str]) -> frozenset[int]:
        try:
            return frozenset(self.index[nm] for nm in names)
        except KeyError as exc:
            raise PresentationError(f"unknown vertex {exc.args[0]!r}") from None

    def vertex_names(self, ids: Iterable[int]) -> list[str]:
        return [self.names[i] for i in sorted(ids)]

    def induced(self, vertices: Iterable[int]) -> "PeriagroupPresentation":
        """Sub-presentation on ``vertices`` (declaration order kept)."""
        keep = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(keep)}
        labels = {(pos[u], pos[v]): lab for (u, v), lab in self.labels.items() if u in pos and v in pos}
        return PeriagroupPresentation([self.names[v] for v in keep], [self.specs[v] for v in keep], labels)

    def replace_spec(self, name: str, spec: VertexGroupSpec) -> "PeriagroupPresentation":
        specs = list(self.specs)
        specs[self.index[name]] = spec
        return PeriagroupPresentation(self.names, specs, dict(self.labels))

    def to_text(self) -> str:
        lines = []
        for name, spec in zip(self.names, self.specs):
            if spec.kind == "cyclic":
                lines.append(f"vertex {name} cyclic {spec.order}")
            elif spec.kind == "cyclic-inf":
                lines.append(f"vertex {name} cyclic inf")
            elif spec.kind == "table":
                flat = " ".join(str(x) for row in spec.table for x in row)
                lines.append(f"vertex {name} table {spec.order} {flat}")
            else:
                lines.append(f"vertex {name} opaque acylhyp={spec.acylhyp}")
        for (u, v), lab in sorted(self.labels.items()):
            lines.append(f"edge {self.names[u]} {self.names[v]} {lab}")
        for name, spec in zip(self.names, self.specs):
            default = (1,) if spec.kind in ("cyclic", "cyclic-inf") else tuple(range(1, spec.order or 1))
            if not spec.is_opaque and spec.gens != default:
                lines.extend(f"gen {name} {g}" for g in spec.gens)
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        groups = ", ".join(f"{n}:{s.describe()}" for n, s in zip(self.names, self.specs))
        edges = ", ".join(f"{self.names[u]}-{self.names[v]}:{lab}" for (u, v), lab in sorted(self.labels.items()))
        return f"PeriagroupPresentation([{groups}], [{edges}])"


# -- validation ---------------------------------------------------------

@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


def validate_presentation(p: PeriagroupPresentation) -> list[Check]:
    """Evaluate every presentation invariant; never raises."""
    report = []
    for name, spec in zip(p.names, p.specs):
        if spec.kind == "table":
            problems = check_table(spec.table)
            report.append(Check(f"group-table:{name}", not problems, "; ".join(problems)))
            if problems:
                continue
        if spec.kind == "cyclic":
            ok = spec.order >= 2
            report.append(Check(f"nontrivial:{name}", ok, "" if ok else "cyclic order must be >= 2"))
            if not ok:
                continue
        if spec.kind == "opaque":
            ok = spec.acylhyp in ACYLHYP_FLAGS
            report.append(Check(f"acylhyp-flag:{name}", ok, "" if ok else f"bad flag {spec.acylhyp!r}"))
            continue
        try:
            ok = spec.generates()
            detail = "" if ok else f"gens {spec.gens} do not generate {spec.describe()}"
        except PresentationError as exc:
            ok, detail = False, str(exc)
        report.append(Check(f"generating-set:{name}", ok, detail))
    for (u, v), lab in sorted(p.labels.items()):
        nm = f"{p.names[u]}-{p.names[v]}"
        if lab < 2:
            report.append(Check(f"label:{nm}", False, f"label {lab} < 2"))
            continue
        big = max(p.specs[u].size, p.specs[v].size)
        ok = lab == 2 or big < 3
        detail = "" if ok else (
            f"label {lab} > 2 requires both vertex groups of order 2, "
            f"but max(|G_u|,|G_v|) = {big}"
        )
        report.append(Check(f"compatibility:{nm}", ok, detail))
    return report


# -- parsing ------------------------------------------------------------

def parse_presentation(text: str) -> PeriagroupPresentation:
    """Parse ``.peria`` text and validate it, raising on the first violated invariant."""
    names: list[str] = []
    specs: dict[str, VertexGroupSpec] = {}
    labels: dict[tuple[str, str], int] = {}
    gens: dict[str, list[int]] = {}
    edge_lines: dict[tuple[str, str], int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = line.split()
        if not toks:
            continue
        col = raw.index(toks[0]) + 1

        def fail(msg: str, tok: int = 0) -> None:
            c = raw.find(toks[tok]) + 1 if tok < len(toks) else len(raw) + 1
            raise PeriaSyntaxError(msg, lineno, c)

        head = toks[0]
        if head == "vertex":
            if len(toks) < 3:
                fail("expected: vertex <name> <kind> ...")
            name, kind = toks[1], toks[2]
            if name in specs:
                fail(f"vertex {name!r} declared twice", 1)
            if kind == "cyclic":
                if len(toks) != 4:
                    fail("expected: vertex <name> cyclic <m|inf>")
                if toks[3] == "inf":
                    spec = VertexGroupSpec.cyclic_infinite()
                else:
                    try:
                        m = int(toks[3])
                    except ValueError:
                        fail(f"bad cyclic order {toks[3]!r}", 3)
                    if m < 2:
                        fail("cyclic order must be >= 2", 3)
                    spec = VertexGroupSpec.cyclic(m)
            elif kind == "table":
                try:
                    k = int(toks[3])
                    flat = [int(t) for t in toks[4:]]
                except (ValueError, IndexError):
                    fail("expected: vertex <name> table <k> <k*k indices>", min(3, len(toks) - 1))
                if k < 2 or len(flat) != k * k:
                    fail(f"table of order {k} needs {k * k} entries, got {len(flat)}", 3)
                rows = [flat[i * k:(i + 1) * k] for i in range(k)]
                problems = check_table(rows)
                if problems:
                    raise PresentationError(f"line {lineno}: vertex {name}: not a group table: {problems[0]}")
                spec = VertexGroupSpec.from_table(rows)
            elif kind == "opaque":
                flag = "unknown"
                for t in toks[3:]:
                    if not t.startswith("acylhyp="):
                        fail(f"unexpected token {t!r}", toks.index(t))
                    flag = t.split("=", 1)[1]
                    if flag not in ACYLHYP_FLAGS:
                        fail(f"acylhyp must be one of {ACYLHYP_FLAGS}", toks.index(t))
                spec = VertexGroupSpec.opaque(flag)
            else:
                fail(f"unknown vertex kind {kind!r}", 2)
            names.append(name)
            specs[name] = spec
        elif head == "edge":
            if len(toks) != 4:
                fail("expected: edge <u> <v> <label>")
            u, v = toks[1], toks[2]
            try:
                lab = int(toks[3])
            except ValueError:
                fail(f"bad label {toks[3]!r}", 3)
            if lab < 2:
                fail("edge labels must be >= 2", 3)
            if u == v:
                fail("self-loops are not allowed", 2)
            key = (u, v) if u < v else (v, u)
            if key in edge_lines:
                fail(f"repeated edge {u}-{v}", 1)
            edge_lines[key] = lineno
            labels[(u, v)] = lab
        elif head == "gen":
            if len(toks) != 3:
                fail("expected: gen <vertex> <element>")
            try:
                gens.setdefault(toks[1], []).append(int(toks[2]))
            except ValueError:
                fail(f"bad element {toks[2]!r}", 2)
        else:
            raise PeriaSyntaxError(f"unknown directive {head!r}", lineno, col)

    for (u, v) in labels:
        for w in (u, v):
            if w not in specs:
                raise PresentationError(f"edge mentions undeclared vertex {w!r}")
    for name, gs in gens.items():
        if name not in specs:
            raise PresentationError(f"gen mentions undeclared vertex {name!r}")
        spec = specs[name]
        if spec.is_opaque:
            raise PresentationError(f"opaque vertex {name!r} cannot carry generators")
        if any(spec.normalize(g) == 0 for g in gs):
            raise PresentationError(f"gen for {name!r} must be a nonidentity element")
        specs[name] = VertexGroupSpec(spec.kind, spec.order, spec.table, spec.acylhyp, tuple(gs))

    idx = {nm: i for i, nm in enumerate(names)}
    p = PeriagroupPresentation(names, [specs[nm] for nm in names],
                               {(idx[u], idx[v]): lab for (u, v), lab in labels.items()})
    failures = [c for c in validate_presentation(p) if not c.ok]
    if failures:
        raise PresentationError(f"{failures[0].name}: {failures[0].detail}")
    return p


def load_presentation(path) -> PeriagroupPresentation:
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read())


# -- decompositions -----------------------------------------------------

@dataclass(frozen=True)
class Star2Decomposition:
    factors: tuple[frozenset[int], ...]


def opposite_components(p: PeriagroupPresentation, subset: Iterable[int]) -> list[frozenset[int]]:
    verts = sorted(set(subset))
    seen: set[int] = set()
    comps = []
    for s in verts:
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            for v in verts:
                if v not in seen and not p.commute(u, v):
                    seen.add(v)
                    comp.add(v)
                    stack.append(v)
        comps.append(frozenset(comp))
    comps.sort(key=min)
    return comps


def star2_decomposition(p: PeriagroupPresentation, subset: Iterable[int] | None = None) -> Star2Decomposition:
    """Split into *2-irreducible factors: components of the graph of pairs not joined by a 2-edge."""
    verts = range(p.n) if subset is None else subset
    return Star2Decomposition(tuple(opposite_components(p, verts)))


def gp_cox_decomposition(
    p: PeriagroupPresentation, force_cox: Iterable[int] = ()
) -> tuple[frozenset[int], frozenset[int]]:
    """Return ``(gp_part, cox_part)``.

    The Coxeter part holds the order-2 vertices meeting an edge labelled
    more than 2, plus any ``force_cox`` vertices.
    """
    cox = set()
    for (u, v), lab in p.labels.items():
        if lab > 2:
            cox.update((u, v))
    for u in force_cox:
        spec = p.specs[u]
        if not (spec.is_finite and spec.order == 2):
            raise PresentationError(f"vertex {p.names[u]} cannot be of Coxeter type: group is not of order 2")
        cox.add(u)
    gp = set(range(p.n)) - cox
    for (u, v), lab in p.labels.items():
        if (u in gp or v in gp) and lab != 2:
            raise PresentationError("GP-Cox decomposition violated: edge meeting the GP part has label > 2")
    for u in cox:
        if not (p.specs[u].is_finite and p.specs[u].order == 2):
            raise PresentationError("GP-Cox decomposition violated: Coxeter vertex not of order 2")
    return frozenset(gp), frozenset(cox)
