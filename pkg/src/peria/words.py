"""Syllable words over a periagroup presentation.

A syllable is a pair ``(vertex, element)`` with ``element`` a nonidentity
element of the vertex group; a word is a tuple of syllables. All
functions return plain tuples so results can be hashed and compared.
Canonical forms are the lexicographically least member of the class of
reduced words related by dihedral moves (commutations when the label is 2).
"""

from __future__ import annotations

import re
from collections import deque
from typing import Iterable, Iterator, Sequence

from peria.errors import PresentationError, ResourceBoundError, WordError
from peria.presentation import PeriagroupPresentation

Syllable = tuple[int, int]
Word = tuple[Syllable, ...]

DEFAULT_CLASS_BOUND = 10**6

_TOKEN = re.compile(r"^([^\s^:]+)(?:\^(-?\d+)|:(\d+))?$")


class WordEngine:
    """Memoized word arithmetic for one presentation."""

    def __init__(self, p: PeriagroupPresentation, bound: int = DEFAULT_CLASS_BOUND):
        self.p = p
        self.bound = bound
        self.gp = p.is_graph_product
        self._commute = [[p.commute(u, v) for v in range(p.n)] for u in range(p.n)]
        self._label = [[p.label(u, v) or 0 for v in range(p.n)] for u in range(p.n)]
        self._class_cache: dict[Word, frozenset[Word]] = {}
        self._canon_cache: dict[Word, Word] = {}
        self._norm = [None if spec.is_opaque else _normalizer(spec) for spec in p.specs]
        self._slen: dict[Syllable, int] = {}

    # -- syllable helpers ---------------------------------------------
    def check_word(self, w: Iterable[Syllable]) -> Word:
        out = []
        n = self.p.n
        norm = self._norm
        for v, e in w:
            if not 0 <= v < n:
                raise WordError(f"vertex index {v} out of range")
            f = norm[v]
            if f is None:
                raise WordError(f"vertex {self.p.names[v]} is opaque: no element-level operations")
            e = f(e)
            if e != 0:
                out.append((v, e))
        return tuple(out)

    # -- moves ----------------------------------------------------------
    def moves(self, w: Word) -> Iterator[Word]:
        """Words obtained from ``w`` by one dihedral move."""
        n = len(w)
        for i in range(n - 1):
            u, v = w[i][0], w[i + 1][0]
            lab = self._label[u][v]
            if lab == 2:
                yield w[:i] + (w[i + 1], w[i]) + w[i + 2:]
            elif lab > 2 and i + lab <= n:
                ok = True
                for j in range(i + 2, i + lab):
                    if w[j][0] != (u if (j - i) % 2 == 0 else v):
                        ok = False
                        break
                if ok:
                    swapped = tuple(w[i + 1] if (j % 2 == 0) else w[i] for j in range(lab))
                    yield w[:i] + swapped + w[i + lab:]

    def move_class(self, w: Word) -> frozenset[Word]:
        """All words reachable from ``w`` by dihedral moves (memoized)."""
        hit = self._class_cache.get(w)
        if hit is not None:
            return hit
        seen = {w}
        queue = deque([w])
        while queue:
            x = queue.popleft()
            for y in self.moves(x):
                if y not in seen:
                    seen.add(y)
                    if len(seen) > self.bound:
                        raise ResourceBoundError("move-class size", self.bound)
                    queue.append(y)
        cls = frozenset(seen)
        if len(self._class_cache) > 200_000:
            self._class_cache.clear()
        for x in cls if len(cls) < 64 else (w,):
            self._class_cache[x] = cls
        return cls

    # -- reduction ------------------------------------------------------
    def _append(self, w: Word, s: Syllable) -> Word:
        """Reduced form of ``w * s`` for reduced ``w``."""
        v, e = s
        spec = self.p.specs[v]
        if self.gp:
            for i in range(len(w) - 1, -1, -1):
                u = w[i][0]
                if u == v:
                    f = spec.mul(w[i][1], e)
                    if f == 0:
                        return w[:i] + w[i + 1:]
                    return w[:i] + ((v, f),) + w[i + 1:]
                if not self._commute[u][v]:
                    break
            return w + (s,)
        if w and self._label[w[-1][0]][v] == 0 and w[-1][0] != v:
            return w + (s,)
        for m in self.move_class(w):
            if m and m[-1][0] == v:
                f = spec.mul(m[-1][1], e)
                if f == 0:
                    return m[:-1]
                return m[:-1] + ((v, f),)
        return w + (s,)

    def reduce(self, w: Iterable[Syllable]) -> Word:
        out: Word = ()
        for s in self.check_word(w):
            out = self._append(out, s)
        return out

    def canonical(self, w: Iterable[Syllable]) -> Word:
        return self.canonical_of_reduced(self.reduce(w))

    def append_canonical(self, w: Word, s: Syllable) -> Word:
        """Canonical form of ``w * s`` for canonical ``w``."""
        r = self._append(w, s)
        if not self.gp or len(r) != len(w) + 1 or r[-1] is not s:
            return self.canonical_of_reduced(r)
        # s slides left through the commuting suffix and stops before the first larger syllable
        com = self._commute[s[0]]
        n = p = len(w)
        while p > 0 and com[w[p - 1][0]]:
            p -= 1
        q = p
        while q < n and not s < w[q]:
            q += 1
        return w[:q] + (s,) + w[q:]

    def canonical_of_reduced(self, w: Word) -> Word:
        hit = self._canon_cache.get(w)
        if hit is not None:
            return hit
        if self.gp:
            c = self._trace_normal_form(w)
        else:
            c = min(self.move_class(w))
        if len(self._canon_cache) > 500_000:
            self._canon_cache.clear()
        self._canon_cache[w] = c
        return c

    def _trace_normal_form(self, w: Word) -> Word:
        # Greedy: repeatedly take the least syllable that commutes past everything before it.
        rest = list(w)
        out = []
        com = self._commute
        while rest:
            best = None
            for i, s in enumerate(rest):
                if best is not None and s >= rest[best]:
                    continue
                if all(com[rest[j][0]][s[0]] for j in range(i)):
                    best = i
            out.append(rest.pop(best))
        return tuple(out)

    def canonical_by_closure(self, w: Iterable[Syllable]) -> Word:
        """Lex-least member of the full move class (no graph-product shortcut)."""
        return min(self.move_class(self.reduce(w)))

    # -- group operations ---------------------------------------------
    def invert(self, w: Iterable[Syllable]) -> Word:
        w = self.check_word(w)
        return self.canonical(tuple((v, self.p.specs[v].inv(e)) for v, e in reversed(w)))

    def multiply(self, a: Iterable[Syllable], b: Iterable[Syllable]) -> Word:
        return self.canonical(tuple(a) + tuple(b))

    def length_S(self, w: Iterable[Syllable]) -> int:
        memo = self._slen
        total = 0
        for s in self.reduce(w):
            k = memo.get(s)
            if k is None:
                k = memo[s] = self.p.specs[s[0]].s_length(s[1])
            total += k
        return total

    # -- cyclic reduction ---------------------------------------------
    def _rotations(self, w: Word) -> Iterator[Word]:
        """Reduced forms of ``s^-1 w s`` for every syllable ``s`` that some move-equivalent word starts with."""
        if self.gp:
            starts = []
            for i, (v, e) in enumerate(w):
                if all(self._commute[w[j][0]][v] for j in range(i)):
                    starts.append(i)
            for i in starts:
                rest = w[:i] + w[i + 1:]
                yield self._append(rest, w[i])
        else:
            firsts = {}
            for m in self.move_class(w):
                if m and m[0] not in firsts:
                    firsts[m[0]] = m[1:]
            for s, rest in firsts.items():
                yield self._append(rest, s)

    def cyclic_reduce(self, w: Iterable[Syllable]) -> tuple[Word, frozenset[int]]:
        """Cyclically reduced conjugate (lex-least over its rotation class) and its support."""
        cur = self.canonical(w)
        while True:
            n = len(cur)
            seen = {cur}
            queue = deque([cur])
            shorter = None
            while queue and shorter is None:
                x = queue.popleft()
                for y in self._rotations(x):
                    if len(y) < n:
                        shorter = y
                        break
                    c = self.canonical_of_reduced(y)
                    if c not in seen:
                        seen.add(c)
                        if len(seen) > self.bound:
                            raise ResourceBoundError("cyclic-class size", self.bound)
                        queue.append(c)
            if shorter is None:
                rep = min(seen)
                return rep, frozenset(v for v, _ in rep)
            cur = self.canonical_of_reduced(shorter)

    def cyclic_class(self, w: Word) -> frozenset[Word]:
        """Canonical forms reachable from a cyclically reduced ``w`` by length-preserving rotations."""
        cur = self.canonical(w)
        seen = {cur}
        queue = deque([cur])
        while queue:
            x = queue.popleft()
            for y in self._rotations(x):
                if len(y) < len(cur):
                    raise WordError("word is not cyclically reduced")
                c = self.canonical_of_reduced(y)
                if c not in seen:
                    seen.add(c)
                    queue.append(c)
        return frozenset(seen)


def _normalizer(spec):
    if spec.kind == "cyclic":
        m = spec.order
        return lambda e: e % m
    return spec.normalize


def engine(p: PeriagroupPresentation, bound: int = DEFAULT_CLASS_BOUND) -> WordEngine:
    """Shared engine for ``p`` (one per presentation and bound)."""
    key = ("engine", bound)
    eng = p._cache.get(key)
    if eng is None:
        eng = p._cache[key] = WordEngine(p, bound)
    return eng


# -- functional API ----------------------------------------------------

def graphically_reduce(p: PeriagroupPresentation, w: Sequence[Syllable]) -> Word:
    return engine(p).reduce(w)


def canonical_form(p: PeriagroupPresentation, w: Sequence[Syllable], bound: int = DEFAULT_CLASS_BOUND) -> Word:
    return engine(p, bound).canonical(w)


def multiply(p: PeriagroupPresentation, u: Sequence[Syllable], v: Sequence[Syllable]) -> Word:
    return engine(p).multiply(u, v)


def invert(p: PeriagroupPresentation, u: Sequence[Syllable]) -> Word:
    return engine(p).invert(u)


def word_length_S(p: PeriagroupPresentation, w: Sequence[Syllable]) -> int:
    return engine(p).length_S(w)


def cyclic_reduce_and_support(p: PeriagroupPresentation, w: Sequence[Syllable]) -> tuple[Word, frozenset[int]]:
    return engine(p).cyclic_reduce(w)


def equal(p: PeriagroupPresentation, u: Sequence[Syllable], v: Sequence[Syllable]) -> bool:
    eng = engine(p)
    return eng.canonical(u) == eng.canonical(v)


# -- text ----------------------------------------------------------------

def parse_word(p: PeriagroupPresentation, text: str) -> Word:
    """Parse ``vertex[^exp]`` / ``vertex:idx`` tokens; ``1`` or empty text is the identity."""
    out = []
    for tok in text.replace(",", " ").split():
        if tok == "1":
            continue
        m = _TOKEN.match(tok)
        if not m:
            raise WordError(f"malformed syllable {tok!r}")
        name, exp, idx = m.groups()
        if name not in p.index:
            raise WordError(f"unknown vertex {name!r} in syllable {tok!r}")
        v = p.index[name]
        spec = p.specs[v]
        if spec.is_opaque:
            raise WordError(f"vertex {name} is opaque: no element-level operations")
        if idx is not None:
            if spec.kind != "table":
                raise WordError(f"{tok!r}: index syntax is for table vertex groups")
            e = int(idx)
        else:
            if spec.kind == "table":
                if exp is not None:
                    raise WordError(f"{tok!r}: table vertex groups use vertex:idx")
                e = spec.gens[0]
            else:
                e = 1 if exp is None else int(exp)
        try:
            e = spec.normalize(e)
        except PresentationError as exc:
            raise WordError(str(exc)) from None
        if e != 0:
            out.append((v, e))
    return tuple(out)


def format_word(p: PeriagroupPresentation, w: Sequence[Syllable]) -> str:
    if not w:
        return "1"
    toks = []
    for v, e in w:
        name = p.names[v]
        if p.specs[v].kind == "table":
            toks.append(f"{name}:{e}")
        elif e == 1:
            toks.append(name)
        else:
            toks.append(f"{name}^{e}")
    return " ".join(toks)


def support(w: Sequence[Syllable]) -> frozenset[int]:
    return frozenset(v for v, _ in w)
