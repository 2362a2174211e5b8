"""Acceptance criteria 1-10.

Each test records a one-line verdict; the lines are printed in the pytest terminal summary and by
``python tests/test_acceptance.py``.
"""

import itertools
import sys
import time
from pathlib import Path

import networkx as nx
import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from conftest import CORPUS, graph, pres  # noqa: E402

from peria.cayley import FULL, S_MODE, contraction_profile, median_s_mode, explore_ball, skewer_witness, skewer_witnesses  # noqa: E402
from peria.classify import acylindrically_hyperbolic, contracting_exists  # noqa: E402
from peria.coxeter import (  # noqa: E402
    INF,
    CoxeterDiagram,
    classify_irreducible,
    expected_signature,
    gram_signature,
    irreducible_components,
)
from peria.graphcore import check_axioms, compute_hyperplanes, parse_parts, qm_closure, quasi_cubulate  # noqa: E402
from peria.graphcore.hyperplanes import crossing_sequence  # noqa: E402
from peria.graphcore.metrics import delta_distance, random_coherent_metrics, weighted_infimum  # noqa: E402
from peria.graphcore.partitions import closure_checks, hyperplane_partitions  # noqa: E402
from peria.growth import EXACT_GP, SATURATION, asymptotic_diagnostic, conjugacy_growth, series_product, spherical_growth  # noqa: E402,E501
from peria.words import engine, parse_word  # noqa: E402

SEED = 20240601
RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str, started: float) -> None:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} ({time.perf_counter() - started:.1f}s) {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


# -- 1 ---------------------------------------------------------------------------

def test_criterion_01_word_engine_i2_5():
    t = time.perf_counter()
    p = pres("i2_5")
    eng = engine(p)
    ball = explore_ball(p, (), 8, FULL)
    sizes = ball.sphere_sizes()
    elems = ball.words
    idx = {w: i for i, w in enumerate(elems)}
    table = np.array([[idx[eng.multiply(a, b)] for b in elems] for a in elems])
    e = idx[()]
    assoc = sum(table[table[a, b], c] == table[a, table[b, c]] for a, b, c in itertools.product(range(10), repeat=3))
    identity = all(table[e, a] == a == table[a, e] for a in range(10))
    inverses = all((table[a] == e).sum() == 1 and (table[:, a] == e).sum() == 1 for a in range(10))
    latin = all(sorted(row) == list(range(10)) for row in table)
    ok = len(elems) == 10 and sizes[6:] == [0, 0, 0] and assoc == 1000 and identity and inverses and latin
    record(1, ok, f"|ball|={len(elems)} spheres={sizes} associative triples={assoc}/1000", t)


# -- 2 ---------------------------------------------------------------------------

def test_criterion_02_geodesic_laws():
    t = time.perf_counter()
    names = ["dinf", "i2_5", "c4_racg", "pentagon_racg", "ex-periagroup-z6"]
    bad, total = 0, 0
    for name in names:
        p = pres(name)
        eng = engine(p)
        full = explore_ball(p, (), 4, FULL)
        for w, lev in zip(full.words, full.level.tolist()):
            total += 1
            bad += len(eng.reduce(w)) != lev
        s = explore_ball(p, (), 4, S_MODE)
        for w, lev in zip(s.words, s.level.tolist()):
            total += 1
            bad += eng.length_S(w) != lev
    record(2, bad == 0, f"{total} elements over {len(names)} presentations, {bad} mismatches", t)


# -- 3 ---------------------------------------------------------------------------

def test_criterion_03_graph_recognizers():
    t = time.perf_counter()
    c6, wheel, house, k23 = (check_axioms(graph(n)) for n in ("cycle6", "wheel", "house", "k23"))
    cubes = [check_axioms(graph(n)) for n in ("q2", "q3")]
    checks = {
        "C6 mediangle and not quasimedian": c6.mediangle and not c6.quasimedian,
        "wheel paraclique and not mediangle": wheel.paraclique and not wheel.mediangle,
        "house not paraclique": not house.paraclique,
        "K23 parallelism not transitive": not k23.conditions["parallelism_transitive"].ok,
        "Q2 Q3 pass everything": all(r.paraclique and r.mediangle and r.quasimedian for r in cubes),
    }
    failed = [k for k, v in checks.items() if not v]
    record(3, not failed, "all stated examples reproduced" if not failed else f"failed: {failed}", t)


# -- 4 ---------------------------------------------------------------------------

def test_criterion_04_quasi_cubulation():
    t = time.perf_counter()
    k3 = quasi_cubulate(parse_parts((CORPUS / "three_sectors.parts").read_text())).graph
    is_k3 = k3.n == 3 and len(k3.edges) == 3
    notes = [f"K3={is_k3}"]
    ok = is_k3
    for name in ("cycle6", "wheel"):
        g = graph(name)
        qc = quasi_cubulate(hyperplane_partitions(g))
        emb = qc.principal
        axioms = check_axioms(qc.graph).quasimedian
        dist_eq = bool(np.array_equal(qc.graph.dist[np.ix_(emb, emb)], g.dist))
        props = closure_checks(g, qc.graph, emb)
        closure = qm_closure(g)
        good = axioms and dist_eq and all(props.values()) and closure.graph.n == qc.graph.n
        ok &= good
        notes.append(f"{name}: |M|={qc.graph.n} quasimedian={axioms} isometric={dist_eq} (i)-(iv)={all(props.values())}")
    record(4, ok, "; ".join(notes), t)


# -- 5 ---------------------------------------------------------------------------

def test_criterion_05_hyperplane_metric_law():
    t = time.perf_counter()
    rng = np.random.default_rng(SEED)
    pool = [graph(n) for n in ("cycle6", "cycle8", "wheel", "q2", "q3", "k3", "k3xk2")]
    pool += [explore_ball(pres("i2_5"), (), 5).graph, explore_ball(pres("z2_x_z3"), (), 2).graph,
             explore_ball(pres("s3_table"), (), 1).graph]
    structures = [compute_hyperplanes(g) for g in pool]
    bad = 0
    for k in range(200):
        i = int(rng.integers(len(pool)))
        g, hs = pool[i], structures[i]
        cm = random_coherent_metrics(hs, rng)
        inf = weighted_infimum(g, cm)
        x, y = (int(v) for v in rng.integers(g.n, size=2))
        try:
            res = delta_distance(g, cm, x, y, inf)
            bad += not res.consistent
        except Exception:
            bad += 1
    record(5, bad == 0, f"200 random weighted instances, {bad} inconsistent", t)


# -- 6 ---------------------------------------------------------------------------

def _diagrams():
    labels = [2, 3, 4, 5, 6, INF]
    for n in range(1, 5):
        pairs = list(itertools.combinations(range(n), 2))
        for assign in itertools.product(labels, repeat=len(pairs)):
            yield CoxeterDiagram(n, dict(zip(pairs, assign)))
    big = [3, 4, 5, 6, INF]
    for n in (5, 6):
        shapes = [sorted(tr.edges()) for tr in nx.nonisomorphic_trees(n)]
        shapes.append([(i, (i + 1) % n) for i in range(n)])
        for edges in shapes:
            for assign in itertools.product(big, repeat=len(edges)):
                yield CoxeterDiagram(n, dict(zip(edges, assign)))
    rng = np.random.default_rng(SEED)
    for _ in range(3000):
        n = int(rng.integers(5, 7))
        pairs = list(itertools.combinations(range(n), 2))
        yield CoxeterDiagram(n, {pq: labels[int(rng.integers(len(labels)))] for pq in pairs})


def test_criterion_06_coxeter_classification():
    t = time.perf_counter()
    total = bad = 0
    for d in _diagrams():
        if len(irreducible_components(d)) != 1:
            continue
        total += 1
        if gram_signature(d) != expected_signature(classify_irreducible(d)):
            bad += 1
    record(6, bad == 0 and total > 1000, f"{total} irreducible diagrams, {bad} disagreements", t)


# -- 7 ---------------------------------------------------------------------------

TRUTH = {
    "dinf": ("yes", "no"),
    "pentagon_racg": ("yes", "yes"),
    "c4_racg": ("no", "no"),
    "raag_path": ("no", "no"),
    "affine_a2": ("no", "no"),
    "ex-periagroup": ("yes", "yes"),
    "z2_free_z3": ("yes", "yes"),
}


def test_criterion_07_truth_table():
    t = time.perf_counter()
    wrong = []
    for name, want in TRUTH.items():
        p = pres(name)
        got = (contracting_exists(p).verdict, acylindrically_hyperbolic(p).verdict)
        if got != want:
            wrong.append(f"{name}: {got} != {want}")
    record(7, not wrong, f"{2 * len(TRUTH) - 2 * len(wrong)}/14 verdicts" + (f" {wrong}" if wrong else ""), t)


# -- 8 ---------------------------------------------------------------------------

def test_criterion_08_conjugacy_growth():
    t = time.perf_counter()
    notes, ok = [], True
    s3, _ = conjugacy_growth(pres("i2_3"), 2)
    ok &= s3.coefficients == [1, 1, 1]
    notes.append(f"S3 {s3.coefficients}")
    z, tz = conjugacy_growth(pres("z"), 20)
    ok &= z.coefficients[1:] == [2] * 20 and tz.stable
    notes.append("Z c(n)=2" if z.coefficients[1:] == [2] * 20 else f"Z {z.coefficients}")
    cz2 = series_product(z, z).coefficients[:13]
    direct, tz2 = conjugacy_growth(pres("z2"), 12)
    ok &= cz2 == direct.coefficients and tz2.stable
    notes.append(f"Z2 product==direct: {cz2 == direct.coefficients}")
    f2 = pres("f2")
    exact, _ = conjugacy_growth(f2, 8, EXACT_GP)
    sat, table = conjugacy_growth(f2, 8, SATURATION, 2)
    ok &= exact.coefficients == sat.coefficients and table.stable
    notes.append(f"F2 exact==saturation(stable={table.stable}) {exact.coefficients}")
    longer, _ = conjugacy_growth(f2, 10, EXACT_GP)
    diag = asymptotic_diagnostic(longer, 3.0, 3, 10)
    ok &= diag.band is not None and diag.band <= 5
    notes.append(f"band max/min={diag.band:.3f}")
    record(8, ok, "; ".join(notes), t)


# -- 9 ---------------------------------------------------------------------------

def test_criterion_09_contraction_diagnostics():
    t = time.perf_counter()
    f2, z2 = pres("f2"), pres("z2")
    g = parse_word(f2, "a b")
    prof = contraction_profile(f2, g, 6)
    free_diam = [r.max_projection_diameter for r in prof.rows]
    free_ok = all(x <= 2 for x in free_diam) and [r.radius for r in prof.rows] == list(range(1, 7))
    witness = None
    for r in range(1, 6):
        rep = skewer_witness(f2, g, r)
        if rep.witness is not None and rep.witness.L == 0:
            witness = (r, rep.witness.power)
            break
    h = parse_word(z2, "a b")
    prof = contraction_profile(z2, h, 6)
    flat = [(r.radius, r.max_projection_diameter) for r in prof.rows]
    flat_ok = all(d >= r - 1 for r, d in flat)
    separated = [r for r in range(1, 6) if any(w.stable for w in skewer_witnesses(z2, h, r))]
    ok = free_ok and witness is not None and flat_ok and not separated
    record(9, ok, f"Z*Z diam={free_diam} witness(r,power)={witness}; ZxZ (r,diam)={flat} "
                  f"well-separated at r={separated or 'none'}", t)


# -- 10 --------------------------------------------------------------------------

def _para_geodesic_cases(rng) -> tuple[int, int]:
    pool = [graph(n) for n in ("cycle6", "cycle8", "wheel", "q2", "q3", "k3", "k3xk2")]
    pool += [explore_ball(pres(n), (), 6).graph for n in ("i2_5", "i2_3", "z2_x_z3")]
    pool.append(explore_ball(pres("s3_table"), (), 1).graph)
    cases = bad = 0
    for g in pool:
        hs = compute_hyperplanes(g)
        adj = [sorted(a) for a in g.adj]
        d = g.dist
        for _ in range(1200):
            x = int(rng.integers(g.n))
            walk = [x]
            for _ in range(int(rng.integers(1, int(d.max()) + 3))):
                nb = adj[walk[-1]]
                walk.append(nb[int(rng.integers(len(nb)))])
            seq = crossing_sequence(hs, walk)
            geodesic = d[walk[0], walk[-1]] == len(walk) - 1
            cases += 1
            bad += geodesic != (len(set(seq)) == len(seq))
    return cases, bad


def _gp_balls():
    return [explore_ball(pres("c4_racg"), (), 4), explore_ball(pres("pentagon_racg"), (), 4),
            explore_ball(pres("z2_free_z3"), (), 5), explore_ball(pres("z2_x_z3"), (), 3),
            explore_ball(pres("raag_path"), (), 2, FULL, exponent_cap=2), explore_ball(pres("f2"), (), 4, S_MODE),
            explore_ball(pres("z6"), (), 2)]


def _clique_coset_cases(balls) -> tuple[int, int]:
    cases = bad = 0
    for b in balls:
        eng = b.engine
        p = b.p
        for clique in b.graph.cliques:
            cases += 1
            base = clique[0]
            rel = [b.relative(base, y) for y in clique[1:]]
            labels = {w[0][0] for w in rel if len(w) == 1}
            if not (all(len(w) == 1 for w in rel) and len(labels) == 1):
                bad += 1
                continue
            (u,) = labels
            spec = p.specs[u]
            coset = None
            if spec.kind == "cyclic":
                coset = {eng.canonical(b.words[base] + ((u, e),)) for e in range(1, spec.order)} | {b.words[base]}
            if coset is not None and all(w in b.index for w in coset):
                bad += {b.words[i] for i in clique} != coset
    return cases, bad


def _label_cases(balls) -> tuple[int, int]:
    cases = bad = 0
    for b in balls:
        if b.exponent_cap is not None or (b.mode == S_MODE and not median_s_mode(b.p)):
            continue
        hs = b.hyperplanes()
        lab = [{b.edge_label(u, v) for u, v in hs.edges(j)} for j in range(hs.count)]
        for j in range(hs.count):
            cases += 1
            bad += len(lab[j]) != 1
            for k in np.flatnonzero(hs.transverse_row(j)).tolist():
                if k > j:
                    cases += 1
                    (u,), (v,) = lab[j], lab[k]
                    bad += not b.p.commute(u, v)
    return cases, bad


def _growth_cases() -> tuple[int, int, int, int]:
    mono = mono_bad = bound = bound_bad = 0
    for name, N in [("i2_5", 6), ("i2_3", 4), ("mixed_s3_z3", 5), ("s3_table", 3), ("ex-periagroup-z6", 4),
                    ("f2", 5), ("z2", 8), ("pentagon_racg", 5), ("c4_racg", 6), ("z2_free_z3", 7), ("affine_a2", 5),
                    ("raag_path", 4), ("z_x_z2", 8), ("dinf", 8)]:
        p = pres(name)
        sph = spherical_growth(p, N, S_MODE).coefficients
        prev = None
        for k in range(4):
            s, _ = conjugacy_growth(p, N, SATURATION, k)
            c = s.coefficients
            for n in range(N + 1):
                bound += 2
                bound_bad += c[n] > sph[n]
                bound_bad += sum(c[: n + 1]) > sum(sph[: n + 1])
                if prev is not None:
                    mono += 1
                    mono_bad += c[n] > prev[n]
            prev = c
    return mono, mono_bad, bound, bound_bad


def test_criterion_10_invariant_suites():
    t = time.perf_counter()
    rng = np.random.default_rng(SEED)
    geo, geo_bad = _para_geodesic_cases(rng)
    balls = _gp_balls()
    cl, cl_bad = _clique_coset_cases(balls)
    lb, lb_bad = _label_cases(balls)
    mono, mono_bad, bound, bound_bad = _growth_cases()
    total = geo + cl + lb + mono + bound
    bad = geo_bad + cl_bad + lb_bad + mono_bad + bound_bad
    record(10, bad == 0 and total >= 10_000,
           f"{total} cases (crossing {geo}, clique-coset {cl}, labels {lb}, monotone {mono}, c<=s {bound}), "
           f"{bad} violations", t)


def main() -> int:
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    failures = 0
    for fn in tests:
        try:
            fn()
        except AssertionError:
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
