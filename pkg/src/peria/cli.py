"""Command-line frontend.

Every command prints one report document.  ``--json`` (the default) gives a JSON object with the keys
``command``, ``inputs``, ``results``, ``certification`` and ``warnings``; ``--tsv`` flattens ``results`` into
``key<TAB>value`` lines.  Exit status: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Sequence

from peria import cayley, classify, coxeter, growth
from peria.errors import PeriaError
from peria.graphcore.axioms import check_axioms
from peria.graphcore.graphs import load_graph
from peria.graphcore.partitions import PartitionSpace, parse_parts, qm_closure, quasi_cubulate
from peria.presentation import (
    gp_cox_decomposition,
    load_presentation,
    star2_decomposition,
    validate_presentation,
)
from peria.words import engine, format_word, parse_word

DEFAULT_SEED = 0


class UsageError(Exception):
    pass


# -- inputs ---------------------------------------------------------------------

def resolve_path(name: str) -> Path:
    """A file path, falling back to the bundled corpus by file name (with or without extension)."""
    p = Path(name)
    if p.exists():
        return p
    corpus = resources.files("peria") / "corpus"
    for cand in (p.name, p.name + ".peria", p.name + ".graph", p.name + ".parts", p.name + ".cox"):
        f = corpus / cand
        if f.is_file():
            return Path(str(f))
    raise UsageError(f"no such file: {name}")


def corpus_files() -> list[str]:
    corpus = resources.files("peria") / "corpus"
    return sorted(f.name for f in corpus.iterdir() if f.is_file())


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()[:16]


class Context:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.inputs: dict[str, str] = {}
        self.cert: dict[str, Any] = {}
        self.warnings: list[str] = []

    def path(self, name: str) -> Path:
        p = resolve_path(name)
        self.inputs[str(name)] = _digest(p)
        return p

    def presentation(self):
        return load_presentation(self.path(self.args.file))

    def vertices(self, p, text: str | None) -> frozenset[int]:
        if not text:
            return frozenset()
        return p.vertex_ids(t for t in text.replace(",", " ").split())


def _word_json(p, w) -> str:
    return format_word(p, w)


def _num(x: float):
    return "inf" if isinstance(x, float) and math.isinf(x) else x


# -- commands --------------------------------------------------------------------

def cmd_check(ctx: Context) -> dict:
    p = ctx.presentation()
    checks = validate_presentation(p)
    gp, cox = gp_cox_decomposition(p, ctx.vertices(p, ctx.args.force_cox))
    out = {
        "valid": all(c.ok for c in checks),
        "checks": {c.name: {"ok": c.ok, "detail": c.detail} for c in checks},
        "vertices": list(p.names),
        "graph_product": p.is_graph_product,
        "coxeter": p.is_coxeter,
        "dyer": p.is_dyer,
        "star2_factors": [p.vertex_names(sorted(f)) for f in star2_decomposition(p).factors],
        "gp_part": p.vertex_names(sorted(gp)),
        "coxeter_part": p.vertex_names(sorted(cox)),
    }
    if not out["valid"]:
        raise PeriaError("; ".join(f"{c.name}: {c.detail}" for c in checks if not c.ok))
    return out


def cmd_nf(ctx: Context) -> dict:
    p = ctx.presentation()
    eng = engine(p)
    w = parse_word(p, ctx.args.word)
    return {"input": format_word(p, w), "reduced": format_word(p, eng.reduce(w)),
            "normal_form": format_word(p, eng.canonical(w))}


def cmd_eq(ctx: Context) -> dict:
    p = ctx.presentation()
    eng = engine(p)
    u, v = parse_word(p, ctx.args.word), parse_word(p, ctx.args.word2)
    cu, cv = eng.canonical(u), eng.canonical(v)
    return {"equal": cu == cv, "normal_forms": [format_word(p, cu), format_word(p, cv)]}


def cmd_len(ctx: Context) -> dict:
    p = ctx.presentation()
    eng = engine(p)
    w = eng.canonical(parse_word(p, ctx.args.word))
    return {"normal_form": format_word(p, w), "syllable_length": len(w), "length_S": eng.length_S(w)}


def _ball(ctx: Context, p, center=()):
    a = ctx.args
    cap = getattr(a, "exponent_cap", None)
    ctx.cert.update(radius=a.radius, gens=a.gens, bound=a.bound, exponent_cap=cap)
    return cayley.explore_ball(p, center, a.radius, a.gens, exponent_cap=cap, bound=a.bound)


def cmd_ball(ctx: Context) -> dict:
    p = ctx.presentation()
    center = parse_word(p, ctx.args.word) if ctx.args.word else ()
    b = _ball(ctx, p, center)
    out = {"center": format_word(p, b.center), "size": len(b), "sphere_sizes": b.sphere_sizes(),
           "saturated": b.sphere_sizes()[-1] == 0 if b.radius else len(b) == 1}
    if ctx.args.tsv:
        out["vertices"] = b.vertex_table()
    return out


def cmd_hyperplanes(ctx: Context) -> dict:
    p = ctx.presentation()
    b = _ball(ctx, p)
    hs = b.hyperplanes()
    rows = []
    for j in range(hs.count):
        row = {"id": j, "sectors": hs.sector_count(j), "edges": len(hs.edges(j))}
        if b.full:
            t = cayley.hyperplane_type_and_label(b, j)
            row.update(labels=list(t.labels), right=t.right, carrier_in_star_coset=t.carrier_in_star_coset)
        rows.append(row)
    return {"ball_size": len(b), "count": hs.count, "hyperplanes": rows}


def cmd_classify_group(ctx: Context) -> dict:
    p = ctx.presentation()
    fc = ctx.vertices(p, ctx.args.force_cox)
    fin = classify.is_finite(p)
    ce = classify.contracting_exists(p, fc)
    ah = classify.acylindrically_hyperbolic(p)
    return {"finite": fin.as_dict(), "contracting": ce.as_dict(), "acylhyp": ah.as_dict(),
            "verdicts": {"finite": fin.verdict, "contracting": ce.verdict, "acylhyp": ah.verdict}}


def cmd_classify_element(ctx: Context) -> dict:
    p = ctx.presentation()
    g = parse_word(p, ctx.args.word)
    rep = classify.element_contracting_gp(p, g)
    w, sup = classify.essential_support(p, g)
    return {"element": format_word(p, engine(p).canonical(g)), "cyclic_reduction": format_word(p, w),
            "essential_support": p.vertex_names(sorted(sup)), "contracting": rep.as_dict()}


def cmd_morse(ctx: Context) -> dict:
    p = ctx.presentation()
    g = parse_word(p, ctx.args.word)
    rep = classify.element_morse_gp(p, g)
    return {"element": format_word(p, engine(p).canonical(g)), "morse": rep.as_dict()}


def cmd_growth(ctx: Context) -> dict:
    p = ctx.presentation()
    a = ctx.args
    ctx.cert.update(max_n=a.max_n, gens=a.gens)
    s = growth.spherical_growth(p, a.max_n, a.gens)
    rate = growth.estimate_growth_rate(s)
    return {"series": s.to_line(), "coefficients": s.coefficients,
            "rate": {"estimate": round(rate.estimate, 6), "low": round(rate.low, 6), "high": round(rate.high, 6)}}


def cmd_conj_growth(ctx: Context) -> dict:
    p = ctx.presentation()
    a = ctx.args
    ctx.cert.update(max_n=a.max_n, method=a.method, slack=a.slack if a.method == growth.SATURATION else None)
    s, table = growth.conjugacy_growth(p, a.max_n, a.method, a.slack)
    out = {"series": s.to_line(), "coefficients": s.coefficients, "method": table.method}
    if table.method == growth.SATURATION:
        out["stable"] = table.stable
        if not table.stable:
            ctx.warnings.append(f"saturation unstable between slack {a.slack} and {a.slack + 1}")
    if a.representatives:
        out["representatives"] = growth.format_classes(p, table)
    if a.alpha:
        d = growth.asymptotic_diagnostic(s, a.alpha)
        out["asymptotics"] = {"applicable": d.applicable, "low": d.low, "high": d.high, "band": d.band,
                              "ratios": [[n, round(r, 6)] for n, r in d.ratios]}
    tv = growth.transcendence_verdict(p) if a.verdict else None
    if tv is not None:
        out["transcendence"] = tv.as_dict()
    return out


def _series_arg(ctx: Context, text: str) -> growth.GrowthSeries:
    if all(ch.isdigit() or ch in ", " for ch in text) and any(ch.isdigit() for ch in text):
        return growth.GrowthSeries([int(x) for x in text.replace(",", " ").split()])
    path = ctx.path(text)
    if path.suffix == ".peria":
        a = ctx.args
        s, table = growth.conjugacy_growth(load_presentation(path), a.max_n, a.method, a.slack)
        if table.stable is False:
            ctx.warnings.append(f"{text}: saturation unstable")
        return s
    return growth.GrowthSeries([int(x) for x in path.read_text().replace(",", " ").split()])


def cmd_series_product(ctx: Context) -> dict:
    a, b = _series_arg(ctx, ctx.args.file), _series_arg(ctx, ctx.args.file2)
    s = growth.series_product(a, b)
    return {"series": s.to_line(), "coefficients": s.coefficients}


def cmd_graph_check(ctx: Context) -> dict:
    g = load_graph(ctx.path(ctx.args.file))
    ctx.cert.update(bound=ctx.args.bound)
    rep = check_axioms(g) if ctx.args.bound is None else check_axioms(g, ctx.args.bound)
    return {"vertices": g.n, "edges": len(g.edges), **rep.as_dict()}


def cmd_qm_closure(ctx: Context) -> dict:
    g = load_graph(ctx.path(ctx.args.file))
    qc = qm_closure(g)
    return {"vertices": qc.graph.n, "edges": [list(e) for e in qc.graph.edges], "embedding": qc.embedding,
            "checks": qc.checks}


def cmd_quasi_cubulate(ctx: Context) -> dict:
    ps: PartitionSpace = parse_parts(ctx.path(ctx.args.file).read_text())
    qc = quasi_cubulate(ps)
    rep = check_axioms(qc.graph)
    return {"vertices": qc.graph.n, "edges": [list(e) for e in qc.graph.edges], "principal": qc.principal,
            "hyperplane_of_partition": qc.hyperplane_of_partition, "quasimedian": rep.quasimedian}


def cmd_contraction_profile(ctx: Context) -> dict:
    p = ctx.presentation()
    a = ctx.args
    g = parse_word(p, a.word)
    ctx.cert.update(radius=a.radius, seed=a.seed)
    prof = cayley.contraction_profile(p, g, a.radius, seed=a.seed)
    return {"element": format_word(p, engine(p).canonical(g)), "bounded_orbit": prof.bounded_orbit,
            "orbit_range": prof.orbit_range,
            "rows": [{"radius": r.radius, "centers": r.centers, "max_projection_diameter": r.max_projection_diameter}
                     for r in prof.rows]}


def cmd_skewer_witness(ctx: Context) -> dict:
    p = ctx.presentation()
    a = ctx.args
    g = parse_word(p, a.word)
    ctx.cert.update(radius=a.radius)
    rep = cayley.skewer_witness(p, g, a.radius)
    w = rep.witness
    out = {"element": format_word(p, engine(p).canonical(g)), "found": w is not None,
           "candidates": rep.witnesses, "well_separated": rep.well_separated}
    if w is not None:
        out["witness"] = {"hyperplane": w.hyperplane, "edge": [format_word(p, x) for x in w.edge],
                          "power": w.power, "image": w.image, "L": _num(w.L),
                          "L_next": _num(w.L_next) if w.L_next is not None else None, "stable": w.stable}
    return out


def cmd_coxeter_classify(ctx: Context) -> dict:
    path = ctx.path(ctx.args.file)
    if path.suffix == ".peria":
        p = load_presentation(path)
        vs = ctx.vertices(p, ctx.args.force_cox) or frozenset(range(p.n))
        d = coxeter.diagram_of(p, sorted(vs))
        names = p.vertex_names(sorted(vs))
    else:
        d = coxeter.parse_diagram(path.read_text())
        names = [str(i) for i in range(d.n)]
    comps = []
    for comp, t in coxeter.classify_diagram(d):
        sig = coxeter.gram_signature(d.induced(comp))
        comps.append({"vertices": [names[i] for i in comp], "tag": t.tag, "type": t.name, "gram": sig,
                      "agrees": sig == coxeter.expected_signature(t)})
    return {"components": comps, "finite": all(c["tag"] == "spherical" for c in comps),
            "affine": bool(comps) and all(c["tag"] in ("spherical", "affine") for c in comps)}


def cmd_omega(ctx: Context) -> dict:
    p = ctx.presentation()
    rep = classify.omega_fibers(p, ctx.vertices(p, ctx.args.force_cox))
    out = {"psi": p.vertex_names(sorted(rep.psi)), "psi_c": p.vertex_names(sorted(rep.psi_c)),
           "fibers": {p.names[u]: _num(x) for u, x in rep.fibers.items()},
           "complete_bipartite": [[p.names[u], p.names[v], ok] for (u, v), ok in rep.complete_bipartite.items()]}
    if rep.graph is not None:
        verts, edges = rep.graph
        out["graph"] = {"vertices": len(verts), "edges": len(edges), "join": classify.is_join(len(verts), edges)}
    return out


def cmd_centraliser_rot(ctx: Context) -> dict:
    p = ctx.presentation()
    rep = classify.centraliser_of_rot(p, ctx.vertices(p, ctx.args.force_cox))
    return {"lambda": p.vertex_names(sorted(rep.vertices)), "finite": rep.finite,
            "psi": p.vertex_names(sorted(rep.psi)), "psi_c": p.vertex_names(sorted(rep.psi_c))}


def cmd_disjoint_cosets(ctx: Context) -> dict:
    p = ctx.presentation()
    a = ctx.args
    psi = ctx.vertices(p, a.psi) if a.psi else frozenset(range(p.n))
    res = classify.disjoint_coset_exists(p, psi, ctx.vertices(p, a.lam1), ctx.vertices(p, a.lam2))
    return {"exists": res.exists, "factor": res.factor,
            "witness": None if res.witness is None else format_word(p, res.witness), "verified": res.verified,
            "index": {"lambda1": _num(classify.coset_index(p, psi, ctx.vertices(p, a.lam1))),
                      "lambda2": _num(classify.coset_index(p, psi, ctx.vertices(p, a.lam2)))}}


# -- parser ----------------------------------------------------------------------

COMMANDS: dict[str, tuple[Callable[[Context], dict], str, tuple[str, ...]]] = {
    "check": (cmd_check, "validate a presentation", ("file",)),
    "nf": (cmd_nf, "normal form of a word", ("file", "word")),
    "eq": (cmd_eq, "decide equality of two words", ("file", "word", "word2")),
    "len": (cmd_len, "syllable length and S-length", ("file", "word")),
    "ball": (cmd_ball, "explore a Cayley ball", ("file", "word?")),
    "hyperplanes": (cmd_hyperplanes, "hyperplanes of a Cayley ball with types and labels", ("file",)),
    "classify-group": (cmd_classify_group, "finiteness, contracting elements, acylindrical hyperbolicity", ("file",)),
    "classify-element": (cmd_classify_element, "is an element contracting (graph products)", ("file", "word")),
    "morse": (cmd_morse, "is an element Morse (graph products)", ("file", "word")),
    "conj-growth": (cmd_conj_growth, "conjugacy growth series", ("file",)),
    "growth": (cmd_growth, "spherical growth series", ("file",)),
    "series-product": (cmd_series_product, "product of two series (coefficient lists or presentations)",
                       ("file", "file2")),
    "graph-check": (cmd_graph_check, "paraclique / mediangle / quasi-median recognition", ("file",)),
    "qm-closure": (cmd_qm_closure, "quasi-median closure of a paraclique graph", ("file",)),
    "quasi-cubulate": (cmd_quasi_cubulate, "quasi-cubulate a space with partitions", ("file",)),
    "contraction-profile": (cmd_contraction_profile, "projection diameters along an orbit", ("file", "word")),
    "skewer-witness": (cmd_skewer_witness, "well-separated skewered hyperplane pair", ("file", "word")),
    "coxeter-classify": (cmd_coxeter_classify, "irreducible types and Gram signatures", ("file",)),
    "omega": (cmd_omega, "fibres of the Omega graph", ("file",)),
    "centraliser-rot": (cmd_centraliser_rot, "finite centraliser of the rotation subgroup", ("file",)),
    "disjoint-cosets": (cmd_disjoint_cosets, "is there a coset g<L1> disjoint from <L2>", ("file",)),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peria", description="Computations with periagroups.",
        epilog="commands: " + ", ".join(COMMANDS) + ".  Files not found are looked up in the bundled corpus.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for name, (_, help_text, positionals) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        for pos in positionals:
            if pos.endswith("?"):
                sp.add_argument(pos[:-1], nargs="?", default=None)
            else:
                sp.add_argument(pos)
        sp.add_argument("--radius", type=int, default=3)
        sp.add_argument("--max-n", type=int, default=8)
        sp.add_argument("--slack", type=int, default=2)
        sp.add_argument("--method", choices=[growth.SATURATION, growth.EXACT_GP], default=growth.SATURATION)
        sp.add_argument("--gens", choices=[cayley.FULL, cayley.S_MODE], default=cayley.FULL if name in (
            "ball", "hyperplanes") else cayley.S_MODE)
        sp.add_argument("--force-cox", default=None, metavar="VERTICES")
        sp.add_argument("--bound", type=int, default=None)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        fmt = sp.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true")
        fmt.add_argument("--tsv", action="store_true")
        if name in ("ball", "hyperplanes"):
            sp.add_argument("--exponent-cap", type=int, default=None,
                            help="full mode with infinite vertex groups: use powers up to this cap")
        if name == "conj-growth":
            sp.add_argument("--representatives", action="store_true")
            sp.add_argument("--alpha", type=float, default=None)
            sp.add_argument("--verdict", action="store_true", help="add the transcendence verdict")
        if name == "disjoint-cosets":
            sp.add_argument("--psi", default=None)
            sp.add_argument("--lam1", required=True)
            sp.add_argument("--lam2", required=True)
    return parser


def _tsv_lines(prefix: str, value: Any) -> list[str]:
    if isinstance(value, dict):
        out = []
        for k, v in value.items():
            out.extend(_tsv_lines(f"{prefix}.{k}" if prefix else str(k), v))
        return out
    if isinstance(value, str) and "\n" in value:
        return [f"{prefix}\t{line}" for line in value.rstrip("\n").split("\n")]
    return [f"{prefix}\t{json.dumps(value) if not isinstance(value, str) else value}"]


def render(report: dict, tsv: bool) -> str:
    if tsv:
        return "\n".join(["command\t" + report["command"], *_tsv_lines("", report["results"]),
                          *(f"warning\t{w}" for w in report["warnings"])]) + "\n"
    return json.dumps(report, indent=2, default=str) + "\n"


def run_command(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.bound is None and args.command in ("ball", "hyperplanes"):
        args.bound = cayley.DEFAULT_BALL_BOUND
    ctx = Context(args)
    try:
        results = COMMANDS[args.command][0](ctx)
    except UsageError as exc:
        print(f"peria {args.command}: {exc}", file=stderr)
        return 2
    except PeriaError as exc:
        print(f"peria {args.command}: {exc}", file=stderr)
        return 1
    report = {"command": args.command, "inputs": ctx.inputs, "results": results,
              "certification": ctx.cert, "warnings": ctx.warnings}
    stdout.write(render(report, args.tsv))
    return 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
