"""Command line front-end.

    stratcalc poset sd|twar|mobius|hasse <poset>
    stratcalc strat check <name> --poset <poset> --family taut|fibered ...
    stratcalc specseq pages --poset <poset> --degree-map <json> ...
    stratcalc equivariant poset|skeleton|shape --group <spec> ...
    stratcalc suite [--catalog <json>] [--jobs N] ...

Machine-readable output (JSON or CSV) goes to stdout.  With ``--out DIR``
report commands also write the same output and a matplotlib figure into DIR.
Exit codes: 0 every check passed, 1 some check failed (the verdict carries a
witness), 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from .checks import CHECKS, InputError, height_map, make_family, parse_field, random_object, run_check
from .inputs import load_catalog, load_degrees, load_fibers, load_map, load_poset
from .poset import FinitePoset, label_text, mobius_csv, subdivision, subdivision_json, twisted_arrows, twisted_arrows_json

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

SUITE_CHECKS = (
    "microcosm",
    "reflection",
    "mobius-gluing",
    "formulas",
    "filtration",
    "excision",
    "mv",
    "quotient",
    "pushforward",
    "refine",
    "nanocosm",
    "tstructure",
    "specseq",
)
TAUT_ONLY = {"mobius-gluing", "refine"}
SIZE_CAPS = {"nanocosm": 4}


class Output:
    """Collects the primary report and mirrors it into --out when given."""

    def __init__(self, out_dir: Optional[str]):
        self.dir = Path(out_dir) if out_dir else None
        if self.dir:
            self.dir.mkdir(parents=True, exist_ok=True)

    def emit(self, text: str, filename: str) -> None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        if self.dir:
            (self.dir / filename).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")

    def figure(self, name: str) -> Optional[Path]:
        return self.dir / name if self.dir else None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


def _untimed(v: Dict[str, object]) -> Dict[str, object]:
    """A verdict without its wall-clock time, so reports are stable under re-runs."""
    return {k: x for k, x in v.items() if k != "seconds"}


# --------------------------------------------------------------------------
# poset
# --------------------------------------------------------------------------


def cmd_poset(args) -> int:
    from . import plotting

    P = load_poset(args.input)
    out = Output(args.out)
    if args.action == "sd":
        sd = subdivision(P)
        out.emit(_dump(subdivision_json(sd)), "sd.json")
        if out.dir:
            styles = {(a, b): ("solid" if k != "generic" else "dashed") for a, b, k in sd.classified_covers()}
            plotting.plot_hasse(sd, out.figure("sd.png"), f"sd({P.name})", edge_styles=styles)
    elif args.action == "twar":
        tw = twisted_arrows(P)
        out.emit(_dump(twisted_arrows_json(tw)), "twar.json")
        if out.dir:
            plotting.plot_hasse(tw, out.figure("twar.png"), f"TwAr({P.name})")
    elif args.action == "mobius":
        out.emit(mobius_csv(P), "mobius.csv")
        if out.dir:
            plotting.plot_mobius(P, out.figure("mobius.png"), f"μ on {P.name}")
    else:
        out.emit(_dump(dict(name=P.name, **P.to_json())), "poset.json")
        if out.dir:
            plotting.plot_hasse(P, out.figure("hasse.png"), P.name)
    return EXIT_PASS


# --------------------------------------------------------------------------
# strat check
# --------------------------------------------------------------------------


def _check_options(args, P: FinitePoset, f) -> Dict[str, object]:
    opts: Dict[str, object] = {}
    if args.alpha:
        opts["alpha"] = load_map(args.alpha, P)
    elif args.check == "pushforward":
        # α defaults to the map of the stratified object's poset to its own height chain,
        # or to f itself for the tautological family when --map is given
        opts["alpha"] = f if (args.family == "taut" and f is not None) else height_map(P)
    if getattr(args, "fibers", None):
        opts["fibers"] = load_fibers(args.fibers, P)
    return opts


def cmd_strat_check(args) -> int:
    from . import plotting

    if args.trials < 1:
        raise InputError("--trials must be at least 1")
    P = load_poset(args.poset)
    field = parse_field(args.field)
    f = load_map(args.map, P) if args.map else None
    family = make_family(args.family, P, field, None if args.family == "taut" else f)
    opts = _check_options(args, P, f)
    verdicts = [run_check(args.check, family, args.seed + t, P.name, opts) for t in range(args.trials)]
    out = Output(args.out)
    out.emit("\n".join(json.dumps(_untimed(v), ensure_ascii=False) for v in verdicts), "verdicts.jsonl")
    if out.dir:
        rows = [dict(v, check=f"{v['check']} seed {v['seed']}") for v in verdicts]
        plotting.plot_verdicts(rows, out.figure("verdicts.png"), f"{args.check} on {P.name} ({args.family})")
    return EXIT_PASS if all(v["pass"] for v in verdicts) else EXIT_FAIL


# --------------------------------------------------------------------------
# specseq
# --------------------------------------------------------------------------


def cmd_specseq(args) -> int:
    from . import plotting
    from .specseq import SpectralSequence, conservative_witness, pages_json, parse_functor, tower_from_stratification
    from .strat.filtration import FiltrationKind

    P = load_poset(args.poset)
    field = parse_field(args.field)
    f = load_map(args.map, P) if args.map else None
    family = make_family(args.family, P, field, f)
    degrees = load_degrees(args.degree_map, P)
    w = conservative_witness(P, degrees)
    if w:
        raise InputError(f"degree map is not conservative: {w}")
    try:
        kind = FiltrationKind.parse(args.kind)
        H = parse_functor(args.functor)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    F = random_object(family, args.seed)
    ss = SpectralSequence(tower_from_stratification(family, F, degrees, kind, H))
    pages = ss.pages(args.upto) if args.upto else ss.pages()
    out = Output(args.out)
    if args.format == "text":
        out.emit("\n\n".join(p.chart() for p in pages), "pages.txt")
    else:
        out.emit(pages_json(ss, pages), "pages.json")
    if out.dir:
        for p in pages:
            plotting.plot_page(p, out.figure(f"page{p.r}.png"), f"E^{p.r} ({kind.value}, {P.name})")
    ok, w = ss.all_checks()
    if not ok:
        sys.stderr.write(f"spectral sequence check failed: {w}\n")
    return EXIT_PASS if ok else EXIT_FAIL


# --------------------------------------------------------------------------
# equivariant
# --------------------------------------------------------------------------


def cmd_equivariant(args) -> int:
    from . import plotting
    from .equivariant import (
        GroupError,
        fixedpoint_shape,
        parse_group,
        restriction_shape,
        skeleton,
        skeleton_dot,
        skeleton_json,
        skeleton_summary,
        subgroup_poset,
        transfer_shape,
        weyl_data,
    )

    try:
        G = parse_group(args.group)
        PG = subgroup_poset(G)
    except GroupError as exc:
        raise InputError(str(exc)) from None
    out = Output(args.out)
    if args.action == "poset":
        data = PG.to_json()
        if args.format == "text":
            lines = [f"{c.name}: order {c.order}, |W| = {c.weyl_order}" for c in PG.classes]
            out.emit("\n".join(lines), "subgroups.txt")
        else:
            out.emit(_dump(data), "subgroups.json")
        if out.dir:
            labels = {c.name: f"{c.name}\n|W|={c.weyl_order}" for c in PG.classes}
            plotting.plot_hasse(PG.poset, out.figure("subgroups.png"), f"P_{G.name}", node_labels=labels)
        return EXIT_PASS
    if args.action == "skeleton":
        report = skeleton(G, PG)
        if args.format == "dot":
            out.emit(skeleton_dot(PG, report), "skeleton.dot")
        elif args.format == "text":
            summary = skeleton_summary(report)
            out.emit(
                "\n".join(f"{k}: {', '.join(v) or '-'}" for k, v in summary.items()), "skeleton.txt"
            )
        else:
            out.emit(skeleton_json(G, report), "skeleton.json")
        if out.dir:
            plotting.plot_skeleton(PG, report, out.figure("skeleton.png"))
        return EXIT_PASS
    # shape
    if not args.subgroup:
        raise InputError("shape needs --subgroup")
    try:
        PG[args.subgroup]
        if args.restrict:
            PG[args.restrict]
            fn = transfer_shape if args.transfer else restriction_shape
            data = fn(PG, args.subgroup, args.restrict)
        else:
            data = fixedpoint_shape(PG, args.subgroup)
            data["weyl"] = weyl_data(PG, args.subgroup)["type"]
    except (KeyError, GroupError) as exc:
        raise InputError(f"bad subgroup: {exc}") from None
    out.emit(_dump(data), "shape.json")
    if out.dir and not args.restrict:
        sd = subdivision(PG.poset)
        keep = [tuple(n["chain"]) for n in data["nodes"]]
        sub = sd.subposet(keep)
        styles = {(tuple(e["from"]), tuple(e["to"])): ("solid" if e["class"] != "generic" else "dashed") for e in data["edges"]}
        labels = {tuple(n["chain"]): f"{'<'.join(n['chain'])}\n#{n['fixedPoints']}" for n in data["nodes"]}
        plotting.plot_hasse(sub, out.figure("shape.png"), f"fixed points of {args.subgroup} in {G.name}", styles, node_labels=labels)
    return EXIT_PASS


# --------------------------------------------------------------------------
# suite
# --------------------------------------------------------------------------


def suite_jobs(cat, fields, seeds, checks, families) -> List[tuple]:
    """(check, family kind, poset, field, seed) for every applicable combination."""
    jobs = []
    for P in cat.posets:
        for name in checks:
            for kind in families:
                if kind != "taut" and name in TAUT_ONLY:
                    continue
                if len(P) > SIZE_CAPS.get(name, len(P)):
                    continue
                for field in fields:
                    for seed in seeds:
                        jobs.append((name, kind, P, field, seed))
    return jobs


def run_suite(cat, fields, seeds, checks, families, jobs: int = 1, progress=None) -> List[Dict[str, object]]:
    """Verdicts for every job plus every fixture; sharded over ``jobs`` threads."""
    work = suite_jobs(cat, fields, seeds, checks, families)

    def one(job):
        name, kind, P, field, seed = job
        fam = make_family(kind, P, field)
        opts = {"alpha": height_map(P)} if name == "pushforward" else {}
        v = run_check(name, fam, seed, P.name, opts)
        v["family"] = kind
        return v

    def fixture(i):
        D = cat.fixtures[i]
        out = []
        for name in checks:
            if name in ("refine", "nanocosm", "tstructure", "pushforward"):
                continue
            fam = make_family("taut", D.shape, D.field)
            v = run_check(name, fam, 0, cat.fixture_names[i], {}, F=D)
            v["family"] = "taut"
            out.append(v)
        return out

    lock = threading.Lock()
    results: List[Dict[str, object]] = []

    def record(v):
        with lock:
            results.append(v)
            if progress:
                progress(v)

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        for v in pool.map(one, work):
            record(v)
        for vs in pool.map(fixture, range(len(cat.fixtures))):
            for v in vs:
                record(v)
    return results


def summarize(results: Sequence[Dict[str, object]]) -> List[Dict[str, object]]:
    rows: Dict[str, Dict[str, object]] = {}
    for v in results:
        r = rows.setdefault(v["check"], {"check": v["check"], "runs": 0, "passed": 0, "seconds": 0.0})
        r["runs"] += 1
        r["passed"] += bool(v["pass"])
        r["seconds"] = round(r["seconds"] + v["seconds"], 4)
    for r in rows.values():
        r["pass"] = r["runs"] == r["passed"]
    return list(rows.values())


def cmd_suite(args) -> int:
    from . import plotting

    checks = args.checks.split(",") if args.checks else list(SUITE_CHECKS)
    unknown = [c for c in checks if c not in CHECKS]
    if unknown:
        raise InputError(f"unknown checks {unknown}")
    fields = [parse_field(x) for x in args.fields.split(",")]
    try:
        seeds = [int(s) for s in args.seeds.split(",")]
    except ValueError:
        raise InputError("--seeds takes comma separated integers") from None
    families = args.families.split(",")
    for k in families:
        if k not in ("taut", "fibered"):
            raise InputError(f"unknown family {k!r}")
    cat = load_catalog(args.catalog, args.max_size)
    t0 = time.perf_counter()
    verbose = (lambda v: sys.stderr.write(f"{v['check']:<14} {v['poset']:<8} {v['field']:<3} {v['seed']} {'PASS' if v['pass'] else 'FAIL'}\n")) if args.verbose else None
    results = run_suite(cat, fields, seeds, checks, families, args.jobs, verbose)
    rows = summarize(results)
    failures = [_untimed(v) for v in results if not v["pass"]]
    report = {
        "posets": len(cat.posets),
        "fixtures": len(cat.fixtures),
        "runs": len(results),
        "failures": failures,
        "checks": [_untimed(r) for r in rows],
        "pass": not failures,
    }
    out = Output(args.out)
    out.emit(_dump(report), "suite.json")
    if out.dir:
        timing = {"seconds": round(time.perf_counter() - t0, 3), "checks": {r["check"]: r["seconds"] for r in rows}}
        (out.dir / "timing.json").write_text(_dump(timing) + "\n", encoding="utf-8")
        (out.dir / "verdicts.jsonl").write_text("".join(json.dumps(v, ensure_ascii=False) + "\n" for v in results), encoding="utf-8")
        if rows:
            plotting.plot_verdicts(rows, out.figure("timing.png"), "suite timing per check")
    return EXIT_PASS if not failures else EXIT_FAIL


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stratcalc", description="Stratified diagrams over finite posets.")
    ap.add_argument("--version", action="version", version=f"stratcalc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poset", help="subdivision, twisted arrows, Möbius table or Hasse diagram")
    p.add_argument("action", choices=["sd", "twar", "mobius", "hasse"])
    p.add_argument("input", help="poset JSON file, inline JSON, or a name such as [3], B2, V, P4.2")
    p.add_argument("--out", help="directory for the report and its figure")
    p.set_defaults(run=cmd_poset)

    s = sub.add_parser("strat", help="property checks on random stratified objects")
    ssub = s.add_subparsers(dest="strat_command", required=True)
    c = ssub.add_parser("check")
    c.add_argument("check", choices=list(CHECKS))
    c.add_argument("--poset", required=True)
    c.add_argument("--family", choices=["taut", "fibered"], default="taut")
    c.add_argument("--map", help="f: P -> Q for the fibered family (α for a tautological pushforward)")
    c.add_argument("--alpha", help="α for the pushforward check")
    c.add_argument("--fibers", help="refinement posets for the refine check")
    c.add_argument("--seed", type=int, default=1)
    c.add_argument("--trials", type=int, default=1)
    c.add_argument("--field", default="Q")
    c.add_argument("--out")
    c.set_defaults(run=cmd_strat_check)

    q = sub.add_parser("specseq", help="pages of the spectral sequence of a stratified object")
    qsub = q.add_subparsers(dest="specseq_command", required=True)
    pg = qsub.add_parser("pages")
    pg.add_argument("--poset", required=True)
    pg.add_argument("--degree-map", required=True, help="JSON {element: integer} or a map to a chain")
    pg.add_argument("--family", choices=["taut", "fibered"], default="taut")
    pg.add_argument("--map")
    pg.add_argument("--kind", default="AscLeft", help="AscLeft, DescRight, DescLeft or AscRight")
    pg.add_argument("--functor", default="holim", help="holim, eval:<x> or stratum:<p>")
    pg.add_argument("--seed", type=int, default=1)
    pg.add_argument("--field", default="Q")
    pg.add_argument("--upto", type=int, help="last page to print (default: until E-infinity)")
    pg.add_argument("--format", choices=["json", "text"], default="json")
    pg.add_argument("--out")
    pg.set_defaults(run=cmd_specseq)

    e = sub.add_parser("equivariant", help="subgroup posets and gluing skeletons of finite groups")
    e.add_argument("action", choices=["poset", "skeleton", "shape"])
    e.add_argument("--group", required=True, help="Cn, Sn, An, Dn (order n) or generators in cycle notation")
    e.add_argument("--subgroup", help="conjugacy class name for shape")
    e.add_argument("--restrict", help="larger class: print the restriction functor into its shape")
    e.add_argument("--transfer", action="store_true", help="with --restrict, print the transfer instead")
    e.add_argument("--format", choices=["json", "dot", "text"], default="json")
    e.add_argument("--out")
    e.set_defaults(run=cmd_equivariant)

    u = sub.add_parser("suite", help="run the property matrix over a catalog")
    u.add_argument("--catalog", help="catalog JSON (default: the bundled posets up to 5 elements)")
    u.add_argument("--max-size", type=int, default=5)
    u.add_argument("--fields", default="Q,F2,F3")
    u.add_argument("--seeds", default="1")
    u.add_argument("--checks", help="comma separated subset of the checks")
    u.add_argument("--families", default="taut,fibered")
    u.add_argument("--jobs", type=int, default=1, help="worker threads")
    u.add_argument("--verbose", action="store_true")
    u.add_argument("--out")
    u.set_defaults(run=cmd_suite)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    try:
        return args.run(args)
    except (InputError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        sys.stderr.write(f"stratcalc: error: {msg}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
