"""Command-line entry point.

Reports are deterministic: identical arguments give byte-identical output,
whatever the worker count.  Wall-clock timings are only included with
``--timings``.  Exit codes: 0 ok, 2 parse error, 3 resource guard,
4 internal invariant violation.  Errors are written to stderr as a JSON
object with an ``error`` category.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
import time
from typing import Optional

from . import _kernels
from .codes import (Code, canonical_representative, count_wr_exact, decode, entropy_rate,
                    entropy_rate_closed, verify_code, wr_bound)
from .groups import GroupDescriptor
from .labeled_graph import (GraphError, LabeledGraph, dumbbell_graph, enumerate_graph_ball,
                            k4_graph, theta_graph)
from .raag import (DefiningGraph, ResourceGuardError, WordParseError, build_complement,
                   enumerate_ball, format_word, growth_bound, normal_form, parse_word,
                   word_codes)

EXIT_OK, EXIT_PARSE, EXIT_GUARD, EXIT_INVARIANT = 0, 2, 3, 4
SCHEMA = "unigrowth.report/1"


class InvariantViolation(RuntimeError):
    pass


class ParseFailure(ValueError):
    pass


# -- inputs -----------------------------------------------------------------------

def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseFailure(f"cannot read {path}: {exc}") from exc


def _defining_graph(args) -> DefiningGraph:
    if args.theta:
        kind, _, n = args.theta.partition(":")
        try:
            n = int(n)
            return {"empty": DefiningGraph.empty, "complete": DefiningGraph.complete,
                    "path": DefiningGraph.path}[kind](n)
        except (KeyError, ValueError) as exc:
            raise ParseFailure(f"bad --theta {args.theta!r}") from exc
    if not args.input:
        raise ParseFailure("need --input or --theta")
    try:
        return DefiningGraph.from_json(_read_json(args.input))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseFailure(f"bad defining graph: {exc}") from exc


def _group(args) -> Optional[GroupDescriptor]:
    if not args.group:
        return None
    try:
        return GroupDescriptor.parse(args.group)
    except ValueError as exc:
        raise ParseFailure(str(exc)) from exc


SHAPES = {"theta": (theta_graph, 3), "dumbbell": (dumbbell_graph, 3), "k4": (k4_graph, 6)}


def _labeled_graph(args) -> LabeledGraph:
    group = _group(args)
    if args.shape:
        if args.shape not in SHAPES:
            raise ParseFailure(f"unknown shape {args.shape!r}")
        build, ne = SHAPES[args.shape]
        group = group or GroupDescriptor("trivial")
        if args.labels:
            try:
                labels = [json.loads(x) for x in args.labels.split(";")]
                return build(group, labels)
            except ValueError as exc:
                raise ParseFailure(f"bad --labels: {exc}") from exc
        if group.kind == "trivial":
            return build(group)
        rng = random.Random(args.seed)
        return build(group, [_random_element(group, rng) for _ in range(ne)])
    if not args.input:
        raise ParseFailure("need --input or --shape")
    try:
        return LabeledGraph.from_json(_read_json(args.input), group)
    except (GraphError, KeyError, TypeError, ValueError) as exc:
        raise ParseFailure(f"bad labeled graph: {exc}") from exc


def _random_element(group: GroupDescriptor, rng: random.Random):
    if group.kind == "cyclic":
        return group.element(rng.randrange(group.param))
    letters = [rng.choice([1, -1]) * rng.randint(1, group.param) for _ in range(rng.randint(0, 2))]
    return group.element(letters)


def _triangulation(args):
    from .triangulation import BUILTINS, TriangulationError, build_labeled_dual
    if args.builtin:
        if args.builtin not in BUILTINS:
            raise ParseFailure(f"unknown builtin {args.builtin!r}; choose from {sorted(BUILTINS)}")
        return BUILTINS[args.builtin]()
    if not args.input:
        raise ParseFailure("need --input or --builtin")
    try:
        return build_labeled_dual(_read_json(args.input))
    except (TriangulationError, KeyError, TypeError, ValueError) as exc:
        raise ParseFailure(f"bad triangulation: {exc}") from exc


# -- commands ----------------------------------------------------------------------

def cmd_raag_ball(args) -> dict:
    theta = _defining_graph(args)
    R = args.radius
    ball = enumerate_ball(theta, R, guard=args.guard_elements)
    c0 = ball.report.c0
    rows = []
    ok = True
    for r in range(R + 1):
        w = count_wr_exact(theta.n, c0, r)
        fits = ball.report.sizes[r] <= w
        ok = ok and fits
        rows.append({"radius": r, "size": ball.report.sizes[r], "log_ratio": ball.report.log_ratios[r],
                     "bound": ball.report.bound, "wr_exact": w, "size_le_wr": fits})
    return {"graph": theta.to_json(), "c0": c0, "growth_bound": ball.report.bound, "rows": rows,
            "checks": {"ball_le_wr": ok}}


def cmd_raag_code(args) -> dict:
    theta = _defining_graph(args)
    try:
        w = parse_word(args.word or "", theta)
    except WordParseError as exc:
        raise ParseFailure(str(exc)) from exc
    cbar = build_complement(theta, args.seed)
    out, code, _ = canonical_representative(w, cbar, theta=theta)
    R = max(len(w), args.radius)
    padded = Code(code.values, cbar.n, cbar.c0, len(code.values)).padded(R)
    back = decode(padded, cbar)
    roundtrip = back == out and normal_form(out, theta) == normal_form(w, theta)
    return {"graph": theta.to_json(), "word": format_word(w, theta), "canonical": format_word(out, theta),
            "canonical_codes": list(word_codes(out)), "code": list(code.values), "padded": list(padded.values),
            "c0": cbar.c0, "bound": padded.bound,
            "checks": {"verify_code": verify_code(padded), "roundtrip": roundtrip}}


def cmd_graph_ball(args) -> dict:
    g0 = _labeled_graph(args)
    rep = enumerate_graph_ball(g0, args.radius, guard=args.guard_elements, workers=args.workers)
    rows = []
    ok = True
    for r in range(args.radius + 1):
        fits = rep.sizes[r] <= rep.bounds[r]
        ok = ok and fits
        rows.append({"radius": r, "size": rep.sizes[r], "log_ratio": rep.log_ratios[r],
                     "bound_log4_exponent": 5 * g0.rank - 5 + 3 * r,
                     "log_bound_over_r": (math.log(rep.bounds[r]) / r) if r else None,
                     "size_le_bound": fits})
    return {"graph": g0.to_json(), "rank": g0.rank, "asymptote": 3 * math.log(4), "rows": rows,
            "checks": {"ball_le_bound": ok}}


def cmd_graph_codec(args) -> dict:
    from .derivation import (Derivation, MalformedPairError, canonical_derivation,
                             codec_exhaustive_check, decode_derivation, encode_derivation)
    from .labeled_graph import apply_split, canonical_key
    g0 = _labeled_graph(args)
    R = args.radius
    if g0.group.kind in ("trivial", "cyclic"):
        mod = g0.group.param if g0.group.kind == "cyclic" else 1
        rng = random.Random(args.seed)
        labelings = []
        if mod > 1:
            from .derivation import label_column
            labelings.append(label_column(g0)[1:])
            labelings.extend([rng.randrange(mod) for _ in range(g0.max_edge_label)] for _ in range(2))
        res = codec_exhaustive_check(g0, R, labelings, mod)
        return {"graph": g0.to_json(), "radius": R, "mode": "exhaustive", "derivations": res.derivations,
                "failures": res.failures, "first_failure": res.first_failure,
                "checks": {"roundtrip": res.ok}}
    rng = random.Random(args.seed)
    failures = 0
    for _ in range(args.samples):
        g, splits = g0, []
        for _ in range(rng.randint(0, R)):
            s = rng.choice(g.splits())
            splits.append(s)
            g = apply_split(g, s)
        d = Derivation(g0, tuple(splits))
        c = canonical_derivation(d)
        try:
            back = decode_derivation(encode_derivation(c, R), g0, R)
        except MalformedPairError:
            back = None
        if back is None or back.splits != c.splits or canonical_key(c.result) != canonical_key(g):
            failures += 1
    return {"graph": g0.to_json(), "radius": R, "mode": "sampled", "derivations": args.samples,
            "failures": failures, "first_failure": None, "checks": {"roundtrip": failures == 0}}


def cmd_tri_ball(args) -> dict:
    from .triangulation import enumerate_flip_ball
    t0 = _triangulation(args)
    rep = enumerate_flip_ball(t0, args.radius, guard=args.guard_elements, graph_radius=args.graph_radius)
    rows = []
    for r in range(args.radius + 1):
        row = {"radius": r, "size": rep.sizes[r], "log_ratio": rep.log_ratios[r],
               "bound_log4_exponent": 5 * rep.rank - 5 + 3 * r, "dual_injective": rep.dual_injective[r]}
        if r < len(rep.graph_sizes):
            row["graph_ball_size"] = rep.graph_sizes[r]
            row["size_le_graph_ball"] = rep.sizes[r] <= rep.graph_sizes[r]
            row["duals_contained"] = rep.dual_contained[r]
        rows.append(row)
    checks = {"well_labeled": rep.well_labeled, "dual_injective": all(rep.dual_injective),
              "size_le_graph_ball": all(rep.sizes[r] <= rep.graph_sizes[r] for r in range(len(rep.graph_sizes))),
              "duals_contained": all(rep.dual_contained)}
    return {"surface": {"genus": t0.genus, "punctures": t0.punctures, "n": t0.n}, "rank": rep.rank,
            "asymptote": 3 * math.log(4), "rows": rows, "checks": checks}


def cmd_bounds(args) -> dict:
    c0s = [args.c0] if args.c0 is not None else list(range(1, 21))
    rows = []
    for c in c0s:
        h = entropy_rate(c)
        rows.append({"c0": c, "growth_bound": growth_bound(c), "entropy_rate": h,
                     "entropy_closed": entropy_rate_closed(c), "residual": abs(h - entropy_rate_closed(c)),
                     "entropy_le_bound": h <= growth_bound(c)})
    out = {"rows": rows, "checks": {"residuals_small": all(r["residual"] < 1e-12 for r in rows),
                                    "entropy_le_bound": all(r["entropy_le_bound"] for r in rows)}}
    if args.n is not None and args.c0 is not None:
        table = []
        for r in range(1, args.radius + 1):
            val, lr = wr_bound(args.n, args.c0, r)
            table.append({"radius": r, "wr_bound": str(val), "log_over_r": lr,
                          "wr_exact": str(count_wr_exact(args.n, args.c0, r))})
        out["wr_table"] = table
    return out


# -- output -------------------------------------------------------------------------

def _emit(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# {SCHEMA} {report['subcommand']} (natural log)\n")
    rows = report.get("rows", [])
    if rows:
        cols = sorted({k for row in rows for k in row})
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in cols})
    for k, v in sorted(report.get("checks", {}).items()):
        buf.write(f"# check {k}: {'pass' if v else 'fail'}\n")
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="unigrowth", description="Ball enumeration, codec checks and bound tables.")
    sub = p.add_subparsers(dest="area", required=True)

    def common(sp, radius_default=3):
        sp.add_argument("--input", help="input JSON file")
        sp.add_argument("--radius", type=int, default=radius_default)
        sp.add_argument("--group", help="trivial | free:m | cyclic:k")
        sp.add_argument("--guard-elements", type=int, default=10**6)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--timings", action="store_true", help="include wall-clock timings")

    raag = sub.add_parser("raag").add_subparsers(dest="cmd", required=True)
    rb = raag.add_parser("ball")
    common(rb)
    rb.add_argument("--theta", help="empty:n | complete:n | path:n")
    rb.set_defaults(func=cmd_raag_ball)
    rc = raag.add_parser("code")
    common(rc, radius_default=0)
    rc.add_argument("--theta")
    rc.add_argument("--word", default="", help="space separated generator names, ' for inverse")
    rc.set_defaults(func=cmd_raag_code)

    graph = sub.add_parser("graph").add_subparsers(dest="cmd", required=True)
    gb = graph.add_parser("ball")
    common(gb, radius_default=2)
    gb.add_argument("--shape", help="theta | dumbbell | k4")
    gb.add_argument("--labels", help="edge labels as JSON values separated by ';'")
    gb.add_argument("--workers", type=int, default=1)
    gb.set_defaults(func=cmd_graph_ball)
    gc = graph.add_parser("codec-roundtrip")
    common(gc, radius_default=3)
    gc.add_argument("--shape")
    gc.add_argument("--labels")
    gc.add_argument("--samples", type=int, default=200)
    gc.set_defaults(func=cmd_graph_codec)

    tri = sub.add_parser("tri").add_subparsers(dest="cmd", required=True)
    tb = tri.add_parser("ball")
    common(tb, radius_default=3)
    tb.add_argument("--builtin", help="punctured-torus | four-punctured-sphere")
    tb.add_argument("--graph-radius", type=int, default=-1,
                    help="also enumerate the labeled-graph ball of the dual up to this radius")
    tb.set_defaults(func=cmd_tri_ball)

    bd = sub.add_parser("bounds")
    bd.add_argument("--c0", type=int)
    bd.add_argument("--n", type=int)
    bd.add_argument("--radius", type=int, default=10)
    bd.add_argument("--format", choices=("json", "csv"), default="json")
    bd.add_argument("--seed", type=int, default=None)
    bd.add_argument("--timings", action="store_true")
    bd.set_defaults(func=cmd_bounds, cmd=None)
    return p


def _fail(category: str, code: int, message: str) -> int:
    sys.stderr.write(json.dumps({"error": category, "message": message}, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("radius", "guard_elements", "workers", "samples"):
        v = getattr(args, name, None)
        if v is not None and (v < 0 or (name != "radius" and v < 1)):
            return _fail("parse", EXIT_PARSE, f"--{name.replace('_', '-')} out of range")
    sub = args.area + (f" {args.cmd}" if args.cmd else "")
    start = time.perf_counter()
    try:
        body = args.func(args)
    except ParseFailure as exc:
        return _fail("parse", EXIT_PARSE, str(exc))
    except ResourceGuardError as exc:
        return _fail("guard", EXIT_GUARD, str(exc))
    except (InvariantViolation, AssertionError) as exc:
        return _fail("invariant", EXIT_INVARIANT, str(exc))
    report = {"schema": SCHEMA, "subcommand": sub, "log_base": "natural",
              "config": {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "timings", "workers")}}
    report.update(body)
    if args.timings:
        report["timings"] = {"seconds": time.perf_counter() - start, "backend": _kernels.BACKEND}
    sys.stdout.write(_emit(report, args.format))
    if not all(report.get("checks", {}).values()):
        return _fail("invariant", EXIT_INVARIANT, f"failed checks: "
                     f"{sorted(k for k, v in report['checks'].items() if not v)}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
