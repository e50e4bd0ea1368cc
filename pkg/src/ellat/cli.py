"""Command-line entry point.

Exit status: 0 success or a true answer, 1 a false answer, 2 usage, parse or
input errors, 3 resource budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import experiments, metric, models, neighborhood, order
from .errors import BudgetExceeded, EllatError
from .syntax import measure, parse, parse_signature, to_text

OK, NO, USAGE, BUDGET = 0, 1, 2, 3


class _Out:
    def __init__(self, as_json: bool, stream):
        self.as_json = as_json
        self.stream = stream

    def emit(self, text: str, data) -> None:
        if self.as_json:
            self.stream.write(json.dumps(data, sort_keys=True) + "\n")
        else:
            self.stream.write(text + "\n")


def _num(x):
    if x == metric.INFINITY:
        return "inf"
    if isinstance(x, Fraction):
        return str(x)
    return x


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _budget(args) -> metric.Budget:
    return metric.Budget(args.budget)


def _ints(text: str) -> list:
    out = []
    for part in text.split(","):
        lo, sep, hi = part.partition("-")
        out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    return out


def _concepts(cs) -> list:
    return [to_text(c) for c in cs]


# ---------------------------------------------------------------- commands

def cmd_parse(args, out):
    c, sig = parse(args.concept, "infer")
    m = measure(c)
    out.emit(to_text(c), {"concept": to_text(c), "size": m.size, "role_depth": m.role_depth,
                          "names": list(sig.concept_names), "roles": list(sig.role_names)})
    return OK


def cmd_reduce(args, out):
    c = order.reduce(parse(args.concept))
    out.emit(to_text(c), {"concept": to_text(c)})
    return OK


def _decision(out, answer: bool) -> int:
    out.emit("true" if answer else "false", {"result": answer})
    return OK if answer else NO


def cmd_subsumes(args, out):
    c, d = parse(args.c), parse(args.d)
    if args.tbox:
        return _decision(out, models.tbox_entails(c, d, models.parse_tbox(_read(args.tbox))))
    return _decision(out, order.subsumes(c, d))


def cmd_lcs(args, out):
    c = order.lcs([parse(x) for x in args.concepts])
    out.emit(to_text(c), {"concept": to_text(c)})
    return OK


def cmd_mgd(args, out):
    c = order.mgd(parse(args.c), parse(args.d))
    out.emit(to_text(c), {"concept": to_text(c)})
    return OK


def _listing(out, cs) -> int:
    texts = _concepts(cs)
    out.emit("\n".join(texts) if texts else "", {"concepts": texts})
    return OK


def cmd_upper(args, out):
    c = parse(args.concept)
    if args.tbox:
        return _listing(out, neighborhood.upper_wrt_tbox(c, models.parse_tbox(_read(args.tbox))))
    return _listing(out, neighborhood.upper(c))


def cmd_lower(args, out):
    c = parse(args.concept)
    sig = parse_signature(args.sig)
    if args.tbox:
        return _listing(out, neighborhood.lower_wrt_tbox(c, models.parse_tbox(_read(args.tbox)), sig))
    return _listing(out, neighborhood.lower(c, sig))


def cmd_neighbor(args, out):
    c, d = parse(args.c), parse(args.d)
    if args.tbox:
        sig = parse_signature(args.sig) if args.sig else None
        t = models.parse_tbox(_read(args.tbox))
        return _decision(out, neighborhood.is_neighbor_wrt_tbox(c, d, t, sig))
    return _decision(out, neighborhood.is_lower_neighbor(c, d))


def cmd_msc(args, out):
    c = models.msc(parse(args.concept), models.parse_tbox(_read(args.tbox)))
    out.emit(to_text(c), {"concept": to_text(c)})
    return OK


def cmd_expand(args, out):
    c = models.expand_acyclic(parse(args.concept), models.parse_acyclic_tbox(_read(args.deftbox)))
    out.emit(to_text(c), {"concept": to_text(c)})
    return OK


def cmd_rank(args, out):
    c = parse(args.concept)
    if args.method == "decomp" and not c.is_bottom:
        r = metric.rank_via_decomposition(c, _budget(args))
    else:
        r = metric.rank(c, _budget(args))
    out.emit(str(_num(r)), {"rank": _num(r)})
    return OK


def cmd_distance(args, out):
    d = metric.distance(parse(args.c), parse(args.d), _budget(args))
    out.emit(str(_num(d)), {"distance": _num(d)})
    return OK


def cmd_similarity(args, out):
    f = metric.parse_transform(args.transform)
    s = metric.similarity(parse(args.c), parse(args.d), f, _budget(args))
    out.emit(str(s), {"similarity": str(s), "transform": str(f)})
    return OK


def cmd_ball(args, out):
    cs = metric.ball(parse(args.concept), args.radius, parse_signature(args.sig), _budget(args))
    return _listing(out, cs)


def cmd_relaxed(args, out):
    i = models.parse_interpretation(_read(args.interp))
    ans = metric.relaxed_instance(args.elem, parse(args.concept), args.radius, i,
                                  parse_signature(args.sig), _budget(args))
    return _decision(out, ans)


def cmd_cyclecheck(args, out):
    return _decision(out, models.is_cycle_restricted(models.parse_tbox(_read(args.tbox))))


def cmd_experiment(args, out):
    if args.which == "table41":
        cells = [(k, n) for k in _ints(args.k) for n in _ints(args.n)]
        rows = experiments.table41(cells, args.budget)
        if args.json:
            out.emit("", [{"k": k, "n": n, "rank": r, "width_lower_bound": b, "seconds": round(s, 3)}
                          for k, n, r, b, s in rows])
        elif args.csv:
            out.stream.write(experiments.report_csv(rows))
        else:
            out.stream.write(experiments.report_text(rows))
        return OK
    # poset statistics of every level
    tower = experiments.build_tower(int(args.k), int(args.n), _budget(args))
    stats = []
    for level, p in enumerate(tower.levels):
        h, w, ideals = experiments.poset_stats(p, _budget(args))
        stats.append({"level": level, "size": len(p), "height": h, "width": w, "ideals": ideals})
    lines = ["level size height width ideals"]
    lines += [f"{s['level']} {s['size']} {s['height']} {s['width']} {s['ideals']}" for s in stats]
    out.emit("\n".join(lines), stats)
    return OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--budget", type=int, default=None,
                        help="step budget (default: $ELLAT_BUDGET or 1000000)")

    p = argparse.ArgumentParser(prog="ellat", description="Lattice operations on EL concepts.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    add("parse", cmd_parse, "parse and print canonically").add_argument("concept")
    add("reduce", cmd_reduce, "reduced form").add_argument("concept")
    sp = add("subsumes", cmd_subsumes, "decide C below D (exit 0/1)")
    sp.add_argument("c")
    sp.add_argument("d")
    sp.add_argument("--tbox")
    add("lcs", cmd_lcs, "least common subsumer").add_argument("concepts", nargs="+")
    sp = add("mgd", cmd_mgd, "most general difference")
    sp.add_argument("c")
    sp.add_argument("d")
    sp = add("upper", cmd_upper, "upper neighbors")
    sp.add_argument("concept")
    sp.add_argument("--tbox")
    sp = add("lower", cmd_lower, "lower neighbors")
    sp.add_argument("concept")
    sp.add_argument("--sig", required=True)
    sp.add_argument("--tbox")
    sp = add("neighbor", cmd_neighbor, "decide whether C is a lower neighbor of D (exit 0/1)")
    sp.add_argument("c")
    sp.add_argument("d")
    sp.add_argument("--tbox")
    sp.add_argument("--sig")
    sp = add("msc", cmd_msc, "most specific consequence")
    sp.add_argument("concept")
    sp.add_argument("--tbox", required=True)
    sp = add("expand", cmd_expand, "unfold an acyclic TBox")
    sp.add_argument("concept")
    sp.add_argument("--deftbox", required=True)
    sp = add("rank", cmd_rank, "rank of a concept")
    sp.add_argument("concept")
    sp.add_argument("--method", choices=("jump", "decomp"), default="jump")
    sp = add("distance", cmd_distance, "distance between two concepts")
    sp.add_argument("c")
    sp.add_argument("d")
    sp = add("similarity", cmd_similarity, "similarity between two concepts")
    sp.add_argument("c")
    sp.add_argument("d")
    sp.add_argument("--transform", default="ratio:1")
    sp = add("ball", cmd_ball, "all concepts within a distance")
    sp.add_argument("concept")
    sp.add_argument("radius", type=int)
    sp.add_argument("--sig", required=True)
    sp = add("relaxed", cmd_relaxed, "relaxed instance check (exit 0/1)")
    sp.add_argument("elem")
    sp.add_argument("concept")
    sp.add_argument("radius", type=int)
    sp.add_argument("--interp", required=True)
    sp.add_argument("--sig", required=True)
    add("cyclecheck", cmd_cyclecheck, "is the TBox cycle-restricted (exit 0/1)").add_argument(
        "--tbox", required=True)
    sp = add("experiment", cmd_experiment, "poset and rank experiments")
    sp.add_argument("which", choices=("table41", "poset"))
    sp.add_argument("--k", required=True, help="number of names; lists like 1,3 or 1-4 for table41")
    sp.add_argument("--n", required=True, help="nesting depth; lists allowed for table41")
    sp.add_argument("--csv", action="store_true")
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    out = _Out(args.json, stdout)
    try:
        return args.func(args, out)
    except BudgetExceeded as e:
        stderr.write(f"BudgetExceeded: {e}\n")
        return BUDGET
    except (EllatError, OSError, ValueError) as e:
        stderr.write(f"{type(e).__name__}: {e}\n")
        return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
