"""Command-line interface: ``chipfire <command> ...``.

Exit codes: 0 success, 1 invalid input or runtime error, 2 usage error,
3 conjecture violated (a finding, not a crash), 4 fuzzing found an
unreachable-set escape.
"""
from __future__ import annotations

import argparse
import csv
import json
import shlex
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .combinatorics import (
    check_permutation,
    contains_pattern,
    inversions,
    kappa,
    kd_catalan,
    lds,
)
from .errors import ChipFireError
from .search import (
    VIOLATED,
    count_stable,
    enumerate_stable,
    max_inversions_search,
    max_lds_search,
    reachability_fuzz,
    verify_conjecture,
)
from .strategies import parse_strategy, run_strategy
from .tree import TreeParams, dump_configuration, initial_configuration

SCHEMA = "chipfire/1"
EXIT_ERROR, EXIT_VIOLATED, EXIT_ESCAPE = 1, 3, 4

REPORT_FIELDS = ["k", "ell", "mode", "value", "closed_form", "explored", "pruned", "verdict", "witness"]


def _perm_text(p) -> str:
    return " ".join(map(str, p))


def _emit_json(payload: dict, out) -> None:
    json.dump(payload, out, sort_keys=False)
    out.write("\n")


def _emit_csv(header: Sequence[str], rows, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _record(args, command: str, payload: dict, started: float) -> dict:
    record = {"schema": SCHEMA, "version": __version__, "command": command,
              "argv": getattr(args, "argv", None)}
    record.update(payload)
    record["duration_ms"] = round((time.perf_counter() - started) * 1000, 3)
    return record


# ------------------------------------------------------------------ commands


def cmd_catalan(args, out) -> int:
    if args.k < 1 or args.m < 0:
        raise ChipFireError("catalan needs --k >= 1 and --m >= 0")
    out.write(f"{kd_catalan(args.k, args.m)}\n")
    return 0


def cmd_kappa(args, out) -> int:
    p = TreeParams(args.k, args.ell)
    out.write(f"{kappa(p.k, p.ell)}\n")
    return 0


def cmd_simulate(args, out) -> int:
    started = time.perf_counter()
    p = TreeParams(args.k, args.ell)
    strategy = parse_strategy(args.strategy, base_dir=Path.cwd())
    dumps = []
    if args.dump:
        dumps.append(("initial", dump_configuration(initial_configuration(p))))

        def on_fire(e, c):
            dumps.append((f"after {e}", dump_configuration(c)))

    else:
        on_fire = None
    plan = run_strategy(p, strategy, on_fire=on_fire)
    perm = tuple(plan.result)

    if args.format == "json":
        payload = {"k": p.k, "ell": p.ell, "strategy": strategy.name, "permutation": list(perm)}
        if args.plan:
            payload["plan"] = [{"vertex": e.vertex, "tuple": list(e.tuple)} for e in plan.events]
        if args.dump:
            payload["dump"] = [{"label": label, "configuration": text} for label, text in dumps]
        _emit_json(_record(args, "simulate", payload, started), out)
    elif args.format == "csv":
        _emit_csv(["k", "ell", "strategy", "permutation"], [[p.k, p.ell, strategy.name, _perm_text(perm)]], out)
    else:
        out.write(_perm_text(perm) + "\n")
        if args.plan:
            out.write("# plan\n")
            for e in plan.events:
                out.write(f"v{e.vertex}: {_perm_text(e.tuple)}\n")
        for label, text in dumps:
            out.write(f"# {label}\n{text}\n")
    return 0


def _report_row(k, ell, mode, value, closed=None, explored=None, pruned=None, verdict=None, witness=None):
    return {
        "k": k,
        "ell": ell,
        "mode": mode,
        "value": value,
        "witness": list(witness) if witness is not None else None,
        "closed_form": closed,
        "explored": explored,
        "pruned": pruned,
        "verdict": verdict,
    }


def cmd_enumerate(args, out) -> int:
    started = time.perf_counter()
    p = TreeParams(args.k, args.ell)
    mode = args.mode
    status = 0
    if mode == "list":
        if args.force and args.limit is None:
            raise ChipFireError("--mode list with --force also needs --limit N")
        perms = enumerate_stable(p, jobs=args.jobs, limit=args.limit, force=args.force)
        if args.format == "json":
            perms = [list(x) for x in perms]
            row = _report_row(p.k, p.ell, mode, len(perms), closed=kappa(p.k, p.ell))
            row["permutations"] = perms
            _emit_json(_record(args, "enumerate", row, started), out)
        elif args.format == "csv":
            _emit_csv(["index", "permutation"], ((i, _perm_text(x)) for i, x in enumerate(perms, 1)), out)
        else:
            for x in perms:
                out.write(_perm_text(x) + "\n")
        return 0

    if mode == "count":
        n = count_stable(p, jobs=args.jobs, force=args.force)
        row = _report_row(p.k, p.ell, mode, n, closed=kappa(p.k, p.ell), explored=n)
        if args.format == "text":
            out.write(f"{n}\n")
            return 0
    elif mode == "max-inversions":
        r = max_inversions_search(p, jobs=args.jobs, force=args.force)
        row = _report_row(p.k, p.ell, mode, r.value, r.closed_form, r.nodes_explored, r.pruned_count,
                          "MATCH" if r.matches_closed_form else "MISMATCH", r.witness)
    elif mode == "max-lds":
        r = max_lds_search(p, jobs=args.jobs, prune=not args.no_prune, force=args.force)
        row = _report_row(p.k, p.ell, mode, r.value, r.closed_form, r.nodes_explored, r.pruned_count,
                          None, r.witness)
    elif mode == "conjecture":
        c = verify_conjecture(p, jobs=args.jobs, force=args.force)
        row = _report_row(p.k, p.ell, mode, c.d_value, c.closed_form, c.search.nodes_explored,
                          c.search.pruned_count, c.verdict, c.search.witness)
        row["z_lds"] = c.z_lds
        if c.witness_plan is not None:
            row["plan"] = [{"vertex": e.vertex, "tuple": list(e.tuple)} for e in c.witness_plan.events]
        if c.verdict == VIOLATED:
            status = EXIT_VIOLATED
    else:  # fuzz
        f = reachability_fuzz(p, args.trials, args.seed, force=args.force)
        row = _report_row(p.k, p.ell, mode, len(f.escapes), explored=f.trials,
                          verdict="OK" if f.ok else "ESCAPE")
        row.update(seed=f.seed, trials=f.trials, universe=f.universe, distinct_seen=f.distinct_seen)
        row["escapes"] = [
            {"trial": e.trial, "seed": e.seed, "interleaved": e.interleaved, "result": list(e.result),
             "plan": [{"vertex": ev.vertex, "tuple": list(ev.tuple)} for ev in e.plan.events]}
            for e in f.escapes
        ]
        if not f.ok:
            status = EXIT_ESCAPE

    if args.format == "json":
        _emit_json(_record(args, "enumerate", row, started), out)
    elif args.format == "csv":
        flat = dict(row)
        flat["witness"] = _perm_text(row["witness"]) if row.get("witness") else ""
        _emit_csv(REPORT_FIELDS, [[flat.get(f, "") if flat.get(f) is not None else "" for f in REPORT_FIELDS]], out)
    else:
        for key in ("value", "closed_form", "verdict", "z_lds", "explored", "pruned", "distinct_seen"):
            if row.get(key) is not None:
                out.write(f"{key} {row[key]}\n")
        if row.get("witness"):
            out.write(f"witness {_perm_text(row['witness'])}\n")
    return status


def _read_permutation(args) -> tuple:
    if args.file:
        text = Path(args.file).read_text() if args.file != "-" else sys.stdin.read()
        values = text.split()
    else:
        values = args.permutation
    if not values:
        raise ChipFireError("analyze needs a permutation (arguments or --file)")
    try:
        ints = [int(x) for x in values]
    except ValueError:
        raise ChipFireError("permutation entries must be integers") from None
    return check_permutation(ints)


def cmd_analyze(args, out) -> int:
    started = time.perf_counter()
    perm = _read_permutation(args)
    result = {"permutation": list(perm), "inversions": inversions(perm), "lds": lds(perm)}
    if args.pattern:
        sigma = check_permutation(args.pattern)
        where = contains_pattern(perm, sigma)
        result.update(pattern=list(sigma), contains=where is not None,
                      witness=list(where) if where is not None else None)
    if args.format == "json":
        _emit_json(_record(args, "analyze", result, started), out)
    elif args.format == "csv":
        row = [result["inversions"], result["lds"]]
        if args.pattern:
            row += [_perm_text(result["pattern"]), result["contains"], _perm_text(result["witness"] or ())]
        else:
            row += ["", "", ""]
        _emit_csv(["inversions", "lds", "pattern", "contains", "witness_positions"], [row], out)
    else:
        out.write(f"inversions {result['inversions']}\nlds {result['lds']}\n")
        if args.pattern:
            if result["contains"]:
                out.write(f"contains {_perm_text(sigma)}: witness positions {_perm_text(result['witness'])}\n")
            else:
                out.write(f"avoids {_perm_text(sigma)}\n")
    return 0


# ------------------------------------------------------------------ parser


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chipfire", description="Labeled chip-firing on directed k-ary trees.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalan", help="k-dimensional Catalan number C_{k,m}")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_catalan)

    p = sub.add_parser("kappa", help="number of stable configurations from k**ell chips")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.set_defaults(func=cmd_kappa)

    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "json", "csv"), default="text")

    p = sub.add_parser("simulate", parents=[fmt], help="stabilize with a named strategy")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--strategy", default="identity",
                   help="identity | unbundle | random:<seed> | compose:<spec-file>")
    p.add_argument("--plan", action="store_true", help="also print every firing event")
    p.add_argument("--dump", action="store_true", help="print the configuration after every firing")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("enumerate", parents=[fmt], help="exhaustive enumeration and searches")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--mode", default="count",
                   choices=("list", "count", "max-inversions", "max-lds", "conjecture", "fuzz"))
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--force", action="store_true", help="ignore the size guard")
    p.add_argument("--no-prune", action="store_true", help="max-lds: scan everything")
    p.add_argument("--trials", type=_positive, default=1000, help="fuzz: number of random runs")
    p.add_argument("--seed", type=int, default=0, help="fuzz: master seed")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("analyze", parents=[fmt], help="inversions, LDS and pattern queries")
    p.add_argument("permutation", nargs="*")
    p.add_argument("--file", help="read a whitespace-separated permutation ('-' for stdin)")
    p.add_argument("--pattern", nargs="+", type=int)
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = shlex.join(["chipfire", *argv])
    try:
        return args.func(args, out)
    except (ChipFireError, OSError) as exc:
        print(f"chipfire: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
