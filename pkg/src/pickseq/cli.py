"""Command line front end: ``pickseq <command> ...``.

Exit codes: 0 success, 1 usage or I/O error, 2 a claim was falsified.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import adversary
from .core import DomainError, Instance, ResourceCapExceeded, format_rational
from .execution import egalitarian_welfare, execute, is_ef1
from .mms import classify, mms_exact
from .sequences import (
    count_all,
    count_balanced,
    format_sequence,
    make_round_robin,
    parse_sequence,
)
from .verify import (
    DEFAULT_SUITE,
    THEOREM_IDS,
    SearchSpec,
    census,
    check,
    checks_to_csv,
    default_spec,
    price_search,
    run_suite,
)

EXIT_OK, EXIT_USAGE, EXIT_FALSIFIED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(out, fmt: str, payload: dict, text: str, rows: list[dict] | None = None):
    if fmt == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
    elif fmt == "csv":
        rows = rows if rows is not None else [_flat(payload)]
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        out.write(buf.getvalue())
    else:
        out.write(text.rstrip("\n") + "\n")


def _flat(d: dict) -> dict:
    return {k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in d.items()}


def _read_instance(path: str) -> Instance:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    try:
        return Instance.from_json(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad instance file {path}: {exc}") from exc


def _table(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells)


# -- commands -------------------------------------------------------------------

def cmd_simulate(args, out):
    inst = _read_instance(args.instance)
    seq = parse_sequence(args.sequence, inst.n)
    alloc = execute(inst, seq)
    report = egalitarian_welfare(inst, alloc)
    ef1 = is_ef1(inst, alloc)
    payload = {
        "sequence": format_sequence(seq),
        "allocation": alloc.to_dict(),
        "utilities": [format_rational(u) for u in report.per_agent_utility],
        "egalitarian_welfare": format_rational(report.egalitarian),
        "ef1": ef1.holds,
        "ef1_witness": list(ef1.witness) if ef1.witness else None,
    }
    rows = [
        [i, sorted(b), format_rational(u)]
        for i, (b, u) in enumerate(zip(alloc.bundles, report.per_agent_utility), start=1)
    ]
    text = _table(["agent", "bundle", "utility"], rows)
    text += f"\negalitarian welfare: {format_rational(report.egalitarian)}\nEF1: {ef1.holds}"
    csv_rows = [{"agent": r[0], "bundle": " ".join(map(str, r[1])), "utility": r[2]} for r in rows]
    _emit(out, args.format, payload, text, csv_rows)
    return EXIT_OK


def cmd_mms(args, out):
    inst = _read_instance(args.instance)
    agents = [args.agent] if args.agent else range(1, inst.n + 1)
    results = [mms_exact(inst, i) for i in agents]
    payload = {"mms": [r.to_dict() for r in results]}
    rows = [[r.agent, format_rational(r.value), [sorted(b) for b in r.witness_partition]] for r in results]
    csv_rows = [{"agent": r[0], "mms": r[1]} for r in rows]
    _emit(out, args.format, payload, _table(["agent", "mms", "partition"], rows), csv_rows)
    return EXIT_OK


def cmd_classify(args, out):
    reports = [classify(parse_sequence(s, args.n)) for s in args.sequences]
    payload = {"reports": [r.to_dict() for r in reports]}
    text = "\n".join(r.verdict() for r in reports)
    _emit(out, args.format, payload, text, [_flat(r.to_dict()) for r in reports])
    return EXIT_OK


def cmd_enumerate(args, out):
    n, m = args.n, args.m
    c = census(n, m)
    payload = {
        "n": n,
        "m": m,
        "all_sequences": count_all(n, m),
        "balanced_sequences": c.total,
        "best": [format_sequence(s) for s in c.best],
        "worst": [format_sequence(s) for s in c.worst],
        "intermediate": [format_sequence(s) for s in c.intermediate],
    }
    lines = [f"|Pi| = {count_all(n, m)}, |R| = {c.total} (closed form {count_balanced(n, m)})"]
    for name in ("best", "worst", "intermediate"):
        lines.append(f"{name} ({len(payload[name])}):")
        lines.extend(f"  {s}" for s in payload[name])
    rows = [
        {"sequence": s, "class": name}
        for name in ("best", "worst", "intermediate")
        for s in payload[name]
    ]
    _emit(out, args.format, payload, "\n".join(lines), rows)
    return EXIT_OK


def cmd_generate(args, out):
    name = args.generator
    if name == "ef1_counterexample":
        if not args.sequence:
            raise UsageError("ef1_counterexample needs --sequence")
        seq = parse_sequence(args.sequence, args.n)
        g = adversary.gen_ef1_counterexample(seq)
    else:
        if args.n is None or args.m is None:
            raise UsageError(f"{name} needs --n and --m")
        seq = parse_sequence(args.sequence, args.n) if args.sequence else make_round_robin(args.n, args.m)
        if name == "mms_agent":
            g = adversary.gen_mms_agent(args.n, args.m, seq, args.agent or args.n)
        else:
            g = adversary.GENERATORS[name](args.n, args.m, seq)
    header = (
        f"# provenance: {g.provenance.value}; sequence {format_sequence(g.sequence)}; "
        f"target agent {g.target_agent}; expected {g.relation} "
        f"{format_rational(g.expected_ratio_or_welfare)}"
    )
    if g.witness is not None:
        header += f"; witness {format_sequence(g.witness)}"
    out.write(header + "\n")
    out.write(g.instance.to_json(indent=2) + "\n")
    return EXIT_OK


def _spec_from(args) -> SearchSpec | None:
    if args.samples is not None:
        return SearchSpec("random", (0,), args.samples, args.seed)
    if args.grid is not None:
        values = [v for v in args.grid.split(",") if v]
        return SearchSpec("exhaustive", tuple(values), seed=args.seed)
    return None


def cmd_verify(args, out):
    if args.theorem == "all":
        results = run_suite()
    else:
        if (args.n is None) != (args.m is None):
            raise UsageError("give both --n and --m or neither")
        if args.n is None:
            entries = [e for e in DEFAULT_SUITE if e[0] == args.theorem]
            if not entries:
                raise UsageError(f"unknown theorem id {args.theorem!r}")
            _, n, m, spec = entries[0]
        else:
            n, m, spec = args.n, args.m, None
        spec = _spec_from(args) or spec or default_spec(args.theorem, n, m)
        results = [check(args.theorem, n, m, spec)]
    payload = {"checks": [c.to_dict() for c in results]}
    if args.format == "csv":
        out.write(checks_to_csv(results))
    else:
        _emit(out, args.format, payload, "\n".join(c.summary() for c in results))
    return EXIT_OK if all(c.passed for c in results) else EXIT_FALSIFIED


def cmd_price(args, out):
    seq = parse_sequence(args.sequence)
    n, m = seq.n, seq.m
    spec = _spec_from(args) or default_spec("thm_3_4" if args.space == "balanced" else "thm_3_3", n, m)
    res = price_search(n, m, seq, args.space, spec)
    payload = res.to_dict()
    text = (
        f"{format_sequence(seq)} over {args.space} sequences: max ratio {payload['max_ratio']} "
        f"(bound {res.bound}) on {res.instances} instances"
    )
    if res.witness_sequence is not None:
        text += f"\nwitness sequence {format_sequence(res.witness_sequence)}"
    _emit(out, args.format, payload, text)
    return EXIT_FALSIFIED if res.exceeded else EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text", "csv"), default="json")

    search = _Parser(add_help=False)
    search.add_argument("--grid", help="exhaustive grid values, e.g. 0,1,2")
    search.add_argument("--samples", type=int, help="random instances instead of a grid")
    search.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="pickseq", description="Picking sequences: simulation, MMS and claim checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", parents=[common], help="run a sequence on an instance")
    s.add_argument("instance", help="instance JSON file, or - for stdin")
    s.add_argument("sequence", help="e.g. 1,2|2,1")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("mms", parents=[common], help="maximin shares of an instance")
    s.add_argument("instance")
    s.add_argument("--agent", type=int)
    s.set_defaults(func=cmd_mms)

    s = sub.add_parser("classify", parents=[common], help="guarantee and best/worst status")
    s.add_argument("sequences", nargs="+")
    s.add_argument("--n", type=int)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("enumerate", parents=[common], help="census of the balanced sequences")
    s.add_argument("n", type=int)
    s.add_argument("m", type=int)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("generate", help="emit a constructed instance")
    s.add_argument("generator", choices=sorted(adversary.GENERATORS))
    s.add_argument("--n", type=int)
    s.add_argument("--m", type=int)
    s.add_argument("--sequence")
    s.add_argument("--agent", type=int)
    s.set_defaults(func=cmd_generate, format="json")

    s = sub.add_parser("verify", parents=[common, search], help="check one claim, or all")
    s.add_argument("theorem", choices=THEOREM_IDS + ("all",))
    s.add_argument("--n", type=int)
    s.add_argument("--m", type=int)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("price", parents=[common, search], help="search for a large welfare ratio")
    s.add_argument("sequence")
    s.add_argument("--space", choices=("all", "balanced"), default="all")
    s.set_defaults(func=cmd_price)
    return p


def run_cli(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except (DomainError, ResourceCapExceeded, ValueError) as exc:
        err.write(f"pickseq: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE


def main():
    sys.exit(run_cli())
