"""Command-line front end.

Exit status: 0 for YES / success, 1 for NO, 2 for bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .dp import solve
from .graph import InputError, Instance, bfs_layers, check_witness, dump_instance, parse_graph, parse_instance
from .hardness import (
    dump_digraph,
    dump_thue,
    format_word,
    hword_to_vcr,
    parse_digraph,
    parse_thue,
    parse_word,
    split_thue_rules,
    thue_to_hword,
    triangle_lift,
)
from .oracle import TooLargeError, oracle_answer, oracle_witness
from .planar import LayeredInstance, shift_solve
from .treedecomp import min_fill_decompose, nicify, parse_td, validate_td

EXIT_YES, EXIT_NO, EXIT_INPUT = 0, 1, 2


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def _load(args) -> tuple[Instance, object]:
    graph = parse_graph(_read(args.graph))
    spec = parse_instance(_read(args.instance))
    return spec.bind(graph), spec


def _witness_lines(sets) -> list[str]:
    return [f"{i}: {' '.join(map(str, sorted(S)))}".rstrip() for i, S in enumerate(sets)]


def _echo(inst: Instance, width: int | None) -> dict:
    doc = {
        "problem": inst.kind.value,
        "n": inst.graph.n,
        "m": inst.graph.m,
        "k": inst.k,
        "ell": inst.ell,
        "mode": inst.mode.value,
    }
    if width is not None:
        doc["td_width"] = width
    return doc


def _report(args, inst: Instance, answer: bool, witness, stats: dict) -> int:
    if answer:
        # never print a witness the independent validator rejects
        check_witness(inst, witness)
    if args.json:
        doc = {"answer": "YES" if answer else "NO"}
        if args.witness:
            doc["witness"] = [sorted(S) for S in witness] if answer else None
        if args.stats:
            doc["stats"] = stats
        print(json.dumps(doc, sort_keys=True))
    else:
        print("YES" if answer else "NO")
        if args.witness and answer:
            print("\n".join(_witness_lines(witness)))
        if args.stats:
            for key in sorted(stats):
                value = stats[key]
                if isinstance(value, (list, dict)):
                    value = json.dumps(value, sort_keys=True)
                print(f"{key}={value}")
    return EXIT_YES if answer else EXIT_NO


def cmd_solve(args) -> int:
    inst, spec = _load(args)
    if args.engine == "shift":
        if spec.layers is not None:
            layers = spec.layers
        elif spec.outer is not None:
            layers = bfs_layers(inst.graph, spec.outer)
        else:
            raise InputError("field 'outer' or 'layers' is required for --engine shift")
        res = shift_solve(LayeredInstance(inst, layers), threads=args.threads)
        extra = {"offsets_tried": res.offsets_tried, "offsets_skipped": res.offsets_skipped}
    else:
        ntd = None
        if args.td:
            td = parse_td(_read(args.td))
            ntd = nicify(td, inst.graph)
        elif inst.graph.n:
            ntd = nicify(min_fill_decompose(inst.graph))
        res = solve(inst, ntd, threads=args.threads)
        extra = {"lengths_tried": res.lengths_tried,
                 "node_max_table": {str(k + 1): v for k, v in sorted(res.node_max_table.items())}}
    stats = {**_echo(inst, res.width), "sigmas_tried": res.sigmas_tried, "max_table": res.max_table,
             "seconds": round(res.seconds, 6), **extra}
    return _report(args, inst, res.answer, res.witness, stats)


def cmd_oracle(args) -> int:
    inst, _ = _load(args)
    answer = oracle_answer(inst)
    witness = oracle_witness(inst) if answer else None
    return _report(args, inst, answer, witness, _echo(inst, None))


def _words(args) -> tuple[tuple[str, ...], tuple[str, ...]]:
    return parse_word(args.source), parse_word(args.target)


def cmd_gen_hword(args) -> int:
    H = parse_digraph(_read(args.digraph))
    s, t = _words(args)
    red = hword_to_vcr(H, s, t, cap=args.cap)
    _write(f"{args.out}.gr", red.inst.graph.to_gr())
    _write(f"{args.out}.json", dump_instance(red.inst))
    _write(f"{args.out}.td", red.td.to_td(red.inst.graph.n))
    print(f"n={red.inst.graph.n} m={red.inst.graph.m} k={red.inst.k} ell={red.inst.ell} "
          f"width={red.td.width}")
    return EXIT_YES


def cmd_gen_thue2h(args) -> int:
    ts = parse_thue(_read(args.thue))
    s, t = _words(args)
    H, ps, pt = thue_to_hword(ts, s, t)
    _write(args.out, dump_digraph(H))
    print(f"source {format_word(ps)}")
    print(f"target {format_word(pt)}")
    return EXIT_YES


def cmd_gen_splitrules(args) -> int:
    text = dump_thue(split_thue_rules(parse_thue(_read(args.thue))))
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_YES


def cmd_gen_trilift(args) -> int:
    inst, _ = _load(args)
    lifted = triangle_lift(inst)
    _write(f"{args.out}.gr", lifted.graph.to_gr())
    _write(f"{args.out}.json", dump_instance(lifted))
    print(f"n={lifted.graph.n} m={lifted.graph.m}")
    return EXIT_YES


def cmd_td_compute(args) -> int:
    graph = parse_graph(_read(args.graph))
    text = min_fill_decompose(graph).to_td(graph.n)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_YES


def cmd_td_nicify(args) -> int:
    graph = parse_graph(_read(args.graph))
    ntd = nicify(parse_td(_read(args.td)), graph)
    sys.stdout.write(ntd.to_text())
    return EXIT_YES


def cmd_td_validate(args) -> int:
    graph = parse_graph(_read(args.graph))
    td = parse_td(_read(args.td))
    validate_td(graph, td)
    print(f"OK width={td.width}")
    return EXIT_YES


def _output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--witness", action="store_true", help="print the reconfiguration sequence")
    p.add_argument("--stats", action="store_true", help="print run statistics")
    p.add_argument("--json", action="store_true", help="emit one JSON document")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reconftw", description="Reconfiguration on bounded treewidth graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide an instance with the signature DP or layer shifting")
    p.add_argument("--graph", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--td", help="tree decomposition (.td); min-fill is used when omitted")
    p.add_argument("--engine", choices=("dp", "shift"), default="dp")
    p.add_argument("--threads", type=int, default=1)
    _output_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="decide an instance by exhaustive search")
    p.add_argument("--graph", required=True)
    p.add_argument("--instance", required=True)
    _output_flags(p)
    p.set_defaults(func=cmd_oracle)

    gen = sub.add_parser("gen", help="hardness-construction generators").add_subparsers(dest="gen", required=True)
    p = gen.add_parser("hword", help="H-word problem to VC-R (.gr, .json, .td)")
    p.add_argument("--digraph", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--cap", type=int, help="upper limit for the sequence length")
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=cmd_gen_hword)

    p = gen.add_parser("thue2h", help="one-position Thue system to an H-word digraph")
    p.add_argument("--thue", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--out", required=True, help="digraph output file")
    p.set_defaults(func=cmd_gen_thue2h)

    p = gen.add_parser("splitrules", help="split Thue rules so each changes one position")
    p.add_argument("--thue", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_splitrules)

    p = gen.add_parser("trilift", help="VC-R to FVS-R by lifting edges to triangles")
    p.add_argument("--graph", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=cmd_gen_trilift)

    td = sub.add_parser("td", help="tree decomposition tools").add_subparsers(dest="td_cmd", required=True)
    p = td.add_parser("compute", help="min-fill tree decomposition")
    p.add_argument("--graph", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_td_compute)
    p = td.add_parser("nicify", help="convert to a nice tree decomposition")
    p.add_argument("--graph", required=True)
    p.add_argument("--td", required=True)
    p.set_defaults(func=cmd_td_nicify)
    p = td.add_parser("validate", help="check a decomposition against a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--td", required=True)
    p.set_defaults(func=cmd_td_validate)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_YES
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, TooLargeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())
