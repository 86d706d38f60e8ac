"""Command-line interface: ``gcdfabric {run,verify,compare,export}``."""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
import time

import numpy as np

from . import __doc__ as _pkg_doc
from ._engine import get_backend
from .carry import carry_netlist
from .cost import SCHEMA_VERSION, CostWeights, compare
from .machines import (ArchVariant, CycleLimitExceeded, DomainError, build_machine,
                       default_max_cycles)
from .netlist import export
from .sad import Mode, sad_netlist
from .verify import EXHAUSTIVE_MAX_WIDTH, boundary_pairs, exhaustive_pairs, random_pairs, sweep

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_TIMEOUT = 4
EXIT_MISMATCH = 5
EXIT_IO = 6

ARCHES = [v.value for v in ArchVariant]
TABLE_ORDER = ["optimized-gcdsad", "gcdsad", "gcd2sub", "for-loop"]


def _fail(code, msg):
    print(f"error: {msg}", file=sys.stderr)
    return code


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_run(args):
    machine = build_machine(args.arch, args.width)
    max_cycles = args.max_cycles or default_max_cycles(args.width)
    try:
        result = machine.run(args.a, args.b, max_cycles)
    except DomainError as exc:
        return _fail(EXIT_DOMAIN, str(exc))
    except CycleLimitExceeded as exc:
        return _fail(EXIT_TIMEOUT, str(exc))
    if args.format == "json":
        doc = {"schema_version": SCHEMA_VERSION, "arch": args.arch, "width": args.width,
               "a": args.a, "b": args.b, "gcd": result.g, "cycles": result.cycles}
        if args.trace:
            doc["trace"] = [{"cycle": r.cycle, "state": r.state.value, "X": r.x, "Y": r.y}
                            for r in result.trace]
        print(json.dumps(doc, indent=2))
    else:
        print(f"arch={args.arch} width={args.width} a={args.a} b={args.b}")
        print(f"gcd={result.g}")
        print(f"cycles={result.cycles}")
        if args.trace:
            sys.stdout.write(result.trace.to_csv())
    return EXIT_OK


def _resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get("GCDFABRIC_SEED")
    if env:
        return int(env)
    return secrets.randbits(32)


def cmd_verify(args):
    arches = args.arch or ARCHES
    if args.mode == "exhaustive":
        if args.width > EXHAUSTIVE_MAX_WIDTH:
            return _fail(EXIT_USAGE, f"exhaustive mode is limited to width <= {EXHAUSTIVE_MAX_WIDTH}")
        a, b = exhaustive_pairs(args.width)
        seed_s = "-"
    else:
        seed = _resolve_seed(args.seed)
        a, b = random_pairs(args.width, args.count, seed)
        ba, bb = boundary_pairs(args.width)
        a = np.concatenate([ba, a])
        b = np.concatenate([bb, b])
        seed_s = str(seed)
    t0 = time.perf_counter()
    result = sweep(args.width, a, b, arches, args.max_cycles)
    elapsed = time.perf_counter() - t0
    print(f"verify width={args.width} mode={args.mode} seed={seed_s} pairs={result.pairs} "
          f"max_cycles={result.max_cycles}")
    for s in result.summaries:
        print(f"{s.variant}: checked={s.checked} over_budget={s.over_budget} "
              f"mismatches={len(s.mismatches)}")
        for m in s.mismatches[:5]:
            print(f"  a={m.a} b={m.b} expected gcd={m.expected_g} cycles={m.expected_cycles} "
                  f"got gcd={m.got_g} cycles={m.got_cycles}")
    print(f"result: {'PASS' if result.ok else 'FAIL'} mismatches={result.mismatch_count}")
    print(f"elapsed {elapsed:.2f}s backend={get_backend()}", file=sys.stderr)
    return EXIT_OK if result.ok else EXIT_MISMATCH


def cmd_compare(args):
    weights = CostWeights()
    if args.weights:
        try:
            with open(args.weights, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            return _fail(EXIT_IO, f"cannot read weights file: {exc}")
        except json.JSONDecodeError as exc:
            return _fail(EXIT_USAGE, f"malformed weights file: {exc}")
        try:
            weights = CostWeights.from_dict(raw)
        except ValueError as exc:
            return _fail(EXIT_USAGE, f"malformed weights file: {exc}")
    table = compare(args.arch or TABLE_ORDER, args.width, weights)
    text = {"text": table.to_text, "json": table.to_json, "csv": table.to_csv}[args.format]()
    try:
        _write(text, args.out)
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))
    return EXIT_OK


def cmd_export(args):
    if args.what == "datapath":
        machine = build_machine(args.arch, args.width)
        if machine.behavioral:
            return _fail(EXIT_USAGE, f"{args.arch} is behavioral and has no netlist")
        netlists = list(machine.blocks.values())
    else:
        nand_only = args.arch == ArchVariant.OPTIMIZED_GCDSAD.value
        if args.what == "carry":
            netlists = [carry_netlist(args.width, nand_only=nand_only)]
        else:
            netlists = [sad_netlist(args.width, Mode.NAND_ONLY if nand_only else Mode.MIXED)]
    text = "".join(export(nl, args.format) for nl in netlists)
    try:
        _write(text, args.out)
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))
    return EXIT_OK


def _width(s):
    w = int(s)
    if not 1 <= w <= 64:
        raise argparse.ArgumentTypeError("width must be between 1 and 64")
    return w


def build_parser():
    p = argparse.ArgumentParser(prog="gcdfabric", description=_pkg_doc)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="compute one GCD on a chosen architecture")
    r.add_argument("--arch", choices=ARCHES, default="optimized-gcdsad")
    r.add_argument("--width", type=_width, default=32)
    r.add_argument("--a", type=int, required=True)
    r.add_argument("--b", type=int, required=True)
    r.add_argument("--max-cycles", type=int, default=None)
    r.add_argument("--format", choices=["text", "json"], default="text")
    r.add_argument("--trace", action="store_true", help="also print the cycle trace")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="cross-architecture agreement sweep")
    v.add_argument("--width", type=_width, default=8)
    v.add_argument("--arch", choices=ARCHES, action="append")
    v.add_argument("--mode", choices=["exhaustive", "random", "seeded"], default="exhaustive")
    v.add_argument("--count", type=int, default=10000)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--max-cycles", type=int, default=None)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compare", help="area/delay/ADP comparison table")
    c.add_argument("--width", type=_width, default=32)
    c.add_argument("--arch", choices=ARCHES, action="append")
    c.add_argument("--weights", default=None, help="JSON file of gate weights")
    c.add_argument("--format", choices=["text", "json", "csv"], default="text")
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_compare)

    e = sub.add_parser("export", help="write a netlist as text")
    e.add_argument("--arch", choices=ARCHES, default="optimized-gcdsad")
    e.add_argument("--width", type=_width, default=32)
    e.add_argument("--what", choices=["sad", "carry", "datapath"], default="sad")
    e.add_argument("--format", choices=["lines", "dot"], default="lines")
    e.add_argument("--out", default=None)
    e.set_defaults(func=cmd_export)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "verify" and args.mode == "seeded" and args.seed is None \
            and not os.environ.get("GCDFABRIC_SEED"):
        return _fail(EXIT_USAGE, "seeded mode needs --seed or GCDFABRIC_SEED")
    if args.command == "run" and args.max_cycles is not None and args.max_cycles < 2:
        return _fail(EXIT_USAGE, "--max-cycles must be >= 2")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
