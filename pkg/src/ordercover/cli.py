"""Command-line interface.

Subcommands: construct / verify / bounds / search / table / es / phylo.
JSON goes to stdout (or --out); order systems and Newick tree files pipe
through stdin/stdout.  Exit codes: 0 success or verification pass, 1
verification fail, 2 usage or domain error.
"""

import argparse
import json
import sys

from . import constructions, core, phylo, search, sequences
from .core import BETWEEN, NONBETWEEN, OrderSystem
from .sequences import CapacityError

_NBET_CAPACITY_N = 1 << 16  # largest n with m=2 tight-sequence support


def _parse_pattern_arg(text: str) -> core.PatternSet:
    words = [w.strip() for w in text.replace(";", ",").split(",") if w.strip()]
    return core.parse_patterns(words)


def _patterns_from_args(args) -> core.PatternSet:
    mode = getattr(args, "mode", None)
    if mode == "bet":
        return BETWEEN
    if mode == "nbet":
        return NONBETWEEN
    if getattr(args, "pi", None):
        return _parse_pattern_arg(args.pi)
    raise ValueError("a pattern set is required: pass --pi or --mode bet|nbet")


def _emit(args, text: str) -> None:
    out_path = getattr(args, "out", None)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, payload: dict) -> None:
    _emit(args, json.dumps(payload, indent=2) + "\n")


def _read_input(args) -> str:
    in_path = getattr(args, "infile", None)
    if in_path:
        with open(in_path) as fh:
            return fh.read()
    return sys.stdin.read()


def _cmd_construct(args) -> int:
    if args.mode == "nbet":
        if args.n > _NBET_CAPACITY_N:
            raise CapacityError(
                f"nbet construction supports n <= {_NBET_CAPACITY_N}"
            )
        system = constructions.construct_nbet_system(args.n)
        bound = constructions.nbet_exact(args.n)
    elif args.mode == "bet":
        system = constructions.construct_bet_system(args.n)
        bound = constructions.bet_bounds(args.n).upper
    else:
        pi = _patterns_from_args(args)
        system = constructions.construct_etp_system(args.n, pi)
        bound = constructions.etp_bounds(args.n, pi).upper
    print(f"size={system.size} bound={bound}", file=sys.stderr)
    _emit_json(args, system.to_json_dict())
    return 0


def _cmd_bounds(args) -> int:
    n = int(args.n)
    if args.mode == "nbet":
        v = constructions.nbet_exact(n)
        pair = constructions.BoundPair(v, v)
    elif args.mode == "bet":
        pair = constructions.bet_bounds(n)
    elif args.mode == "phylo":
        pair = constructions.phylo_bounds(n)
    else:
        pair = constructions.etp_bounds(n, _patterns_from_args(args))
    _emit_json(args, pair.to_json_dict())
    return 0


def _cmd_verify(args) -> int:
    system = OrderSystem.from_json_dict(json.loads(_read_input(args)))
    pi = _patterns_from_args(args)
    report = core.verify_system(
        system,
        pi,
        sample=args.sample,
        seed=args.seed,
        violation_cap=None if args.all_violations else args.cap,
        threads=args.threads,
    )
    payload = report.to_json_dict()
    payload["n"] = system.n
    payload["patterns"] = core.pattern_words(pi)
    _emit_json(args, payload)
    return 0 if report.passed else 1


def _cmd_search(args) -> int:
    pi = _patterns_from_args(args)
    result = search.min_system_size(
        args.n,
        pi,
        size_cap=args.cap,
        budget_seconds=args.budget,
        force=args.force,
        threads=args.threads,
    )
    _emit_json(args, result.to_json_dict())
    return 0


def _cmd_table(args) -> int:
    table = search.minimal_size_table()
    if args.json:
        _emit_json(args, table.to_json_dict())
    else:
        _emit(args, table.to_text() + "\n")
    return 0


def _cmd_es_build(args) -> int:
    seq = sequences.build_tight_sequence(args.m, args.d)
    _emit_json(args, seq.to_json_dict())
    return 0


def _cmd_es_check(args) -> int:
    report = sequences.es_guarantee_check(args.m, args.d, args.trials, args.seed)
    _emit_json(args, report.to_json_dict())
    return 0 if report.passed else 1


def _cmd_es_longest(args) -> int:
    seq = sequences.PointSequence.from_json_dict(json.loads(_read_input(args)))
    length, indices, directions = sequences.longest_monotone_subsequence(seq)
    _emit_json(
        args,
        {"length": length, "indices": list(indices), "directions": list(directions)},
    )
    return 0


def _cmd_phylo_construct(args) -> int:
    if args.n > phylo.MAX_VERIFY_N_SAMPLED:
        raise CapacityError(
            f"tree construction supports n <= {phylo.MAX_VERIFY_N_SAMPLED}"
        )
    ts = phylo.construct_ept_set(args.n)
    print(
        f"trees={ts.size} bound={constructions.phylo_bounds(args.n).upper}",
        file=sys.stderr,
    )
    _emit(args, phylo.serialize_tree_set(ts))
    return 0


def _cmd_phylo_verify(args) -> int:
    ts = phylo.parse_tree_set(_read_input(args))
    report = phylo.verify_ept(
        ts,
        sample=args.sample,
        seed=args.seed,
        violation_cap=None if args.all_violations else args.cap,
    )
    payload = report.to_json_dict()
    payload["n"] = ts.n
    payload["trees"] = ts.size
    _emit_json(args, payload)
    return 0 if report.passed else 1


def _cmd_phylo_bounds(args) -> int:
    _emit_json(args, constructions.phylo_bounds(int(args.n)).to_json_dict())
    return 0


def _add_verify_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sample", type=int, default=None, help="sampled mode: number of draws")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled mode (echoed in output)")
    p.add_argument("--cap", type=int, default=100, help="max violations to report")
    p.add_argument("--all-violations", action="store_true", help="report every violation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ordercover",
        description="Construct, verify, and minimise order-systems for ternary "
        "order constraints, and convert them to covering tree sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a covering order-system")
    p.add_argument("--mode", choices=("bet", "nbet", "etp"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pi", help="comma-separated S3 words, e.g. 123,321 (etp mode)")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("bounds", help="lower/upper/exact size bounds")
    p.add_argument("--mode", choices=("bet", "nbet", "etp", "phylo"), required=True)
    p.add_argument("--n", required=True, help="any positive integer (arbitrary precision)")
    p.add_argument("--pi", help="pattern words for etp mode")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("verify", help="verify an order-system JSON from stdin or --in")
    p.add_argument("--mode", choices=("bet", "nbet"), help="shorthand for the two classic pattern sets")
    p.add_argument("--pi", help="explicit pattern words")
    p.add_argument("--in", dest="infile", help="order-system JSON file (default: stdin)")
    p.add_argument("--threads", type=int, default=1)
    _add_verify_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("search", help="exact minimisation by exhaustive stratified search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("bet", "nbet"))
    p.add_argument("--pi")
    p.add_argument("--cap", type=int, default=None, help="largest system size to try")
    p.add_argument("--budget", type=float, default=None, help="wall-clock seconds before giving up")
    p.add_argument("--force", action="store_true", help="override the n cost guard")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("table", help="minimum sizes for n = 3..7")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("es", help="extremal sequences and monotone subsequences")
    essub = p.add_subparsers(dest="es_command", required=True)
    q = essub.add_parser("build", help="tight sequence with no monotone (m+1)-subsequence")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--out")
    q.set_defaults(func=_cmd_es_build)
    q = essub.add_parser("check", help="stress-test the m+1 guarantee on random sequences")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--trials", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out")
    q.set_defaults(func=_cmd_es_check)
    q = essub.add_parser("longest", help="longest monotone subsequence of a JSON sequence")
    q.add_argument("--in", dest="infile", help="sequence JSON file (default: stdin)")
    q.add_argument("--out")
    q.set_defaults(func=_cmd_es_longest)

    p = sub.add_parser("phylo", help="triplet-covering tree sets")
    physub = p.add_subparsers(dest="phylo_command", required=True)
    q = physub.add_parser("construct", help="build a covering tree set (Newick lines)")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--out")
    q.set_defaults(func=_cmd_phylo_construct)
    q = physub.add_parser("verify", help="verify triplet coverage of Newick trees")
    q.add_argument("--trees", dest="infile", help="Newick file, one tree per line (default: stdin)")
    _add_verify_flags(q)
    q.add_argument("--out")
    q.set_defaults(func=_cmd_phylo_verify)
    q = physub.add_parser("bounds", help="tree-cover size bounds")
    q.add_argument("--n", required=True, help="any positive integer (arbitrary precision)")
    q.add_argument("--out")
    q.set_defaults(func=_cmd_phylo_bounds)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
