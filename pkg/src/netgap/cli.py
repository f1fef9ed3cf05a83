"""``netgap`` command line.

Exit codes: 0 when everything verified, 1 on any verification failure,
2 on invalid input (bad flags, unreadable JSON, impossible parameters).
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from netgap.algebra import gf
from netgap.coding import (NetworkCode, SupplyError, decode_receiver, local_kernels,
                           random_message, simulate, verify_solution)
from netgap.experiment import (PRESETS, ExperimentConfig, aligned_table, bundle_table, dumps,
                               run_experiment, run_preset, solve_network, write_bundle)
from netgap.gap import gap_report
from netgap.network import Network, generate, min_cuts
from netgap.subspace import pairwise_distance_code, spread, triple_span_search

log = logging.getLogger("netgap")


class InputError(Exception):
    """Raised for anything that should map to exit code 2."""


def _emit(obj: dict, out: str | None, table: str) -> None:
    text = dumps(obj)
    if out:
        Path(out).write_text(text)
        Path(out).with_suffix(".txt").write_text(table)
    else:
        sys.stdout.write(text)
    sys.stderr.write(table)


def _load(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _scheme(args) -> dict:
    if args.scheme == "scalar":
        if args.q is None:
            raise InputError("--scheme scalar needs --q")
        return {"scalar": args.q}
    if args.q is None or args.t is None:
        raise InputError("--scheme vector needs --q and --t")
    return {"vector": {"q": args.q, "t": args.t}}


# -- commands ------------------------------------------------------------------

def cmd_gen(args) -> int:
    net = generate(args.family, h=args.h, r=args.r, s=args.s, ell=args.ell,
                   extra_links=args.extra_links)
    cuts = min_cuts(net) if args.min_cut else {}
    d = net.to_dict()
    rows = [("family", args.family), ("h", net.h), ("nodes", len(net.nodes)),
            ("edges", len(net.edges)), ("receivers", len(net.receivers))]
    if cuts:
        d["min_cuts"] = cuts
        rows.append(("min-cut values", sorted(set(cuts.values()))))
    _emit(d, args.output, aligned_table(rows, ["field", "value"]))
    return 0


def cmd_solve(args) -> int:
    net = Network.from_dict(_load(args.network))
    code = solve_network(net, _scheme(args))
    rows = [("scheme", code.scheme), ("edges", len(code.matrices)),
            ("provenance", sorted(set(code.provenance.values())))]
    _emit(code.to_dict(), args.output, aligned_table(rows, ["field", "value"]))
    return 0


def _verify_table(rep) -> str:
    head = aligned_table([("mode", rep.mode), ("checked", rep.checked),
                          ("passed", rep.passed), ("failed", rep.failed),
                          ("inconsistent edges", len(rep.inconsistent))], ["field", "value"])
    bad = [r.to_dict() for r in rep.records if not r.passed][:20]
    return head + ("\nfailing receivers\n" + aligned_table(bad) if bad else "")


def cmd_verify(args) -> int:
    net = Network.from_dict(_load(args.network))
    code = NetworkCode.from_dict(_load(args.code))
    rep = verify_solution(net, code, args.workers)
    _emit(rep.to_dict(timing=not args.no_timing), args.output, _verify_table(rep))
    return 0 if rep.solved else 1


def cmd_simulate(args) -> int:
    net = Network.from_dict(_load(args.network))
    code = NetworkCode.from_dict(_load(args.code))
    rng = random.Random(args.seed)
    kernels = local_kernels(net, code)
    failures = []
    for m in range(args.messages):
        msg = random_message(code.field, net.h, code.t, rng)
        obs = simulate(net, code, msg, kernels)
        for rec in net.receivers:
            if decode_receiver(net, code, rec, obs[rec.id]) != msg:
                failures.append({"message": m, "receiver": rec.id})
    out = {"seed": args.seed, "messages": args.messages, "receivers": len(net.receivers),
           "decode_failures": len(failures), "failures": failures[:50]}
    table = aligned_table([(k, out[k]) for k in ("seed", "messages", "receivers",
                                                 "decode_failures")], ["field", "value"])
    _emit(out, args.output, table)
    return 0 if not failures else 1


def cmd_gap(args) -> int:
    rep = gap_report(args.family, q=args.q, t=args.t, ell=args.ell or 2, h=args.h, r=args.r,
                     sample_cap=args.sample_cap, seed=args.seed, exhaustive=args.exhaustive,
                     workers=args.workers)
    _emit(rep.to_dict(), args.output, aligned_table(rep.rows(), ["field", "value"]))
    return 0 if rep.vector_verified else 1


def cmd_search(args) -> int:
    ctx = gf(args.q)
    if args.kind == "spread":
        code = spread(args.n, args.k, ctx)
    elif args.kind == "pairwise":
        code = pairwise_distance_code(args.n, args.k, ctx, args.min_dist)
    else:
        if args.min_span is None or args.target is None:
            raise InputError("triple-span search needs --min-span and --target")
        code = triple_span_search(args.n, args.k, ctx, args.min_span, args.target)
    rows = [("n", code.n), ("k", code.k), ("q", args.q), ("size", len(code)),
            ("property", code.prop), ("verified", code.verified)]
    rows += sorted(code.notes.items())
    _emit(code.to_dict(), args.output, aligned_table(rows, ["field", "value"]))
    reached = code.notes.get("reached", True)
    return 0 if code.verified and reached else 1


def cmd_run(args) -> int:
    cfg = _load(args.config)
    try:
        config = ExperimentConfig(**cfg)
    except TypeError as exc:
        raise InputError(f"bad experiment config: {exc}") from exc
    if args.workers is not None:
        config.workers = args.workers
    bundle = run_experiment(config)
    _emit(bundle, args.output or config.output, bundle_table(bundle))
    return 0 if bundle["ok"] else 1


def cmd_preset(args) -> int:
    bundle = run_preset(args.name, seed=args.seed, workers=args.workers,
                        sample_cap=args.sample_cap, exhaustive=args.exhaustive)
    if args.output:
        js, txt = write_bundle(bundle, args.output, args.name)
        log.info("wrote %s and %s", js, txt)
        sys.stderr.write(bundle_table(bundle))
    else:
        _emit(bundle, None, bundle_table(bundle))
    return 0 if bundle["ok"] else 1


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="netgap",
                                 description="Scalar vs vector network coding on combination "
                                             "networks and their variants.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, *, workers=False, out=True):
        if out:
            p.add_argument("-o", "--output", help="write JSON here (table goes to .txt)")
        if workers:
            p.add_argument("--workers", type=int, default=None,
                           help="process count (fallback: NETGAP_WORKERS, else 1)")

    p = sub.add_parser("gen", help="generate a network")
    p.add_argument("--family", required=True, choices=["combination", "star", "plus", "tilde"])
    p.add_argument("--h", type=int)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--extra-links", type=int, default=0)
    p.add_argument("--min-cut", action="store_true", help="also report min-cut per receiver")
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="build a network code for a network")
    p.add_argument("network")
    p.add_argument("--scheme", required=True, choices=["scalar", "vector"])
    p.add_argument("--q", type=int)
    p.add_argument("--t", type=int)
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check every receiver's transfer matrix")
    p.add_argument("network")
    p.add_argument("code")
    p.add_argument("--no-timing", action="store_true", help="omit elapsed time from JSON")
    common(p, workers=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="push random messages through the network")
    p.add_argument("network")
    p.add_argument("code")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--messages", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gap", help="scalar vs vector field-size gap report")
    p.add_argument("--family", required=True, choices=["combination", "star", "plus", "tilde"])
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--ell", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--sample-cap", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive", action="store_true")
    common(p, workers=True)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("search", help="build a subspace code")
    p.add_argument("--kind", choices=["triple", "spread", "pairwise"], default="triple")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--min-span", type=int)
    p.add_argument("--min-dist", type=int, default=2)
    p.add_argument("--target", type=int)
    common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("run", help="run an experiment described by a JSON config")
    p.add_argument("config")
    common(p, workers=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", help="run a named reproduction")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-cap", type=int, default=2000)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("-o", "--output", help="directory for <name>.json and <name>.txt")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_preset)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InputError, SupplyError, ValueError, KeyError) as exc:
        # SupplyError: the requested instance exceeds what the construction supplies
        print(f"netgap: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
