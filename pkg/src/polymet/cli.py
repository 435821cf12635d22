"""Command-line front end.

    polymet verify <suite> [--json]
    polymet run --config cfg.json --out rows.csv
    polymet metastable --config cfg.json
    polymet gen --kind canonical_wreath --from -3 --to 3

Exit status: 0 on success, 1 when a suite fails, 2 on usage or config errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from functools import partial
from pathlib import Path

from . import suites
from .config import RUN_SCHEMA, ConfigError, ExperimentConfig, build_instances
from .convergence import average_profile, averages_net, uniform_rate_search
from .errors import PolymetError
from .jsonio import dumps, fmt_float
from .leibman import sequence_from_json

CSV_HEADER = "n,avg_norm,spread_from_n"


class UsageError(Exception):
    pass


def cmd_verify(args) -> int:
    report = suites.run_suite(args.suite, seed=args.seed)
    if args.json:
        print(dumps(report))
    else:
        parts = report.get("suites", [report])
        for part in parts:
            for check in part["checks"]:
                print(f"{'PASS' if check['passed'] else 'FAIL'}  {part['suite']}/{check['name']}")
    return 0 if report["passed"] else 1


def cmd_run(args) -> int:
    cfg = ExperimentConfig.load(args.config, RUN_SCHEMA)
    (T, x), = build_instances(cfg, 1)
    if x.shape != (T.dim,):
        raise ConfigError(f"x has length {x.size}, the action acts on R^{T.dim}", "/x")
    rows = average_profile(T, x, cfg.n_values(), cfg.window_end(), cfg.folner)
    lines = [CSV_HEADER] + [f"{r['n']},{fmt_float(r['avg_norm'])},{fmt_float(r['spread_from_n'])}" for r in rows]
    Path(args.out).write_text("\n".join(lines) + "\n")
    return 0


def cmd_metastable(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    meta = cfg.metastability
    if meta.eps <= 0:
        raise UsageError(f"/metastability/eps: eps must be > 0, got {meta.eps}")
    instances = build_instances(cfg, meta.instances)
    nets = [partial(averages_net, T, x, folner=cfg.folner) for T, x in instances]
    report = uniform_rate_search(nets, meta.eps, meta.sampling, meta.bound, start=meta.start,
                                 threads=args.threads)
    out = {"seed": cfg.seed, "start": meta.start, "instances": meta.instances, **report.to_json()}
    text = dumps(out)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def cmd_gen(args) -> int:
    kind = args.kind.strip()
    spec = json.loads(kind) if kind.startswith("{") else {"kind": kind}
    seq = sequence_from_json(spec)
    print("j,value")
    for j in range(args.lo, args.hi + 1):
        print(f"{j},{dumps(seq[j].to_json(), indent=0)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polymet", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("suite", choices=[*suites.SUITES, "all"])
    v.add_argument("--json", action="store_true", help="print a JSON summary")
    v.add_argument("--seed", type=int, default=suites.DEFAULT_SEED)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("run", help="write the averages profile of one instance as CSV")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_run)

    m = sub.add_parser("metastable", help="search metastability witnesses over seeded instances")
    m.add_argument("--config", required=True)
    m.add_argument("--out", default=None, help="write JSON here instead of stdout")
    m.add_argument("--threads", type=int, default=None, help="worker cap (default: PET_THREADS)")
    m.set_defaults(func=cmd_metastable)

    g = sub.add_parser("gen", help="print a sequence table")
    g.add_argument("--kind", required=True, help="kind name or a JSON sequence spec")
    g.add_argument("--from", dest="lo", type=int, default=-3)
    g.add_argument("--to", dest="hi", type=int, default=3)
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error at {exc.pointer or '/'}: {exc.message}", file=sys.stderr)
        return 2
    except (UsageError, PolymetError, json.JSONDecodeError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
