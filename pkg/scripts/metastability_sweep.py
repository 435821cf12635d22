"""Aggregate metastability witness E over a range of tolerances.

    python3 scripts/metastability_sweep.py --instances 50 --eps 0.4 0.2 0.1 0.05
"""
import argparse
from functools import partial

from polymet.config import ExperimentConfig, build_instances
from polymet.convergence import averages_net, uniform_rate_search
from polymet.jsonio import dumps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--instances", type=int, default=50)
    ap.add_argument("--degree", type=int, default=2)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.4, 0.2, 0.1, 0.05])
    ap.add_argument("--sampling", default="{i, 2i}")
    ap.add_argument("--bound", type=int, default=100_000)
    ap.add_argument("--start", type=int, default=1)
    args = ap.parse_args()

    cfg = ExperimentConfig.from_dict({"seed": args.seed, "x": "random_unit",
                                      "action": {"kind": "random_abelian", "degree": args.degree}})
    pairs = build_instances(cfg, args.instances)
    nets = [partial(averages_net, T, x) for T, x in pairs]
    rows = []
    for eps in args.eps:
        rep = uniform_rate_search(nets, eps, args.sampling, args.bound, start=args.start)
        witnesses = [c.witness for c in rep.certificates]
        rows.append({"eps": eps, "E": rep.E, "failures": rep.failures,
                     "median_witness": sorted(w for w in witnesses if w is not None)[len(witnesses) // 2]
                     if not rep.failures else None})
    print(dumps({"seed": args.seed, "sampling": args.sampling, "start": args.start, "rows": rows}))


if __name__ == "__main__":
    main()
