"""Averages of x under k -> rot(theta k^2) and their tail spreads.

    python3 scripts/quadratic_decay.py --end 8000 --out decay.csv
"""
import argparse

import numpy as np

from polymet.averaging import UnitaryAction
from polymet.convergence import PointNet, averages_net, spread_from
from polymet.groups import OrthogonalOperator, rotation
from polymet.jsonio import fmt_float
from polymet.leibman import LeibmanSequence


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--theta", type=float, default=2 * np.pi * (np.sqrt(2) - 1))
    ap.add_argument("--end", type=int, default=8000)
    ap.add_argument("--starts", type=int, nargs="+", default=[10, 100, 500, 1000, 2000, 4000])
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    T = UnitaryAction(LeibmanSequence.power_poly(OrthogonalOperator(rotation(args.theta)), [0, 0, 1]))
    net = averages_net(T, np.array([1.0, 0.0]), args.end)
    vals = np.asarray(net.values)
    rows = ["n,avg_norm,spread_from_n,spread_to_2n"]
    for n in args.starts:
        # dyadic block [n, 2n] alongside the full window tail
        stop = min(2 * n, args.end)
        block = spread_from(PointNet(vals[n:stop + 1], start=n), n)
        rows.append(",".join([str(n), fmt_float(np.linalg.norm(vals[n])), fmt_float(spread_from(net, n)),
                              fmt_float(block)]))
    text = "\n".join(rows) + "\n"
    if args.out:
        open(args.out, "w").write(text)
    print(text, end="")


if __name__ == "__main__":
    main()
