"""Worst descent gap ||lhs - rhs|| against eps on random abelian actions.

    python3 scripts/descent_margins.py --instances 20
"""
import argparse

import numpy as np

from polymet.averaging import descent_lhs, descent_rhs, m_threshold
from polymet.instances import random_abelian_action
from polymet.linalg import spectral_norm


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--degree", type=int, default=2)
    ap.add_argument("--n", type=int, nargs="+", default=[2, 5, 10])
    ap.add_argument("--eps", type=float, nargs="+", default=[0.5, 0.25, 0.1])
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    actions = [random_abelian_action(rng, degree=args.degree) for _ in range(args.instances)]
    print("n,eps,m,max_gap,ratio")
    for n in args.n:
        for eps in args.eps:
            m = m_threshold(eps, n)
            gap = max(spectral_norm(descent_lhs(T, n, m) - descent_rhs(T, n, m)) for T in actions)
            print(f"{n},{eps},{m},{gap:.6g},{gap / eps:.4f}")


if __name__ == "__main__":
    main()
