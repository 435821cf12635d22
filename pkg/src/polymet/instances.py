"""Seeded random instance generators used by the CLI, suites and experiments.

All randomness flows through ``numpy.random.default_rng(seed)`` (PCG64).
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .averaging import UnitaryAction
from .groups import LamplighterElement, OrthogonalOperator, rotation
from .leibman import LeibmanSequence
from .measures import SignedMeasure


def random_lamplighter(rng: np.random.Generator, max_lamps: int = 5, span: int = 20) -> LamplighterElement:
    """Up to ``max_lamps`` lamps with positions, values and shift in [-span, span]."""
    k = int(rng.integers(0, max_lamps + 1))
    pos = rng.integers(-span, span + 1, k)
    val = rng.integers(-span, span + 1, k)
    return LamplighterElement(zip(pos.tolist(), val.tolist()), int(rng.integers(-span, span + 1)))


def random_admissible_pair(rng: np.random.Generator, span: int = 5):
    """(a, b) in Z wr Z with a commuting with every b^k a b^-k.

    Two families: a in the lamp subgroup (normal and abelian) with b arbitrary,
    or a, b both powers of one element.
    """
    if rng.random() < 0.7:
        a = random_lamplighter(rng, span=span)
        a = LamplighterElement(a.lamps, 0)
        b = random_lamplighter(rng, span=span)
    else:
        g = random_lamplighter(rng, max_lamps=3, span=span)
        a = g ** int(rng.integers(-2, 3))
        b = g ** int(rng.integers(-2, 3))
    return a, b


def random_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def commuting_rotations(rng: np.random.Generator, d: int, count: int) -> list[np.ndarray]:
    """``count`` orthogonal matrices Q R_k Q^T sharing one block structure, hence commuting."""
    Q = random_orthogonal(rng, d)
    mats = []
    for _ in range(count):
        D = np.eye(d)
        for b in range(d // 2):
            D[2 * b:2 * b + 2, 2 * b:2 * b + 2] = rotation(rng.uniform(0, 2 * np.pi))
        mats.append(Q @ D @ Q.T)
    return mats


def random_abelian_action(rng: np.random.Generator, dim: int | None = None, degree: int = 2,
                          dim_range: tuple[int, int] = (2, 6)) -> UnitaryAction:
    """T_k = U_0 U_1^{C(k,1)} ... U_degree^{C(k,degree)} with commuting random U_r."""
    if dim is None:
        dim = int(rng.integers(dim_range[0], dim_range[1] + 1))
    gens = [OrthogonalOperator(m) for m in commuting_rotations(rng, dim, degree + 1)]
    seq = LeibmanSequence.abelian_binomial(gens)
    return UnitaryAction(seq, dim=dim, spec={"kind": "abelian_binomial", "dim": dim, "degree": degree})


def random_unit_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    x = rng.standard_normal(d)
    return x / np.linalg.norm(x)


def random_admissible_triple(rng: np.random.Generator, span: int = 5):
    a, b = random_admissible_pair(rng, span)
    return a, b, random_lamplighter(rng, span=span)


def _rational(rng: np.random.Generator, num: int = 6, den: int = 6) -> Fraction:
    return Fraction(int(rng.integers(-num, num + 1)), int(rng.integers(1, den + 1)))


def random_dct_config(rng: np.random.Generator, points: int = 8, length: int = 12,
                      max_period: int = 1, single_atom: bool = False):
    """Eventually periodic rational fields on Omega = {0..points-1} and a signed rational measure.

    With ``max_period = 1`` every pointwise net is eventually constant.  Returns
    (omega, fields, mu, tails) in the layout taken by ``dct_check``.
    """
    omega = list(range(points))
    # room for one common period of all pointwise tails
    room = length - math.lcm(*range(1, max_period + 1))
    if room < 0:
        raise ValueError("window too short for the requested periods")
    tails, columns = {}, {}
    for x in omega:
        period = int(rng.integers(1, max_period + 1))
        frm = int(rng.integers(0, room + 1))
        head = [_rational(rng) for _ in range(frm + period)]
        col = head + [head[frm + (k - frm) % period] for k in range(frm + period, length)]
        tails[x], columns[x] = (frm, period), col
    fields = [{x: columns[x][k] for x in omega} for k in range(length)]
    if single_atom:
        mu = SignedMeasure({int(rng.integers(0, points)): _rational(rng) or Fraction(1)})
    else:
        k = int(rng.integers(1, points + 1))
        support = rng.choice(points, size=k, replace=False).tolist()
        mu = SignedMeasure({int(p): _rational(rng) for p in support})
    return omega, fields, mu, tails
