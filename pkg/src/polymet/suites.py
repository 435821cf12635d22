"""Invariant suites behind ``polymet verify``.

Each suite returns a JSON-ready summary ``{"suite", "passed", "checks"}``
where every check records its own pass flag and the numbers it looked at.
Sizes are moderate so that ``verify all`` finishes in seconds.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable

import numpy as np

from .averaging import descent_lhs, descent_rhs, m_threshold
from .convergence import dct_check
from .groups import (
    ZdElement,
    commutator,
    lamplighter_alpha,
    lamplighter_beta,
    reduce_mod,
    regular_representation,
)
from .instances import (
    random_abelian_action,
    random_admissible_triple,
    random_dct_config,
    random_lamplighter,
)
from .leibman import (
    LeibmanSequence,
    binom,
    canonical_wreath_sequence,
    degree_upper_check,
    iterated_delta,
    nabla,
    quadratic_closed_form,
    quadratic_from_recurrence,
    shift,
    delta,
)
from .linalg import spectral_norm
from .measures import (
    folner_defect,
    sigma_n,
    translate_measure,
    tv_norm,
    z_initial_segments,
    zd_boxes,
)

DEFAULT_SEED = 42


def _check(name: str, passed: bool, **info) -> dict:
    return {"name": name, "passed": bool(passed), **info}


def group_laws(seed: int = DEFAULT_SEED, triples: int = 2000) -> list[dict]:
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(triples):
        g, h, k = (random_lamplighter(rng) for _ in range(3))
        ok = (g * h) * k == g * (h * k) and (g * g.inverse()).is_identity() and g * g.identity() == g
        bad += not ok
    out = [_check("lamplighter_axioms", bad == 0, samples=triples, failures=bad)]

    alpha, beta = lamplighter_alpha, lamplighter_beta
    rel = all(beta() ** k * alpha(l) == alpha(k + l) * beta() ** k and alpha(k) * alpha(l) == alpha(l) * alpha(k)
              for k in range(-20, 21) for l in range(-20, 21))
    out.append(_check("wreath_relations", rel, range=20))

    c, depths = commutator(beta(), alpha(0)), []
    for depth in range(1, 11):
        depths.append(not c.is_identity())
        c = commutator(beta(), c)
    out.append(_check("iterated_commutators_nontrivial", all(depths), depth=10))

    hom = all(reduce_mod(g * h, 2, 3) == reduce_mod(g, 2, 3) * reduce_mod(h, 2, 3)
              for g, h in ((random_lamplighter(rng), random_lamplighter(rng)) for _ in range(300)))
    out.append(_check("reduce_mod_homomorphism", hom, samples=300))

    rep_ok = True
    for _ in range(30):
        g, h = reduce_mod(random_lamplighter(rng), 2, 3), reduce_mod(random_lamplighter(rng), 2, 3)
        rep_ok &= bool(np.array_equal(regular_representation(g * h).matrix,
                                      regular_representation(g).matrix @ regular_representation(h).matrix))
    out.append(_check("regular_representation_homomorphism", rep_ok, samples=30))
    return out


def leibman(seed: int = DEFAULT_SEED, triples: int = 40) -> list[dict]:
    rng = np.random.default_rng(seed)
    W = canonical_wreath_sequence()
    out = [
        _check("canonical_degree_2", degree_upper_check(W, 2, 6)),
        _check("canonical_not_degree_1", not degree_upper_check(W, 1, 3)),
    ]
    mismatches = 0
    for _ in range(triples):
        a, b, c = random_admissible_triple(rng)
        T = quadratic_from_recurrence(a, b, c)
        mismatches += sum(quadratic_closed_form(a, b, c, j) != T[j] for j in range(-12, 13))
    out.append(_check("closed_form_matches_recurrence", mismatches == 0, triples=triples, window=[-12, 12],
                      mismatches=mismatches))

    a, b, c = ZdElement((1, 0)), ZdElement((0, 1)), ZdElement((2, -3))
    Q = quadratic_from_recurrence(a, b, c)
    z2 = all(Q[j] == a ** binom(j, 2) * b ** j * c for j in range(-12, 13))
    out.append(_check("abelian_special_case", z2))

    table = LeibmanSequence.explicit_table({j: random_lamplighter(rng) for j in range(-30, 31)})
    cocycle = all(delta(table, i + k)[j] == shift(delta(table, i), k)[j] * delta(table, k)[j]
                  for i in range(-5, 6) for k in range(-5, 6) for j in range(-5, 6))
    rev = all(nabla(table, i)[j] == shift(delta(table, -i), i)[j] for i in range(-5, 6) for j in range(-8, 9))
    out.append(_check("difference_identities", cocycle and rev))

    third = all(iterated_delta(W, s)[j].is_identity()
                for s in ((1, 1, 1), (2, -1, 3), (-2, 1, 1)) for j in range(-4, 5))
    out.append(_check("third_differences_vanish", third))
    return out


def measures(seed: int = DEFAULT_SEED, size: int = 60) -> list[dict]:
    prob = all(tv_norm(sigma_n(n, exact=True)) == 1 for n in range(size + 1))
    out = [_check("uniform_measures_are_probabilities", prob, n_max=size)]
    iv = all(folner_defect(z_initial_segments(), m, j) == Fraction(2 * j, m + 1)
             for m in range(size + 1) for j in range(m + 2))
    out.append(_check("interval_defects", iv, m_max=size))
    box = all(folner_defect(zd_boxes(2), n, (1, 0)) == Fraction(2, n + 1) for n in range(size + 1))
    out.append(_check("box_defects", box, n_max=size))
    tv = all(tv_norm(sigma_n(m, exact=True) - translate_measure(sigma_n(m, exact=True), j)) == Fraction(2 * j, m + 1)
             for m in range(size + 1) for j in range(m + 2))
    out.append(_check("translate_tv", tv, m_max=size))
    return out


def descent(seed: int = DEFAULT_SEED, instances: int = 20) -> list[dict]:
    """Descent inequality on random degree-2 abelian actions, reporting the worst gap per instance."""
    rng = np.random.default_rng(seed)
    rows = []
    for k in range(instances):
        T = random_abelian_action(rng, degree=2)
        worst, slack = 0.0, np.inf
        for n in (2, 5, 10):
            for eps in (0.5, 0.25):
                m = m_threshold(eps, n)
                gap = spectral_norm(descent_lhs(T, n, m) - descent_rhs(T, n, m))
                worst = max(worst, gap)
                slack = min(slack, eps - gap)
        rows.append({"instance": k, "dim": T.dim, "max_norm": worst, "min_slack": float(slack)})
    passed = all(r["min_slack"] >= -1e-8 for r in rows)
    return [_check("descent_inequality", passed, n_values=[2, 5, 10], eps_values=[0.5, 0.25], instances=rows)]


def dct(seed: int = DEFAULT_SEED, configs: int = 100) -> list[dict]:
    rng = np.random.default_rng(seed)
    worst = None
    ok = True
    for _ in range(configs):
        omega, fields, mu, tails = random_dct_config(rng)
        rep = dct_check(omega, fields, mu, (0, len(fields) - 1), tails=tails)
        ok &= rep.passed
        gap = rep.rhs - rep.lhs
        worst = gap if worst is None else min(worst, gap)
    out = [_check("dct_eventually_constant", ok, configs=configs, min_gap=worst)]
    eq, sharp = 0, True
    for _ in range(configs):
        omega, fields, mu, tails = random_dct_config(rng, max_period=3, single_atom=True)
        rep = dct_check(omega, fields, mu, (0, len(fields) - 1), tails=tails)
        ok &= rep.passed
        (x, w), = mu.weights.items()
        # a single atom sees exactly its own oscillation
        sharp &= rep.lhs == abs(w) * rep.point_oscillations[x]
        eq += rep.lhs == rep.rhs
    out.append(_check("dct_single_atom", ok and sharp and eq > 0, configs=configs, equalities=eq))
    return out


SUITES: dict[str, Callable[..., list[dict]]] = {
    "group-laws": group_laws,
    "leibman": leibman,
    "measures": measures,
    "descent": descent,
    "dct": dct,
}


def run_suite(name: str, seed: int = DEFAULT_SEED) -> dict:
    if name == "all":
        parts = [run_suite(n, seed) for n in SUITES]
        return {"suite": "all", "passed": all(p["passed"] for p in parts), "suites": parts}
    if name not in SUITES:
        raise KeyError(name)
    checks = SUITES[name](seed)
    return {"suite": name, "passed": all(c["passed"] for c in checks), "checks": checks}
