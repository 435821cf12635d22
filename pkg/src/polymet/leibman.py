"""Leibman sequences: Z-indexed families in a group whose iterated discrete
differences eventually vanish.

A :class:`LeibmanSequence` is a lazily evaluated map j -> T_j with a memo
cache.  Sequences form a group under pointwise multiplication, so words in
sequences (as used for the naive-degree lemma) can be evaluated directly.
The memo is filled idempotently; share an instance between threads only for
reading values that are already cached.

Degree checking is window based: :func:`degree_upper_check` can falsify a
degree bound but never prove one over all of Z.
"""
from __future__ import annotations

import itertools
import math
from typing import Callable, Iterable, Mapping, Sequence

from .errors import CapacityError, DomainError, FormatError, PreconditionError
from .groups import (
    OrthogonalOperator,
    element_from_json,
    group_close,
    is_identity,
    lamplighter_alpha,
    lamplighter_beta,
)

DEFAULT_MAX_INDEX = 10**6
DEFAULT_CHECK_BUDGET = 2 * 10**6


def binom(k: int, j: int) -> int:
    """Generalized binomial coefficient k(k-1)...(k-j+1)/j!, valid for negative k."""
    if j < 0:
        raise DomainError(f"binom needs j >= 0, got {j}")
    if k >= 0:
        return math.comb(k, j)
    return (-1) ** j * math.comb(j - k - 1, j)


class LeibmanSequence:
    """A map Z -> G, evaluated on demand and memoized.

    ``degree`` is the declared upper bound on the Leibman degree (None when
    unknown, e.g. for tables or differences of arbitrary sequences).
    """

    def __init__(self, fn: Callable[[int], object], spec: dict | None = None,
                 degree: int | None = None):
        self._fn = fn
        self._cache: dict[int, object] = {}
        self.spec = spec or {"kind": "derived"}
        self.degree = degree

    def eval(self, j: int):
        j = int(j)
        try:
            return self._cache[j]
        except KeyError:
            val = self._fn(j)
            self._cache[j] = val
            return val

    __getitem__ = eval
    __call__ = eval

    def values(self, indices: Iterable[int]) -> list:
        return [self.eval(j) for j in indices]

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, g) -> "LeibmanSequence":
        return cls(lambda j: g, {"kind": "constant", "value": g}, degree=0)

    @classmethod
    def linear(cls, a, b) -> "LeibmanSequence":
        """k -> a^k b, the unique sequence of degree <= 1 with T_0 = b and step a."""
        return cls(lambda k: (a ** k) * b, {"kind": "linear", "a": a, "b": b}, degree=1)

    @classmethod
    def quadratic_recurrence(cls, a, b, c, max_index: int = DEFAULT_MAX_INDEX) -> "QuadraticRecurrence":
        return QuadraticRecurrence(a, b, c, max_index=max_index)

    @classmethod
    def abelian_binomial(cls, gens: Sequence, check: bool = True) -> "LeibmanSequence":
        gens = list(gens)
        if check:
            _check_pairwise_commute(gens)
        return cls(lambda k: abelian_binomial(gens, k, check=False),
                   {"kind": "abelian_binomial", "gens": gens}, degree=len(gens) - 1)

    @classmethod
    def power_poly(cls, base, poly: Sequence[int]) -> "LeibmanSequence":
        """k -> base^{p(k)} for an integer polynomial p with coefficients c0, c1, ..."""
        poly = [int(c) for c in poly]
        deg = max((i for i, c in enumerate(poly) if c), default=0)

        def fn(k):
            return base ** sum(c * k**i for i, c in enumerate(poly))

        return cls(fn, {"kind": "power_poly", "poly": poly, "base": base}, degree=deg)

    @classmethod
    def explicit_table(cls, table: Mapping[int, object]) -> "LeibmanSequence":
        table = {int(j): g for j, g in table.items()}

        def fn(j):
            if j not in table:
                raise DomainError(f"index {j} outside explicit table")
            return table[j]

        return cls(fn, {"kind": "explicit_table", "table": table})

    # -- sequence-group structure ---------------------------------------------

    def identity(self) -> "LeibmanSequence":
        one = self.eval(0).identity()
        return LeibmanSequence.constant(one)

    def __mul__(self, other: "LeibmanSequence") -> "LeibmanSequence":
        return LeibmanSequence(lambda j: self.eval(j) * other.eval(j))

    def inverse(self) -> "LeibmanSequence":
        """Pointwise inverse; for unitary values this is the pointwise adjoint."""
        return LeibmanSequence(lambda j: self.eval(j).inverse())

    adjoint = inverse

    def __pow__(self, k: int) -> "LeibmanSequence":
        return LeibmanSequence(lambda j: self.eval(j) ** k)

    def map(self, hom: Callable, degree: int | None = None) -> "LeibmanSequence":
        """Image under a homomorphism (keeps the declared degree bound)."""
        return LeibmanSequence(lambda j: hom(self.eval(j)), {"kind": "mapped", "of": self.spec},
                               degree=self.degree if degree is None else degree)

    def to_json(self) -> dict:
        return sequence_to_json(self)

    def __repr__(self) -> str:
        return f"LeibmanSequence(kind={self.spec.get('kind')!r}, degree={self.degree})"


class QuadraticRecurrence(LeibmanSequence):
    """T_0 = c, T_1 = b c, extended by T_{k+2} = a T_{k+1} T_k^-1 T_{k+1} forward
    and T_k = T_{k+1} T_{k+2}^-1 a T_{k+1} backward.

    Values are kept in a contiguous window grown lazily in either direction.
    No commutation check is made here; see :func:`check_commutation_relations`.
    """

    def __init__(self, a, b, c, max_index: int = DEFAULT_MAX_INDEX):
        super().__init__(self._compute, {"kind": "quadratic_recurrence", "a": a, "b": b, "c": c},
                         degree=2)
        self.a, self.b, self.c = a, b, c
        self.max_index = max_index
        self._cache[0] = c
        self._cache[1] = b * c
        self._lo, self._hi = 0, 1

    def _compute(self, j: int):
        if abs(j) > self.max_index:
            raise CapacityError(f"|{j}| exceeds recurrence evaluation cap {self.max_index}")
        vals, a = self._cache, self.a
        while self._hi < j:
            k = self._hi - 1
            vals[k + 2] = a * vals[k + 1] * vals[k].inverse() * vals[k + 1]
            self._hi += 1
        while self._lo > j:
            k = self._lo - 1
            vals[k] = vals[k + 1] * vals[k + 2].inverse() * a * vals[k + 1]
            self._lo -= 1
        return vals[j]


def quadratic_from_recurrence(a, b, c, max_index: int = DEFAULT_MAX_INDEX) -> QuadraticRecurrence:
    return QuadraticRecurrence(a, b, c, max_index=max_index)


def canonical_wreath_sequence() -> QuadraticRecurrence:
    """The quadratic sequence in Z wr Z with second difference alpha_0, first difference beta, T_0 = e."""
    beta = lamplighter_beta()
    return QuadraticRecurrence(lamplighter_alpha(0), beta, beta.identity())


# -- difference calculus --------------------------------------------------------

def shift(T: LeibmanSequence, i: int) -> LeibmanSequence:
    """j -> T_{i+j}."""
    return LeibmanSequence(lambda j: T.eval(i + j), {"kind": "shift", "of": T.spec, "by": i},
                           degree=T.degree)


def delta(T: LeibmanSequence, i: int) -> LeibmanSequence:
    """Forward difference j -> T_{i+j} T_j^-1."""
    deg = None if T.degree is None else max(T.degree - 1, 0)
    return LeibmanSequence(lambda j: T.eval(i + j) * T.eval(j).inverse(),
                           {"kind": "delta", "of": T.spec, "step": i}, degree=deg)


def nabla(T: LeibmanSequence, i: int) -> LeibmanSequence:
    """Reverse difference j -> T_j T_{i+j}^-1."""
    return LeibmanSequence(lambda j: T.eval(j) * T.eval(i + j).inverse(),
                           {"kind": "nabla", "of": T.spec, "step": i})


def iterated_delta(T: LeibmanSequence, steps: Sequence[int]) -> LeibmanSequence:
    """Apply delta with steps[0] first, then steps[1], ... ."""
    if len(steps) == 0:
        raise DomainError("step vector must be nonempty")
    out = T
    for i in steps:
        out = delta(out, i)
    return out


def _check_work(d: int, window: int, budget: int) -> int:
    width = 2 * window + 1
    work = 0
    for level in range(1, d + 2):
        span = 2 * window * (d + 2 - level) + 1
        work += 2 * width**level * span
    if work > budget:
        raise CapacityError(
            f"degree check (d={d}, window={window}) needs ~{work} multiplications, budget {budget}")
    return work


def find_nontrivial_difference(T: LeibmanSequence, d: int, window: int, tol: float = 0.0,
                               budget: int = DEFAULT_CHECK_BUDGET):
    """Search step vectors of length d+1 and points j in [-window, window] for a
    non-identity iterated difference.  Returns ``(steps, j, value)`` or None.
    """
    if d < 0 or window < 1:
        raise DomainError("need d >= 0 and window >= 1")
    _check_work(d, window, budget)
    rng = range(-window, window + 1)
    memo: dict[tuple, object] = {}

    def diff(steps: tuple, j: int):
        key = (steps, j)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if not steps:
            val = T.eval(j)
        else:
            *head, last = steps
            head = tuple(head)
            val = diff(head, last + j) * diff(head, j).inverse()
        memo[key] = val
        return val

    for steps in itertools.product(rng, repeat=d + 1):
        for j in rng:
            val = diff(steps, j)
            if not is_identity(val, tol):
                return steps, j, val
    return None


def degree_upper_check(T: LeibmanSequence, d: int, window: int, tol: float = 0.0,
                       budget: int = DEFAULT_CHECK_BUDGET) -> bool:
    """True iff every (d+1)-fold difference with steps and point in [-window, window] is trivial.

    A falsifier on a finite window, not a proof of the degree bound.
    """
    return find_nontrivial_difference(T, d, window, tol=tol, budget=budget) is None


# -- ordered products and closed forms ---------------------------------------------

def ordered_prod(xs: Callable[[int], object], k: int, l: int, reversed: bool = False, one=None):
    """Product of x_i as i runs from k to l.

    Left-to-right: empty at l = k-1, and extending to l+1 multiplies x_{l+1} on
    the right.  ``reversed`` multiplies on the left instead.  Ranges with
    l < k-1 give the matching products of inverses, e.g. from k to k-3 the
    left-to-right product is x_{k-1}^-1 x_{k-2}^-1.
    """
    if one is None:
        one = xs(k).identity()
    result = one
    if l >= k:
        for i in range(k, l + 1):
            result = xs(i) * result if reversed else result * xs(i)
    else:
        # walk down from l = k-1: P(l) = P(l+1) x_{l+1}^-1, or x_{l+1}^-1 P(l+1) reversed
        for i in range(k - 1, l, -1):
            inv = xs(i).inverse()
            result = result * inv if not reversed else inv * result
    return result


def quadratic_closed_form(a, b, c, j: int):
    """Reversed ordered product of a^{i-1} b over i = 1..j, times c.

    Equals the j-th term of the quadratic recurrence when a commutes with all
    its conjugates by powers of b (the caller checks this).
    """
    return ordered_prod(lambda i: (a ** (i - 1)) * b, 1, j, reversed=True, one=c.identity()) * c


def check_commutation_relations(a, b, K: int, tol: float = 0.0) -> bool:
    """True iff a commutes with b^k a b^-k for all |k| <= K."""
    if K < 0:
        raise DomainError("K must be >= 0")
    for k in range(-K, K + 1):
        bk = b ** k
        c = bk * a * bk.inverse()
        if not group_close(a * c, c * a, tol):
            return False
    return True


def _check_pairwise_commute(gens: Sequence, tol: float | None = None) -> None:
    for g, h in itertools.combinations(gens, 2):
        if isinstance(g, OrthogonalOperator):
            t = 1e-9 * g.dim if tol is None else tol
        else:
            t = 0.0
        if not group_close(g * h, h * g, t):
            raise PreconditionError("abelian_binomial generators do not commute")


def abelian_binomial(gens: Sequence, j: int, check: bool = True):
    """g_0 g_1^{C(j,1)} ... g_d^{C(j,d)} for pairwise commuting generators."""
    gens = list(gens)
    if not gens:
        raise DomainError("need at least one generator")
    if check:
        _check_pairwise_commute(gens)
    out = gens[0]
    for r, g in enumerate(gens[1:], start=1):
        out = out * g ** binom(j, r)
    return out


# -- JSON specs ---------------------------------------------------------------

def _elem(obj):
    return element_from_json(obj)


def sequence_from_json(spec: Mapping) -> LeibmanSequence:
    kind = spec.get("kind")
    if kind == "constant":
        return LeibmanSequence.constant(_elem(spec["value"]))
    if kind == "linear":
        return LeibmanSequence.linear(_elem(spec["a"]), _elem(spec["b"]))
    if kind == "quadratic_recurrence":
        return quadratic_from_recurrence(_elem(spec["a"]), _elem(spec["b"]), _elem(spec["c"]))
    if kind == "canonical_wreath":
        return canonical_wreath_sequence()
    if kind == "abelian_binomial":
        return LeibmanSequence.abelian_binomial([_elem(g) for g in spec["gens"]])
    if kind == "power_poly":
        return LeibmanSequence.power_poly(_elem(spec["base"]), spec["poly"])
    if kind == "explicit_table":
        return LeibmanSequence.explicit_table({int(j): _elem(g) for j, g in spec["table"]})
    raise FormatError(f"unknown sequence kind {kind!r}")


def sequence_to_json(T: LeibmanSequence) -> dict:
    spec = T.spec
    kind = spec.get("kind")
    enc = lambda g: g.to_json()  # noqa: E731
    if kind == "constant":
        return {"kind": kind, "value": enc(spec["value"])}
    if kind == "linear":
        return {"kind": kind, "a": enc(spec["a"]), "b": enc(spec["b"])}
    if kind == "quadratic_recurrence":
        return {"kind": kind, "a": enc(spec["a"]), "b": enc(spec["b"]), "c": enc(spec["c"])}
    if kind == "abelian_binomial":
        return {"kind": kind, "gens": [enc(g) for g in spec["gens"]]}
    if kind == "power_poly":
        return {"kind": kind, "poly": list(spec["poly"]), "base": enc(spec["base"])}
    if kind == "explicit_table":
        return {"kind": kind, "table": [[j, enc(g)] for j, g in sorted(spec["table"].items())]}
    raise FormatError(f"sequence of kind {kind!r} has no JSON form")
