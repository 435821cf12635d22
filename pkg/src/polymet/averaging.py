"""Ergodic averages of operator-valued sequences.

For a sequence T of orthogonal operators and a finitely supported measure mu,
the average is sum_i mu({i}) T_i.  Averages over the uniform measures on
{0..n} are produced incrementally, so a sweep over n in [0, N] evaluates
the sequence N+1 times.
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DomainError, PreconditionError, ShapeError
from .groups import (
    LamplighterElement,
    OrthogonalOperator,
    is_orthogonal,
    reduce_mod,
    regular_representation,
)
from .leibman import LeibmanSequence, QuadraticRecurrence, nabla
from .measures import SignedMeasure, sigma_n

DEFAULT_CUTOFF = 4096


class UnitaryAction:
    """A sequence of orthogonal operators on R^d, j -> T_j."""

    def __init__(self, seq: LeibmanSequence, dim: int | None = None, spec: dict | None = None):
        self.seq = seq
        self.dim = dim if dim is not None else seq.eval(0).dim
        self.spec = spec if spec is not None else seq.spec

    @classmethod
    def from_lamplighter(cls, seq: LeibmanSequence, m: int = 2, n: int = 3) -> "UnitaryAction":
        """Realize a Z wr Z sequence through (Z/m) wr (Z/n) and its regular representation."""
        cache: dict = {}

        def rep_finite(h) -> OrthogonalOperator:
            if h not in cache:
                cache[h] = regular_representation(h)
            return cache[h]

        def rep(g: LamplighterElement) -> OrthogonalOperator:
            return rep_finite(reduce_mod(g, m, n))

        if isinstance(seq, QuadraticRecurrence):
            # reduce_mod is a homomorphism, so the recurrence can run in the finite quotient
            a, b, c = (reduce_mod(g, m, n) for g in (seq.a, seq.b, seq.c))
            quotient = QuadraticRecurrence(a, b, c, max_index=seq.max_index)
            mapped = quotient.map(rep_finite)
        else:
            mapped = seq.map(rep)
        return cls(mapped, dim=m**n * n, spec={"of": seq.spec, "rep": {"m": m, "n": n}})

    def operator(self, j: int) -> OrthogonalOperator:
        return self.seq.eval(j)

    def matrix(self, j: int) -> np.ndarray:
        return self.seq.eval(j).matrix

    def apply(self, j: int, x) -> np.ndarray:
        return self.matrix(j) @ x

    def adjoint(self) -> "UnitaryAction":
        return UnitaryAction(self.seq.inverse(), dim=self.dim)

    def nabla(self, i: int) -> "UnitaryAction":
        return UnitaryAction(nabla(self.seq, i), dim=self.dim)

    def check_orthogonal(self, indices: Iterable[int], tol: float | None = None) -> bool:
        tol = 1e-9 * self.dim if tol is None else tol
        return all(is_orthogonal(self.matrix(j), tol) for j in indices)


def _as_action(T) -> UnitaryAction:
    return T if isinstance(T, UnitaryAction) else UnitaryAction(T)


def _matrix_at(T: UnitaryAction, p) -> np.ndarray:
    if not isinstance(p, (int, np.integer)):
        raise DomainError(f"sequence is indexed by integers, measure has atom {p!r}")
    try:
        return T.matrix(int(p))
    except DomainError as exc:
        raise DomainError(f"sequence not evaluable at {p}: {exc}") from exc


def avg_operator(T, mu: SignedMeasure) -> np.ndarray:
    """sum_i mu({i}) T_i as a d x d matrix."""
    T = _as_action(T)
    out = np.zeros((T.dim, T.dim))
    for p, w in mu.weights.items():
        out += float(w) * _matrix_at(T, p)
    return out


def avg_vector(T, x, mu: SignedMeasure) -> np.ndarray:
    """sum_i mu({i}) T_i x, without forming the averaged matrix."""
    T = _as_action(T)
    x = np.asarray(x, dtype=float)
    if x.shape != (T.dim,):
        raise ShapeError(f"vector of shape {x.shape} for an action of dimension {T.dim}")
    out = np.zeros(T.dim)
    for p, w in mu.weights.items():
        out += float(w) * (_matrix_at(T, p) @ x)
    return out


def running_vector_averages(T, x, n_max: int, start: int = 0) -> np.ndarray:
    """Rows n = 0..n_max hold the average of T_i x over i in {start, ..., start + n}."""
    T = _as_action(T)
    x = np.asarray(x, dtype=float)
    if x.shape != (T.dim,):
        raise ShapeError(f"vector of shape {x.shape} for an action of dimension {T.dim}")
    out = np.empty((n_max + 1, T.dim))
    acc = np.zeros(T.dim)
    for n in range(n_max + 1):
        acc += T.matrix(start + n) @ x
        out[n] = acc / (n + 1)
    return out


def running_operator_averages(T, n_values: Iterable[int]) -> dict[int, np.ndarray]:
    """Averages over {0..n} for each requested n, from one running sum."""
    T = _as_action(T)
    wanted = sorted(set(int(n) for n in n_values))
    if wanted and wanted[0] < 0:
        raise DomainError("n must be >= 0")
    out: dict[int, np.ndarray] = {}
    acc = np.zeros((T.dim, T.dim))
    k = 0
    for n in wanted:
        while k <= n:
            acc += T.matrix(k)
            k += 1
        out[n] = acc / (n + 1)
    return out


@dataclass
class AverageResult:
    value: np.ndarray
    n: int
    metadata: dict = field(default_factory=dict)

    @property
    def is_vector(self) -> bool:
        return self.value.ndim == 1


def average(T, n: int, x=None, folner: str = "z_initial_segments") -> AverageResult:
    T = _as_action(T)
    mu = sigma_n(n)
    val = avg_operator(T, mu) if x is None else avg_vector(T, x, mu)
    return AverageResult(val, n, {"sequence": T.spec.get("kind") if isinstance(T.spec, dict) else None,
                                  "folner": folner})


# -- descent identity ---------------------------------------------------------------

def m_threshold(eps: float, n: int) -> int:
    """Smallest integer m with m >= 2n / eps."""
    if eps <= 0:
        raise DomainError(f"eps must be > 0, got {eps}")
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    # decimal reading of eps, so that 2n/0.1 is exactly 20n
    q = 2 * n / (Fraction(repr(eps)) if isinstance(eps, float) else Fraction(eps))
    m = math.ceil(q)
    return int(m)


def descent_lhs(T, n: int, m: int) -> np.ndarray:
    """(Av_n T)(Av_m T)^T."""
    T = _as_action(T)
    avgs = running_operator_averages(T, [n, m])
    return avgs[n] @ avgs[m].T


def descent_rhs(T, n: int, m: int) -> np.ndarray:
    """Average over i in {0..m} of Av_n of the reverse difference j -> T_j T_{i+j}^T."""
    T = _as_action(T)
    if n < 0 or m < 0:
        raise DomainError("n, m must be >= 0")
    mats = [T.matrix(k) for k in range(n + m + 1)]
    out = np.zeros((T.dim, T.dim))
    for i in range(m + 1):
        inner = np.zeros((T.dim, T.dim))
        for j in range(n + 1):
            inner += mats[j] @ mats[i + j].T
        out += inner / (n + 1)
    return out / (m + 1)


def descent_rhs_via_nabla(T, n: int, m: int) -> np.ndarray:
    """Same quantity as :func:`descent_rhs`, assembled from reverse-difference sequences."""
    T = _as_action(T)
    out = np.zeros((T.dim, T.dim))
    mu = sigma_n(m)
    for i, w in mu.weights.items():
        out += w * avg_operator(T.nabla(i), sigma_n(n))
    return out


# -- mean ergodic baseline -------------------------------------------------------------

def fixed_space_projection(U, rtol: float = 1e-10, orth_tol: float | None = None) -> np.ndarray:
    """Orthogonal projector onto ker(U - I)."""
    M = np.asarray(U.matrix if isinstance(U, OrthogonalOperator) else U, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError(f"expected a square matrix, got {M.shape}")
    d = M.shape[0]
    if not is_orthogonal(M, 1e-9 * d if orth_tol is None else orth_tol):
        raise PreconditionError("fixed_space_projection needs an orthogonal matrix")
    _, s, vt = np.linalg.svd(M - np.eye(d))
    cut = rtol * max(s[0] if s.size else 0.0, 1.0)
    null = vt[s <= cut]
    return null.T @ null
