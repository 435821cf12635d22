"""Convergence instrumentation for nets observed on a finite window.

Spread and oscillation are defined through suprema and infima over infinite
tails.  On a window we can only see part of each tail, so every number is
tagged: ``exact`` when the net carries a declared eventually periodic tail
that the window covers (eventually constant is period 1), ``estimate``
otherwise.  Window-restricted spreads are lower bounds of the true ones.

Metastability uses witness semantics: for a tolerance eps and a sampling
i -> eta_i of finite sets of later indices, a witness is an index i at which
all values sampled by eta_i lie within eps of each other.
"""
from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .averaging import DEFAULT_CUTOFF, _as_action, avg_operator, avg_vector, running_vector_averages
from .errors import DomainError, PreconditionError, ShapeError
from .measures import SignedMeasure, folner_from_config, sigma_folner, sigma_n

PAIRWISE_BUDGET = 2 * 10**7


class PointNet:
    """Values a_i for i in [start, start + len(values) - 1].

    ``values`` is an array whose first axis is the index (scalars, vectors or
    matrices) or a list of exact scalars such as Fractions.  ``tail`` declares
    that a_{k+period} = a_k for all k >= tail[0]; it is checked on the window.
    """

    def __init__(self, values, start: int = 0, metric: str | None = None,
                 tail: tuple[int, int] | None = None, enumeration: str = "identity"):
        if len(values) == 0:
            raise DomainError("a net needs at least one value")
        if isinstance(values, np.ndarray):
            self.values = values.astype(float, copy=False)
            self.exact_scalars = False
        elif all(isinstance(v, (int, Fraction)) for v in values):
            self.values = list(values)
            self.exact_scalars = True
        else:
            self.values = np.asarray(values, dtype=float)
            self.exact_scalars = False
        ndim = 0 if self.exact_scalars else self.values.ndim - 1
        if metric is None:
            metric = "spectral" if ndim == 2 else "euclidean"
        if metric not in ("euclidean", "spectral"):
            raise DomainError(f"unknown metric {metric!r}")
        if metric == "spectral" and ndim != 2:
            raise ShapeError("spectral metric needs matrix values")
        self.metric = metric
        self.start = int(start)
        self.enumeration = enumeration
        self.tail = None
        if tail is not None:
            self._check_tail(*tail)
            self.tail = (int(tail[0]), int(tail[1]))

    @property
    def end(self) -> int:
        return self.start + len(self.values) - 1

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int):
        if not self.start <= i <= self.end:
            raise DomainError(f"index {i} outside window [{self.start}, {self.end}]")
        return self.values[i - self.start]

    def _check_tail(self, frm: int, period: int) -> None:
        if period < 1:
            raise DomainError("period must be >= 1")
        if frm < self.start or frm + period - 1 > self.end:
            raise PreconditionError(
                f"window [{self.start}, {self.end}] does not cover one period of the tail from {frm}")
        for k in range(frm, self.end - period + 1):
            if self.distance(self[k], self[k + period]) != 0:
                raise PreconditionError(f"declared tail violated at index {k}")

    def distance(self, a, b):
        if self.exact_scalars:
            return abs(a - b)
        diff = np.asarray(a) - np.asarray(b)
        if self.metric == "spectral":
            return float(np.linalg.norm(diff, 2))
        return float(np.linalg.norm(diff))

    def is_exact_from(self, i: int) -> bool:
        return self.tail is not None

    def _tail_stop(self, i: int) -> int:
        """Last index needed to see every value of the tail from i."""
        if self.tail is None:
            return self.end
        frm, period = self.tail
        return min(self.end, max(i, frm) + period - 1)

    def diameter(self, indices) -> float:
        idx = sorted(set(indices))
        if len(idx) < 2:
            return 0 if self.exact_scalars else 0.0
        if self.exact_scalars:
            vals = [self[k] for k in idx]
            return max(vals) - min(vals)
        vals = np.stack([np.asarray(self[k]) for k in idx])
        if vals.ndim == 1:
            return float(vals.max() - vals.min())
        if self.metric == "spectral":
            return max(self.distance(vals[a], vals[b])
                       for a in range(len(idx)) for b in range(a + 1, len(idx)))
        return float(pdist(vals.reshape(len(idx), -1)).max())


@dataclass
class Estimate:
    value: float
    exact: bool
    index: int | None = None

    @property
    def exactness(self) -> str:
        return "exact" if self.exact else "estimate"


def spread_report(net: PointNet, i: int, budget: int = PAIRWISE_BUDGET) -> Estimate:
    """Max distance between window values at indices >= i."""
    if not net.start <= i <= net.end:
        raise DomainError(f"empty tail: {i} outside window [{net.start}, {net.end}]")
    stop = net._tail_stop(i)
    k = stop - i + 1
    pairs = k * (k - 1) // 2
    scalar = net.exact_scalars or np.asarray(net.values).ndim == 1
    if pairs > budget and not scalar:
        # diameter <= 2 * max distance to the centroid
        vals = np.asarray(net.values[i - net.start: stop - net.start + 1], dtype=float)
        vals = vals.reshape(k, -1)
        c = vals.mean(axis=0)
        bound = 2.0 * float(np.linalg.norm(vals - c, axis=1).max())
        return Estimate(bound, False, i)
    return Estimate(net.diameter(range(i, stop + 1)), net.is_exact_from(i), i)


def spread_from(net: PointNet, i: int, budget: int = PAIRWISE_BUDGET):
    return spread_report(net, i, budget).value


def oscillation_estimate(net: PointNet) -> Estimate:
    """Infimum of tail spreads.

    With a declared tail this is exact: the spread of one period.  Without
    one, the minimum runs over tails that keep at least half the window,
    since short tails report spreads near zero by construction.
    """
    if net.tail is not None:
        frm = net.tail[0]
        return Estimate(spread_from(net, frm), True, frm)
    last = net.start + (len(net) - 1) // 2
    # spreads of nested tails are nonincreasing, so the minimum sits at the last admissible index
    return Estimate(spread_from(net, last), False, last)


def oscillation_admissible_indices(net: PointNet) -> range:
    if net.tail is not None:
        return range(net.start, net.end + 1)
    return range(net.start, net.start + (len(net) - 1) // 2 + 1)


# -- samplings and metastability --------------------------------------------------------

_TERM = re.compile(r"^\s*(\d*)\s*i\s*(?:\+\s*(\d+))?\s*$")


@dataclass(frozen=True)
class Sampling:
    """eta_i = {mult * i + offset for each term}; mult >= 1 and offset >= 0 keep eta_i within [i, oo)."""

    terms: tuple[tuple[int, int], ...]

    @classmethod
    def parse(cls, template: str) -> "Sampling":
        body = template.strip()
        if not (body.startswith("{") and body.endswith("}")):
            raise DomainError(f"sampling template must look like '{{i, 2i}}', got {template!r}")
        terms = []
        for part in body[1:-1].split(","):
            m = _TERM.match(part)
            if not m:
                raise DomainError(f"cannot parse sampling term {part!r}")
            terms.append((int(m.group(1) or 1), int(m.group(2) or 0)))
        return cls(tuple(terms))

    def __call__(self, i: int) -> list[int]:
        return sorted({a * i + b for a, b in self.terms})

    def max_index(self, i: int) -> int:
        return max(a * i + b for a, b in self.terms)

    def __str__(self) -> str:
        def show(a, b):
            s = "i" if a == 1 else f"{a}i"
            return s + (f"+{b}" if b else "")
        return "{" + ", ".join(show(a, b) for a, b in self.terms) + "}"


def _sampling(eta) -> Sampling:
    return eta if isinstance(eta, Sampling) else Sampling.parse(eta)


@dataclass
class MetastabilityCertificate:
    eps: float
    sampling: str
    witness: int | None
    spread: float | None
    found: bool
    search_bound: int
    partial: bool = False
    exactness: str = "estimate"

    def to_json(self) -> dict:
        d = asdict(self)
        if d["spread"] is not None:
            d["spread"] = float(d["spread"])
        return d


def metastable_index(net: PointNet, eps: float, eta, start: int | None = None,
                     bound: int | None = None) -> MetastabilityCertificate:
    """Least i >= start with max distance over eta_i below eps.

    The scan stops when eta_i leaves the window (``partial``) or i passes
    ``bound``; ``search_bound`` is the last index fully tested.
    """
    if eps <= 0:
        raise DomainError(f"eps must be > 0, got {eps}")
    eta = _sampling(eta)
    i = net.start if start is None else int(start)
    last = net.end if bound is None else min(bound, net.end)
    tested = i - 1
    partial = False
    while i <= last:
        if eta.max_index(i) > net.end:
            partial = True
            break
        spr = net.diameter(eta(i))
        tested = i
        if spr < eps:
            return MetastabilityCertificate(eps, str(eta), i, spr, True, i, False,
                                            "exact")
        i += 1
    return MetastabilityCertificate(eps, str(eta), None, None, False, tested, partial)


@dataclass
class RateReport:
    eps: float
    sampling: str
    bound: int
    E: int | None
    certificates: list[MetastabilityCertificate] = field(default_factory=list)
    failures: list[int] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.E is not None

    def to_json(self) -> dict:
        return {
            "eps": self.eps,
            "sampling": self.sampling,
            "bound": self.bound,
            "found": self.found,
            "E": self.E,
            "failures": list(self.failures),
            "certificates": [c.to_json() for c in self.certificates],
        }


def thread_count() -> int:
    env = os.environ.get("PET_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def _search_growing(make_net: Callable[[int], PointNet], eps, eta: Sampling, bound: int,
                    start: int | None, initial: int = 64) -> MetastabilityCertificate:
    size = initial
    first = start
    while True:
        net = make_net(size)
        cert = metastable_index(net, eps, eta, start=first, bound=bound)
        if cert.found or not cert.partial or size > eta.max_index(bound):
            return cert
        first = cert.search_bound + 1
        size *= 2


def uniform_rate_search(instances: Sequence, eps: float, eta, bound: int,
                        start: int | None = None, threads: int | None = None) -> RateReport:
    """Per-instance least witnesses and their maximum E.

    Instances are PointNets or callables n -> PointNet covering [.., n]; the
    latter are grown by doubling until a witness appears or eta_bound is
    covered.  Results are ordered by instance whatever the schedule.
    """
    if eps <= 0:
        raise DomainError(f"eps must be > 0, got {eps}")
    eta = _sampling(eta)

    def one(inst):
        if isinstance(inst, PointNet):
            return metastable_index(inst, eps, eta, start=start, bound=bound)
        return _search_growing(inst, eps, eta, bound, start)

    workers = threads or thread_count()
    if workers > 1 and len(instances) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            certs = list(pool.map(one, instances))
    else:
        certs = [one(inst) for inst in instances]
    failures = [k for k, c in enumerate(certs) if not c.found]
    E = None if failures or not certs else max(c.witness for c in certs)
    return RateReport(eps, str(eta), bound, E, certs, failures)


# -- nets of ergodic averages ------------------------------------------------------------

def averages_net(T, x, end: int, start: int = 0, folner="z_initial_segments") -> PointNet:
    """The net n -> Av_n T(x) on [start, end]."""
    net = folner_from_config(folner)
    if net.name == "z_initial_segments":
        vals = running_vector_averages(T, x, end)[start:]
    else:
        vals = np.stack([avg_vector(T, x, sigma_folner(net, n)) for n in range(start, end + 1)])
    return PointNet(vals, start=start)


def average_profile(T, x, n_values: Sequence[int], end: int | None = None,
                    folner="z_initial_segments") -> list[dict]:
    """Rows (n, ||Av_n x||, spread of the averages on [n, end]) for each scheduled n."""
    ns = sorted(set(int(n) for n in n_values))
    end = max(ns) if end is None else max(end, ns[-1])
    net = averages_net(T, x, end, ns[0], folner)
    rows = []
    for n in ns:
        rep = spread_report(net, n)
        rows.append({"n": n, "avg_norm": float(np.linalg.norm(net[n])), "spread_from_n": float(rep.value),
                     "exactness": rep.exactness})
    return rows


# -- structured / pseudorandom decomposition ---------------------------------------------

@dataclass
class DecompositionResult:
    x_structured: np.ndarray
    x_random: np.ndarray
    cutoff: int
    rank: int
    additivity_residual: float
    inner_product: float
    random_average_norm: float


def structured_decompose(T, x, M: int = DEFAULT_CUTOFF, rtol: float = 1e-10) -> DecompositionResult:
    """Split x into its projection onto the range of (Av_M T)^T and the orthogonal rest.

    The rest is annihilated by Av_M T up to the dropped singular values.
    """
    if M < 0:
        raise DomainError("cutoff must be >= 0")
    T = _as_action(T)
    x = np.asarray(x, dtype=float)
    if x.shape != (T.dim,):
        raise ShapeError(f"vector of shape {x.shape} for an action of dimension {T.dim}")
    A = avg_operator(T, sigma_n(M))
    _, s, vt = np.linalg.svd(A)
    # averages of unitaries have norm <= 1, so the cut never drops below rtol
    smax = s[0] if s.size else 0.0
    keep = s > rtol * max(smax, 1.0)
    V = vt[keep]
    xs = V.T @ (V @ x)
    xr = x - xs
    return DecompositionResult(
        x_structured=xs,
        x_random=xr,
        cutoff=M,
        rank=int(keep.sum()),
        additivity_residual=float(np.linalg.norm(xs + xr - x)),
        inner_product=float(abs(xs @ xr)),
        random_average_norm=float(np.linalg.norm(A @ xr)),
    )


def doubling_check(T, x, M: int = DEFAULT_CUTOFF, rel: float = 0.1, rtol: float = 1e-10) -> dict:
    """Recompute the decomposition at 2M; trust it when ||x_s|| moves by less than ``rel``."""
    a = structured_decompose(T, x, M, rtol)
    b = structured_decompose(T, x, 2 * M, rtol)
    na, nb = float(np.linalg.norm(a.x_structured)), float(np.linalg.norm(b.x_structured))
    scale = max(na, float(np.linalg.norm(x)) * 1e-12, 1e-300)
    change = abs(nb - na) / scale if na > 0 else (0.0 if nb == 0 else math.inf)
    return {"M": M, "norm_M": na, "norm_2M": nb, "relative_change": change, "passed": change < rel}


# -- finite dominated convergence -----------------------------------------------------------

@dataclass
class DctReport:
    lhs: object
    rhs: object
    passed: bool
    point_oscillations: dict
    tail: tuple[int, int]


def _detect_constant_tail(seq: list) -> int:
    frm = len(seq) - 1
    while frm > 0 and _same(seq[frm - 1], seq[-1]):
        frm -= 1
    if frm == len(seq) - 1:
        raise PreconditionError("no constant tail visible in the window")
    return frm


def _same(a, b) -> bool:
    return bool(np.all(np.asarray(a) == np.asarray(b)))


def dct_check(points: Sequence, fields: Sequence, mu: SignedMeasure, window: tuple[int, int],
              tails: dict | None = None, tol: float = 1e-12) -> DctReport:
    """Check osc(n -> <phi_n, mu>) <= ||mu|| * max_x osc(n -> phi_n(x)) exactly.

    ``fields[k]`` maps each point of Omega to phi_{window[0] + k}(x).  Each
    pointwise net must be eventually periodic; ``tails[x] = (from, period)``
    declares it, otherwise a constant tail is read off the window (at least
    the last two values must agree).  Anything that cannot be made exact is
    refused.
    """
    lo, hi = window
    if hi - lo + 1 != len(fields):
        raise DomainError("window length does not match the number of fields")
    missing = [p for p in mu.support if p not in points]
    if missing:
        raise DomainError(f"measure charges points outside Omega: {missing}")
    tails = dict(tails or {})
    point_osc = {}
    frms, periods = [], []
    for x in points:
        seq = [f[x] for f in fields]
        if x in tails:
            frm, period = tails[x]
        else:
            frm, period = lo + _detect_constant_tail(seq), 1
        net = PointNet(seq if _is_exact(seq) else np.asarray(seq, dtype=float), start=lo,
                       tail=(frm, period))
        point_osc[x] = oscillation_estimate(net).value
        frms.append(frm)
        periods.append(period)
    frm = max(frms)
    period = math.lcm(*periods)
    if frm + period - 1 > hi:
        raise PreconditionError("window too short to contain one common period of the paired net")
    paired = []
    for f in fields:
        total = 0
        for x, w in mu.weights.items():
            total = total + w * (f[x] if _is_exact([f[x]]) else np.asarray(f[x], dtype=float))
        paired.append(total)
    pnet = PointNet(paired if _is_exact(paired) else np.asarray(paired, dtype=float), start=lo,
                    tail=(frm, period))
    lhs = oscillation_estimate(pnet).value
    rhs = mu.tv_norm() * max(point_osc.values(), default=0)
    return DctReport(lhs, rhs, bool(lhs <= rhs + tol), point_osc, (frm, period))


def _is_exact(seq) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in seq)
