"""Finitely supported signed measures, Folner nets and integration pairings.

Weights may be floats or :class:`fractions.Fraction`; arithmetic keeps
whatever type it is given, so rational inputs stay exact.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import DomainError, FormatError, ShapeError


def _translate_point(p, g):
    """p + g for integers and Z^d tuples; left translation g * p for group elements."""
    if isinstance(p, (int, np.integer)):
        return int(p) + int(g)
    if isinstance(p, tuple):
        if len(p) != len(g):
            raise DomainError(f"cannot translate {p} by {g}")
        return tuple(a + b for a, b in zip(p, g))
    return g * p


class SignedMeasure:
    """mu = sum_i c_i delta_{p_i} with no zero weights stored."""

    __slots__ = ("weights",)

    def __init__(self, atoms: Mapping | Iterable = ()):
        items = atoms.items() if isinstance(atoms, Mapping) else atoms
        acc: dict = {}
        for p, w in items:
            acc[p] = acc.get(p, 0) + w
        self.weights = {p: w for p, w in acc.items() if w != 0}

    @property
    def support(self) -> list:
        return list(self.weights)

    def atoms(self) -> list[tuple]:
        try:
            return sorted(self.weights.items())
        except TypeError:
            return list(self.weights.items())

    def tv_norm(self):
        return sum((abs(w) for w in self.weights.values()), 0)

    def total_mass(self):
        return sum(self.weights.values(), 0)

    def abs(self) -> "SignedMeasure":
        return SignedMeasure({p: abs(w) for p, w in self.weights.items()})

    def translate(self, g) -> "SignedMeasure":
        return SignedMeasure({_translate_point(p, g): w for p, w in self.weights.items()})

    def __add__(self, other: "SignedMeasure") -> "SignedMeasure":
        return SignedMeasure(itertools.chain(self.weights.items(), other.weights.items()))

    def __neg__(self) -> "SignedMeasure":
        return SignedMeasure({p: -w for p, w in self.weights.items()})

    def __sub__(self, other: "SignedMeasure") -> "SignedMeasure":
        return self + (-other)

    def __mul__(self, c) -> "SignedMeasure":
        return SignedMeasure({p: c * w for p, w in self.weights.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, SignedMeasure) and self.weights == other.weights

    def __repr__(self) -> str:
        return f"SignedMeasure({self.atoms()})"

    def to_json(self) -> dict:
        def enc(p):
            if isinstance(p, tuple):
                return list(p)
            if hasattr(p, "to_json"):
                return p.to_json()
            return p
        return {"atoms": [[enc(p), float(w)] for p, w in self.atoms()]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "SignedMeasure":
        if "atoms" not in obj:
            raise FormatError("measure JSON needs an 'atoms' field")
        atoms = []
        for p, w in obj["atoms"]:
            atoms.append((tuple(p) if isinstance(p, list) else p, w))
        return cls(atoms)


def dirac(p, weight=1) -> SignedMeasure:
    return SignedMeasure({p: weight})


def tv_norm(mu: SignedMeasure):
    return mu.tv_norm()


def measure_abs(mu: SignedMeasure) -> SignedMeasure:
    return mu.abs()


def measure_sub(mu: SignedMeasure, nu: SignedMeasure) -> SignedMeasure:
    return mu - nu


def translate_measure(mu: SignedMeasure, g) -> SignedMeasure:
    """Move the mass at j to j + g."""
    return mu.translate(g)


def sigma_n(n: int, exact: bool = False) -> SignedMeasure:
    """Uniform probability on {0, ..., n}."""
    if n < 0:
        raise DomainError(f"sigma_n needs n >= 0, got {n}")
    w = Fraction(1, n + 1) if exact else 1.0 / (n + 1)
    return SignedMeasure({i: w for i in range(n + 1)})


# -- Folner nets ------------------------------------------------------------------

@dataclass(frozen=True)
class FolnerNet:
    """F_i for i in N (an enumeration of the directed set), each a finite nonempty set."""

    name: str
    sets: Callable[[int], list] = field(compare=False)
    group: str = "Z"
    params: tuple = ()

    def __call__(self, i: int) -> list:
        if i < 0:
            raise DomainError(f"Folner index must be >= 0, got {i}")
        return self.sets(i)


def z_initial_segments() -> FolnerNet:
    return FolnerNet("z_initial_segments", lambda n: list(range(n + 1)))


def z_symmetric_intervals() -> FolnerNet:
    """F_n = {-n, ..., n}."""
    return FolnerNet("z_symmetric_intervals", lambda n: list(range(-n, n + 1)))


def zd_boxes(d: int) -> FolnerNet:
    """F_n = [0, n]^d in Z^d; the product order is linearized by box size."""
    if d < 1:
        raise DomainError("dimension must be >= 1")
    return FolnerNet("zd_boxes", lambda n: list(itertools.product(range(n + 1), repeat=d)),
                     group=f"Z^{d}", params=(("d", d),))


def folner_from_config(cfg) -> FolnerNet:
    """Accepts "z_initial_segments", "z_symmetric_intervals" or {"zd_boxes": {"d": 2}}."""
    if cfg == "z_initial_segments":
        return z_initial_segments()
    if cfg == "z_symmetric_intervals":
        return z_symmetric_intervals()
    if isinstance(cfg, Mapping) and "zd_boxes" in cfg:
        return zd_boxes(int(cfg["zd_boxes"].get("d", 2)))
    raise FormatError(f"unknown Folner preset {cfg!r}")


def sigma_folner(net: FolnerNet, i: int, exact: bool = False) -> SignedMeasure:
    """Uniform probability measure on F_i."""
    pts = net(i)
    if not pts:
        raise DomainError(f"empty Folner set at index {i}")
    w = Fraction(1, len(pts)) if exact else 1.0 / len(pts)
    return SignedMeasure({p: w for p in pts})


def folner_defect(net: FolnerNet, i: int, g) -> Fraction:
    """|F_i symmetric-difference (g + F_i)| / |F_i|, by enumeration."""
    F = set(net(i))
    gF = {_translate_point(p, g) for p in F}
    return Fraction(len(F ^ gF), len(F))


# -- pairings -------------------------------------------------------------------------

def _lookup(f, p):
    if callable(f):
        return f(p)
    try:
        return f[p]
    except KeyError:
        raise DomainError(f"integrand undefined at support point {p!r}") from None


def pair_scalar(f, mu: SignedMeasure):
    """sum_p mu({p}) f(p)."""
    return sum((w * _lookup(f, p) for p, w in mu.weights.items()), 0)


class VectorField(Mapping):
    """Finite map from points to vectors (or matrices) of a common shape."""

    def __init__(self, values: Mapping):
        self._values = {p: np.asarray(v) for p, v in values.items()}
        shapes = {v.shape for v in self._values.values()}
        if len(shapes) > 1:
            raise ShapeError(f"vector field values have mixed shapes {shapes}")
        self.shape = shapes.pop() if shapes else ()

    def __getitem__(self, p):
        return self._values[p]

    def __iter__(self):
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def pointwise_norm(self) -> dict:
        return {p: float(np.linalg.norm(np.asarray(v, dtype=float))) for p, v in self._values.items()}


def pair_vector(F, mu: SignedMeasure):
    """sum_p mu({p}) F(p) for vector- or operator-valued F."""
    total = None
    for p, w in mu.weights.items():
        term = w * np.asarray(_lookup(F, p))
        total = term if total is None else total + term
    if total is None:
        if isinstance(F, VectorField) and F.shape:
            return np.zeros(F.shape)
        return 0
    return total


def shift_field(f, i):
    """(i f)(j) = f(j + i)."""
    return lambda j: _lookup(f, _translate_point(j, i))
