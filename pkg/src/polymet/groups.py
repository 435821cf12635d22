"""Group arithmetic: the lamplighter group Z wr Z, its finite quotients
(Z/m) wr (Z/n), free abelian groups Z^d and real orthogonal matrices.

Every element type supports ``*``, ``inverse()``, ``identity()``, integer
``**`` and equality, so the sequence calculus in :mod:`polymet.leibman` can
treat them uniformly.  Exact types compare structurally; orthogonal
operators compare exactly too, use :func:`is_identity` / :func:`group_close`
with a tolerance for numerical work.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CapacityError, FormatError, ParameterError, ShapeError

DEFAULT_REP_CAP = 256


def _canonical_lamps(lamps) -> tuple[tuple[int, int], ...]:
    if isinstance(lamps, Mapping):
        items = lamps.items()
    else:
        items = lamps
    acc: dict[int, int] = {}
    for pos, val in items:
        acc[int(pos)] = acc.get(int(pos), 0) + int(val)
    return tuple(sorted((p, v) for p, v in acc.items() if v != 0))


def _power(g, k: int):
    """Square-and-multiply power; negative exponents go through the inverse."""
    k = int(k)
    if k < 0:
        g, k = g.inverse(), -k
    result = g.identity()
    base = g
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result


class LamplighterElement:
    """Element (f, s) of Z wr Z: a finitely supported lamp map f: Z -> Z and a shift s.

    Multiplication is (f, s)(g, t) = (f + g(. - s), s + t).  Lamps are held as a
    sorted tuple of (position, value) pairs without zero values, so equality and
    hashing are structural.
    """

    __slots__ = ("lamps", "shift")

    def __init__(self, lamps=(), shift: int = 0):
        self.lamps = _canonical_lamps(lamps)
        self.shift = int(shift)

    @classmethod
    def _raw(cls, lamps, shift):
        obj = cls.__new__(cls)
        obj.lamps = lamps
        obj.shift = shift
        return obj

    def identity(self) -> "LamplighterElement":
        return LamplighterElement._raw((), 0)

    def __mul__(self, other: "LamplighterElement") -> "LamplighterElement":
        if not isinstance(other, LamplighterElement):
            raise ParameterError(f"cannot multiply LamplighterElement by {type(other).__name__}")
        if not other.lamps:
            return LamplighterElement._raw(self.lamps, self.shift + other.shift)
        acc = dict(self.lamps)
        s = self.shift
        for p, v in other.lamps:
            q = p + s
            w = acc.get(q, 0) + v
            if w:
                acc[q] = w
            else:
                acc.pop(q, None)
        return LamplighterElement._raw(tuple(sorted(acc.items())), s + other.shift)

    def inverse(self) -> "LamplighterElement":
        s = self.shift
        return LamplighterElement._raw(tuple((p - s, -v) for p, v in self.lamps), -s)

    def __pow__(self, k: int) -> "LamplighterElement":
        return _power(self, k)

    def lamp(self, pos: int) -> int:
        return dict(self.lamps).get(pos, 0)

    def is_identity(self) -> bool:
        return not self.lamps and self.shift == 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LamplighterElement)
            and self.shift == other.shift
            and self.lamps == other.lamps
        )

    def __hash__(self) -> int:
        return hash((self.lamps, self.shift))

    def __repr__(self) -> str:
        lamps = ", ".join(f"{p}: {v}" for p, v in self.lamps)
        return f"LamplighterElement({{{lamps}}}, shift={self.shift})"

    def to_json(self) -> dict:
        return {"group": "lamplighter", "lamps": [list(pv) for pv in self.lamps], "shift": self.shift}


def lamplighter_alpha(k: int) -> LamplighterElement:
    """Lamp generator: one unit lamp at position k, no shift."""
    return LamplighterElement(((k, 1),), 0)


def lamplighter_beta() -> LamplighterElement:
    """Shift generator."""
    return LamplighterElement((), 1)


class FiniteWreathElement:
    """Element of (Z/m) wr (Z/n): n lamp residues mod m and a shift mod n."""

    __slots__ = ("m", "n", "lamps", "shift")

    def __init__(self, m: int, n: int, lamps: Sequence[int] | None = None, shift: int = 0):
        if m < 2 or n < 2:
            raise ParameterError(f"need m, n >= 2, got m={m}, n={n}")
        if lamps is None:
            lamps = (0,) * n
        if len(lamps) != n:
            raise ParameterError(f"expected {n} lamp slots, got {len(lamps)}")
        self.m = int(m)
        self.n = int(n)
        self.lamps = tuple(int(v) % self.m for v in lamps)
        self.shift = int(shift) % self.n

    def _check(self, other):
        if not isinstance(other, FiniteWreathElement) or (other.m, other.n) != (self.m, self.n):
            raise ParameterError("finite wreath elements from different groups")

    def identity(self) -> "FiniteWreathElement":
        return FiniteWreathElement(self.m, self.n)

    def __mul__(self, other: "FiniteWreathElement") -> "FiniteWreathElement":
        self._check(other)
        n, s = self.n, self.shift
        lamps = [(self.lamps[p] + other.lamps[(p - s) % n]) for p in range(n)]
        return FiniteWreathElement(self.m, n, lamps, s + other.shift)

    def inverse(self) -> "FiniteWreathElement":
        n, s = self.n, self.shift
        lamps = [-self.lamps[(p + s) % n] for p in range(n)]
        return FiniteWreathElement(self.m, n, lamps, -s)

    def __pow__(self, k: int) -> "FiniteWreathElement":
        return _power(self, k)

    def is_identity(self) -> bool:
        return self.shift == 0 and not any(self.lamps)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteWreathElement)
            and (self.m, self.n, self.shift, self.lamps) == (other.m, other.n, other.shift, other.lamps)
        )

    def __hash__(self) -> int:
        return hash((self.m, self.n, self.lamps, self.shift))

    def __repr__(self) -> str:
        return f"FiniteWreathElement(m={self.m}, n={self.n}, lamps={self.lamps}, shift={self.shift})"

    def to_json(self) -> dict:
        return {"group": "finite_wreath", "m": self.m, "n": self.n,
                "lamps": list(self.lamps), "shift": self.shift}


class ZdElement:
    """Element of the free abelian group Z^d, written multiplicatively."""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable[int]):
        self.coords = tuple(int(c) for c in coords)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def identity(self) -> "ZdElement":
        return ZdElement((0,) * self.dim)

    def __mul__(self, other: "ZdElement") -> "ZdElement":
        if not isinstance(other, ZdElement) or other.dim != self.dim:
            raise ParameterError("Z^d elements of different dimension")
        return ZdElement(a + b for a, b in zip(self.coords, other.coords))

    def inverse(self) -> "ZdElement":
        return ZdElement(-a for a in self.coords)

    def __pow__(self, k: int) -> "ZdElement":
        return ZdElement(a * int(k) for a in self.coords)

    def is_identity(self) -> bool:
        return not any(self.coords)

    def __eq__(self, other) -> bool:
        return isinstance(other, ZdElement) and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __repr__(self) -> str:
        return f"ZdElement({self.coords})"

    def to_json(self) -> dict:
        return {"group": "zd", "coords": list(self.coords)}


class OrthogonalOperator:
    """Real d x d matrix acting on R^d; the adjoint is the transpose.

    Orthogonality is not enforced on construction (use :func:`is_orthogonal`)
    so that near-orthogonal products of floating point matrices stay usable.
    """

    __slots__ = ("matrix",)
    __hash__ = None  # type: ignore[assignment]

    def __init__(self, matrix):
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeError(f"expected a square matrix, got shape {a.shape}")
        self.matrix = a

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def identity(self) -> "OrthogonalOperator":
        return OrthogonalOperator(np.eye(self.dim))

    def __mul__(self, other: "OrthogonalOperator") -> "OrthogonalOperator":
        if not isinstance(other, OrthogonalOperator) or other.dim != self.dim:
            raise ParameterError("operators of different dimension")
        return OrthogonalOperator(self.matrix @ other.matrix)

    def inverse(self) -> "OrthogonalOperator":
        return OrthogonalOperator(self.matrix.T.copy())

    adjoint = inverse

    def __pow__(self, k: int) -> "OrthogonalOperator":
        k = int(k)
        base = self.matrix if k >= 0 else self.matrix.T
        return OrthogonalOperator(np.linalg.matrix_power(base, abs(k)))

    def apply(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float)

    def is_identity(self, tol: float = 0.0) -> bool:
        return float(np.max(np.abs(self.matrix - np.eye(self.dim)))) <= tol

    def close(self, other: "OrthogonalOperator", tol: float) -> bool:
        return float(np.max(np.abs(self.matrix - other.matrix))) <= tol

    def __eq__(self, other) -> bool:
        return isinstance(other, OrthogonalOperator) and np.array_equal(self.matrix, other.matrix)

    def __repr__(self) -> str:
        return f"OrthogonalOperator(dim={self.dim})"

    def to_json(self) -> list:
        return self.matrix.tolist()


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


# -- generic group calculus ---------------------------------------------------

def mul(g, h):
    return g * h


def inverse(g):
    return g.inverse()


def identity_of(g):
    return g.identity()


def conjugate(h, g):
    """h g h^-1."""
    return h * g * h.inverse()


def commutator(r, s):
    """r^-1 s^-1 r s."""
    return r.inverse() * s.inverse() * r * s


def is_identity(g, tol: float = 0.0) -> bool:
    if isinstance(g, OrthogonalOperator):
        return g.is_identity(tol)
    return g.is_identity()


def group_close(g, h, tol: float = 0.0) -> bool:
    if isinstance(g, OrthogonalOperator):
        return g.close(h, tol)
    return g == h


def is_orthogonal(M, tol: float) -> bool:
    """True iff max |M^T M - I| <= tol."""
    a = np.asarray(M.matrix if isinstance(M, OrthogonalOperator) else M, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    return float(np.max(np.abs(a.T @ a - np.eye(a.shape[0])), initial=0.0)) <= tol


# -- finite quotients and the regular representation ---------------------------

def reduce_mod(g: LamplighterElement, m: int, n: int) -> FiniteWreathElement:
    """Image of g under Z wr Z -> (Z/m) wr (Z/n): positions and shift mod n, values mod m."""
    if m < 2 or n < 2:
        raise ParameterError(f"need m, n >= 2, got m={m}, n={n}")
    lamps = [0] * n
    for p, v in g.lamps:
        lamps[p % n] += v
    return FiniteWreathElement(m, n, lamps, g.shift)


@lru_cache(maxsize=None)
def wreath_elements(m: int, n: int) -> tuple[FiniteWreathElement, ...]:
    """All m**n * n elements of (Z/m) wr (Z/n) in a fixed enumeration order."""
    return tuple(
        FiniteWreathElement(m, n, lamps, s)
        for s in range(n)
        for lamps in itertools.product(range(m), repeat=n)
    )


@lru_cache(maxsize=None)
def _wreath_index(m: int, n: int) -> dict:
    return {g: i for i, g in enumerate(wreath_elements(m, n))}


def wreath_order(m: int, n: int) -> int:
    return m**n * n


def regular_representation(g: FiniteWreathElement, cap: int = DEFAULT_REP_CAP) -> OrthogonalOperator:
    """Permutation matrix of left multiplication by g, e_h -> e_{gh}."""
    dim = wreath_order(g.m, g.n)
    if dim > cap:
        raise CapacityError(f"regular representation has dimension {dim} > cap {cap}")
    elems = wreath_elements(g.m, g.n)
    index = _wreath_index(g.m, g.n)
    mat = np.zeros((dim, dim))
    for j, h in enumerate(elems):
        mat[index[g * h], j] = 1.0
    return OrthogonalOperator(mat)


# -- words over {A, B} ---------------------------------------------------------

class Word:
    """Word in the letters A, A^-1, B, B^-1, stored as (name, exponent) pairs."""

    ALPHABET = ("A", "B")

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[tuple[str, int]] = ()):
        letters = tuple((str(a), int(e)) for a, e in letters)
        for a, e in letters:
            if a not in self.ALPHABET or e not in (1, -1):
                raise FormatError(f"bad letter {a}^{e}; alphabet is A, B with exponents +-1")
        self.letters = letters

    def reduce(self) -> "Word":
        out: list[tuple[str, int]] = []
        for a, e in self.letters:
            if out and out[-1] == (a, -e):
                out.pop()
            else:
                out.append((a, e))
        return Word(out)

    def naive_degree(self) -> int:
        return naive_degree(self)

    def evaluate(self, A, B):
        """Evaluate with A, B substituted; works for any group element or sequence type."""
        env = {"A": A, "B": B}
        result = A.identity()
        for a, e in self.letters:
            x = env[a]
            result = result * (x if e == 1 else x.inverse())
        return result

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __repr__(self) -> str:
        return "Word(" + " ".join(a if e == 1 else f"{a}^-1" for a, e in self.letters) + ")"


def naive_degree(w: Word) -> int:
    """Sum of the exponents of B."""
    return sum(e for a, e in w.letters if a == "B")


# -- JSON ----------------------------------------------------------------------

def element_from_json(obj):
    """Inverse of ``to_json`` for every element type; a bare nested list is a matrix."""
    if isinstance(obj, list):
        return OrthogonalOperator(obj)
    if not isinstance(obj, Mapping) or "group" not in obj:
        raise FormatError(f"not a group element: {obj!r}")
    kind = obj["group"]
    if kind == "lamplighter":
        return LamplighterElement([tuple(pv) for pv in obj.get("lamps", [])], obj.get("shift", 0))
    if kind == "finite_wreath":
        return FiniteWreathElement(obj["m"], obj["n"], obj.get("lamps"), obj.get("shift", 0))
    if kind == "zd":
        return ZdElement(obj["coords"])
    if kind == "orthogonal":
        if "matrix" in obj:
            return OrthogonalOperator(obj["matrix"])
        # block diagonal: planar rotations followed by fixed coordinates
        return OrthogonalOperator(block_rotation(obj.get("rotations", []), obj.get("fixed", 0)))
    raise FormatError(f"unknown group {kind!r}")


def block_rotation(angles, fixed: int = 0) -> np.ndarray:
    """blockdiag(rot(angles[0]), ..., rot(angles[-1]), I_fixed)."""
    d = 2 * len(angles) + fixed
    if d == 0:
        raise ShapeError("empty block rotation")
    M = np.eye(d)
    for b, th in enumerate(angles):
        M[2 * b:2 * b + 2, 2 * b:2 * b + 2] = rotation(th)
    return M


def element_to_json(g):
    return g.to_json()
