"""Cluster seeds, exchange matrices, and the mutation/permutation calculus.

Everything here is generic over the scalar field: entries may be Python
complex numbers, ``fractions.Fraction`` (for exact identity testing), or any
type supporting ``+ * / **int`` and comparison with zero.  All values are
immutable and all operations are pure functions returning new values.

Indices are 1-based throughout, matching the usual cluster-algebra subscript
conventions; internal 0-based storage is never exposed.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "ClusterAlgebraError",
    "DegenerateSeedError",
    "SingularYError",
    "ExchangeMatrix",
    "ClusterSeed",
    "build_exchange_matrix",
    "mutate",
    "y_from_x",
    "mutate_y",
    "permute",
    "permute_vector",
    "scalar_close",
    "vector_close",
]

#: Default closeness tolerances for invariant checks in floating mode.
REL_TOL = 1e-9
ABS_TOL = 1e-12


class ClusterAlgebraError(Exception):
    """Base class for cluster-algebra errors."""


class DegenerateSeedError(ClusterAlgebraError):
    """A mutation or monomial hit a zero cluster variable."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"cluster variable x_{index} is zero")


class SingularYError(ClusterAlgebraError):
    """A y-mutation hit y_k in {0, -1}, where the rule is singular."""

    def __init__(self, index: int, value=None):
        self.index = index
        self.value = value
        super().__init__(f"y_{index} = {value!r} is a singular shape parameter")


@dataclass(frozen=True)
class ExchangeMatrix:
    """Skew-symmetric integer matrix B = (b_ij) with 1-based accessors."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("exchange matrix must be square")
        if np.any(arr.T != -arr):
            raise ValueError("exchange matrix must be skew-symmetric")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def size(self) -> int:
        return self.data.shape[0]

    def b(self, i: int, j: int) -> int:
        """Entry b_ij, 1-based."""
        return int(self.data[i - 1, j - 1])

    def column(self, j: int) -> np.ndarray:
        return self.data[:, j - 1]

    def mutated(self, k: int) -> "ExchangeMatrix":
        """Matrix mutation at vertex k: row/column k flip sign, the rest gain
        (|b_ik| b_kj + b_ik |b_kj|) / 2."""
        n = self.size
        if not 1 <= k <= n:
            raise IndexError(f"mutation index {k} out of range 1..{n}")
        B = self.data
        col = B[:, k - 1][:, None]
        row = B[k - 1, :][None, :]
        out = B + (np.abs(col) * row + col * np.abs(row)) // 2
        out[k - 1, :] = -B[k - 1, :]
        out[:, k - 1] = -B[:, k - 1]
        return ExchangeMatrix(out)

    def permuted(self, i: int, j: int) -> "ExchangeMatrix":
        """Simultaneously swap rows i,j and columns i,j (conjugation by a
        transposition)."""
        out = self.data.copy()
        out[[i - 1, j - 1], :] = out[[j - 1, i - 1], :]
        out[:, [i - 1, j - 1]] = out[:, [j - 1, i - 1]]
        return ExchangeMatrix(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExchangeMatrix):
            return NotImplemented
        return bool(np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash(self.data.tobytes())


@dataclass(frozen=True)
class ClusterSeed:
    """A cluster seed: variable tuple x together with its exchange matrix."""

    x: tuple
    B: ExchangeMatrix

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        if len(self.x) != self.B.size:
            raise ValueError(
                f"seed length {len(self.x)} does not match matrix size {self.B.size}"
            )

    @property
    def size(self) -> int:
        return len(self.x)


def build_exchange_matrix(n: int) -> ExchangeMatrix:
    """Exchange matrix of the (3n+1)-node braid quiver for n strands.

    Per strand block j = 1..n the upper-triangle entries are
    b[3j-2][3j-1] = +1, b[3j-2][3j] = -1, b[3j-1][3j+1] = +1,
    b[3j][3j+1] = -1; skew-symmetry fills in the rest.
    """
    if n < 2:
        raise ValueError(f"strand count must be at least 2, got {n}")
    N = 3 * n + 1
    B = np.zeros((N, N), dtype=np.int64)
    for j in range(1, n + 1):
        for a, b, v in (
            (3 * j - 2, 3 * j - 1, 1),
            (3 * j - 2, 3 * j, -1),
            (3 * j - 1, 3 * j + 1, 1),
            (3 * j, 3 * j + 1, -1),
        ):
            B[a - 1, b - 1] = v
            B[b - 1, a - 1] = -v
    return ExchangeMatrix(B)


def _exchange_products(x: Sequence, B: ExchangeMatrix, k: int):
    """The two subtraction-free exchange monomials at vertex k."""
    pos = 1
    neg = 1
    col = B.column(k)
    for j, b in enumerate(col):
        if b > 0:
            pos = pos * x[j] ** int(b)
        elif b < 0:
            neg = neg * x[j] ** int(-b)
    return pos, neg


def mutate(seed: ClusterSeed, k: int) -> ClusterSeed:
    """Seed mutation at vertex k (involutive).

    Replaces x_k by (prod_{b_jk>0} x_j^b_jk + prod_{b_jk<0} x_j^-b_jk) / x_k
    and mutates B accordingly.
    """
    n = seed.size
    if not 1 <= k <= n:
        raise IndexError(f"mutation index {k} out of range 1..{n}")
    xk = seed.x[k - 1]
    if xk == 0:
        raise DegenerateSeedError(k)
    pos, neg = _exchange_products(seed.x, seed.B, k)
    x = list(seed.x)
    x[k - 1] = (pos + neg) / xk
    return ClusterSeed(tuple(x), seed.B.mutated(k))


def y_from_x(seed: ClusterSeed) -> tuple:
    """The y-variables y_j = prod_k x_k^b_kj of a seed."""
    for idx, v in enumerate(seed.x, start=1):
        if v == 0:
            raise DegenerateSeedError(idx)
    out = []
    for j in range(1, seed.size + 1):
        v = 1
        for kk, b in enumerate(seed.B.column(j)):
            if b > 0:
                v = v * seed.x[kk] ** int(b)
            elif b < 0:
                v = v / seed.x[kk] ** int(-b)
        out.append(v)
    return tuple(out)


def mutate_y(y: Sequence, B: ExchangeMatrix, k: int) -> tuple[tuple, ExchangeMatrix]:
    """Mutation of a (y, B) pair at vertex k.

    y_k inverts; for i != k, y_i picks up (1 + y_k^-1)^-b_ki when b_ki >= 0
    and (1 + y_k)^-b_ki when b_ki <= 0.
    """
    n = len(y)
    if not 1 <= k <= n:
        raise IndexError(f"mutation index {k} out of range 1..{n}")
    yk = y[k - 1]
    if yk == 0 or yk == -1:
        raise SingularYError(k, yk)
    out = list(y)
    out[k - 1] = 1 / yk
    for i in range(1, n + 1):
        if i == k:
            continue
        b = B.b(k, i)
        if b >= 0:
            out[i - 1] = y[i - 1] * (1 + 1 / yk) ** (-b)
        else:
            out[i - 1] = y[i - 1] * (1 + yk) ** (-b)
    return tuple(out), B.mutated(k)


def permute(seed: ClusterSeed, i: int, j: int) -> ClusterSeed:
    """Transposition s_{i,j} of subscripts: swaps x_i with x_j and the
    corresponding rows and columns of B."""
    x = list(seed.x)
    x[i - 1], x[j - 1] = x[j - 1], x[i - 1]
    return ClusterSeed(tuple(x), seed.B.permuted(i, j))


def permute_vector(v: Sequence, B: ExchangeMatrix, i: int, j: int) -> tuple[tuple, ExchangeMatrix]:
    """s_{i,j} acting on a bare variable vector (x- or y-type) plus B."""
    out = list(v)
    out[i - 1], out[j - 1] = out[j - 1], out[i - 1]
    return tuple(out), B.permuted(i, j)


def scalar_close(a, b, rel_tol: float = REL_TOL, abs_tol: float = ABS_TOL) -> bool:
    """Closeness for field scalars: exact for Fractions/ints, tolerance-based
    for floating complex."""
    if a == b:
        return True
    try:
        return cmath.isclose(complex(a), complex(b), rel_tol=rel_tol, abs_tol=abs_tol)
    except (TypeError, ValueError):
        return False


def vector_close(u: Sequence, v: Sequence, rel_tol: float = REL_TOL, abs_tol: float = ABS_TOL) -> bool:
    if len(u) != len(v):
        return False
    return all(scalar_close(a, b, rel_tol, abs_tol) for a, b in zip(u, v))
