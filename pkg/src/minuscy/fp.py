"""Exact dense linear algebra over a prime field F_p.

All matrices are small (at most ~50x50), so everything is dense int64
numpy with hand-rolled Gaussian elimination mod p.  No floats anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np


class DimensionError(ValueError):
    """Shapes of operands are inconsistent."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")


@dataclass(frozen=True)
class FieldElement:
    """Residue in [0, p) for a prime p; arithmetic is exact mod p."""

    residue: int
    modulus: int

    def __post_init__(self):
        _check_prime(self.modulus)
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.modulus != self.modulus:
                raise DimensionError("mixed moduli")
            return other
        return FieldElement(int(other), self.modulus)

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.residue + o.residue, self.modulus)

    def __sub__(self, other):
        o = self._coerce(other)
        return FieldElement(self.residue - o.residue, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        return FieldElement(self.residue * o.residue, self.modulus)

    def inverse(self) -> "FieldElement":
        if self.residue == 0:
            raise ZeroDivisionError("inverse of 0")
        return FieldElement(pow(self.residue, self.modulus - 2, self.modulus), self.modulus)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __bool__(self):
        return self.residue != 0


def inv_mod(a: int, p: int) -> int:
    return pow(int(a) % p, p - 2, p)


def rref(a: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form over F_p.  Returns (R, pivot_columns)."""
    A = np.asarray(a, dtype=np.int64) % p
    m, n = A.shape
    r = 0
    pivots: List[int] = []
    for c in range(n):
        piv = None
        for i in range(r, m):
            if A[i, c] % p:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * inv_mod(A[r, c], p)) % p
        for i in range(m):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A % p, pivots


def rank(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    _, pivots = rref(a, p)
    return len(pivots)


def kernel_basis(a: np.ndarray, p: int) -> np.ndarray:
    """Columns form a basis of the right kernel of a over F_p."""
    A = np.asarray(a, dtype=np.int64) % p
    m, n = A.shape
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    R, pivots = rref(A, p)
    piv_set = set(pivots)
    free = [j for j in range(n) if j not in piv_set]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for row, pc in enumerate(pivots):
            basis[pc, k] = (-R[row, f]) % p
    return basis


def cokernel_dim(a: np.ndarray, p: int) -> int:
    return a.shape[0] - rank(a, p)


def solve(a: np.ndarray, rhs: np.ndarray, p: int) -> Optional[np.ndarray]:
    """One solution of a x = rhs over F_p, or None if inconsistent."""
    A = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(rhs, dtype=np.int64).reshape(-1) % p
    m, n = A.shape
    if b.shape[0] != m:
        raise DimensionError(f"rhs length {b.shape[0]} != rows {m}")
    aug = np.concatenate([A, b.reshape(-1, 1)], axis=1)
    R, pivots = rref(aug, p)
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.int64)
    for row, pc in enumerate(pivots):
        x[pc] = R[row, n]
    return x


class Matrix:
    """Dense matrix over F_p.  Thin wrapper holding an int64 array mod p."""

    def __init__(self, entries, modulus: int):
        _check_prime(modulus)
        arr = np.asarray(entries, dtype=np.int64)
        if arr.ndim != 2:
            raise DimensionError("matrix entries must be 2-dimensional")
        self.p = modulus
        self.a = arr % modulus

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "Matrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int) -> "Matrix":
        return cls(np.eye(n, dtype=np.int64), p)

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.p == other.p and self.a.shape == other.a.shape and bool(
            np.array_equal(self.a, other.a))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.p != other.p:
            raise DimensionError("mixed moduli")
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.a.shape} by {other.a.shape}")
        return Matrix(self.a @ other.a, self.p)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.a.shape != other.a.shape or self.p != other.p:
            raise DimensionError("shape or modulus mismatch")
        return Matrix(self.a + other.a, self.p)

    def rank(self) -> int:
        return rank(self.a, self.p)

    def kernel_basis(self) -> "Matrix":
        return Matrix(kernel_basis(self.a, self.p), self.p)

    def cokernel_dim(self) -> int:
        return cokernel_dim(self.a, self.p)

    def solve(self, rhs) -> Optional[np.ndarray]:
        return solve(self.a, np.asarray(rhs, dtype=np.int64), self.p)

    def __repr__(self):
        return f"Matrix(p={self.p},\n{self.a})"
