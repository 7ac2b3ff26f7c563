"""Dense exact linear algebra over a prime field GF(p).

Matrices are plain ``numpy.int64`` arrays with entries reduced into
``[0, p)``; every function takes the characteristic ``p`` explicitly and
never mutates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import rref_inplace

__all__ = [
    "Field",
    "is_prime",
    "asmat",
    "rref",
    "rank",
    "kernel_basis",
    "solve",
    "inverse",
    "matmul",
    "column_space",
    "left_inverse",
    "in_span",
]

_INT64_MAX = (1 << 63) - 1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Field:
    """The prime field GF(p), ``2 <= p < 2**31``."""

    p: int

    def __post_init__(self):
        if not (2 <= self.p < 2**31) or not is_prime(self.p):
            raise ValueError(f"characteristic must be a prime below 2^31, got {self.p}")

    def __str__(self):
        return f"GF({self.p})"

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)

    def mat(self, data, shape=None) -> np.ndarray:
        return asmat(data, self.p, shape)


def asmat(data, p: int, shape=None) -> np.ndarray:
    """Coerce ``data`` to a reduced int64 matrix (or vector)."""
    a = np.array(data, dtype=object if _needs_object(data) else np.int64)
    if shape is not None:
        a = a.reshape(shape)
    a = np.mod(a, p).astype(np.int64)
    return a


def _needs_object(data) -> bool:
    # huge python ints must be reduced before the int64 cast
    try:
        arr = np.asarray(data)
    except OverflowError:
        return True
    return arr.dtype == object


def rref(m: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Reduced row echelon form: returns ``(R, pivot_columns, rank)``."""
    a = np.ascontiguousarray(m, dtype=np.int64).copy()
    if a.ndim != 2:
        raise ValueError("rref expects a 2-d matrix")
    r, piv = rref_inplace(a, p)
    return a, np.asarray(piv, dtype=np.int64), int(r)


def rank(m: np.ndarray, p: int) -> int:
    if m.size == 0:
        return 0
    # reducing the shorter orientation is cheaper
    if m.shape[0] > m.shape[1]:
        m = m.T
    return rref(m, p)[2]


def kernel_basis(m: np.ndarray, p: int) -> np.ndarray:
    """Rows form a basis of ``{v : m @ v = 0}``."""
    m = np.asarray(m, dtype=np.int64)
    cols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    R, piv, r = rref(m, p)
    free = np.setdiff1d(np.arange(cols), piv, assume_unique=True)
    basis = np.zeros((free.size, cols), dtype=np.int64)
    if free.size == 0:
        return basis
    basis[np.arange(free.size), free] = 1
    if r:
        # x[piv] = -R[:r, free] @ x[free]
        basis[:, piv] = (-R[:r, free].T) % p
    return basis


def solve(m: np.ndarray, b, p: int):
    """One solution ``v`` of ``m @ v = b``, or ``None`` when inconsistent."""
    m = np.asarray(m, dtype=np.int64)
    b = np.mod(np.asarray(b, dtype=np.int64), p)
    if b.ndim != 1 or b.shape[0] != m.shape[0]:
        raise ValueError(f"right-hand side has length {b.shape}, expected {m.shape[0]}")
    cols = m.shape[1]
    aug = np.concatenate([m, b[:, None]], axis=1)
    R, piv, r = rref(aug, p)
    if r and piv[-1] == cols:
        return None
    v = np.zeros(cols, dtype=np.int64)
    v[piv] = R[:r, cols]
    return v


def solve_many(m: np.ndarray, B: np.ndarray, p: int):
    """Solve ``m @ X = B`` column by column; ``None`` if any column fails."""
    m = np.asarray(m, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    cols = m.shape[1]
    aug = np.concatenate([m, B], axis=1)
    R, piv, r = rref(aug, p)
    if r and piv[-1] >= cols:
        return None
    X = np.zeros((cols, B.shape[1]), dtype=np.int64)
    X[piv] = R[:r, cols:]
    return X


def inverse(m: np.ndarray, p: int) -> np.ndarray:
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    R, piv, r = rref(np.concatenate([m, np.eye(n, dtype=np.int64)], axis=1), p)
    if r < n or piv[n - 1] != n - 1:
        raise np.linalg.LinAlgError("matrix is singular mod p")
    return R[:, n:].copy()


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """``a @ b mod p`` (numpy broadcasting rules) without int64 overflow."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1]
    if inner * (p - 1) ** 2 <= _INT64_MAX:
        return np.matmul(a, b) % p
    out = np.matmul(a.astype(object), b.astype(object)) % p
    return out.astype(np.int64)


def column_space(m: np.ndarray, p: int) -> np.ndarray:
    """Columns form a basis of the column space of ``m`` (reduced form)."""
    if m.shape[1] == 0:
        return np.zeros((m.shape[0], 0), dtype=np.int64)
    R, _, r = rref(np.ascontiguousarray(m.T), p)
    return R[:r].T.copy()


def left_inverse(k: np.ndarray, p: int) -> np.ndarray:
    """``L`` with ``L @ k = I`` for a matrix of full column rank."""
    n = k.shape[1]
    if n == 0:
        return np.zeros((0, k.shape[0]), dtype=np.int64)
    _, piv, r = rref(np.ascontiguousarray(k.T), p)
    if r < n:
        raise np.linalg.LinAlgError("columns are linearly dependent")
    out = np.zeros((n, k.shape[0]), dtype=np.int64)
    out[:, piv] = inverse(k[piv], p)
    return out


def in_span(basis_cols: np.ndarray, v: np.ndarray, p: int) -> bool:
    if basis_cols.shape[1] == 0:
        return not np.any(np.mod(v, p))
    return rank(np.column_stack([basis_cols, v]), p) == rank(basis_cols, p)
