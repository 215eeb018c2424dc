"""Dense linear algebra over prime fields.

Matrices are plain ``numpy`` int64 arrays holding residues in ``[0, p)``.
Every routine takes the modulus explicitly and returns fresh arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InconsistentSystemError, InvariantError, SingularMatrixError

_INT64_LIMIT = 2**63 - 1


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
class PrimeField:
    """The field of residues modulo a prime ``p``."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise InvariantError("prime modulus", self.p)
        if self.p >= 2**31:
            raise InvariantError("modulus fits in a machine word", self.p)
        object.__setattr__(self, "p", int(self.p))

    def inv(self, a: int) -> int:
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, -1, self.p)

    def __repr__(self):
        return f"GF({self.p})"


def as_matrix(data, p: int, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Coerce nested integer data to a reduced 2D int64 array."""
    arr = np.array(data, dtype=np.int64)
    if shape is not None:
        arr = arr.reshape(shape)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D matrix, got shape {arr.shape}")
    return arr % p


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Product mod ``p``; falls back to Python integers if int64 could overflow."""
    inner = a.shape[-1]
    if inner * (p - 1) ** 2 <= _INT64_LIMIT:
        return (a @ b) % p
    prod = a.astype(object) @ b.astype(object)
    return (prod % p).astype(np.int64)


def mat_chain(p: int, *mats: np.ndarray) -> np.ndarray:
    """Left-to-right product ``mats[0] @ mats[1] @ ...`` mod ``p``."""
    out = mats[0]
    for m in mats[1:]:
        out = matmul(out, m, p)
    return out


def kron(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Kronecker product, left factor major."""
    return np.kron(a, b) % p


def block_diag(blocks, p: int) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = zeros(rows, cols)
    r = c = 0
    for b in blocks:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out % p


def swap_permutation(m: int, n: int) -> np.ndarray:
    """Matrix sending ``e_i (x) f_j`` (index ``i*n + j``) to ``f_j (x) e_i`` (index ``j*m + i``)."""
    out = zeros(m * n, m * n)
    for i in range(m):
        for j in range(n):
            out[j * m + i, i * n + j] = 1
    return out


def rref(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int], int]:
    """Reduced row echelon form mod ``p``.

    Returns ``(R, pivots, rank)`` where ``pivots`` lists the pivot columns.
    """
    a = np.array(m, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots, r


def rank(m: np.ndarray, p: int) -> int:
    if m.size == 0:
        return 0
    return rref(m, p)[2]


def nullspace(m: np.ndarray, p: int) -> np.ndarray:
    """Basis of ``{x : m @ x = 0}`` as the rows of the returned array."""
    rows, cols = m.shape
    if rows == 0:
        return identity(cols)
    r, pivots, rk = rref(m, p)
    pivset = set(pivots)
    free = [c for c in range(cols) if c not in pivset]
    basis = zeros(len(free), cols)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-r[i, f]) % p
    return basis


class AffineSolution(NamedTuple):
    """All solutions ``particular + span(kernel rows)``."""

    particular: np.ndarray
    kernel: np.ndarray


def solve_linear(a: np.ndarray, b, p: int) -> AffineSolution:
    """Solve ``a @ x = b`` mod ``p``.

    Raises
    ------
    InconsistentSystemError
        If the system has no solution.
    """
    a = np.array(a, dtype=np.int64) % p
    b = np.array(b, dtype=np.int64).reshape(-1) % p
    rows, cols = a.shape
    if b.shape[0] != rows:
        raise ValueError(f"right-hand side has length {b.shape[0]}, expected {rows}")
    aug = np.concatenate([a, b[:, None]], axis=1)
    r, pivots, rk = rref(aug, p)
    if cols in pivots:
        raise InconsistentSystemError("system A x = b is inconsistent")
    x = zeros(1, cols)[0]
    for i, pc in enumerate(pivots):
        x[pc] = r[i, cols]
    return AffineSolution(x, nullspace(a, p))


def inverse(m: np.ndarray, p: int) -> np.ndarray:
    n, k = m.shape
    if n != k:
        raise SingularMatrixError(f"non-square matrix of shape {m.shape}")
    if n == 0:
        return zeros(0, 0)
    aug = np.concatenate([np.array(m, dtype=np.int64) % p, identity(n)], axis=1)
    r, pivots, rk = rref(aug, p)
    if pivots[:n] != list(range(n)) or rk < n:
        raise SingularMatrixError("matrix is singular")
    return r[:, n:].copy()


def is_invertible(m: np.ndarray, p: int) -> bool:
    return m.shape[0] == m.shape[1] and rank(m, p) == m.shape[0]


def column_basis(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Echelon basis of the column space of ``m``.

    Returns ``(B, rows)`` with ``B`` of shape ``(m.rows, rank)`` and
    ``B[rows, :]`` the identity, so selecting ``rows`` is a left inverse of
    ``B`` on its image.
    """
    if m.shape[1] == 0 or m.shape[0] == 0:
        return zeros(m.shape[0], 0), []
    r, pivots, rk = rref(m.T, p)
    return r[:rk].T.copy(), pivots


def random_matrix(rng: np.random.Generator, rows: int, cols: int, p: int) -> np.ndarray:
    return rng.integers(0, p, size=(rows, cols), dtype=np.int64)


def random_invertible(rng: np.random.Generator, n: int, p: int) -> np.ndarray:
    while True:
        m = random_matrix(rng, n, n, p)
        if is_invertible(m, p):
            return m


def _inverse_table(p: int) -> np.ndarray:
    tab = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        tab[a] = pow(a, -1, p)
    return tab


def batch_det(a: np.ndarray, p: int) -> np.ndarray:
    """Determinants mod ``p`` of a stack of square matrices of shape ``(N, d, d)``."""
    a = np.array(a, dtype=np.int64) % p
    n, d, _ = a.shape
    det = np.ones(n, dtype=np.int64)
    inv = _inverse_table(p)
    idx = np.arange(n)
    for c in range(d):
        nz = a[:, c:, c] != 0
        has = nz.any(axis=1)
        det[~has] = 0
        piv = nz.argmax(axis=1) + c
        top = a[idx, c].copy()
        a[idx, c] = a[idx, piv]
        a[idx, piv] = top
        det = np.where(piv != c, -det, det) % p
        pv = a[:, c, c]
        det = det * pv % p
        factors = a[:, c + 1 :, c] * inv[pv][:, None] % p
        a[:, c + 1 :, :] = (a[:, c + 1 :, :] - factors[:, :, None] * a[:, None, c, :]) % p
    return det


def batch_inverse(a: np.ndarray, p: int) -> np.ndarray:
    """Inverses of a stack of invertible matrices ``(N, d, d)`` by Gauss-Jordan."""
    a = np.array(a, dtype=np.int64) % p
    n, d, _ = a.shape
    aug = np.concatenate([a, np.broadcast_to(identity(d), (n, d, d))], axis=2).copy()
    inv = _inverse_table(p)
    idx = np.arange(n)
    for c in range(d):
        piv = (aug[:, c:, c] != 0).argmax(axis=1) + c
        if not np.all(aug[idx, piv, c]):
            raise SingularMatrixError("singular matrix in batch")
        top = aug[idx, c].copy()
        aug[idx, c] = aug[idx, piv]
        aug[idx, piv] = top
        aug[:, c, :] = aug[:, c, :] * inv[aug[:, c, c]][:, None] % p
        col = aug[:, :, c].copy()
        col[:, c] = 0
        aug = (aug - col[:, :, None] * aug[:, None, c, :]) % p
    return aug[:, :, d:].copy()
