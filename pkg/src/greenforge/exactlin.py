"""Exact dense linear algebra over a prime field F_p.

Matrices are numpy int64 arrays with entries in [0, p).  Vectors are rows,
except where an operation is stated in terms of ``m @ x`` (``solve``,
``kernel``, ``image``, ``preimage``), which follow the column convention.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from typing import Iterable, Sequence

import numpy as np

DEFAULT_PRIME = 101


class DimensionMismatch(ValueError):
    pass


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


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than ``n``."""
    n += 1
    while not is_prime(n):
        n += 1
    return n


def _initial_prime() -> int:
    p = int(os.environ.get("GREENFORGE_PRIME", DEFAULT_PRIME))
    if not is_prime(p):
        raise ValueError(f"GREENFORGE_PRIME={p} is not prime")
    return p


_PRIME = _initial_prime()


def get_prime() -> int:
    return _PRIME


def set_prime(p: int) -> None:
    global _PRIME
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    _PRIME = int(p)


@contextmanager
def using_prime(p: int):
    old = get_prime()
    set_prime(p)
    try:
        yield p
    finally:
        set_prime(old)


def resolve_prime(p: int | None = None) -> int:
    """The given prime after a primality check, or the process-wide default."""
    if p is None:
        return get_prime()
    if not is_prime(int(p)):
        raise ValueError(f"{p} is not prime")
    return int(p)


def _p(p: int | None) -> int:
    return _PRIME if p is None else p


def asmat(m, p: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce to a 2-d int64 array reduced mod p."""
    a = np.asarray(m, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else a.reshape(0, cols or 0)
    if a.ndim != 2:
        raise DimensionMismatch("expected a matrix")
    if cols is not None and a.shape[0] == 0:
        a = a.reshape(0, cols)
    return np.mod(a, _p(p))


def matmul(a: np.ndarray, b: np.ndarray, p: int | None = None) -> np.ndarray:
    """Product mod p.  Uses float64 BLAS when every partial sum is exact."""
    p = _p(p)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1]
    if inner == 0:
        return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    if inner * (p - 1) ** 2 < 2**52:
        c = np.matmul(a.astype(np.float64), b.astype(np.float64))
        return np.mod(np.rint(c).astype(np.int64), p)
    return np.mod(np.matmul(a % p, b % p), p)


def rref(m, p: int | None = None) -> tuple[np.ndarray, tuple[int, ...], int]:
    """Reduced row echelon form.

    Returns the matrix (same shape, zero rows at the bottom), the pivot
    columns and the rank.
    """
    p = _p(p)
    a = asmat(m, p).copy()
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
        inv = pow(int(a[r, c]), p - 2, p)
        a[r, c:] = (a[r, c:] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit, c:] = (a[hit, c:] - np.outer(col[hit], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return a, tuple(pivots), r


def rank(m, p: int | None = None) -> int:
    return rref(m, p)[2]


def solve(a, b, p: int | None = None) -> np.ndarray | None:
    """Solve ``a @ x = b``; None when inconsistent.

    Non-pivot coordinates of the returned solution are zero.
    """
    p = _p(p)
    a = asmat(a, p)
    b = np.asarray(b, dtype=np.int64)
    vector = b.ndim == 1
    b = asmat(b.reshape(-1, 1) if vector else b, p, cols=1 if vector else None)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"a has {a.shape[0]} rows, b has {b.shape[0]}")
    n = a.shape[1]
    r, piv, rk = rref(np.hstack([a, b]), p)
    if any(c >= n for c in piv):
        return None
    x = np.zeros((n, b.shape[1]), dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = r[i, n:]
    return x[:, 0] if vector else x


def inverse(a, p: int | None = None) -> np.ndarray:
    p = _p(p)
    a = asmat(a, p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise DimensionMismatch("inverse of a non-square matrix")
    r, piv, rk = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if rk < n or piv[n - 1] >= n:
        raise ZeroDivisionError("matrix is singular")
    return r[:, n:]


class Subspace:
    """A subspace of F_p^n held by its canonical RREF basis."""

    __slots__ = ("ambient_dim", "basis", "pivots", "_key")

    def __init__(self, ambient_dim: int, basis: np.ndarray, pivots: Sequence[int]):
        self.ambient_dim = int(ambient_dim)
        basis = np.asarray(basis, dtype=np.int64)
        if basis.ndim != 2 or basis.shape[1] != self.ambient_dim:
            basis = basis.reshape(-1, self.ambient_dim) if self.ambient_dim else np.zeros((0, 0), dtype=np.int64)
        basis.setflags(write=False)
        self.basis = basis
        self.pivots = tuple(int(c) for c in pivots)
        self._key = None

    @classmethod
    def span(cls, vectors, ambient_dim: int | None = None, p: int | None = None) -> Subspace:
        v = np.asarray(vectors, dtype=np.int64)
        if ambient_dim is None:
            ambient_dim = v.shape[-1]
        if v.size == 0 or ambient_dim == 0:
            return cls.zero(ambient_dim)
        v = asmat(v.reshape(-1, ambient_dim), p, cols=ambient_dim)
        if v.shape[1] != ambient_dim:
            raise DimensionMismatch("vector length differs from ambient dimension")
        if v.shape[0] == 0:
            return cls.zero(ambient_dim)
        r, piv, rk = rref(v, p)
        return cls(ambient_dim, r[:rk], piv)

    @classmethod
    def zero(cls, n: int) -> Subspace:
        return cls(n, np.zeros((0, n), dtype=np.int64), ())

    @classmethod
    def full(cls, n: int) -> Subspace:
        return cls(n, np.eye(n, dtype=np.int64), range(n))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.ambient_dim, self.basis.tobytes())
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"

    def coords(self, vectors, p: int | None = None) -> np.ndarray | None:
        """Coordinates of row vectors in this basis, or None if some vector is outside."""
        p = _p(p)
        v = asmat(vectors, p, cols=self.ambient_dim)
        c = v[:, list(self.pivots)]
        if not np.array_equal(matmul(c, self.basis, p), v):
            return None
        return c

    def contains(self, vectors, p: int | None = None) -> bool:
        return self.coords(vectors, p) is not None

    def issubspace(self, other: Subspace, p: int | None = None) -> bool:
        return self.dim == 0 or other.contains(self.basis, p)

    def to_list(self) -> list[list[int]]:
        return self.basis.tolist()


def kernel(m, p: int | None = None, cols: int | None = None) -> Subspace:
    """Canonical basis of {x : m @ x = 0}."""
    p = _p(p)
    m = asmat(m, p, cols=cols)
    n = m.shape[1]
    r, piv, rk = rref(m, p)
    free = [c for c in range(n) if c not in set(piv)]
    if not free:
        return Subspace.zero(n)
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, c in enumerate(piv):
            basis[k, c] = (-r[i, f]) % p
    return Subspace.span(basis, n, p)


def left_kernel(m, p: int | None = None, rows: int | None = None) -> Subspace:
    """Canonical basis of {x : x @ m = 0}."""
    m = np.asarray(m, dtype=np.int64)
    if m.size == 0 and rows is not None:
        return Subspace.full(rows)
    return kernel(m.T, p)


def image(m, p: int | None = None) -> Subspace:
    """Column space of m."""
    m = np.asarray(m, dtype=np.int64)
    return Subspace.span(m.T, m.shape[0], p)


def row_space(m, p: int | None = None, cols: int | None = None) -> Subspace:
    m = np.asarray(m, dtype=np.int64)
    return Subspace.span(m, m.shape[-1] if cols is None else cols, p)


def annihilator(w: Subspace, p: int | None = None) -> np.ndarray:
    """Rows z with w.basis @ z = 0, as a matrix whose rows span w's annihilator."""
    if w.dim == 0:
        return np.eye(w.ambient_dim, dtype=np.int64)
    return kernel(w.basis, p).basis


def preimage(m, w: Subspace, p: int | None = None) -> Subspace:
    """{x : m @ x in w}."""
    m = asmat(m, p, cols=None)
    if m.shape[0] != w.ambient_dim:
        raise DimensionMismatch("target dimension differs from subspace ambient")
    z = annihilator(w, p)
    if z.shape[0] == 0:
        return Subspace.full(m.shape[1])
    return kernel(matmul(z, m, p), p, cols=m.shape[1])


def _check_ambient(u: Subspace, v: Subspace) -> None:
    if u.ambient_dim != v.ambient_dim:
        raise DimensionMismatch(f"ambient {u.ambient_dim} vs {v.ambient_dim}")


def intersect(u: Subspace, v: Subspace, p: int | None = None) -> Subspace:
    _check_ambient(u, v)
    if u.dim == 0 or v.dim == 0:
        return Subspace.zero(u.ambient_dim)
    stacked = np.vstack([u.basis, v.basis])
    k = left_kernel(stacked, p)
    if k.dim == 0:
        return Subspace.zero(u.ambient_dim)
    return Subspace.span(matmul(k.basis[:, : u.dim], u.basis, p), u.ambient_dim, p)


def span_sum(u: Subspace, v: Subspace, p: int | None = None) -> Subspace:
    _check_ambient(u, v)
    return Subspace.span(np.vstack([u.basis, v.basis]), u.ambient_dim, p)


def sum_all(spaces: Iterable[Subspace], ambient_dim: int, p: int | None = None) -> Subspace:
    rows = [s.basis for s in spaces if s.dim]
    if not rows:
        return Subspace.zero(ambient_dim)
    return Subspace.span(np.vstack(rows), ambient_dim, p)


class QuotientSpace:
    """V/W with canonical representatives.

    Representatives are the RREF basis of the normal forms of V modulo W,
    so they avoid W's pivot columns and are reproducible.
    """

    def __init__(self, space: Subspace, sub: Subspace, p: int | None = None):
        _check_ambient(space, sub)
        self.space = space
        self.sub = sub
        self.p = _p(p)
        reps = Subspace.span(self.reduce(space.basis), space.ambient_dim, self.p)
        self.reps = reps.basis
        self.pivots = reps.pivots

    @property
    def dim(self) -> int:
        return len(self.pivots)

    @property
    def ambient_dim(self) -> int:
        return self.space.ambient_dim

    def reduce(self, vectors) -> np.ndarray:
        v = asmat(vectors, self.p, cols=self.space.ambient_dim)
        if self.sub.dim == 0 or v.shape[0] == 0:
            return v
        return np.mod(v - matmul(v[:, list(self.sub.pivots)], self.sub.basis, self.p), self.p)

    def coords(self, vectors, check: bool = False) -> np.ndarray:
        """Coordinates of vectors of V modulo W in the representative basis."""
        r = self.reduce(vectors)
        c = r[:, list(self.pivots)]
        if check and not np.array_equal(matmul(c, self.reps, self.p), r):
            raise ValueError("vector does not lie in the ambient subspace")
        return c

    def lift(self, coords) -> np.ndarray:
        return matmul(asmat(coords, self.p, cols=self.dim), self.reps, self.p)

    def image_of(self, sub: Subspace) -> Subspace:
        """Image of a subspace of V in quotient coordinates."""
        return Subspace.span(self.coords(sub.basis), self.dim, self.p)
