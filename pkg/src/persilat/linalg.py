"""Exact linear algebra over a prime field F_p.

Matrices are dense numpy int64 arrays with entries in [0, p).  Everything
here is a pure function of its inputs; bases are canonicalised through
reduced echelon forms so that equal subspaces compare equal as matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, NoSolution, PrimeMismatch, SchemaError


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True, eq=False)
class PrimeFieldMatrix:
    """Immutable dense matrix over F_p."""

    data: np.ndarray
    prime: int = 2

    def __post_init__(self):
        if not is_prime(self.prime):
            raise PrimeMismatch(f"{self.prime} is not a prime")
        arr = np.array(self.data, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            raise SchemaError(f"matrix must be two-dimensional, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= self.prime):
            raise SchemaError(f"entries must lie in [0, {self.prime})")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], prime: int = 2,
                  shape: tuple[int, int] | None = None) -> "PrimeFieldMatrix":
        """Build from row-major nested lists; ``shape`` disambiguates empty input."""
        if shape is not None:
            arr = np.array(rows, dtype=np.int64).reshape(shape)
        elif len(rows) == 0:
            arr = np.zeros((0, 0), dtype=np.int64)
        else:
            arr = np.array(rows, dtype=np.int64)
        return cls(arr, prime)

    @classmethod
    def reduce(cls, arr, prime: int = 2) -> "PrimeFieldMatrix":
        """Build from arbitrary integers, reducing mod ``prime``."""
        return cls(np.mod(np.asarray(arr, dtype=np.int64), prime), prime)

    @classmethod
    def zeros(cls, rows: int, cols: int, prime: int = 2) -> "PrimeFieldMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), prime)

    @classmethod
    def identity(cls, n: int, prime: int = 2) -> "PrimeFieldMatrix":
        return cls(np.eye(n, dtype=np.int64), prime)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def entries(self) -> list[int]:
        return [int(x) for x in self.data.ravel()]

    def tolist(self) -> list[list[int]]:
        return self.data.tolist()

    def _check_prime(self, other: "PrimeFieldMatrix"):
        if other.prime != self.prime:
            raise PrimeMismatch(f"F_{self.prime} vs F_{other.prime}")

    def __matmul__(self, other: "PrimeFieldMatrix") -> "PrimeFieldMatrix":
        self._check_prime(other)
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot compose {self.shape} with {other.shape}")
        return PrimeFieldMatrix((self.data @ other.data) % self.prime, self.prime)

    def __add__(self, other: "PrimeFieldMatrix") -> "PrimeFieldMatrix":
        self._check_prime(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        return PrimeFieldMatrix((self.data + other.data) % self.prime, self.prime)

    def __neg__(self) -> "PrimeFieldMatrix":
        return PrimeFieldMatrix((-self.data) % self.prime, self.prime)

    def __sub__(self, other: "PrimeFieldMatrix") -> "PrimeFieldMatrix":
        return self + (-other)

    @property
    def T(self) -> "PrimeFieldMatrix":
        return PrimeFieldMatrix(self.data.T, self.prime)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PrimeFieldMatrix):
            return NotImplemented
        return (self.prime == other.prime and self.shape == other.shape
                and bool(np.array_equal(self.data, other.data)))

    def __hash__(self):
        return hash((self.prime, self.shape, self.data.tobytes()))

    def __repr__(self):
        return f"PrimeFieldMatrix({self.tolist()}, prime={self.prime}, shape={self.shape})"

    def is_zero(self) -> bool:
        return not self.data.any()

    def column(self, j: int) -> np.ndarray:
        return self.data[:, j].copy()


def rref(m: PrimeFieldMatrix) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p and the list of pivot columns."""
    p = m.prime
    a = m.data.copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        factors = a[:, c].copy()
        factors[r] = 0
        a = (a - np.outer(factors, a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: PrimeFieldMatrix) -> int:
    return len(rref(m)[1])


def _canonical_columns(vectors: np.ndarray, prime: int) -> PrimeFieldMatrix:
    # column-reduced echelon form of the span of the given columns
    n = vectors.shape[0]
    if vectors.shape[1] == 0:
        return PrimeFieldMatrix.zeros(n, 0, prime)
    r, piv = rref(PrimeFieldMatrix(vectors.T % prime, prime))
    return PrimeFieldMatrix(r[: len(piv)].T, prime)


def canonical_basis(m: PrimeFieldMatrix) -> PrimeFieldMatrix:
    """Canonical basis (column echelon form) of the column space of ``m``."""
    return _canonical_columns(m.data, m.prime)


def kernel_basis(m: PrimeFieldMatrix) -> PrimeFieldMatrix:
    """Columns spanning {v : m v = 0}."""
    p = m.prime
    r, piv = rref(m)
    free = [c for c in range(m.cols) if c not in set(piv)]
    basis = np.zeros((m.cols, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, pc in enumerate(piv):
            basis[pc, k] = (-r[i, f]) % p
    return _canonical_columns(basis, p)


def image_basis(m: PrimeFieldMatrix) -> PrimeFieldMatrix:
    """Columns spanning the column space of ``m``; column count equals the rank."""
    return canonical_basis(m)


def solve_preimage(m: PrimeFieldMatrix, b) -> np.ndarray:
    """Some ``v`` with ``m v = b``; raises :class:`NoSolution` if b is not in the image."""
    p = m.prime
    b = np.mod(np.asarray(b, dtype=np.int64).reshape(-1), p)
    if b.shape[0] != m.rows:
        raise DimensionMismatch(f"right-hand side has length {b.shape[0]}, expected {m.rows}")
    aug = PrimeFieldMatrix(np.hstack([m.data, b[:, None]]), p)
    r, piv = rref(aug)
    if m.cols in piv:
        raise NoSolution("vector is not in the image")
    v = np.zeros(m.cols, dtype=np.int64)
    for i, pc in enumerate(piv):
        v[pc] = r[i, m.cols]
    if not np.array_equal((m.data @ v) % p, b):
        raise AssertionError("back-substitution check failed")
    return v


def solve_matrix(m: PrimeFieldMatrix, rhs: PrimeFieldMatrix) -> PrimeFieldMatrix:
    """Column-by-column preimage: some ``X`` with ``m X = rhs``."""
    cols = [solve_preimage(m, rhs.data[:, j]) for j in range(rhs.cols)]
    out = np.stack(cols, axis=1) if cols else np.zeros((m.cols, 0), dtype=np.int64)
    return PrimeFieldMatrix(out, m.prime)


def hstack(ms: Sequence[PrimeFieldMatrix]) -> PrimeFieldMatrix:
    _same_prime(ms)
    return PrimeFieldMatrix(np.hstack([m.data for m in ms]), ms[0].prime)


def vstack(ms: Sequence[PrimeFieldMatrix]) -> PrimeFieldMatrix:
    _same_prime(ms)
    return PrimeFieldMatrix(np.vstack([m.data for m in ms]), ms[0].prime)


def _same_prime(ms: Sequence[PrimeFieldMatrix]) -> int:
    primes = {m.prime for m in ms}
    if len(primes) > 1:
        raise PrimeMismatch(f"mixed primes {sorted(primes)}")
    return primes.pop() if primes else 2


def direct_sum(ms: Iterable[PrimeFieldMatrix], prime: int | None = None) -> PrimeFieldMatrix:
    """Block-diagonal matrix of the given blocks."""
    ms = list(ms)
    p = _same_prime(ms) if ms else (prime or 2)
    rows = sum(m.rows for m in ms)
    cols = sum(m.cols for m in ms)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for m in ms:
        out[r:r + m.rows, c:c + m.cols] = m.data
        r += m.rows
        c += m.cols
    return PrimeFieldMatrix(out, p)


@dataclass(frozen=True)
class SubspaceRealization:
    """A subspace of a direct sum, given by a basis, with its projection maps."""

    ambient_dim: int
    basis: PrimeFieldMatrix
    projections: tuple[tuple[str, PrimeFieldMatrix], ...] = field(default=())

    @property
    def dim(self) -> int:
        return self.basis.cols

    def projection(self, name: str) -> PrimeFieldMatrix:
        return dict(self.projections)[name]


@dataclass(frozen=True)
class QuotientRealization:
    """A quotient of a direct sum, given by its kernel and quotient map."""

    ambient_dim: int
    kernel_basis: PrimeFieldMatrix
    quotient_map: PrimeFieldMatrix
    injections: tuple[tuple[str, PrimeFieldMatrix], ...] = field(default=())

    @property
    def dim(self) -> int:
        return self.quotient_map.rows

    def injection(self, name: str) -> PrimeFieldMatrix:
        return dict(self.injections)[name]


def left_kernel_rows(m: PrimeFieldMatrix) -> PrimeFieldMatrix:
    """Rows spanning {y : y m = 0}, in canonical (row echelon) form."""
    return kernel_basis(m.T).T


def subspace_from_constraints(constraints: PrimeFieldMatrix, splits: Sequence[tuple[str, int]]
                              ) -> SubspaceRealization:
    """Kernel of ``constraints`` inside a direct sum split into named blocks."""
    k = kernel_basis(constraints)
    projections = []
    start = 0
    for name, dim in splits:
        projections.append((name, PrimeFieldMatrix(k.data[start:start + dim], k.prime)))
        start += dim
    return SubspaceRealization(constraints.cols, k, tuple(projections))


def quotient_from_relations(relations: PrimeFieldMatrix, splits: Sequence[tuple[str, int]]
                            ) -> QuotientRealization:
    """Quotient of a direct sum by the column span of ``relations``."""
    q = left_kernel_rows(relations)
    injections = []
    start = 0
    for name, dim in splits:
        injections.append((name, PrimeFieldMatrix(q.data[:, start:start + dim], q.prime)))
        start += dim
    return QuotientRealization(relations.rows, image_basis(relations), q, tuple(injections))


def pullback(f: PrimeFieldMatrix, g: PrimeFieldMatrix,
             names: tuple[str, str] = ("A", "B")) -> SubspaceRealization:
    """{(a, b) in A+B : f(a) = g(b)} for a cospan ``f: A -> C <- B: g``."""
    if f.prime != g.prime:
        raise PrimeMismatch(f"F_{f.prime} vs F_{g.prime}")
    if f.rows != g.rows:
        raise DimensionMismatch(f"codomains differ: {f.rows} vs {g.rows}")
    return subspace_from_constraints(hstack([f, -g]), [(names[0], f.cols), (names[1], g.cols)])


def pushout(f: PrimeFieldMatrix, g: PrimeFieldMatrix,
            names: tuple[str, str] = ("A", "B")) -> QuotientRealization:
    """(A+B) / {(f c, -g c)} for a span ``f: A <- C -> B: g``."""
    if f.prime != g.prime:
        raise PrimeMismatch(f"F_{f.prime} vs F_{g.prime}")
    if f.cols != g.cols:
        raise DimensionMismatch(f"domains differ: {f.cols} vs {g.cols}")
    return quotient_from_relations(vstack([f, -g]), [(names[0], f.rows), (names[1], g.rows)])
