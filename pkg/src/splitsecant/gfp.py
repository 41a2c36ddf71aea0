"""Dense linear algebra over a prime field GF(p).

Residues are stored in float64 arrays so that the heavy products go through
BLAS.  A float64 matmul is exact as long as every partial sum stays below
2**53; for the default prime 32003 that allows inner dimensions of several
million.  Larger primes fall back to a limb-split product that keeps each
partial sum in range.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

DEFAULT_PRIME = 32003

_EXACT = 2**53
_LIMB = 65536
_BASE_ROWS = 16


def is_prime(p: int) -> bool:
    """Deterministic trial division; fine for p < 2**31."""
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> int:
    """Validate a field characteristic and return it as a plain int."""
    p = int(p)
    if not 2 < p < 2**31:
        raise ValueError(f"prime must satisfy 2 < p < 2^31, got {p}")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return p


@dataclass(frozen=True)
class PrimeField:
    """Scalar arithmetic in GF(p)."""

    p: int = DEFAULT_PRIME

    def __post_init__(self) -> None:
        check_prime(self.p)

    def reduce(self, a: int) -> int:
        return int(a) % self.p

    def add(self, a: int, b: int) -> int:
        return (int(a) + int(b)) % self.p

    def sub(self, a: int, b: int) -> int:
        return (int(a) - int(b)) % self.p

    def neg(self, a: int) -> int:
        return (-int(a)) % self.p

    def mul(self, a: int, b: int) -> int:
        return (int(a) * int(b)) % self.p

    def inv(self, a: int) -> int:
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(p)")
        return pow(a, -1, self.p)


def add(a: int, b: int, p: int = DEFAULT_PRIME) -> int:
    return (int(a) + int(b)) % p


def sub(a: int, b: int, p: int = DEFAULT_PRIME) -> int:
    return (int(a) - int(b)) % p


def mul(a: int, b: int, p: int = DEFAULT_PRIME) -> int:
    return (int(a) * int(b)) % p


def inv(a: int, p: int = DEFAULT_PRIME) -> int:
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError("zero has no inverse in GF(p)")
    return pow(a, -1, p)


def as_residues(entries, p: int) -> np.ndarray:
    """Reduce an integer array-like mod p into a 2-D float64 array."""
    a = np.asarray(entries)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
    if a.ndim != 2:
        raise ValueError("expected a 2-D array of residues")
    if a.dtype.kind == "f":
        a = a.astype(np.int64)
    elif a.dtype.kind == "O":
        a = np.vectorize(lambda x: int(x) % p, otypes=[np.int64])(a)
    return np.mod(a.astype(np.int64), p).astype(np.float64)


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """a @ b mod p for float64 arrays of residues, exactly."""
    k = a.shape[1]
    if k == 0:
        return np.zeros((a.shape[0], b.shape[1]))
    if (p - 1) ** 2 * k < _EXACT:
        return np.mod(a @ b, p)
    # split b into 16-bit limbs so each partial product fits the mantissa
    lo = np.mod(b, _LIMB)
    hi = (b - lo) / _LIMB
    chunk = max(1, (_EXACT - 1) // ((p - 1) * (_LIMB - 1)))
    out = np.zeros((a.shape[0], b.shape[1]))
    for start in range(0, k, chunk):
        ac = a[:, start:start + chunk]
        t_lo = np.mod(ac @ lo[start:start + chunk], p)
        t_hi = np.mod(ac @ hi[start:start + chunk], p)
        out = np.mod(out + t_lo + np.mod(t_hi * _LIMB, p), p)
    return out


def _scale(row: np.ndarray, c: int, p: int) -> np.ndarray:
    if (p - 1) ** 2 < _EXACT:
        return np.mod(row * c, p)
    return np.mod(row.astype(np.int64) * c, p).astype(np.float64)


def _sub_outer(block: np.ndarray, col: np.ndarray, row: np.ndarray, p: int) -> np.ndarray:
    """(block - outer(col, row)) mod p."""
    if (p - 1) ** 2 < _EXACT:
        return np.mod(block - np.outer(col, row), p)
    prod = np.mod(np.outer(col.astype(np.int64), row.astype(np.int64)), p)
    return np.mod(block.astype(np.int64) - prod, p).astype(np.float64)


def _rref_small(x: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    x = x.copy()
    pivots: list[int] = []
    rows: list[int] = []
    for q in range(x.shape[0]):
        nz = np.flatnonzero(x[q])
        if nz.size == 0:
            continue
        col = int(nz[0])
        x[q] = _scale(x[q], pow(int(x[q, col]), -1, p), p)
        others = np.flatnonzero(x[:, col])
        others = others[others != q]
        if others.size:
            x[others] = _sub_outer(x[others], x[others, col], x[q], p)
        pivots.append(col)
        rows.append(q)
    return x[rows], pivots


def rref(x: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a float64 residue matrix.

    Returns the nonzero rows and their pivot columns.  Pivot rows are not
    sorted by pivot column; each pivot column is zero in every other row.
    Large inputs are split in half recursively so that the work is done by
    matrix products.
    """
    if x.shape[0] <= _BASE_ROWS:
        return _rref_small(x, p)
    half = x.shape[0] // 2
    top, ptop = rref(x[:half], p)
    bottom = x[half:]
    if ptop:
        bottom = np.mod(bottom - matmul_mod(bottom[:, ptop], top, p), p)
    low, plow = rref(bottom, p)
    if plow and ptop:
        top = np.mod(top - matmul_mod(top[:, plow], low, p), p)
    if not ptop:
        return low, plow
    if not plow:
        return top, ptop
    return np.vstack([top, low]), ptop + plow


@dataclass(frozen=True)
class FieldMatrix:
    """Immutable dense matrix over GF(p)."""

    entries: np.ndarray
    p: int = DEFAULT_PRIME

    def __post_init__(self) -> None:
        check_prime(self.p)
        a = as_residues(self.entries, self.p)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int = DEFAULT_PRIME) -> "FieldMatrix":
        return cls(np.zeros((rows, cols)), p)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix(self.entries.T, self.p)

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.p != other.p:
            raise ValueError("matrices live over different fields")
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        return FieldMatrix(matmul_mod(self.entries, other.entries, self.p), self.p)

    def tolist(self) -> list[list[int]]:
        return self.entries.astype(np.int64).tolist()


def rank(m, p: int | None = None) -> int:
    """Rank of a FieldMatrix, or of an integer array reduced mod p."""
    if isinstance(m, FieldMatrix):
        a, p = m.entries, m.p
    else:
        p = check_prime(DEFAULT_PRIME if p is None else p)
        a = as_residues(m, p)
    if a.size == 0:
        return 0
    _, pivots = rref(a, p)
    return len(pivots)


@dataclass
class RankBuilder:
    """Incremental row echelon basis over GF(p).

    Rows are reduced against the basis and new pivot rows are appended.  The
    basis is kept fully reduced, so reducing a block of k rows costs a single
    (k x r) @ (r x cols) product.
    """

    cols: int
    p: int = DEFAULT_PRIME
    _basis: np.ndarray = field(init=False, repr=False)
    _pivots: list[int] = field(init=False, repr=False, default_factory=list)

    def __post_init__(self) -> None:
        check_prime(self.p)
        self._basis = np.zeros((0, self.cols))

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def current_rank(self) -> int:
        return len(self._pivots)

    @property
    def pivots(self) -> list[int]:
        return list(self._pivots)

    def basis(self) -> np.ndarray:
        return self._basis[: self.rank].copy()

    def absorb(self, row) -> bool:
        """Absorb one row; return True if it was independent of the basis."""
        r = np.asarray(row)
        if r.ndim != 1 or r.shape[0] != self.cols:
            raise ValueError(f"row must have exactly {self.cols} entries")
        return self.absorb_rows(r.reshape(1, -1)) > 0

    def absorb_rows(self, rows) -> int:
        """Absorb a block of rows; return how many new pivots appeared."""
        x = np.asarray(rows)
        if x.ndim != 2 or x.shape[1] != self.cols:
            raise ValueError(f"rows must have exactly {self.cols} columns")
        if x.shape[0] == 0 or self.rank == self.cols:
            return 0
        if x.dtype != np.float64 or x.min(initial=0) < 0 or x.max(initial=0) >= self.p:
            x = as_residues(x, self.p)
        r = self.rank
        if r:
            x = np.mod(x - matmul_mod(x[:, self._pivots], self._basis[:r], self.p), self.p)
        new, piv = rref(x, self.p)
        if not piv:
            return 0
        if r:
            basis = self._basis[:r]
            basis -= matmul_mod(basis[:, piv], new, self.p)
            np.mod(basis, self.p, out=basis)
        self._append(new)
        self._pivots.extend(piv)
        return len(piv)

    def _append(self, new: np.ndarray) -> None:
        r = self.rank
        need = r + new.shape[0]
        if need > self._basis.shape[0]:
            cap = min(self.cols, max(need, 2 * self._basis.shape[0], 64))
            grown = np.zeros((cap, self.cols))
            grown[:r] = self._basis[:r]
            self._basis = grown
        self._basis[r:need] = new


class ColumnProjection:
    """Right multiplication by a random cols x width matrix over GF(p).

    rank(A @ R) <= rank(A) for every R, so a rank reached after projecting is
    a valid lower bound; when rank(A) <= width it is preserved except with
    probability about 1/p.  R is regenerated chunk by chunk from its seed
    instead of being stored, since cols x width can run to hundreds of MB.
    """

    def __init__(self, cols: int, width: int, p: int, seed: int, chunk: int = 2048) -> None:
        self.cols, self.width, self.p, self.seed = cols, width, p, seed
        self.chunk = chunk

    def _piece(self, j: int) -> np.ndarray:
        start = j * self.chunk
        rows = min(self.chunk, self.cols - start)
        return np.random.default_rng([self.seed, j]).integers(0, self.p, (rows, self.width)).astype(np.float64)

    def apply(self, block: np.ndarray) -> np.ndarray:
        out = np.zeros((block.shape[0], self.width))
        for j, start in enumerate(range(0, self.cols, self.chunk)):
            out += matmul_mod(block[:, start:start + self.chunk], self._piece(j), self.p)
        return np.mod(out, self.p)


def rank_of_rows(blocks: Iterable[np.ndarray], cols: int, p: int = DEFAULT_PRIME,
                 stop_at: int | None = None) -> int:
    """Rank of the rows produced by an iterable of blocks, with optional early stop."""
    builder = RankBuilder(cols, p)
    for block in blocks:
        builder.absorb_rows(block)
        if stop_at is not None and builder.rank >= stop_at:
            break
    return builder.rank
