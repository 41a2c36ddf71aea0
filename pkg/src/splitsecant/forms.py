"""Homogeneous polynomials over GF(p) as coefficient vectors.

A degree-d form in n+1 variables is a vector indexed by the monomials of a
``MonomialBasis``, ordered graded-reverse-lexicographically.  The batch
helpers (``products``, ``pi_all``, ``times_variables`` ...) work on stacks of
forms at once and are what the statement builders use; ``HomPoly`` and
``LinearForm`` are thin single-object wrappers around the same arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

from .gfp import DEFAULT_PRIME, rank as _rank


def _compositions(total: int, parts: int) -> np.ndarray:
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    rows = []
    for first in range(total, -1, -1):
        rest = _compositions(total - first, parts - 1)
        rows.append(np.hstack([np.full((rest.shape[0], 1), first, dtype=np.int64), rest]))
    return np.vstack(rows)


@dataclass(frozen=True, eq=False)
class MonomialBasis:
    """All degree-d monomials in x_0..x_n in grevlex order (largest first)."""

    n: int
    d: int
    monomials: np.ndarray
    _perm: np.ndarray
    _binom: np.ndarray

    @property
    def size(self) -> int:
        return self.monomials.shape[0]

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"MonomialBasis(n={self.n}, d={self.d}, size={self.size})"

    def indices(self, exps: np.ndarray) -> np.ndarray:
        """Vectorized exponent-vector -> column index lookup."""
        exps = np.asarray(exps, dtype=np.int64)
        if exps.shape[-1] != self.n + 1:
            raise ValueError("exponent vectors have the wrong length")
        if self.n == 0:
            return np.zeros(exps.shape[:-1], dtype=np.int64)
        # bar positions of the stars-and-bars picture, ranked in the
        # combinatorial number system, then mapped to grevlex position
        bars = np.cumsum(exps[..., :-1], axis=-1) + np.arange(self.n)
        ranks = np.zeros(exps.shape[:-1], dtype=np.int64)
        for v in range(self.n):
            ranks += self._binom[bars[..., v], v + 1]
        return self._perm[ranks]

    def index(self, exps: Sequence[int]) -> int:
        e = tuple(int(x) for x in exps)
        if len(e) != self.n + 1 or min(e) < 0 or sum(e) != self.d:
            raise KeyError(e)
        return int(self.indices(np.array(e)))

    def label(self, i: int) -> str:
        parts = []
        for v, e in enumerate(self.monomials[i]):
            if e == 1:
                parts.append(f"x{v}")
            elif e > 1:
                parts.append(f"x{v}^{e}")
        return "*".join(parts) or "1"


@lru_cache(maxsize=None)
def monomial_basis(n: int, d: int) -> MonomialBasis:
    if n < 0 or d < 0:
        raise ValueError("n and d must be nonnegative")
    mons = _compositions(d, n + 1)
    # descending grevlex == ascending lex order of the reversed exponent vector
    order = np.lexsort(mons.T)
    mons = mons[order]
    mons.setflags(write=False)
    top = d + n
    binom = np.array([[comb(a, b) for b in range(n + 1)] for a in range(top + 1)], dtype=np.int64)
    size = mons.shape[0]
    perm = np.empty(size, dtype=np.int64)
    basis = MonomialBasis(n, d, mons, perm, binom)
    if n == 0:
        perm[:] = 0
    else:
        bars = np.cumsum(mons[:, :-1], axis=1) + np.arange(n)
        ranks = np.zeros(size, dtype=np.int64)
        for v in range(n):
            ranks += binom[bars[:, v], v + 1]
        perm[ranks] = np.arange(size)
    return basis


@lru_cache(maxsize=None)
def _shifts(n: int, d: int) -> np.ndarray:
    """Row v: index in degree d+1 of (monomial * x_v) for each degree-d monomial."""
    src = monomial_basis(n, d).monomials
    dst = monomial_basis(n, d + 1)
    out = np.empty((n + 1, src.shape[0]), dtype=np.int64)
    for v in range(n + 1):
        e = src.copy()
        e[:, v] += 1
        out[v] = dst.indices(e)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def _mult_table(n: int, a: int, b: int) -> np.ndarray:
    """table[i, j] = index in degree a+b of monomial_i(a) * monomial_j(b)."""
    ea = monomial_basis(n, a).monomials
    eb = monomial_basis(n, b).monomials
    table = monomial_basis(n, a + b).indices(ea[:, None, :] + eb[None, :, :])
    table.setflags(write=False)
    return table


# batch arithmetic on int64 residue arrays ---------------------------------


def mul_linear_batch(polys: np.ndarray, forms: np.ndarray, n: int, deg: int,
                     p: int = DEFAULT_PRIME) -> np.ndarray:
    """Row-wise product of degree-deg forms with linear forms."""
    up = _shifts(n, deg)
    out = np.zeros((polys.shape[0], comb(n + deg + 1, n)), dtype=np.int64)
    for v in range(n + 1):
        out[:, up[v]] += polys * forms[:, v:v + 1]
    return np.mod(out, p)


def products(tuples: np.ndarray, p: int = DEFAULT_PRIME) -> np.ndarray:
    """Products of stacks of linear forms.

    Args:
        tuples: array of shape (T, k, n+1).

    Returns:
        Array of shape (T, C(n+k, k)), one coefficient vector per tuple.
    """
    t = np.asarray(tuples, dtype=np.int64)
    count, k, n1 = t.shape
    out = np.ones((count, 1), dtype=np.int64)
    for q in range(k):
        out = mul_linear_batch(out, t[:, q, :], n1 - 1, q, p)
    return out


def pi_all(tuples: np.ndarray, p: int = DEFAULT_PRIME) -> np.ndarray:
    """All leave-one-out products of each tuple.

    Returns an array of shape (T, k, C(n+k-1, k-1)) whose [:, m-1] slice is
    the product omitting the m-th factor.
    """
    t = np.asarray(tuples, dtype=np.int64)
    count, k, n1 = t.shape
    if k == 0:
        raise ValueError("leave-one-out products need a nonempty tuple")
    out = np.ones((count * k, 1), dtype=np.int64)
    for step in range(1, k):
        idx = (np.arange(k) + step) % k
        out = mul_linear_batch(out, t[:, idx, :].reshape(count * k, n1), n1 - 1, step - 1, p)
    return out.reshape(count, k, -1)


def times_variables(polys: np.ndarray, n: int, deg: int) -> np.ndarray:
    """Each degree-deg row multiplied by x_0, ..., x_n; shape (T*(n+1), next size)."""
    up = _shifts(n, deg)
    out = np.zeros((polys.shape[0], n + 1, comb(n + deg + 1, n)), dtype=np.int64)
    for v in range(n + 1):
        out[:, v, up[v]] = polys
    return out.reshape(-1, out.shape[2])


def times_basis(poly: np.ndarray, n: int, a: int, degree: int) -> np.ndarray:
    """A degree-a form times every monomial of the given degree, one row each."""
    poly = np.asarray(poly, dtype=np.int64)
    table = _mult_table(n, a, degree)
    rows = table.shape[1]
    out = np.zeros((rows, comb(n + a + degree, n)), dtype=np.int64)
    out[np.arange(rows)[None, :], table] = poly[:, None]
    return out


def random_forms(rng: np.random.Generator, count: int, n: int, p: int = DEFAULT_PRIME,
                 subspace: np.ndarray | None = None) -> np.ndarray:
    """Uniform random nonzero linear forms, optionally inside a subspace.

    Args:
        subspace: (b, n+1) array of independent linear forms spanning the
            subspace; None means all of R_1.

    Returns:
        (count, n+1) int64 array.
    """
    if subspace is None:
        dim = n + 1
    else:
        subspace = np.asarray(subspace, dtype=np.int64)
        dim = subspace.shape[0]
        if dim == 0 and count > 0:
            raise ValueError("cannot draw nonzero forms from the zero subspace")
    coeffs = rng.integers(0, p, size=(count, dim), dtype=np.int64)
    while True:
        zero = ~coeffs.any(axis=1)
        if not zero.any():
            break
        coeffs[zero] = rng.integers(0, p, size=(int(zero.sum()), dim), dtype=np.int64)
    if subspace is None:
        return coeffs
    out = np.zeros((count, n + 1), dtype=np.int64)
    for b in range(dim):
        out = np.mod(out + coeffs[:, b:b + 1] * subspace[b], p)
    return out


# object API ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LinearForm:
    coeffs: np.ndarray
    p: int = DEFAULT_PRIME

    def __post_init__(self) -> None:
        c = np.mod(np.asarray(self.coeffs, dtype=np.int64), self.p)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return self.coeffs.shape[0] - 1

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LinearForm) and self.p == other.p and np.array_equal(self.coeffs, other.coeffs)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(self.coeffs + other.coeffs, self.p)


FormTuple = tuple  # tuple[LinearForm, ...]


@dataclass(frozen=True, eq=False)
class HomPoly:
    n: int
    d: int
    coeffs: np.ndarray
    p: int = DEFAULT_PRIME

    def __post_init__(self) -> None:
        c = np.mod(np.asarray(self.coeffs, dtype=np.int64), self.p)
        if c.shape != (comb(self.n + self.d, self.d),):
            raise ValueError("coefficient vector does not match the basis size")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def basis(self) -> MonomialBasis:
        return monomial_basis(self.n, self.d)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, HomPoly) and (self.n, self.d, self.p) == (other.n, other.d, other.p)
                and np.array_equal(self.coeffs, other.coeffs))

    def __add__(self, other: "HomPoly") -> "HomPoly":
        _same_space([self, other])
        return HomPoly(self.n, self.d, self.coeffs + other.coeffs, self.p)

    def scale(self, c: int) -> "HomPoly":
        return HomPoly(self.n, self.d, self.coeffs * (int(c) % self.p), self.p)

    def terms(self) -> dict[str, int]:
        b = self.basis
        return {b.label(i): int(c) for i, c in enumerate(self.coeffs) if c}


def generic_linear_forms(subspace_basis: Sequence[LinearForm], count: int,
                         rng: np.random.Generator) -> FormTuple:
    """Random nonzero combinations of the given independent linear forms."""
    if not subspace_basis:
        if count > 0:
            raise ValueError("cannot draw forms from an empty subspace")
        return ()
    p = subspace_basis[0].p
    n = subspace_basis[0].n
    sub = np.array([f.coeffs for f in subspace_basis], dtype=np.int64)
    rows = random_forms(rng, count, n, p, subspace=sub)
    return tuple(LinearForm(r, p) for r in rows)


def variables(n: int, p: int = DEFAULT_PRIME) -> FormTuple:
    return tuple(LinearForm(np.eye(n + 1, dtype=np.int64)[v], p) for v in range(n + 1))


def _check_tuple(t: Sequence[LinearForm]) -> tuple[int, int]:
    if not t:
        raise ValueError("empty tuple has no ambient space")
    ns = {f.n for f in t}
    ps = {f.p for f in t}
    if len(ns) != 1 or len(ps) != 1:
        raise ValueError("tuple members live in different spaces")
    return ns.pop(), ps.pop()


def product(t: Sequence[LinearForm], target_basis: MonomialBasis | None = None,
            n: int | None = None, p: int = DEFAULT_PRIME) -> HomPoly:
    """Product of the forms in t as a HomPoly of degree len(t)."""
    if t:
        n, p = _check_tuple(t)
    elif target_basis is not None:
        n = target_basis.n
    elif n is None:
        raise ValueError("empty product needs n or a target basis")
    if target_basis is not None and (target_basis.d != len(t) or target_basis.n != n):
        raise ValueError("target basis degree must equal the tuple length")
    if not t:
        return HomPoly(n, 0, np.ones(1, dtype=np.int64), p)
    stack = np.array([[f.coeffs for f in t]], dtype=np.int64)
    return HomPoly(n, len(t), products(stack, p)[0], p)


def rho(j: int, t: Sequence[LinearForm]) -> FormTuple:
    """The tuple with its j-th entry (1-indexed) removed."""
    if not 1 <= j <= len(t):
        raise IndexError(f"index {j} out of range for a tuple of length {len(t)}")
    return tuple(t[:j - 1]) + tuple(t[j:])


def pi(j: int, t: Sequence[LinearForm]) -> HomPoly:
    """Product of all entries of t except the j-th (1-indexed)."""
    rest = rho(j, t)
    n, p = _check_tuple(t)
    return product(rest, n=n, p=p)


def mul_linear(f: HomPoly, form: LinearForm) -> HomPoly:
    if f.n != form.n or f.p != form.p:
        raise ValueError("factor lives in a different space")
    out = mul_linear_batch(f.coeffs.reshape(1, -1), form.coeffs.reshape(1, -1), f.n, f.d, f.p)
    return HomPoly(f.n, f.d + 1, out[0], f.p)


def _same_space(gens: Sequence[HomPoly]) -> tuple[int, int, int]:
    keys = {(g.n, g.d, g.p) for g in gens}
    if len(keys) != 1:
        raise ValueError("generators live in different spaces")
    return keys.pop()


def span_dim(gens: Sequence[HomPoly]) -> int:
    """Dimension of the span of the given forms."""
    if not gens:
        return 0
    _, _, p = _same_space(gens)
    return _rank(np.array([g.coeffs for g in gens]), p)
