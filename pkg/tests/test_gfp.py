import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import fraction_rank, modp_rank_naive
from splitsecant import gfp
from splitsecant.gfp import DEFAULT_PRIME, FieldMatrix, PrimeField, RankBuilder, rank, rref

P = DEFAULT_PRIME


def test_field_ops_examples():
    assert gfp.add(5, P - 3) == 2
    assert gfp.inv(1) == 1
    assert gfp.inv(2, P) == 16002
    assert gfp.mul(16002, 2, P) == 1
    assert gfp.sub(0, 1, P) == P - 1


def test_inverse_of_zero_is_a_domain_error():
    with pytest.raises(ZeroDivisionError):
        gfp.inv(0)
    with pytest.raises(ZeroDivisionError):
        PrimeField(7).inv(14)


@given(st.integers(1, P - 1))
def test_inverse_property(a):
    f = PrimeField(P)
    assert f.mul(a, f.inv(a)) == 1


@pytest.mark.parametrize("bad", [1, 2, 4, 32001, 2**31 + 11])
def test_prime_validation(bad):
    with pytest.raises(ValueError):
        gfp.check_prime(bad)


def test_rank_examples():
    assert rank(np.eye(3, dtype=int)) == 3
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank(np.zeros((0, 5))) == 0
    assert rank(np.zeros((4, 5))) == 0
    assert rank(FieldMatrix([[1, 2], [2, 4]], 5)) == 1


def test_rank_respects_characteristic():
    # det = 5, singular exactly in characteristic 5
    m = [[1, 2], [3, 11]]
    assert rank(m, 7) == 2
    assert rank(m, 5) == 1


def test_builder_examples():
    b = RankBuilder(3)
    e1, e2 = [1, 0, 0], [0, 1, 0]
    assert b.absorb(e1) and b.current_rank() == 1
    assert not b.absorb(e1) and b.current_rank() == 1
    assert b.absorb(e2) and b.current_rank() == 2


def test_builder_rejects_wrong_length():
    with pytest.raises(ValueError):
        RankBuilder(3).absorb([1, 2])


def test_builder_matches_batch_on_invertible_matrix():
    rng = np.random.default_rng(0)
    m = rng.integers(0, P, size=(50, 50))
    b = RankBuilder(50)
    for row in m:
        b.absorb(row)
    assert b.current_rank() == 50 == rank(m)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 60), st.integers(1, 60), st.integers(0, 60), st.integers(0, 2**32 - 1))
def test_rank_of_transpose(r, c, k, seed):
    rng = np.random.default_rng(seed)
    k = min(k, r, c)
    m = rng.integers(0, P, size=(r, k)) @ rng.integers(0, P, size=(k, c)) % P
    assert rank(m) == rank(m.T)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 30), st.integers(1, 30), st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_rank_of_product_is_bounded(a, b, c, seed):
    rng = np.random.default_rng(seed)
    x = FieldMatrix(rng.integers(0, 3, size=(a, b)))
    y = FieldMatrix(rng.integers(0, 3, size=(b, c)))
    assert rank(x @ y) <= min(rank(x), rank(y))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-10, 10), min_size=8, max_size=8), min_size=1, max_size=8))
def test_mod_p_rank_is_a_lower_bound_for_rational_rank(rows):
    assert fraction_rank(rows) >= rank(rows, P)
    assert fraction_rank(rows) >= rank(rows, 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 70), st.integers(1, 70), st.sampled_from([3, 7, 32003]), st.integers(0, 2**32 - 1))
def test_blocked_rref_matches_naive_elimination(r, c, p, seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(0, min(r, c) + 1))
    m = rng.integers(0, p, size=(r, k)) @ rng.integers(0, p, size=(k, c)) % p
    rows, piv = rref(gfp.as_residues(m, p), p)
    assert len(piv) == modp_rank_naive(m.tolist(), p)
    # reduced: each pivot column is a unit vector within the returned rows
    for q, col in enumerate(piv):
        colvals = rows[:, col]
        assert colvals[q] == 1 and np.count_nonzero(colvals) == 1


def test_incremental_and_batch_agree_blockwise():
    rng = np.random.default_rng(7)
    m = rng.integers(0, P, size=(90, 20)) @ rng.integers(0, P, size=(20, 120)) % P
    b = RankBuilder(120)
    for start in range(0, 90, 13):
        b.absorb_rows(m[start:start + 13])
    assert b.rank == rank(m) == 20
    assert rank(b.basis()) == 20


def test_large_prime_uses_exact_products():
    p = 2147483629  # largest prime below 2^31
    rng = np.random.default_rng(3)
    a = rng.integers(0, p, size=(6, 400))
    b = rng.integers(0, p, size=(400, 5))
    got = gfp.matmul_mod(a.astype(float), b.astype(float), p).astype(np.int64)
    want = np.array([[sum(int(x) * int(y) for x, y in zip(row, col)) % p for col in b.T] for row in a])
    assert (got == want).all()
    m = rng.integers(0, p, size=(30, 8)) @ np.eye(8, 40, dtype=np.int64)
    assert rank(m, p) == modp_rank_naive(m.tolist(), p)


def test_field_matrix_is_immutable_and_reduced():
    m = FieldMatrix([[P + 1, -1]])
    assert m.tolist() == [[1, P - 1]]
    with pytest.raises(ValueError):
        m.entries[0, 0] = 3


def test_column_projection_keeps_low_rank(rng):
    p = 32003
    left = rng.integers(0, p, (40, 12))
    right = rng.integers(0, p, (12, 5000))
    a = gfp.matmul_mod(left.astype(float), right.astype(float), p)
    proj = gfp.ColumnProjection(5000, 20, p, seed=3, chunk=700)
    small = proj.apply(a)
    assert small.shape == (40, 20)
    assert rank(small, p) == rank(a, p) == 12
    assert np.array_equal(proj.apply(a[:7]), small[:7])


def test_column_projection_never_raises_rank(rng):
    p = 101
    for _ in range(20):
        a = rng.integers(0, p, (6, 30)) * (rng.random((6, 1)) < 0.5)
        small = gfp.ColumnProjection(30, 3, p, seed=int(rng.integers(1000))).apply(a.astype(float))
        assert rank(small, p) <= min(rank(a, p), 3)
