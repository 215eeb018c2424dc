from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbidouble import linalg as la
from orbidouble.errors import InconsistentSystemError, SingularMatrixError


def test_rref_identity_is_fixed():
    R, piv, rk = la.rref(la.identity(2), 3)
    assert np.array_equal(R, la.identity(2))
    assert piv == [0, 1] and rk == 2


def test_rref_dependent_rows():
    _, piv, rk = la.rref(np.array([[1, 2], [2, 4]]), 5)
    assert rk == 1 and piv == [0]


def test_rref_zero_matrix():
    assert la.rref(la.zeros(3, 3), 7)[2] == 0


def test_solve_identity_system():
    sol = la.solve_linear(la.identity(3), [1, 2, 0], 5)
    assert sol.particular.tolist() == [1, 2, 0]
    assert sol.kernel.shape[0] == 0


def test_solve_zero_system_has_full_kernel():
    sol = la.solve_linear(la.zeros(1, 2), [0], 3)
    assert sol.kernel.shape[0] == 2


def test_solve_one_equation_matches_enumeration():
    A = np.array([[1, 1]])
    sol = la.solve_linear(A, [1], 3)
    assert sol.kernel.shape[0] == 1
    # every one of the 3 affine points solves it, and those are all 3 solutions
    found = {tuple((sol.particular + t * sol.kernel[0]) % 3) for t in range(3)}
    brute = {(a, b) for a in range(3) for b in range(3) if (a + b) % 3 == 1}
    assert found == brute


def test_inconsistent_system_raises():
    with pytest.raises(InconsistentSystemError):
        la.solve_linear(np.array([[1, 0], [1, 0]]), [0, 1], 3)


def test_inverse_of_singular_raises():
    with pytest.raises(SingularMatrixError):
        la.inverse(np.array([[1, 2], [2, 4]]), 5)


matrices = st.tuples(st.sampled_from([3, 5, 7]), st.integers(1, 5), st.integers(1, 5),
                     st.integers(0, 2**31))


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rank_plus_nullity(args):
    p, r, c, seed = args
    A = la.random_matrix(np.random.default_rng(seed), r, c, p)
    K = la.nullspace(A, p)
    assert la.rank(A, p) + K.shape[0] == c
    assert not (A @ K.T % p).any()


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(1, 5), st.integers(0, 2**31))
def test_inverse_round_trip(p, n, seed):
    A = la.random_invertible(np.random.default_rng(seed), n, p)
    assert np.array_equal(la.matmul(A, la.inverse(A, p), p), la.identity(n))


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_column_basis_spans_and_selects(args):
    p, r, c, seed = args
    A = la.random_matrix(np.random.default_rng(seed), r, c, p)
    B, rows = la.column_basis(A, p)
    assert B.shape[1] == la.rank(A, p)
    assert np.array_equal(B[rows, :], la.identity(B.shape[1]))
    assert la.rank(np.concatenate([B, A], axis=1), p) == B.shape[1]


def test_batch_det_and_inverse_agree_with_single():
    rng = np.random.default_rng(0)
    p = 7
    stack = rng.integers(0, p, size=(200, 3, 3))
    dets = la.batch_det(stack, p)
    for m, d in zip(stack, dets):
        assert (d != 0) == la.is_invertible(m, p)
    inv_stack = stack[dets != 0]
    invs = la.batch_inverse(inv_stack, p)
    for m, i in zip(inv_stack, invs):
        assert np.array_equal(i, la.inverse(m, p))


def test_swap_permutation_is_perfect_shuffle():
    P = la.swap_permutation(2, 3)
    a, b = np.arange(2), np.arange(3)
    # e_i (x) f_j goes to f_j (x) e_i
    for i in a:
        for j in b:
            assert P[j * 2 + i, i * 3 + j] == 1
    assert P.sum() == 6
