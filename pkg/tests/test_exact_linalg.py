from __future__ import annotations

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from realtheta.exact_linalg import (
    as_int_matrix,
    det,
    gf2_lift_unimodular,
    gf2_rank,
    gf2_solve,
    hermite_basis,
    identity,
    integer_kernel,
    is_unimodular,
    lattice_contains,
    lattice_equal,
    lattice_intersection,
    lattice_solve,
    smith_normal_form,
    tate_h1,
    tate_h2,
)

small_matrix = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


def _eq(A, B) -> bool:
    A, B = as_int_matrix(A), as_int_matrix(B)
    return A.shape == B.shape and all(A[i] == B[i] for i in np.ndindex(A.shape))


@settings(max_examples=150, deadline=None)
@given(small_matrix)
def test_snf_factorisation_and_divisibility(rows):
    A = as_int_matrix(rows)
    s = smith_normal_form(A)
    assert _eq(s.U @ A @ s.V, s.D)
    assert is_unimodular(s.U) and is_unimodular(s.V)
    diag = s.diagonal
    assert all(d >= 0 for d in diag)
    nz = [d for d in diag if d]
    assert diag[: len(nz)] == nz
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    off = [s.D[i, j] for i, j in np.ndindex(s.D.shape) if i != j]
    assert not any(off)


@settings(max_examples=80, deadline=None)
@given(small_matrix)
def test_snf_matches_sympy(rows):
    ours = smith_normal_form(rows).diagonal
    M = sympy_snf(sympy.Matrix(rows), domain=sympy.ZZ)
    theirs = [abs(int(M[i, i])) for i in range(min(M.shape))]
    assert ours == theirs


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_matches_sympy(rows):
    assert det(rows) == int(sympy.Matrix(rows).det())


def test_kernel_is_saturated():
    A = [[2, 4, 6], [1, 2, 3]]
    K = integer_kernel(A)
    assert K.shape == (3, 2)
    assert not any((as_int_matrix(A) @ K).flat)
    # saturated: the elementary divisors of K are all 1
    assert smith_normal_form(K).diagonal == [1, 1]


def test_lattice_solve_and_membership():
    B = as_int_matrix([[2, 0], [0, 3]])
    assert lattice_solve(B, [4, 9]) is not None
    assert lattice_solve(B, [1, 0]) is None
    H = hermite_basis([[2, 4], [0, 6]])
    assert lattice_contains(H, [6, 6])
    assert not lattice_contains(H, [2, 3])
    assert not lattice_contains(H, [1, 0])
    assert lattice_equal([[1, 0], [0, 1]], [[1, 1], [0, 1]])
    inter = lattice_intersection([[2, 0], [0, 1]], [[1, 0], [0, 3]])
    assert lattice_equal(inter, [[2, 0], [0, 3]])


def test_tate_groups_of_standard_involutions():
    swap = [[0, 1], [1, 0]]
    assert tate_h1(swap).rank == 0 and tate_h2(swap).rank == 0
    minus = [[-1, 0, 0], [0, -1, 0], [0, 0, -1]]
    assert tate_h1(minus).rank == 3 and tate_h2(minus).rank == 0
    plus = identity(2)
    assert tate_h1(plus).rank == 0 and tate_h2(plus).rank == 2


def test_tate_reduce_is_additive():
    tau = [[-1, 0, 0], [0, -1, 0], [0, 0, 1]]
    H = tate_h1(tau)
    assert H.rank == 2
    a, b = [1, 0, 0], [0, 3, 0]
    s = [x + y for x, y in zip(a, b)]
    assert H.reduce(s) == tuple((x + y) % 2 for x, y in zip(H.reduce(a), H.reduce(b)))
    assert H.reduce([2, 4, 0]) == (0, 0)
    with pytest.raises(ValueError):
        H.reduce([0, 0, 1])


def test_non_involution_rejected():
    with pytest.raises(ValueError):
        tate_h1([[1, 1], [0, 1]])


def test_gf2_helpers():
    A = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    assert gf2_rank(A) == 2
    x = gf2_solve(A, [1, 1, 0])
    assert x is not None
    assert all(sum(a * b for a, b in zip(row, x)) % 2 == r for row, r in zip(A, [1, 1, 0]))
    assert gf2_solve(A, [1, 0, 0]) is None


def test_gf2_lift_unimodular_extends_columns():
    cols = [[1, 1, 0], [0, 1, 1]]
    G = gf2_lift_unimodular(cols, 3)
    assert is_unimodular(G)
    for j, c in enumerate(cols):
        assert [int(v) % 2 for v in G[:, j]] == c
