"""Exact integer and mod-2 linear algebra.

Matrices are numpy arrays of ``dtype=object`` holding Python ints, so every
product is carried out in arbitrary precision.  Unimodular transforms produced
by the Smith reduction can have large entries even for small inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "as_int_matrix",
    "as_int_vector",
    "identity",
    "zeros",
    "unimodular_inverse",
    "SmithDecomposition",
    "smith_normal_form",
    "integer_kernel",
    "lattice_solve",
    "left_inverse",
    "hermite_basis",
    "lattice_contains",
    "lattice_equal",
    "lattice_intersection",
    "is_unimodular",
    "det",
    "ElementaryTwoGroup",
    "tate_h1",
    "tate_h2",
    "check_involution",
    "gf2_solve",
    "gf2_rank",
    "gf2_lift_unimodular",
]


def as_int_matrix(a, rows: Optional[int] = None, cols: Optional[int] = None) -> np.ndarray:
    """Copy ``a`` into a 2-D object array of Python ints."""
    if isinstance(a, np.ndarray) and a.ndim == 2:
        out = np.empty(a.shape, dtype=object)
        for idx, v in np.ndenumerate(a):
            out[idx] = int(v)
    else:
        data = [[int(x) for x in row] for row in a]
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        out = np.empty((rows, cols), dtype=object)
        for i in range(rows):
            if len(data[i]) != cols:
                raise ValueError("ragged matrix rows")
            for j in range(cols):
                out[i, j] = data[i][j]
    return out


def as_int_vector(v) -> np.ndarray:
    out = np.empty(len(v), dtype=object)
    for i, x in enumerate(v):
        out[i] = int(x)
    return out


def _zeros(r: int, c: int) -> np.ndarray:
    out = np.empty((r, c), dtype=object)
    out.fill(0)
    return out


def identity(n: int) -> np.ndarray:
    out = _zeros(n, n)
    for i in range(n):
        out[i, i] = 1
    return out


def zeros(r: int, c: int) -> np.ndarray:
    return _zeros(r, c)


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: np.ndarray
    D: np.ndarray
    V: np.ndarray

    @property
    def diagonal(self) -> list[int]:
        k = min(self.D.shape)
        return [int(self.D[i, i]) for i in range(k)]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(A) -> SmithDecomposition:
    """Smith normal form by repeated gcd pivoting.

    The diagonal of ``D`` is non-negative, each entry divides the next, and
    zeros come last.
    """
    D = as_int_matrix(A)
    m, n = D.shape
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        if i != j:
            D[[i, j]] = D[[j, i]]
            U[[i, j]] = U[[j, i]]

    def swap_cols(i, j):
        if i != j:
            D[:, [i, j]] = D[:, [j, i]]
            V[:, [i, j]] = V[:, [j, i]]

    for t in range(min(m, n)):
        # smallest nonzero entry of the trailing block becomes the pivot
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    v = D[i, j]
                    if v != 0 and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
            if best is None:
                return SmithDecomposition(U=U, D=D, V=V)
            _, pi, pj = best
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = D[t, t]
            done = True
            for i in range(t + 1, m):
                q = D[i, t] // p
                if q:
                    D[i, :] -= q * D[t, :]
                    U[i, :] -= q * U[t, :]
                if D[i, t] != 0:
                    done = False
            for j in range(t + 1, n):
                q = D[t, j] // p
                if q:
                    D[:, j] -= q * D[:, t]
                    V[:, j] -= q * V[:, t]
                if D[t, j] != 0:
                    done = False
            if not done:
                continue
            # pivot must divide the whole trailing block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i, j] % p != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            D[t, :] += D[bad, :]
            U[t, :] += U[bad, :]
        if D[t, t] < 0:
            D[t, :] = -D[t, :]
            U[t, :] = -U[t, :]
    return SmithDecomposition(U=U, D=D, V=V)


def det(A) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    M = as_int_matrix(A)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    M = [[int(x) for x in row] for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def is_unimodular(A) -> bool:
    A = as_int_matrix(A)
    return A.shape[0] == A.shape[1] and abs(det(A)) == 1


def integer_kernel(A) -> np.ndarray:
    """Columns form a basis of ``{x in Z^n : A x = 0}``; the basis is saturated."""
    A = as_int_matrix(A)
    n = A.shape[1]
    snf = smith_normal_form(A)
    r = snf.rank
    return hermite_basis(snf.V[:, r:]) if n - r else _zeros(n, 0)


def left_inverse(B) -> np.ndarray:
    """Integer ``P`` with ``P @ B == I`` for a saturated basis ``B`` (columns)."""
    B = as_int_matrix(B)
    n, k = B.shape
    snf = smith_normal_form(B)
    if snf.diagonal[:k] != [1] * k:
        raise ValueError("basis does not span a saturated sublattice")
    # U B V = [I; 0]  =>  (V [I 0] U) B = I
    sel = _zeros(k, n)
    for i in range(k):
        sel[i, i] = 1
    return snf.V @ sel @ snf.U


def lattice_solve(A, b) -> Optional[np.ndarray]:
    """Return an integer ``x`` with ``A x = b`` or ``None`` if none exists."""
    A = as_int_matrix(A)
    b = as_int_vector(b)
    m, n = A.shape
    if b.shape[0] != m:
        raise ValueError("dimension mismatch")
    snf = smith_normal_form(A)
    c = snf.U @ b
    y = np.empty(n, dtype=object)
    y.fill(0)
    diag = snf.diagonal
    for i in range(m):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d != 0:
                return None
            y[i] = c[i] // d
    return snf.V @ y


def hermite_basis(gens) -> np.ndarray:
    """Canonical basis (columns) of the lattice spanned by the columns of ``gens``.

    The result is the column-style Hermite normal form with zero columns
    removed: the first nonzero entry of each column is positive and entries to
    its right in that row are reduced into ``[0, pivot)``.
    """
    G = as_int_matrix(gens)
    M = [[int(x) for x in row] for row in G.T]  # rows = generators
    n = G.shape[0]
    rows: list[list[int]] = []
    work = [r[:] for r in M if any(r)]
    col = 0
    while work and col < n:
        nz = [r for r in work if r[col] != 0]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            for r in nz[1:]:
                q = r[col] // p[col]
                for j in range(n):
                    r[j] -= q * p[j]
            nz = [r for r in nz if r[col] != 0]
        p = nz[0]
        if p[col] < 0:
            p[:] = [-x for x in p]
        work = [r for r in work if r is not p and any(r)]
        rows.append(p)
        col += 1
    # reduce earlier rows against later pivots
    pivots = []
    for r in rows:
        pivots.append(next(j for j, x in enumerate(r) if x != 0))
    for i in range(len(rows)):
        for k in range(i + 1, len(rows)):
            pc = pivots[k]
            q = rows[i][pc] // rows[k][pc]
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[k])]
    out = _zeros(n, len(rows))
    for j, r in enumerate(rows):
        for i in range(n):
            out[i, j] = r[i]
    return out


def lattice_contains(basis, v) -> bool:
    return lattice_solve(basis, v) is not None


def lattice_equal(gens_a, gens_b) -> bool:
    A = hermite_basis(gens_a)
    B = hermite_basis(gens_b)
    return A.shape == B.shape and all(A[idx] == B[idx] for idx in np.ndindex(A.shape))


def lattice_intersection(gens_a, gens_b) -> np.ndarray:
    """Basis of the intersection of the column spans of ``gens_a`` and ``gens_b``."""
    A = hermite_basis(gens_a)
    B = hermite_basis(gens_b)
    if A.shape[1] == 0 or B.shape[1] == 0:
        return _zeros(A.shape[0], 0)
    K = integer_kernel(np.concatenate([A, -B], axis=1))
    return hermite_basis(A @ K[: A.shape[1], :])


def check_involution(tau) -> np.ndarray:
    t = as_int_matrix(tau)
    n = t.shape[0]
    if t.shape != (n, n):
        raise ValueError("involution matrix must be square")
    sq = t @ t
    if any(sq[i, j] != (1 if i == j else 0) for i in range(n) for j in range(n)):
        raise ValueError("matrix is not an involution (tau @ tau != identity)")
    return t


@dataclass(frozen=True)
class ElementaryTwoGroup:
    """Quotient ``ker / im`` of two lattices, known to be a 2-group of exponent 2.

    ``coset_reps`` are lattice vectors (in ambient coordinates) whose classes
    form a basis.  ``reduce`` maps any vector of the ambient kernel to its
    coordinate vector in ``Z_2^rank``.
    """

    rank: int
    coset_reps: tuple
    kernel_basis: np.ndarray = field(repr=False)
    _left: np.ndarray = field(repr=False)
    _change: np.ndarray = field(repr=False)
    _positions: tuple = field(repr=False)

    def reduce(self, v) -> tuple:
        v = as_int_vector(v)
        c = self._left @ v
        if any((self.kernel_basis @ c)[i] != v[i] for i in range(len(v))):
            raise ValueError("vector does not lie in the numerator lattice")
        x = self._change @ c
        return tuple(int(x[p]) % 2 for p in self._positions)

    def element(self, bits: Sequence[int]) -> np.ndarray:
        """Lattice representative of the class with coordinates ``bits``."""
        n = self.kernel_basis.shape[0]
        out = np.empty(n, dtype=object)
        out.fill(0)
        for b, rep in zip(bits, self.coset_reps):
            if b % 2:
                out = out + rep
        return out

    def elements(self) -> list[tuple]:
        """All coordinate vectors in lexicographic order, zero first."""
        from itertools import product

        return [tuple(bits) for bits in product((0, 1), repeat=self.rank)]


def _quotient_group(numerator, denominator_gens) -> ElementaryTwoGroup:
    K = numerator
    n, k = K.shape
    if k == 0:
        return ElementaryTwoGroup(0, (), K, _zeros(0, n), _zeros(0, 0), ())
    P = left_inverse(K)
    C = P @ as_int_matrix(denominator_gens)
    snf = smith_normal_form(C)
    diag = snf.diagonal + [0] * (k - len(snf.diagonal))
    if any(d not in (1, 2) for d in diag):
        raise ValueError(f"quotient is not an elementary 2-group: invariants {diag}")
    positions = tuple(i for i, d in enumerate(diag) if d == 2)
    Uinv = unimodular_inverse(snf.U)
    reps = tuple(K @ Uinv[:, i] for i in positions)
    return ElementaryTwoGroup(len(positions), reps, K, P, snf.U, positions)


def unimodular_inverse(U) -> np.ndarray:
    n = U.shape[0]
    cols = [lattice_solve(U, identity(n)[:, j]) for j in range(n)]
    return np.stack(cols, axis=1) if n else _zeros(0, 0)


def tate_h1(tau) -> ElementaryTwoGroup:
    """``ker(id + tau) / im(id - tau)``."""
    t = check_involution(tau)
    I = identity(t.shape[0])
    return _quotient_group(integer_kernel(I + t), I - t)


def tate_h2(tau) -> ElementaryTwoGroup:
    """``ker(id - tau) / im(id + tau)``."""
    t = check_involution(tau)
    I = identity(t.shape[0])
    return _quotient_group(integer_kernel(I - t), I + t)


# --- mod 2 ------------------------------------------------------------------


def _gf2_rows(A) -> list[list[int]]:
    return [[int(x) % 2 for x in row] for row in A]


def gf2_rank(A) -> int:
    rows = _gf2_rows(A)
    if not rows:
        return 0
    n = len(rows[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                rows[i] = [a ^ b for a, b in zip(rows[i], rows[r])]
        r += 1
    return r


def gf2_solve(A, b) -> Optional[list[int]]:
    """One solution of ``A x = b`` over Z_2 (free variables zero), else ``None``.

    Pivots are taken in column order, first available row, so the result is
    deterministic.
    """
    rows = _gf2_rows(A)
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = [row + [int(bi) % 2] for row, bi in zip(rows, b)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if aug[i][c]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        for i in range(m):
            if i != r and aug[i][c]:
                aug[i] = [x ^ y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    for i in range(r, m):
        if aug[i][n]:
            return None
    x = [0] * n
    for i, c in enumerate(pivots):
        x[c] = aug[i][n]
    return x


def gf2_lift_unimodular(cols: Iterable[Sequence[int]], n: int) -> np.ndarray:
    """Unimodular integer matrix whose first columns reduce to ``cols`` mod 2.

    ``cols`` must be linearly independent over Z_2.  The mod-2 matrix is
    completed to an invertible one with standard basis vectors, reduced to the
    identity by elementary row operations, and the inverse product of those
    operations is lifted to the integers one elementary matrix at a time.
    """
    cols = [[int(x) % 2 for x in c] for c in cols]
    basis = [c[:] for c in cols]
    for i in range(n):
        e = [1 if j == i else 0 for j in range(n)]
        if gf2_rank([*basis, e]) > len(basis):
            basis.append(e)
    if len(basis) != n:
        raise ValueError("columns are not independent mod 2")
    G = [[basis[j][i] for j in range(n)] for i in range(n)]
    ops = []
    for c in range(n):
        piv = next(i for i in range(c, n) if G[i][c])
        if piv != c:
            G[c], G[piv] = G[piv], G[c]
            ops.append(("swap", c, piv))
        for i in range(n):
            if i != c and G[i][c]:
                G[i] = [a ^ b for a, b in zip(G[i], G[c])]
                ops.append(("add", i, c))
    # E_k ... E_1 G = I  =>  G = E_1 ... E_k (each E is its own inverse mod 2)
    L = identity(n)
    for op, i, j in ops:
        E = identity(n)
        if op == "swap":
            E[[i, j]] = E[[j, i]]
        else:
            E[i, j] = 1
        L = L @ E
    return L
