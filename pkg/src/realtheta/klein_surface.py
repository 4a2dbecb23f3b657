"""Klein surfaces of topological type ``(g, r, a)``.

Homology ``H_1(C, Z)`` is written in a symplectic basis ``(a_1..a_g, b_1..b_g)``
in which every ``a_i`` is invariant under the real structure and ``iota_*`` has
the block form ``[[I, B], [0, -I]]`` with ``B`` symmetric.  The Picard torus
lattice is ``H^1(C, Z)`` in the dual basis with involution ``-iota^*``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exact_linalg import (
    as_int_vector,
    identity,
    integer_kernel,
    lattice_equal,
    lattice_intersection,
    lattice_solve,
    zeros,
)
from .real_torus import LatticeInvolution, check_form, comessatti_basis, fixed_components

__all__ = [
    "KleinType",
    "SurfaceBasis",
    "CurveBundleClass",
    "PicTorusData",
    "build_surface_basis",
    "pic_torus",
    "validate_curve_class",
    "check_circle_generation",
    "valid_types",
    "component_count_formulas",
    "symplectic_matrix",
]


@dataclass(frozen=True)
class KleinType:
    g: int
    r: int
    a: int

    def __post_init__(self):
        g, r, a = self.g, self.r, self.a
        if g < 0:
            raise ValueError("genus must be non-negative")
        if a not in (0, 1):
            raise ValueError("a must be 0 or 1")
        if r < 1:
            raise ValueError("need at least one real circle (r >= 1)")
        if self.s < 0:
            raise ValueError(f"r = {r} exceeds g + 1 = {g + 1}")
        if a == 0 and self.s % 2:
            raise ValueError(f"a = 0 requires g + 1 - r even, got {self.s}")
        if a == 1 and r > g:
            raise ValueError(f"a = 1 requires r <= g, got r = {r}, g = {g}")

    @property
    def s(self) -> int:
        """Comessatti characteristic ``g + 1 - r``."""
        return self.g + 1 - self.r

    def __str__(self) -> str:
        return f"({self.g},{self.r},{self.a})"


def valid_types(max_g: int) -> list[KleinType]:
    out = []
    for g in range(max_g + 1):
        for r in range(1, g + 2):
            for a in (0, 1):
                try:
                    out.append(KleinType(g, r, a))
                except ValueError:
                    pass
    return out


def symplectic_matrix(g: int) -> np.ndarray:
    J = zeros(2 * g, 2 * g)
    for i in range(g):
        J[i, g + i] = 1
        J[g + i, i] = -1
    return J


@dataclass(frozen=True, eq=False)
class SurfaceBasis:
    t: KleinType
    iota_star: np.ndarray
    J: np.ndarray
    circle_classes: np.ndarray  # 2g x r, column i is [C_{i+1}]

    def verify(self) -> list[str]:
        """Names of violated identities (empty when everything holds)."""
        M, J, V = self.iota_star, self.J, self.circle_classes
        n = M.shape[0]
        bad = []
        if not _eq(M @ M, identity(n)):
            bad.append("iota_star is not an involution")
        if not _eq(M.T @ J @ M, -J):
            bad.append("iota_star does not reverse the intersection form")
        if not _eq(M @ V, V):
            bad.append("circle classes are not invariant")
        if V.shape[1] and not _eq(V.T @ J @ V, zeros(V.shape[1], V.shape[1])):
            bad.append("circle classes intersect")
        return bad


def _eq(A, B) -> bool:
    return A.shape == B.shape and all(A[i] == B[i] for i in np.ndindex(A.shape))


def build_surface_basis(t: KleinType) -> SurfaceBasis:
    g, r = t.g, t.r
    B = zeros(g, g)
    V = zeros(2 * g, r)
    if t.a == 0:
        k = t.s // 2
        # b_{r-1+j} <-> a_{r-1+k+j}, b_{r-1+k+j} <-> a_{r-1+j}  (1-based)
        for j in range(k):
            p, q = r - 1 + j, r - 1 + k + j
            B[q, p] = 1
            B[p, q] = 1
        for i in range(r - 1):
            V[i, i] = 1
            V[i, r - 1] = -1
    else:
        for i in range(g):
            for j in range(g):
                B[i, j] = -1
        for j in range(r, g):
            B[j, j] = -2
        for i in range(r):
            V[i, i] = 1
    M = identity(2 * g)
    for i in range(g):
        for j in range(g):
            M[i, g + j] = B[i, j]
        M[g + i, g + i] = -1
    out = SurfaceBasis(t, M, symplectic_matrix(g), V)
    bad = out.verify()
    if bad:
        raise AssertionError("; ".join(bad))
    return out


@dataclass(frozen=True)
class CurveBundleClass:
    """Degree ``d`` and the restriction ``w`` of ``w_1`` to each real circle."""

    t: KleinType
    d: int
    w: tuple


def validate_curve_class(t: KleinType, d: int, w) -> CurveBundleClass:
    w = tuple(int(x) % 2 for x in w)
    if len(w) != t.r:
        raise ValueError(f"need {t.r} circle values, got {len(w)}")
    if sum(w) % 2 != d % 2:
        raise ValueError(f"sum of circle values {sum(w) % 2} != degree parity {d % 2}")
    return CurveBundleClass(t, int(d), w)


@dataclass(frozen=True, eq=False)
class PicTorusData:
    t: KleinType
    surface: SurfaceBasis
    base: LatticeInvolution
    u_C: np.ndarray
    circle_duals: np.ndarray  # 2g x r

    def circle_dual(self, i: int) -> np.ndarray:
        """``[C_{i+1}]^dual`` as a vector of the lattice (0-based ``i``)."""
        return self.circle_duals[:, i]

    @cached_property
    def components(self):
        return fixed_components(self.base)

    def poincare_dual(self, lam) -> np.ndarray:
        """Homology class ``lam cap [C]`` of a cohomology class ``lam``."""
        return self.surface.J @ as_int_vector(lam)


def pic_torus(t: KleinType) -> PicTorusData:
    S = build_surface_basis(t)
    M, J = S.iota_star, S.J
    L = LatticeInvolution(-M.T)
    u_C = check_form(L, J)
    # Poincare duality H_1 -> H^1 in the dual basis: v -> J^T v
    duals = J.T @ S.circle_classes
    return PicTorusData(t, S, L, u_C, duals)


def component_count_formulas(t: KleinType) -> tuple[int, int]:
    """``(2^{r-1}, 2^{2g - a' - s'})``, the second from the Comessatti data of the Picard lattice."""
    p = pic_torus(t)
    cb = comessatti_basis(p.base)
    return 2 ** (t.r - 1), 2 ** (2 * t.g - cb.a - cb.s)


def check_circle_generation(t: KleinType) -> dict[str, bool]:
    """Lattice identities relating circle classes to norms ``(1 + iota_*) H_1``."""
    S = build_surface_basis(t)
    M, J, V = S.iota_star, S.J, S.circle_classes
    n = M.shape[0]
    I = identity(n)
    fixed = integer_kernel(I - M)
    norms = I + M
    out = {}
    if n == 0:
        return {"surjective": True}
    out["surjective"] = lattice_equal(np.concatenate([V, norms], axis=1), fixed)
    meet = lattice_intersection(V, norms)
    relations = integer_kernel(V)
    if t.a == 0:
        ones = as_int_vector([1] * t.r).reshape(-1, 1)
        out["relations are multiples of the sum"] = lattice_equal(relations, ones)
        out["circles meet norms in doubles"] = lattice_equal(meet, 2 * V)
    else:
        out["circles independent"] = relations.shape[1] == 0
        a_basis = I[:, :t.g]
        out["fixed part is spanned by a"] = lattice_equal(fixed, a_basis)
        total = sum((I[:, i] for i in range(t.g)), zeros(n, 1)[:, 0]).reshape(-1, 1)
        circ_total = V @ as_int_vector([1] * t.r).reshape(-1, 1)
        out["norm lattice"] = lattice_equal(
            norms, np.concatenate([2 * a_basis, I[:, t.r:t.g], circ_total], axis=1)
        ) and lattice_equal(norms, np.concatenate([2 * a_basis, I[:, t.r:t.g], total], axis=1))
        out["circles meet norms"] = lattice_equal(
            meet, np.concatenate([2 * V[:, : t.r - 1], circ_total], axis=1)
        )
        x = lattice_solve(norms, circ_total[:, 0])
        if x is None:
            out["sum of circles is a norm"] = False
        else:
            out["sum of circles is a norm"] = True
            pairing = int(x @ J @ (M @ x))
            out["self-pairing matches Comessatti characteristic"] = pairing % 2 == t.s % 2
    return out
