"""Quadratic refinements of the mod-2 intersection form and Real theta classes.

A refinement ``q`` is stored by its values on the symplectic basis
``(a_1..a_g, b_1..b_g)``; everything else follows from
``q(x + y) = q(x) + q(y) + x.y``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional, Sequence

from .exact_linalg import gf2_rank, gf2_solve, identity
from .klein_surface import KleinType, PicTorusData, build_surface_basis
from .real_torus import RealLineBundleClass, UCharacter, f_u, make_class

__all__ = [
    "QuadraticRefinement",
    "intersection_mod2",
    "eval_q",
    "arf",
    "all_refinements",
    "is_real_refinement",
    "transvection",
    "change_basis",
    "chi_from_q",
    "boundary_values",
    "class_from_boundary",
    "theta_class_from_q",
    "theta_class_p0",
    "spin_class",
    "p0_boundary",
    "realizable_boundary_data",
    "theta_chars_per_component",
    "real_locus_value",
]


def intersection_mod2(x, y, g: int) -> int:
    """Mod-2 intersection number in a symplectic basis."""
    return sum(int(x[i]) * int(y[g + i]) + int(x[g + i]) * int(y[i]) for i in range(g)) % 2


@dataclass(frozen=True)
class QuadraticRefinement:
    g: int
    basis_values: tuple

    def __post_init__(self):
        vals = tuple(int(b) % 2 for b in self.basis_values)
        if len(vals) != 2 * self.g:
            raise ValueError(f"need {2 * self.g} basis values")
        object.__setattr__(self, "basis_values", vals)

    def __call__(self, eta) -> int:
        return eval_q(self, eta)


def eval_q(q: QuadraticRefinement, eta) -> int:
    g = q.g
    v = [0] * (2 * g)
    val = 0
    for i, c in enumerate(eta):
        if int(c) % 2 == 0:
            continue
        e = [0] * (2 * g)
        e[i] = 1
        val += q.basis_values[i] + intersection_mod2(v, e, g)
        v[i] = 1
    return val % 2


def arf(q: QuadraticRefinement) -> int:
    g = q.g
    return sum(q.basis_values[i] * q.basis_values[g + i] for i in range(g)) % 2


def all_refinements(g: int) -> Iterator[QuadraticRefinement]:
    for bits in product((0, 1), repeat=2 * g):
        yield QuadraticRefinement(g, bits)


def transvection(x, y, g: int) -> list[int]:
    """``y + (x.y) x`` over Z_2; preserves the intersection form."""
    c = intersection_mod2(x, y, g)
    return [(int(yi) + c * int(xi)) % 2 for xi, yi in zip(x, y)]


def change_basis(q: QuadraticRefinement, new_basis: Sequence[Sequence[int]]) -> QuadraticRefinement:
    """``q`` expressed on another symplectic basis (given as mod-2 vectors)."""
    return QuadraticRefinement(q.g, tuple(eval_q(q, e) for e in new_basis))


def is_real_refinement(q: QuadraticRefinement, iota_star) -> bool:
    """``q(iota_* e) = q(e)`` on every basis vector, hence everywhere."""
    n = 2 * q.g
    for i in range(n):
        if eval_q(q, [int(x) % 2 for x in iota_star[:, i]]) != q.basis_values[i]:
            return False
    return True


def chi_from_q(p: PicTorusData, q: QuadraticRefinement) -> UCharacter:
    """``chi(lam) = (-1)^{q(PD(lam) mod 2)}`` as a ``u_C``-character."""
    n = 2 * p.t.g
    angles = []
    for i in range(n):
        pd = p.poincare_dual(identity(n)[:, i])
        angles.append(eval_q(q, [int(x) % 2 for x in pd]))
    return UCharacter(p.u_C, tuple(angles))


def boundary_values(p: PicTorusData, q: QuadraticRefinement) -> tuple:
    """``(q([C_1]), ..., q([C_r]))``."""
    V = p.surface.circle_classes
    return tuple(eval_q(q, [int(x) % 2 for x in V[:, i]]) for i in range(p.t.r))


def class_from_boundary(p: PicTorusData, values: Sequence[int]) -> RealLineBundleClass:
    """The class ``(u_C, w0)`` with ``w0([C_i]^dual) = values[i]`` extending ``f_{u_C}``.

    ``w0`` is found by Gaussian elimination over Z_2 on the fixed-lattice
    basis.  The constraints always have full rank because the circle duals
    generate the fixed lattice modulo norms; they are inconsistent exactly
    when ``values`` disagree with ``f_{u_C}`` on the overlap.
    """
    L = p.base
    n = L.n
    k = L.fixed_basis.shape[1]
    rows, rhs = [], []
    for i in range(p.t.r):
        rows.append([int(c) for c in L.fixed_coords(p.circle_dual(i))])
        rhs.append(int(values[i]) % 2)
    I = identity(n)
    for j in range(n):
        v = I[:, j] + L.tau[:, j]
        rows.append([int(c) for c in L.fixed_coords(v)])
        rhs.append(f_u(L, p.u_C, v))
    if k and gf2_rank(rows) != k:
        raise AssertionError("circle duals and norms do not span the fixed lattice mod 2")
    w0 = gf2_solve(rows, rhs) if k else []
    if w0 is None:
        raise ValueError("boundary values are incompatible with f_u on the norm lattice")
    return make_class(L, p.u_C, w0)


def theta_class_from_q(p: PicTorusData, q: QuadraticRefinement) -> RealLineBundleClass:
    if q.g != p.t.g:
        raise ValueError("refinement and surface have different genus")
    return class_from_boundary(p, boundary_values(p, q))


spin_class = theta_class_from_q


def p0_boundary(t: KleinType, i0: int) -> tuple:
    """Circle values of the theta class based at a real point on circle ``i0`` (1-based)."""
    if not 1 <= i0 <= t.r:
        raise ValueError(f"circle index must be in 1..{t.r}")
    return tuple(t.g % 2 if i == i0 else 1 for i in range(1, t.r + 1))


def theta_class_p0(p: PicTorusData, i0: int, g: Optional[int] = None) -> RealLineBundleClass:
    if g is not None and g != p.t.g:
        raise ValueError("genus does not match the surface")
    return class_from_boundary(p, p0_boundary(p.t, i0))


def realizable_boundary_data(t: KleinType, real_only: bool = False) -> Counter:
    """Multiplicity of each shifted boundary vector ``w_i = q([C_i]) + 1``.

    All ``2^{2g}`` refinements are enumerated; with ``real_only`` only those
    invariant under ``iota_*`` are kept.
    """
    S = build_surface_basis(t)
    circles = [[int(x) % 2 for x in S.circle_classes[:, i]] for i in range(t.r)]
    out: Counter = Counter()
    for q in all_refinements(t.g):
        if real_only and not is_real_refinement(q, S.iota_star):
            continue
        w = tuple((eval_q(q, c) + 1) % 2 for c in circles)
        out[w] += 1
    return Counter(dict(sorted(out.items())))


def real_locus_value(t: KleinType, q: QuadraticRefinement) -> int:
    """``q`` on the mod-2 class of the whole real locus."""
    S = build_surface_basis(t)
    total = [sum(int(x) for x in row) % 2 for row in S.circle_classes]
    return eval_q(q, total)


def theta_chars_per_component(g: int) -> int:
    if g < 0:
        raise ValueError("genus must be non-negative")
    return 2**g
