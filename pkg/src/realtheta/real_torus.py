"""Real tori ``V / Lambda`` with a lattice involution ``tau``.

Circle values are stored as exact rational angles ``q`` modulo 2, standing for
``exp(pi i q)``.  A Real line bundle class is the pair ``(u, w0)`` of an
anti-invariant alternating form and a mod-2 functional on the fixed sublattice.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .exact_linalg import (
    ElementaryTwoGroup,
    as_int_matrix,
    as_int_vector,
    check_involution,
    det,
    gf2_lift_unimodular,
    identity,
    integer_kernel,
    lattice_solve,
    left_inverse,
    smith_normal_form,
    tate_h1,
    tate_h2,
    unimodular_inverse,
    zeros,
)

__all__ = [
    "LatticeInvolution",
    "ComessattiBasis",
    "UCharacter",
    "FixedComponentIndex",
    "RealLineBundleClass",
    "SWFunction",
    "check_form",
    "standard_symplectic",
    "comessatti_basis",
    "fixed_components",
    "eval_ucharacter",
    "is_real_ucharacter",
    "real_ucharacter_components",
    "real_character_from_data",
    "obstruction_class",
    "f_u",
    "make_class",
    "zero_class",
    "class_add",
    "class_scale",
    "sw_function",
    "class_from_real_character",
    "random_involution",
    "random_unimodular",
    "random_anti_invariant_form",
    "anti_invariant_forms",
]


def _angle(q) -> Fraction:
    return Fraction(q) % 2


def _pair(u, x, y) -> int:
    return int(as_int_vector(x) @ u @ as_int_vector(y))


@dataclass(frozen=True, eq=False)
class LatticeInvolution:
    """A rank-``n`` lattice ``Z^n`` with an integer involution ``tau``."""

    tau: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tau", check_involution(self.tau))

    @property
    def n(self) -> int:
        return self.tau.shape[0]

    @cached_property
    def fixed_basis(self) -> np.ndarray:
        """Saturated basis (columns) of the fixed sublattice, in Hermite form."""
        return integer_kernel(identity(self.n) - self.tau)

    @cached_property
    def fixed_projector(self) -> np.ndarray:
        return left_inverse(self.fixed_basis)

    @cached_property
    def anti_basis(self) -> np.ndarray:
        return integer_kernel(identity(self.n) + self.tau)

    @cached_property
    def h1(self) -> ElementaryTwoGroup:
        return tate_h1(self.tau)

    def fixed_coords(self, lam) -> np.ndarray:
        """Coordinates of a fixed vector in ``fixed_basis``."""
        lam = as_int_vector(lam)
        c = self.fixed_projector @ lam
        back = self.fixed_basis @ c
        if any(back[i] != lam[i] for i in range(self.n)):
            raise ValueError("vector is not fixed by tau")
        return c

    def same_as(self, other: "LatticeInvolution") -> bool:
        return self is other or (
            self.n == other.n and all(self.tau[i] == other.tau[i] for i in np.ndindex(self.tau.shape))
        )

    def __eq__(self, other):
        return isinstance(other, LatticeInvolution) and self.same_as(other)

    def __hash__(self):
        return hash(tuple(int(x) for x in self.tau.flat))


def standard_symplectic(n: int = 2) -> np.ndarray:
    """``[[0, I], [-I, 0]]`` on ``Z^n`` (``n`` even)."""
    if n % 2:
        raise ValueError("standard symplectic form needs even rank")
    m = n // 2
    u = zeros(n, n)
    for i in range(m):
        u[i, m + i] = 1
        u[m + i, i] = -1
    return u


def check_form(L: Optional[LatticeInvolution], u) -> np.ndarray:
    """Validate that ``u`` is alternating and, if ``L`` is given, anti-invariant."""
    u = as_int_matrix(u)
    n = u.shape[0]
    if u.shape != (n, n):
        raise ValueError("form must be a square matrix")
    if any(u[i, j] != -u[j, i] for i in range(n) for j in range(n)):
        raise ValueError("form is not alternating (u^T != -u)")
    if L is not None:
        if L.n != n:
            raise ValueError("form and involution have different ranks")
        t = L.tau
        tut = t.T @ u @ t
        if any(tut[i, j] != -u[i, j] for i in range(n) for j in range(n)):
            raise ValueError("form is not anti-invariant (tau^T u tau != -u)")
    return u


# --- Comessatti normal form -------------------------------------------------


@dataclass(frozen=True, eq=False)
class ComessattiBasis:
    """Columns of ``U`` are ``alpha_1..alpha_a, beta_1..beta_s, gamma_{s+1}..gamma_{n-a}``.

    In this basis ``tau`` fixes every alpha, sends ``beta_j`` to
    ``alpha_j - beta_j`` and negates every gamma.
    """

    U: np.ndarray
    a: int
    s: int

    @property
    def n(self) -> int:
        return self.U.shape[0]

    def normal_form(self) -> np.ndarray:
        """The matrix of ``tau`` in the Comessatti basis."""
        n, a, s = self.n, self.a, self.s
        T = zeros(n, n)
        for i in range(a):
            T[i, i] = 1
        for j in range(s):
            T[j, a + j] = 1
            T[a + j, a + j] = -1
        for k in range(a + s, n):
            T[k, k] = -1
        return T

    def verify(self, L: LatticeInvolution) -> bool:
        if abs(det(self.U)) != 1:
            return False
        lhs = L.tau @ self.U
        rhs = self.U @ self.normal_form()
        return all(lhs[i] == rhs[i] for i in np.ndindex(lhs.shape))


def comessatti_basis(L: LatticeInvolution) -> ComessattiBasis:
    n = L.n
    I = identity(n)
    Bp, Pp = L.fixed_basis, L.fixed_projector
    a = Bp.shape[1]
    Bm = L.anti_basis
    Pm = left_inverse(Bm) if Bm.shape[1] else zeros(0, n)

    if a:
        snf = smith_normal_form(Pp @ (I + L.tau))
        diag = snf.diagonal
        if any(d not in (1, 2) for d in diag[:a]):
            raise AssertionError(f"unexpected norm invariants {diag}")
        s = sum(1 for d in diag[:a] if d == 1)
        alphas = Bp @ unimodular_inverse(snf.U)
        betas = [snf.V[:, j] for j in range(s)]
    else:
        s = 0
        alphas = zeros(n, 0)
        betas = []

    # (tau - 1) beta_j lies in the anti-invariant lattice; its coordinates are
    # independent mod 2 and get completed to a unimodular matrix G.
    xs = [Pm @ ((L.tau - I) @ b) for b in betas]
    G = gf2_lift_unimodular([[int(v) for v in x] for x in xs], n - a)
    new_betas = []
    for j, b in enumerate(betas):
        diff = xs[j] - G[:, j]
        if any(int(v) % 2 for v in diff):
            raise AssertionError("lift does not agree mod 2")
        new_betas.append(b + Bm @ (diff // 2))
    gammas = Bm @ G[:, s:] if n - a - s else zeros(n, 0)
    cols = [alphas[:, i] for i in range(a)] + new_betas + [gammas[:, k] for k in range(gammas.shape[1])]
    U = np.stack(cols, axis=1) if cols else zeros(0, 0)
    out = ComessattiBasis(U=U, a=a, s=s)
    if not out.verify(L):
        raise AssertionError("Comessatti relations failed")
    return out


# --- components of the fixed locus ------------------------------------------


@dataclass(frozen=True)
class FixedComponentIndex:
    """Component ``[mu]`` of the fixed torus, stored as ``m = 2 mu``."""

    bits: tuple
    m: tuple

    @property
    def mu(self) -> tuple:
        return tuple(Fraction(x, 2) for x in self.m)

    @property
    def label(self) -> str:
        return "T" + str(int("".join(map(str, self.bits)) or "0", 2))


def fixed_components(L: LatticeInvolution) -> list[FixedComponentIndex]:
    H = L.h1
    out = []
    for bits in H.elements():
        m = H.element(bits) if H.rank else as_int_vector([0] * L.n)
        out.append(FixedComponentIndex(bits=bits, m=tuple(int(x) for x in m)))
    return out


def component_of(L: LatticeInvolution, m) -> FixedComponentIndex:
    """Canonical index of the component through ``mu = m / 2``."""
    bits = L.h1.reduce(m)
    for c in fixed_components(L):
        if c.bits == bits:
            return c
    raise AssertionError("unreachable")


# --- u-characters -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class UCharacter:
    """``alpha(e_i) = exp(pi i angles[i])`` with twist ``alpha(x+y) = alpha(x) alpha(y) e^{pi i u(x,y)}``."""

    form: np.ndarray
    angles: tuple

    def __post_init__(self):
        object.__setattr__(self, "form", check_form(None, self.form))
        angles = tuple(_angle(q) for q in self.angles)
        if len(angles) != self.form.shape[0]:
            raise ValueError("need one angle per basis vector")
        object.__setattr__(self, "angles", angles)

    @property
    def n(self) -> int:
        return len(self.angles)

    def __call__(self, lam) -> Fraction:
        return eval_ucharacter(self, lam)


def eval_ucharacter(alpha: UCharacter, lam) -> Fraction:
    """Angle of ``alpha(lam)``, built up one basis direction at a time."""
    u = alpha.form
    lam = [int(x) for x in lam]
    v = [0] * alpha.n
    q = Fraction(0)
    for i, c in enumerate(lam):
        if c == 0:
            continue
        # alpha(v + c e_i) = alpha(v) + c q_i + c u(v, e_i); u(e_i, e_i) = 0
        cross = sum(v[j] * int(u[j, i]) for j in range(alpha.n))
        q += c * alpha.angles[i] + c * cross
        v[i] += c
    return q % 2


def is_real_ucharacter(alpha: UCharacter, L: LatticeInvolution) -> bool:
    check_form(L, alpha.form)
    for i in range(L.n):
        if (eval_ucharacter(alpha, L.tau[:, i]) + alpha.angles[i]) % 2 != 0:
            return False
    return True


def real_character_from_data(
    L: LatticeInvolution,
    u,
    signs: Sequence[int],
    free_angles: Optional[Sequence] = None,
    cb: Optional[ComessattiBasis] = None,
) -> UCharacter:
    """Real ``u``-character with prescribed signs on ``alpha_{s+1..a}``.

    ``signs`` holds ``a - s`` bits (angle 0 or 1).  ``free_angles`` holds the
    ``n - a`` angles on ``beta_1..beta_s, gamma_{s+1}..gamma_{n-a}``; they move
    the character inside its connected component.
    """
    u = check_form(L, u)
    cb = cb or comessatti_basis(L)
    n, a, s = L.n, cb.a, cb.s
    if len(signs) != a - s:
        raise ValueError(f"expected {a - s} signs")
    free = list(free_angles) if free_angles is not None else [0] * (n - a)
    if len(free) != n - a:
        raise ValueError(f"expected {n - a} free angles")
    U = cb.U
    uu = U.T @ u @ U
    new = [Fraction(0)] * n
    for j in range(s):
        new[j] = Fraction(int(uu[j, a + j]))
    for i, b in enumerate(signs):
        new[s + i] = Fraction(int(b) % 2)
    for k, q in enumerate(free):
        new[a + k] = Fraction(q)
    in_new = UCharacter(uu, tuple(new))
    Uinv = unimodular_inverse(U)
    angles = tuple(eval_ucharacter(in_new, Uinv[:, i]) for i in range(n))
    return UCharacter(u, angles)


def real_ucharacter_components(L: LatticeInvolution, u) -> tuple[int, list[UCharacter]]:
    """Number of components of the Real ``u``-characters and one per component."""
    cb = comessatti_basis(L)
    k = cb.a - cb.s
    reps = [real_character_from_data(L, u, bits, cb=cb) for bits in product((0, 1), repeat=k)]
    return 2**k, reps


def obstruction_class(L: LatticeInvolution, u, alpha: Optional[UCharacter] = None) -> tuple:
    """Class of ``lam -> alpha(lam) alpha(tau lam)`` modulo norms.

    The result is a coordinate vector in ``ker(1 + tau^T) / im(1 - tau^T)``.
    Returns the zero tuple whenever a Real ``u``-character exists.
    """
    u = check_form(L, u)
    n = L.n
    if alpha is None:
        alpha = UCharacter(u, (0,) * n)
    r = [alpha.angles[i] + eval_ucharacter(alpha, L.tau[:, i]) for i in range(n)]
    tT = L.tau.T
    # rho is tau-invariant: tau^T r = r mod 2
    for i in range(n):
        if (sum(int(tT[i, j]) * r[j] for j in range(n)) - r[i]) % 2 != 0:
            raise AssertionError("rho is not tau-invariant")
    y = []
    for i in range(n):
        val = r[i] - sum(int(tT[i, j]) * r[j] for j in range(n))
        if Fraction(val) / 2 != int(Fraction(val) / 2):
            raise AssertionError("(1 - tau^T) r not divisible by 2")
        y.append(int(Fraction(val) / 2))
    return tate_h2(-tT).reduce(y)


def f_u(L: LatticeInvolution, u, lam_fixed) -> int:
    """``f_u(lam + tau lam) = u(lam, tau lam) mod 2``."""
    u = check_form(L, u)
    lam = lattice_solve(identity(L.n) + L.tau, lam_fixed)
    if lam is None:
        raise ValueError("vector does not lie in (1 + tau) Lambda")
    return _pair(u, lam, L.tau @ lam) % 2


# --- classification group -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class RealLineBundleClass:
    """``(u, w0)`` with ``w0`` given by its bits on ``L.fixed_basis``."""

    L: LatticeInvolution
    u: np.ndarray
    w0: tuple

    def key(self) -> tuple:
        return (tuple(int(x) for x in self.u.flat), self.w0)

    def __eq__(self, other):
        return isinstance(other, RealLineBundleClass) and self.L == other.L and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def w0_value(self, lam) -> int:
        c = self.L.fixed_coords(lam)
        return sum(int(ci) * b for ci, b in zip(c, self.w0)) % 2


def _fiber_product_violations(L: LatticeInvolution, u, w0) -> list[int]:
    bad = []
    Pp = L.fixed_projector
    for i in range(L.n):
        ei = identity(L.n)[:, i]
        tei = L.tau[:, i]
        c = Pp @ (ei + tei)
        lhs = sum(int(ci) * b for ci, b in zip(c, w0)) % 2
        if lhs != _pair(u, ei, tei) % 2:
            bad.append(i)
    return bad


def make_class(L: LatticeInvolution, u, w0: Sequence[int]) -> RealLineBundleClass:
    u = check_form(L, u)
    w0 = tuple(int(b) % 2 for b in w0)
    k = L.fixed_basis.shape[1]
    if len(w0) != k:
        raise ValueError(f"w0 needs {k} values on the fixed sublattice basis")
    bad = _fiber_product_violations(L, u, w0)
    if bad:
        raise ValueError(
            "w0 disagrees with f_u on (1 + tau) e_i for i in " + ",".join(map(str, bad))
        )
    return RealLineBundleClass(L, u, w0)


def zero_class(L: LatticeInvolution) -> RealLineBundleClass:
    return RealLineBundleClass(L, zeros(L.n, L.n), (0,) * L.fixed_basis.shape[1])


def class_add(c1: RealLineBundleClass, c2: RealLineBundleClass) -> RealLineBundleClass:
    if not c1.L.same_as(c2.L):
        raise ValueError("classes live on different lattices")
    return make_class(c1.L, c1.u + c2.u, [(a + b) % 2 for a, b in zip(c1.w0, c2.w0)])


def class_scale(c: RealLineBundleClass, k: int) -> RealLineBundleClass:
    return make_class(c.L, k * c.u, [(k * b) % 2 for b in c.w0])


@dataclass(frozen=True, eq=False)
class SWFunction:
    """One mod-2 functional on the fixed sublattice per fixed component."""

    L: LatticeInvolution
    components: tuple
    table: dict

    def __getitem__(self, comp) -> tuple:
        if isinstance(comp, FixedComponentIndex):
            comp = comp.bits
        return self.table[tuple(comp)]

    def value(self, comp, lam) -> int:
        c = self.L.fixed_coords(lam)
        return sum(int(ci) * b for ci, b in zip(c, self[comp])) % 2


def sw_function(c: RealLineBundleClass) -> SWFunction:
    """``w([mu])(lam) = w0(lam) + u(2 mu, lam) mod 2``."""
    L = c.L
    comps = fixed_components(L)
    B = L.fixed_basis
    table = {}
    for comp in comps:
        m = as_int_vector(comp.m)
        shift = m @ c.u @ B if B.shape[1] else []
        table[comp.bits] = tuple((b + int(sh)) % 2 for b, sh in zip(c.w0, shift))
    return SWFunction(L, tuple(comps), table)


def class_from_real_character(L: LatticeInvolution, alpha: UCharacter) -> RealLineBundleClass:
    if not is_real_ucharacter(alpha, L):
        raise ValueError("character is not Real for this involution")
    w0 = []
    for k in range(L.fixed_basis.shape[1]):
        q = eval_ucharacter(alpha, L.fixed_basis[:, k])
        if q not in (0, 1):
            raise AssertionError("Real character is not +-1 on a fixed vector")
        w0.append(int(q))
    # conjugation does not change a sign
    return make_class(L, alpha.form, w0)


# --- random generators ----------------------------------------------------------


def random_unimodular(n: int, rng: np.random.Generator, steps: Optional[int] = None) -> np.ndarray:
    """Product of random elementary matrices with small multipliers."""
    M = identity(n)
    if n < 2:
        return M if rng.integers(2) else -M
    for _ in range(steps if steps is not None else 2 * n):
        i, j = rng.choice(n, size=2, replace=False)
        k = int(rng.choice((-2, -1, 1, 2)))
        M[i, :] = M[i, :] + k * M[j, :]
    return M


def random_involution(
    n: int, rng: np.random.Generator, bound: Optional[int] = 4, tries: int = 200
) -> LatticeInvolution:
    """Conjugate of a random block form ``(+1)^p (-1)^q swap^s`` by a unimodular matrix.

    With ``bound`` set, conjugates whose entries exceed it are resampled; the
    block form itself is the fallback.
    """
    s = int(rng.integers(0, n // 2 + 1))
    p = int(rng.integers(0, n - 2 * s + 1))
    D = zeros(n, n)
    for i in range(p):
        D[i, i] = 1
    for i in range(p, n - 2 * s):
        D[i, i] = -1
    for j in range(s):
        i = n - 2 * s + 2 * j
        D[i, i + 1] = D[i + 1, i] = 1
    for _ in range(tries):
        P = random_unimodular(n, rng, int(rng.integers(0, 2 * n + 1)))
        T = P @ D @ unimodular_inverse(P)
        if bound is None or all(abs(int(x)) <= bound for x in T.flat):
            return LatticeInvolution(T)
    return LatticeInvolution(D)


def anti_invariant_forms(L: LatticeInvolution) -> list[np.ndarray]:
    """Integer basis of the alternating forms ``u`` with ``tau^T u tau = -u``."""
    n = L.n
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if not pairs:
        return []
    rows = []
    t = L.tau
    for a in range(n):
        for b in range(a + 1, n):
            # entry (a, b) of tau^T u tau + u as a linear function of u's upper triangle
            row = []
            for i, j in pairs:
                coef = int(t[i, a]) * int(t[j, b]) - int(t[j, a]) * int(t[i, b])
                coef += 1 if (i, j) == (a, b) else 0
                row.append(coef)
            rows.append(row)
    K = integer_kernel(rows)
    out = []
    for c in range(K.shape[1]):
        u = zeros(n, n)
        for (i, j), x in zip(pairs, K[:, c]):
            u[i, j], u[j, i] = int(x), -int(x)
        out.append(u)
    return out


def random_anti_invariant_form(
    L: LatticeInvolution, rng: np.random.Generator, bound: int = 4, tries: int = 50
) -> np.ndarray:
    """Random small combination of ``anti_invariant_forms`` with entries in ``[-bound, bound]``."""
    basis = anti_invariant_forms(L)
    zero = zeros(L.n, L.n)
    for _ in range(tries):
        u = zero.copy()
        for b in basis:
            u = u + int(rng.integers(-1, 2)) * b
        if all(abs(int(x)) <= bound for x in u.flat):
            return u
    return zero
