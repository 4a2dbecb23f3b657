"""Floating-point holonomy oracle for the flat-curvature connection ``A_u``.

The connection form is ``-pi i u(v, dv)`` on ``V = R^n``, so parallel
transport along ``v0 + t w`` solves ``z' = pi i u(v0 + t w, w) z``.  Closed
forms exist for everything here; the ODE and quadrature paths are independent
numerical checks of them.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .real_torus import UCharacter, check_form, eval_ucharacter

__all__ = [
    "ConnectionAu",
    "FactorOfAutomorphy",
    "ComplexTorusData",
    "ODE_STEPS",
    "segment_holonomy",
    "loop_holonomy",
    "loop_holonomy_ode",
    "loop_holonomy_ode_batch",
    "segment_holonomy_batch",
    "check_cocycle",
    "triangle_identity",
    "triangle_flux",
    "canonical_factor",
    "holonomy_formula_check",
    "polygon_transport",
    "character_value",
]

ODE_STEPS = 10_000


def _steps_for(w, steps: int) -> int:
    """``steps`` per unit of Euclidean segment length, at least ``steps``."""
    return steps * max(1, math.ceil(float(np.linalg.norm(np.asarray(w, float)))))


def character_value(alpha: UCharacter, lam) -> complex:
    return cmath.exp(1j * math.pi * float(eval_ucharacter(alpha, lam)))


@dataclass(frozen=True, eq=False)
class ConnectionAu:
    u: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", check_form(None, self.u))

    @property
    def uf(self) -> np.ndarray:
        return self.u.astype(float)

    def pair(self, x, y) -> float:
        return float(np.asarray(x, float) @ self.uf @ np.asarray(y, float))


@dataclass(frozen=True, eq=False)
class FactorOfAutomorphy:
    """``e_lam(v) = a(lam) exp(pi i u(lam, v))``."""

    u: np.ndarray
    a: Union[UCharacter, Callable]

    def __post_init__(self):
        object.__setattr__(self, "u", check_form(None, self.u))

    def a_value(self, lam) -> complex:
        if isinstance(self.a, UCharacter):
            return character_value(self.a, lam)
        return complex(self.a(lam))

    def __call__(self, lam, v) -> complex:
        uf = np.asarray(self.u, dtype=float)
        return self.a_value(lam) * cmath.exp(1j * math.pi * float(np.asarray(lam, float) @ uf @ np.asarray(v, float)))


def _rk4_segment(uf: np.ndarray, v0, w, steps: int) -> complex:
    v0 = np.asarray(v0, float)
    w = np.asarray(w, float)
    a = float(v0 @ uf @ w)
    b = float(w @ uf @ w)  # zero for alternating u, kept for generality
    h = 1.0 / steps
    z = 1.0 + 0.0j
    for k in range(steps):
        t = k * h
        f = lambda tt, zz: 1j * math.pi * (a + tt * b) * zz
        k1 = f(t, z)
        k2 = f(t + h / 2, z + h / 2 * k1)
        k3 = f(t + h / 2, z + h / 2 * k2)
        k4 = f(t + h, z + h * k3)
        z = z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return z


def _rk4_batch(coef: np.ndarray, steps: int) -> np.ndarray:
    """RK4 for ``z' = pi i c z`` with constant ``c`` per entry of ``coef``."""
    coef = np.asarray(coef, float)
    h = 1.0 / steps
    z = np.ones_like(coef, dtype=complex)
    lam = 1j * math.pi * coef
    for _ in range(steps):
        k1 = lam * z
        k2 = lam * (z + h / 2 * k1)
        k3 = lam * (z + h / 2 * k2)
        k4 = lam * (z + h * k3)
        z = z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return z


def segment_holonomy(c: ConnectionAu, v0, w, mode: str = "closed-form", steps: int = ODE_STEPS) -> complex:
    """Transport from ``v0`` to ``v0 + w`` along the straight segment."""
    if mode == "closed-form":
        return cmath.exp(1j * math.pi * c.pair(v0, w))
    if mode == "ode":
        return _rk4_segment(c.uf, v0, w, _steps_for(w, steps))
    raise ValueError(f"unknown mode {mode!r}")


def segment_holonomy_batch(u, v0s: np.ndarray, ws: np.ndarray, steps: int = ODE_STEPS) -> np.ndarray:
    """Vectorised ODE transport for many segments at once."""
    uf = np.asarray(u, float)
    ws = np.asarray(ws, float)
    coef = np.einsum("bi,ij,bj->b", np.asarray(v0s, float), uf, ws)
    n = max((_steps_for(w, steps) for w in ws), default=steps)
    return _rk4_batch(coef, n)


def loop_holonomy(f: FactorOfAutomorphy, mu, lam) -> complex:
    """Holonomy along the image of ``mu -> mu + lam``: ``conj(a_lam) e^{pi i u(2 mu, lam)}``."""
    uf = np.asarray(f.u, float)
    two_mu = 2 * np.asarray([float(x) for x in mu])
    return f.a_value(lam).conjugate() * cmath.exp(1j * math.pi * float(two_mu @ uf @ np.asarray(lam, float)))


def loop_holonomy_ode(f: FactorOfAutomorphy, mu, lam, steps: int = ODE_STEPS) -> complex:
    """Transport along the segment followed by gluing with ``e_lam(mu)^{-1}``."""
    c = ConnectionAu(f.u)
    mu = [float(x) for x in mu]
    h = segment_holonomy(c, mu, lam, mode="ode", steps=steps)
    return h / f(lam, mu)


def loop_holonomy_ode_batch(f_list: Sequence[FactorOfAutomorphy], mus, lams, steps: int = ODE_STEPS) -> np.ndarray:
    """``loop_holonomy_ode`` for many loops, integrating all segments together."""
    coefs = []
    glue = []
    n = steps
    for f, mu, lam in zip(f_list, mus, lams):
        n = max(n, _steps_for(lam, steps))
        mu = np.asarray([float(x) for x in mu])
        lam = np.asarray(lam, float)
        coefs.append(float(mu @ np.asarray(f.u, float) @ lam))
        glue.append(f(lam, mu))
    return _rk4_batch(np.asarray(coefs), n) / np.asarray(glue)


def check_cocycle(f: FactorOfAutomorphy, trials: int = 20, seed: int = 0, tol: float = 1e-10) -> bool:
    """``e_{lam'}(v + lam) e_lam(v) = e_{lam + lam'}(v)`` at random points."""
    rng = np.random.default_rng(seed)
    n = f.u.shape[0]
    for _ in range(trials):
        v = rng.uniform(-1, 1, n)
        lam = rng.integers(-3, 4, n)
        lam2 = rng.integers(-3, 4, n)
        lhs = f(lam2, v + lam) * f(lam, v)
        rhs = f(lam + lam2, v)
        if abs(lhs - rhs) > tol:
            return False
    return True


def triangle_flux(u, lam, lam2, grid: int = 100) -> complex:
    """Midpoint quadrature of the curvature ``-2 pi i u`` over the triangle ``0, lam, lam + lam2``.

    The cap ``C(s, t) = s((1 - t) lam + t (lam + lam2))`` has
    ``C_s x C_t = s u(lam, lam2)``-weighted area element.
    """
    uf = np.asarray(u, float)
    lam = np.asarray(lam, float)
    lam2 = np.asarray(lam2, float)
    s = (np.arange(grid) + 0.5) / grid
    t = (np.arange(grid) + 0.5) / grid
    S, T = np.meshgrid(s, t, indexing="ij")
    # dC/ds = (1-t) lam + t (lam + lam2), dC/dt = s lam2
    ds = (1 - T)[..., None] * lam + T[..., None] * (lam + lam2)
    dt = S[..., None] * lam2
    integrand = np.einsum("abi,ij,abj->ab", ds, uf, dt)
    return -2j * math.pi * float(integrand.sum()) / grid**2


def triangle_identity(alpha: Union[UCharacter, Callable], u, lam, lam2, grid: int = 100) -> float:
    """``|a_{lam+lam'}^{-1} a_{lam'} a_lam - e^{pi i u(lam, lam')}|``.

    The target phase is also cross-checked against the numerical flux through
    the triangle (which is ``-pi i u(lam, lam')``); a mismatch raises.
    """
    u = check_form(None, u)
    lam = np.asarray(lam)
    lam2 = np.asarray(lam2)
    if isinstance(alpha, UCharacter):
        a = lambda x: character_value(alpha, x)
    else:
        a = alpha
    exact = cmath.exp(1j * math.pi * float(lam @ u.astype(float) @ lam2))
    flux = triangle_flux(u, lam, lam2, grid)
    if abs(cmath.exp(-flux) - exact) > 1e-8:
        raise AssertionError("triangle flux disagrees with the closed form")
    lhs = a(lam) * a(lam2) / a(lam + lam2)
    return abs(lhs - exact)


@dataclass(frozen=True, eq=False)
class ComplexTorusData:
    J: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        J = np.asarray(self.J, float)
        u = check_form(None, self.u)
        n = J.shape[0]
        if J.shape != (n, n) or u.shape != (n, n):
            raise ValueError("J and u must be square of equal size")
        if not np.allclose(J @ J, -np.eye(n), atol=1e-12):
            raise ValueError("J is not a complex structure (J^2 != -1)")
        uf = u.astype(float)
        if not np.allclose(J.T @ uf @ J, uf, atol=1e-12):
            raise ValueError("u is not J-invariant, so H_u is not Hermitian")
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "u", u)

    def H(self, v, w) -> complex:
        uf = self.u.astype(float)
        v = np.asarray(v, float)
        w = np.asarray(w, float)
        return float(v @ uf @ (self.J @ w)) + 1j * float(v @ uf @ w)


@dataclass(frozen=True, eq=False)
class CanonicalFactors:
    data: ComplexTorusData
    a: UCharacter

    def holomorphic(self, lam, v) -> complex:
        """``a_lam exp(pi (H(lam, v) + H(lam, lam) / 2))``."""
        d = self.data
        return character_value(self.a, lam) * cmath.exp(math.pi * (d.H(lam, v) + 0.5 * d.H(lam, lam)))

    def unitary(self, lam, v) -> complex:
        """``a_lam exp(pi i u(lam, v))``."""
        return FactorOfAutomorphy(self.data.u, self.a)(lam, v)

    def gauge(self, v) -> complex:
        return cmath.exp(0.5 * math.pi * self.data.H(v, v))

    def gauge_residual(self, trials: int = 20, seed: int = 0) -> float:
        rng = np.random.default_rng(seed)
        n = self.data.u.shape[0]
        worst = 0.0
        for _ in range(trials):
            v = rng.uniform(-0.5, 0.5, n)
            lam = rng.integers(-1, 2, n)
            lhs = self.holomorphic(lam, v)
            rhs = self.gauge(v + lam) / self.gauge(v) * self.unitary(lam, v)
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
        return worst

    def cocycle_residual(self, trials: int = 20, seed: int = 0) -> float:
        rng = np.random.default_rng(seed)
        n = self.data.u.shape[0]
        worst = 0.0
        for _ in range(trials):
            v = rng.uniform(-0.5, 0.5, n)
            lam = rng.integers(-1, 2, n)
            lam2 = rng.integers(-1, 2, n)
            lhs = self.holomorphic(lam2, v + lam) * self.holomorphic(lam, v)
            rhs = self.holomorphic(lam + lam2, v)
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
        return worst


def canonical_factor(d: ComplexTorusData, a: UCharacter) -> CanonicalFactors:
    ua = check_form(None, a.form)
    if ua.shape != d.u.shape or any(ua[i] != d.u[i] for i in np.ndindex(ua.shape)):
        raise ValueError("character is twisted by a different form")
    return CanonicalFactors(d, a)


def polygon_transport(c: ConnectionAu, vertices: Sequence, steps: int = ODE_STEPS) -> complex:
    """ODE transport around the closed polygon through ``vertices``."""
    pts = [np.asarray(v, float) for v in vertices]
    z = 1.0 + 0.0j
    for p, q in zip(pts, pts[1:] + pts[:1]):
        if np.allclose(p, q):
            continue
        z *= segment_holonomy(c, p, q - p, mode="ode", steps=steps)
    return z


def _loop_point(pts: list, s: float) -> np.ndarray:
    """Point at parameter ``s`` in ``[0, 1]`` on the closed polygon, one unit per edge."""
    m = len(pts)
    x = s * m
    k = min(int(math.floor(x)), m - 1)
    f = x - k
    return (1 - f) * pts[k] + f * pts[(k + 1) % m]


def holonomy_formula_check(
    c: ConnectionAu,
    loop: Sequence,
    cap: Union[Callable, None] = None,
    grid: int = 200,
    steps: int = ODE_STEPS,
) -> float:
    """``|transport around loop - exp(flux through cap)|``.

    ``loop`` is a list of polygon vertices.  ``cap(s, t)`` must agree with the
    loop on ``t = 1``, collapse to a point on ``t = 0`` and match along the
    seam ``s = 0`` / ``s = 1``; the default is the cone ``t * loop(s)`` from
    the origin.  The flux is
    ``iint -2 pi i u(dC/ds, dC/dt) ds dt`` by midpoint quadrature with
    central differences.
    """
    pts = [np.asarray(v, float) for v in loop]
    if cap is None:
        base = pts[0] * 0.0
        cap = lambda s, t: base + t * (_loop_point(pts, s) - base)
    m = len(pts)
    # boundary conditions of the cap
    for s in np.linspace(0, 1, 4 * m + 1):
        if np.linalg.norm(cap(s, 1.0) - _loop_point(pts, s)) > 1e-9:
            raise ValueError("cap does not restrict to the loop on its top edge")
    corner = cap(0.0, 0.0)
    for x in np.linspace(0, 1, 9):
        if np.linalg.norm(cap(x, 0.0) - corner) > 1e-9:
            raise ValueError("cap does not collapse to a point on its bottom edge")
        if np.linalg.norm(cap(0.0, x) - cap(1.0, x)) > 1e-9:
            raise ValueError("cap sides do not match along the seam")
    uf = c.uf
    # align the s-grid with polygon vertices so each cell sits on one edge
    per = max(1, grid // m)
    ns = per * m
    hs, ht = 1.0 / ns, 1.0 / grid
    eps = 1e-6
    total = 0.0
    for i in range(ns):
        s = (i + 0.5) * hs
        for j in range(grid):
            t = (j + 0.5) * ht
            ds = (cap(min(s + eps * hs, 1.0), t) - cap(max(s - eps * hs, 0.0), t)) / (2 * eps * hs)
            dt = (cap(s, t + eps * ht) - cap(s, t - eps * ht)) / (2 * eps * ht)
            total += float(ds @ uf @ dt)
    flux = -2j * math.pi * total * hs * ht
    transport = polygon_transport(c, pts, steps)
    return abs(transport - cmath.exp(flux))
