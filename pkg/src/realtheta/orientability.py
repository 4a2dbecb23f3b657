"""Orientability of real loci of projective Quot bundles over ``Pic^d``.

A component over ``T`` is orientable exactly when the fiber rank
``(e0 + r0 d) + r0 (1 - g)`` is even and the determinant-index bundle has
trivial ``w_1`` on ``T``.  Components of ``Pic^d`` are indexed through the
translation by ``O(d p0)`` to ``Pic^0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .klein_surface import KleinType, PicTorusData, pic_torus
from .real_torus import (
    FixedComponentIndex,
    RealLineBundleClass,
    class_add,
    class_scale,
    fixed_components,
    make_class,
    sw_function,
)
from .theta_forms import theta_class_p0

__all__ = [
    "QuotSetup",
    "ComponentOrientation",
    "OrientabilityReport",
    "stability_bound_check",
    "stability_failures",
    "det_ind_class",
    "det_ind_class_split",
    "shift_class",
    "orientability_report",
    "symmetric_power_report",
]


@dataclass(frozen=True)
class QuotSetup:
    t: KleinType
    r0: int
    e0: int
    mu_max: Fraction
    d: int
    p0_circle: int = 1
    detE0_component: tuple = ()  # bits of the Pic^0 component; empty means the base component

    def __post_init__(self):
        if self.r0 < 1:
            raise ValueError("rank r0 must be positive")
        if not 1 <= self.p0_circle <= self.t.r:
            raise ValueError(f"p0 circle index must be in 1..{self.t.r}")
        object.__setattr__(self, "mu_max", Fraction(self.mu_max))

    @property
    def mu(self) -> Fraction:
        return Fraction(self.e0, self.r0)

    @property
    def fiber_rank(self) -> int:
        return (self.e0 + self.r0 * self.d) + self.r0 * (1 - self.t.g)


def stability_failures(s: QuotSetup) -> list[str]:
    g, mu, r0 = s.t.g, s.mu, s.r0
    out = []
    b1 = max(-mu + 2 * (g - 1), s.mu_max * (r0 - 1) - mu * r0 + 2 * (g - 1))
    if not s.d > b1:
        out.append(f"d = {s.d} is not > {b1} (vanishing of h^1 on every fiber)")
    b2 = -mu + (g - 1) + Fraction(1, r0)
    if not s.d > b2:
        out.append(f"d = {s.d} is not > {b2} (projective bundle description)")
    return out


def stability_bound_check(s: QuotSetup) -> bool:
    return not stability_failures(s)


def _component(p: PicTorusData, bits) -> FixedComponentIndex:
    bits = tuple(bits)
    comps = fixed_components(p.base)
    if not bits:
        return comps[0]
    for c in comps:
        if c.bits == bits:
            return c
    raise ValueError(f"no fixed component with coordinates {bits}")


def shift_class(c: RealLineBundleClass, comp: FixedComponentIndex) -> RealLineBundleClass:
    """Same ``u``, with ``w0`` replaced by its value on component ``comp``."""
    return make_class(c.L, c.u, sw_function(c)[comp])


def det_ind_class(s: QuotSetup, p: Optional[PicTorusData] = None) -> RealLineBundleClass:
    p = p or pic_torus(s.t)
    theta = theta_class_p0(p, s.p0_circle)
    comp = _component(p, s.detE0_component)
    if not any(comp.bits):
        return class_scale(theta, s.r0)
    return class_add(class_scale(theta, s.r0 - 1), shift_class(theta, comp))


def det_ind_class_split(
    s: QuotSetup, parts: Sequence[Sequence[int]], p: Optional[PicTorusData] = None
) -> RealLineBundleClass:
    """Determinant class assembled from a filtration with rank-one pieces.

    ``parts`` lists the component coordinates of the normalised determinant
    of each piece; there must be ``r0`` of them.  Their sum must be the
    component of ``det E0``.
    """
    p = p or pic_torus(s.t)
    if len(parts) != s.r0:
        raise ValueError("need one component per rank-one piece")
    theta = theta_class_p0(p, s.p0_circle)
    total = class_scale(theta, 0)
    for bits in parts:
        total = class_add(total, shift_class(theta, _component(p, bits)))
    return total


@dataclass(frozen=True)
class ComponentOrientation:
    component: FixedComponentIndex
    fiber_rank: int
    w1_restriction: tuple
    w1_on_circles: tuple
    orientable: bool

    @property
    def label(self) -> str:
        return self.component.label


@dataclass(frozen=True)
class OrientabilityReport:
    setup: QuotSetup
    entries: tuple

    def by_label(self) -> dict:
        return {e.label: e.orientable for e in self.entries}


def orientability_report(s: QuotSetup, p: Optional[PicTorusData] = None) -> OrientabilityReport:
    bad = stability_failures(s)
    if bad:
        raise ValueError("degree below the stability bound: " + "; ".join(bad))
    p = p or pic_torus(s.t)
    sw = sw_function(det_ind_class(s, p))
    rank = s.fiber_rank
    entries = []
    for comp in sw.components:
        w1 = sw[comp]
        circles = tuple(sw.value(comp, p.circle_dual(i)) for i in range(s.t.r))
        ok = rank % 2 == 0 and not any(w1)
        entries.append(ComponentOrientation(comp, rank, w1, circles, ok))
    return OrientabilityReport(s, tuple(entries))


def symmetric_power_report(t: KleinType, d: int, p0_circle: int = 1) -> OrientabilityReport:
    """Real locus of the ``d``-th symmetric power, i.e. ``E0 = O``."""
    return orientability_report(QuotSetup(t, 1, 0, Fraction(0), d, p0_circle))
