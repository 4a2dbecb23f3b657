"""Property batteries run by ``realtheta verify``.

Each suite returns a list of ``Check`` records; a suite passes when every
check does.  All randomness flows from the caller's seed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .exact_linalg import identity, smith_normal_form, tate_h1, tate_h2
from .holonomy import (
    ODE_STEPS,
    FactorOfAutomorphy,
    _rk4_batch,
    loop_holonomy,
    loop_holonomy_ode_batch,
)
from .klein_surface import (
    KleinType,
    check_circle_generation,
    component_count_formulas,
    pic_torus,
    valid_types,
    validate_curve_class,
)
from .orientability import symmetric_power_report
from .real_torus import (
    class_from_real_character,
    comessatti_basis,
    fixed_components,
    make_class,
    obstruction_class,
    random_anti_invariant_form,
    random_involution,
    real_character_from_data,
    real_ucharacter_components,
    sw_function,
)
from .sw_localization import codim_one_formula, codim_one_parity_check
from .klein_surface import build_surface_basis
from .theta_forms import all_refinements, is_real_refinement, real_locus_value, realizable_boundary_data

__all__ = ["Check", "SUITES", "run_suite"]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str
    provenance: str


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def obstruction_suite(seed: int, trials: int = 1000) -> list[Check]:
    rng = _rng(seed)
    failures = 0
    for _ in range(trials):
        n = int(rng.integers(1, 9))
        L = random_involution(n, rng)
        u = random_anti_invariant_form(L, rng, bound=4)
        if any(obstruction_class(L, u)):
            failures += 1
    return [
        Check(
            "obstruction class vanishes",
            failures == 0,
            f"{trials - failures}/{trials} random (tau, u), rank <= 8",
            "real-character-existence",
        )
    ]


def comessatti_suite(seed: int, trials: int = 300) -> list[Check]:
    rng = _rng(seed)
    bad_rel = bad_rank = bad_count = 0
    for _ in range(trials):
        n = int(rng.integers(1, 9))
        L = random_involution(n, rng)
        cb = comessatti_basis(L)
        if not cb.verify(L):
            bad_rel += 1
        if tate_h1(L.tau).rank != n - cb.a - cb.s or tate_h2(L.tau).rank != cb.a - cb.s:
            bad_rank += 1
        u = random_anti_invariant_form(L, rng, bound=4)
        count, reps = real_ucharacter_components(L, u)
        classes = {class_from_real_character(L, a).key() for a in reps}
        if count != 2 ** (cb.a - cb.s) or len(classes) != count:
            bad_count += 1
    return [
        Check("normal form relations", bad_rel == 0, f"{trials - bad_rel}/{trials}", "comessatti-normal-form"),
        Check("tate ranks n-a-s and a-s", bad_rank == 0, f"{trials - bad_rank}/{trials}", "tate-cohomology"),
        Check("2^(a-s) distinct Real character classes", bad_count == 0, f"{trials - bad_count}/{trials}", "real-character-count"),
    ]


def bridge_suite(seed: int, trials: int = 500, max_rank: int = 6) -> list[Check]:
    """Exact Stiefel-Whitney values against ODE loop holonomy."""
    rng = _rng(seed)
    factors, mus, lams, exact, closed = [], [], [], [], []
    closed_gap = 0.0
    while len(factors) < trials:
        n = int(rng.integers(1, max_rank + 1))
        L = random_involution(n, rng)
        B = L.fixed_basis
        if B.shape[1] == 0:
            continue
        u = random_anti_invariant_form(L, rng, bound=4)
        cb = comessatti_basis(L)
        signs = [int(x) for x in rng.integers(0, 2, cb.a - cb.s)]
        free = [Fraction(int(x), 12) for x in rng.integers(0, 24, n - cb.a)]
        alpha = real_character_from_data(L, u, signs, free, cb=cb)
        sw = sw_function(class_from_real_character(L, alpha))
        comps = fixed_components(L)
        comp = comps[int(rng.integers(len(comps)))]
        coeffs = rng.integers(-1, 2, B.shape[1])
        lam = B @ np.array([int(c) for c in coeffs], dtype=object)
        # move inside the component along the fixed directions
        t = B.astype(float) @ rng.uniform(-0.5, 0.5, B.shape[1])
        mu = np.array([float(x) / 2 for x in comp.m]) + t
        f = FactorOfAutomorphy(u, alpha)
        factors.append(f)
        mus.append(mu)
        lams.append([int(x) for x in lam])
        val = sw.value(comp, lam)
        exact.append(cmath.exp(1j * math.pi * val))
        closed.append(loop_holonomy(f, mu, lam))
        closed_gap = max(closed_gap, abs(closed[-1] - exact[-1]))
    ode = loop_holonomy_ode_batch(factors, mus, lams)
    gap = float(np.max(np.abs(ode - np.asarray(exact))))
    unit = float(np.max(np.abs(np.abs(ode) - 1)))
    ode_closed = float(np.max(np.abs(ode - np.asarray(closed))))
    # ODE against closed form on plain segments
    u_rng = _rng(seed + 1)
    segs_c, us = [], []
    for _ in range(1000):
        n = 2 * int(u_rng.integers(1, 4))
        v = u_rng.integers(-4, 5, (n, n))
        um = np.triu(v, 1) - np.triu(v, 1).T
        v0 = u_rng.uniform(-1, 1, n)
        w = u_rng.uniform(-1, 1, n)
        segs_c.append(float(v0 @ um @ w))
        us.append(cmath.exp(1j * math.pi * segs_c[-1]))
    seg = _rk4_batch(np.asarray(segs_c), ODE_STEPS)
    seg_gap = float(np.max(np.abs(seg - np.asarray(us))))
    return [
        Check("exact sw value = closed-form loop holonomy", closed_gap < 1e-10, f"max gap {closed_gap:.2e}", "holonomy-read-off"),
        Check("exact sw value = ODE loop holonomy", gap < 1e-6, f"max gap {gap:.2e} over {trials} loops", "holonomy-read-off"),
        Check("ODE loop holonomy = closed form", ode_closed < 1e-8, f"max gap {ode_closed:.2e}", "holonomy-read-off"),
        Check("ODE holonomy has modulus 1", unit < 1e-10, f"max deviation {unit:.2e}", "flat-connection"),
        Check("ODE segment transport = closed form", seg_gap < 1e-8, f"max gap {seg_gap:.2e} over 1000 segments", "segment-transport"),
    ]


def symmetric_power_suite(seed: int) -> list[Check]:
    t = KleinType(1, 2, 0)
    out = []
    for d in range(2, 10):
        rep = symmetric_power_report(t, d).by_label()
        expected = {"T0": False, "T1": d % 2 == 0}
        out.append(Check(f"d={d}", rep == expected, str(rep), "symmetric-power-orientability"))
    return out


def components_suite(seed: int, max_g: int = 6) -> list[Check]:
    bad = []
    gen_bad = []
    for t in valid_types(max_g):
        a, b = component_count_formulas(t)
        if not (a == b == len(pic_torus(t).components)):
            bad.append(str(t))
        if not all(check_circle_generation(t).values()):
            gen_bad.append(str(t))
    return [
        Check("component count 2^(r-1) = tate count", not bad, ",".join(bad) or f"all types g <= {max_g}", "picard-components"),
        Check("circle classes generate fixed homology mod norms", not gen_bad, ",".join(gen_bad) or f"all types g <= {max_g}", "circle-generation"),
    ]


def theta_suite(seed: int, max_g: int = 4) -> list[Check]:
    out = []
    for t in valid_types(max_g):
        if t.g == 0:
            continue
        data = realizable_boundary_data(t)
        parity = {w for w in data if sum(w) % 2 == (t.g - 1) % 2}
        literal = set(data) == parity and set(data.values()) == {2 ** (2 * t.g - t.r + 1)}
        real = realizable_boundary_data(t, real_only=True)
        real_ok = (
            len(real) == 2 ** (t.r - 1)
            and all(sum(w) % 2 == (t.g - 1) % 2 for w in real)
            and set(real.values()) == {2**t.g}
        )
        S = build_surface_basis(t)
        locus_all = locus_real = True
        for q in all_refinements(t.g):
            ok = real_locus_value(t, q) == t.s % 2
            locus_all &= ok
            if is_real_refinement(q, S.iota_star):
                locus_real &= ok
        out.append(Check(f"{t} all refinements: parity set, uniform multiplicity", literal, f"{len(data)} vectors", "theta-realizability"))
        out.append(Check(f"{t} all refinements: q(real locus) = s", locus_all, "", "theta-realizability"))
        out.append(Check(f"{t} Real refinements: parity set, 2^g each", real_ok, f"{len(real)} vectors", "theta-realizability"))
        out.append(Check(f"{t} Real refinements: q(real locus) = s", locus_real, "", "theta-realizability"))
    return out


def localization_suite(seed: int, trials: int = 500) -> list[Check]:
    sym = all(a == b for a, b in (codim_one_formula(r) for r in range(1, 7)))
    rng = _rng(seed)
    bad = 0
    types = valid_types(5)
    for _ in range(trials):
        t = types[int(rng.integers(len(types)))]
        w = [int(x) for x in rng.integers(0, 2, t.r)]
        d = int(rng.integers(-10, 11))
        if sum(w) % 2 != d % 2:
            d += 1
        if not codim_one_parity_check(validate_curve_class(t, d, w)):
            bad += 1
    return [
        Check("codimension-one formula, ranks 1..6", sym, "coefficient-level", "localization-formula"),
        Check("rank-one pairing = degree parity", bad == 0, f"{trials - bad}/{trials}", "localization-formula"),
    ]


def round_trip_suite(seed: int, trials: int = 200) -> list[Check]:
    rng = _rng(seed)
    bad_w = bad_reject = bad_closure = 0
    for _ in range(trials):
        n = int(rng.integers(1, 7))
        L = random_involution(n, rng)
        u = random_anti_invariant_form(L, rng, bound=4)
        _, reps = real_ucharacter_components(L, u)
        B = L.fixed_basis
        for alpha in reps:
            c = class_from_real_character(L, alpha)
            sw = sw_function(c)
            for k in range(B.shape[1]):
                # conj(a_lam) = a_lam for lam fixed; angle 0 or 1
                if sw[sw.components[0]][k] != int(alpha(B[:, k])):
                    bad_w += 1
            comps = sw.components
            for c1 in comps:
                for c2 in comps:
                    m = [x + y for x, y in zip(c1.m, c2.m)]
                    c3 = next(c for c in comps if c.bits == L.h1.reduce(m))
                    tot = [
                        (a + b + x + y) % 2
                        for a, b, x, y in zip(sw[c1], sw[c2], sw[c3], sw[comps[0]])
                    ]
                    if any(tot):
                        bad_closure += 1
        # make_class accepts exactly the pairs satisfying the fiber condition
        k = B.shape[1]
        for bits in _all_bits(k, cap=16, rng=rng):
            expected = _satisfies(L, u, bits)
            try:
                make_class(L, u, bits)
                accepted = True
            except ValueError:
                accepted = False
            if accepted != expected:
                bad_reject += 1
    return [
        Check("w(0)(lam) = a_lam on fixed vectors", bad_w == 0, f"{bad_w} mismatches", "real-character-read-off"),
        Check("make_class rejects exactly fiber-product violations", bad_reject == 0, f"{bad_reject} mismatches", "fiber-product"),
        Check("difference formula closure", bad_closure == 0, f"{bad_closure} mismatches", "difference-formula"),
    ]


def _all_bits(k: int, cap: int, rng: np.random.Generator):
    if 2**k <= cap:
        from itertools import product

        return [list(b) for b in product((0, 1), repeat=k)]
    return [list(int(x) for x in rng.integers(0, 2, k)) for _ in range(cap)]


def _satisfies(L, u, bits) -> bool:
    """Independent check of ``w0 = f_u`` on all of ``(1 + tau) Lambda`` via its SNF basis."""
    I = identity(L.n)
    N = I + L.tau
    snf = smith_normal_form(N)
    # columns of N V span the image; nonzero ones form a basis
    img = N @ snf.V
    for j in range(L.n):
        v = img[:, j]
        if not any(v):
            continue
        lam = snf.V[:, j]
        c = L.fixed_coords(v)
        lhs = sum(int(ci) * b for ci, b in zip(c, bits)) % 2
        rhs = int(lam @ u @ (L.tau @ lam)) % 2
        if lhs != rhs:
            return False
    return True


SUITES: dict[str, Callable[[int], list[Check]]] = {
    "obstruction": obstruction_suite,
    "comessatti": comessatti_suite,
    "holonomy-bridge": bridge_suite,
    "symmetric-power-table": symmetric_power_suite,
    "components": components_suite,
    "theta-realizability": theta_suite,
    "localization": localization_suite,
    "round-trips": round_trip_suite,
}


def run_suite(name: str, seed: int) -> list[Check]:
    if name == "all":
        out = []
        for key, fn in SUITES.items():
            out.extend(Check(f"{key}: {c.name}", c.passed, c.detail, c.provenance) for c in fn(seed))
        return out
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](seed)
