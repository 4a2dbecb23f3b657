from __future__ import annotations

from itertools import product

import pytest

from realtheta.klein_surface import KleinType, build_surface_basis, pic_torus, valid_types
from realtheta.real_torus import sw_function
from realtheta.theta_forms import (
    QuadraticRefinement,
    all_refinements,
    arf,
    change_basis,
    class_from_boundary,
    eval_q,
    intersection_mod2,
    is_real_refinement,
    p0_boundary,
    real_locus_value,
    realizable_boundary_data,
    theta_class_from_q,
    theta_class_p0,
    transvection,
)


@pytest.mark.parametrize("g", [1, 2, 3])
def test_quadratic_relation(g):
    vecs = list(product((0, 1), repeat=2 * g))
    for q in list(all_refinements(g))[:8]:
        for x in vecs[:16]:
            for y in vecs[::3]:
                s = [(a + b) % 2 for a, b in zip(x, y)]
                assert eval_q(q, s) == (eval_q(q, x) + eval_q(q, y) + intersection_mod2(x, y, g)) % 2


@pytest.mark.parametrize("g", [1, 2, 3, 4])
def test_arf_census(g):
    even = sum(1 for q in all_refinements(g) if arf(q) == 0)
    assert even == 2 ** (g - 1) * (2**g + 1)


def test_arf_is_invariant_under_transvections():
    g = 2
    basis = [[1 if i == j else 0 for i in range(2 * g)] for j in range(2 * g)]
    for x in product((0, 1), repeat=2 * g):
        new = [transvection(x, e, g) for e in basis]
        for q in all_refinements(g):
            assert arf(change_basis(q, new)) == arf(q)


def test_arf_counts_zeros():
    # q is even exactly when it has 2^{g-1}(2^g + 1) zeros
    g = 2
    vecs = list(product((0, 1), repeat=2 * g))
    for q in all_refinements(g):
        zeros = sum(1 for v in vecs if eval_q(q, v) == 0)
        assert zeros == (2 ** (g - 1) * (2**g + 1) if arf(q) == 0 else 2 ** (g - 1) * (2**g - 1))


def test_refinement_validates_length():
    with pytest.raises(ValueError):
        QuadraticRefinement(2, (0, 1, 0))


def test_real_refinements_realize_parity_set():
    for t in valid_types(4):
        if t.g == 0:
            continue
        data = realizable_boundary_data(t, real_only=True)
        assert sum(data.values()) == 2 ** (t.g + t.r - 1)
        assert all(sum(w) % 2 == (t.g - 1) % 2 for w in data)
        assert len(data) == 2 ** (t.r - 1)
        assert set(data.values()) == {2**t.g}


def test_real_refinements_on_real_locus():
    for t in valid_types(4):
        S = build_surface_basis(t)
        for q in all_refinements(t.g):
            if is_real_refinement(q, S.iota_star):
                assert real_locus_value(t, q) == t.s % 2


def test_every_real_refinement_gives_a_class():
    for t in valid_types(3):
        if t.g == 0:
            continue
        p = pic_torus(t)
        for q in all_refinements(t.g):
            if is_real_refinement(q, p.surface.iota_star):
                theta_class_from_q(p, q)


def test_p0_boundary_values():
    assert p0_boundary(KleinType(1, 2, 0), 1) == (1, 1)
    assert p0_boundary(KleinType(2, 3, 0), 2) == (1, 0, 1)
    with pytest.raises(ValueError):
        p0_boundary(KleinType(1, 2, 0), 3)


def test_theta_class_on_two_circle_torus():
    p = pic_torus(KleinType(1, 2, 0))
    sw = sw_function(theta_class_p0(p, 1))
    table = {c.label: sw.value(c, p.circle_dual(0)) for c in sw.components}
    assert table == {"T0": 1, "T1": 0}


def test_incompatible_boundary_rejected():
    # (1,1,1): the circle dual meets the norm lattice, so its value is forced
    p = pic_torus(KleinType(1, 1, 1))
    ok = []
    for v in (0, 1):
        try:
            class_from_boundary(p, [v])
            ok.append(v)
        except ValueError:
            pass
    assert len(ok) == 1


def test_character_from_refinement():
    from realtheta.theta_forms import chi_from_q

    p = pic_torus(KleinType(1, 2, 0))
    trivial = chi_from_q(p, QuadraticRefinement(1, (0, 0)))
    assert trivial([1, 0]) == 0
    # the lattice vector whose Poincare dual is a_1
    chi = chi_from_q(p, QuadraticRefinement(1, (1, 0)))
    lam = [0, 1]
    assert [int(x) for x in p.poincare_dual(lam)] == [1, 0]
    assert chi(lam) == 1


def test_character_law_for_refinements(rng):
    from realtheta.theta_forms import chi_from_q

    p = pic_torus(KleinType(2, 3, 0))
    u = p.u_C
    for q in list(all_refinements(2))[::3]:
        chi = chi_from_q(p, q)
        for _ in range(10):
            x = [int(v) for v in rng.integers(-3, 4, 4)]
            y = [int(v) for v in rng.integers(-3, 4, 4)]
            s = [a + b for a, b in zip(x, y)]
            cross = sum(x[i] * int(u[i, j]) * y[j] for i in range(4) for j in range(4))
            assert (chi(s) - chi(x) - chi(y) - cross) % 2 == 0
