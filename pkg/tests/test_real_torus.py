from __future__ import annotations

from fractions import Fraction

import numpy as np

import pytest

from realtheta.exact_linalg import identity, tate_h1, tate_h2
from realtheta.real_torus import (
    LatticeInvolution,
    UCharacter,
    check_form,
    class_add,
    class_from_real_character,
    class_scale,
    comessatti_basis,
    component_of,
    f_u,
    fixed_components,
    is_real_ucharacter,
    make_class,
    obstruction_class,
    random_anti_invariant_form,
    random_involution,
    real_character_from_data,
    real_ucharacter_components,
    sw_function,
    zero_class,
)

REFLECTION = LatticeInvolution([[1, 0], [0, -1]])
SYMPLECTIC = [[0, 1], [-1, 0]]


def test_comessatti_on_swap():
    L = LatticeInvolution([[0, 1], [1, 0]])
    cb = comessatti_basis(L)
    assert (cb.a, cb.s) == (1, 1)
    assert cb.verify(L)


def test_comessatti_on_reflection():
    cb = comessatti_basis(REFLECTION)
    assert (cb.a, cb.s) == (1, 0)


def test_comessatti_random(rng):
    for _ in range(60):
        n = int(rng.integers(1, 7))
        L = random_involution(n, rng)
        cb = comessatti_basis(L)
        assert cb.verify(L)
        assert tate_h1(L.tau).rank == n - cb.a - cb.s
        assert tate_h2(L.tau).rank == cb.a - cb.s


def test_random_involution_respects_bound(rng):
    for _ in range(40):
        L = random_involution(5, rng, bound=4)
        assert max(abs(int(x)) for x in L.tau.flat) <= 4


def test_check_form_rejects_invariant_forms():
    with pytest.raises(ValueError):
        check_form(LatticeInvolution(identity(2)), SYMPLECTIC)
    with pytest.raises(ValueError):
        check_form(None, [[1, 0], [0, 0]])


def test_fixed_components_of_reflection():
    comps = fixed_components(REFLECTION)
    assert [c.label for c in comps] == ["T0", "T1"]
    assert comps[1].mu == (Fraction(0), Fraction(1, 2))
    assert component_of(REFLECTION, [0, 3]).label == "T1"
    assert component_of(REFLECTION, [0, 2]).label == "T0"


def test_ucharacter_twist_rule():
    alpha = UCharacter(SYMPLECTIC, (Fraction(1, 3), Fraction(1, 2)))
    x, y = [1, 2], [-1, 1]
    lhs = alpha([a + b for a, b in zip(x, y)])
    rhs = (alpha(x) + alpha(y) + (x[0] * y[1] - x[1] * y[0])) % 2
    assert lhs == rhs


def test_obstruction_vanishes_on_random_pairs(rng):
    for _ in range(100):
        n = int(rng.integers(1, 7))
        L = random_involution(n, rng)
        u = random_anti_invariant_form(L, rng)
        assert not any(obstruction_class(L, u))


def test_real_character_from_data_is_real(rng):
    for _ in range(40):
        n = int(rng.integers(1, 6))
        L = random_involution(n, rng)
        u = random_anti_invariant_form(L, rng)
        cb = comessatti_basis(L)
        signs = [int(b) for b in rng.integers(0, 2, cb.a - cb.s)]
        free = [Fraction(int(x), 7) for x in rng.integers(0, 14, n - cb.a)]
        alpha = real_character_from_data(L, u, signs, free, cb=cb)
        assert is_real_ucharacter(alpha, L)


def test_component_count_of_real_characters(rng):
    for _ in range(30):
        n = int(rng.integers(1, 6))
        L = random_involution(n, rng)
        u = random_anti_invariant_form(L, rng)
        count, reps = real_ucharacter_components(L, u)
        classes = {class_from_real_character(L, a).key() for a in reps}
        assert len(classes) == count


def test_make_class_enforces_fiber_condition():
    L = LatticeInvolution([[0, 1], [1, 0]])
    # (1 + tau) e_1 = (1, 1) is twice nothing: f_u((1,1)) = u(e1, e2) mod 2
    u = [[0, 1], [-1, 0]]
    assert f_u(L, u, [1, 1]) == 1
    make_class(L, u, [1])
    with pytest.raises(ValueError):
        make_class(L, u, [0])


def test_difference_formula_on_reflection():
    c = make_class(REFLECTION, SYMPLECTIC, [1])
    sw = sw_function(c)
    assert sw[(0,)] == (1,)
    assert sw[(1,)] == (0,)


def test_group_operations():
    c = make_class(REFLECTION, SYMPLECTIC, [1])
    assert class_add(c, c) == class_scale(c, 2)
    assert class_scale(c, 2).key() == class_add(zero_class(REFLECTION), class_scale(c, 2)).key()
    assert class_scale(c, 0) == zero_class(REFLECTION)


def test_sw_function_agrees_with_character_sign(rng):
    for _ in range(30):
        n = int(rng.integers(1, 6))
        L = random_involution(n, rng)
        u = random_anti_invariant_form(L, rng)
        _, reps = real_ucharacter_components(L, u)
        for alpha in reps:
            sw = sw_function(class_from_real_character(L, alpha))
            B = L.fixed_basis
            assert list(sw[sw.components[0]]) == [int(alpha(B[:, k])) for k in range(B.shape[1])]


def test_f_u_on_picard_torus():
    from realtheta.klein_surface import KleinType, pic_torus

    p = pic_torus(KleinType(1, 2, 0))
    c1 = p.circle_dual(0)
    # 2 [C1]^dual = [C1]^dual + tau [C1]^dual lies in (1 + tau) Lambda
    assert f_u(p.base, p.u_C, 2 * c1) == 0
    assert f_u(p.base, np.zeros((2, 2), dtype=int), 2 * c1) == 0
    with pytest.raises(ValueError):
        f_u(p.base, p.u_C, [1, 0])
