from __future__ import annotations

import pytest

from realtheta.klein_surface import (
    KleinType,
    build_surface_basis,
    check_circle_generation,
    component_count_formulas,
    pic_torus,
    valid_types,
    validate_curve_class,
)


@pytest.mark.parametrize(
    "g,r,a",
    [(1, 1, 0), (2, 4, 0), (1, 2, 1), (0, 1, 1), (-1, 1, 0), (2, 0, 0), (2, 1, 2)],
)
def test_invalid_types_rejected(g, r, a):
    with pytest.raises(ValueError):
        KleinType(g, r, a)


def test_valid_types_small_genus():
    got = {str(t) for t in valid_types(2)}
    assert got == {"(0,1,0)", "(1,2,0)", "(1,1,1)", "(2,1,0)", "(2,3,0)", "(2,1,1)", "(2,2,1)"}


def test_surface_bases_verify():
    for t in valid_types(6):
        assert build_surface_basis(t).verify() == []


def test_component_counts_agree():
    for t in valid_types(6):
        direct, tate = component_count_formulas(t)
        assert direct == tate == len(pic_torus(t).components) == 2 ** (t.r - 1)


def test_circle_generation_identities():
    for t in valid_types(5):
        checks = check_circle_generation(t)
        assert all(checks.values()), (str(t), checks)


def test_pic_torus_of_two_circle_torus():
    p = pic_torus(KleinType(1, 2, 0))
    assert p.base.tau.tolist() == [[-1, 0], [0, 1]]
    assert [int(x) for x in p.circle_dual(0)] == [0, 1]
    assert [int(x) for x in p.circle_dual(1)] == [0, -1]


def test_curve_class_parity():
    t = KleinType(2, 3, 0)
    assert validate_curve_class(t, 3, [1, 1, 1]).w == (1, 1, 1)
    with pytest.raises(ValueError):
        validate_curve_class(t, 2, [1, 0, 0])
    with pytest.raises(ValueError):
        validate_curve_class(t, 0, [0, 0])
