"""Cone geometry: certified membership, dual cones, extreme rays."""

import random
from fractions import Fraction

import pytest

from gptdarwin import numerics as nm
from gptdarwin.cones import (
    Cone,
    canonical_ray,
    cone_membership,
    dual_cone,
    extreme_rays,
)
from gptdarwin.numerics import RATIONAL, DimensionMismatch


def rational_cone(gens):
    gens = [nm.vec(g, RATIONAL) for g in gens]
    return Cone(len(gens[0]), tuple(gens), RATIONAL)


def orthant(n):
    return Cone(n, nm.identity(n, RATIONAL), RATIONAL)


def test_membership_inside_orthant():
    v = cone_membership(orthant(3), nm.vec([1, 1, 0], RATIONAL))
    assert v.inside
    assert v.weights == nm.vec([1, 1, 0], RATIONAL)


def test_membership_outside_orthant():
    v = cone_membership(orthant(3), nm.vec([1, -1, 0], RATIONAL))
    assert not v.inside
    # witness is nonnegative on generators and negative on the point
    for g in orthant(3).generators:
        assert nm.dot(v.witness, g) >= 0
    assert nm.dot(v.witness, v.point) < 0


def test_membership_weights_solved_by_hand():
    # (3,1) = 2*(1,1) + 1*(1,-1)
    cone = rational_cone([[1, 1], [1, -1]])
    v = cone_membership(cone, nm.vec([3, 1], RATIONAL))
    assert v.inside
    assert v.weights == (Fraction(2), Fraction(1))


def test_membership_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        cone_membership(orthant(2), nm.vec([1, 1, 1], RATIONAL))


def test_membership_zero_point():
    v = cone_membership(orthant(2), nm.zeros(2, RATIONAL))
    assert v.inside and all(w == 0 for w in v.weights)


def test_extreme_rays_drops_interior_generator():
    cone = rational_cone([[1, 0], [0, 1], [1, 1]])
    assert extreme_rays(cone) == [nm.vec([1, 0], RATIONAL), nm.vec([0, 1], RATIONAL)]


def test_extreme_rays_single_generator():
    cone = rational_cone([[2, 4]])
    assert extreme_rays(cone) == [canonical_ray((Fraction(2), Fraction(4)), RATIONAL)]


def test_extreme_rays_octahedron_lift():
    # six unit +-e_i directions lifted to normalization 1: all extreme
    gens = []
    for i in range(3):
        for s in (1, -1):
            g = [0, 0, 0, 1]
            g[i] = s
            gens.append(g)
    cone = rational_cone(gens)
    assert len(extreme_rays(cone)) == 6


def test_dual_of_orthant_is_orthant():
    d = dual_cone(orthant(3))
    assert sorted(d.generators) == sorted(orthant(3).generators)


def brute_force_dual_dim3(gens):
    """Oracle: facet normals of a full-dimensional pointed cone in R^3.

    Every extreme ray of the dual is orthogonal to two independent generators;
    enumerate all pairs and keep the sign that is nonnegative on all generators.
    """
    out = set()
    for a, b in [(x, y) for x in gens for y in gens if x != y]:
        n = (a[1] * b[2] - a[2] * b[1],
             a[2] * b[0] - a[0] * b[2],
             a[0] * b[1] - a[1] * b[0])
        if all(x == 0 for x in n):
            continue
        for s in (1, -1):
            cand = tuple(s * x for x in n)
            if all(nm.dot(cand, g) >= 0 for g in gens):
                if any(nm.dot(cand, g) > 0 for g in gens):
                    out.add(canonical_ray(cand, RATIONAL))
    return sorted(out)


def test_dual_of_square_cone_matches_bruteforce():
    square = rational_cone([[1, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1]])
    expected = brute_force_dual_dim3(list(square.generators))
    got = sorted(extreme_rays(dual_cone(square)))
    assert got == [list(x) and tuple(x) for x in expected] or got == expected


def test_dual_cone_of_low_dimensional_cone_has_lineality():
    # a single ray in R^3: dual contains the whole orthogonal plane
    cone = rational_cone([[1, 0, 0]])
    d = dual_cone(cone)
    for v in [(0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]:
        assert cone_membership(d, nm.vec(v, RATIONAL)).inside
    assert not cone_membership(d, nm.vec([-1, 0, 0], RATIONAL)).inside


def random_rational_cone(rng, dim):
    n_gens = rng.randint(dim, dim + 3)
    gens = []
    for _ in range(n_gens):
        gens.append(tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(dim)))
    gens = [g for g in gens if any(x != 0 for x in g)]
    if len(gens) < 2:
        gens.append(tuple(Fraction(1) for _ in range(dim)))
    return Cone(dim, tuple(gens), RATIONAL)


def test_dual_involution_on_random_cones():
    rng = random.Random(20240901)
    cases = 0
    while cases < 100:
        dim = rng.randint(2, 4)
        cone = random_rational_cone(rng, dim)
        if not cone.is_pointed():
            continue
        cases += 1
        back = dual_cone(dual_cone(cone))
        lhs = sorted(canonical_ray(r, RATIONAL) for r in extreme_rays(cone))
        rhs = sorted(canonical_ray(r, RATIONAL) for r in extreme_rays(back))
        assert lhs == rhs


def test_membership_monotone_under_extra_generators():
    rng = random.Random(7)
    for _ in range(25):
        cone = random_rational_cone(rng, 3)
        point = tuple(Fraction(rng.randint(-3, 3)) for _ in range(3))
        before = cone_membership(cone, point).inside
        bigger = Cone(3, cone.generators + (tuple(Fraction(rng.randint(-3, 3)) for _ in range(3)),), RATIONAL)
        if any(x != 0 for x in bigger.generators[-1]):
            after = cone_membership(bigger, point).inside
            assert after or not before


def test_pointedness():
    assert orthant(3).is_pointed()
    assert not rational_cone([[1, 0], [-1, 0], [0, 1]]).is_pointed()
