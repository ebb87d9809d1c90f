"""Toy-bit theory: enumeration, fan-out permutations, searches, symmetry."""

from fractions import Fraction

import pytest

from gptdarwin import numerics as nm
from gptdarwin.core import (
    GptError,
    find_maximal_frames,
    find_mci_frames,
    is_pure_state,
    is_quasi_classical,
    validate_transformation,
    verify_invariants,
)
from gptdarwin.stm import (
    OnticSpace,
    build_stm_system,
    bruteforce_pure_state_count,
    check_strong_symmetry,
    cswap_target,
    effect_by_label,
    enumerate_pure_states,
    enumerate_valid_permutation_group,
    group_pure_state_actions,
    is_valid_ontic_permutation,
    ontic_permutation_to_map,
    search_classical_implementation,
    stabilizer_count_formula,
    state_by_label,
    toy_cnot,
    toy_cnot_permutation,
    toy_fan,
    toy_fan_permutation,
    stm_composite,
    z_frame_blocks,
)


# -- enumeration --------------------------------------------------------------

def test_pure_state_counts_match_oracles():
    for n, expected in ((1, 6), (2, 60)):
        states = enumerate_pure_states(n)
        assert len(states) == expected
        assert bruteforce_pure_state_count(n) == expected
        assert stabilizer_count_formula(n) == expected


def test_pure_state_supports_have_half_knowledge_size():
    for n in (1, 2):
        for p in enumerate_pure_states(n):
            assert len(p.support) == 2 ** n


def test_two_bit_states_split_into_products_and_entangled():
    states = enumerate_pure_states(2)
    space = OnticSpace(2)
    products = 0
    for p in states:
        rows = {space.labels(i)[0] for i in p.support}
        cols = {space.labels(i)[1] for i in p.support}
        if len(rows) * len(cols) == len(p.support):
            products += 1
    assert products == 36
    assert len(states) - products == 24


def test_single_bit_system_geometry():
    s = build_stm_system(1)
    verify_invariants(s)
    assert len(s.state_cone.generators) == 6
    assert state_by_label(s, "x+").vec == (Fraction(1, 2), 0, Fraction(1, 2), 0)
    assert is_pure_state(s, state_by_label(s, "x+").vec)


def test_self_duality_inner_product():
    # the effect paired with each pure state evaluates to 1 on it and is valid
    s = build_stm_system(1)
    for p in s.meta["pure_states"]:
        e = tuple(2 * x for x in p.vec())
        assert nm.dot(e, p.vec()) == 1
        assert s.effect_contains(e)
        assert s.effect_contains(nm.vec_sub(s.unit, e))


def test_single_bit_frames():
    s = build_stm_system(1)
    frames = find_mci_frames(s)
    assert len(frames) == 3
    supports = {
        frozenset(frozenset(i for i, x in enumerate(st.vec) if x) for st in f.states)
        for f in frames
    }
    assert supports == {
        frozenset({frozenset({0, 2}), frozenset({1, 3})}),
        frozenset({frozenset({0, 3}), frozenset({1, 2})}),
        frozenset({frozenset({0, 1}), frozenset({2, 3})}),
    }


def test_z_frame_not_quasi_classical():
    s = build_stm_system(1)
    frames = find_mci_frames(s)
    zframe = next(
        f for f in frames
        if {frozenset(i for i, x in enumerate(st.vec) if x) for st in f.states}
        == {frozenset({0, 1}), frozenset({2, 3})}
    )
    assert not is_quasi_classical(s, zframe)
    # e_z+(x+) = 1/2
    assert effect_by_label(s, "z+")(state_by_label(s, "x+")) == Fraction(1, 2)


# -- transformations ----------------------------------------------------------

def test_all_24_single_bit_permutations_valid():
    s = build_stm_system(1)
    assert len(s.transformations) == 24
    assert all(t.reversible for t in s.transformations)


def test_octahedron_rotation_is_not_an_ontic_permutation():
    # the linear map cycling y+ -> x+ -> y- -> x- (z fixed) preserves the
    # state space but is not among the lifted hidden-variable permutations
    s = build_stm_system(1)
    basis = [state_by_label(s, l).vec for l in ("x+", "y+", "z+")]
    basis.append((Fraction(1, 2),) * 4)
    images = [state_by_label(s, "y-").vec, state_by_label(s, "x+").vec,
              state_by_label(s, "z+").vec, (Fraction(1, 2),) * 4]
    A = nm.transpose(basis)
    B = nm.transpose(images)
    T = nm.mat_mul(B, nm.invert_matrix(A, s.backend))
    checked = validate_transformation(s, T)
    assert checked.preserves_states and checked.preserves_effects and checked.reversible
    perm_mats = {t.matrix for t in s.transformations}
    assert checked.matrix not in perm_mats


def test_invalid_two_bit_transposition():
    s = build_stm_system(2)
    perm = list(range(16))
    perm[0], perm[1] = perm[1], perm[0]  # swap ontic 11 <-> 12
    T = ontic_permutation_to_map(s, tuple(perm))
    assert not is_valid_ontic_permutation(s, tuple(perm))
    assert not T.preserves_states


# -- fan-out ------------------------------------------------------------------

def test_toy_cnot_entangles_x_plus_z_plus():
    space = OnticSpace(2)
    perm = toy_cnot_permutation(2, 0, 1)
    xp = {0, 2}          # single-bit x+ support
    zp = {0, 1}          # single-bit z+ support
    prod = {space.index((a + 1, b + 1)) for a in xp for b in zp}
    image = {perm[i] for i in prod}
    diagonal = {space.index((k, k)) for k in (1, 2, 3, 4)}
    assert image == diagonal


def test_toy_cnot_validated():
    s = stm_composite(2)
    T = toy_cnot(s)
    assert T.reversible


def test_toy_fan_composition():
    p1 = toy_cnot_permutation(3, 0, 1)
    p2 = toy_cnot_permutation(3, 0, 2)
    composed = tuple(p2[p1[i]] for i in range(64))
    assert toy_fan_permutation(2) == composed


def test_toy_fan_validated_three_wires():
    s = stm_composite(3)
    T = toy_fan(s, 2)
    assert T.reversible


# -- searches -----------------------------------------------------------------

def test_classical_implementation_positive_control():
    # flipping the z outcome of wire 2 is locally implementable
    target = {z: (z[0], z[1] ^ 1) for z in z_frame_blocks(2)}
    res = search_classical_implementation(2, target, budget=10 ** 5)
    assert res.status == "found"
    assert res.nodes <= 10 ** 5
    assert is_valid_ontic_permutation(build_stm_system(2), res.permutation)


def test_classical_implementation_bitflip_one_wire():
    target = {z: (z[0] ^ 1,) for z in z_frame_blocks(1)}
    res = search_classical_implementation(1, target, budget=10 ** 4)
    assert res.status == "found"


def test_cswap_search_bounded_budget():
    res = search_classical_implementation(3, cswap_target(), budget=20000)
    assert res.status in ("budget", "impossible")
    assert res.nodes > 0


def test_malformed_target_rejected():
    with pytest.raises(GptError):
        search_classical_implementation(2, {(0, 0): (0, 0)})


# -- strong symmetry ----------------------------------------------------------

def test_strong_symmetry_single_toy_bit():
    s = build_stm_system(1)
    report = check_strong_symmetry(s)
    assert report.strongly_symmetric
    assert set(report.sizes) == {1, 2}


def test_strong_symmetry_cpt3():
    from gptdarwin.theories import cpt
    report = check_strong_symmetry(cpt(3))
    assert report.strongly_symmetric


@pytest.mark.slow
def test_two_bit_group_and_strong_symmetry_failure():
    s = build_stm_system(2)
    perms = enumerate_valid_permutation_group(2)
    assert len(perms) == 11520
    actions = group_pure_state_actions(s, perms)
    report = check_strong_symmetry(s, sizes=(2,), pure_actions=actions)
    assert not report.strongly_symmetric
    assert report.sizes[2]["witness_pair"]
