"""Theory catalog: classical, quantum, polygons, boxworld, Clifford test."""

from fractions import Fraction

import pytest

from gptdarwin import numerics as nm
from gptdarwin.cones import cone_membership, extreme_rays
from gptdarwin.core import (
    Effect,
    find_inequivalent_refined_measurement,
    find_maximal_frames,
    find_mci_frames,
    is_pure_effect,
    is_pure_state,
    is_quasi_classical,
    verify_invariants,
)
from gptdarwin.theories import (
    clifford_report,
    cnot_unitary,
    cpt,
    gbit,
    hermitian_basis,
    is_clifford,
    ngon,
    qt,
    qubit_projectors,
    state_coords,
    swap_unitary,
    toffoli_unitary,
)


# -- classical ---------------------------------------------------------------

def test_cpt_basics():
    c = cpt(3)
    verify_invariants(c)
    assert is_pure_state(c, (1, 0, 0))
    assert not is_pure_state(c, (Fraction(1, 3),) * 3)
    assert len(c.transformations) == 6
    assert all(t.reversible for t in c.transformations)


def test_cpt_unique_refined_measurement():
    c = cpt(3)
    frames = find_mci_frames(c)
    assert len(frames) == 1 and frames[0].size == 3
    assert find_inequivalent_refined_measurement(c, frames[0].measurement) is None


def test_cpt2_frame_size():
    frames = find_maximal_frames(cpt(2))
    assert frames and all(f.size == 2 for f in frames)


def test_cpt_unit_effect_not_pure():
    c = cpt(2)
    assert not is_pure_effect(c, c.unit)


def test_cpt_quasi_classical():
    c = cpt(4)
    frame = find_mci_frames(c)[0]
    assert is_quasi_classical(c, frame)


# -- quantum -----------------------------------------------------------------

def test_qubit_state_coordinates():
    basis, norms = hermitian_basis(2)
    xplus = qubit_projectors()["x+"]
    coords = state_coords(xplus, basis, norms)
    # diag 1/2, 1/2 then real off-diagonal 1/2, imaginary 0
    assert coords == (Fraction(1, 2), Fraction(1, 2), Fraction(1, 2), Fraction(0))


def test_qt2_unit_is_trace():
    q = qt(2)
    for s in q.state_cone.generators:
        assert nm.dot(q.unit, s) == 1


def test_qt2_transformations_valid():
    q = qt(2)
    assert q.transformations
    for t in q.transformations:
        assert t.preserves_states and t.preserves_effects and t.reversible


def test_qt2_designated_frame_is_mci():
    q = qt(2)
    frames = find_mci_frames(q)
    assert frames and frames[0].size == 2


def test_qt2_x_basis_inequivalent_to_z():
    q = qt(2)
    base = q.frames[0].measurement
    other = find_inequivalent_refined_measurement(q, base)
    assert other is not None


def test_qt_psd_oracle():
    q = qt(2)
    assert q.state_contains((Fraction(1, 2), Fraction(1, 2), Fraction(0), Fraction(0)))
    assert not q.state_contains((Fraction(1), Fraction(-2), Fraction(0), Fraction(0)))


def test_qt_rejects_unsupported_dimension():
    with pytest.raises(ValueError):
        qt(3)


# -- polygons ----------------------------------------------------------------

def test_pentagon_five_pure_effects_self_dual_labels():
    p = ngon(5)
    rays = p.pure_effect_rays()
    assert len(rays) == 5
    # each pure effect, scaled so its best vertex value is 1, singles out one vertex
    best = set()
    for r in rays:
        vals = [nm.dot(r, s.vec) for s in p.normalized_pure_states()]
        m = max(vals)
        hits = [i for i, v in enumerate(vals) if abs(v - m) <= 1e-9]
        assert len(hits) == 1
        best.add(hits[0])
    assert best == set(range(5))


def test_pentagon_maximal_frames_are_pairs():
    p = ngon(5)
    frames = find_maximal_frames(p)
    assert frames and all(f.size == 2 for f in frames)
    assert len(frames) == 5


def test_pentagon_has_no_mci_frame():
    assert find_mci_frames(ngon(5)) == []


def test_square_is_rational_gbit():
    g = gbit()
    verify_invariants(g)
    assert g.backend.exact
    assert len(g.normalized_pure_states()) == 4
    frames = find_mci_frames(g)
    assert frames and all(f.size == 2 for f in frames)


def test_gbit_two_inequivalent_refined_measurements():
    g = gbit()
    frames = find_mci_frames(g)
    base = frames[0].measurement
    other = find_inequivalent_refined_measurement(g, base)
    assert other is not None


def test_ngon_quasi_classical_classification():
    verdicts = {}
    for n in (3, 4, 6, 8, 10):
        sys = ngon(n)
        frames = find_mci_frames(sys)
        assert frames, f"{n}-gon should carry MCI frames"
        verdicts[n] = any(is_quasi_classical(sys, f) for f in frames)
    assert verdicts == {3: True, 4: True, 6: False, 8: False, 10: False}


def test_odd_ngon_self_duality_scaled_isomorphism():
    # odd polygons are self-dual: the pure-effect polygon is the vertex
    # polygon scaled by sec(pi/n) in the plane (with vertices at angles
    # 2*pi*k/n the rotation offset is a full polygon symmetry)
    import math
    p = ngon(5)
    scale = 1.0 / math.cos(math.pi / 5)
    scaled = set()
    for g in p.state_cone.generators:
        x, y, z = g
        scaled.add((round(scale * x, 6), round(scale * y, 6)))
    effects = set()
    for r in p.pure_effect_rays():
        x, y, z = r
        assert z > 0
        effects.add((round(x / z, 6), round(y / z, 6)))
    assert scaled == effects


def test_triangle_self_duality_exact():
    # axis-rescaled coordinates conjugate the scaling: duality transforms the
    # plane contravariantly, so the exact isomorphism here is diag(2, 6)
    t = ngon(3)
    assert t.backend.exact
    scaled = {(2 * x, 6 * y) for x, y, _ in t.state_cone.generators}
    effects = {(Fraction(x) / z, Fraction(y) / z) for x, y, z in t.pure_effect_rays()}
    assert scaled == effects


def test_ngon_rejects_small_n():
    with pytest.raises(ValueError):
        ngon(2)


# -- Clifford recognition -----------------------------------------------------

def test_cnot_and_swap_are_clifford():
    assert is_clifford(cnot_unitary(), 2)
    assert is_clifford(swap_unitary(), 2)


def test_toffoli_is_not_clifford():
    rep = clifford_report(toffoli_unitary(), 3)
    assert not rep["clifford"]
    assert rep["failures"], "the non-Pauli conjugate must be exhibited"


def test_clifford_rejects_non_unitary():
    from gptdarwin.cmatrix import CMatrix
    with pytest.raises(ValueError):
        is_clifford(CMatrix(2, {(0, 0): 1}), 1)
