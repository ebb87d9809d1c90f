"""Concrete theory constructors: classical, quantum, n-gon, gbit and boxworld.

Quantum systems are represented through their stabilizer-reachable objects
with exact rational coordinates: designated states are products of the six
single-qubit basis projectors, designated maps are adjoint actions of
permutation-type gates, and cone membership of arbitrary Hermitian vectors is
answered by an exact positive-semidefiniteness oracle rather than a generator
enumeration of the full cone.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from . import numerics as nm
from .cmatrix import CMatrix, centry, cmul, permutation_unitary
from .cones import Cone, canonical_ray, dual_cone, extreme_rays
from .composition import CompositeSystem, compose
from .core import (
    Effect,
    FrameWithMeasurement,
    GptSystem,
    Measurement,
    State,
    validate_transformation,
)
from .numerics import Backend, RATIONAL, float_backend


# ---------------------------------------------------------------------------
# classical probability
# ---------------------------------------------------------------------------

def cpt(d: int) -> GptSystem:
    """Classical d-outcome system: the positive orthant with the all-ones unit."""
    if d < 2:
        raise ValueError("classical systems need at least two outcomes")
    be = RATIONAL
    gens = nm.identity(d, be)
    sys = GptSystem(
        name=f"cpt({d})",
        dim=d,
        backend=be,
        state_cone=Cone(d, gens, be),
        effect_cone=Cone(d, gens, be),
        unit=nm.vec([1] * d, be),
        generators_minimal=True,
        meta={"kind": "cpt", "d": d},
    )
    perms = (itertools.permutations(range(d)) if d <= 5
             else [tuple(range(1, d)) + (0,), (1, 0) + tuple(range(2, d))])
    for p in perms:
        M = tuple(tuple(be.one if p[i] == j else be.zero for j in range(d)) for i in range(d))
        sys.transformations.append(validate_transformation(sys, M, name=f"perm{p}"))
    return sys


# ---------------------------------------------------------------------------
# quantum (stabilizer-reachable representation)
# ---------------------------------------------------------------------------

def hermitian_basis(n: int):
    """Elementary Hermitian basis of n x n matrices with its trace norms.

    Order: the n diagonal units, then for each k<l the symmetric element
    E_kl + E_lk followed by the antisymmetric i(E_kl - E_lk).
    """
    basis = []
    norms = []
    for k in range(n):
        basis.append(CMatrix(n, {(k, k): 1}))
        norms.append(Fraction(1))
    for k in range(n):
        for l in range(k + 1, n):
            basis.append(CMatrix(n, {(k, l): 1, (l, k): 1}))
            norms.append(Fraction(2))
            basis.append(CMatrix(n, {(k, l): (0, 1), (l, k): (0, -1)}))
            norms.append(Fraction(2))
    return basis, norms


def state_coords(M: CMatrix, basis, norms) -> tuple:
    """Expansion coefficients of a Hermitian matrix in the given orthogonal basis."""
    out = []
    for B, nrm in zip(basis, norms):
        acc = (Fraction(0), Fraction(0))
        for (i, j), v in B.entries.items():
            m = M.get(j, i)
            if m != (0, 0):
                acc = (acc[0] + v[0] * m[0] - v[1] * m[1],
                       acc[1] + v[0] * m[1] + v[1] * m[0])
        if acc[1] != 0:
            raise ValueError("state coordinates of a non-Hermitian matrix")
        out.append(acc[0] / nrm)
    return tuple(out)


def effect_coords(E: CMatrix, basis, norms) -> tuple:
    """Row vector of the functional rho -> tr(E rho) on state coordinates."""
    sc = state_coords(E, basis, norms)
    return tuple(c * nrm for c, nrm in zip(sc, norms))


def state_matrix(vec, basis) -> CMatrix:
    M = CMatrix(basis[0].n)
    for c, B in zip(vec, basis):
        if c:
            M = M + B.scale(c)
    return M


def effect_matrix(vec, basis, norms) -> CMatrix:
    M = CMatrix(basis[0].n)
    for c, B, nrm in zip(vec, basis, norms):
        if c:
            M = M + B.scale(Fraction(c) / nrm)
    return M


def adjoint_action_matrix(U: CMatrix, basis, norms) -> tuple:
    """Matrix of rho -> U rho U^dagger on the coordinate representation.

    A cell index over the (sparse, orthogonal) basis keeps the expansion of
    each conjugated element proportional to its nonzero count.
    """
    cell_index: dict = {}
    for bi, B in enumerate(basis):
        for cell in B.entries:
            cell_index.setdefault(cell, []).append(bi)
    zero = Fraction(0)
    cols = []
    for B in basis:
        img = B.conjugate_by(U)
        col = [zero] * len(basis)
        cand = set()
        for (i, j) in img.entries:
            cand.update(cell_index.get((j, i), ()))
        for bi in cand:
            acc_re = Fraction(0)
            acc_im = Fraction(0)
            for (i, j), v in basis[bi].entries.items():
                m = img.get(j, i)
                if m != (0, 0):
                    acc_re += v[0] * m[0] - v[1] * m[1]
                    acc_im += v[0] * m[1] + v[1] * m[0]
            if acc_im != 0:
                raise ValueError("conjugation left the Hermitian span")
            if acc_re:
                col[bi] = acc_re / norms[bi]
        cols.append(tuple(col))
    return nm.transpose(cols)


QUBIT_PROJECTOR_LABELS = ("z+", "z-", "x+", "x-", "y+", "y-")


def qubit_projectors() -> dict:
    h = Fraction(1, 2)
    return {
        "z+": CMatrix(2, {(0, 0): 1}),
        "z-": CMatrix(2, {(1, 1): 1}),
        "x+": CMatrix.from_rows([[h, h], [h, h]]),
        "x-": CMatrix.from_rows([[h, -h], [-h, h]]),
        "y+": CMatrix(2, {(0, 0): h, (0, 1): (0, -h), (1, 0): (0, h), (1, 1): h}),
        "y-": CMatrix(2, {(0, 0): h, (0, 1): (0, h), (1, 0): (0, -h), (1, 1): h}),
    }


def _qt_gate_unitaries(wires: int) -> dict:
    """Permutation-type gates on the computational basis of ``wires`` qubits."""
    n = 2 ** wires
    gates = {}

    def bitperm(name, fn):
        perm = [0] * n
        for k in range(n):
            bits = [(k >> (wires - 1 - w)) & 1 for w in range(wires)]
            out = fn(list(bits))
            idx = 0
            for b in out:
                idx = (idx << 1) | b
            perm[k] = idx
        gates[name] = permutation_unitary(perm)

    for w in range(wires):
        def flip(bits, w=w):
            bits[w] ^= 1
            return bits
        bitperm(f"X{w}", flip)
    for c in range(wires):
        for t in range(wires):
            if c == t:
                continue
            def cnot(bits, c=c, t=t):
                bits[t] ^= bits[c]
                return bits
            bitperm(f"CNOT{c}{t}", cnot)
    if wires >= 2:
        def swap(bits):
            bits[0], bits[1] = bits[1], bits[0]
            return bits
        bitperm("SWAP01", swap)
    if wires >= 3:
        def toffoli(bits):
            if bits[0] and bits[1]:
                bits[2] ^= 1
            return bits
        bitperm("TOFFOLI", toffoli)
    return gates


def qt(n: int) -> GptSystem:
    """Quantum system of dimension n (qubit registers: n in {2, 4, 8})."""
    if n not in (2, 4, 8):
        raise ValueError("quantum catalog supports dimensions 2, 4 and 8")
    wires = n.bit_length() - 1
    be = RATIONAL
    basis, norms = hermitian_basis(n)
    projs = qubit_projectors()
    labels = []
    mats = []
    for combo in itertools.product(QUBIT_PROJECTOR_LABELS, repeat=wires):
        M = projs[combo[0]]
        for lbl in combo[1:]:
            M = M.kron(projs[lbl])
        labels.append("*".join(combo))
        mats.append(M)
    state_gens = tuple(state_coords(M, basis, norms) for M in mats)
    effect_gens = tuple(effect_coords(M, basis, norms) for M in mats)
    unit = effect_coords(CMatrix.identity(n), basis, norms)

    def psd_state(vec):
        return state_matrix(vec, basis).is_psd()

    def psd_effect(vec):
        return effect_matrix(vec, basis, norms).is_psd()

    sys = GptSystem(
        name=f"qt({n})",
        dim=n * n,
        backend=be,
        state_cone=Cone(n * n, state_gens, be),
        effect_cone=Cone(n * n, effect_gens, be),
        unit=unit,
        state_oracle=psd_state,
        effect_oracle=psd_effect,
        generators_minimal=True,
        meta={
            "kind": "qt", "n": n, "wires": wires,
            "basis": basis, "norms": norms, "labels": labels,
        },
    )
    for gname, U in _qt_gate_unitaries(wires).items():
        T = adjoint_action_matrix(U, basis, norms)
        sys.transformations.append(validate_transformation(sys, T, name=gname))

    # designated frame: the computational basis with its projector effects
    frame_states = []
    frame_effects = []
    for k, combo in enumerate(itertools.product(("z+", "z-"), repeat=wires)):
        idx = labels.index("*".join(combo))
        frame_states.append(State(state_gens[idx], sys))
        frame_effects.append(Effect(effect_gens[idx], sys))
    sys.frames.append(FrameWithMeasurement(
        tuple(frame_states), Measurement(tuple(frame_effects)), maximal=True, mci=True,
    ))
    return sys


# ---------------------------------------------------------------------------
# polygon state spaces
# ---------------------------------------------------------------------------

_RATIONAL_NGON_VERTICES = {
    3: [(1, 0), (Fraction(-1, 2), Fraction(1, 2)), (Fraction(-1, 2), Fraction(-1, 2))],
    4: [(1, 0), (0, 1), (-1, 0), (0, -1)],
    6: [(1, 0), (Fraction(1, 2), Fraction(1, 2)), (Fraction(-1, 2), Fraction(1, 2)),
        (-1, 0), (Fraction(-1, 2), Fraction(-1, 2)), (Fraction(1, 2), Fraction(-1, 2))],
}


def ngon(n: int, eps: float = nm.DEFAULT_FLOAT_EPS) -> GptSystem:
    """Regular-polygon state space in R^3 with the unrestricted dual effect cone.

    Vertices with n in {3, 4, 6} have exact rational coordinates after a
    linear change of axes; other n use the float backend at tolerance eps.
    """
    if n < 3:
        raise ValueError("polygon theories need at least three vertices")
    if n in _RATIONAL_NGON_VERTICES:
        be = RATIONAL
        verts = [(be.coerce(x), be.coerce(y), be.one) for x, y in _RATIONAL_NGON_VERTICES[n]]
    else:
        be = float_backend(eps)
        verts = [
            (math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n), 1.0)
            for k in range(n)
        ]
    state_cone = Cone(3, tuple(verts), be)
    effect_cone = dual_cone(state_cone)
    return GptSystem(
        name=f"ngon({n})",
        dim=3,
        backend=be,
        state_cone=state_cone,
        effect_cone=Cone(3, tuple(extreme_rays(effect_cone)), be),
        unit=nm.vec([0, 0, 1], be),
        generators_minimal=True,
        meta={"kind": "ngon", "n": n},
    )


def gbit() -> GptSystem:
    """The square state space (one half of a nonlocal box)."""
    sys = ngon(4)
    sys.name = "gbit"
    sys.meta["kind"] = "gbit"
    return sys


def boxworld_pair() -> CompositeSystem:
    """Two gbits under the maximal tensor product (all no-signalling boxes)."""
    a, b = gbit(), gbit()
    comp = compose([a, b], "max_tensor", name="boxworld")
    comp.meta["kind"] = "boxworld"
    return comp


# ---------------------------------------------------------------------------
# quantum composites (explicit method, matrix tensor product)
# ---------------------------------------------------------------------------

def _composite_basis(factor_metas):
    basis = [CMatrix.identity(1)]
    norms = [Fraction(1)]
    for meta in factor_metas:
        basis = [B.kron(C) for B in basis for C in meta["basis"]]
        norms = [a * b for a in norms for b in meta["norms"]]
    return basis, norms


def qt_composite(n_factors: int, closure_gates: bool = True) -> CompositeSystem:
    """Composite of qubit factors with the matrix tensor product.

    Designated composite states are products of the factor projectors, closed
    (for two factors) under the designated two-qubit gates so that the list
    contains the reachable maximally correlated states.  Arbitrary vectors are
    tested by the exact joint positive-semidefiniteness oracle.
    """
    if n_factors < 2:
        raise ValueError("a composite needs at least two qubit factors")
    factors = [qt(2) for _ in range(n_factors)]
    basis, norms = _composite_basis([f.meta for f in factors])
    wires = n_factors

    state_gens = []
    effect_gens = []
    for combo in itertools.product(*[f.state_cone.generators for f in factors]):
        v = combo[0]
        for x in combo[1:]:
            v = nm.kron(v, x)
        state_gens.append(v)
    for combo in itertools.product(*[f.effect_cone.generators for f in factors]):
        v = combo[0]
        for x in combo[1:]:
            v = nm.kron(v, x)
        effect_gens.append(v)

    all_gates = _qt_gate_unitaries(wires)
    wanted = [f"X{w}" for w in range(wires)] + [f"CNOT0{k}" for k in range(1, wires)]
    if wires == 2:
        wanted += ["CNOT10", "SWAP01"]
    gates = {g: all_gates[g] for g in wanted}
    adjoints = {g: adjoint_action_matrix(U, basis, norms) for g, U in gates.items()}
    if closure_gates and n_factors == 2:
        frontier = list(state_gens)
        seen = {canonical_ray(v, RATIONAL) for v in state_gens}
        while frontier:
            nxt = []
            for v in frontier:
                for T in adjoints.values():
                    img = nm.mat_vec(T, v)
                    key = canonical_ray(img, RATIONAL)
                    if key not in seen:
                        seen.add(key)
                        nxt.append(img)
                        state_gens.append(img)
            frontier = nxt
        frontier = list(effect_gens)
        seen = {canonical_ray(v, RATIONAL) for v in effect_gens}
        while frontier:
            nxt = []
            for v in frontier:
                for T in adjoints.values():
                    img = nm.vec_mat(v, T)
                    key = canonical_ray(img, RATIONAL)
                    if key not in seen:
                        seen.add(key)
                        nxt.append(img)
                        effect_gens.append(img)
            frontier = nxt

    def psd_state(vec):
        return state_matrix(vec, basis).is_psd()

    def psd_effect(vec):
        return effect_matrix(vec, basis, norms).is_psd()

    comp = compose(
        factors, "explicit",
        name=f"qt-composite({n_factors})",
        state_generators=state_gens,
        effect_generators=effect_gens,
        state_oracle=psd_state,
        effect_oracle=psd_effect,
        generators_minimal=True,
    )
    comp.meta.update({
        "kind": "qt-composite", "wires": wires, "basis": basis, "norms": norms,
    })
    comp.meta["label_lift"] = lambda label_map: _qt_label_lift(comp, label_map)
    for gname, T in adjoints.items():
        comp.transformations.append(validate_transformation(comp, T, name=gname))
    return comp


def _qt_label_lift(comp: CompositeSystem, label_map: dict):
    """Adjoint action of the permutation unitary realizing a basis-label map."""
    wires = comp.meta["wires"]
    n = 2 ** wires
    perm = [0] * n
    for k in range(n):
        bits = tuple((k >> (wires - 1 - w)) & 1 for w in range(wires))
        img = label_map.get(bits)
        if img is None:
            return None
        idx = 0
        for b in img:
            idx = (idx << 1) | b
        perm[k] = idx
    if sorted(perm) != list(range(n)):
        return None
    U = permutation_unitary(perm)
    return adjoint_action_matrix(U, comp.meta["basis"], comp.meta["norms"])


# ---------------------------------------------------------------------------
# Clifford recognition for exact unitaries
# ---------------------------------------------------------------------------

_PAULI_1Q = {
    "I": CMatrix.identity(2),
    "X": CMatrix(2, {(0, 1): 1, (1, 0): 1}),
    "Y": CMatrix(2, {(0, 1): (0, -1), (1, 0): (0, 1)}),
    "Z": CMatrix(2, {(0, 0): 1, (1, 1): -1}),
}


def pauli_word(word: str) -> CMatrix:
    M = _PAULI_1Q[word[0]]
    for ch in word[1:]:
        M = M.kron(_PAULI_1Q[ch])
    return M


def clifford_report(U, n_qubits: int) -> dict:
    """Conjugate every single-wire Pauli generator; record any non-Pauli image."""
    if n_qubits > 3:
        raise ValueError("Clifford recognition is capped at three qubits")
    if not isinstance(U, CMatrix):
        U = CMatrix.from_rows(U)
    if U.n != 2 ** n_qubits:
        raise ValueError("unitary has the wrong dimension for the qubit count")
    if not U.is_unitary():
        raise ValueError("Clifford recognition needs a unitary input")
    words = ["".join(w) for w in itertools.product("IXYZ", repeat=n_qubits)]
    word_mats = [(w, pauli_word(w)) for w in words]
    failures = []
    images = {}
    for wire in range(n_qubits):
        for p in ("X", "Z"):
            gen = "".join(p if k == wire else "I" for k in range(n_qubits))
            conj = pauli_word(gen).conjugate_by(U)
            match = None
            for w, M in word_mats:
                if conj == M:
                    match = "+" + w
                    break
                if conj == M.scale(-1):
                    match = "-" + w
                    break
            images[gen] = match
            if match is None:
                failures.append({"generator": gen, "conjugate": sorted(conj.entries.items())})
    return {"clifford": not failures, "images": images, "failures": failures}


def is_clifford(U, n_qubits: int) -> bool:
    """True iff U maps every single-wire Pauli generator to +-(a Pauli word)."""
    return clifford_report(U, n_qubits)["clifford"]


def cnot_unitary() -> CMatrix:
    return permutation_unitary([0, 1, 3, 2])


def swap_unitary() -> CMatrix:
    return permutation_unitary([0, 2, 1, 3])


def toffoli_unitary() -> CMatrix:
    return permutation_unitary([0, 1, 2, 3, 4, 5, 7, 6])
