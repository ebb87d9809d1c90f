"""Single GPT systems: state/effect cones, frames, measurements, transformations.

A system is the tuple (vector space, state cone, effect cone, unit effect,
designated reversible maps).  Systems whose pure states form a continuum (the
quantum systems of the catalog) carry designated generator lists, frames and
transformations instead; search operations refuse to run on such systems
unless the designated data is present, rather than silently sampling.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import numerics as nm
from .cones import Cone, canonical_ray, cone_membership, extreme_rays
from .linprog import solve_nonneg_system
from .numerics import Backend, RATIONAL, float_backend


MAX_ENUMERATED_PURE_STATES = 20


class GptError(Exception):
    """Base error for system-level contract violations."""


class UnsupportedSystemError(GptError):
    """Search requested on a continuum system without designated data."""


class InvariantViolation(GptError):
    """A structural invariant of a system or composite does not hold."""


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class State:
    vec: tuple
    system: "GptSystem"

    @property
    def normalization(self):
        return nm.dot(self.system.unit, self.vec)


@dataclass(frozen=True)
class Effect:
    vec: tuple
    system: "GptSystem"

    def __call__(self, state):
        v = state.vec if isinstance(state, State) else state
        return nm.dot(self.vec, v)

    def is_valid(self) -> bool:
        """Member of the effect cone with u - e also in the cone."""
        sys = self.system
        comp = nm.vec_sub(sys.unit, self.vec)
        return sys.effect_contains(self.vec) and sys.effect_contains(comp)


@dataclass(frozen=True)
class Measurement:
    effects: tuple

    def __post_init__(self):
        sys = self.effects[0].system
        total = nm.zeros(sys.dim, sys.backend)
        for e in self.effects:
            total = nm.vec_add(total, e.vec)
        if any(not sys.backend.eq(a, b) for a, b in zip(total, sys.unit)):
            raise InvariantViolation("measurement effects do not sum to the unit effect")

    def __len__(self):
        return len(self.effects)


@dataclass
class FrameWithMeasurement:
    states: tuple
    measurement: Measurement
    maximal: bool | None = None
    mci: bool | None = None
    quasi_classical: bool | None = None

    def __post_init__(self):
        sys = self.states[0].system
        be = sys.backend
        for i, e in enumerate(self.measurement.effects[: len(self.states)]):
            for j, w in enumerate(self.states):
                expected = be.one if i == j else be.zero
                if not be.eq(e(w), expected):
                    raise InvariantViolation(
                        f"distinguishing failure: effect {i} on state {j} gives {e(w)}"
                    )

    @property
    def size(self):
        return len(self.states)

    def relabeled(self, perm) -> "FrameWithMeasurement":
        """Same frame with elements (and their effects) permuted by ``perm``."""
        states = tuple(self.states[p] for p in perm)
        d = len(self.states)
        effects = tuple(self.measurement.effects[p] for p in perm)
        effects += tuple(self.measurement.effects[d:])
        return FrameWithMeasurement(states, Measurement(effects),
                                    self.maximal, self.mci, self.quasi_classical)


@dataclass
class LinearMapOnSystem:
    matrix: tuple
    system: "GptSystem"
    name: str = ""
    preserves_states: bool | None = None
    preserves_effects: bool | None = None
    reversible: bool | None = None

    def apply(self, v):
        return nm.mat_vec(self.matrix, v)

    def pullback(self, e):
        return nm.vec_mat(e, self.matrix)


# ---------------------------------------------------------------------------
# the system itself
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class GptSystem:
    name: str
    dim: int
    backend: Backend
    state_cone: Cone
    effect_cone: Cone
    unit: tuple
    transformations: list = field(default_factory=list)
    frames: list = field(default_factory=list)
    # Optional exact membership oracles for systems whose true cones are not
    # finitely generated (quantum: positive semidefiniteness).  When present
    # they replace the generator LP in transformation validation.
    state_oracle: object = None
    effect_oracle: object = None
    # True when the constructor guarantees the generator lists are already
    # extreme rays (skips quadratic LP reduction on large catalogs).
    generators_minimal: bool = False
    meta: dict = field(default_factory=dict)
    _canonical_states: dict = field(default_factory=dict, repr=False)
    _canonical_effects: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        be = self.backend
        if len(self.unit) != self.dim:
            raise nm.DimensionMismatch("unit effect has wrong dimension")
        for g in self.state_cone.generators:
            if be.le(nm.dot(self.unit, g), be.zero):
                raise InvariantViolation(
                    f"{self.name}: state generator with nonpositive normalization"
                )
        if be.exact:
            self._canonical_states = {
                canonical_ray(g, be): i for i, g in enumerate(self.state_cone.generators)
            }
            self._canonical_effects = {
                canonical_ray(g, be): i for i, g in enumerate(self.effect_cone.generators)
            }

    # -- membership ---------------------------------------------------------

    def state_contains(self, v) -> bool:
        if self.backend.exact and canonical_ray(v, self.backend) in self._canonical_states:
            return True
        if self.state_oracle is not None:
            return self.state_oracle(v)
        return cone_membership(self.state_cone, v).inside

    def effect_contains(self, v) -> bool:
        if self.backend.exact and all(self.backend.is_zero(x) for x in v):
            return True
        if self.backend.exact and canonical_ray(v, self.backend) in self._canonical_effects:
            return True
        if self.effect_oracle is not None:
            return self.effect_oracle(v)
        return cone_membership(self.effect_cone, v).inside

    # -- constructors of value objects ---------------------------------------

    def state(self, v) -> State:
        return State(nm.vec(v, self.backend), self)

    def effect(self, v) -> Effect:
        return Effect(nm.vec(v, self.backend), self)

    def unit_effect(self) -> Effect:
        return Effect(self.unit, self)

    def normalization(self, v):
        return nm.dot(self.unit, v)

    def normalized_pure_states(self) -> list:
        """Extreme rays of the state cone scaled to unit normalization."""
        rays = (list(self.state_cone.generators) if self.generators_minimal
                else extreme_rays(self.state_cone))
        out = []
        for r in rays:
            n = nm.dot(self.unit, r)
            out.append(State(tuple(x / n for x in r), self))
        return out

    def pure_effect_rays(self) -> list:
        rays = (list(self.effect_cone.generators) if self.generators_minimal
                else extreme_rays(self.effect_cone))
        return [canonical_ray(r, self.backend) for r in rays]


def verify_invariants(sys: GptSystem, order_unit_cap: int = 1024) -> None:
    """Full structural checks; quadratic in the generator lists.

    Raises InvariantViolation with the offending object.  Catalog tests run
    this on every small system; large enumerated systems rely on structural
    arguments recorded by their constructors.
    """
    be = sys.backend
    if sys.state_cone.rank() != sys.dim:
        raise InvariantViolation(f"{sys.name}: state cone does not generate the space")
    if not sys.state_cone.is_pointed():
        raise InvariantViolation(f"{sys.name}: state cone is not pointed")
    if not sys.effect_contains(sys.unit):
        raise InvariantViolation(f"{sys.name}: unit effect outside the effect cone")
    for e in sys.effect_cone.generators:
        for g in sys.state_cone.generators:
            if be.lt(nm.dot(e, g), be.zero):
                raise InvariantViolation(
                    f"{sys.name}: effect generator negative on a state generator"
                )
    for e in sys.effect_cone.generators:
        lam = be.one
        ok = False
        while float(lam) <= order_unit_cap:
            gap = nm.vec_sub(nm.vec_scale(lam, sys.unit), e)
            if sys.effect_contains(gap):
                ok = True
                break
            lam = lam * 2
        if not ok:
            raise InvariantViolation(f"{sys.name}: effect generator with no order-unit bound")


# ---------------------------------------------------------------------------
# purity
# ---------------------------------------------------------------------------

def _is_extreme_among(rays, v, backend) -> bool:
    cv = canonical_ray(v, backend)
    others = [r for r in rays if canonical_ray(r, backend) != cv]
    if not others:
        return True
    return not solve_nonneg_system(others, tuple(v), backend).feasible


def is_pure_state(sys: GptSystem, state) -> bool:
    """True iff the normalized state sits on an extreme ray of the state cone."""
    v = state.vec if isinstance(state, State) else tuple(state)
    if not sys.backend.eq(sys.normalization(v), sys.backend.one):
        raise GptError("purity is defined for normalized states")
    rays = (list(sys.state_cone.generators) if sys.generators_minimal
            else extreme_rays(sys.state_cone))
    if not sys.state_contains(v):
        raise GptError("state outside the state cone")
    return _is_extreme_among(rays, v, sys.backend)


def is_pure_effect(sys: GptSystem, effect) -> bool:
    v = effect.vec if isinstance(effect, Effect) else tuple(effect)
    if not Effect(tuple(v), sys).is_valid():
        raise GptError("purity is defined for valid effects")
    if all(sys.backend.is_zero(x) for x in v):
        return False
    rays = (list(sys.effect_cone.generators) if sys.generators_minimal
            else extreme_rays(sys.effect_cone))
    return _is_extreme_among(rays, v, sys.backend)


# ---------------------------------------------------------------------------
# frames
# ---------------------------------------------------------------------------

def distinguishing_measurement(sys: GptSystem, states) -> Measurement | None:
    """Any measurement {e_i} built from effect-cone generators with e_i(w_j) = delta_ij."""
    be = sys.backend
    gens = list(sys.effect_cone.generators)
    d = len(states)
    n = len(gens)
    # variables c[i,k] >= 0; e_i = sum_k c[i,k] g_k
    # rows: d*d delta conditions, then dim coordinates of sum_i e_i = u
    columns = []
    for i in range(d):
        for k in range(n):
            col = []
            for i2 in range(d):
                for j in range(d):
                    col.append(nm.dot(gens[k], states[j].vec) if i2 == i else be.zero)
            col.extend(gens[k])
            columns.append(tuple(col))
    target = []
    for i in range(d):
        for j in range(d):
            target.append(be.one if i == j else be.zero)
    target.extend(sys.unit)
    res = solve_nonneg_system(columns, tuple(target), be)
    if not res.feasible:
        return None
    effects = []
    for i in range(d):
        v = nm.zeros(sys.dim, be)
        for k in range(n):
            w = res.weights[i * n + k]
            if w:
                v = nm.vec_add(v, nm.vec_scale(w, gens[k]))
        effects.append(Effect(v, sys))
    return Measurement(tuple(effects))


def _enumerable_pure_states(sys: GptSystem):
    if sys.frames:
        return None  # designated systems answer frame queries from their lists
    pure = sys.normalized_pure_states()
    if len(pure) > MAX_ENUMERATED_PURE_STATES:
        raise UnsupportedSystemError(
            f"{sys.name}: {len(pure)} extreme states exceed the exhaustive search "
            f"bound ({MAX_ENUMERATED_PURE_STATES}); designate frames instead"
        )
    return pure


def find_maximal_frames(sys: GptSystem) -> list:
    """All largest distinguishable sets of pure states, with a measurement each."""
    if sys.frames:
        for f in sys.frames:
            f.maximal = True
        return list(sys.frames)
    pure = _enumerable_pure_states(sys)
    n = len(pure)
    pairs = set()
    for i, j in itertools.combinations(range(n), 2):
        if distinguishing_measurement(sys, [pure[i], pure[j]]) is not None:
            pairs.add((i, j))

    cliques = {1: [(i,) for i in range(n)]}
    size = 1
    while cliques.get(size):
        nxt = []
        for clique in cliques[size]:
            for j in range(clique[-1] + 1, n):
                if all((i, j) in pairs for i in clique):
                    nxt.append(clique + (j,))
        size += 1
        cliques[size] = nxt

    for s in sorted(cliques, reverse=True):
        frames = []
        for clique in cliques[s]:
            states = [pure[i] for i in clique]
            meas = distinguishing_measurement(sys, states)
            if meas is not None:
                frames.append(FrameWithMeasurement(tuple(states), meas, maximal=True))
        if frames:
            return frames
    return []


def refined_distinguishing_measurement(sys: GptSystem, states) -> Measurement | None:
    """A measurement of pure, pairwise non-proportional effects with e_i(w_j) = delta_ij.

    One pure ray is selected per frame element (its scaling is then forced);
    extra pure rays that annihilate the whole frame may be added with
    nonnegative weights to complete the sum to the unit effect.
    """
    be = sys.backend
    rays = sys.pure_effect_rays()
    d = len(states)
    candidates = []
    for j in range(d):
        cj = []
        for r in rays:
            vals = [nm.dot(r, w.vec) for w in states]
            if all(be.is_zero(vals[i]) for i in range(d) if i != j) and be.lt(be.zero, vals[j]):
                cj.append((r, vals[j]))
        if not cj:
            return None
        candidates.append(cj)
    extras = [r for r in rays
              if all(be.is_zero(nm.dot(r, w.vec)) for w in states)]

    for selection in itertools.product(*candidates):
        chosen = [tuple(x / val for x in r) for r, val in selection]
        if len({canonical_ray(c, be) for c in chosen}) < d:
            continue
        residual = sys.unit
        for c in chosen:
            residual = nm.vec_sub(residual, c)
        if extras:
            res = solve_nonneg_system(extras, residual, be)
            if not res.feasible:
                continue
            extra_effects = [nm.vec_scale(w, r) for w, r in zip(res.weights, extras) if w and not be.is_zero(w)]
        else:
            if any(not be.is_zero(x) for x in residual):
                continue
            extra_effects = []
        effects = tuple(Effect(c, sys) for c in chosen)
        effects += tuple(Effect(v, sys) for v in extra_effects)
        return Measurement(effects)
    return None


def find_mci_frames(sys: GptSystem) -> list:
    """Maximal frames distinguishable by a refined (all-pure) measurement."""
    out = []
    for frame in find_maximal_frames(sys):
        refined = refined_distinguishing_measurement(sys, frame.states)
        if refined is not None:
            out.append(FrameWithMeasurement(frame.states, refined,
                                            maximal=True, mci=True))
        else:
            frame.mci = False
    return out


def quasi_classical_witness(sys: GptSystem, frame: FrameWithMeasurement):
    """None when the frame is quasi-classical; else (state, effect, value) with 0<value<1."""
    if not frame.mci:
        raise GptError("quasi-classicality is defined for MCI-frames")
    be = sys.backend
    for nu in sys.normalized_pure_states():
        for e in frame.measurement.effects:
            val = e(nu)
            if not (be.eq(val, be.zero) or be.eq(val, be.one)):
                return nu, e, val
    return None


def is_quasi_classical(sys: GptSystem, frame: FrameWithMeasurement) -> bool:
    witness = quasi_classical_witness(sys, frame)
    frame.quasi_classical = witness is None
    return frame.quasi_classical


def find_inequivalent_refined_measurement(sys: GptSystem, base: Measurement) -> Measurement | None:
    """A refined measurement with the same outcome count that is not a relabelling."""
    be = sys.backend
    d = len(base.effects)
    rays = sys.pure_effect_rays()
    base_vecs = [e.vec for e in base.effects]

    def equals(u, v):
        return all(be.eq(a, b) for a, b in zip(u, v))

    for combo in itertools.combinations(range(len(rays)), d):
        chosen = [rays[i] for i in combo]
        lam = nm.solve_linear_system(nm.transpose(chosen), sys.unit, be)
        if lam is None:
            continue
        if any(be.le(l, be.zero) for l in lam):
            continue
        recon = nm.zeros(sys.dim, be)
        effects = []
        for l, r in zip(lam, chosen):
            ev = nm.vec_scale(l, r)
            effects.append(ev)
            recon = nm.vec_add(recon, ev)
        if any(not be.eq(a, b) for a, b in zip(recon, sys.unit)):
            continue
        if all(any(equals(ev, bv) for bv in base_vecs) for ev in effects):
            continue  # relabelling of the base measurement
        return Measurement(tuple(Effect(v, sys) for v in effects))
    return None


# ---------------------------------------------------------------------------
# transformations
# ---------------------------------------------------------------------------

def validate_transformation(sys: GptSystem, matrix, name: str = "") -> LinearMapOnSystem:
    """Populate the three validity flags of a candidate linear map."""
    be = sys.backend
    T = LinearMapOnSystem(tuple(tuple(be.coerce(x) for x in row) for row in matrix),
                          sys, name=name)
    if len(T.matrix) != sys.dim or any(len(r) != sys.dim for r in T.matrix):
        raise nm.DimensionMismatch("transformation matrix of wrong shape")

    T.preserves_states = all(
        sys.state_contains(nm.mat_vec(T.matrix, g)) for g in sys.state_cone.generators
    )
    pulled_unit = nm.vec_mat(sys.unit, T.matrix)
    unit_ok = (sys.effect_contains(pulled_unit)
               and sys.effect_contains(nm.vec_sub(sys.unit, pulled_unit)))
    T.preserves_effects = unit_ok and all(
        sys.effect_contains(nm.vec_mat(e, T.matrix)) for e in sys.effect_cone.generators
    )
    inv = nm.invert_matrix(T.matrix, be)
    if inv is None:
        T.reversible = False
    else:
        inv_states = all(
            sys.state_contains(nm.mat_vec(inv, g)) for g in sys.state_cone.generators
        )
        inv_unit = nm.vec_mat(sys.unit, inv)
        inv_unit_ok = (sys.effect_contains(inv_unit)
                       and sys.effect_contains(nm.vec_sub(sys.unit, inv_unit)))
        inv_effects = inv_unit_ok and all(
            sys.effect_contains(nm.vec_mat(e, inv)) for e in sys.effect_cone.generators
        )
        T.reversible = (T.preserves_states and T.preserves_effects
                        and inv_states and inv_effects)
    return T


# ---------------------------------------------------------------------------
# theory files
# ---------------------------------------------------------------------------

def _scalar_to_str(x, backend: Backend):
    if backend.exact:
        return str(x) if isinstance(x, Fraction) else str(Fraction(x))
    return repr(float(x))


def _vec_to_str(v, backend):
    return [_scalar_to_str(x, backend) for x in v]


def system_to_dict(sys: GptSystem) -> dict:
    be = sys.backend
    d = {
        "format": "gptdarwin-theory/1",
        "name": sys.name,
        "dim": sys.dim,
        "backend": be.kind,
        "state_generators": [_vec_to_str(g, be) for g in sys.state_cone.generators],
        "effect_generators": [_vec_to_str(g, be) for g in sys.effect_cone.generators],
        "unit_effect": _vec_to_str(sys.unit, be),
    }
    if not be.exact:
        d["eps"] = be.eps
    if sys.transformations:
        d["transformations"] = [
            {"name": t.name, "matrix": [_vec_to_str(r, be) for r in t.matrix]}
            for t in sys.transformations
        ]
    if sys.frames:
        d["frames"] = [
            {
                "states": [_vec_to_str(s.vec, be) for s in f.states],
                "effects": [_vec_to_str(e.vec, be) for e in f.measurement.effects],
            }
            for f in sys.frames
        ]
    return d


def system_from_dict(d: dict) -> GptSystem:
    be = RATIONAL if d["backend"] == "rational" else float_backend(d.get("eps", nm.DEFAULT_FLOAT_EPS))
    dim = d["dim"]
    state_gens = tuple(nm.vec(g, be) for g in d["state_generators"])
    effect_gens = tuple(nm.vec(g, be) for g in d["effect_generators"])
    sys = GptSystem(
        name=d["name"],
        dim=dim,
        backend=be,
        state_cone=Cone(dim, state_gens, be),
        effect_cone=Cone(dim, effect_gens, be),
        unit=nm.vec(d["unit_effect"], be),
    )
    for t in d.get("transformations", []):
        sys.transformations.append(
            validate_transformation(sys, nm.mat(t["matrix"], be), name=t.get("name", ""))
        )
    for f in d.get("frames", []):
        states = tuple(sys.state(s) for s in f["states"])
        meas = Measurement(tuple(sys.effect(e) for e in f["effects"]))
        sys.frames.append(FrameWithMeasurement(states, meas))
    return sys


def save_theory(sys: GptSystem, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(system_to_dict(sys), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_theory(path) -> GptSystem:
    with open(path, encoding="utf-8") as fh:
        return system_from_dict(json.load(fh))
