"""Fan-out information spreading: the two defining checks and their witnesses.

A scenario is a composite of one system and N environments, a distinguished
frame with its refined measurement on every factor, and a candidate
reversible map.  The observational check asks that joint outcome statistics
after the map reproduce the system's statistics with perfectly shifted
environment outcomes, for every pure system state and every frame
initialization of the environments; the state-level check asks that frame
products are literally copied with shifted labels.  Both sides of the
observational equation are affine in the system state, so quantifying over
pure states is exhaustive; each report records that justification.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import numerics as nm
from .composition import CompositeSystem, product_vec
from .core import (
    FrameWithMeasurement,
    GptError,
    LinearMapOnSystem,
    validate_transformation,
)
from .separability import is_separable_effect, is_separable_state
from .theories import adjoint_action_matrix
from .cmatrix import permutation_unitary

AFFINITY_NOTE = (
    "system states are quantified over the pure states only: both sides of the "
    "outcome-statistics identity are affine in the system state, so agreement on "
    "the extreme points is agreement on all normalized states"
)


class ScenarioError(GptError):
    """A fan-out scenario violates its structural preconditions."""


@dataclass
class DarwinismScenario:
    composite: CompositeSystem
    system_frame: FrameWithMeasurement
    env_frames: list
    transformation: LinearMapOnSystem
    name: str = "scenario"

    @property
    def d(self) -> int:
        return self.system_frame.size

    @property
    def n_env(self) -> int:
        return len(self.env_frames)

    def validate(self) -> None:
        if len(self.composite.factors) != self.n_env + 1:
            raise ScenarioError("factor count does not match the environment frames")
        for i, frame in enumerate([self.system_frame, *self.env_frames]):
            if frame.size != self.d:
                raise ScenarioError("all frames must have the same outcome count")
            if not frame.mci:
                raise ScenarioError("scenario frames must be maximal-classical-information frames")
            if frame.states[0].system is not self.composite.factors[i]:
                raise ScenarioError(f"frame {i} does not belong to factor {i}")
        if not self.transformation.reversible:
            raise ScenarioError("the candidate map must be reversible on the composite")

    def frame_state(self, factor: int, label: int):
        frame = self.system_frame if factor == 0 else self.env_frames[factor - 1]
        return frame.states[label % self.d].vec

    def frame_effect(self, factor: int, label: int):
        frame = self.system_frame if factor == 0 else self.env_frames[factor - 1]
        return frame.measurement.effects[label % self.d].vec


@dataclass
class CheckReport:
    scenario: str
    kind: str
    rows: list = field(default_factory=list)
    passed: bool = True
    worst_residual: float = 0.0
    notes: list = field(default_factory=list)

    def add_row(self, key, lhs, rhs, backend) -> None:
        residual = lhs - rhs
        ok = backend.is_zero(residual)
        self.rows.append({"tuple": key, "lhs": lhs, "rhs": rhs, "residual": residual})
        if not ok:
            self.passed = False
        self.worst_residual = max(self.worst_residual, abs(float(residual)))


def _system_pure_states(scenario: DarwinismScenario) -> list:
    return [s.vec for s in scenario.composite.factors[0].normalized_pure_states()]


def _tuple_rows(args):
    """Residual rows for a chunk of (state, initialization) pairs.

    Takes only plain tuples so the chunk can be evaluated in a worker process;
    results carry their keys for a deterministic sorted merge.
    """
    T, inputs, effect_rows, d, n_env = args
    rows = []
    for nu_idx, ks, invec, nu_stat in inputs:
        out = nm.mat_vec(T, invec)
        for jt, erow in effect_rows:
            j0 = jt[0]
            lhs = nm.dot(erow, out)
            delta = all((jt[1 + n] - j0 - ks[n]) % d == 0 for n in range(n_env))
            rhs = nu_stat[j0] if delta else nu_stat[j0] * 0
            rows.append(((nu_idx, ks, jt), lhs, rhs))
    return rows


def check_idealized_darwinism(scenario: DarwinismScenario, jobs: int = 1) -> CheckReport:
    """Outcome-level fan-out identity over all pure system states and index tuples."""
    scenario.validate()
    comp = scenario.composite
    be = comp.backend
    d, n_env = scenario.d, scenario.n_env
    report = CheckReport(scenario.name, "idealized-darwinism")
    report.notes.append(AFFINITY_NOTE)

    effect_rows = []
    for jt in itertools.product(range(d), repeat=n_env + 1):
        row = product_vec([scenario.frame_effect(i, j) for i, j in enumerate(jt)])
        effect_rows.append((jt, row))

    pure = _system_pure_states(scenario)
    system_effects = [scenario.frame_effect(0, j) for j in range(d)]
    inputs = []
    for nu_idx, nu in enumerate(pure):
        stats = tuple(nm.dot(e, nu) for e in system_effects)
        for ks in itertools.product(range(d), repeat=n_env):
            invec = product_vec([nu] + [scenario.frame_state(1 + n, k)
                                        for n, k in enumerate(ks)])
            inputs.append((nu_idx, ks, invec, stats))

    T = scenario.transformation.matrix
    if jobs > 1 and len(inputs) > 1:
        chunks = [inputs[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_tuple_rows,
                               [(T, c, effect_rows, d, n_env) for c in chunks])
        rows = [r for chunk in results for r in chunk]
        rows.sort(key=lambda r: r[0])
    else:
        rows = _tuple_rows((T, inputs, effect_rows, d, n_env))
    for key, lhs, rhs in rows:
        report.add_row(key, lhs, rhs, be)
    return report


def check_robust_spreading(scenario: DarwinismScenario) -> CheckReport:
    """State-level copying: frame products map to label-shifted frame products."""
    scenario.validate()
    comp = scenario.composite
    be = comp.backend
    d, n_env = scenario.d, scenario.n_env
    report = CheckReport(scenario.name, "robust-spreading")
    T = scenario.transformation.matrix
    for jt in itertools.product(range(d), repeat=n_env + 1):
        j0 = jt[0]
        invec = product_vec([scenario.frame_state(i, j) for i, j in enumerate(jt)])
        expected = product_vec(
            [scenario.frame_state(0, j0)]
            + [scenario.frame_state(1 + n, j0 + jt[1 + n]) for n in range(n_env)]
        )
        out = nm.mat_vec(T, invec)
        worst = be.zero
        for a, b in zip(out, expected):
            diff = a - b
            if abs(diff) > abs(worst):
                worst = diff
        report.add_row(jt, worst, be.zero, be)
    return report


def check_minimal_darwinism(scenario: DarwinismScenario, fixed_env_states) -> CheckReport:
    """Fan-out identity with one fixed pure initialization per environment."""
    scenario.validate()
    comp = scenario.composite
    be = comp.backend
    d, n_env = scenario.d, scenario.n_env
    if len(fixed_env_states) != n_env:
        raise ScenarioError("one fixed environment state per factor required")
    from .core import is_pure_state
    env_vecs = []
    for n, st in enumerate(fixed_env_states):
        v = st.vec if hasattr(st, "vec") else tuple(st)
        if not is_pure_state(comp.factors[1 + n], v):
            raise ScenarioError("fixed environment states must be pure")
        env_vecs.append(v)

    report = CheckReport(scenario.name, "minimal-darwinism")
    report.notes.append(AFFINITY_NOTE)
    effect_rows = []
    for jt in itertools.product(range(d), repeat=n_env + 1):
        row = product_vec([scenario.frame_effect(i, j) for i, j in enumerate(jt)])
        effect_rows.append((jt, row))
    system_effects = [scenario.frame_effect(0, j) for j in range(d)]
    T = scenario.transformation.matrix
    for nu in _system_pure_states(scenario):
        stats = tuple(nm.dot(e, nu) for e in system_effects)
        invec = product_vec([nu] + env_vecs)
        out = nm.mat_vec(T, invec)
        for jt, erow in effect_rows:
            j0 = jt[0]
            lhs = nm.dot(erow, out)
            delta = all(jt[1 + n] == j0 for n in range(n_env))
            rhs = stats[j0] if delta else stats[j0] * 0
            report.add_row((jt,), lhs, rhs, be)
    return report


# ---------------------------------------------------------------------------
# fan-out constructors
# ---------------------------------------------------------------------------

def fanout_label_map(d: int, n_env: int) -> dict:
    """(j0, j1..jN) -> (j0, j1+j0, ..., jN+j0) with addition modulo d."""
    out = {}
    for jt in itertools.product(range(d), repeat=n_env + 1):
        out[jt] = (jt[0],) + tuple((jt[0] + j) % d for j in jt[1:])
    return out


def build_fanout_classical(comp: CompositeSystem, d: int, n_env: int) -> LinearMapOnSystem:
    """Permutation matrix shifting every environment label by the system label."""
    labels = list(itertools.product(range(d), repeat=n_env + 1))
    index = {l: i for i, l in enumerate(labels)}
    fan = fanout_label_map(d, n_env)
    size = len(labels)
    be = comp.backend
    M = [[be.zero] * size for _ in range(size)]
    for l, i in index.items():
        M[index[fan[l]]][i] = be.one
    T = validate_transformation(comp, tuple(tuple(r) for r in M), name=f"fanout(d={d},N={n_env})")
    if not T.reversible:
        raise GptError("classical fan-out failed validation")
    return T


def build_fanout_quantum(comp: CompositeSystem, n_env: int) -> LinearMapOnSystem:
    """Adjoint action of the cascade of controlled-NOTs from the system wire."""
    wires = n_env + 1
    n = 2 ** wires
    perm = [0] * n
    for k in range(n):
        bits = [(k >> (wires - 1 - w)) & 1 for w in range(wires)]
        out = [bits[0]] + [b ^ bits[0] for b in bits[1:]]
        idx = 0
        for b in out:
            idx = (idx << 1) | b
        perm[k] = idx
    U = permutation_unitary(perm)
    M = adjoint_action_matrix(U, comp.meta["basis"], comp.meta["norms"])
    T = validate_transformation(comp, M, name=f"fanout-adjoint(N={n_env})")
    if not T.reversible:
        raise GptError("quantum fan-out failed validation")
    return T


def build_fanout_stm(comp: CompositeSystem, n_env: int) -> LinearMapOnSystem:
    from .stm import toy_fan
    return toy_fan(comp, n_env)


def construct_tid_from_effect_permutation(scenario: DarwinismScenario):
    """Build the fan-out map from its action on product effects, when liftable.

    Uses the composite's designated label lift to realize the effect
    permutation e_(j0, j) o T = e_(j0, j - j0); the identity is then verified
    on every product of frame effects before the map is returned.
    """
    comp = scenario.composite
    lift = comp.meta.get("label_lift")
    if lift is None:
        return None
    d, n_env = scenario.d, scenario.n_env
    M = lift(fanout_label_map(d, n_env))
    if M is None:
        return None
    T = validate_transformation(comp, M, name="fanout-from-effect-permutation")
    if not T.reversible:
        return None
    be = comp.backend
    for jt in itertools.product(range(d), repeat=n_env + 1):
        row = product_vec([scenario.frame_effect(i, j) for i, j in enumerate(jt)])
        pulled = nm.vec_mat(row, T.matrix)
        shifted = (jt[0],) + tuple((j - jt[0]) % d for j in jt[1:])
        expected = product_vec([scenario.frame_effect(i, j) for i, j in enumerate(shifted)])
        if any(not be.eq(a, b) for a, b in zip(pulled, expected)):
            raise GptError("label lift does not realize the effect permutation")
    return T


# ---------------------------------------------------------------------------
# theorem witnesses
# ---------------------------------------------------------------------------

@dataclass
class WitnessReport:
    scenario: str
    kind: str
    found: bool
    input_description: tuple | None = None
    verdict: object = None
    contradiction: bool = False
    searched: int = 0


def demo_entangled_output(scenario: DarwinismScenario) -> WitnessReport:
    """First pure product input (system state outside the frame) whose image is
    certified entangled; exhaustion contradicts the entanglement-necessity claim
    when the frame is not quasi-classical."""
    comp = scenario.composite
    be = comp.backend
    d, n_env = scenario.d, scenario.n_env
    frame_keys = set()
    from .cones import canonical_ray
    for s in scenario.system_frame.states:
        frame_keys.add(canonical_ray(s.vec, be))
    report = WitnessReport(scenario.name, "entangled-output", False)
    for nu_idx, nu in enumerate(_system_pure_states(scenario)):
        if canonical_ray(nu, be) in frame_keys:
            continue
        for ks in itertools.product(range(d), repeat=n_env):
            invec = product_vec([nu] + [scenario.frame_state(1 + n, k)
                                        for n, k in enumerate(ks)])
            out = nm.mat_vec(scenario.transformation.matrix, invec)
            report.searched += 1
            verdict = is_separable_state(comp, out)
            if not verdict.separable:
                report.found = True
                report.input_description = (nu_idx, ks)
                report.verdict = verdict
                return report
    report.contradiction = True
    return report


def demo_entangled_effect(scenario: DarwinismScenario) -> WitnessReport:
    """First pure product frame effect whose pullback is certified entangled."""
    comp = scenario.composite
    d, n_env = scenario.d, scenario.n_env
    report = WitnessReport(scenario.name, "entangled-effect", False)
    for jt in itertools.product(range(d), repeat=n_env + 1):
        row = product_vec([scenario.frame_effect(i, j) for i, j in enumerate(jt)])
        pulled = nm.vec_mat(row, scenario.transformation.matrix)
        report.searched += 1
        verdict = is_separable_effect(comp, pulled)
        if not verdict.separable:
            report.found = True
            report.input_description = (jt,)
            report.verdict = verdict
            return report
    report.contradiction = True
    return report


# ---------------------------------------------------------------------------
# ready-made scenarios
# ---------------------------------------------------------------------------

def classical_fanout_scenario(d: int, n_env: int) -> DarwinismScenario:
    from .core import find_mci_frames
    from .theories import cpt
    from .composition import compose
    factors = [cpt(d) for _ in range(n_env + 1)]
    comp = compose(factors, "min_tensor", name=f"cpt({d})^{n_env + 1}")
    comp.meta["kind"] = "cpt-composite"
    comp.meta["label_lift"] = lambda lm: _classical_label_lift(comp, d, lm)
    frames = [find_mci_frames(f)[0] for f in factors]
    T = build_fanout_classical(comp, d, n_env)
    return DarwinismScenario(comp, frames[0], frames[1:], T,
                             name=f"classical-fanout(d={d},N={n_env})")


def _classical_label_lift(comp, d, label_map):
    labels = list(itertools.product(range(d), repeat=len(comp.factors)))
    index = {l: i for i, l in enumerate(labels)}
    be = comp.backend
    size = len(labels)
    M = [[be.zero] * size for _ in range(size)]
    for l, i in index.items():
        img = label_map.get(l)
        if img is None:
            return None
        M[index[tuple(img)]][i] = be.one
    return tuple(tuple(r) for r in M)


def quantum_fanout_scenario(n_env: int, transformation=None) -> DarwinismScenario:
    from .theories import qt_composite
    comp = qt_composite(n_env + 1)
    frames = [f.frames[0] for f in comp.factors]
    T = transformation if transformation is not None else build_fanout_quantum(comp, n_env)
    return DarwinismScenario(comp, frames[0], frames[1:], T,
                             name=f"quantum-fanout(N={n_env})")


def stm_fan_scenario(n_env: int) -> DarwinismScenario:
    from .core import find_mci_frames
    from .stm import stm_composite, toy_fan
    comp = stm_composite(n_env + 1)
    frames = []
    for f in comp.factors:
        zframe = _stm_z_frame(f)
        frames.append(zframe)
    T = toy_fan(comp, n_env)
    return DarwinismScenario(comp, frames[0], frames[1:], T,
                             name=f"stm-fan(N={n_env})")


def _stm_z_frame(factor) -> FrameWithMeasurement:
    from .core import find_mci_frames
    for frame in find_mci_frames(factor):
        supports = [frozenset(i for i, x in enumerate(s.vec) if x) for s in frame.states]
        if supports == [frozenset({0, 1}), frozenset({2, 3})]:
            return frame
        if supports == [frozenset({2, 3}), frozenset({0, 1})]:
            return frame.relabeled((1, 0))
    raise GptError("toy bit is missing its z frame")
