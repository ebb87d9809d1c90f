"""Composite systems: product maps, marginal/conditional states, axiom checks.

The product of states (and of effects) is the coordinate Kronecker product,
applied pairwise in a fixed left-associated order.  Composites are built three
ways: ``min_tensor`` (state cone spanned by products, effects by duality),
``max_tensor`` (effect cone spanned by products, states by duality) and
``explicit`` (cones supplied by a theory-specific builder).  Tomographic
locality is never assumed: conditional states are reconstructed purely from
the factor's effect space being generating.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import numerics as nm
from .cones import Cone, canonical_ray, cone_membership, dual_cone, extreme_rays
from .core import Effect, GptSystem, InvariantViolation, State


class CompositionError(InvariantViolation):
    """A composition axiom failed on concrete inputs."""


PAIR_CHECK_CAP = 200_000


@dataclass(eq=False)
class CompositeSystem(GptSystem):
    factors: tuple = ()
    method: str = "explicit"

    def factor_index_blocks(self):
        dims = [f.dim for f in self.factors]
        return dims


def product_vec(vecs) -> tuple:
    """Left-associated Kronecker product of coordinate vectors."""
    out = vecs[0]
    for v in vecs[1:]:
        out = nm.kron(out, v)
    return out


def compose(factors, method: str, name: str = "", state_generators=None,
            effect_generators=None, state_oracle=None, effect_oracle=None,
            generators_minimal: bool = False, check: bool = True) -> CompositeSystem:
    """Build a composite of two or more systems.

    ``min_tensor``/``max_tensor`` derive one cone from products of local
    extreme rays and the other by duality.  ``explicit`` takes caller-supplied
    generator lists (products must be among, or inside, them).
    """
    if len(factors) < 2:
        raise CompositionError("a composite needs at least two factors")
    backend = factors[0].backend
    if any(f.backend != backend for f in factors):
        raise CompositionError("all factors must share one numeric backend")
    dim = 1
    for f in factors:
        dim *= f.dim
    unit = product_vec([f.unit for f in factors])

    state_products = [product_vec(vs) for vs in
                      itertools.product(*[list(f.state_cone.generators) for f in factors])]
    effect_products = [product_vec(vs) for vs in
                       itertools.product(*[list(f.effect_cone.generators) for f in factors])]

    if method == "min_tensor":
        state_gens = _dedupe(state_products, backend)
        effect_gens = tuple(extreme_rays(dual_cone(Cone(dim, tuple(state_gens), backend))))
    elif method == "max_tensor":
        effect_gens = _dedupe(effect_products, backend)
        state_gens = tuple(extreme_rays(dual_cone(Cone(dim, tuple(effect_gens), backend))))
    elif method == "explicit":
        if state_generators is None or effect_generators is None:
            raise CompositionError("explicit composition requires both cones")
        state_gens = tuple(tuple(g) for g in state_generators)
        effect_gens = tuple(tuple(g) for g in effect_generators)
    else:
        raise CompositionError(f"unknown composition method {method!r}")

    comp = CompositeSystem(
        name=name or "(" + " (x) ".join(f.name for f in factors) + ")",
        dim=dim,
        backend=backend,
        state_cone=Cone(dim, tuple(state_gens), backend),
        effect_cone=Cone(dim, tuple(effect_gens), backend),
        unit=unit,
        state_oracle=state_oracle,
        effect_oracle=effect_oracle,
        generators_minimal=generators_minimal,
        factors=tuple(factors),
        method=method,
    )
    if check:
        _construction_checks(comp, state_products, effect_products)
    return comp


def _dedupe(vecs, backend):
    seen = {}
    for v in vecs:
        seen.setdefault(canonical_ray(v, backend), v)
    return tuple(seen.values())


def _construction_checks(comp: CompositeSystem, state_products, effect_products):
    be = comp.backend
    # products of normalized states are normalized (item i, on generators)
    for f in comp.factors:
        for g in f.state_cone.generators:
            if be.le(nm.dot(f.unit, g), be.zero):
                raise CompositionError("factor state generator with nonpositive normalization")
    for p in state_products[: PAIR_CHECK_CAP]:
        if not comp.state_contains(p):
            raise CompositionError("item i: a product state escapes the composite cone")
    for p in effect_products[: PAIR_CHECK_CAP]:
        if not comp.effect_contains(p):
            raise CompositionError("item ii: a product effect escapes the composite cone")
    gap = nm.vec_sub(comp.unit, product_vec([f.unit for f in comp.factors]))
    if not comp.effect_contains(gap):
        raise CompositionError("item ii: u (x) u exceeds the composite unit")


# ---------------------------------------------------------------------------
# products, marginals, conditionals
# ---------------------------------------------------------------------------

def product_state(comp: CompositeSystem, locals_) -> State:
    if len(locals_) != len(comp.factors):
        raise CompositionError("one local state per factor required")
    vecs = [s.vec if isinstance(s, State) else tuple(s) for s in locals_]
    v = product_vec(vecs)
    if not comp.state_contains(v):
        raise CompositionError("product state outside the composite state cone")
    return State(v, comp)


def product_effect(comp: CompositeSystem, locals_) -> Effect:
    if len(locals_) != len(comp.factors):
        raise CompositionError("one local effect per factor required")
    vecs = [e.vec if isinstance(e, Effect) else tuple(e) for e in locals_]
    v = product_vec(vecs)
    if not comp.effect_contains(v):
        raise CompositionError("product effect outside the composite effect cone")
    return Effect(v, comp)


def _effect_row(comp: CompositeSystem, keep: int, keep_vec, given: dict) -> tuple:
    rows = []
    for idx, f in enumerate(comp.factors):
        if idx == keep:
            rows.append(keep_vec)
        elif idx in given:
            g = given[idx]
            rows.append(g.vec if isinstance(g, Effect) else tuple(g))
        else:
            rows.append(f.unit)
    return product_vec(rows)


def conditional_state(comp: CompositeSystem, omega, keep: int, given: dict | None = None) -> State:
    """Subnormalized state on factor ``keep`` given outcome effects on other factors.

    Factors not named in ``given`` are marginalized (their unit effect is
    applied).  The reconstruction solves e_i(w~) = (e_i (x) f)(w) over a
    maximal independent subset of the factor's effect generators, then checks
    the result lies in the factor's state cone; failure is reported as a
    composition-axiom violation rather than silently accepted.
    """
    given = given or {}
    be = comp.backend
    factor = comp.factors[keep]
    omega_vec = omega.vec if isinstance(omega, State) else tuple(omega)
    span = nm.row_space_basis(list(factor.effect_cone.generators), be)
    if len(span) < factor.dim:
        raise CompositionError("factor effect cone is not generating")
    values = [nm.dot(_effect_row(comp, keep, e, given), omega_vec) for e in span]
    solution = nm.solve_linear_system(list(span), tuple(values), be)
    if solution is None:
        raise CompositionError("conditional state reconstruction is inconsistent")
    if not factor.state_contains(solution):
        raise CompositionError(
            "conditional state escapes the factor state cone (composition axiom vi)"
        )
    return State(solution, factor)


def marginal_state(comp: CompositeSystem, omega, keep: int) -> State:
    return conditional_state(comp, omega, keep, {})


def conditional_effect(comp: CompositeSystem, effect, fix: int, state) -> Effect:
    """Effect on the remaining factors after plugging ``state`` into factor ``fix``.

    Only meaningful for two-factor composites, where "remaining" is the other
    factor; used by the composition validator (axiom item v).
    """
    if len(comp.factors) != 2:
        raise CompositionError("conditional effects are defined pairwise")
    be = comp.backend
    e = effect.vec if isinstance(effect, Effect) else tuple(effect)
    s = state.vec if isinstance(state, State) else tuple(state)
    dA, dB = comp.factors[0].dim, comp.factors[1].dim
    if fix == 0:
        out = [be.zero] * dB
        for a in range(dA):
            if not s[a]:
                continue
            for b in range(dB):
                if e[a * dB + b]:
                    out[b] = out[b] + s[a] * e[a * dB + b]
        return Effect(tuple(out), comp.factors[1])
    out = [be.zero] * dA
    for b in range(dB):
        if not s[b]:
            continue
        for a in range(dA):
            if e[a * dB + b]:
                out[a] = out[a] + s[b] * e[a * dB + b]
    return Effect(tuple(out), comp.factors[0])


# ---------------------------------------------------------------------------
# axiom validation
# ---------------------------------------------------------------------------

@dataclass
class CompositionReport:
    system: str
    items: dict = field(default_factory=dict)
    truncated: bool = False

    @property
    def all_passed(self) -> bool:
        return all(ok for ok, _ in self.items.values())

    def record(self, item: str, ok: bool, detail: str = ""):
        current = self.items.get(item)
        if current is None or (current[0] and not ok):
            self.items[item] = (ok, detail)




def validate_composition(comp: CompositeSystem) -> CompositionReport:
    """Check the composition axioms on generator pairs; report per item."""
    be = comp.backend
    report = CompositionReport(system=comp.name)
    unit_prod = product_vec([f.unit for f in comp.factors])

    # item i: all product states are allowed and normalized
    state_pairs = list(itertools.product(*[f.state_cone.generators for f in comp.factors]))
    if len(state_pairs) > PAIR_CHECK_CAP:
        state_pairs = state_pairs[:PAIR_CHECK_CAP]
        report.truncated = True
    for combo in state_pairs:
        norms = [nm.dot(f.unit, g) for f, g in zip(comp.factors, combo)]
        vecs = [tuple(x / n for x in g) for g, n in zip(combo, norms)]
        p = product_vec(vecs)
        if not be.eq(nm.dot(comp.unit, p), be.one):
            report.record("i", False, "product of normalized states is not normalized")
            break
        if not comp.state_contains(p):
            report.record("i", False, "product state outside the composite cone")
            break
    report.record("i", True)

    # item ii: products of valid effects are valid; u (x) u <= u_AB
    effect_pairs = list(itertools.product(*[f.effect_cone.generators for f in comp.factors]))
    if len(effect_pairs) > PAIR_CHECK_CAP:
        effect_pairs = effect_pairs[:PAIR_CHECK_CAP]
        report.truncated = True
    for combo in effect_pairs:
        p = product_vec(list(combo))
        if not comp.effect_contains(p):
            report.record("ii", False, "product effect outside the composite effect cone")
            break
    if not comp.effect_contains(nm.vec_sub(comp.unit, unit_prod)):
        report.record("ii", False, "u (x) u exceeds the composite unit effect")
    report.record("ii", True)

    # item iii: statistical independence on products
    count = 0
    for s_combo in state_pairs:
        sp = product_vec([tuple(g) for g in s_combo])
        for e_combo in effect_pairs:
            ep = product_vec([tuple(g) for g in e_combo])
            lhs = nm.dot(ep, sp)
            rhs = be.one
            for f, g_s, g_e in zip(comp.factors, s_combo, e_combo):
                rhs = rhs * nm.dot(tuple(g_e), tuple(g_s))
            if not be.eq(lhs, rhs):
                report.record("iii", False, "product probabilities do not factorize")
                break
            count += 1
            if count > PAIR_CHECK_CAP:
                report.truncated = True
                break
        if count > PAIR_CHECK_CAP or report.items.get("iii", (True,))[0] is False:
            break
    report.record("iii", True)

    # item iv: products of pure states (effects) are pure
    _check_purity_item(comp, report)

    # items v and vi: conditional objects stay in the local cones
    if len(comp.factors) == 2:
        _check_conditional_items(comp, report)
    else:
        report.truncated = True
        report.record("v", True, "checked on the two-factor sub-composites only")
        report.record("vi", True, "checked on the two-factor sub-composites only")
    report.record("v", True)
    report.record("vi", True)
    return report


def _check_purity_item(comp: CompositeSystem, report: CompositionReport):
    be = comp.backend
    state_gens = list(comp.state_cone.generators)
    effect_gens = list(comp.effect_cone.generators)
    if len(state_gens) > 200 or len(effect_gens) > 200:
        report.record("iv", True, "skipped (generator count above LP budget)")
        report.truncated = True
        return
    pure_locals = [
        [tuple(r) for r in (f.state_cone.generators if f.generators_minimal
                            else extreme_rays(f.state_cone))]
        for f in comp.factors
    ]
    for combo in itertools.product(*pure_locals):
        p = product_vec(list(combo))
        cp = canonical_ray(p, be)
        others = [g for g in state_gens if canonical_ray(g, be) != cp]
        if cone_membership(Cone(comp.dim, tuple(others), be), p).inside:
            report.record("iv", False, "a product of pure states is not extreme")
            return
    pure_local_effects = [
        [tuple(r) for r in (f.effect_cone.generators if f.generators_minimal
                            else extreme_rays(f.effect_cone))]
        for f in comp.factors
    ]
    for combo in itertools.product(*pure_local_effects):
        p = product_vec(list(combo))
        cp = canonical_ray(p, be)
        others = [g for g in effect_gens if canonical_ray(g, be) != cp]
        if cone_membership(Cone(comp.dim, tuple(others), be), p).inside:
            report.record("iv", False, "a product of pure effects is not extreme")
            return
    report.record("iv", True)


def _check_conditional_items(comp: CompositeSystem, report: CompositionReport):
    """Items v and vi for a two-factor composite."""
    be = comp.backend
    A, B = comp.factors

    def normalized(f, g):
        n = nm.dot(f.unit, g)
        return tuple(x / n for x in g)

    # item v: plugging a normalized local state into a composite effect must
    # leave a valid effect on the other factor
    for e in comp.effect_cone.generators:
        eff = Effect(tuple(e), comp)
        for g in A.state_cone.generators:
            cond = conditional_effect(comp, eff, 0, normalized(A, g))
            if not B.effect_contains(cond.vec):
                report.record("v", False, "left-conditioned effect invalid on the right factor")
                return
        for g in B.state_cone.generators:
            cond = conditional_effect(comp, eff, 1, normalized(B, g))
            if not A.effect_contains(cond.vec):
                report.record("v", False, "right-conditioned effect invalid on the left factor")
                return

    # item vi: conditional states land inside the local state cones
    for omega in comp.state_cone.generators:
        w = normalized(comp, omega)
        for f_eff in B.effect_cone.generators:
            try:
                conditional_state(comp, w, 0, {1: tuple(f_eff)})
            except CompositionError:
                report.record("vi", False, "conditional state escapes the first factor cone")
                return
        for e_eff in A.effect_cone.generators:
            try:
                conditional_state(comp, w, 1, {0: tuple(e_eff)})
            except CompositionError:
                report.record("vi", False, "conditional state escapes the second factor cone")
                return
