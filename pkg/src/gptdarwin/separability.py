"""Separability certificates for composite states and effects.

A state of a composite is separable when it is a convex mixture of products
of normalized pure local states; an effect when it is a sum of products of
local effects.  Both reduce to membership in the cone spanned by products of
local extreme rays, decided by the exact LP with either nonnegative weights
or a separating hyperplane as the certificate.  Every verdict re-verifies its
own certificate before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import itertools

from . import numerics as nm
from .cones import CertificateError, Cone, canonical_ray, cone_membership, extreme_rays
from .composition import CompositeSystem, product_vec
from .core import Effect, GptError, LinearMapOnSystem, State


@dataclass
class SeparabilityVerdict:
    separable: bool
    point: tuple
    kind: str                      # "state" or "effect"
    weights: tuple | None = None   # over the product generator list
    generators: tuple | None = None
    witness: tuple | None = None

    def verify(self, backend) -> None:
        if self.separable:
            recon = tuple(backend.zero for _ in self.point)
            for w, g in zip(self.weights, self.generators):
                if backend.lt(w, backend.zero):
                    raise CertificateError("negative separability weight")
                if w:
                    recon = nm.vec_add(recon, nm.vec_scale(w, g))
            if any(not backend.eq(a, b) for a, b in zip(recon, self.point)):
                raise CertificateError("separable decomposition does not reproduce the object")
        else:
            for g in self.generators:
                if backend.lt(nm.dot(self.witness, g), backend.zero):
                    raise CertificateError("witness negative on a product generator")
            if not backend.lt(nm.dot(self.witness, self.point), backend.zero):
                raise CertificateError("witness fails to separate the object")

    @property
    def nonzero_terms(self) -> int:
        if not self.separable:
            return 0
        return sum(1 for w in self.weights if w)


def _local_pure_state_rays(factor) -> list:
    rays = (factor.state_cone.generators if factor.generators_minimal
            else extreme_rays(factor.state_cone))
    out = []
    for r in rays:
        n = nm.dot(factor.unit, r)
        out.append(tuple(x / n for x in r))
    return out


def separable_state_generators(comp: CompositeSystem) -> list:
    """Products of normalized pure local states, deduplicated canonically."""
    locals_ = [_local_pure_state_rays(f) for f in comp.factors]
    seen = {}
    for combo in itertools.product(*locals_):
        v = product_vec(list(combo))
        seen.setdefault(canonical_ray(v, comp.backend), v)
    return list(seen.values())


def separable_effect_generators(comp: CompositeSystem) -> list:
    locals_ = []
    for f in comp.factors:
        rays = (f.effect_cone.generators if f.generators_minimal
                else extreme_rays(f.effect_cone))
        locals_.append([tuple(r) for r in rays])
    seen = {}
    for combo in itertools.product(*locals_):
        v = product_vec(list(combo))
        seen.setdefault(canonical_ray(v, comp.backend), v)
    return list(seen.values())


def is_separable_state(comp: CompositeSystem, omega) -> SeparabilityVerdict:
    """Certified separability of a composite state.

    For normalized input the Inside weights are a probability distribution
    over products of normalized pure states (they sum to the normalization).
    """
    be = comp.backend
    v = omega.vec if isinstance(omega, State) else tuple(omega)
    gens = separable_state_generators(comp)
    res = cone_membership(Cone(comp.dim, tuple(gens), be), v)
    if res.inside:
        verdict = SeparabilityVerdict(True, v, "state",
                                      weights=res.weights, generators=tuple(gens))
        total = sum(res.weights, start=be.zero)
        if not be.eq(total, nm.dot(comp.unit, v)):
            raise CertificateError("separable state weights do not sum to the normalization")
    else:
        verdict = SeparabilityVerdict(False, v, "state",
                                      generators=tuple(gens), witness=res.witness)
    verdict.verify(be)
    return verdict


def is_separable_effect(comp: CompositeSystem, effect) -> SeparabilityVerdict:
    be = comp.backend
    v = effect.vec if isinstance(effect, Effect) else tuple(effect)
    gens = separable_effect_generators(comp)
    res = cone_membership(Cone(comp.dim, tuple(gens), be), v)
    if res.inside:
        verdict = SeparabilityVerdict(True, v, "effect",
                                      weights=res.weights, generators=tuple(gens))
    else:
        verdict = SeparabilityVerdict(False, v, "effect",
                                      generators=tuple(gens), witness=res.witness)
    verdict.verify(be)
    return verdict


def pullback_effect(comp: CompositeSystem, effect, T: LinearMapOnSystem) -> Effect:
    """The effect e compose T (measure after transforming)."""
    v = effect.vec if isinstance(effect, Effect) else tuple(effect)
    out = nm.vec_mat(v, T.matrix)
    if not comp.effect_contains(out):
        raise GptError("pullback left the effect cone; the map does not preserve effects")
    return Effect(out, comp)
