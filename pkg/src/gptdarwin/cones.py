"""Finitely generated convex cones with certified queries.

A :class:`Cone` is a list of generator vectors in an ambient dimension.
Membership queries return a :class:`MembershipVerdict` that either carries
nonnegative weights reproducing the point or a separating hyperplane; both
sides of the verdict re-verify themselves before being returned, so a bug in
the solver cannot silently leak a wrong answer.

Dual cones are computed by the double description method restricted to the
cone's linear span, extended by a plus/minus basis of the orthogonal
complement when the generators do not span the ambient space.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import numerics as nm
from .linprog import solve_conic_combination
from .numerics import Backend, DimensionMismatch


class CertificateError(Exception):
    """An LP verdict failed its own re-verification."""


def canonical_ray(v, backend: Backend):
    """Scale a ray deterministically: rationals get leading entry +-1, floats unit norm."""
    if backend.exact:
        lead = next((x for x in v if x != 0), None)
        if lead is None:
            return tuple(v)
        return tuple(x / abs(lead) for x in v)
    norm = sum(float(x) * float(x) for x in v) ** 0.5
    if norm <= backend.eps:
        return tuple(0.0 for _ in v)
    return tuple(float(x) / norm for x in v)


def ray_sort_key(v):
    return tuple(float(x) for x in v)


@dataclass
class Cone:
    dim: int
    generators: tuple
    backend: Backend
    _extreme: tuple | None = field(default=None, repr=False)
    _dual: "Cone | None" = field(default=None, repr=False)

    def __post_init__(self):
        self.generators = tuple(tuple(g) for g in self.generators)
        for g in self.generators:
            if len(g) != self.dim:
                raise DimensionMismatch(
                    f"generator of length {len(g)} in ambient dimension {self.dim}"
                )

    def rank(self) -> int:
        return nm.matrix_rank(list(self.generators), self.backend)

    def is_pointed(self) -> bool:
        """No nonzero v has both v and -v in the cone.

        Equivalently no nonzero nonnegative combination of generators vanishes;
        decided by one LP on the homogenized system.
        """
        nonzero = [g for g in self.generators
                   if any(not self.backend.is_zero(x) for x in g)]
        if not nonzero:
            return True
        # sum_i c_i g_i = 0, sum_i c_i = 1, c >= 0 feasible  <=>  not pointed
        lifted = [tuple(g) + (self.backend.one,) for g in nonzero]
        target = nm.zeros(self.dim, self.backend) + (self.backend.one,)
        return not solve_conic_combination(lifted, target, self.backend).feasible


@dataclass
class MembershipVerdict:
    inside: bool
    point: tuple
    weights: tuple | None = None
    witness: tuple | None = None

    def verify(self, cone: Cone) -> None:
        """Re-check the certificate against the cone; raise if it does not hold."""
        be = cone.backend
        if self.inside:
            recon = nm.zeros(cone.dim, be)
            for w, g in zip(self.weights, cone.generators):
                if be.lt(w, be.zero):
                    raise CertificateError("negative weight in membership certificate")
                if w:
                    recon = nm.vec_add(recon, nm.vec_scale(w, g))
            if any(not be.eq(a, b) for a, b in zip(recon, self.point)):
                raise CertificateError("weights do not reproduce the point")
        else:
            for g in cone.generators:
                if be.lt(nm.dot(self.witness, g), be.zero):
                    raise CertificateError("witness is negative on a generator")
            if not be.lt(nm.dot(self.witness, self.point), be.zero):
                raise CertificateError("witness is not negative on the point")


def cone_membership(cone: Cone, point) -> MembershipVerdict:
    """Certified membership of ``point`` in ``cone`` (exact LP feasibility)."""
    if len(point) != cone.dim:
        raise DimensionMismatch(
            f"point of length {len(point)} against cone of dimension {cone.dim}"
        )
    be = cone.backend
    res = solve_conic_combination(list(cone.generators), tuple(point), be)
    if res.feasible:
        verdict = MembershipVerdict(True, tuple(point), weights=res.weights)
    else:
        witness = canonical_ray(res.witness, be)
        verdict = MembershipVerdict(False, tuple(point), witness=witness)
    verdict.verify(cone)
    return verdict


def extreme_rays(cone: Cone) -> list:
    """Minimal generator subset: a ray is kept iff it is outside the hull of the rest."""
    if cone._extreme is not None:
        return list(cone._extreme)
    be = cone.backend
    seen = {}
    for g in cone.generators:
        c = canonical_ray(g, be)
        if any(v for v in c) and c not in seen:
            seen[c] = g
    rays = list(seen.keys())
    keep = list(rays)
    for ray in rays:
        others = [r for r in keep if r != ray]
        if not others:
            continue
        res = solve_conic_combination(others, ray, be)
        if res.feasible:
            keep.remove(ray)
    cone._extreme = tuple(keep)
    return list(keep)


# ---------------------------------------------------------------------------
# double description
# ---------------------------------------------------------------------------

def _double_description(rows, dim, backend: Backend):
    """Extreme rays of {x : row . x >= 0 for all rows}.

    Requires the matrix of rows to have full column rank ``dim`` (the cone is
    then pointed).  Rows are inserted in the given order; pairs of rays are
    combined only when algebraically adjacent (their common active set has
    rank dim-2), which keeps the description minimal throughout.
    """
    be = backend
    order = sorted(range(len(rows)), key=lambda i: ray_sort_key(rows[i]))
    # initial simplicial cone from the first dim independent rows
    init = []
    for i in order:
        if nm.matrix_rank([rows[j] for j in init] + [rows[i]], be) > len(init):
            init.append(i)
        if len(init) == dim:
            break
    if len(init) < dim:
        raise ValueError("double description needs a full-rank inequality system")
    Binv = nm.invert_matrix([rows[i] for i in init], be)
    rays = [canonical_ray(col, be) for col in nm.transpose(Binv)]
    processed = list(init)

    for i in order:
        if i in init:
            continue
        a = rows[i]
        vals = {r: nm.dot(a, r) for r in rays}
        plus = [r for r in rays if be.lt(be.zero, vals[r])]
        null = [r for r in rays if be.is_zero(vals[r])]
        minus = [r for r in rays if be.lt(vals[r], be.zero)]
        if not minus:
            rays = plus + null
            processed.append(i)
            continue
        new_rays = []
        for rp, rm in itertools.product(plus, minus):
            active = [rows[j] for j in processed
                      if be.is_zero(nm.dot(rows[j], rp)) and be.is_zero(nm.dot(rows[j], rm))]
            if nm.matrix_rank(active, be) != dim - 2:
                continue
            combo = nm.vec_sub(nm.vec_scale(vals[rp], rm), nm.vec_scale(vals[rm], rp))
            new_rays.append(canonical_ray(combo, be))
        merged = {}
        for r in plus + null + new_rays:
            merged.setdefault(r, r)
        rays = list(merged.values())
        processed.append(i)

    uniq = {}
    for r in rays:
        uniq.setdefault(r, r)
    return sorted(uniq.values(), key=ray_sort_key)


def dual_cone(cone: Cone) -> Cone:
    """Generators of {e : e . g >= 0 for every generator g}."""
    if not cone.generators:
        raise ValueError("dual cone of an empty generator list")
    if cone._dual is not None:
        return cone._dual
    be = cone.backend
    span = nm.row_space_basis(list(cone.generators), be)
    r = len(span)
    gens = []
    if r:
        # e restricted to the span: e = sum_k y_k span_k with G y >= 0
        M = [tuple(nm.dot(g, b) for b in span) for g in cone.generators]
        for y in _double_description(M, r, be):
            e = nm.zeros(cone.dim, be)
            for yk, b in zip(y, span):
                if yk:
                    e = nm.vec_add(e, nm.vec_scale(yk, b))
            gens.append(canonical_ray(e, be))
    # the orthogonal complement of the span is free in both directions
    for v in nm.null_space(list(span), be) if r else [nm.identity(cone.dim, be)[i] for i in range(cone.dim)]:
        c = canonical_ray(v, be)
        gens.append(c)
        gens.append(canonical_ray(nm.vec_scale(-be.one, c), be))
    uniq = {}
    for g in sorted(gens, key=ray_sort_key):
        uniq.setdefault(g, g)
    out = Cone(cone.dim, tuple(uniq.values()), be)
    cone._dual = out
    return out
