"""The toy-bit theory: epistemically restricted classical bits as a GPT.

An elementary system is a hidden variable with four values; states of maximal
knowledge pin down exactly half the information.  Pure epistemic states are
enumerated through their stabilizer description: a sign character on a
maximal subgroup of the diagonal observable group {I,X,Y,Z}^n whose image
under the obvious relabelling into Pauli words is commuting.  Encoding each
observable as a GF(2) pair per wire turns that into enumerating Lagrangian
subspaces of GF(2)^(2n), and the support of a (subgroup, signs) pair is the
set of ontic states on which every generator evaluates to its sign.

Transformations are permutations of the ontic states that map every pure
support onto a pure support.  The fan-out permutation, the constrained
searches (classical-implementation, full transformation group) and the
strong-symmetry check all live here.
"""

from __future__ import annotations

import itertools
import json
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import numerics as nm
from .cones import Cone, canonical_ray, cone_membership
from .composition import CompositeSystem, compose
from .core import (
    Effect,
    FrameWithMeasurement,
    GptError,
    GptSystem,
    LinearMapOnSystem,
    Measurement,
    State,
    validate_transformation,
)
from .numerics import RATIONAL

CACHE_ENV = "GPTDARWIN_CACHE"
GROUP_FORMAT_VERSION = 1

# single-wire observables as (x, z) GF(2) pairs
WIRE_OBS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
OBS_NAMES = {v: k for k, v in WIRE_OBS.items()}


# ---------------------------------------------------------------------------
# ontic coordinates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OnticSpace:
    n_bits: int

    @property
    def size(self) -> int:
        return 4 ** self.n_bits

    def index(self, labels) -> int:
        """Ontic tuple of 1-based labels -> basis index (first wire major)."""
        idx = 0
        for l in labels:
            idx = idx * 4 + (l - 1)
        return idx

    def labels(self, idx: int) -> tuple:
        out = []
        for _ in range(self.n_bits):
            out.append(idx % 4 + 1)
            idx //= 4
        return tuple(reversed(out))

    def xz_bits(self, idx: int) -> tuple:
        """Per-wire (x, z) sign bits: label 1 -> (0,0), 2 -> (1,0), 3 -> (0,1), 4 -> (1,1)."""
        lab = self.labels(idx)
        return tuple(((l - 1) & 1, (l - 1) >> 1) for l in lab)

    def from_xz(self, bits) -> int:
        labels = [1 + (x | (z << 1)) for x, z in bits]
        return self.index(labels)


def observable_values(space: OnticSpace, word) -> tuple:
    """Diagonal of a +1-signed observable word over all ontic states."""
    vals = []
    for idx in range(space.size):
        bits = space.xz_bits(idx)
        v = 1
        for (wx, wz), (ox, oz) in zip(word, bits):
            if (wx * ox) ^ (wz * oz):
                v = -v
        vals.append(v)
    return tuple(vals)


@dataclass(frozen=True)
class ToyObservable:
    """A signed word over {I, X, Y, Z}: sign * product of per-wire observables."""

    word: tuple  # ((x, z) per wire)
    sign: int = 1

    @property
    def name(self) -> str:
        s = "+" if self.sign == 1 else "-"
        return s + "".join(OBS_NAMES[w] for w in self.word)

    def values(self, space: OnticSpace) -> tuple:
        base = observable_values(space, self.word)
        return base if self.sign == 1 else tuple(-v for v in base)

    def __mul__(self, other: "ToyObservable") -> "ToyObservable":
        word = tuple((a[0] ^ b[0], a[1] ^ b[1]) for a, b in zip(self.word, other.word))
        return ToyObservable(word, self.sign * other.sign)


def _word_value_at(space: OnticSpace, word, idx: int) -> int:
    v = 1
    for (wx, wz), (ox, oz) in zip(word, space.xz_bits(idx)):
        if (wx * ox) ^ (wz * oz):
            v = -v
    return v


# ---------------------------------------------------------------------------
# pure epistemic states
# ---------------------------------------------------------------------------

def _word_to_int(word) -> int:
    """Pack ((x,z) per wire) into an integer for GF(2) linear algebra."""
    v = 0
    for i, (x, z) in enumerate(word):
        v |= x << (2 * i)
        v |= z << (2 * i + 1)
    return v


def _int_to_word(v: int, n: int) -> tuple:
    return tuple(((v >> (2 * i)) & 1, (v >> (2 * i + 1)) & 1) for i in range(n))


def symplectic(a: int, b: int, n: int) -> int:
    """Pauli commutation pairing of two packed words (0 = commute)."""
    s = 0
    for i in range(n):
        ax, az = (a >> (2 * i)) & 1, (a >> (2 * i + 1)) & 1
        bx, bz = (b >> (2 * i)) & 1, (b >> (2 * i + 1)) & 1
        s ^= (ax & bz) ^ (az & bx)
    return s


def _lagrangian_bases(n: int):
    """All maximal commuting-image subgroups, each as a canonical reduced basis.

    Backtracking extension: grow a set of independent vectors that pairwise
    commute under the symplectic pairing; canonicalize by the subgroup's
    element set to deduplicate.
    """
    dim = 2 * n
    found = {}

    def closure(basis):
        elems = {0}
        for b in basis:
            elems |= {e ^ b for e in elems}
        return frozenset(elems)

    def extend(basis, elems):
        if len(basis) == n:
            key = frozenset(elems)
            if key not in found:
                found[key] = list(basis)
            return
        start = (basis[-1] + 1) if basis else 1
        for v in range(start, 1 << dim):
            if v in elems:
                continue
            if any(symplectic(v, b, n) for b in basis):
                continue
            new_elems = elems | {e ^ v for e in elems}
            extend(basis + [v], new_elems)

    extend([], {0})
    return list(found.values())


@dataclass(frozen=True)
class EpistemicState:
    """A pure state: stabilizer generators with signs, plus the ontic support."""

    n_bits: int
    generators: tuple          # packed observable ints
    signs: tuple               # +1/-1 per generator
    support: frozenset         # ontic basis indices

    def vec(self) -> tuple:
        w = Fraction(1, 2 ** self.n_bits)
        return tuple(w if i in self.support else Fraction(0)
                     for i in range(4 ** self.n_bits))

    def support_labels(self, space: OnticSpace) -> list:
        return sorted(space.labels(i) for i in self.support)


def _support_of(space: OnticSpace, gens, signs) -> frozenset:
    n = space.n_bits
    out = []
    for idx in range(space.size):
        ok = True
        for g, s in zip(gens, signs):
            if _word_value_at(space, _int_to_word(g, n), idx) != s:
                ok = False
                break
        if ok:
            out.append(idx)
    return frozenset(out)


def enumerate_pure_states(n: int) -> list:
    """All pure epistemic states of n toy bits, in a deterministic order."""
    space = OnticSpace(n)
    out = []
    for basis in sorted(_lagrangian_bases(n), key=lambda b: sorted(b)):
        basis = sorted(basis)
        for signs in itertools.product((1, -1), repeat=n):
            supp = _support_of(space, basis, signs)
            if len(supp) != 2 ** n:
                raise GptError("stabilizer pair with malformed support")
            out.append(EpistemicState(n, tuple(basis), tuple(signs), supp))
    out.sort(key=lambda s: sorted(s.support))
    return out


def bruteforce_pure_state_count(n: int) -> int:
    """Independent oracle: exhaustive reduced-echelon enumeration of subgroups.

    Walks every n-dimensional subspace of GF(2)^(2n) via reduced row-echelon
    bases, keeps the ones in which every pair of subgroup elements has
    commuting Pauli images, and counts sign assignments.
    """
    dim = 2 * n
    count = 0
    for pivots in itertools.combinations(range(dim), n):
        free_positions = []
        for r, p in enumerate(pivots):
            for c in range(p + 1, dim):
                if c not in pivots:
                    free_positions.append((r, c))
        for bits in itertools.product((0, 1), repeat=len(free_positions)):
            rows = []
            for r, p in enumerate(pivots):
                v = 1 << p
                for (rr, cc), b in zip(free_positions, bits):
                    if rr == r and b:
                        v |= 1 << cc
                rows.append(v)
            elems = {0}
            for b in rows:
                elems |= {e ^ b for e in elems}
            elems = sorted(elems)
            ok = True
            for i in range(len(elems)):
                for j in range(i + 1, len(elems)):
                    if symplectic(elems[i], elems[j], n):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                count += 2 ** n
    return count


def stabilizer_count_formula(n: int) -> int:
    total = 2 ** n
    for k in range(1, n + 1):
        total *= 2 ** k + 1
    return total


# ---------------------------------------------------------------------------
# the GPT system
# ---------------------------------------------------------------------------

def build_stm_system(n_bits: int, with_transformations: bool = True) -> GptSystem:
    """Toy-bit system on n_bits wires (n <= 3).

    States are uniform distributions on pure supports; the effect dual to a
    pure state under the self-dualizing inner product <e, rho> = 2^n e.rho is
    the indicator vector of its support.  The unit effect is all-ones.
    """
    if n_bits not in (1, 2, 3):
        raise ValueError("toy-bit catalog supports 1, 2 or 3 wires")
    space = OnticSpace(n_bits)
    pures = enumerate_pure_states(n_bits)
    be = RATIONAL
    dim = space.size
    state_gens = tuple(p.vec() for p in pures)
    effect_gens = tuple(
        tuple(Fraction(1) if i in p.support else Fraction(0) for i in range(dim))
        for p in pures
    )
    sys = GptSystem(
        name=f"stm({n_bits})",
        dim=dim,
        backend=be,
        state_cone=Cone(dim, state_gens, be),
        effect_cone=Cone(dim, effect_gens, be),
        unit=nm.vec([1] * dim, be),
        generators_minimal=True,
        meta={
            "kind": "stm",
            "n_bits": n_bits,
            "space": space,
            "pure_states": pures,
            "supports": [p.support for p in pures],
            "support_set": {p.support for p in pures},
        },
    )
    if with_transformations and n_bits == 1:
        for perm in itertools.permutations(range(4)):
            sys.transformations.append(ontic_permutation_to_map(sys, perm))
    return sys


def state_by_label(sys: GptSystem, label: str) -> State:
    """Single-bit pure states by name: 'x+', 'x-', 'y+', 'y-', 'z+', 'z-'."""
    supports = {
        "x+": {0, 2}, "x-": {1, 3},
        "y+": {0, 3}, "y-": {1, 2},
        "z+": {0, 1}, "z-": {2, 3},
    }
    want = frozenset(supports[label])
    for p in sys.meta["pure_states"]:
        if p.support == want:
            return State(p.vec(), sys)
    raise KeyError(label)


def effect_by_label(sys: GptSystem, label: str) -> Effect:
    st = state_by_label(sys, label)
    return Effect(tuple(x * 2 for x in st.vec), sys)


def ontic_permutation_matrix(perm) -> tuple:
    n = len(perm)
    return tuple(
        tuple(Fraction(1) if perm[j] == i else Fraction(0) for j in range(n))
        for i in range(n)
    )


def is_valid_ontic_permutation(sys: GptSystem, perm) -> bool:
    support_set = sys.meta["support_set"]
    for supp in sys.meta["supports"]:
        if frozenset(perm[i] for i in supp) not in support_set:
            return False
    return True


def ontic_permutation_to_map(sys: GptSystem, perm, name: str = "") -> LinearMapOnSystem:
    """Lift a hidden-variable permutation to the state space; flags mark validity."""
    if sorted(perm) != list(range(sys.dim)):
        raise GptError("not a bijection on the ontic states")
    M = ontic_permutation_matrix(perm)
    if is_valid_ontic_permutation(sys, perm):
        T = LinearMapOnSystem(M, sys, name=name or f"perm{perm}")
        T.preserves_states = T.preserves_effects = T.reversible = True
        return T
    T = validate_transformation(sys, M, name=name or f"perm{perm}")
    return T


# ---------------------------------------------------------------------------
# fan-out permutations
# ---------------------------------------------------------------------------

def toy_cnot_permutation(n_bits: int, control: int, target: int) -> tuple:
    """Ontic permutation implementing the toy controlled-NOT on two wires.

    On the per-wire GF(2) sign bits it is the linear map
    x_control += x_target, z_target += z_control, which reproduces the
    Heisenberg rules X_C -> X_C X_T, X_T -> X_T, Z_C -> Z_C, Z_T -> Z_C Z_T.
    """
    space = OnticSpace(n_bits)
    perm = []
    for idx in range(space.size):
        bits = [list(p) for p in space.xz_bits(idx)]
        bits[control][0] ^= bits[target][0]
        bits[target][1] ^= bits[control][1]
        perm.append(space.from_xz([tuple(p) for p in bits]))
    return tuple(perm)


def toy_fan_permutation(n_env: int) -> tuple:
    """Fan-out from wire 0 onto wires 1..n_env: composition of pairwise toy CNOTs."""
    n_bits = n_env + 1
    space = OnticSpace(n_bits)
    perm = tuple(range(space.size))
    for k in range(1, n_bits):
        step = toy_cnot_permutation(n_bits, 0, k)
        perm = tuple(step[p] for p in perm)
    return perm


def verify_stabilizer_action(sys: GptSystem, perm, expected: dict) -> None:
    """Check the Heisenberg generator rules and their action on every pure state.

    ``expected`` maps each packed X_w/Z_w generator to the packed word it is
    carried to; the per-state check confirms that each image support is the
    pure support stabilized by the pulled-back generators with the same signs.
    """
    space = sys.meta["space"]
    n = space.n_bits
    for packed, target in expected.items():
        word = _int_to_word(packed, n)
        tword = _int_to_word(target, n)
        for idx in range(space.size):
            if _word_value_at(space, word, perm[idx]) != _word_value_at(space, tword, idx):
                raise GptError(
                    f"stabilizer rule violated: {ToyObservable(word).name} after the map "
                    f"disagrees with {ToyObservable(tword).name} before it"
                )

    def transport(g):
        out = 0
        for bit in range(2 * n):
            if (g >> bit) & 1:
                out ^= expected[1 << bit]
        return out

    by_support = {p.support: p for p in sys.meta["pure_states"]}
    for p in sys.meta["pure_states"]:
        image = frozenset(perm[i] for i in p.support)
        q = by_support.get(image)
        if q is None:
            raise GptError("permutation maps a pure support to an invalid set")
        for g, s in zip(q.generators, q.signs):
            word = _int_to_word(transport(g), n)
            if any(_word_value_at(space, word, o) != s for o in p.support):
                raise GptError("image stabilizer does not pull back consistently")


def toy_cnot(sys2: GptSystem) -> LinearMapOnSystem:
    """The validated controlled-NOT map on a two-wire toy system."""
    space = sys2.meta["space"]
    if space.n_bits != 2:
        raise GptError("toy CNOT lives on two wires")
    perm = toy_cnot_permutation(2, 0, 1)
    expected = {
        _word_to_int(((1, 0), (0, 0))): _word_to_int(((1, 0), (1, 0))),  # X_C -> X_C X_T
        _word_to_int(((0, 0), (1, 0))): _word_to_int(((0, 0), (1, 0))),  # X_T -> X_T
        _word_to_int(((0, 1), (0, 0))): _word_to_int(((0, 1), (0, 0))),  # Z_C -> Z_C
        _word_to_int(((0, 0), (0, 1))): _word_to_int(((0, 1), (0, 1))),  # Z_T -> Z_C Z_T
    }
    verify_stabilizer_action(sys2, perm, expected)
    T = ontic_permutation_to_map(sys2, perm, name="toy-cnot")
    if not T.reversible:
        raise GptError("toy CNOT failed validity")
    return T


def toy_fan(sys: GptSystem, n_env: int) -> LinearMapOnSystem:
    """Fan-out map wire 0 -> wires 1..n_env on an (n_env+1)-wire toy system."""
    space = sys.meta["space"]
    if space.n_bits != n_env + 1:
        raise GptError("system size does not match the requested fan-out")
    perm = toy_fan_permutation(n_env)
    n = space.n_bits
    expected = {}
    # X_0 -> X_0 X_1 ... X_N ; X_k -> X_k ; Z_0 -> Z_0 ; Z_k -> Z_0 Z_k
    all_x = 0
    for w in range(n):
        all_x |= 1 << (2 * w)
    expected[1 << 0] = all_x
    expected[1 << 1] = 1 << 1
    for w in range(1, n):
        expected[1 << (2 * w)] = 1 << (2 * w)
        expected[1 << (2 * w + 1)] = (1 << 1) | (1 << (2 * w + 1))
    verify_stabilizer_action(sys, perm, expected)
    T = ontic_permutation_to_map(sys, perm, name=f"toy-fan({n_env})")
    if not T.reversible:
        raise GptError("toy fan-out failed validity")
    return T


# ---------------------------------------------------------------------------
# composites
# ---------------------------------------------------------------------------

def stm_composite(n_factors: int) -> CompositeSystem:
    """Explicit composite of single toy bits; cones from the joint enumeration."""
    joint = build_stm_system(n_factors, with_transformations=False)
    factors = [build_stm_system(1) for _ in range(n_factors)]
    comp = compose(
        factors, "explicit",
        name=f"stm-composite({n_factors})",
        state_generators=joint.state_cone.generators,
        effect_generators=joint.effect_cone.generators,
        generators_minimal=True,
    )
    comp.meta.update(joint.meta)
    comp.meta["kind"] = "stm-composite"
    comp.meta["label_lift"] = lambda label_map: _stm_label_lift(comp, label_map)
    return comp


def _stm_label_lift(comp: CompositeSystem, label_map: dict):
    """Lift a z-frame label permutation to an ontic permutation, when affine.

    Label tuples are z-bit vectors; an affine action z -> Az + c lifts to the
    symplectic ontic map (x, z) -> (A^-T x, Az + c).  Returns the permutation
    matrix or None when the label map is not affine or the lift is invalid.
    """
    space = comp.meta["space"]
    n = space.n_bits
    zero = (0,) * n
    if zero not in label_map:
        return None
    c = label_map[zero]
    cols = []
    for w in range(n):
        unit = tuple(1 if i == w else 0 for i in range(n))
        if unit not in label_map:
            return None
        img = label_map[unit]
        cols.append(tuple(img[i] ^ c[i] for i in range(n)))
    A = [[cols[j][i] for j in range(n)] for i in range(n)]  # column-major build

    def affine(z):
        az = [0] * n
        for i in range(n):
            v = 0
            for j in range(n):
                v ^= A[i][j] & z[j]
            az[i] = v ^ c[i]
        return tuple(az)

    for z, img in label_map.items():
        if affine(z) != tuple(img):
            return None
    Ainv = _gf2_invert(A)
    if Ainv is None:
        return None
    AinvT = [[Ainv[j][i] for j in range(n)] for i in range(n)]
    perm = []
    for idx in range(space.size):
        bits = space.xz_bits(idx)
        xs = [b[0] for b in bits]
        zs = [b[1] for b in bits]
        new_x = []
        for i in range(n):
            v = 0
            for j in range(n):
                v ^= AinvT[i][j] & xs[j]
            new_x.append(v)
        new_z = list(affine(tuple(zs)))
        perm.append(space.from_xz(list(zip(new_x, new_z))))
    if not is_valid_ontic_permutation(comp, tuple(perm)):
        return None
    return ontic_permutation_matrix(tuple(perm))


def _gf2_invert(A):
    n = len(A)
    M = [row[:] + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(A)]
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if M[i][c]), None)
        if piv is None:
            return None
        M[r], M[piv] = M[piv], M[r]
        for i in range(n):
            if i != r and M[i][c]:
                M[i] = [a ^ b for a, b in zip(M[i], M[r])]
        r += 1
    return [row[n:] for row in M]


# ---------------------------------------------------------------------------
# constrained searches
# ---------------------------------------------------------------------------

@dataclass
class SearchResult:
    status: str                      # "found" | "impossible" | "budget"
    permutation: tuple | None = None
    nodes: int = 0
    elapsed: float = 0.0
    frontier_depth: int = 0


def z_frame_blocks(n_bits: int) -> dict:
    """Frame label (z-bit tuple) -> list of ontic indices in that block."""
    space = OnticSpace(n_bits)
    blocks = {}
    for idx in range(space.size):
        z = tuple(b[1] for b in space.xz_bits(idx))
        blocks.setdefault(z, []).append(idx)
    return blocks


def search_classical_implementation(n_bits: int, target: dict,
                                    budget: int = 10 ** 8) -> SearchResult:
    """Search for an ontic permutation acting blockwise like ``target`` on the
    z-product frame while keeping every pure support valid.

    Backtracks over ontic images with support-consistency propagation: every
    partially imaged pure support must still fit inside some pure support.
    Three-valued outcome; exhausting the node budget is reported, not hidden.
    """
    if sorted(target) != sorted(z_frame_blocks(n_bits)):
        raise GptError("target must permute the z-product frame labels")
    start = time.monotonic()
    pures = enumerate_pure_states(n_bits)
    space = OnticSpace(n_bits)
    size = space.size
    supports = [sorted(p.support) for p in pures]
    n_sup = len(supports)
    sup_masks = [sum(1 << i for i in s) for s in supports]
    point_supports = [0] * size          # bitmask over supports containing o
    for si, s in enumerate(supports):
        for o in s:
            point_supports[o] |= 1 << si
    # candidate-mask per support: which supports could still contain its image
    full_mask = (1 << n_sup) - 1
    blocks = z_frame_blocks(n_bits)
    allowed = [None] * size
    for z, members in blocks.items():
        timg = set(blocks[tuple(target[z])])
        for o in members:
            allowed[o] = timg
    member_lists = [[] for _ in range(size)]
    for si, s in enumerate(supports):
        for o in s:
            member_lists[o].append(si)

    image = [-1] * size
    used = [False] * size
    cand = [full_mask] * n_sup
    nodes = 0
    best_depth = 0

    class _Budget(Exception):
        pass

    def assign(o, img):
        image[o] = img
        used[img] = True
        undo = []
        ok = True
        for si in member_lists[o]:
            old = cand[si]
            new = old & point_supports[img]
            if new != old:
                cand[si] = new
                undo.append((si, old))
                if new == 0:
                    ok = False
        return ok, undo

    def unassign(o, img, undo):
        image[o] = -1
        used[img] = False
        for si, old in undo:
            cand[si] = old

    order = list(range(size))

    def backtrack(depth: int):
        nonlocal nodes, best_depth
        best_depth = max(best_depth, depth)
        if depth == size:
            return tuple(image)
        o = order[depth]
        for img in sorted(allowed[o]):
            if used[img]:
                continue
            nodes += 1
            if nodes > budget:
                raise _Budget()
            ok, undo = assign(o, img)
            if ok:
                res = backtrack(depth + 1)
                if res is not None:
                    return res
            unassign(o, img, undo)
        return None

    try:
        perm = backtrack(0)
    except _Budget:
        return SearchResult("budget", nodes=nodes,
                            elapsed=time.monotonic() - start,
                            frontier_depth=best_depth)
    if perm is None:
        return SearchResult("impossible", nodes=nodes,
                            elapsed=time.monotonic() - start,
                            frontier_depth=best_depth)
    return SearchResult("found", permutation=perm, nodes=nodes,
                        elapsed=time.monotonic() - start,
                        frontier_depth=best_depth)


def cswap_target(n_bits: int = 3) -> dict:
    """Swap wires 2 and 3 when wire 1 reads the minus z outcome."""
    out = {}
    for z in itertools.product((0, 1), repeat=n_bits):
        if z[0] == 1:
            out[z] = (z[0], z[2], z[1])
        else:
            out[z] = z
    return out


# ---------------------------------------------------------------------------
# full transformation group (two wires) and strong symmetry
# ---------------------------------------------------------------------------

def _cache_dir() -> str:
    base = os.environ.get(CACHE_ENV)
    if not base:
        base = os.path.join(os.path.expanduser("~"), ".cache", "gptdarwin")
    os.makedirs(base, exist_ok=True)
    return base


def enumerate_valid_permutation_group(n_bits: int, use_cache: bool = True) -> list:
    """Every ontic permutation mapping pure supports onto pure supports.

    Backtracking with support propagation (no frame constraint); results are
    cached on disk since the two-wire group is large.
    """
    if n_bits == 1:
        return [tuple(p) for p in itertools.permutations(range(4))]
    path = os.path.join(_cache_dir(), f"stm-group-n{n_bits}-v{GROUP_FORMAT_VERSION}.json")
    if use_cache and os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return [tuple(p) for p in data["permutations"]]

    pures = enumerate_pure_states(n_bits)
    space = OnticSpace(n_bits)
    size = space.size
    supports = [sorted(p.support) for p in pures]
    n_sup = len(supports)
    point_supports = [0] * size
    member_lists = [[] for _ in range(size)]
    for si, s in enumerate(supports):
        for o in s:
            point_supports[o] |= 1 << si
            member_lists[o].append(si)
    full_mask = (1 << n_sup) - 1

    image = [-1] * size
    used = [False] * size
    cand = [full_mask] * n_sup
    results = []

    def backtrack(depth):
        if depth == size:
            results.append(tuple(image))
            return
        o = depth
        for img in range(size):
            if used[img]:
                continue
            image[o] = img
            used[img] = True
            undo = []
            ok = True
            for si in member_lists[o]:
                old = cand[si]
                new = old & point_supports[img]
                if new != old:
                    cand[si] = new
                    undo.append((si, old))
                    if new == 0:
                        ok = False
            if ok:
                backtrack(depth + 1)
            image[o] = -1
            used[img] = False
            for si, old in undo:
                cand[si] = old

    backtrack(0)
    if use_cache:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"n_bits": n_bits, "version": GROUP_FORMAT_VERSION,
                       "permutations": [list(p) for p in results]}, fh)
    return results


def attach_transformation_group(sys: GptSystem, use_cache: bool = True) -> None:
    n = sys.meta["n_bits"]
    perms = enumerate_valid_permutation_group(n, use_cache=use_cache)
    sys.transformations = [ontic_permutation_to_map(sys, p) for p in perms]


# ---------------------------------------------------------------------------
# frames and strong symmetry
# ---------------------------------------------------------------------------

def enumerate_stm_frames(sys: GptSystem, size: int) -> list:
    """Ordered frames of the given size: tuples of pure-state indices.

    Candidates are tuples with pairwise disjoint supports; each candidate is
    confirmed by checking the leftover indicator is a valid effect (the
    support indicators then complete to a distinguishing measurement).
    """
    pures = sys.meta["pure_states"]
    dim = sys.dim
    supports = [p.support for p in pures]
    n = len(pures)
    frames_unordered = []

    def extend(chosen, taken):
        if len(chosen) == size:
            rest = [i for i in range(dim) if i not in taken]
            if rest:
                ind = tuple(Fraction(1) if i in rest else Fraction(0) for i in range(dim))
                if not cone_membership(sys.effect_cone, ind).inside:
                    return
            frames_unordered.append(tuple(chosen))
            return
        start = chosen[-1] + 1 if chosen else 0
        for i in range(start, n):
            if supports[i] & taken:
                continue
            extend(chosen + [i], taken | supports[i])

    extend([], frozenset())
    out = []
    for fr in frames_unordered:
        for perm in itertools.permutations(fr):
            out.append(perm)
    return out


@dataclass
class StrongSymmetryReport:
    system: str
    sizes: dict = field(default_factory=dict)

    @property
    def strongly_symmetric(self) -> bool:
        return all(v["transitive"] for v in self.sizes.values())


def group_pure_state_actions(sys: GptSystem, perms) -> list:
    """Action of ontic permutations on pure-state indices (via support images)."""
    supports = sys.meta["supports"]
    index_of = {s: i for i, s in enumerate(supports)}
    actions = []
    for perm in perms:
        act = tuple(index_of[frozenset(perm[i] for i in s)] for s in supports)
        actions.append(act)
    return actions


def check_strong_symmetry(sys: GptSystem, sizes=None, frame_enumerator=None,
                          pure_actions=None) -> StrongSymmetryReport:
    """Does the designated group act transitively on equal-size ordered frames?

    The designated transformations must form a group (closed under inverse and
    composition); the verdict is then orbit(first frame) == all frames per size.
    """
    be = sys.backend
    pures = sys.normalized_pure_states()
    if pure_actions is not None:
        actions = pure_actions
    else:
        if not sys.transformations:
            raise GptError("strong symmetry needs a designated transformation group")
        keys = {canonical_ray(s.vec, be): i for i, s in enumerate(pures)}
        actions = []
        for T in sys.transformations:
            act = []
            for s in pures:
                img = canonical_ray(nm.mat_vec(T.matrix, s.vec), be)
                act.append(keys[img])
            actions.append(tuple(act))

    if frame_enumerator is None:
        if sys.meta.get("kind", "").startswith("stm"):
            frame_enumerator = lambda size: enumerate_stm_frames(sys, size)
        else:
            from .core import find_maximal_frames
            maximal = find_maximal_frames(sys)
            max_size = maximal[0].size if maximal else 1

            def frame_enumerator(size):
                from .core import distinguishing_measurement
                out = []
                for combo in itertools.permutations(range(len(pures)), size):
                    if distinguishing_measurement(sys, [pures[i] for i in combo]) is not None:
                        out.append(combo)
                return out

    if sizes is None:
        max_size = 1
        while frame_enumerator(max_size + 1):
            max_size += 1
        sizes = range(1, max_size + 1)

    report = StrongSymmetryReport(system=sys.name)
    for size in sizes:
        frames = frame_enumerator(size)
        if not frames:
            continue
        frame_set = set(frames)
        rep = frames[0]
        orbit = {tuple(act[i] for i in rep) for act in actions}
        transitive = orbit == frame_set
        entry = {"ordered_frames": len(frame_set), "orbit": len(orbit),
                 "transitive": transitive}
        if not transitive:
            outside = sorted(frame_set - orbit)[0]
            entry["witness_pair"] = (rep, outside)
        report.sizes[size] = entry
    return report
