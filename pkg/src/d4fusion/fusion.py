"""Fusion-system assembly on the Sylow 2-subgroup and its key invariants.

A fusion system here is concrete data: the Cayley group S, essential
slots (a subgroup plus automizer generator maps pulled back from an
ambient model), and the maps granted to S itself (inner ones always, plus
one verified order-3 map for the ":3" variants).  Element fusion is the
orbit closure of those partial bijections; normality of a subgroup in the
system is the essential-plus-S invariance criterion; the distinguishing
fingerprint is the variant-free summary (essential count, class multiset,
induced automizer orders on the six elementary abelian subgroups).
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field

import numpy as np

from .cayley import AutoMap, CayleyGroup, SubgroupBits
from .domains import singular_objects
from .groupmodels import (
    ModelBundle,
    check_in_omega,
    frame_from_involutions,
    frame_group_of,
    perm_matrix,
    t_part_perms,
)
from .perms import ConfigurationError, Permutation, compose, inverse, perm_order
from .quadforms import GF3_SPACE, PreconditionError, gf3_inverse
from .stabchain import GroupHandle, build_stab_chain, stabilizer_of_prefix
from .structure import StructureContext, _gf2_nullspace_bits

log = logging.getLogger(__name__)

VARIANTS = ("O8p2", "O8p2x3", "PO8p3", "PO8p3x3")


@dataclass
class EssentialSlot:
    """An essential subgroup with automizer generators from one model."""

    subgroup: SubgroupBits
    automizer_gens: list            # AutoMap objects on the subgroup
    model_tag: str
    outer_order: int = 0
    order3_gen: AutoMap | None = None

    def validate(self, ctx: StructureContext):
        S = ctx.S
        cent = S.centralizer(self.subgroup.members)
        if (cent.bits & ~self.subgroup.bits).any():
            raise ConfigurationError("slot subgroup is not self-centralizing in S")
        z = S.center_of(self.subgroup)
        for a in self.automizer_gens:
            if a.domain is None or not np.array_equal(a.domain.bits,
                                                      self.subgroup.bits):
                raise ConfigurationError("automizer generator has the wrong domain")
            m = self.subgroup.members
            if not (S.order_of[a.images[m]] == S.order_of[m]).all():
                raise ConfigurationError("automizer generator changes element orders")
            zimg = np.zeros(S.n, dtype=bool)
            zimg[a.images[z.members]] = True
            if not np.array_equal(zimg, z.bits):
                raise ConfigurationError("automizer generator moves the center")


@dataclass
class FusionSystem:
    ctx: StructureContext
    essentials: list
    aut_s_gens: list                # AutoMap objects defined on all of S
    variant: str
    notes: dict = field(default_factory=dict)

    @property
    def s(self) -> CayleyGroup:
        return self.ctx.S

    def all_generator_maps(self):
        maps = []
        for slot in self.essentials:
            maps.extend(slot.automizer_gens)
        maps.extend(self.aut_s_gens)
        return maps


@dataclass
class FusionClassPartition:
    class_id: np.ndarray            # minimal member of each element's class

    def class_table(self, order_of):
        """Rows (element order, class size, class count), sorted."""
        reps, counts = np.unique(self.class_id, return_counts=True)
        tally = {}
        for rep, size in zip(reps, counts):
            key = (int(order_of[rep]), int(size))
            tally[key] = tally.get(key, 0) + 1
        return tuple(sorted((o, s, c) for (o, s), c in tally.items()))


# ---------------------------------------------------------------------------
# essential candidates


def essential_candidates(ctx: StructureContext):
    """F1 = C_S(Z2(S)) plus the four index-2 overgroups of Q whose image
    downstairs is a fours group avoiding the distinguished coset."""
    S = ctx.S
    f1 = S.centralizer(ctx.Z2.members)
    if f1.order != 2048:
        raise ConfigurationError("C_S(Z2) does not have index 2")
    S.check_closed(f1)
    if ctx.Q <= f1:
        raise ConfigurationError("Q unexpectedly centralizes Z2(S)")
    quot, rep_of, new_index = S.quotient_group(ctx.Q)
    i0_new = int(new_index[ctx.i0_coset])
    fours = [sub for sub in quot.subgroups_of_index(2) if not sub.bits[i0_new]]
    if len(fours) != 4:
        raise ConfigurationError("expected 4 fours-subgroups avoiding the "
                                 "distinguished coset, found %d" % len(fours))
    out = [f1]
    for sub in fours:
        keep = sub.bits[new_index[rep_of]]
        cand = S.subgroup(keep, verify=True)
        if cand.order != 2048 or not (ctx.Q <= cand):
            raise ConfigurationError("candidate is not an index-2 overgroup of Q")
        if sum(1 for e in ctx.six_E if e <= cand) != 3:
            raise ConfigurationError("candidate does not contain exactly 3 of the six "
                                     "elementary abelian subgroups")
        cent = S.centralizer(cand.members)
        if (cent.bits & ~cand.bits).any():
            raise ConfigurationError("candidate is not self-centralizing")
        out.append(cand)
    return out


def pair_of_elab(ctx: StructureContext, candidates, e: SubgroupBits):
    """Indices (into candidates) of the two Q-containing members containing e."""
    hits = [k for k in range(1, 5) if e <= candidates[k]]
    if len(hits) != 2:
        raise ConfigurationError("an elementary abelian subgroup lies in %d of the "
                                 "four overgroups, not 2" % len(hits))
    return tuple(hits)


# ---------------------------------------------------------------------------
# automizers from ambient models


def conjugation_automap(bundle: ModelBundle, domain: SubgroupBits, g) -> AutoMap:
    """x -> g^-1 x g on a subgroup of the Sylow, computed in the ambient."""
    g_inv = inverse(g)
    images = np.arange(bundle.sylow.n, dtype=np.uint16)
    for i in domain.members:
        moved = compose(compose(g_inv, bundle.embedding[int(i)]), g)
        j = bundle.index_of_perm(moved)
        if j is None:
            raise ConfigurationError("conjugation leaves the Sylow on the domain")
        images[int(i)] = j
    return AutoMap(bundle.sylow, images, domain)


def _map_group_order(domain: SubgroupBits, maps) -> int:
    """Order of the permutation group the maps generate on the domain."""
    members = domain.members
    local = np.full(domain.group.n, -1, dtype=np.int64)
    local[members] = np.arange(len(members))
    gens = [Permutation(local[a.images[members]].astype(np.uint16)) for a in maps]
    return build_stab_chain(GroupHandle("automizer", gens)).order()


def automizer_from_model(bundle: ModelBundle, ctx: StructureContext,
                         overgroup_gens, order3_elem, tag: str) -> EssentialSlot:
    """Slot for the 2-radical of one minimal overgroup P of S.

    The radical is the intersection of the three Sylow conjugates of S in
    P; conjugation by the P-generators gives the automizer maps.  The
    induced group on the radical must exceed the S-conjugation image by an
    odd factor of exactly 3 (so the outer automizer is of order 6).
    """
    S = bundle.sylow
    g3 = np.asarray(order3_elem, dtype=np.uint16)
    g3_sq = compose(g3, g3)
    mask = np.ones(S.n, dtype=bool)
    for conj in (g3, g3_sq):
        conj_inv = inverse(conj)
        for i in np.flatnonzero(mask):
            moved = compose(compose(conj, bundle.embedding[int(i)]), conj_inv)
            if bundle.index_of_perm(moved) is None:
                mask[int(i)] = False
    radical = S.subgroup(mask, verify=True)
    if radical.order != 2048:
        raise ConfigurationError("radical of the minimal overgroup has order %d"
                                 % radical.order)
    inner_maps = [conjugation_automap(bundle, radical, bundle.embedding[int(gi)])
                  for gi in S.gen_indices]
    outer_maps = [conjugation_automap(bundle, radical, np.asarray(g, dtype=np.uint16))
                  for g in overgroup_gens]
    order3_map = conjugation_automap(bundle, radical, g3)
    if order3_map.map_order() != 3:
        raise ConfigurationError("conjugation by the order-3 element has wrong order")
    big = _map_group_order(radical, inner_maps + outer_maps + [order3_map])
    small = _map_group_order(radical, inner_maps)
    if big != 3 * small:
        raise ConfigurationError("outer automizer odd part is %s, not 3" % (big / small))
    slot = EssentialSlot(subgroup=radical,
                         automizer_gens=inner_maps + outer_maps + [order3_map],
                         model_tag=tag, outer_order=6, order3_gen=order3_map)
    slot.validate(ctx)
    return slot


# -- chamber model: the four minimal flag stabilizers ------------------------


def _order3_from_chain(chain, rng_seed=11, tries=4000):
    rng = np.random.default_rng(rng_seed)
    for _ in range(tries):
        g = chain.random_element(rng)
        o = perm_order(g)
        while o % 2 == 0:
            g = compose(g, g)
            o //= 2
        if o % 3 == 0:
            return _perm_power(g, o // 3)
    raise ConfigurationError("no order-3 element found in the overgroup")


def _perm_power(g, k):
    out = np.arange(g.shape[0], dtype=g.dtype)
    base = g
    while k:
        if k & 1:
            out = compose(out, base)
        base = compose(base, base)
        k >>= 1
    return out


def chamber_parabolic_slots(bundle: ModelBundle, ctx: StructureContext):
    """One slot per minimal flag-stabilizer overgroup of the chamber Sylow."""
    ambient = bundle.ambient
    base = bundle.extras["flag_base"]
    slots = []
    for omit in range(4):
        sub_base = [b for k, b in enumerate(base) if k != omit]
        over = stabilizer_of_prefix(ambient, sub_base)
        order = over.chain.order()
        if order != 3 * 4096:
            raise ConfigurationError("minimal flag stabilizer has order %d" % order)
        g3 = _order3_from_chain(over.chain, rng_seed=17 + omit)
        slots.append(automizer_from_model(
            bundle, ctx, over.generators, g3,
            tag="omega8plus2-parabolic-omit%d" % omit))
    return slots


# -- frame models: the three minimal overgroups over the letter action -------


def _closure_order_capped(gen_arrays, cap):
    ident = np.arange(gen_arrays[0].shape[0], dtype=np.uint16)
    seen = {ident.tobytes()}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gen_arrays:
                c = compose(a, g)
                k = c.tobytes()
                if k not in seen:
                    seen.add(k)
                    if len(seen) > cap:
                        return len(seen)
                    nxt.append(c)
        frontier = nxt
    return len(seen)


def _element_set_key(gen_arrays) -> bytes:
    ident = np.arange(gen_arrays[0].shape[0], dtype=np.uint16)
    seen = {ident.tobytes()}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gen_arrays:
                c = compose(a, g)
                k = c.tobytes()
                if k not in seen:
                    seen.add(k)
                    nxt.append(c)
        frontier = nxt
    h = hashlib.sha256()
    for k in sorted(seen):
        h.update(k)
    return h.digest()


def minimal_overgroups_in_alternating(t_gens):
    """Order-3 letter permutations generating the three minimal overgroups
    of an order-64 Sylow inside the alternating group on 8 letters.

    Deterministic scan in chain enumeration order, stopping once three
    distinct overgroups of order 192 are collected.
    """
    t_gens = [np.asarray(t, dtype=np.uint16) for t in t_gens]
    t_chain = build_stab_chain(GroupHandle("t", [Permutation(t) for t in t_gens]))
    if t_chain.order() != 64:
        raise ConfigurationError("letter image of the Sylow does not have order 64")
    a8 = GroupHandle("a8", [Permutation.from_cycles(8, (0, 1, k)) for k in range(2, 8)])
    a8_chain = build_stab_chain(a8)
    found = {}
    for e in a8_chain.elements():
        e = np.asarray(e, dtype=np.uint16)
        if perm_order(e) != 3:
            continue
        if _closure_order_capped(t_gens + [e], 192) != 192:
            continue
        key = _element_set_key(t_gens + [e])
        if key not in found:
            found[key] = e
            if len(found) == 3:
                break
    if len(found) != 3:
        raise ConfigurationError("found %d minimal overgroups, expected 3" % len(found))
    return list(found.values())


def frame_line_action(frame, mat) -> np.ndarray:
    """Permutation of the 8 frame lines induced by a frame-monomial matrix."""
    vecs = frame.vectors
    out = np.empty(8, dtype=np.uint16)
    for i in range(8):
        img = (np.asarray(mat, dtype=np.int64) @ vecs[i]) % 3
        hit = None
        for j in range(8):
            if np.array_equal(img, vecs[j]) or np.array_equal(img, (2 * vecs[j]) % 3):
                hit = j
                break
        if hit is None:
            raise ConfigurationError("matrix does not permute the frame lines")
        out[i] = hit
    return out


def frame_parabolic_slots(bundle: ModelBundle, ctx: StructureContext,
                          frame_handle, tag_prefix: str):
    """Slots from the three minimal overgroups of S inside one frame group.

    The frame group maps onto the alternating group of its 8 lines; the
    minimal overgroups of S are the preimages of the minimal overgroups of
    the letter image of S, realized by lifting one order-3 letter
    permutation each.
    """
    frame = frame_handle.frame
    t_gens = [frame_line_action(frame, bundle.matrices[int(gi)])
              for gi in bundle.sylow.gen_indices]
    letters = minimal_overgroups_in_alternating(t_gens)
    c = frame.basis_matrix()
    cinv = gf3_inverse(c)
    dom = singular_objects(GF3_SPACE, "points")
    slots = []
    for k, rho in enumerate(letters):
        mat = (c @ perm_matrix(rho) @ cinv) % 3
        check_in_omega(mat)
        g3 = dom.perm_of_matrix(mat)
        over_gens = [bundle.embedding[int(gi)] for gi in bundle.sylow.gen_indices]
        slots.append(automizer_from_model(
            bundle, ctx, over_gens + [g3], g3,
            tag="%s-parabolic-%d" % (tag_prefix, k)))
    return slots


def second_frame_group(bundle: ModelBundle, ctx: StructureContext, candidates):
    """A frame group for an E whose overgroup pair is disjoint from the
    sign-change E's pair, so the two frame models cover all four
    Q-containing candidates."""
    d_bits = bundle.extras["O2"]
    d_sub = next(e for e in ctx.six_E
                 if np.array_equal(e.bits, d_bits.bits))
    d_pair = set(pair_of_elab(ctx, candidates, d_sub))
    ordered = []
    for e in ctx.six_E:
        if np.array_equal(e.bits, d_sub.bits):
            continue
        pair = set(pair_of_elab(ctx, candidates, e))
        ordered.append((len(pair & d_pair), e, pair))
    ordered.sort(key=lambda t: (t[0], tuple(t[1].members[:3])))
    last_err = None
    for overlap, e, pair in ordered:
        if overlap != 0:
            continue
        try:
            lifts = _involution_lifts(bundle, e)
            frame = frame_from_involutions(lifts)
            handle = frame_group_of(frame)
            _verify_sylow_inside(bundle, handle)
            return handle, e, tuple(sorted(pair))
        except (PreconditionError, ConfigurationError) as exc:
            last_err = exc
            log.warning("frame construction failed for a disjoint-pair E: %s", exc)
    raise ConfigurationError("no disjoint-pair elementary abelian subgroup admits a "
                             "frame model: %s" % last_err)


def _involution_lifts(bundle: ModelBundle, e: SubgroupBits):
    lifts = []
    ident = np.eye(8, dtype=np.int64)
    for i in e.members:
        if int(i) == 0:
            continue
        m = np.asarray(bundle.matrices[int(i)], dtype=np.int64) % 3
        if not np.array_equal((m @ m) % 3, ident):
            m = (2 * m) % 3
        if not np.array_equal((m @ m) % 3, ident):
            raise PreconditionError("projective involution has no involution lift")
        lifts.append(m)
    return lifts


def _verify_sylow_inside(bundle: ModelBundle, handle: GroupHandle):
    chain = handle.chain
    for i in range(bundle.sylow.n):
        if not chain.contains(bundle.embedding[i]):
            raise ConfigurationError("the Sylow does not sit inside the frame group")


# ---------------------------------------------------------------------------
# system assembly


def inner_aut_s_maps(bundle: ModelBundle):
    S = bundle.sylow
    return [AutoMap(S, S.conj_map_images(int(g))) for g in S.gen_indices]


def compatible_order3_map(ctx: StructureContext, candidates, auto: AutoMap):
    """Check the order-3 map fixes F1 and exactly one Q-containing candidate,
    permuting the other three; returns the fixed candidate index."""
    if auto.map_order() != 3:
        raise ConfigurationError("the S-map does not have order 3")
    if not auto.stabilizes(candidates[0]):
        raise ConfigurationError("the order-3 map moves C_S(Z2)")
    fixed = [k for k in range(1, 5) if auto.stabilizes(candidates[k])]
    if len(fixed) != 1:
        raise ConfigurationError("the order-3 map fixes %d of the four candidates"
                                 % len(fixed))
    return fixed[0]


def select_order3_map(ctx: StructureContext, candidates, need_fixed=None,
                      budget_secs: float = 3600.0, checkpoint_path=None) -> AutoMap:
    """An order-3 automorphism compatible with a variant's requirements.

    Different order-3 automorphisms fix different members of the four
    Q-containing candidates (one per induced quotient action), so the
    search samples one map per action and keeps the first whose fixed
    candidate matches `need_fixed` (any, when None).
    """
    from .automorphisms import order3_automorphisms
    outcome = order3_automorphisms(ctx, budget_secs=budget_secs, limit=12,
                                   limit_per_tau=1,
                                   checkpoint_path=checkpoint_path)
    for auto in outcome.found:
        fixed = compatible_order3_map(ctx, candidates, auto)
        if need_fixed is None or fixed == need_fixed:
            return auto
    raise ConfigurationError(
        "no order-3 automorphism among %d sampled fixes candidate %s"
        % (len(outcome.found), need_fixed))


def build_fusion_system(variant: str, bundle: ModelBundle,
                        ctx: StructureContext | None = None,
                        order3: AutoMap | None = None,
                        order3_budget: float = 3600.0,
                        order3_checkpoint=None) -> FusionSystem:
    """Assemble one of the four systems over the given Sylow realization.

    O8p2 variants expect the flag-model bundle; PO8p3 variants expect the
    frame-model bundle (slots come from two frame groups with disjoint
    candidate pairs).  ":3" variants additionally require a verified
    order-3 map on S fixing F1 and exactly one other candidate; for
    O8p2x3 the fixed candidate must be the non-essential one, and when no
    map is supplied a compatible one is searched for.
    """
    if variant not in VARIANTS:
        raise ConfigurationError("unknown variant %r" % variant)
    ctx = ctx or StructureContext(bundle)
    candidates = essential_candidates(ctx)
    notes = {}
    if variant.startswith("O8p2"):
        if bundle.provenance != "omega8plus2-flag":
            raise ConfigurationError("O8p2 systems are built over the flag model")
        slots = chamber_parabolic_slots(bundle, ctx)
        matched = _match_slots(candidates, slots)
        if 0 not in matched:
            raise ConfigurationError("no parabolic radical equals C_S(Z2)")
        missing = [k for k in range(1, 5) if k not in matched]
        if len(missing) != 1:
            raise ConfigurationError("expected exactly one non-radical candidate")
        notes["non_essential_candidate"] = missing[0]
        notes["non_essential_witness"] = "not the radical of any minimal flag stabilizer"
    else:
        if bundle.provenance != "frame-gf3":
            raise ConfigurationError("PO8p3 systems are built over the frame model")
        frame1 = frame_group_of(bundle.extras["frame"])
        slots = frame_parabolic_slots(bundle, ctx, frame1, "frame-standard")
        handle2, e2, pair2 = second_frame_group(bundle, ctx, candidates)
        slots2 = frame_parabolic_slots(bundle, ctx, handle2, "frame-disjoint")
        matched1 = _match_slots(candidates, slots)
        slots_by_candidate = dict(zip(matched1, slots))
        matched2 = _match_slots(candidates, slots2)
        for k, slot in zip(matched2, slots2):
            if k not in slots_by_candidate:
                slots_by_candidate[k] = slot
        if sorted(slots_by_candidate) != [0, 1, 2, 3, 4]:
            raise ConfigurationError("frame models cover candidates %s, not all five"
                                     % sorted(slots_by_candidate))
        notes["second_frame_pair"] = pair2
        slots = [slots_by_candidate[k] for k in sorted(slots_by_candidate)]
    aut_s = inner_aut_s_maps(bundle)
    if variant.endswith("x3"):
        need = notes.get("non_essential_candidate") if variant == "O8p2x3" else None
        if order3 is None:
            order3 = select_order3_map(ctx, candidates, need_fixed=need,
                                       budget_secs=order3_budget,
                                       checkpoint_path=order3_checkpoint)
        fixed = compatible_order3_map(ctx, candidates, order3)
        notes["order3_fixed_candidate"] = fixed
        if need is not None and fixed != need:
            raise ConfigurationError(
                "the order-3 map fixes a different candidate than the "
                "non-essential one")
        aut_s = aut_s + [order3]
    fs = FusionSystem(ctx=ctx, essentials=slots, aut_s_gens=aut_s, variant=variant,
                      notes=notes)
    _validate_system(fs)
    return fs


def _match_slots(candidates, slots):
    out = []
    for slot in slots:
        hit = [k for k, cand in enumerate(candidates)
               if np.array_equal(cand.bits, slot.subgroup.bits)]
        if len(hit) != 1:
            raise ConfigurationError("a slot radical is not among the five candidates")
        out.append(hit[0])
    if len(set(out)) != len(out):
        raise ConfigurationError("two slots share one candidate")
    return out


def _validate_system(fs: FusionSystem):
    for slot in fs.essentials:
        slot.validate(fs.ctx)
    for a in fs.aut_s_gens:
        if a.domain is not None:
            raise ConfigurationError("S-maps must be defined on all of S")


# ---------------------------------------------------------------------------
# element fusion


def fuse_elements(fs: FusionSystem) -> FusionClassPartition:
    """Finest partition closed under every generator map (orbit closure)."""
    n = fs.s.n
    parent = np.arange(n, dtype=np.int64)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            if rx < ry:
                parent[ry] = rx
            else:
                parent[rx] = ry

    for a in fs.all_generator_maps():
        dom = a.domain.members if a.domain is not None else np.arange(n)
        for x in dom:
            union(int(x), int(a.images[int(x)]))
    roots = np.array([find(x) for x in range(n)], dtype=np.int64)
    # canonicalize to the minimum of each class
    reps = {}
    for x in range(n):
        r = int(roots[x])
        reps[r] = min(reps.get(r, x), x)
    class_id = np.array([reps[int(roots[x])] for x in range(n)], dtype=np.int64)
    part = FusionClassPartition(class_id=class_id)
    _validate_partition(fs, part)
    return part


def _validate_partition(fs: FusionSystem, part: FusionClassPartition):
    S = fs.s
    if int(part.class_id[0]) != 0 or int((part.class_id == 0).sum()) != 1:
        raise ConfigurationError("identity is not a singleton fusion class")
    if not (S.order_of == S.order_of[part.class_id]).all():
        raise ConfigurationError("element order is not constant on a fusion class")
    # classes refine into unions of S-conjugacy classes
    labels = S.conjugacy_classes()
    for rep in np.unique(labels):
        members = np.flatnonzero(labels == rep)
        if len(np.unique(part.class_id[members])) != 1:
            raise ConfigurationError("an S-conjugacy class is split by fusion")


# ---------------------------------------------------------------------------
# normality / the 2-radical of the system


def check_O2(fs: FusionSystem) -> SubgroupBits:
    """Largest subgroup inside every essential subgroup that every generator
    map sends to itself.

    Bottom-up: for each element of the intersection of the essentials,
    close its orbit under all maps (and the subgroup it generates) until
    stable; elements whose closure stays inside the intersection
    contribute their closure subgroup, and the product of all such
    subgroups is the answer.
    """
    S = fs.s
    r0 = np.ones(S.n, dtype=bool)
    for slot in fs.essentials:
        r0 &= slot.subgroup.bits
    maps = fs.all_generator_maps()
    inverses = [a.inverse_map() for a in maps]
    qualifying = np.zeros(S.n, dtype=bool)
    qualifying[0] = True
    disqualified = np.zeros(S.n, dtype=bool)
    for x in np.flatnonzero(r0):
        x = int(x)
        if qualifying[x] or disqualified[x]:
            continue
        closure_bits = S.closure([x]).bits
        ok = True
        while True:
            if (closure_bits & ~r0).any():
                ok = False
                break
            grown = closure_bits.copy()
            members = np.flatnonzero(closure_bits)
            for a, ainv in zip(maps, inverses):
                if a.domain is None:
                    grown[a.images[members]] = True
                    grown[ainv.images[members]] = True
                else:
                    inside = members[a.domain.bits[members]]
                    grown[a.images[inside]] = True
                    grown[ainv.images[inside]] = True
            if (grown & ~r0).any():
                ok = False
                break
            if np.array_equal(grown, closure_bits):
                break
            closure_bits = S.closure(np.flatnonzero(grown)).bits
        if ok:
            qualifying |= closure_bits
        else:
            disqualified[x] = True
    result = S.closure(np.flatnonzero(qualifying))
    # the product of qualifying subgroups must itself be invariant
    members = result.members
    for a in maps:
        if a.domain is None:
            imgs = a.images[members]
        else:
            if not a.domain.bits[members].all():
                raise ConfigurationError("the candidate radical leaves a map domain")
            imgs = a.images[members]
        if not result.bits[imgs].all():
            raise ConfigurationError("the candidate radical is not invariant")
    if (result.bits & ~r0).any():
        raise ConfigurationError("the candidate radical escapes the essentials")
    return result


# ---------------------------------------------------------------------------
# induced automizer on an elementary abelian subgroup


def aut_group_on_elab(fs: FusionSystem, e: SubgroupBits):
    """Matrix group induced on one of the six elementary abelian subgroups.

    Every generator map defined on a domain containing e and sending e to
    itself contributes a 6x6 GF(2) matrix; maps moving e are skipped with
    a log entry.  Returns (order, matrices, invariant_form_info).
    """
    S = fs.s
    members = [int(m) for m in e.members]
    basis = []
    span = {0}
    for m in members:
        if m in span:
            continue
        basis.append(m)
        span |= {int(S.T[s, m]) for s in span}
    if len(basis) != 6:
        raise ConfigurationError("subgroup does not have rank 6")
    coord_of = {0: 0}
    for k, b in enumerate(basis):
        for s, c in list(coord_of.items()):
            coord_of[int(S.T[s, b])] = c | (1 << k)
    applicable = []
    applicable_set = set()
    skipped = 0
    for a in fs.all_generator_maps():
        if a.domain is not None and not a.domain.bits[e.members].all():
            skipped += 1
            continue
        if not e.bits[a.images[e.members]].all():
            skipped += 1
            log.debug("map does not stabilize the subgroup; skipped")
            continue
        cols = []
        for b in basis:
            cols.append(coord_of[int(a.images[b])])
        mat = tuple(cols)
        if mat in applicable_set:
            continue
        applicable_set.add(mat)
        # exactness: the matrix must reproduce the map on every member
        for m in members:
            img = 0
            c = coord_of[m]
            for k in range(6):
                if (c >> k) & 1:
                    img ^= mat[k]
            if img != coord_of[int(a.images[m])]:
                raise ConfigurationError("induced map is not linear on the subgroup")
        applicable.append(mat)
    # close under products
    ident = tuple(1 << k for k in range(6))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for mat in frontier:
            for g in applicable:
                prod = tuple(_apply_bits(g, col) for col in mat)
                if prod not in seen:
                    seen.add(prod)
                    nxt.append(prod)
        frontier = nxt
        if len(seen) > 100_000:
            raise ConfigurationError("induced matrix group exploded")
    order = len(seen)
    form = _invariant_form_info(applicable)
    return {"order": order, "generator_count": len(applicable),
            "skipped_maps": skipped, "form": form}


def _apply_bits(mat, vec_bits):
    out = 0
    for k in range(6):
        if (vec_bits >> k) & 1:
            out ^= mat[k]
    return out


def _invariant_form_info(mats):
    """Quadratic forms on F_2^6 invariant under all matrices: solve the
    21-coefficient linear system and classify the solution."""
    def monomials(v):
        bits = 0
        pos = 0
        for i in range(6):
            if (v >> i) & 1:
                bits |= 1 << pos
            pos += 1
        for i in range(6):
            for j in range(i + 1, 6):
                if (v >> i) & 1 and (v >> j) & 1:
                    bits |= 1 << pos
                pos += 1
        return bits

    rows = []
    for mat in mats:
        for v in range(64):
            rows.append(monomials(v) ^ monomials(_apply_bits(mat, v)))
    null = _gf2_nullspace_bits(rows, 21)
    info = {"space_dim": len(null)}
    if len(null) == 1:
        sol = null[0]
        def q(v):
            return bin(monomials(v) & sol).count("1") % 2
        singular = sum(1 for v in range(1, 64) if q(v) == 0)
        info["singular_count"] = singular
        info["plus_type"] = singular == 35
        # nondegeneracy of the polar form
        gram_rows = []
        for i in range(6):
            row = 0
            for j in range(6):
                bij = q((1 << i) ^ (1 << j)) ^ q(1 << i) ^ q(1 << j)
                row |= bij << j
            gram_rows.append(row)
        rank = len(_gf2_nullspace_bits(gram_rows, 6))
        info["polar_nullity"] = rank
        info["nondegenerate"] = rank == 0
    return info


def delete_slot(fs: FusionSystem, candidate_bits: SubgroupBits) -> FusionSystem:
    """The same system minus the slot whose subgroup matches the given bits."""
    kept = [s for s in fs.essentials
            if not np.array_equal(s.subgroup.bits, candidate_bits.bits)]
    if len(kept) == len(fs.essentials):
        raise ConfigurationError("no slot matches the subgroup to delete")
    return FusionSystem(ctx=fs.ctx, essentials=kept, aut_s_gens=fs.aut_s_gens,
                        variant=fs.variant + "-deleted", notes=dict(fs.notes))


def inner_only_system(fs: FusionSystem) -> FusionSystem:
    """Only the inner maps of S; its radical is S itself."""
    inner = [a for a in fs.aut_s_gens if a.domain is None]
    return FusionSystem(ctx=fs.ctx, essentials=[], aut_s_gens=inner,
                        variant="inner-only", notes={})


# ---------------------------------------------------------------------------
# the ambient-conjugacy oracle for involution fusion


def ambient_involution_fusion(bundle: ModelBundle) -> np.ndarray:
    """Partition of the involutions of S by conjugacy in the ambient group.

    For each unlabeled involution the full ambient conjugacy class is
    closed by breadth-first search over generator conjugation (the class
    sizes stay in the tens of thousands), and the class is intersected
    with S through element digests.  Used as the independent oracle for
    the flag-model fusion partition.
    """
    S = bundle.sylow
    gens = bundle.ambient.generators
    gpairs = [(g, inverse(g)) for g in gens]
    labels = np.full(S.n, -1, dtype=np.int64)
    s_digest = {}
    for i in range(S.n):
        if S.order_of[i] == 2:
            s_digest[hashlib.blake2b(bundle.embedding[i].tobytes(),
                                     digest_size=16).digest()] = i
    next_label = 0
    for i in range(S.n):
        if S.order_of[i] != 2 or labels[i] >= 0:
            continue
        start = bundle.embedding[i]
        d0 = hashlib.blake2b(start.tobytes(), digest_size=16).digest()
        visited = {d0}
        frontier = [start]
        hits = [i]
        while frontier:
            nxt = []
            for x in frontier:
                for g, ginv in gpairs:
                    y = compose(compose(ginv, x), g)
                    d = hashlib.blake2b(y.tobytes(), digest_size=16).digest()
                    if d not in visited:
                        visited.add(d)
                        nxt.append(y)
                        j = s_digest.get(d)
                        if j is not None:
                            hits.append(j)
            frontier = nxt
        for j in hits:
            if labels[j] >= 0 and labels[j] != next_label:
                raise ConfigurationError("ambient classes overlap; digest collision?")
            labels[j] = next_label
        next_label += 1
    return labels


def involution_partition_matches_ambient(fs: FusionSystem,
                                         partition: FusionClassPartition,
                                         bundle: ModelBundle) -> dict:
    """Element-by-element comparison of the fusion classes of involutions
    against ambient conjugacy restricted to S."""
    S = fs.s
    amb = ambient_involution_fusion(bundle)
    inv = np.flatnonzero(S.order_of == 2)
    fus = partition.class_id[inv]
    amb_i = amb[inv]
    # the two labelings must induce the same partition
    pair_to_f = {}
    pair_to_a = {}
    agree = True
    for f, a in zip(fus.tolist(), amb_i.tolist()):
        if pair_to_f.setdefault(a, f) != f or pair_to_a.setdefault(f, a) != a:
            agree = False
            break
    return {
        "involutions": int(len(inv)),
        "fusion_classes": int(len(np.unique(fus))),
        "ambient_classes": int(len(np.unique(amb_i))),
        "agree": agree,
    }


# ---------------------------------------------------------------------------
# fingerprints and reports


def fingerprint_fusion(fs: FusionSystem, partition: FusionClassPartition | None = None):
    """Variant-free summary: essential count, class multiset, induced orders."""
    part = partition or fuse_elements(fs)
    table = part.class_table(fs.s.order_of)
    aut_orders = []
    for e in fs.ctx.six_E:
        aut_orders.append(aut_group_on_elab(fs, e)["order"])
    return (len(fs.essentials), table, tuple(sorted(aut_orders)))


def fusion_report(fs: FusionSystem, partition=None, o2=None) -> dict:
    part = partition or fuse_elements(fs)
    o2 = o2 if o2 is not None else check_O2(fs)
    table = part.class_table(fs.s.order_of)
    aut_orders = sorted(aut_group_on_elab(fs, e)["order"] for e in fs.ctx.six_E)
    return {
        "variant": fs.variant,
        "essential_count": len(fs.essentials),
        "essentials": [{
            "order": slot.subgroup.order,
            "model_tag": slot.model_tag,
            "outer_order": slot.outer_order,
        } for slot in fs.essentials],
        "class_table": [{"order": o, "size": s, "count": c} for o, s, c in table],
        "o2_order": o2.order,
        "autFE_orders": aut_orders,
        "notes": dict(fs.notes),
        "status": "pass" if o2.order == 1 else "fail",
    }
