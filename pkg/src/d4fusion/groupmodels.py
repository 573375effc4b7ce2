"""Builders for the concrete groups: the flag model of O8+(2), the affine
64:A8 model, and the orthonormal-frame model inside POmega8+(3).

Each builder delivers a ModelBundle: the ambient permutation group with a
certified chain, the fully enumerated Sylow 2-subgroup of order 4096 as a
CayleyGroup, and an embedding (element index -> ambient permutation) that
is verified to be a homomorphism on all 4096^2 pairs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .cayley import CayleyGroup, SubgroupBits
from .domains import (
    ConcatenatedDomain,
    SingularFlag,
    induced_action,
    singular_objects,
    span_codes_gf2,
)
from .perms import ConfigurationError, Permutation, compose, inverse
from .quadforms import (
    DIM,
    GF2_SPACE,
    GF3_SPACE,
    PreconditionError,
    gf3_det,
    gf3_inverse,
    gf3_nullspace,
    spinor_norm,
    transvection,
)
from .stabchain import GroupHandle, build_stab_chain, stabilizer_of_prefix

log = logging.getLogger(__name__)

OMEGA8P2_ORDER = 174_182_400
FRAME_ORDER = 1_290_240
SYLOW_ORDER = 4096

# Sylow-2 generators of the alternating group on 8 letters, 0-indexed:
# a fours-group pair for each tetrad, the tetrad swap, and the deep swap
# mixing the two tetrads
T_PART_CYCLES = [
    ((0, 1), (2, 3)),
    ((0, 2), (1, 3)),
    ((4, 5), (6, 7)),
    ((4, 6), (5, 7)),
    ((0, 1), (4, 5)),
    ((0, 4), (1, 5), (2, 6), (3, 7)),
]

# translation part of the distinguished extraspecial subgroup: the classes
# of v1+v2, v1+v3, v5+v6, v5+v7 and v1+v2+v3+v4
Q_TRANSLATION_SETS = [(0, 1), (0, 2), (4, 5), (4, 6), (0, 1, 2, 3)]
Q_PERM_CYCLES = T_PART_CYCLES[:4]


@dataclass
class ModelBundle:
    """A Sylow-2 realization: ambient group, Cayley table, verified embedding."""

    provenance: str
    ambient: GroupHandle
    sylow: CayleyGroup
    embedding: np.ndarray           # (4096, degree) ambient images per element
    sig_cols: np.ndarray            # columns whose values identify an element
    matrices: list | None = None    # one 8x8 matrix lift per element, when meaningful
    extras: dict = field(default_factory=dict)
    sig_index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.sig_index:
            sigs = self.embedding[:, self.sig_cols]
            for i in range(self.embedding.shape[0]):
                self.sig_index[sigs[i].tobytes()] = i
        if len(self.sig_index) != self.embedding.shape[0]:
            raise ConfigurationError("signature columns do not separate the elements")

    @property
    def degree(self) -> int:
        return self.embedding.shape[1]

    def index_of_perm(self, arr, verify=True):
        """Element index of an ambient permutation, or None when outside."""
        sig = np.asarray(arr, dtype=self.embedding.dtype)[self.sig_cols].tobytes()
        idx = self.sig_index.get(sig)
        if idx is None:
            return None
        if verify and not np.array_equal(self.embedding[idx], arr):
            return None
        return idx

    def subgroup_from_perms(self, perms) -> SubgroupBits:
        idxs = []
        for p in perms:
            i = self.index_of_perm(p)
            if i is None:
                raise ConfigurationError("permutation is not an element of this Sylow")
            idxs.append(i)
        return self.sylow.closure(idxs)


def distinguishing_columns(matrix, prefer=None):
    """Greedy column set making the rows of `matrix` pairwise distinct."""
    n = matrix.shape[0]
    ids = np.zeros(n, dtype=np.int64)
    ngroups = 1
    cols = []
    candidates = list(prefer or []) + [c for c in range(matrix.shape[1])
                                       if prefer is None or c not in set(prefer)]
    for c in candidates:
        if ngroups == n:
            break
        stacked = ids * np.int64(matrix.shape[1] + 1) + matrix[:, c]
        _, new_ids = np.unique(stacked, return_inverse=True)
        new_count = int(new_ids.max()) + 1
        if new_count > ngroups:
            cols.append(c)
            ids = new_ids.astype(np.int64)
            ngroups = new_count
    if ngroups != n:
        raise ConfigurationError("no column set separates the rows; action not faithful")
    return np.asarray(cols, dtype=np.int64)


def cayley_from_perm_gens(gen_arrays, name, max_order=1 << 13):
    """CayleyGroup plus stacked element matrix from permutation generators."""
    ident = np.arange(gen_arrays[0].shape[0], dtype=np.uint16)
    group = CayleyGroup.from_generators(
        [np.asarray(g, dtype=np.uint16) for g in gen_arrays],
        mul=compose, key=lambda a: a.tobytes(), identity=ident,
        name=name, max_order=max_order)
    emb = np.stack(group.elements)
    return group, emb


def matrices_from_parents(group: CayleyGroup, gen_mats, modulus: int):
    """Representative matrix lifts for each element, via BFS decomposition."""
    mats = [None] * group.n
    mats[0] = np.eye(DIM, dtype=np.int64)
    for b in range(1, group.n):
        f, j = group.parents[b]
        mats[b] = (np.asarray(gen_mats[j], dtype=np.int64) @ mats[f]) % modulus
    return mats


def verify_embedding(bundle: ModelBundle) -> None:
    """Exhaustive homomorphism check of the embedding.

    All 4096^2 products are compared at signature resolution (signatures
    identify elements uniquely), and every generator column is compared at
    full degree.
    """
    T = bundle.sylow.T
    E = bundle.embedding
    n = T.shape[0]
    A = E[:, bundle.sig_cols]
    for j in range(A.shape[1]):
        m1 = E[:, A[:, j]]       # m1[b, a] = image of col j under (a then b)
        m2 = A[:, j][T]          # m2[a, b] = signature col j of the product
        if not np.array_equal(m1.T, m2):
            raise ConfigurationError("embedding fails the product check (column %d)" % j)
    for gi in bundle.sylow.gen_indices:
        lhs = E[gi][E]
        rhs = E[T[:, gi]]
        if not np.array_equal(lhs, rhs):
            raise ConfigurationError("embedding fails at a generator column")


# ---------------------------------------------------------------------------
# O8+(2) flag model


def omega_transvection_pairs(target_order=OMEGA8P2_ORDER, max_pairs=40, seed=2024):
    """A fixed list of transvection-product generators reaching the target order.

    The pair stream is a seeded deterministic shuffle of nonsingular
    vectors; the chain order certifies sufficiency, so the recipe is
    self-checking.
    """
    ns = [int(c) for c in GF2_SPACE.nonsingular_codes()]
    rng = np.random.default_rng(seed)
    pairs = []
    while len(pairs) < max_pairs:
        a = ns[int(rng.integers(len(ns)))]
        b = ns[int(rng.integers(len(ns)))]
        if a != b:
            pairs.append((a, b))
    pts = singular_objects(GF2_SPACE, "points")
    chosen = []
    for k in range(2, max_pairs + 1):
        chosen = pairs[:k]
        mats = [pair_transvection_matrix(a, b) for a, b in chosen]
        perms = induced_action(mats, pts)
        chain = build_stab_chain(GroupHandle("probe", [Permutation(p) for p in perms]))
        if chain.order() == target_order:
            return chosen
        if chain.order() > target_order:
            raise ConfigurationError("generated group exceeds the expected order")
    raise ConfigurationError("could not reach the target order with %d pairs" % max_pairs)


def pair_transvection_matrix(a, b):
    ta = transvection(GF2_SPACE, a)
    tb = transvection(GF2_SPACE, b)
    return (tb.entries.astype(np.int64) @ ta.entries) % 2


def standard_chamber():
    """The fixed flag: point e1, line <e1,e2>, and one solid per family."""
    e1, e2, e3, e4, f4 = 1, 4, 16, 64, 128
    line = tuple(sorted(span_codes_gf2([e1, e2])))
    sA = tuple(sorted(span_codes_gf2([e1, e2, e3, e4])))
    sB = tuple(sorted(span_codes_gf2([e1, e2, e3, f4])))
    flag = SingularFlag(point=e1, line=line, solid1=sA, solid2=sB)
    flag.validate()
    return flag


def concat_gf2_domain():
    pts = singular_objects(GF2_SPACE, "points")
    lines = singular_objects(GF2_SPACE, "lines")
    fam1 = singular_objects(GF2_SPACE, "solids-family-1")
    fam2 = singular_objects(GF2_SPACE, "solids-family-2")
    return ConcatenatedDomain([pts, lines, fam1, fam2])


def flag_indices(domain: ConcatenatedDomain, flag: SingularFlag):
    pts, lines, fam1, fam2 = domain.parts
    out = [int(pts.index_of_code[flag.point]),
           lines.index[flag.line] + domain.offsets[1]]
    for solid in (flag.solid1, flag.solid2):
        if solid in fam1.index:
            out.append(fam1.index[solid] + domain.offsets[2])
        elif solid in fam2.index:
            out.append(fam2.index[solid] + domain.offsets[3])
        else:
            raise ConfigurationError("flag solid missing from both families")
    return out


def build_omega8plus2() -> GroupHandle:
    """O8+(2) acting on the 1980-object concatenated domain, chain-certified."""
    domain = concat_gf2_domain()
    pairs = omega_transvection_pairs()
    mats = [pair_transvection_matrix(a, b) for a, b in pairs]
    perms = induced_action(mats, domain)
    handle = GroupHandle(
        "omega8plus2",
        [Permutation(p) for p in perms],
        domain_description="singular points + lines + two solid families of the "
                           "plus-type GF(2)^8 form",
    )
    handle.gen_matrices = mats
    handle.geometry = domain
    flag = standard_chamber()
    base = flag_indices(domain, flag)
    chain = build_stab_chain(handle, base_hint=base)
    if chain.order() != OMEGA8P2_ORDER:
        raise ConfigurationError("ambient order %d is not the expected one" % chain.order())
    handle.flag = flag
    handle.flag_base = base
    return handle


def matrix_from_point_perm(perm, domain: ConcatenatedDomain) -> np.ndarray:
    """Recover the 8x8 GF(2) matrix from the induced permutation.

    Basis vectors are singular for the hyperbolic form, so the matrix
    columns are literally the images of the basis points.
    """
    pts = domain.parts[0]
    cols = []
    for k in range(DIM):
        idx = int(pts.index_of_code[1 << k])
        img_code = int(pts.codes[int(perm[idx])])
        cols.append([(img_code >> i) & 1 for i in range(DIM)])
    return np.array(cols, dtype=np.int64).T


def sylow_via_chamber(g: GroupHandle) -> ModelBundle:
    """The chamber stabilizer: order exactly 2^12, fully enumerated."""
    base = g.flag_base
    stab = stabilizer_of_prefix(g, base)
    order = stab.chain.order()
    if order != SYLOW_ORDER:
        raise ConfigurationError(
            "chamber stabilizer has order %d, not 4096; broken flag" % order)
    group, emb = cayley_from_perm_gens(stab.generators, "sylow-omega8plus2")
    if group.n != SYLOW_ORDER:
        raise ConfigurationError("stabilizer enumeration did not reach 4096 elements")
    prefer = [b for b in stab.chain.base]
    sig_cols = distinguishing_columns(emb, prefer=prefer)
    mats = [matrix_from_point_perm(emb[i], g.geometry) for i in range(group.n)]
    bundle = ModelBundle(
        provenance="omega8plus2-flag",
        ambient=g,
        sylow=group,
        embedding=emb,
        sig_cols=sig_cols,
        matrices=mats,
        extras={"flag_base": base},
    )
    verify_embedding(bundle)
    return bundle


# ---------------------------------------------------------------------------
# the affine 64:A8 model


class AffineModule:
    """The 6-dimensional GF(2) module: even subsets of 8 letters mod complement."""

    def __init__(self):
        reps = []
        for c in range(256):
            if bin(c).count("1") % 2 == 0 and not c & 1:
                reps.append(c)
        self.reps = np.array(sorted(reps), dtype=np.int64)
        assert len(self.reps) == 64
        self.index_of_code = np.full(256, -1, dtype=np.int64)
        for i, c in enumerate(self.reps):
            self.index_of_code[c] = i

    def normalize(self, code: int) -> int:
        return code ^ 0xFF if code & 1 else code

    def index(self, code: int) -> int:
        return int(self.index_of_code[self.normalize(code)])

    def subset(self, letters) -> int:
        code = 0
        for i in letters:
            code |= 1 << i
        return self.index(code)

    def add(self, i: int, j: int) -> int:
        return self.index(int(self.reps[i]) ^ int(self.reps[j]))

    def act(self, perm8, i: int) -> int:
        code = int(self.reps[i])
        out = 0
        for k in range(DIM):
            if (code >> k) & 1:
                out |= 1 << int(perm8[k])
        return self.index(out)

    def translation_perm(self, i: int) -> np.ndarray:
        return np.array([self.add(x, i) for x in range(64)], dtype=np.uint16)

    def linear_perm(self, perm8) -> np.ndarray:
        return np.array([self.act(perm8, x) for x in range(64)], dtype=np.uint16)

    def weight_form(self, i: int) -> int:
        """Invariant quadratic form: half the subset size, mod 2."""
        return (bin(int(self.reps[i])).count("1") // 2) % 2


def a8_generators():
    """Three-cycles (0,1,k): a generating set of the alternating group."""
    return [Permutation.from_cycles(8, (0, 1, k)).images for k in range(2, 8)]


def t_part_perms():
    return [Permutation.from_cycles(8, *cycles).images for cycles in T_PART_CYCLES]


def build_affine_model() -> ModelBundle:
    """The split extension 64:A8 on the 64 module points, with its Sylow."""
    module = AffineModule()
    basis = [module.subset((0, i)) for i in range(1, 7)]
    translations = [module.translation_perm(i) for i in basis]
    linear_a8 = [module.linear_perm(p) for p in a8_generators()]
    ambient = GroupHandle(
        "affine64A8",
        [Permutation(p) for p in translations + linear_a8],
        domain_description="the 64 vectors of the even-subset module",
    )
    chain = build_stab_chain(ambient)
    if chain.order() != FRAME_ORDER:
        raise ConfigurationError("affine ambient order %d unexpected" % chain.order())
    t_mats = t_part_perms()
    sylow_gens = translations + [module.linear_perm(p) for p in t_mats]
    group, emb = cayley_from_perm_gens(sylow_gens, "sylow-affine")
    if group.n != SYLOW_ORDER:
        raise ConfigurationError("affine Sylow enumeration did not reach 4096")
    sig_cols = distinguishing_columns(emb)
    q_translations = [module.subset(s) for s in Q_TRANSLATION_SETS]
    q_perm_part = [module.linear_perm(Permutation.from_cycles(8, *c).images)
                   for c in Q_PERM_CYCLES]
    bundle = ModelBundle(
        provenance="affine-A8",
        ambient=ambient,
        sylow=group,
        embedding=emb,
        sig_cols=sig_cols,
        matrices=None,
        extras={"module": module},
    )
    q_members = [module.translation_perm(i) for i in q_translations] + q_perm_part
    bundle.extras["Q"] = bundle.subgroup_from_perms(q_members)
    if bundle.extras["Q"].order != 512:
        raise ConfigurationError("the recorded extraspecial subgroup has wrong order")
    verify_embedding(bundle)
    return bundle


# ---------------------------------------------------------------------------
# the GF(3) frame model


def sign_change_matrix(positions) -> np.ndarray:
    m = np.eye(DIM, dtype=np.int64)
    for i in positions:
        m[i, i] = 2
    return m


def perm_matrix(perm8) -> np.ndarray:
    m = np.zeros((DIM, DIM), dtype=np.int64)
    for i in range(DIM):
        m[int(perm8[i]), i] = 1
    return m


def frame_sign_gens():
    return [sign_change_matrix((i, i + 1)) for i in range(DIM - 1)]


def check_in_omega(mat) -> None:
    if gf3_det(mat) != 1:
        raise ConfigurationError("generator has determinant -1; construction bug")
    if spinor_norm(GF3_SPACE, mat) != "square":
        raise ConfigurationError("generator has nonsquare spinor norm; construction bug")


def build_frame_model_gf3() -> ModelBundle:
    """The frame group (even sign changes):A8 inside POmega8+(3)."""
    domain = singular_objects(GF3_SPACE, "points")
    signs = frame_sign_gens()
    a8_mats = [perm_matrix(p) for p in a8_generators()]
    for m in signs + a8_mats:
        check_in_omega(m)
    ambient_mats = signs + a8_mats
    perms = induced_action(ambient_mats, domain)
    ambient = GroupHandle(
        "frame2e6A8",
        [Permutation(p) for p in perms],
        domain_description="1120 singular projective points of the sum-of-squares form",
    )
    ambient.gen_matrices = ambient_mats
    chain = build_stab_chain(ambient)
    if chain.order() != FRAME_ORDER:
        raise ConfigurationError("frame ambient order %d unexpected" % chain.order())
    t_mats = [perm_matrix(p) for p in t_part_perms()]
    for m in t_mats:
        check_in_omega(m)
    sylow_mats = signs + t_mats
    sylow_perms = induced_action(sylow_mats, domain)
    group, emb = cayley_from_perm_gens(sylow_perms, "sylow-frame")
    if group.n != SYLOW_ORDER:
        raise ConfigurationError("frame Sylow enumeration did not reach 4096")
    sig_cols = distinguishing_columns(emb)
    mats = matrices_from_parents(group, sylow_mats, 3)
    bundle = ModelBundle(
        provenance="frame-gf3",
        ambient=ambient,
        sylow=group,
        embedding=emb,
        sig_cols=sig_cols,
        matrices=mats,
        extras={"frame": standard_frame(), "sign_perms": perms[: len(signs)]},
    )
    bundle.extras["O2"] = verify_frame_o2(bundle)
    verify_embedding(bundle)
    return bundle


def verify_frame_o2(bundle: ModelBundle) -> SubgroupBits:
    """Certify that the sign-change image is the 2-radical of the ambient.

    Downward: intersect the Sylow with conjugates until stable (always
    contains the radical).  Upward: the stable intersection is checked to
    be a normal 2-subgroup, hence inside the radical.
    """
    g = bundle.ambient
    d_bits = bundle.subgroup_from_perms(bundle.extras["sign_perms"])
    if d_bits.order != 64 or not bundle.sylow.is_elementary_abelian(d_bits):
        raise ConfigurationError("sign-change image is not elementary abelian of order 64")
    x = np.ones(bundle.sylow.n, dtype=bool)
    rng = np.random.default_rng(5)
    for _ in range(8):
        conj = g.chain.random_element(rng)
        conj_inv = inverse(conj)
        keep = x.copy()
        for i in np.flatnonzero(x):
            moved = compose(compose(conj, bundle.embedding[i]), conj_inv)
            if bundle.index_of_perm(moved) is None:
                keep[i] = False
        x = keep
        if int(x.sum()) == d_bits.order:
            break
    cand = bundle.sylow.subgroup(x, verify=True)
    if not np.array_equal(cand.bits, d_bits.bits):
        raise ConfigurationError("Sylow-conjugate intersection did not stabilize at "
                                 "the sign-change subgroup")
    # upward: normality under the ambient generators
    for gen in g.generators:
        gen_inv = inverse(gen)
        for i in cand.members:
            moved = compose(compose(gen, bundle.embedding[i]), gen_inv)
            j = bundle.index_of_perm(moved)
            if j is None or not cand.bits[j]:
                raise ConfigurationError("candidate radical is not normal")
    return cand


# ---------------------------------------------------------------------------
# frames from involution lifts


@dataclass
class Frame:
    """Eight pairwise orthogonal nonsingular projective points over GF(3)."""

    vectors: np.ndarray  # (8, 8) rows, normalized to leading coefficient 1

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.int64) % 3
        if self.vectors.shape != (DIM, DIM):
            raise ConfigurationError("a frame has exactly 8 lines")
        qvals = [GF3_SPACE.eval_q(v) for v in self.vectors]
        if any(q == 0 for q in qvals):
            raise PreconditionError("frame lines must be nonsingular")
        for i in range(DIM):
            for j in range(i + 1, DIM):
                if GF3_SPACE.polar(self.vectors[i], self.vectors[j]) != 0:
                    raise PreconditionError("frame lines must be pairwise orthogonal")
        self.q_values = qvals

    def basis_matrix(self) -> np.ndarray:
        return self.vectors.T % 3


def standard_frame() -> Frame:
    return Frame(np.eye(DIM, dtype=np.int64))


def frame_from_involutions(lifts) -> Frame:
    """Common eigenlines of a commuting family of GF(3) involution matrices.

    The input group must split the space into 8 one-dimensional common
    eigenspaces; anything else signals a non-frame-type subgroup or a bad
    lift choice.
    """
    mats = [np.asarray(m.entries if hasattr(m, "entries") else m, dtype=np.int64) % 3
            for m in lifts]
    for m in mats:
        if not np.array_equal((m @ m) % 3, np.eye(DIM, dtype=np.int64)):
            raise PreconditionError("lift is not an involution")
    for a in mats:
        for b in mats:
            if not np.array_equal((a @ b) % 3, (b @ a) % 3):
                raise PreconditionError("lifts do not commute")
    spaces = [np.eye(DIM, dtype=np.int64)]  # column bases
    for m in mats:
        nxt = []
        for basis in spaces:
            if basis.shape[1] == 1:
                refined = [basis]
            else:
                refined = []
                for eig in (1, 2):
                    rel = ((m - eig * np.eye(DIM, dtype=np.int64)) @ basis) % 3
                    null = gf3_nullspace(rel)
                    if null.shape[0]:
                        refined.append((basis @ null.T) % 3)
            nxt.extend(refined)
        spaces = nxt
    if len(spaces) != DIM or any(s.shape[1] != 1 for s in spaces):
        raise PreconditionError(
            "lifts have %d common eigenlines, not 8; not a frame-type subgroup"
            % sum(s.shape[1] for s in spaces))
    vecs = []
    for s in spaces:
        v = s[:, 0] % 3
        nz = np.nonzero(v)[0][0]
        if v[nz] == 2:
            v = (2 * v) % 3
        vecs.append(v)
    vecs = sorted(vecs, key=lambda v: int(v @ (3 ** np.arange(DIM))))
    frame = Frame(np.array(vecs))
    # eigenvalue patterns must separate the input group projectively
    patterns = set()
    for m in mats:
        pat = []
        for v in frame.vectors:
            img = (m @ v) % 3
            pat.append(1 if np.array_equal(img, v) else -1)
        pat = tuple(pat)
        mirror = tuple(-x for x in pat)
        patterns.add(max(pat, mirror))
    if len(patterns) != len({m.tobytes() for m in mats}) and len(mats) > 1:
        log.debug("eigenvalue patterns: %d for %d lifts", len(patterns), len(mats))
    return frame


def frame_group_of(frame: Frame) -> GroupHandle:
    """The stabilizer model of a frame: even sign changes and alternating
    permutations of the frame lines, conjugated to standard coordinates."""
    dvals = set(frame.q_values)
    if len(dvals) != 1:
        raise PreconditionError("frame lines carry mixed Q-values; no monomial model")
    c = frame.basis_matrix()
    cinv = gf3_inverse(c)
    gens = []
    for m in frame_sign_gens() + [perm_matrix(p) for p in a8_generators()]:
        conj = (c @ m @ cinv) % 3
        check_in_omega(conj)
        gens.append(conj)
    domain = singular_objects(GF3_SPACE, "points")
    perms = induced_action(gens, domain)
    handle = GroupHandle(
        "frame-group",
        [Permutation(p) for p in perms],
        domain_description="1120 singular projective points of the sum-of-squares form",
    )
    handle.gen_matrices = gens
    handle.frame = frame
    chain = build_stab_chain(handle)
    if chain.order() != FRAME_ORDER:
        raise ConfigurationError("frame group order %d unexpected" % chain.order())
    return handle
