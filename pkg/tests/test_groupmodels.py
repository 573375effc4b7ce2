import numpy as np
import pytest

from d4fusion.groupmodels import (
    Frame,
    SYLOW_ORDER,
    frame_from_involutions,
    frame_group_of,
    frame_sign_gens,
    matrix_from_point_perm,
    perm_matrix,
    standard_frame,
    verify_embedding,
)
from d4fusion.perms import Permutation, compose, inverse
from d4fusion.quadforms import GF2_SPACE, GF3_SPACE, PreconditionError, gf3_det
from d4fusion.stabchain import GroupHandle, build_stab_chain, stabilizer_of_prefix


def test_omega_order_and_transitivity(omega_handle):
    assert omega_handle.chain.order() == 174_182_400
    # 2-part is exactly 2^12
    order = omega_handle.chain.order()
    two_part = order & -order
    assert two_part == 4096
    # transitive on the 135 singular points from three start points
    from d4fusion.stabchain import orbit
    for start in (0, 57, 134):
        assert len(orbit(omega_handle.generators, start)) == 135


def test_omega_generators_in_kernel(omega_handle):
    from d4fusion.quadforms import dickson
    for mat in omega_handle.gen_matrices:
        assert dickson(GF2_SPACE, mat) == 0


def test_point_stabilizer_order(omega_handle):
    sub = stabilizer_of_prefix(omega_handle, [0])
    assert sub.chain.order() == 1_290_240
    assert 174_182_400 // 1_290_240 == 135


def test_membership_separates_kernel(omega_handle):
    # a single transvection acts on the singular points but lies outside
    # the chain's group (Dickson invariant 1; it also swaps the two solid
    # families, so it does not even act on the full flag domain); a
    # product of two transvections sifts in
    from d4fusion.quadforms import PreconditionError, transvection
    codes = GF2_SPACE.nonsingular_codes()
    t1 = transvection(GF2_SPACE, int(codes[3]))
    t2 = transvection(GF2_SPACE, int(codes[40]))
    pts = omega_handle.geometry.parts[0]
    gens135 = [Permutation(g[:135]) for g in omega_handle.generators]
    chain135 = build_stab_chain(GroupHandle("omega-points", gens135))
    assert chain135.order() == 174_182_400
    p1 = pts.perm_of_matrix(t1.entries)
    both = pts.perm_of_matrix((t2.entries.astype(np.int64) @ t1.entries) % 2)
    assert not chain135.contains(p1)
    assert chain135.contains(both)
    with pytest.raises(PreconditionError):
        omega_handle.geometry.perm_of_matrix(t1.entries)


def test_frame_order_two_independent_chains(frame_bundle):
    # rebuild with a shuffled base prefix; the two chain orders must agree
    gens = [Permutation(g) for g in frame_bundle.ambient.generators]
    chain2 = build_stab_chain(GroupHandle("frame2", gens), base_hint=[700, 13, 222])
    assert chain2.order() == frame_bundle.ambient.chain.order() == 1_290_240


def test_omega_perfect(omega_handle):
    # normal closure of generator commutators regenerates the whole group
    gens = omega_handle.generators
    seeds = []
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            a, b = gens[i], gens[j]
            seeds.append(compose(compose(compose(inverse(a), inverse(b)), a), b))
    closure_gens = list(seeds)
    while True:
        chain = build_stab_chain(GroupHandle("nc", [Permutation(s) for s in closure_gens]))
        new = []
        for s in closure_gens:
            for g in gens:
                c = compose(compose(inverse(g), s), g)
                if not chain.contains(c):
                    new.append(c)
        if not new:
            break
        closure_gens.extend(new[:4])
    assert chain.order() == 174_182_400


def test_chamber_stabilizer(chamber_bundle):
    assert chamber_bundle.sylow.n == SYLOW_ORDER
    orders = chamber_bundle.sylow.order_of
    assert set(np.unique(orders).tolist()) <= {1, 2, 4, 8}
    z = chamber_bundle.sylow.center_of(chamber_bundle.sylow.full_bits())
    assert z.order == 2


def test_chamber_matrices_match_perms(chamber_bundle, omega_handle):
    # recovered matrices re-induce the stored point permutations
    geometry = omega_handle.geometry
    pts = geometry.parts[0]
    rng = np.random.default_rng(3)
    for i in rng.integers(0, 4096, 25):
        mat = chamber_bundle.matrices[int(i)]
        perm = pts.perm_of_matrix(mat)
        assert np.array_equal(perm, chamber_bundle.embedding[int(i)][:135])


def test_embedding_verification_all_models(bundles):
    for bundle in bundles.values():
        verify_embedding(bundle)  # raises on any failure


def test_bundle_index_lookup(chamber_bundle):
    emb = chamber_bundle.embedding
    assert chamber_bundle.index_of_perm(emb[137]) == 137
    foreign = np.roll(emb[137], 1)
    assert chamber_bundle.index_of_perm(foreign) is None


def test_affine_model(affine_bundle):
    assert affine_bundle.ambient.chain.order() == 1_290_240
    assert affine_bundle.sylow.n == SYLOW_ORDER
    q = affine_bundle.extras["Q"]
    assert q.order == 512
    grp = affine_bundle.sylow
    assert grp.is_extraspecial(q)
    assert grp.extraspecial_type(q) == "+"
    z = grp.center_of(grp.full_bits())
    assert np.array_equal(grp.center_of(q).bits, z.bits)


def test_frame_model(frame_bundle):
    assert frame_bundle.ambient.chain.order() == 1_290_240
    assert frame_bundle.sylow.n == SYLOW_ORDER
    o2 = frame_bundle.extras["O2"]
    assert o2.order == 64
    assert frame_bundle.sylow.is_elementary_abelian(o2)


def test_frame_generators_in_omega(frame_bundle):
    from d4fusion.quadforms import spinor_norm
    for mat in frame_bundle.ambient.gen_matrices:
        assert gf3_det(mat) == 1
        assert spinor_norm(GF3_SPACE, mat) == "square"


def test_three_sylow_orders_agree(bundles):
    assert {b.sylow.n for b in bundles.values()} == {4096}


def test_standard_frame_from_sign_changes():
    lifts = [m.astype(np.int64) for m in frame_sign_gens()]
    frame = frame_from_involutions(lifts)
    assert np.array_equal(frame.vectors, np.eye(8, dtype=np.int64))


def test_frame_group_of_standard_equals_frame_ambient(frame_bundle):
    handle = frame_group_of(standard_frame())
    assert handle.chain.order() == 1_290_240
    # same group: every ambient generator sifts into the constructed chain
    for g in frame_bundle.ambient.generators:
        assert handle.chain.contains(g)


def test_frame_from_involutions_rejects_junk():
    bad = np.eye(8, dtype=np.int64)
    bad[0, 0] = 2  # diag(-1,1,...): involution, but single matrix gives
    # only 2 eigenspaces, of dimensions 1 and 7
    with pytest.raises(PreconditionError):
        frame_from_involutions([bad])


def test_frame_eigenvalue_patterns_separate(frame_bundle, contexts):
    ctx = contexts["frame"]
    d_bits = frame_bundle.extras["O2"]
    from d4fusion.fusion import _involution_lifts
    d_sub = next(e for e in ctx.six_E if np.array_equal(e.bits, d_bits.bits))
    lifts = _involution_lifts(frame_bundle, d_sub)
    frame = frame_from_involutions(lifts)
    patterns = set()
    for m in lifts:
        pat = tuple(1 if np.array_equal((m @ v) % 3, v) else -1
                    for v in frame.vectors)
        patterns.add(max(pat, tuple(-x for x in pat)))
    assert len(patterns) == 63  # one per projective nonidentity element


def test_frame_lines_orthogonal_property():
    frame = standard_frame()
    for i in range(8):
        for j in range(i + 1, 8):
            assert GF3_SPACE.polar(frame.vectors[i], frame.vectors[j]) == 0
        assert GF3_SPACE.eval_q(frame.vectors[i]) != 0


def test_t_part_transitive_on_letters():
    from d4fusion.groupmodels import t_part_perms
    from d4fusion.stabchain import orbit
    gens = [Permutation(p) for p in t_part_perms()]
    assert sorted(orbit(gens, 0)) == list(range(8))
    chain = build_stab_chain(GroupHandle("t", gens))
    assert chain.order() == 64


def test_matrix_recovery_identity(omega_handle):
    ident = np.arange(omega_handle.degree, dtype=np.uint16)
    mat = matrix_from_point_perm(ident, omega_handle.geometry)
    assert np.array_equal(mat, np.eye(8, dtype=np.int64))
