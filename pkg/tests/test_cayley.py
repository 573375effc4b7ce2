import numpy as np
import pytest

from d4fusion.cayley import (
    AutoMap,
    CayleyGroup,
    ClosureError,
    SubgroupBits,
    enumerate_elab_subgroups,
    inner_automap,
)
from d4fusion.perms import Permutation, compose


def perm_group(gens):
    """CayleyGroup from permutation generators (left-to-right products)."""
    arrs = [g.images for g in gens]
    ident = np.arange(arrs[0].shape[0], dtype=np.uint16)
    return CayleyGroup.from_generators(
        arrs, mul=compose, key=lambda a: a.tobytes(), identity=ident, name="perm")


@pytest.fixture(scope="module")
def d8():
    r = Permutation.from_cycles(4, (0, 1, 2, 3))
    s = Permutation.from_cycles(4, (1, 3))
    return perm_group([r, s])


def heisenberg_2_4(plus=True):
    """Extraspecial 2^(1+4) via an explicit cocycle; plus or minus type."""
    if plus:
        bform = lambda v, w: (v[0] & w[1]) ^ (v[2] & w[3])
    else:
        bform = lambda v, w: (v[0] & w[1]) ^ (v[2] & w[2]) ^ (v[2] & w[3]) ^ (v[3] & w[3])

    def mul(a, b):
        va, za = a
        vb, zb = b
        v = tuple(x ^ y for x, y in zip(va, vb))
        return (v, za ^ zb ^ bform(vb, va))

    gens = [((1, 0, 0, 0), 0), ((0, 1, 0, 0), 0), ((0, 0, 1, 0), 0), ((0, 0, 0, 1), 0)]
    ident = ((0, 0, 0, 0), 0)
    return CayleyGroup.from_generators(gens, mul=mul, key=repr, identity=ident)


def test_d8_basics(d8):
    assert d8.n == 8
    assert sorted(d8.order_of) == [1, 2, 2, 2, 2, 2, 4, 4]
    z = d8.center_of(d8.full_bits())
    assert z.order == 2
    assert d8.is_extraspecial(d8.full_bits())
    assert d8.extraspecial_type(d8.full_bits()) == "+"


def test_d8_center_of_abelian_subgroup(d8):
    # the cyclic subgroup of order 4 is abelian: its center is itself
    r_idx = d8.gen_indices[0]
    c4 = d8.closure([r_idx])
    assert c4.order == 4
    assert np.array_equal(d8.center_of(c4).bits, c4.bits)


def test_d8_upper_central_series(d8):
    series = d8.upper_central_series()
    assert [s.order for s in series] == [2, 8]


def test_d8_derived_and_frattini(d8):
    from d4fusion.cayley import derived_and_frattini
    der, phi = derived_and_frattini(d8)
    assert der.order == 2
    assert phi.order == 2
    assert np.array_equal(der.bits, phi.bits)


def test_d8_maximal_and_index_descent(d8):
    maxs = d8.maximal_subgroups()
    assert len(maxs) == 3
    assert sorted(m.order for m in maxs) == [4, 4, 4]
    idx4 = d8.subgroups_of_index(4)
    assert len(idx4) == 5  # the five subgroups of order 2
    assert all(s.order == 2 for s in idx4)


def test_d8_conjugacy_classes(d8):
    labels = d8.conjugacy_classes()
    assert len(np.unique(labels)) == 5


def test_d8_quotient_by_center_is_v4(d8):
    z = d8.center_of(d8.full_bits())
    q, rep_of, new_index = d8.quotient_group(z)
    assert q.n == 4
    assert q.is_elementary_abelian(q.full_bits())


def test_closure_against_brute(d8):
    # closure of a reflection and the rotation square
    s_idx = d8.gen_indices[1]
    r_idx = d8.gen_indices[0]
    r2 = d8.mul(r_idx, r_idx)
    sub = d8.closure([s_idx, r2])
    # oracle: repeated set products
    elems = {0, s_idx, r2}
    grown = True
    while grown:
        grown = False
        for a in list(elems):
            for b in list(elems):
                c = d8.mul(a, b)
                if c not in elems:
                    elems.add(c)
                    grown = True
    assert set(sub.members) == elems


def test_centralizer_matches_definition(d8):
    s_idx = d8.gen_indices[1]
    cen = d8.centralizer([s_idx])
    for x in range(d8.n):
        commutes = d8.mul(x, s_idx) == d8.mul(s_idx, x)
        assert bool(cen.bits[x]) == commutes


def test_subgroup_closure_validation(d8):
    with pytest.raises(ClosureError):
        d8.subgroup([0, d8.gen_indices[0]])  # r alone is not closed


def test_extraspecial_types():
    plus = heisenberg_2_4(plus=True)
    minus = heisenberg_2_4(plus=False)
    assert plus.n == 32 and minus.n == 32
    assert plus.is_extraspecial(plus.full_bits())
    assert minus.is_extraspecial(minus.full_bits())
    assert plus.extraspecial_type(plus.full_bits()) == "+"
    assert minus.extraspecial_type(minus.full_bits()) == "-"
    # plus type: 2*9+2 = 20 elements of order <= 2; minus: 2*5+2 = 12
    assert int((plus.order_of <= 2).sum()) == 20
    assert int((minus.order_of <= 2).sum()) == 12


def test_abelian_invariants_z4_z2():
    g = perm_group([Permutation.from_cycles(6, (0, 1, 2, 3)),
                    Permutation.from_cycles(6, (4, 5))])
    assert g.n == 8
    assert g.abelian_invariant_check(g.full_bits(), (4, 2))
    assert not g.abelian_invariant_check(g.full_bits(), (2, 2, 2))
    assert not g.abelian_invariant_check(g.full_bits(), (8,))


def test_elab_enumeration_count_oracle():
    # elementary abelian of order 16: rank-2 subgroups number the Gaussian
    # binomial [4 choose 2]_2 = 35
    gens = [Permutation.from_cycles(8, (2 * i, 2 * i + 1)) for i in range(4)]
    g = perm_group(gens)
    assert g.n == 16
    subs, nodes = enumerate_elab_subgroups(g, rank=2)
    assert len(subs) == 35
    # restricted: at least one member outside a fixed hyperplane
    hyper = g.closure(g.gen_indices[:3])
    subs_out, _ = enumerate_elab_subgroups(g, rank=2, avoid=hyper)
    inside = [1 for s in subs if s <= hyper]
    assert len(inside) == 7  # [3 choose 2]_2
    assert len(subs_out) == 35 - 7


def test_elab_enumeration_finds_full_rank():
    gens = [Permutation.from_cycles(6, (0, 1)), Permutation.from_cycles(6, (2, 3)),
            Permutation.from_cycles(6, (4, 5))]
    g = perm_group(gens)
    subs, _ = enumerate_elab_subgroups(g, rank=3)
    assert len(subs) == 1
    assert subs[0].order == 8


def test_automap_identity_and_inner(d8):
    ident = AutoMap(d8, np.arange(d8.n, dtype=np.uint16))
    assert ident.map_order() == 1
    inner = inner_automap(d8, d8.gen_indices[0])
    assert inner.map_order() in (1, 2, 4)
    comp = inner.then(inner.inverse_map())
    assert np.array_equal(comp.images, np.arange(d8.n, dtype=np.uint16))


def test_automap_rejects_non_multiplicative(d8):
    bad = np.arange(d8.n, dtype=np.uint16)
    bad[[d8.gen_indices[0], d8.gen_indices[1]]] = \
        bad[[d8.gen_indices[1], d8.gen_indices[0]]]
    try:
        AutoMap(d8, bad)
    except ClosureError:
        return
    # swapping r and s can only be multiplicative if they are exchangeable
    raise AssertionError("expected the swapped map to fail verification")


def test_automap_on_subgroup_domain(d8):
    z = d8.center_of(d8.full_bits())
    v4 = None
    for m in d8.maximal_subgroups():
        if d8.is_elementary_abelian(m):
            v4 = m
            break
    assert v4 is not None
    inner = inner_automap(d8, d8.gen_indices[0], domain=v4)
    assert inner.stabilizes(z)


def test_fingerprint_invariance(d8):
    fp_full = d8.fingerprint(d8.full_bits())
    assert fp_full[0] == 8 and fp_full[2] == 2
    maxs = d8.maximal_subgroups()
    fps = sorted(str(d8.fingerprint(m)) for m in maxs)
    # C4 and two V4s: exactly two distinct fingerprints
    assert len(set(fps)) == 2
