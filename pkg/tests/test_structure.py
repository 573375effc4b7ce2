import numpy as np
import pytest

from d4fusion.perms import ConfigurationError, Permutation, compose
from d4fusion.cayley import CayleyGroup
from d4fusion.structure import (
    CHECK_ALIASES,
    StructureContext,
    check_valuation,
    model_fingerprint,
    run_battery,
)


def reports_by_id(battery):
    return {r.lemma_id: r for r in battery["reports"]}


def test_full_battery_passes_everywhere(batteries):
    for name, data in batteries.items():
        failing = [r.lemma_id for r in data["reports"] if not r.passed]
        assert failing == [], "%s failed %s" % (name, failing)


def test_center_witnesses(batteries):
    for data in batteries.values():
        rep = reports_by_id(data)["cent"]
        assert rep.witnesses["Z_order"] == 2
        assert rep.witnesses["Z2_order"] == 4
        assert rep.witnesses["coset_count"] == 8


def test_six_elab_witnesses(batteries):
    for data in batteries.values():
        rep = reports_by_id(data)["sixe"]
        assert rep.witnesses["count"] == 6
        assert rep.witnesses["index_in_Q"] == [2] * 6
        assert rep.witnesses["inside_Q_count"] == 0
        assert rep.witnesses["scan_matches_search"]


def test_coset_witnesses(batteries):
    for data in batteries.values():
        rep = reports_by_id(data)["cosets"]
        assert rep.witnesses["non_elementary_cosets"] == 1
        assert rep.witnesses["z4_z2_z2_z2"]
        # the distinguished coset does contain involutions (recorded, not assumed)
        assert "i0_has_involutions" in rep.witnesses


def test_frattini_witnesses(batteries):
    for data in batteries.values():
        rep = reports_by_id(data)["frattini"]
        assert rep.witnesses["S_mod_Phi"] == 16
        assert rep.witnesses["derived_equals_phi"]
        assert rep.witnesses["Q_mod_phi"] == 2


def test_z3_and_meet(batteries):
    for data in batteries.values():
        rep = reports_by_id(data)["z3"]
        assert rep.witnesses["Z3_order"] == 32
        assert rep.witnesses["E_meet_orders"] == [16]
        meet = reports_by_id(data)["z3meet"]
        assert meet.passed


def test_elab_and_uniqueness(batteries):
    for data in batteries.values():
        assert reports_by_id(data)["elab"].witnesses["offenders"] == 0
        rep = reports_by_id(data)["extraspecial"]
        assert rep.witnesses["extraspecial_count"] == 1
        assert rep.witnesses["type"] == "+"


def test_a8_check_runs_on_affine_only(batteries):
    assert "a8" in reports_by_id(batteries["affine"])
    assert "a8" not in reports_by_id(batteries["omega8plus2"])
    rep = reports_by_id(batteries["affine"])["a8"]
    assert rep.witnesses["centralizer_order"] == 192
    assert rep.witnesses["qx_order"] == 32 and rep.witnesses["qx_type"] == "+"
    assert rep.witnesses["deep_isotropic"] and not rep.witnesses["shallow_isotropic"]
    assert rep.witnesses["weight4_orbit_size"] == 35
    assert rep.witnesses["invariant_form_space_dim"] == 1


def test_model_fingerprints_agree(contexts):
    fps = [model_fingerprint(ctx) for ctx in contexts.values()]
    assert fps[0] == fps[1] == fps[2]
    assert fps[0]["E_count"] == 6
    assert fps[0]["Q_type"] == "+"


def test_order_histogram_value(contexts):
    ctx = contexts["affine"]
    hist = dict(ctx.S.order_histogram(ctx.S.full_bits()))
    assert hist == {1: 1, 2: 495, 4: 3344, 8: 256}
    assert sum(hist.values()) == 4096


def test_characteristic_series_containments(contexts):
    for ctx in contexts.values():
        assert ctx.Z <= ctx.Z2 <= ctx.Z3 <= ctx.Q
        assert ctx.phi <= ctx.Q
        for e in ctx.six_E:
            assert ctx.Z2 <= e


def test_index2_subgroups_count(contexts):
    ctx = contexts["affine"]
    subs = ctx.S.subgroups_of_index(2)
    assert len(subs) == 15
    assert all(ctx.phi <= m for m in subs)


def test_fingerprint_of_distinguished_subgroups(contexts):
    ctx = contexts["affine"]
    fp_q = ctx.S.fingerprint(ctx.Q)
    assert fp_q[:5] == (512, 4, 2, 2, 2)
    assert fp_q[8] is True  # extraspecial
    for e in ctx.six_E:
        fp_e = ctx.S.fingerprint(e)
        assert fp_e[:5] == (64, 2, 64, 1, 1)
        assert fp_e[7] is True  # elementary abelian
    fp_z3 = ctx.S.fingerprint(ctx.Z3)
    assert fp_z3[:5] == (32, 2, 32, 1, 1)


def test_subgroup_closure_check_runs(contexts):
    ctx = contexts["affine"]
    for e in ctx.six_E:
        ctx.S.check_closed(e)
    ctx.S.check_closed(ctx.Q)
    ctx.S.check_closed(ctx.phi)


def test_valuation_report():
    rep = check_valuation(None)
    assert rep.passed
    assert rep.witnesses["pinned"]["POmega8+_q3"] == 12
    assert rep.witnesses["pinned"]["POmega7_q3"] == 9
    assert rep.witnesses["pinned"]["G2_q3"] == 6


def test_aliases_cover_spec_names():
    for alias in ("l64b", "l64c", "essential64", "Z3E", "wc", "appendix"):
        assert alias in CHECK_ALIASES


def test_battery_rejects_unknown_id(contexts):
    with pytest.raises(ConfigurationError):
        run_battery(contexts["affine"], ids=["nonsense"])


def test_context_rejects_wrong_group():
    # a tiny abelian 2-group has no extraspecial candidate above its
    # Frattini subgroup, so the distinguished-subgroup search must fail
    gens = [Permutation.from_cycles(6, (0, 1)), Permutation.from_cycles(6, (2, 3)),
            Permutation.from_cycles(6, (4, 5))]
    arrs = [g.images for g in gens]
    grp = CayleyGroup.from_generators(
        arrs, mul=compose, key=lambda a: a.tobytes(),
        identity=np.arange(6, dtype=np.uint16))

    class FakeBundle:
        sylow = grp
        provenance = "fake"
        extras = {}

    ctx = StructureContext(FakeBundle())
    with pytest.raises(ConfigurationError):
        ctx.Q
