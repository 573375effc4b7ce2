"""Session-scoped fixtures: every expensive object is built exactly once."""

import time

import numpy as np
import pytest

from d4fusion.cayley import AutoMap
from d4fusion.groupmodels import (
    build_affine_model,
    build_frame_model_gf3,
    build_omega8plus2,
    sylow_via_chamber,
)
from d4fusion.rootmodel import build_root_model, root_model_matches, triality_automap
from d4fusion.structure import StructureContext, run_battery


@pytest.fixture(scope="session")
def omega_handle():
    return build_omega8plus2()


@pytest.fixture(scope="session")
def chamber_bundle(omega_handle):
    t0 = time.monotonic()
    bundle = sylow_via_chamber(omega_handle)
    bundle.extras["build_seconds"] = time.monotonic() - t0
    return bundle


@pytest.fixture(scope="session")
def affine_bundle():
    t0 = time.monotonic()
    bundle = build_affine_model()
    bundle.extras["build_seconds"] = time.monotonic() - t0
    return bundle


@pytest.fixture(scope="session")
def frame_bundle():
    t0 = time.monotonic()
    bundle = build_frame_model_gf3()
    bundle.extras["build_seconds"] = time.monotonic() - t0
    return bundle


@pytest.fixture(scope="session")
def bundles(chamber_bundle, affine_bundle, frame_bundle):
    return {"omega8plus2": chamber_bundle, "affine": affine_bundle,
            "frame": frame_bundle}


@pytest.fixture(scope="session")
def contexts(bundles):
    return {name: StructureContext(b) for name, b in bundles.items()}


@pytest.fixture(scope="session")
def batteries(contexts):
    out = {}
    for name, ctx in contexts.items():
        t0 = time.monotonic()
        ids = None
        reports = run_battery(ctx, ids=ids)
        if name == "affine":
            reports.extend(run_battery(ctx, ids=["a8"]))
        out[name] = {"reports": reports, "seconds": time.monotonic() - t0}
    return out


@pytest.fixture(scope="session")
def chamber_triality(chamber_bundle, contexts):
    rm = build_root_model()
    tri = triality_automap(rm)
    trans = root_model_matches(chamber_bundle.matrices)
    inv = np.empty_like(trans)
    inv[trans] = np.arange(len(trans))
    images = trans[tri.images[inv]].astype(np.uint16)
    return AutoMap(contexts["omega8plus2"].S, images)


@pytest.fixture(scope="session")
def order3_searches(contexts):
    """First-found order-3 automorphism per model, with timing."""
    from d4fusion.automorphisms import order3_automorphisms
    out = {}
    for name in ("omega8plus2", "frame"):
        t0 = time.monotonic()
        outcome = order3_automorphisms(contexts[name], budget_secs=7200, limit=1)
        out[name] = {"outcome": outcome, "seconds": time.monotonic() - t0}
    return out


@pytest.fixture(scope="session")
def isomorphisms(contexts):
    from d4fusion.automorphisms import find_isomorphism
    out = {}
    for a, b in (("affine", "omega8plus2"), ("omega8plus2", "frame")):
        t0 = time.monotonic()
        outcome = find_isomorphism(contexts[a], contexts[b], budget_secs=7200)
        out[(a, b)] = {"outcome": outcome, "seconds": time.monotonic() - t0}
    return out


@pytest.fixture(scope="session")
def fusion_systems(bundles, contexts, chamber_triality, order3_searches):
    from d4fusion.fusion import build_fusion_system
    systems = {}
    systems["O8p2"] = build_fusion_system(
        "O8p2", bundles["omega8plus2"], contexts["omega8plus2"])
    systems["O8p2x3"] = build_fusion_system(
        "O8p2x3", bundles["omega8plus2"], contexts["omega8plus2"],
        order3=chamber_triality)
    systems["PO8p3"] = build_fusion_system(
        "PO8p3", bundles["frame"], contexts["frame"])
    systems["PO8p3x3"] = build_fusion_system(
        "PO8p3x3", bundles["frame"], contexts["frame"],
        order3=order3_searches["frame"]["outcome"].found[0])
    return systems


@pytest.fixture(scope="session")
def fusion_partitions(fusion_systems):
    from d4fusion.fusion import fuse_elements
    return {v: fuse_elements(fs) for v, fs in fusion_systems.items()}


@pytest.fixture(scope="session")
def fusion_radicals(fusion_systems):
    from d4fusion.fusion import check_O2
    return {v: check_O2(fs) for v, fs in fusion_systems.items()}


@pytest.fixture(scope="session")
def fusion_fingerprints(fusion_systems, fusion_partitions):
    from d4fusion.fusion import fingerprint_fusion
    return {v: fingerprint_fusion(fs, fusion_partitions[v])
            for v, fs in fusion_systems.items()}
