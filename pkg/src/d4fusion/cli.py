"""Command-line surface: construct | verify | fusion | report.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 resource
or configuration trouble.  A certificate JSON is written for outcomes 0
and 1.  The cache directory (flag --cache-dir, else the D4FUSION_CACHE
environment variable, else ./d4fusion-cache) holds chain caches, bundle
caches, search checkpoints and the latest certificates.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .perms import ConfigurationError, Permutation, ResourceError
from .reports import Certificate, LemmaReport, check_timer
from .stabchain import chain_to_json, load_chain, save_chain

log = logging.getLogger(__name__)

MODELS = ("omega8plus2", "affine", "frame")


@dataclass
class RunConfig:
    command: str
    model: str = "all"
    lemma: str = "all"
    variant: str = "O8p2"
    action: str = "build"
    q: int = 3
    cache_dir: Path = None
    seed: int = 2024
    budget_secs: float = 7200.0
    out: Path = None
    jobs: int = 1
    verbosity: int = 0

    def __post_init__(self):
        if self.budget_secs <= 0:
            raise ConfigurationError("budgets must be positive")
        if self.jobs < 1:
            raise ConfigurationError("jobs must be positive")

    def echo(self) -> dict:
        return {
            "command": self.command,
            "model": self.model,
            "lemma": self.lemma,
            "variant": self.variant,
            "action": self.action,
            "q": self.q,
            "cache_dir": str(self.cache_dir),
            "seed": self.seed,
            "budget_secs": self.budget_secs,
            "jobs": self.jobs,
            "tool_version": __version__,
        }


def resolve_cache_dir(flag_value) -> Path:
    if flag_value:
        path = Path(flag_value)
    elif os.environ.get("D4FUSION_CACHE"):
        path = Path(os.environ["D4FUSION_CACHE"])
    else:
        path = Path("d4fusion-cache")
    path.mkdir(parents=True, exist_ok=True)
    return path


# ---------------------------------------------------------------------------
# bundle construction with caching


def _bundle_cache_path(cache_dir: Path, model: str) -> Path:
    return cache_dir / ("bundle-%s.json" % model)


def _bundle_checksum(bundle) -> str:
    h = hashlib.sha256()
    h.update(bundle.embedding.tobytes())
    return h.hexdigest()


def save_bundle_cache(bundle, cache_dir: Path, model: str) -> None:
    doc = {
        "provenance": bundle.provenance,
        "degree": bundle.degree,
        "generators": [bundle.embedding[int(i)].tolist()
                       for i in bundle.sylow.gen_indices],
        "sig_cols": bundle.sig_cols.tolist(),
        "element_checksum": _bundle_checksum(bundle),
        "ambient_order_decimal": str(bundle.ambient.chain.order()),
    }
    with open(_bundle_cache_path(cache_dir, model), "w") as fh:
        json.dump(doc, fh)


def bundle_cache_validates(bundle, cache_dir: Path, model: str) -> bool:
    path = _bundle_cache_path(cache_dir, model)
    if not path.exists():
        return False
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except ValueError:
        return False
    return (doc.get("provenance") == bundle.provenance
            and doc.get("element_checksum") == _bundle_checksum(bundle)
            and doc.get("ambient_order_decimal") == str(bundle.ambient.chain.order()))


_BUILDERS = {}


def build_bundles(config: RunConfig, models=None):
    """Build (or reuse in-process) the requested model bundles."""
    from .groupmodels import (build_affine_model, build_frame_model_gf3,
                              build_omega8plus2, sylow_via_chamber)
    wanted = models or (MODELS if config.model == "all" else (config.model,))
    out = {}
    for model in wanted:
        if model in _BUILDERS:
            out[model] = _BUILDERS[model]
            continue
        if model == "omega8plus2":
            ambient = build_omega8plus2()
            bundle = sylow_via_chamber(ambient)
            save_chain(ambient.chain, "omega8plus2",
                       config.cache_dir / "chain-omega8plus2.json")
        elif model == "affine":
            bundle = build_affine_model()
        elif model == "frame":
            bundle = build_frame_model_gf3()
        else:
            raise ConfigurationError("unknown model %r" % model)
        save_bundle_cache(bundle, config.cache_dir, model)
        _BUILDERS[model] = bundle
        out[model] = bundle
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_construct(config: RunConfig) -> Certificate:
    cert = Certificate(config=config.echo())
    with check_timer() as t:
        bundles = build_bundles(config)
    for model, bundle in bundles.items():
        cert.add(LemmaReport(
            lemma_id="construct-%s" % model,
            status="pass",
            witnesses={
                "sylow_order": bundle.sylow.n,
                "ambient_order": bundle.ambient.chain.order(),
                "degree": bundle.degree,
                "provenance": bundle.provenance,
                "cache_validates": bundle_cache_validates(bundle, config.cache_dir,
                                                          model),
            },
            elapsed_ms=t.elapsed_ms,
            claim="model constructed with certified ambient chain and 4096-element "
                  "Sylow enumeration",
        ))
    return cert


def cmd_verify(config: RunConfig) -> Certificate:
    from .structure import (CHECK_ALIASES, CHECKS, StructureContext, check_valuation,
                            model_fingerprint, run_battery)
    cert = Certificate(config=config.echo())
    lemma = CHECK_ALIASES.get(config.lemma, config.lemma)
    if lemma == "valuation":
        cert.add(check_valuation(None, q_values=(config.q,)))
        return cert
    bundles = build_bundles(config, models=MODELS)
    contexts = {m: StructureContext(b) for m, b in bundles.items()}
    ids = None if lemma == "all" else [lemma]

    def battery_for(model):
        extra = ["a8"] if model == "affine" else []
        sel = ids if ids is not None else list(CHECKS) + extra
        return model, run_battery(contexts[model], ids=sel)

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=min(config.jobs, 3)) as pool:
            results = list(pool.map(battery_for, MODELS))
    else:
        results = [battery_for(m) for m in MODELS]
    for model, reports in results:
        for rep in reports:
            rep.lemma_id = "%s@%s" % (rep.lemma_id, model)
            cert.add(rep)
    if lemma == "all":
        cert.add(check_valuation(None))
        fps = {m: model_fingerprint(contexts[m]) for m in MODELS}
        agree = len({str(sorted(fp.items())) for fp in fps.values()}) == 1
        cert.add(LemmaReport(
            lemma_id="cross-model-fingerprints",
            status="pass" if agree else "fail",
            witnesses={m: {k: str(v) for k, v in fp.items()} for m, fp in fps.items()},
            elapsed_ms=0,
            claim="all three Sylow realizations share order histogram, central "
                  "series orders and elementary abelian counts",
        ))
        cert.reports.extend(_isomorphism_reports(config, contexts))
    return cert


def _isomorphism_reports(config: RunConfig, contexts):
    from .automorphisms import find_isomorphism
    out = []
    pairs = [("affine", "omega8plus2"), ("omega8plus2", "frame")]
    for a, b in pairs:
        with check_timer() as t:
            try:
                outcome = find_isomorphism(contexts[a], contexts[b],
                                           budget_secs=config.budget_secs)
                ok = outcome.ok
                wit = {"nodes": outcome.nodes, "found": len(outcome.found)}
            except ResourceError as exc:
                ok = False
                wit = {"error": str(exc), **exc.stats}
        out.append(LemmaReport(
            lemma_id="isomorphism-%s-%s" % (a, b),
            status="pass" if ok else "fail",
            witnesses=wit,
            elapsed_ms=t.elapsed_ms,
            claim="the two Sylow realizations are isomorphic (verified bijection)",
        ))
    return out


def _build_system(config: RunConfig, variant: str):
    from .fusion import build_fusion_system
    from .structure import StructureContext
    model = "omega8plus2" if variant.startswith("O8p2") else "frame"
    bundle = build_bundles(config, models=(model,))[model]
    ctx = StructureContext(bundle)
    checkpoint = config.cache_dir / ("order3-%s.checkpoint.json" % model)
    return build_fusion_system(variant, bundle, ctx,
                               order3_budget=config.budget_secs,
                               order3_checkpoint=checkpoint)


def cmd_fusion(config: RunConfig) -> Certificate:
    from .fusion import (check_O2, fingerprint_fusion, fuse_elements, fusion_report)
    cert = Certificate(config=config.echo())
    if config.action == "compare":
        fingerprints = {}
        with check_timer() as t:
            for variant in ("O8p2", "O8p2x3", "PO8p3", "PO8p3x3"):
                fs = _build_system(config, variant)
                fingerprints[variant] = fingerprint_fusion(fs)
        names = list(fingerprints)
        distinct = all(fingerprints[a] != fingerprints[b]
                       for i, a in enumerate(names) for b in names[i + 1:])
        cert.add(LemmaReport(
            lemma_id="fusion-compare",
            status="pass" if distinct else "fail",
            witnesses={v: {"essentials": fp[0], "class_rows": len(fp[1]),
                           "autFE": list(fp[2])} for v, fp in fingerprints.items()},
            elapsed_ms=t.elapsed_ms,
            claim="the four variants have pairwise distinct fingerprints",
        ))
        return cert
    with check_timer() as t:
        fs = _build_system(config, config.variant)
        if config.action == "build":
            rep = fusion_report(fs)
        elif config.action == "classes":
            part = fuse_elements(fs)
            rep = fusion_report(fs, partition=part)
        elif config.action == "o2":
            o2 = check_O2(fs)
            rep = fusion_report(fs, o2=o2)
        else:
            raise ConfigurationError("unknown fusion action %r" % config.action)
    cert.fusion_reports.append(rep)
    cert.add(LemmaReport(
        lemma_id="fusion-%s-%s" % (config.variant, config.action),
        status=rep["status"],
        witnesses={"essential_count": rep["essential_count"],
                   "o2_order": rep["o2_order"]},
        elapsed_ms=t.elapsed_ms,
        claim="fusion system assembled with trivial radical",
    ))
    return cert


def cmd_report(config: RunConfig) -> Certificate:
    cert = Certificate(config=config.echo())
    for path in sorted(config.cache_dir.glob("certificate-*.json")):
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except ValueError:
            continue
        cert.add(LemmaReport(
            lemma_id="certificate-%s" % path.stem,
            status=doc.get("overall", "fail"),
            witnesses={"path": str(path), "reports": len(doc.get("reports", []))},
            elapsed_ms=0,
            claim="previously written certificate",
        ))
    return cert


# ---------------------------------------------------------------------------
# entry point


def make_parser():
    parser = argparse.ArgumentParser(
        prog="d4fusion",
        description="certified 2-local structure and fusion-system checks for the "
                    "Sylow 2-subgroup shared by O8+(2) and POmega8+(3)")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--cache-dir", default=None)
        p.add_argument("--seed", type=int, default=2024)
        p.add_argument("--budget-secs", type=float, default=7200.0)
        p.add_argument("--out", default=None)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("-v", "--verbose", action="count", default=0)

    p = sub.add_parser("construct", help="build models and write caches")
    p.add_argument("--model", default="all", choices=MODELS + ("all",))
    common(p)

    p = sub.add_parser("verify", help="run structure checks")
    p.add_argument("--lemma", default="all")
    p.add_argument("--model", default="all")
    p.add_argument("--q", type=int, default=3)
    common(p)

    p = sub.add_parser("fusion", help="assemble and analyze fusion systems")
    p.add_argument("--variant", default="O8p2",
                   choices=("O8p2", "O8p2x3", "PO8p3", "PO8p3x3"))
    p.add_argument("--action", default="build",
                   choices=("build", "classes", "o2", "compare"))
    common(p)

    p = sub.add_parser("report", help="collect previously written certificates")
    common(p)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2))
    config = RunConfig(
        command=args.command,
        model=getattr(args, "model", "all"),
        lemma=getattr(args, "lemma", "all"),
        variant=getattr(args, "variant", "O8p2"),
        action=getattr(args, "action", "build"),
        q=getattr(args, "q", 3),
        cache_dir=resolve_cache_dir(args.cache_dir),
        seed=args.seed,
        budget_secs=args.budget_secs,
        out=Path(args.out) if args.out else None,
        jobs=args.jobs,
        verbosity=args.verbose,
    )
    handler = {
        "construct": cmd_construct,
        "verify": cmd_verify,
        "fusion": cmd_fusion,
        "report": cmd_report,
    }[config.command]
    try:
        cert = handler(config)
    except ResourceError as exc:
        print("resource error: %s" % exc, file=sys.stderr)
        return 2
    except ConfigurationError as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return 2
    out_path = config.out or (config.cache_dir / ("certificate-%s.json" % config.command))
    cert.write(out_path)
    for rep in cert.reports:
        print("%-42s %s  (%d ms)" % (rep.lemma_id, rep.status.upper(), rep.elapsed_ms))
    for frep in cert.fusion_reports:
        print("fusion %-35s %s  essentials=%d o2=%s" % (
            frep["variant"], frep["status"].upper(), frep["essential_count"],
            frep["o2_order"]))
    print("overall: %s  (certificate: %s)" % (cert.overall, out_path))
    return 0 if cert.overall == "pass" else 1


if __name__ == "__main__":
    raise SystemExit(main())
