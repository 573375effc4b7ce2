import json

import pytest

from d4fusion import cli
from d4fusion.reports import Certificate, LemmaReport


@pytest.fixture(autouse=True)
def seeded_builders(bundles):
    """Reuse the session bundles inside the CLI instead of rebuilding."""
    cli._BUILDERS.update({
        "omega8plus2": bundles["omega8plus2"],
        "affine": bundles["affine"],
        "frame": bundles["frame"],
    })
    yield


def run(args, tmp_path):
    return cli.main(args + ["--cache-dir", str(tmp_path)])


def test_construct_all(tmp_path, capsys):
    code = run(["construct", "--model", "all"], tmp_path)
    assert code == 0
    out = capsys.readouterr().out
    assert "construct-omega8plus2" in out
    cert = json.loads((tmp_path / "certificate-construct.json").read_text())
    assert cert["overall"] == "pass"
    by_id = {r["lemma_id"]: r for r in cert["reports"]}
    assert by_id["construct-omega8plus2"]["witnesses"]["ambient_order"] == 174182400
    assert by_id["construct-affine"]["witnesses"]["ambient_order"] == 1290240
    for model in ("omega8plus2", "affine", "frame"):
        assert by_id["construct-%s" % model]["witnesses"]["sylow_order"] == 4096


def test_verify_single_lemma(tmp_path):
    code = run(["verify", "--lemma", "cent"], tmp_path)
    assert code == 0
    cert = json.loads((tmp_path / "certificate-verify.json").read_text())
    ids = {r["lemma_id"] for r in cert["reports"]}
    assert {"cent@omega8plus2", "cent@affine", "cent@frame"} <= ids
    for r in cert["reports"]:
        assert r["witnesses"]["Z_order"] == 2


def test_verify_accepts_spec_alias(tmp_path):
    code = run(["verify", "--lemma", "wc"], tmp_path)
    assert code == 0
    cert = json.loads((tmp_path / "certificate-verify.json").read_text())
    assert all(r["lemma_id"].startswith("extraspecial@") for r in cert["reports"])


def test_verify_valuation(tmp_path):
    code = run(["verify", "--lemma", "appendix", "--q", "3"], tmp_path)
    assert code == 0
    cert = json.loads((tmp_path / "certificate-verify.json").read_text())
    (rep,) = cert["reports"]
    assert rep["witnesses"]["pinned"]["POmega8+_q3"] == 12


def test_verify_reports_deterministic_modulo_timing(tmp_path):
    run(["verify", "--lemma", "frattini"], tmp_path)
    first = json.loads((tmp_path / "certificate-verify.json").read_text())
    run(["verify", "--lemma", "frattini"], tmp_path)
    second = json.loads((tmp_path / "certificate-verify.json").read_text())

    def strip(doc):
        for r in doc["reports"]:
            r.pop("elapsed_ms", None)
        return doc

    assert strip(first) == strip(second)


def test_unknown_lemma_is_configuration_error(tmp_path):
    code = run(["verify", "--lemma", "bogus"], tmp_path)
    assert code == 2


def test_report_collects_and_flags_failures(tmp_path):
    cert = Certificate(config={})
    cert.add(LemmaReport("synthetic", "fail", {"reason": "planted"}, 0))
    cert.write(tmp_path / "certificate-synthetic.json")
    code = run(["report"], tmp_path)
    assert code == 1


def test_verify_with_worker_pool(tmp_path):
    code = run(["verify", "--lemma", "cent", "--jobs", "3"], tmp_path)
    assert code == 0


def test_fusion_o2_action(tmp_path):
    code = run(["fusion", "--variant", "O8p2", "--action", "o2"], tmp_path)
    assert code == 0
    cert = json.loads((tmp_path / "certificate-fusion.json").read_text())
    (frep,) = cert["fusion_reports"]
    assert frep["variant"] == "O8p2"
    assert frep["essential_count"] == 4
    assert frep["o2_order"] == 1
    assert len(frep["autFE_orders"]) == 6


def test_bundle_cache_roundtrip(tmp_path, bundles):
    cli.save_bundle_cache(bundles["affine"], tmp_path, "affine")
    assert cli.bundle_cache_validates(bundles["affine"], tmp_path, "affine")
    assert not cli.bundle_cache_validates(bundles["frame"], tmp_path, "affine")


def test_config_validation():
    with pytest.raises(Exception):
        cli.RunConfig(command="verify", budget_secs=-1)
    with pytest.raises(Exception):
        cli.RunConfig(command="verify", jobs=0)


def test_env_var_cache_dir(monkeypatch, tmp_path):
    monkeypatch.setenv("D4FUSION_CACHE", str(tmp_path / "envcache"))
    path = cli.resolve_cache_dir(None)
    assert str(path).endswith("envcache")
    explicit = cli.resolve_cache_dir(str(tmp_path / "flagged"))
    assert str(explicit).endswith("flagged")
