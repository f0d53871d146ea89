import hashlib
import json
import shutil
from pathlib import Path

import pytest

from wiresoup_report import cli
from wiresoup_report.render import FIGURES, ReportSpec, render

FIXTURES = Path(__file__).parent / "fixtures"


def copy_fixtures(dst: Path) -> None:
    for p in FIXTURES.iterdir():
        shutil.copy(p, dst / p.name)


def digest_dir(d: Path) -> dict[str, str]:
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(d.iterdir()) if p.is_file()}


def test_spec_validation(tmp_path):
    copy_fixtures(tmp_path)
    spec = ReportSpec.from_json((tmp_path / "report_spec.json").read_text(),
                                base=tmp_path)
    assert spec.figures == tuple(FIGURES)
    with pytest.raises(ValueError, match="bogus"):
        ReportSpec.from_json(json.dumps({
            "inputs": {}, "figures": [], "out_dir": "x", "bogus": 1}), base=tmp_path)
    with pytest.raises(ValueError, match="missing"):
        ReportSpec.from_json(json.dumps({
            "inputs": {"samples": "nope.jsonl"},
            "figures": ["loop_partition"], "out_dir": "x"}), base=tmp_path)
    with pytest.raises(ValueError, match="needs"):
        ReportSpec.from_json(json.dumps({
            "inputs": {}, "figures": ["pd_table"], "out_dir": "x"}), base=tmp_path)


def test_render_all_fixtures_byte_identical(tmp_path):
    """Acceptance: all bundled fixture outputs render, identically across runs."""
    copy_fixtures(tmp_path)
    spec_text = (tmp_path / "report_spec.json").read_text()
    before = digest_dir(tmp_path)

    spec1 = ReportSpec.from_json(spec_text, base=tmp_path)
    run1 = render(spec1)
    assert not run1["warnings"]
    hashes1 = digest_dir(tmp_path / "rendered")
    shutil.rmtree(tmp_path / "rendered")

    spec2 = ReportSpec.from_json(spec_text, base=tmp_path)
    run2 = render(spec2)
    hashes2 = digest_dir(tmp_path / "rendered")

    assert set(hashes1) == {"loop_partition.png", "pd_table.png", "tilde_m.png",
                            "survival.png", "index.html"}
    assert hashes1 == hashes2  # byte-identical across two runs
    # inputs untouched
    after = {k: v for k, v in digest_dir(tmp_path).items() if not k.startswith("rendered")}
    assert {k: v for k, v in before.items()} == after
    print("PASS  A11 report renders byte-identically:",
          ", ".join(sorted(hashes1)))


def test_empty_samples_placeholder(tmp_path):
    copy_fixtures(tmp_path)
    spec = ReportSpec.from_json(json.dumps({
        "inputs": {"samples": "empty_samples.jsonl"},
        "figures": ["loop_partition"],
        "out_dir": "out",
    }), base=tmp_path)
    manifest = render(spec)
    assert (tmp_path / "out/loop_partition.png").exists()
    assert any("placeholder" in w for w in manifest["warnings"])


def test_cli_end_to_end(tmp_path, capsys):
    copy_fixtures(tmp_path)
    rc = cli.main(["--spec", str(tmp_path / "report_spec.json")])
    assert rc == 0
    out = capsys.readouterr().out
    assert "wrote 5 files" in out
    html = (tmp_path / "rendered/index.html").read_text()
    for name in FIGURES:
        assert f"{name}.png" in html


def test_cli_bad_spec(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"inputs": {}, "figures": ["nope"], "out_dir": "x"}))
    assert cli.main(["--spec", str(bad)]) == 2
