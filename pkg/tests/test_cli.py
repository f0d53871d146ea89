import json
from pathlib import Path

import pytest

from wiresoup import cli


def write_cfg(tmp_path, cfg):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return str(p)


def test_schema_round_trip():
    schema = cli.schema_dump()
    parsed = json.loads(schema)
    assert parsed["title"].startswith("wiresoup")
    cli.validate_config({"task": "verify-equivalence"})


def test_unknown_field_named():
    with pytest.raises(ValueError, match="bogus"):
        cli.validate_config({"task": "sample", "bogus": 1})


def test_seed_required_for_stochastic_tasks():
    with pytest.raises(ValueError, match="seed"):
        cli.validate_config({"task": "stationarity"})


def test_sample_determinism(tmp_path):
    cfgp = write_cfg(tmp_path, {
        "task": "sample", "seed": 7,
        "graph": {"kind": "fixture", "name": "single_edge"},
        "model": {"alpha": 2.0, "J": 0.5},
        "chain": {"sweeps": 150, "burn_in": 10},
        "observables": ["loop_lengths"],
    })
    assert cli.run(cfgp, str(tmp_path / "a")) == 0
    assert cli.run(cfgp, str(tmp_path / "b")) == 0
    assert (tmp_path / "a/samples.jsonl").read_bytes() == \
           (tmp_path / "b/samples.jsonl").read_bytes()
    summary = json.loads((tmp_path / "a/summary.json").read_text())
    assert {"task", "config_hash", "version", "summary"} <= set(summary)


def test_sample_jsonl_format(tmp_path):
    cfgp = write_cfg(tmp_path, {
        "task": "sample", "seed": 3,
        "graph": {"kind": "hypercubic", "L": 1, "d": 2},
        "model": {"alpha": 2.0, "J": 0.4},
        "chain": {"sweeps": 40, "burn_in": 5, "thinning": 2},
        "observables": ["loop_lengths", "n_origin", "lmax_origin"],
    })
    assert cli.run(cfgp, str(tmp_path / "out")) == 0
    lines = (tmp_path / "out/samples.jsonl").read_text().splitlines()
    assert len(lines) == 20
    rec = json.loads(lines[0])
    assert {"sweep", "lambda", "sum_m", "loop_lengths", "n_origin",
            "lmax_origin", "replica"} <= set(rec)


def test_verify_equivalence_task(tmp_path):
    cfgp = write_cfg(tmp_path, {
        "task": "verify-equivalence",
        "fixtures": ["single_edge"],
        "N_values": [1, 2],
        "J_values": [0.1],
        "m_cap": 12,
    })
    assert cli.run(cfgp, str(tmp_path / "out")) == 0
    rep = json.loads((tmp_path / "out/report.json").read_text())
    assert rep["all_pass"] and len(rep["results"]) == 2


def test_stationarity_task(tmp_path):
    cfgp = write_cfg(tmp_path, {
        "task": "stationarity", "seed": 5,
        "fixture": "single_edge", "m": [4], "alpha": 2.0,
        "steps": 50_000, "tolerance": 0.05,
    })
    assert cli.run(cfgp, str(tmp_path / "out")) == 0


def test_pd_table_task(tmp_path):
    cfgp = write_cfg(tmp_path, {
        "task": "pd-table", "seed": 2,
        "theta_values": [1.0], "k_values": [1], "n_samples": 2000,
    })
    assert cli.run(cfgp, str(tmp_path / "out")) == 0
    rep = json.loads((tmp_path / "out/report.json").read_text())
    row = rep["rows"][0]
    assert {"k", "theta", "same_block", "even"} <= set(row)
    assert {"closed_form", "mc_estimate", "stderr"} <= set(row["same_block"])


def test_invalid_config_exit_code(tmp_path):
    cfgp = write_cfg(tmp_path, {"task": "sample"})  # missing seed
    assert cli.main(["--config", cfgp, "--out", str(tmp_path / "x")]) == 2


def test_schema_flag(capsys):
    assert cli.main(["--schema"]) == 0
    out = capsys.readouterr().out
    json.loads(out)


def test_bundled_example_configs_validate():
    base = Path(__file__).resolve().parent.parent / "configs"
    found = sorted(base.glob("*.json"))
    assert found, "bundled example configs missing"
    for p in found:
        cli.validate_config(json.loads(p.read_text()))
