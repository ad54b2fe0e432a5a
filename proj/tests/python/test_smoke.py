import csv
import json
import math

import pytest

import gwbridge as gw


def test_offspring_and_extinction():
    law = gw.Offspring({0: 0.25, 2: 0.75})
    assert abs(law.mean - 1.5) < 1e-15
    assert abs(gw.extinction_prob(law) - 1 / 3) < 1e-10
    assert law.case_tag == "Case1b"
    with pytest.raises(Exception):
        gw.Offspring({0: 0.5, 1: 0.4})


def test_bridge_dp_on_path_matches_line_walk():
    t = gw.Tree.path(10)
    # reflected walk: return at time 2 from the root is 1/2
    p, logp = gw.bridge_dp(t, 1)
    assert abs(p - 0.5) < 1e-15
    assert abs(logp - math.log(0.5)) < 1e-15
    for n in (2, 3, 4):
        assert abs(gw.bridge_dp(t, n)[0] - gw.return_prob(t, 2 * n)) < 1e-14
    assert gw.bridge_dp(t, 3, 1)[0] < gw.bridge_dp(t, 3)[0]


def test_sampling_is_seeded():
    law = gw.Offspring({1: 0.5, 2: 0.5})
    a = gw.sample_gw_survival(law, 8, gw.Rng(4))
    b = gw.sample_gw_survival(law, 8, gw.Rng(4))
    assert a.to_string() == b.to_string()
    assert len(a) == len(gw.Tree.from_string(a.to_string()))


def test_first_return_pmf():
    pmf = gw.z_first_return_pmf(10)
    expect = [math.comb(2 * k, k) / ((2 * k - 1) * 4**k) for k in range(1, 11)]
    got = pmf[:10]
    assert all(abs(x - y) < 1e-14 for x, y in zip(got, expect))


def test_run_experiment_writes_csv(tmp_path):
    cfg = json.loads(gw.default_config("Case2Diagnostics"))
    cfg["n_grid"] = [4]
    cfg["replicas"] = 2
    records, summary, ok = gw.run_experiment(cfg, tmp_path)
    assert ok
    assert summary["max_free_residual"] <= 1e-12
    with open(tmp_path / "Case2Diagnostics.csv") as f:
        rows = list(csv.reader(f))
    assert ",".join(rows[0]) == gw.CSV_HEADER
    assert len(rows) - 1 == len(records)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert "Case2Diagnostics" in manifest["experiments"]


def test_bad_config_raises():
    with pytest.raises(Exception):
        gw.run_experiment({"experiment": "TrapScaling", "nope": 1})


def test_checks_pass():
    checks = gw.run_checks(2)
    assert {c["name"] for c in checks} >= {"bridge_enumeration", "escape_binary", "couplings"}
    assert all(c["passed"] for c in checks), [c for c in checks if not c["passed"]]
