import json

import pytest

from blowup_rigidity.checks import CLAIMS, CheckRecord, make_record
from blowup_rigidity.errors import UnknownCheckId
from blowup_rigidity.fieldgeom import Config
from blowup_rigidity.report import (
    CHECK_ORDER,
    SweepCase,
    VerificationReport,
    default_s,
    next_valid_q,
    product_cases,
    run_all,
    sweep,
)


def test_registry_rejects_unknown_id():
    with pytest.raises(UnknownCheckId):
        make_record("no.such.check", "PASS", 1, 1)
    with pytest.raises(ValueError):
        make_record("config.structure", "MAYBE", 1, 1)


def test_registry_covers_order():
    assert set(CHECK_ORDER) == set(CLAIMS)
    rec = make_record("lattice.strict_h_self", "PASS", {"axis_1": 1}, {"axis_1": 1})
    assert rec.claim


def test_run_all_c0(c0):
    report = run_all(c0, draws=200)
    assert report.exit_code == 0
    assert report.counts == {"PASS": 25, "FAIL": 0, "WARN": 1}
    ids = [rec.check_id for rec in report.records]
    assert ids == [cid for cid in CHECK_ORDER if cid != "vectorfields.kernel_extra"]
    warn = next(rec for rec in report.records if rec.status == "WARN")
    assert warn.check_id == "rigidity.census_lines"
    assert report.skipped == ["vectorfields.kernel_extra"]


def test_run_all_extra_q(c0):
    q2 = next_valid_q(c0.n, c0.s, c0.q)
    report = run_all(c0, draws=100, extra_q=q2)
    extra = next(
        rec for rec in report.records if rec.check_id == "vectorfields.kernel_extra"
    )
    assert extra.status == "PASS"
    assert extra.computed["q"] == q2
    assert report.skipped == []


def test_run_all_deterministic_bytes(c0):
    a = run_all(c0, draws=150).to_json()
    b = run_all(c0, draws=150).to_json()
    assert a == b
    payload = json.loads(a)
    assert payload["config"]["base"] == [[1, 2], [3, 4, 5]]
    assert "elapsed_ms" not in json.dumps(payload)


def test_run_all_timings_not_canonical(c0):
    report = run_all(c0, draws=50)
    with_t = report.to_json(timings=True)
    without_t = report.to_json(timings=False)
    assert "elapsed_ms" in with_t
    assert "elapsed_ms" not in without_t


def test_run_all_invalid_config_skips():
    bad = Config(n=2, r=2, s=(2, 2), q=13, zeta=12, base=((1, 2), (3, 4)),
                 skip_checks=True)
    report = run_all(bad)
    assert report.exit_code == 1
    assert [rec.check_id for rec in report.records] == ["config.structure"]
    assert "config.genericity" in report.skipped
    assert "vectorfields.kernel" in report.skipped


def test_report_duplicate_ids_rejected(c0):
    rec = make_record("config.structure", "PASS", 1, 1)
    with pytest.raises(ValueError):
        VerificationReport(c0.to_dict(), [rec, rec])


def test_markdown_rendering(c0):
    report = run_all(c0, draws=50)
    md = report.to_markdown()
    assert "| check | status |" in md
    assert "rigidity.census_lines" in md
    assert "25 PASS, 0 FAIL, 1 WARN" in md


def test_default_s():
    assert default_s(2, 2) == (2, 3)
    assert default_s(3, 2) == (1, 2)
    assert default_s(2, 4) == (1, 2, 3, 4)


def test_product_cases_variants():
    cases = product_cases([2], [2, 3], seed=5, variants=2)
    assert len(cases) == 4
    assert cases[0].s == (2, 3) and cases[1].s == (3, 4)
    assert all(case.seed == 5 for case in cases)


def test_next_valid_q():
    assert next_valid_q(2, (2, 3), 13) == 17
    assert next_valid_q(3, (1, 2, 3), 13) == 19
    assert next_valid_q(5, (1, 2), 11) == 31


def test_sweep_continues_past_errors(c0):
    cases = [
        SweepCase(n=2, r=2, s=(2, 3), q=13, seed=1),
        SweepCase(n=3, r=3, s=(1, 2, 3), q=7, seed=0),  # impossible field
    ]
    result = sweep(cases, jobs=1, draws=50)
    assert result.exit_code == 1
    rows = dict(result.rows)
    good = rows["n=2 r=2 s=(2,3) q=13 seed=1"]
    bad = rows["n=3 r=3 s=(1,2,3) q=7 seed=0"]
    assert good["summary"]["FAIL"] == 0
    assert "TooSmallField" in bad["error"]
    agg = result.aggregate
    assert agg["cases"] == 2 and agg["errors"] == 1
    assert agg["per_check"]["rigidity.automorphisms"]["PASS"] == 1


def test_sweep_parallel_matches_serial():
    cases = [
        SweepCase(n=2, r=2, s=(2, 3), q=13, seed=1),
        SweepCase(n=3, r=2, s=(1, 2), q=13, seed=1),
    ]
    serial = sweep(cases, jobs=1, draws=50)
    parallel = sweep(cases, jobs=2, draws=50)
    assert serial.to_json() == parallel.to_json()


def test_default_jobs_env(monkeypatch):
    from blowup_rigidity.report import ENV_JOBS, default_jobs

    monkeypatch.delenv(ENV_JOBS, raising=False)
    assert default_jobs() == 1
    monkeypatch.setenv(ENV_JOBS, "4")
    assert default_jobs() == 4
    monkeypatch.setenv(ENV_JOBS, "junk")
    assert default_jobs() == 1


def test_check_record_to_dict():
    rec = CheckRecord("config.structure", "PASS", 1, 1, claim="c", detail="d",
                      elapsed_ms=1.234)
    d = rec.to_dict(timings=True)
    assert d["elapsed_ms"] == 1.234
    assert "elapsed_ms" not in rec.to_dict(timings=False)
