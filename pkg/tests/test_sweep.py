import json

import pytest

from robin_torsion.geometry import Disk, Peanut, RoundedCrossPolygon, build_radial_family
from robin_torsion.sweep import (CSV_COLUMNS, ConstantFamily, SweepRecord, a2_margin, atlas,
                                 certify_path, cross_grid, evaluate, record_key,
                                 rounding_study)


def small_grid():
    return cross_grid([1.5, 2.0], [1.5, 2.0], h=0.1, grading=(0.5, 3))


def test_record_key_is_canonical():
    assert record_key({"b": 1, "a": [1, 2]}) == record_key({"a": [1, 2], "b": 1})


def test_record_json_round_trip():
    rec = SweepRecord(key="k", params={"beta": 1.0}, verdict="monotone", worst=-0.1,
                      worst_at=[0.1, 0.2], runtime=3.0)
    back = SweepRecord.from_json(rec.to_json())
    assert back.verdict == "monotone" and back.worst_at == [0.1, 0.2]
    assert "runtime" not in json.loads(rec.to_json())


def test_evaluate_failure_is_a_record():
    rec = evaluate({"domain": {"kind": "cross", "a": 0.5, "b": 2.0}, "beta": 1.0, "h": 0.1})
    assert rec.status == "failed" and "DomainError" in rec.error


def test_a2_margin():
    assert a2_margin(RoundedCrossPolygon(2, 2, 0.5), 1.0) == pytest.approx(-1.0, abs=1e-12)
    assert a2_margin(Disk(), 1.0) == pytest.approx(2.0, abs=1e-10)


def test_atlas_writes_sorted_store_and_csv(tmp_path):
    out = tmp_path / "rec.jsonl"
    recs = atlas(small_grid(), out)
    lines = out.read_text().splitlines()
    keys = [json.loads(x)["key"] for x in lines]
    assert keys == sorted(keys) and len(keys) == 4
    assert lines[0].startswith('{"key":')
    csv_lines = out.with_suffix(".csv").read_text().splitlines()
    assert csv_lines[0] == ",".join(CSV_COLUMNS)
    assert len(csv_lines) == 5
    assert all(r.status == "ok" for r in recs)


def test_atlas_resume_is_noop_and_matches(tmp_path):
    full = tmp_path / "full.jsonl"
    atlas(small_grid(), full)
    part = tmp_path / "part.jsonl"
    atlas(small_grid()[:2], part)
    # an interrupted run leaves a truncated journal line behind
    with open(part, "a") as fh:
        fh.write('{"key": "trunc')
    atlas(small_grid(), part)
    assert part.read_bytes() == full.read_bytes()
    before = part.read_bytes()
    atlas(small_grid(), part)
    assert part.read_bytes() == before


def test_atlas_worker_count_does_not_matter(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    atlas(small_grid(), a, workers=1)
    atlas(small_grid(), b, workers=3)
    assert a.read_bytes() == b.read_bytes()
    assert a.with_suffix(".csv").read_bytes() == b.with_suffix(".csv").read_bytes()


def test_empty_grid(tmp_path):
    out = tmp_path / "e.jsonl"
    assert atlas([], out) == []
    assert out.read_text() == ""
    assert out.with_suffix(".csv").read_text().strip() == ",".join(CSV_COLUMNS)


def test_timings_sidecar(tmp_path):
    out, tim = tmp_path / "r.jsonl", tmp_path / "t.jsonl"
    atlas(small_grid()[:1], out, timings=tim)
    row = json.loads(tim.read_text().splitlines()[0])
    assert row["runtime"] > 0


def test_atlas_phase_boundary(tmp_path):
    grid = cross_grid([1.5, 2.0], [1.5, 2.0, 3.0], h=0.02, grading=(0.5, 8))
    recs = {(r.params["domain"]["a"], r.params["domain"]["b"]): r
            for r in atlas(grid, tmp_path / "ab.jsonl", workers=4)}
    for (a, b), r in recs.items():
        if a == b:
            assert r.verdict == "monotone" and r.verdict_x1 == "monotone"
        elif a < b:
            # weak contrasts have a positive worst value below the 2 tau cutoff
            assert r.verdict in ("violated", "inconclusive") and r.worst > 0
            assert r.c1 < -3 * r.c1_err
    assert recs[(1.5, 3.0)].verdict == "violated"
    # a > b mirrors the swapped cross
    assert recs[(2.0, 1.5)].verdict == recs[(1.5, 2.0)].verdict_x1
    assert recs[(2.0, 1.5)].verdict_x1 == recs[(1.5, 2.0)].verdict


def test_certify_constant_disk_family():
    cert = certify_path(ConstantFamily(Disk(), 1.0), n_t=9, h=0.05)
    assert cert.holds
    margins = [p["margin"] for p in cert.points]
    assert max(margins) - min(margins) == 0.0


def test_certify_disk_to_peanut():
    fam = build_radial_family(Disk(), Peanut.with_min_curvature(-0.5), 1.0)
    cert = certify_path(fam, n_t=9, h=0.05)
    assert cert.holds, cert.offending
    assert all(p["A2_holds"] for p in cert.points)


def test_certify_needs_enough_points():
    with pytest.raises(ValueError):
        certify_path(ConstantFamily(Disk(), 1.0), n_t=5)


def test_certificate_inconclusive_on_coarse_mesh():
    cert = certify_path(ConstantFamily(Disk(), 1.0), n_t=9, h=0.1)
    assert cert.status == "inconclusive" and len(cert.offending) == 9


def test_rounding_study_skips_unresolved_radius():
    res = rounding_study(1.5, 3.0, 1.0, [0.01], h=0.05)
    assert res["rows"][0]["status"] == "skipped"
    assert res["gap_positive_all"] is False


def test_rounding_study_square_cross_gap_negative():
    res = rounding_study(2.0, 2.0, 1.0, [0.5, 0.2], h=0.04, grading=(0.5, 3), delta=0.15)
    rows = res["rows"]
    assert all(r["status"] == "ok" and r["gap"] < 0 for r in rows)
    assert rows[0]["margin_A2"] == pytest.approx(-1.0, abs=1e-9)
    assert rows[1]["margin_A2"] == pytest.approx(1 - 1 / 0.2, abs=1e-9)
