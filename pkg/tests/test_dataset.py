import json

import numpy as np
import pytest

from cpgait.channels import CHANNEL_CATALOG, GaitClass, Side
from cpgait.dataset import (
    ClassificationOverride,
    Dataset,
    load_dataset,
    save_dataset,
)
from cpgait.errors import DatasetFormatError
from cpgait.synthetic import SyntheticConfig, generate_synthetic_dataset


def small_dataset(seed=4):
    return generate_synthetic_dataset(SyntheticConfig(legs_per_class=2, trials_per_leg=2, seed=seed))


def datasets_equal(a: Dataset, b: Dataset) -> bool:
    if a.catalog_version != b.catalog_version:
        return False
    if a.ground_truth != b.ground_truth or a.overrides != b.overrides:
        return False
    if len(a.patients) != len(b.patients):
        return False
    for pa, pb in zip(a.patients, b.patients):
        if (pa.id, pa.exam_date, pa.walking_speed) != (pb.id, pb.exam_date, pb.walking_speed):
            return False
        if pa.confirmed != pb.confirmed:
            return False
        if set(pa.sides) != set(pb.sides):
            return False
        for side, ra in pa.sides.items():
            rb = pb.sides[side]
            if (ra.events.opposite_toe_off, ra.events.opposite_initial_contact, ra.events.toe_off) != (
                rb.events.opposite_toe_off, rb.events.opposite_initial_contact, rb.events.toe_off,
            ):
                return False
            if set(ra.averaged) != set(rb.averaged):
                return False
            for ch in ra.averaged:
                if ra.averaged[ch] != rb.averaged[ch]:
                    return False
            if len(ra.trials) != len(rb.trials):
                return False
            for ta, tb in zip(ra.trials, rb.trials):
                if set(ta) != set(tb) or any(ta[ch] != tb[ch] for ch in ta):
                    return False
        for side, pred in pa.predicted.items():
            other = pb.predicted.get(side)
            if other is None or pred.gait_class is not other.gait_class:
                return False
            if not np.array_equal(pred.probabilities, other.probabilities):
                return False
    return True


def test_round_trip_lossless(tmp_path):
    ds = small_dataset()
    ds.overrides.append(
        ClassificationOverride("100001", Side.LEFT, GaitClass.CROUCH_GAIT,
                               "2024-06-01T10:00:00+00:00", note="review")
    )
    path = tmp_path / "ds.json"
    save_dataset(ds, path)
    loaded = load_dataset(path)
    assert datasets_equal(ds, loaded)
    # numeric exactness, not just closeness
    ch = CHANNEL_CATALOG[3]
    assert np.array_equal(
        ds.patients[0].sides[Side.LEFT].averaged[ch].values,
        loaded.patients[0].sides[Side.LEFT].averaged[ch].values,
    )


def test_double_round_trip_stable_bytes(tmp_path):
    ds = small_dataset()
    p1, p2 = tmp_path / "one.json", tmp_path / "two.json"
    save_dataset(ds, p1)
    save_dataset(load_dataset(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_truncated_file_rejected(tmp_path):
    ds = small_dataset()
    path = tmp_path / "ds.json"
    save_dataset(ds, path)
    path.write_bytes(path.read_bytes()[:1000])
    with pytest.raises(DatasetFormatError):
        load_dataset(path)


def test_wrong_format_and_version(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"format": "something-else", "version": 1}))
    with pytest.raises(DatasetFormatError):
        load_dataset(path)
    path.write_text(json.dumps({"format": "cpgait-dataset", "version": 99}))
    with pytest.raises(DatasetFormatError) as exc:
        load_dataset(path)
    assert "version" in str(exc.value)


def test_hand_written_minimal_fixture(tmp_path):
    """One patient authored directly against the schema doc."""
    series = [float(i) / 100.0 for i in range(101)]
    channels = {
        ch.key: {"unit": ch.unit.value, "averaged": series, "trials": [series, series]}
        for ch in CHANNEL_CATALOG
    }
    side = {
        "events": {"opposite_toe_off": 9.5, "opposite_initial_contact": 49.0, "toe_off": 61.0},
        "channels": channels,
    }
    doc = {
        "format": "cpgait-dataset",
        "version": 1,
        "catalog": "v1-29ch",
        "patients": [
            {
                "id": "123456",
                "exam_date": "2023-11-05",
                "walking_speed": 0.95,
                "sides": {"left": side, "right": side},
                "confirmed": {"left": "jump_gait"},
            }
        ],
        "ground_truth": {"123456": {"left": "jump_gait"}},
        "overrides": [],
    }
    path = tmp_path / "fixture.json"
    path.write_text(json.dumps(doc))
    ds = load_dataset(path)
    patient = ds.patient("123456")
    assert patient.walking_speed == 0.95
    assert set(patient.sides[Side.LEFT].averaged) == set(CHANNEL_CATALOG)
    assert len(patient.sides[Side.RIGHT].trials) == 2
    assert patient.confirmed[Side.LEFT] is GaitClass.JUMP_GAIT
    assert ds.ground_truth[("123456", Side.LEFT)] is GaitClass.JUMP_GAIT


def test_bad_patient_location_reported(tmp_path):
    ds = small_dataset()
    path = tmp_path / "ds.json"
    save_dataset(ds, path)
    doc = json.loads(path.read_text())
    doc["patients"][1]["sides"]["left"]["channels"]["angle.knee.sagittal"]["averaged"] = [1.0, 2.0]
    path.write_text(json.dumps(doc))
    with pytest.raises(DatasetFormatError) as exc:
        load_dataset(path)
    assert "patients[1]" in str(exc.value)


def test_duplicate_ids_rejected(tmp_path):
    ds = small_dataset()
    path = tmp_path / "ds.json"
    save_dataset(ds, path)
    doc = json.loads(path.read_text())
    doc["patients"][1]["id"] = doc["patients"][0]["id"]
    path.write_text(json.dumps(doc))
    with pytest.raises(DatasetFormatError):
        load_dataset(path)


def test_confirmed_view_replays_overrides():
    ds = small_dataset()
    patient = ds.patients[0]
    original = patient.confirmed[Side.LEFT]
    flipped = GaitClass((int(original) + 1) % 4)
    ds.overrides.append(
        ClassificationOverride(patient.id, Side.LEFT, flipped, "2024-01-01T00:00:00+00:00")
    )
    ds.overrides.append(
        ClassificationOverride(patient.id, Side.LEFT, original, "2024-01-02T00:00:00+00:00")
    )
    view = ds.confirmed_view()
    assert view[(patient.id, Side.LEFT)] is original  # latest wins
    ds.overrides.append(
        ClassificationOverride(patient.id, Side.LEFT, flipped, "2024-01-03T00:00:00+00:00")
    )
    assert ds.confirmed_view()[(patient.id, Side.LEFT)] is flipped


def test_save_is_atomic(tmp_path, monkeypatch):
    ds = small_dataset()
    path = tmp_path / "ds.json"
    save_dataset(ds, path)
    before = path.read_bytes()

    class Boom(RuntimeError):
        pass

    def partial_dump(doc, fh, **kwargs):
        fh.write('{"format": "cpgait-dataset"')  # then die mid-write
        raise Boom()

    monkeypatch.setattr("cpgait.dataset.json.dump", partial_dump)
    with pytest.raises(Boom):
        save_dataset(ds, path)
    assert path.read_bytes() == before  # failed save never clobbers the file
    assert not path.with_suffix(".json.tmp").exists()
