import numpy as np
import pytest
from fastapi.testclient import TestClient

from cpgait.channels import CHANNEL_CATALOG, MODEL_CHANNELS, GaitClass, Side
from cpgait.nn.training import TrainConfig
from cpgait.pipeline import run_pipeline
from cpgait.service import GaitService, create_app
from cpgait.synthetic import SyntheticConfig, generate_synthetic_dataset


@pytest.fixture(scope="module")
def client():
    ds = generate_synthetic_dataset(SyntheticConfig(legs_per_class=4, trials_per_leg=2, seed=8))
    state = run_pipeline(ds, train_cfg=TrainConfig(epochs=4, seed=2, batch_size=8))
    service = GaitService(state)
    return TestClient(create_app(service))


def test_patient_list_sorted_with_predictions(client):
    body = client.get("/patients").json()
    assert len(body) == 8
    assert [p["id"] for p in body] == sorted(p["id"] for p in body)
    for p in body:
        for side in ("left", "right"):
            assert p["sides"][side]["predicted"] in [c.label for c in GaitClass]
            assert len(p["sides"][side]["probabilities"]) == 4
            assert p["sides"][side]["confirmed"] in [c.label for c in GaitClass]


def test_patient_detail_carries_series_and_units(client):
    pid = client.get("/patients").json()[0]["id"]
    body = client.get(f"/patients/{pid}").json()
    left = body["sides"]["left"]
    assert set(left["channels"]) == {ch.key for ch in CHANNEL_CATALOG}
    entry = left["channels"]["angle.knee.sagittal"]
    assert entry["unit"] == "deg"
    assert len(entry["averaged"]) == 101
    assert len(entry["trials"]) == 2
    assert {"opposite_toe_off", "opposite_initial_contact", "toe_off"} <= set(left["events"])


def test_unknown_patient_404(client):
    assert client.get("/patients/000000").status_code == 404
    assert client.get("/patients/000000/sides/left/relevance").status_code == 404


def test_unknown_side_404(client):
    pid = client.get("/patients").json()[0]["id"]
    assert client.get(f"/patients/{pid}/sides/middle/relevance").status_code == 404


def test_relevance_rows(client):
    pid = client.get("/patients").json()[0]["id"]
    body = client.get(f"/patients/{pid}/sides/left/relevance").json()
    assert body["target_class"] in [c.label for c in GaitClass]
    assert len(body["raw"]) == 1414
    assert set(body["rows"]) == {ch.key for ch in MODEL_CHANNELS}
    for row in body["rows"].values():
        assert len(row) == 101
        assert all(0.0 <= v <= 1.0 for v in row)
    for levels in body["levels"].values():
        assert set(levels) <= {0, 1, 2}


def test_overview_modes(client):
    pid = client.get("/patients").json()[0]["id"]
    for mode in ("standard", "explain"):
        body = client.get(f"/patients/{pid}/sides/left/overview", params={"mode": mode}).json()
        assert body["order"] == [ch.key for ch in CHANNEL_CATALOG]
        assert set(body["rows"]) == set(body["order"])
        assert all(len(row) == 101 for row in body["rows"].values())
    group = client.get(
        f"/patients/{pid}/sides/left/overview",
        params={"mode": "group", "class": "crouch_gait"},
    ).json()
    assert len(group["rows"]) == 29
    assert client.get(
        f"/patients/{pid}/sides/left/overview", params={"mode": "group"}
    ).status_code == 400
    assert client.get(
        f"/patients/{pid}/sides/left/overview", params={"mode": "bogus"}
    ).status_code == 400


def test_overview_explain_matches_relevance_max(client):
    pid = client.get("/patients").json()[0]["id"]
    left = client.get(f"/patients/{pid}/sides/left/relevance").json()["rows"]
    right = client.get(f"/patients/{pid}/sides/right/relevance").json()["rows"]
    overview = client.get(
        f"/patients/{pid}/sides/left/overview", params={"mode": "explain"}
    ).json()["rows"]
    for key, row in left.items():
        expected = np.maximum(row, right[key])
        assert np.allclose(overview[key], expected)
    non_model = [ch.key for ch in CHANNEL_CATALOG if ch not in MODEL_CHANNELS]
    for key in non_model:
        assert all(v == 0.0 for v in overview[key])


def test_group_stats_endpoint(client):
    body = client.get("/groups/crouch_gait/stats").json()
    assert body["class"] == "crouch_gait"
    entries = {(e["channel"], e["side"]): e for e in body["channels"]}
    assert len(entries) == 29 * 2
    sample = entries[("angle.knee.sagittal", "left")]
    assert len(sample["mean"]) == 101 and len(sample["std"]) == 101
    assert sample["n"] >= 1
    assert client.get("/groups/moonwalk/stats").status_code == 404


def test_override_read_your_write(client):
    pid = client.get("/patients").json()[2]["id"]
    response = client.post(
        f"/patients/{pid}/sides/right/classification",
        json={"chosen_class": "crouch_gait", "note": "reviewed"},
    )
    assert response.status_code == 200
    listed = client.get("/patients").json()
    entry = next(p for p in listed if p["id"] == pid)
    assert entry["sides"]["right"]["confirmed"] == "crouch_gait"


def test_override_updates_group_stats(client):
    patients = client.get("/patients").json()
    # find a patient currently not confirmed crouch on the left
    target = next(
        p for p in patients if p["sides"]["left"]["confirmed"] != "true_equinus"
    )
    before = client.get("/groups/true_equinus/stats").json()
    n_before = before["channels"][0]["n"]
    client.post(
        f"/patients/{target['id']}/sides/left/classification",
        json={"chosen_class": "true_equinus"},
    )
    after = client.get("/groups/true_equinus/stats").json()
    assert after["channels"][0]["n"] == n_before + 1


def test_malformed_override_400(client):
    pid = client.get("/patients").json()[0]["id"]
    url = f"/patients/{pid}/sides/left/classification"
    assert client.post(url, json={}).status_code == 400
    assert client.post(url, json={"chosen_class": "sprint"}).status_code == 400
    assert client.post(url, json={"chosen_class": "jump_gait", "note": 7}).status_code == 400
    assert client.post(
        url, content=b"{not json", headers={"content-type": "application/json"}
    ).status_code == 400


def test_reads_are_stable_without_writes(client):
    pid = client.get("/patients").json()[0]["id"]
    a = client.get(f"/patients/{pid}/sides/left/relevance").content
    b = client.get(f"/patients/{pid}/sides/left/relevance").content
    assert a == b


def test_catalog_endpoint(client):
    body = client.get("/meta/catalog").json()
    assert body["catalog_version"] == "v1-29ch"
    assert body["cycle_points"] == 101
    assert [c["key"] for c in body["channels"]] == [ch.key for ch in CHANNEL_CATALOG]
    assert body["model_channels"] == [ch.key for ch in MODEL_CHANNELS]
    assert [c["label"] for c in body["classes"]] == [c.label for c in GaitClass]
    in_model = [c["key"] for c in body["channels"] if c["in_model"]]
    assert in_model == body["model_channels"]
    for c in body["channels"]:
        assert c["unit"] in {"deg", "Nm/kg", "W/kg", "%BW"}
