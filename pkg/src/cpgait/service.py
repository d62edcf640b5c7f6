"""REST API over a pipeline snapshot.

Read endpoints serve consistent views of the snapshot; classification
overrides are the only mutation and go through a single-writer lock.
An override appends to the dataset's override log, updates the served
confirmed class, and marks group stats stale; stats are recomputed on
the next stats request.

Endpoints (JSON bodies):

* ``GET  /patients`` — id-sorted list with per-side predictions.
* ``GET  /patients/{id}`` — full record: events, channels, trials.
* ``GET  /patients/{id}/sides/{side}/relevance`` — Grad-CAM export.
* ``GET  /patients/{id}/sides/{side}/overview?mode=standard|explain|group[&class=...]``
  — 29 overview rows (asymmetry / relevance max / z-score max; all three
  aggregate over both legs, the side segment is validated only).
* ``GET  /groups/{class}/stats`` — per-channel/side mean, SD, n.
* ``POST /patients/{id}/sides/{side}/classification`` — body
  ``{"chosen_class": "...", "note": "..."}``; appends an override.
* ``GET  /meta/catalog`` — channel order, units, labels, classes.
"""

from __future__ import annotations

import datetime
import threading

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .channels import (
    CATALOG_VERSION,
    CHANNEL_CATALOG,
    CYCLE_POINTS,
    MODEL_CHANNEL_INDEX,
    MODEL_CHANNELS,
    GaitClass,
    Side,
)
from .dataset import ClassificationOverride
from .explain import overview_relevance
from .groupstats import asymmetry_overview, zscore_overview
from .pipeline import ServedState, compute_all_group_stats


class GaitService:
    """Snapshot plus the mutable override log, behind a single-writer lock."""

    def __init__(self, state: ServedState):
        self.state = state
        self._lock = threading.Lock()
        self._confirmed = state.dataset.confirmed_view()
        self._stats = dict(state.group_stats)
        self._stats_stale = False

    def confirmed(self, patient_id: str, side: Side) -> GaitClass | None:
        with self._lock:
            return self._confirmed.get((patient_id, side))

    def apply_override(self, override: ClassificationOverride) -> None:
        with self._lock:
            self.state.dataset.overrides.append(override)
            self._confirmed[(override.patient_id, override.side)] = override.chosen_class
            self._stats_stale = True

    def group_stats(self, gait_class: GaitClass):
        with self._lock:
            if self._stats_stale:
                self._stats = compute_all_group_stats(self.state.dataset)
                self._stats_stale = False
            return self._stats.get(gait_class)


def _parse_side(name: str) -> Side:
    try:
        return Side.from_label(name)
    except ValueError:
        raise HTTPException(status_code=404, detail=f"unknown side {name!r}")


def _parse_class(name: str, status: int = 400) -> GaitClass:
    try:
        return GaitClass.from_label(name)
    except ValueError:
        raise HTTPException(status_code=status, detail=f"unknown gait class {name!r}")


def create_app(service: GaitService) -> FastAPI:
    app = FastAPI(title="cpgait review service")
    state = service.state

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    def get_patient(patient_id: str):
        try:
            return state.dataset.patient(patient_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown patient {patient_id!r}")

    def get_leg(patient_id: str, side: Side):
        try:
            return state.leg(patient_id, side)
        except KeyError:
            raise HTTPException(
                status_code=404, detail=f"no served leg {patient_id}/{side.value}"
            )

    def side_summary(patient, side: Side) -> dict | None:
        if side not in patient.sides:
            return None
        result = state.legs.get((patient.id, side))
        confirmed = service.confirmed(patient.id, side)
        return {
            "predicted": result.prediction.gait_class.label if result else None,
            "probabilities": result.prediction.probabilities.tolist() if result else None,
            "confirmed": confirmed.label if confirmed is not None else None,
        }

    @app.get("/patients")
    def list_patients():
        return [
            {
                "id": p.id,
                "exam_date": p.exam_date.isoformat(),
                "walking_speed": p.walking_speed,
                "sides": {
                    side.value: summary
                    for side in Side
                    if (summary := side_summary(p, side)) is not None
                },
            }
            for p in sorted(state.dataset.patients, key=lambda p: p.id)
        ]

    @app.get("/patients/{patient_id}")
    def patient_detail(patient_id: str):
        patient = get_patient(patient_id)
        sides = {}
        for side, record in patient.sides.items():
            sides[side.value] = {
                "events": {
                    "opposite_toe_off": record.events.opposite_toe_off,
                    "opposite_initial_contact": record.events.opposite_initial_contact,
                    "toe_off": record.events.toe_off,
                },
                "channels": {
                    ch.key: {
                        "unit": series.unit.value,
                        "averaged": series.values.tolist(),
                        "trials": [
                            trial[ch].values.tolist()
                            for trial in record.trials
                            if ch in trial
                        ],
                    }
                    for ch, series in record.averaged.items()
                },
                **(side_summary(patient, side) or {}),
            }
        return {
            "id": patient.id,
            "exam_date": patient.exam_date.isoformat(),
            "walking_speed": patient.walking_speed,
            "sides": sides,
        }

    @app.get("/patients/{patient_id}/sides/{side_name}/relevance")
    def leg_relevance(patient_id: str, side_name: str):
        side = _parse_side(side_name)
        get_patient(patient_id)
        result = get_leg(patient_id, side)
        relevance = result.relevance
        rows = relevance.per_channel
        levels = relevance.levels().reshape(len(MODEL_CHANNELS), CYCLE_POINTS)
        return {
            "patient_id": patient_id,
            "side": side.value,
            "target_class": relevance.target_class.label,
            "raw": relevance.raw.tolist(),
            "rows": {ch.key: rows[ch].tolist() for ch in MODEL_CHANNELS},
            "levels": {ch.key: levels[i].tolist() for i, ch in enumerate(MODEL_CHANNELS)},
        }

    @app.get("/patients/{patient_id}/sides/{side_name}/overview")
    def leg_overview(patient_id: str, side_name: str, mode: str = "standard",
                     gait_class: str | None = Query(None, alias="class")):
        _parse_side(side_name)  # path segment validated; aggregation spans both legs
        patient = get_patient(patient_id)
        if mode == "standard":
            rows = asymmetry_overview(patient)
        elif mode == "explain":
            maps = {}
            for side in (Side.LEFT, Side.RIGHT):
                result = state.legs.get((patient_id, side))
                if result is None:
                    raise HTTPException(
                        status_code=404, detail=f"no relevance for {patient_id}/{side.value}"
                    )
                maps[side] = result.relevance
            rows = overview_relevance(maps[Side.LEFT], maps[Side.RIGHT])
        elif mode == "group":
            if gait_class is None:
                raise HTTPException(status_code=400, detail="mode=group needs ?class=...")
            stats = service.group_stats(_parse_class(gait_class))
            if stats is None:
                raise HTTPException(
                    status_code=404, detail=f"no confirmed legs for class {gait_class!r}"
                )
            rows = zscore_overview(patient, stats)
        else:
            raise HTTPException(
                status_code=400, detail="mode must be standard, explain, or group"
            )
        return {
            "patient_id": patient_id,
            "mode": mode,
            **({"class": gait_class} if mode == "group" else {}),
            "order": [ch.key for ch in CHANNEL_CATALOG],
            "rows": {ch.key: rows[ch].tolist() for ch in CHANNEL_CATALOG},
        }

    @app.get("/groups/{class_name}/stats")
    def group_stats(class_name: str):
        gait_class = _parse_class(class_name, status=404)
        stats = service.group_stats(gait_class)
        if stats is None:
            raise HTTPException(
                status_code=404, detail=f"no confirmed legs for class {class_name!r}"
            )
        return {
            "class": gait_class.label,
            "channels": [
                {
                    "channel": ch.key,
                    "side": side.value,
                    "mean": entry.mean.tolist(),
                    "std": entry.std.tolist(),
                    "n": entry.n,
                }
                for (ch, side), entry in sorted(
                    stats.per_channel_side.items(),
                    key=lambda kv: (kv[0][0].key, kv[0][1].value),
                )
            ],
        }

    @app.post("/patients/{patient_id}/sides/{side_name}/classification")
    def post_classification(patient_id: str, side_name: str, body: dict):
        side = _parse_side(side_name)
        get_patient(patient_id)
        if not isinstance(body, dict) or "chosen_class" not in body:
            raise HTTPException(status_code=400, detail="body must carry 'chosen_class'")
        chosen = _parse_class(str(body["chosen_class"]))
        note = body.get("note")
        if note is not None and not isinstance(note, str):
            raise HTTPException(status_code=400, detail="'note' must be a string")
        override = ClassificationOverride(
            patient_id=patient_id,
            side=side,
            chosen_class=chosen,
            timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat(),
            note=note,
        )
        service.apply_override(override)
        return {"patient_id": patient_id, "side": side.value, "confirmed": chosen.label}

    @app.get("/meta/catalog")
    def catalog():
        return {
            "catalog_version": CATALOG_VERSION,
            "cycle_points": CYCLE_POINTS,
            "channels": [
                {
                    "key": ch.key,
                    "variable": ch.variable.value,
                    "body_part": ch.body_part.value,
                    "plane": ch.plane.value,
                    "unit": ch.unit.value,
                    "label": ch.label,
                    "in_model": ch in MODEL_CHANNEL_INDEX,
                }
                for ch in CHANNEL_CATALOG
            ],
            "model_channels": [ch.key for ch in MODEL_CHANNELS],
            "classes": [{"index": int(c), "label": c.label} for c in GaitClass],
        }

    return app
