"""Dataset container and its JSON file format.

One dataset is one JSON file (schema version 1):

.. code-block:: text

    {
      "format": "cpgait-dataset",
      "version": 1,
      "catalog": "v1-29ch",
      "patients": [
        {
          "id": "100001",
          "exam_date": "2024-01-01",
          "walking_speed": 1.02,
          "sides": {
            "left": {
              "events": {"opposite_toe_off": ..., "opposite_initial_contact": ..., "toe_off": ...},
              "channels": {
                "angle.pelvis.sagittal": {"unit": "deg", "averaged": [101 floats],
                                          "trials": [[101 floats], ...]},
                ...
              }
            },
            "right": {...}
          },
          "predicted": {"left": {"class": "crouch_gait", "probabilities": [4 floats]}, ...},
          "confirmed": {"left": "crouch_gait", ...}
        }
      ],
      "ground_truth": {"100001": {"left": "true_equinus", ...}, ...},
      "overrides": [
        {"patient_id": "100001", "side": "left", "chosen_class": "jump_gait",
         "timestamp": "2024-05-01T12:00:00+00:00", "note": "..."} , ...
      ]
    }

``predicted``, ``confirmed``, ``ground_truth``, ``trials``, and ``note``
are optional.  Numbers round-trip exactly: floats are serialized with
Python's shortest-repr rule, which is lossless for float64.  Writes are
atomic (temp file + rename), so a crashed save never leaves a truncated
dataset in place.
"""

from __future__ import annotations

import datetime
import json
import os
from dataclasses import dataclass, field

from .channels import CATALOG_VERSION, ChannelId, GaitClass, Side, Unit
from .errors import DatasetFormatError, InvalidInputError
from .series import (
    GaitCycleSeries,
    GaitEvents,
    PatientRecord,
    Prediction,
    SideRecord,
)

FORMAT_NAME = "cpgait-dataset"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class ClassificationOverride:
    """One clinician override; the log is append-only, latest entry wins."""

    patient_id: str
    side: Side
    chosen_class: GaitClass
    timestamp: str
    note: str | None = None


@dataclass
class Dataset:
    patients: list[PatientRecord]
    ground_truth: dict[tuple[str, Side], GaitClass] = field(default_factory=dict)
    catalog_version: str = CATALOG_VERSION
    overrides: list[ClassificationOverride] = field(default_factory=list)

    def patient(self, patient_id: str) -> PatientRecord:
        for p in self.patients:
            if p.id == patient_id:
                return p
        raise KeyError(patient_id)

    def confirmed_view(self) -> dict[tuple[str, Side], GaitClass]:
        """Base confirmed classes with the override log replayed on top."""
        view = {}
        for p in self.patients:
            for side, cls in p.confirmed.items():
                if cls is not None:
                    view[(p.id, side)] = cls
        for o in self.overrides:
            view[(o.patient_id, o.side)] = o.chosen_class
        return view


def _series_to_json(series: GaitCycleSeries) -> list[float]:
    return series.values.tolist()


def _side_to_json(record: SideRecord) -> dict:
    channels = {}
    for channel, series in record.averaged.items():
        entry = {"unit": series.unit.value, "averaged": _series_to_json(series)}
        trial_rows = [
            _series_to_json(trial[channel]) for trial in record.trials if channel in trial
        ]
        if trial_rows:
            entry["trials"] = trial_rows
        channels[channel.key] = entry
    return {
        "events": {
            "opposite_toe_off": record.events.opposite_toe_off,
            "opposite_initial_contact": record.events.opposite_initial_contact,
            "toe_off": record.events.toe_off,
        },
        "channels": channels,
    }


def _patient_to_json(patient: PatientRecord) -> dict:
    doc = {
        "id": patient.id,
        "exam_date": patient.exam_date.isoformat(),
        "walking_speed": patient.walking_speed,
        "sides": {side.value: _side_to_json(rec) for side, rec in patient.sides.items()},
    }
    if patient.predicted:
        doc["predicted"] = {
            side.value: {
                "class": pred.gait_class.label,
                "probabilities": pred.probabilities.tolist(),
            }
            for side, pred in patient.predicted.items()
        }
    if patient.confirmed:
        doc["confirmed"] = {
            side.value: cls.label for side, cls in patient.confirmed.items() if cls is not None
        }
    return doc


def save_dataset(dataset: Dataset, path) -> None:
    """Write the dataset atomically as schema-v1 JSON."""
    ground_truth: dict[str, dict[str, str]] = {}
    for (patient_id, side), cls in dataset.ground_truth.items():
        ground_truth.setdefault(patient_id, {})[side.value] = cls.label
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "catalog": dataset.catalog_version,
        "patients": [_patient_to_json(p) for p in dataset.patients],
        "ground_truth": ground_truth,
        "overrides": [
            {
                "patient_id": o.patient_id,
                "side": o.side.value,
                "chosen_class": o.chosen_class.label,
                "timestamp": o.timestamp,
                **({"note": o.note} if o.note is not None else {}),
            }
            for o in dataset.overrides
        ],
    }
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_side(doc: dict, location: str) -> SideRecord:
    try:
        events = GaitEvents(**doc["events"])
        averaged: dict[ChannelId, GaitCycleSeries] = {}
        trial_lists: dict[ChannelId, list[GaitCycleSeries]] = {}
        n_trials = 0
        for key, entry in doc["channels"].items():
            channel = ChannelId.from_key(key)
            unit = Unit(entry["unit"])
            averaged[channel] = GaitCycleSeries(entry["averaged"], unit)
            rows = entry.get("trials", [])
            trial_lists[channel] = [GaitCycleSeries(row, unit) for row in rows]
            n_trials = max(n_trials, len(rows))
        trials = []
        for j in range(n_trials):
            trials.append(
                {ch: rows[j] for ch, rows in trial_lists.items() if j < len(rows)}
            )
        return SideRecord(events=events, averaged=averaged, trials=trials)
    except (KeyError, TypeError, ValueError, InvalidInputError) as exc:
        raise DatasetFormatError(f"bad side record: {exc}", location=location) from exc


def _parse_patient(doc: dict, location: str) -> PatientRecord:
    try:
        sides = {
            Side.from_label(name): _parse_side(side_doc, f"{location}.sides.{name}")
            for name, side_doc in doc["sides"].items()
        }
        predicted = {
            Side.from_label(name): Prediction(
                gait_class=GaitClass.from_label(entry["class"]),
                probabilities=entry["probabilities"],
            )
            for name, entry in doc.get("predicted", {}).items()
        }
        confirmed = {
            Side.from_label(name): GaitClass.from_label(label)
            for name, label in doc.get("confirmed", {}).items()
        }
        return PatientRecord(
            id=doc["id"],
            exam_date=datetime.date.fromisoformat(doc["exam_date"]),
            walking_speed=doc["walking_speed"],
            sides=sides,
            predicted=predicted,
            confirmed=confirmed,
        )
    except DatasetFormatError:
        raise
    except (KeyError, TypeError, ValueError, InvalidInputError) as exc:
        raise DatasetFormatError(f"bad patient record: {exc}", location=location) from exc


def load_dataset(path) -> Dataset:
    """Load and validate a schema-v1 dataset file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DatasetFormatError(f"unreadable dataset: {exc}", location=str(path)) from exc
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"not valid JSON: {exc}", location=str(path)) from exc

    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise DatasetFormatError("not a cpgait dataset file", location=str(path))
    if doc.get("version") != FORMAT_VERSION:
        raise DatasetFormatError(
            f"unsupported dataset version {doc.get('version')!r}", location=str(path)
        )

    patients = [
        _parse_patient(p, f"{path}:patients[{i}]") for i, p in enumerate(doc.get("patients", []))
    ]
    ids = [p.id for p in patients]
    if len(set(ids)) != len(ids):
        raise DatasetFormatError("duplicate patient ids", location=str(path))

    ground_truth = {}
    try:
        for patient_id, sides in doc.get("ground_truth", {}).items():
            for side_name, label in sides.items():
                ground_truth[(patient_id, Side.from_label(side_name))] = GaitClass.from_label(label)
        overrides = [
            ClassificationOverride(
                patient_id=o["patient_id"],
                side=Side.from_label(o["side"]),
                chosen_class=GaitClass.from_label(o["chosen_class"]),
                timestamp=o["timestamp"],
                note=o.get("note"),
            )
            for o in doc.get("overrides", [])
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetFormatError(f"bad ground truth or overrides: {exc}", location=str(path)) from exc

    return Dataset(
        patients=patients,
        ground_truth=ground_truth,
        catalog_version=doc.get("catalog", CATALOG_VERSION),
        overrides=overrides,
    )
