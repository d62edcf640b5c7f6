"""End-to-end pipeline: features -> training/prediction -> explanations -> stats.

``run_pipeline`` produces an immutable :class:`ServedState` snapshot that
the REST service exposes; its canonical content hash is deterministic
for a fixed dataset seed and train seed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .channels import GaitClass, Side
from .dataset import Dataset, _patient_to_json
from .errors import InvalidInputError
from .explain import RelevanceMap, grad_cam
from .groupstats import GroupStats, compute_group_stats, iter_legs
from .nn.network import ModelConfig, ModelParams, predict_batch
from .nn.training import TrainConfig, TrainHistory, train
from .series import FeatureVector, Prediction, build_feature_vector


@dataclass(frozen=True)
class LegResult:
    prediction: Prediction
    relevance: RelevanceMap


@dataclass
class ServedState:
    """One pipeline run: dataset, trained params, per-leg results, group stats."""

    dataset: Dataset
    params: ModelParams | None
    history: TrainHistory | None
    legs: dict[tuple[str, Side], LegResult] = field(default_factory=dict)
    group_stats: dict[GaitClass, GroupStats] = field(default_factory=dict)

    def leg(self, patient_id: str, side: Side) -> LegResult:
        return self.legs[(patient_id, side)]


def collect_features(dataset: Dataset) -> tuple[list[tuple[str, Side]], np.ndarray]:
    """Feature matrix for every leg, in deterministic (id, side) order."""
    keys, rows = [], []
    for patient, side in iter_legs(dataset.patients):
        fv = build_feature_vector(patient, side)
        keys.append((patient.id, side))
        rows.append(fv.values)
    return keys, np.stack(rows) if rows else np.empty((0, 0))


def labelled_features(dataset: Dataset) -> list[tuple[FeatureVector, GaitClass]]:
    """(features, label) pairs for every leg with a ground-truth class."""
    pairs = []
    for patient, side in iter_legs(dataset.patients):
        label = dataset.ground_truth.get((patient.id, side))
        if label is None:
            label = patient.confirmed.get(side)
        if label is None:
            continue
        pairs.append((build_feature_vector(patient, side), label))
    return pairs


def compute_all_group_stats(dataset: Dataset) -> dict[GaitClass, GroupStats]:
    """Group stats for every class with at least one confirmed leg."""
    confirmed = dataset.confirmed_view()
    present = set(confirmed.values())
    return {
        cls: compute_group_stats(dataset.patients, cls, confirmed=confirmed)
        for cls in GaitClass
        if cls in present
    }


def run_pipeline(dataset: Dataset, train_cfg: TrainConfig | None = None,
                 model_cfg: ModelConfig | None = None,
                 params: ModelParams | None = None) -> ServedState:
    """Build features, train (unless ``params`` is given), predict and
    explain every leg, and aggregate group stats."""
    if not dataset.patients:
        return ServedState(dataset=dataset, params=params, history=None)

    history = None
    if params is None:
        train_cfg = train_cfg or TrainConfig()
        labelled = labelled_features(dataset)
        if not labelled:
            raise InvalidInputError("cannot train: dataset has no labelled legs")
        params, history = train(labelled, train_cfg, model_cfg)

    keys, x = collect_features(dataset)
    class_indices, probs = predict_batch(params, x)
    legs: dict[tuple[str, Side], LegResult] = {}
    for i, (patient_id, side) in enumerate(keys):
        predicted = GaitClass(int(class_indices[i]))
        relevance = grad_cam(params, x[i], predicted, side=side)
        legs[(patient_id, side)] = LegResult(
            prediction=Prediction(gait_class=predicted, probabilities=probs[i]),
            relevance=relevance,
        )

    return ServedState(
        dataset=dataset,
        params=params,
        history=history,
        legs=legs,
        group_stats=compute_all_group_stats(dataset),
    )


def snapshot_hash(state: ServedState) -> str:
    """SHA-256 over a canonical JSON rendering of the served content."""
    doc = {
        "patients": [_patient_to_json(p) for p in state.dataset.patients],
        "confirmed": {
            f"{pid}/{side.value}": cls.label
            for (pid, side), cls in sorted(
                state.dataset.confirmed_view().items(), key=lambda kv: (kv[0][0], kv[0][1].value)
            )
        },
        "legs": {
            f"{pid}/{side.value}": {
                "class": result.prediction.gait_class.label,
                "probabilities": result.prediction.probabilities.tolist(),
                "relevance": result.relevance.raw.tolist(),
            }
            for (pid, side), result in sorted(
                state.legs.items(), key=lambda kv: (kv[0][0], kv[0][1].value)
            )
        },
        "group_stats": {
            cls.label: {
                f"{ch.key}/{side.value}": {
                    "mean": s.mean.tolist(),
                    "std": s.std.tolist(),
                    "n": s.n,
                }
                for (ch, side), s in sorted(
                    stats.per_channel_side.items(),
                    key=lambda kv: (kv[0][0].key, kv[0][1].value),
                )
            }
            for cls, stats in sorted(state.group_stats.items())
        },
    }
    payload = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(payload).hexdigest()
