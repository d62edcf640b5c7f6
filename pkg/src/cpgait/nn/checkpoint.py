"""Checkpoint persistence.

Format: a numpy ``.npz`` archive (documented in README.md) holding

* ``meta`` — JSON string: format name/version, model config, train config
  (including the rng seed), and the validation split indices;
* one float64 array per parameter tensor, keyed ``param/<name>`` with the
  names from :meth:`ModelParams.tensors`;
* ``history/<metric>`` float64 arrays for the per-epoch curves.

float64 arrays round-trip bit-exactly through ``.npz``.
"""

from __future__ import annotations

import dataclasses
import json
import os

import numpy as np

from ..errors import DatasetFormatError
from .network import ModelConfig, ModelParams
from .training import TrainConfig, TrainHistory

FORMAT_NAME = "cpgait-checkpoint"
FORMAT_VERSION = 1

_HISTORY_KEYS = ("train_loss", "train_accuracy", "val_loss", "val_accuracy")


def save_checkpoint(path, params: ModelParams, history: TrainHistory,
                    train_cfg: TrainConfig) -> None:
    meta = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "model_config": dataclasses.asdict(params.config),
        "train_config": dataclasses.asdict(train_cfg),
        "val_indices": list(history.val_indices),
    }
    arrays = {f"param/{name}": np.asarray(t, dtype=np.float64) for name, t in params.tensors()}
    for key in _HISTORY_KEYS:
        arrays[f"history/{key}"] = np.asarray(getattr(history, key), dtype=np.float64)
    arrays["meta"] = np.array(json.dumps(meta))
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "wb") as fh:
            np.savez(fh, **arrays)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_checkpoint(path) -> tuple[ModelParams, TrainHistory, TrainConfig]:
    try:
        archive = np.load(path, allow_pickle=False)
    except (OSError, ValueError) as exc:
        raise DatasetFormatError(f"unreadable checkpoint: {exc}", location=str(path)) from exc
    with archive:
        if "meta" not in archive:
            raise DatasetFormatError("checkpoint missing meta entry", location=str(path))
        meta = json.loads(str(archive["meta"]))
        if meta.get("format") != FORMAT_NAME or meta.get("version") != FORMAT_VERSION:
            raise DatasetFormatError(
                f"unsupported checkpoint format {meta.get('format')!r} v{meta.get('version')!r}",
                location=str(path),
            )
        config = ModelConfig(**meta["model_config"])
        train_cfg = TrainConfig(**meta["train_config"])

        def tensor(name):
            key = f"param/{name}"
            if key not in archive:
                raise DatasetFormatError(f"checkpoint missing tensor {name}", location=str(path))
            return archive[key]

        params = ModelParams(
            config=config,
            conv_w=[tensor(f"conv{i}.w") for i in range(1, config.conv_layers + 1)],
            conv_b=[tensor(f"conv{i}.b") for i in range(1, config.conv_layers + 1)],
            fc1_w=tensor("fc1.w"),
            fc1_b=tensor("fc1.b"),
            out_w=tensor("out.w"),
            out_b=tensor("out.b"),
        )
        history = TrainHistory(
            **{key: archive[f"history/{key}"].tolist() for key in _HISTORY_KEYS},
            val_indices=[int(i) for i in meta["val_indices"]],
        )
    params.check_finite()
    return params, history, train_cfg
