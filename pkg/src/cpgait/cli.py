"""Operator command line.

Subcommands: ``synth`` (generate a dataset file), ``train`` (dataset ->
checkpoint + metrics report), ``eval`` (accuracy, confusion matrix,
explanation-fidelity metrics), ``explain`` (one leg -> relevance export +
overview heatmap image), ``serve`` (dataset + checkpoint -> REST API).
All subcommands accept ``--seed``, ``--config`` (JSON with optional
``synthetic`` / ``model`` / ``train`` sections), and ``--out``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from .channels import CHANNEL_CATALOG, GaitClass, Side
from .dataset import load_dataset, save_dataset
from .errors import DatasetFormatError, InvalidInputError, InvalidModelError
from .evaluation import (
    accuracy,
    cohort_mean_features,
    confusion_matrix,
    evaluate_explanations,
)
from .explain import grad_cam, overview_relevance
from .nn.checkpoint import load_checkpoint, save_checkpoint
from .nn.network import ModelConfig, predict_batch
from .nn.training import TrainConfig, train
from .pipeline import labelled_features, run_pipeline, snapshot_hash
from .series import build_feature_vector
from .synthetic import SyntheticConfig, generate_synthetic_dataset


def _load_config_file(path) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise InvalidInputError("--config must contain a JSON object")
    return doc


def _build_cfg(cls, section: dict, **overrides):
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(section) - known
    if unknown:
        raise InvalidInputError(f"unknown {cls.__name__} keys in --config: {sorted(unknown)}")
    merged = {**section, **{k: v for k, v in overrides.items() if v is not None}}
    return cls(**merged)


def _cmd_synth(args) -> int:
    cfg_doc = _load_config_file(args.config)
    cfg = _build_cfg(
        SyntheticConfig,
        cfg_doc.get("synthetic", {}),
        legs_per_class=args.legs_per_class,
        trials_per_leg=args.trials_per_leg,
        noise_std=args.noise_std,
        motif_strength=args.motif_strength,
        seed=args.seed,
    )
    dataset = generate_synthetic_dataset(cfg)
    save_dataset(dataset, args.out)
    n_legs = len(dataset.ground_truth)
    print(f"wrote {args.out}: {len(dataset.patients)} patients, {n_legs} labelled legs")
    return 0


def _cmd_train(args) -> int:
    cfg_doc = _load_config_file(args.config)
    train_cfg = _build_cfg(TrainConfig, cfg_doc.get("train", {}), seed=args.seed,
                           epochs=args.epochs)
    model_cfg = _build_cfg(ModelConfig, cfg_doc.get("model", {}))
    dataset = load_dataset(args.dataset)
    labelled = labelled_features(dataset)
    print(f"training on {len(labelled)} legs ({args.dataset}), seed {train_cfg.seed}")
    params, history = train(labelled, train_cfg, model_cfg)
    save_checkpoint(args.out, params, history, train_cfg)
    final = len(history.val_loss) - 1
    print(
        f"wrote {args.out}: {train_cfg.epochs} epochs, "
        f"final train loss {history.train_loss[final]:.4f}, "
        f"val loss {history.val_loss[final]:.4f}, "
        f"val accuracy {history.val_accuracy[final]:.3f}"
    )
    return 0


def _select_split(split, n_samples, val_indices):
    if split == "all":
        return list(range(n_samples))
    val = [i for i in val_indices if i < n_samples]
    if split == "val":
        return val
    return sorted(set(range(n_samples)) - set(val))


def _cmd_eval(args) -> int:
    dataset = load_dataset(args.dataset)
    params, history, _ = load_checkpoint(args.model)
    labelled = labelled_features(dataset)
    take = _select_split(args.split, len(labelled), history.val_indices)
    if not take:
        raise InvalidInputError(f"split {args.split!r} selects no legs")
    x = np.stack([labelled[i][0].values for i in take])
    labels = np.array([int(labelled[i][1]) for i in take])
    predicted, _probs = predict_batch(params, x)

    acc = accuracy(predicted, labels)
    matrix = confusion_matrix(predicted, labels)
    print(f"legs evaluated: {len(take)} (split={args.split})")
    print(f"accuracy: {acc:.4f}")
    print("confusion matrix (rows = true, cols = predicted):")
    header = " ".join(f"{c.label[:12]:>16}" for c in GaitClass)
    print(f"{'':16} {header}")
    for cls in GaitClass:
        row = " ".join(f"{matrix[int(cls), int(p)]:>16d}" for p in GaitClass)
        print(f"{cls.label:>16} {row}")

    all_x = np.stack([fv.values for fv, _ in labelled])
    replacement = cohort_mean_features(all_x)
    report = evaluate_explanations(params, x, labels, replacement)
    print("explanation localization (inside motif windows > outside):")
    for cls, rate in sorted(report.localization_rates.items()):
        hits, total = report.localization_by_class[cls]
        print(f"  {cls.label:>16}: {rate:.3f} ({hits}/{total})")
    print(
        f"perturbation fidelity (top decile > bottom decile): "
        f"{report.fidelity_rate:.3f} ({report.fidelity_hits}/{report.fidelity_total})"
    )

    if args.out:
        doc = {
            "split": args.split,
            "legs": len(take),
            "accuracy": acc,
            "confusion_matrix": matrix.tolist(),
            "localization_rates": {c.label: r for c, r in report.localization_rates.items()},
            "fidelity_rate": report.fidelity_rate,
        }
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
        print(f"wrote {args.out}")
    return 0


def _cmd_explain(args) -> int:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from pathlib import Path

    dataset = load_dataset(args.dataset)
    params, _, _ = load_checkpoint(args.model)
    patient = dataset.patient(args.patient)
    side = Side.from_label(args.side)

    maps = {}
    for s in patient.sides:
        fv = build_feature_vector(patient, s)
        cls, probs = predict_batch(params, fv.values[None, :])
        maps[s] = grad_cam(params, fv.values, GaitClass(int(cls[0])), side=s)
    relevance = maps[side]

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    export = {
        "patient_id": patient.id,
        "side": side.value,
        "target_class": relevance.target_class.label,
        "raw": relevance.raw.tolist(),
        "rows": {ch.key: row.tolist() for ch, row in relevance.per_channel.items()},
        "levels": relevance.levels().tolist(),
    }
    export_path = out_dir / f"relevance_{patient.id}_{side.value}.json"
    with open(export_path, "w", encoding="utf-8") as fh:
        json.dump(export, fh)

    if len(maps) == 2:
        rows = overview_relevance(maps[Side.LEFT], maps[Side.RIGHT])
    else:
        rows = {ch: relevance.per_channel.get(ch, np.zeros(101)) for ch in CHANNEL_CATALOG}
    grid = np.stack([rows[ch] for ch in CHANNEL_CATALOG])
    fig, ax = plt.subplots(figsize=(8, 7))
    im = ax.imshow(grid, aspect="auto", cmap="viridis", vmin=0.0, vmax=1.0,
                   extent=(0, 100, len(CHANNEL_CATALOG), 0))
    ax.set_yticks(np.arange(len(CHANNEL_CATALOG)) + 0.5)
    ax.set_yticklabels([ch.label for ch in CHANNEL_CATALOG], fontsize=6)
    ax.set_xlabel("% gait cycle")
    ax.set_title(f"relevance overview, patient {patient.id} ({relevance.target_class.label})")
    fig.colorbar(im, ax=ax, label="relevance")
    fig.tight_layout()
    plot_path = out_dir / f"overview_{patient.id}.png"
    fig.savefig(plot_path, dpi=150)
    plt.close(fig)
    print(f"wrote {export_path} and {plot_path}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import GaitService, create_app

    cfg_doc = _load_config_file(args.config)
    dataset = load_dataset(args.dataset)
    params = None
    train_cfg = None
    if args.model:
        params, _, _ = load_checkpoint(args.model)
    else:
        train_cfg = _build_cfg(TrainConfig, cfg_doc.get("train", {}), seed=args.seed)
    state = run_pipeline(dataset, train_cfg=train_cfg, params=params)
    digest = snapshot_hash(state)
    print(f"pipeline snapshot {digest}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"snapshot": digest, "patients": len(dataset.patients)}, fh)
    host, _, port = args.address.partition(":")
    app = create_app(GaitService(state))
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpgait")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=True, out_help="output path"):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", required=out_required, help=out_help)

    p = sub.add_parser("synth", help="generate a synthetic dataset file")
    p.add_argument("--legs-per-class", type=int, default=None)
    p.add_argument("--trials-per-leg", type=int, default=None)
    p.add_argument("--noise-std", type=float, default=None)
    p.add_argument("--motif-strength", type=float, default=None)
    common(p, out_help="dataset file to write")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="train a classifier on a dataset file")
    p.add_argument("--dataset", required=True)
    p.add_argument("--epochs", type=int, default=None)
    common(p, out_help="checkpoint file to write")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="accuracy, confusion matrix, explanation metrics")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--split", choices=("val", "train", "all"), default="val",
                   help="legs to evaluate; val/train use the checkpoint's recorded split")
    common(p, out_required=False, out_help="optional JSON report path")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("explain", help="relevance export + overview image for one leg")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--patient", required=True)
    p.add_argument("--side", choices=("left", "right"), required=True)
    common(p, out_help="output directory")
    p.set_defaults(func=_cmd_explain)

    p = sub.add_parser("serve", help="run the REST review service")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", help="checkpoint; trains from scratch when omitted")
    p.add_argument("--address", default="127.0.0.1:8000")
    common(p, out_required=False, out_help="optional snapshot summary JSON")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInputError, InvalidModelError, DatasetFormatError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
