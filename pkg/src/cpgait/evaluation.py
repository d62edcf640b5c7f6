"""Classifier and explanation-quality metrics.

The two explanation metrics lean on the synthetic generator's planted
motif windows as ground truth:

* localization — a leg's mean relevance inside its class's motif windows
  should exceed the mean outside;
* perturbation fidelity — replacing the top relevance decile of the input
  with the cohort-mean feature vector (the neutral baseline: the mean
  over all labelled legs, which carries each class's motif at quarter
  strength only) should depress the target-class probability more than
  replacing the bottom decile.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import FEATURE_LENGTH, GaitClass
from .explain import grad_cam
from .nn.network import ModelParams, forward
from .synthetic import motif_feature_positions


def accuracy(predicted: np.ndarray, labels: np.ndarray) -> float:
    predicted = np.asarray(predicted)
    labels = np.asarray(labels)
    return float((predicted == labels).mean()) if labels.size else 0.0


def confusion_matrix(predicted: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """4x4 counts, rows = true class, columns = predicted class."""
    matrix = np.zeros((len(GaitClass), len(GaitClass)), dtype=np.int64)
    for t, p in zip(np.asarray(labels), np.asarray(predicted)):
        matrix[int(t), int(p)] += 1
    return matrix


def relevance_localized(relevance_raw: np.ndarray, gait_class: GaitClass) -> bool:
    """True when mean relevance inside the class's motif windows beats outside."""
    inside = motif_feature_positions(gait_class)
    mask = np.zeros(FEATURE_LENGTH, dtype=bool)
    mask[inside] = True
    return float(relevance_raw[mask].mean()) > float(relevance_raw[~mask].mean())


def cohort_mean_features(x: np.ndarray) -> np.ndarray:
    """Mean feature vector over a cohort: the fidelity replacement baseline."""
    return np.asarray(x, dtype=np.float64).mean(axis=0)


def perturbation_fidelity(params: ModelParams, x: np.ndarray, relevance_raw: np.ndarray,
                          target_class: GaitClass, replacement: np.ndarray,
                          decile: float = 0.1) -> bool:
    """True when top-decile replacement hurts the target probability more.

    ``replacement`` is the cohort-mean feature vector used as the neutral
    baseline.  Ties in the relevance ranking break by position index
    (stable argsort), so the check is deterministic.
    """
    k = int(FEATURE_LENGTH * decile)
    order = np.argsort(relevance_raw, kind="stable")
    bottom, top = order[:k], order[-k:]

    def prob_with(positions):
        perturbed = x.copy()
        perturbed[positions] = replacement[positions]
        return float(forward(params, perturbed, training=False).probs[0, int(target_class)])

    original = float(forward(params, x, training=False).probs[0, int(target_class)])
    drop_top = original - prob_with(top)
    drop_bottom = original - prob_with(bottom)
    return drop_top > drop_bottom


@dataclass
class ExplanationReport:
    """Aggregated explanation metrics over correctly classified legs."""

    localization_by_class: dict[GaitClass, tuple[int, int]] = field(default_factory=dict)
    fidelity_hits: int = 0
    fidelity_total: int = 0

    @property
    def localization_rates(self) -> dict[GaitClass, float]:
        return {c: hits / total for c, (hits, total) in self.localization_by_class.items() if total}

    @property
    def fidelity_rate(self) -> float:
        return self.fidelity_hits / self.fidelity_total if self.fidelity_total else 0.0


def evaluate_explanations(params: ModelParams, x: np.ndarray, labels: np.ndarray,
                          replacement: np.ndarray) -> ExplanationReport:
    """Run both explanation metrics over the correctly classified legs of a
    cohort (features ``x``, true ``labels``)."""
    report = ExplanationReport()
    for i in range(x.shape[0]):
        probs = forward(params, x[i], training=False).probs[0]
        predicted = GaitClass(int(probs.argmax()))
        if int(predicted) != int(labels[i]):
            continue
        relevance = grad_cam(params, x[i], predicted)
        hits, total = report.localization_by_class.get(predicted, (0, 0))
        report.localization_by_class[predicted] = (
            hits + int(relevance_localized(relevance.raw, predicted)),
            total + 1,
        )
        report.fidelity_total += 1
        report.fidelity_hits += int(
            perturbation_fidelity(params, x[i], relevance.raw, predicted, replacement)
        )
    return report
