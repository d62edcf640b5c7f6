"""Gait-cycle time series, patient records, and feature-vector assembly.

All values are immutable after construction (arrays are copied and marked
read-only), so records can be shared freely between threads.
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    CYCLE_POINTS,
    FEATURE_LENGTH,
    MODEL_CHANNELS,
    ChannelId,
    GaitClass,
    Side,
    Unit,
)
from .errors import InvalidInputError, MissingChannelError

#: Extent below which a signal is treated as constant by min-max scaling.
FLAT_EXTENT = 1e-12

_ID_PATTERN = re.compile(r"^\d{6}$")


def _frozen_array(values, length=None, name="values") -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if length is not None and arr.shape != (length,):
        raise InvalidInputError(f"{name} must have shape ({length},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class GaitCycleSeries:
    """One 101-sample series, time-normalized to 0..100% gait cycle."""

    values: np.ndarray
    unit: Unit

    def __post_init__(self):
        object.__setattr__(
            self, "values", _frozen_array(self.values, CYCLE_POINTS, "series values")
        )

    def __eq__(self, other):
        if not isinstance(other, GaitCycleSeries):
            return NotImplemented
        return self.unit is other.unit and np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class GaitEvents:
    """Gait-cycle events as percents, for one leg's cycle (0% = initial contact)."""

    opposite_toe_off: float
    opposite_initial_contact: float
    toe_off: float

    def __post_init__(self):
        seq = (0.0, self.opposite_toe_off, self.opposite_initial_contact, self.toe_off, 100.0)
        if not all(a < b for a, b in zip(seq, seq[1:])):
            raise InvalidInputError(f"gait events must satisfy 0 < oTO < oIC < TO < 100, got {seq[1:-1]}")


@dataclass(frozen=True)
class Prediction:
    """Classifier output for one leg."""

    gait_class: GaitClass
    probabilities: np.ndarray

    def __post_init__(self):
        probs = _frozen_array(self.probabilities, 4, "probabilities")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
            raise InvalidInputError("probabilities must be >= 0 and sum to 1 within 1e-9")
        object.__setattr__(self, "probabilities", probs)


@dataclass(frozen=True)
class SideRecord:
    """Per-leg measurement data for one examination session."""

    events: GaitEvents
    averaged: dict[ChannelId, GaitCycleSeries]
    trials: list[dict[ChannelId, GaitCycleSeries]] = field(default_factory=list)


@dataclass(frozen=True)
class PatientRecord:
    """One examination: per-side series, events, metadata, and classifications."""

    id: str
    exam_date: datetime.date
    walking_speed: float
    sides: dict[Side, SideRecord]
    predicted: dict[Side, Prediction] = field(default_factory=dict)
    confirmed: dict[Side, GaitClass] = field(default_factory=dict)

    def __post_init__(self):
        if not _ID_PATTERN.match(self.id):
            raise InvalidInputError(f"patient id must be 6 digits, got {self.id!r}")
        if not np.isfinite(self.walking_speed) or self.walking_speed <= 0:
            raise InvalidInputError(f"walking speed must be positive, got {self.walking_speed}")

    def side(self, side: Side) -> SideRecord:
        try:
            return self.sides[side]
        except KeyError:
            from .errors import MissingSideError

            raise MissingSideError(side) from None


@dataclass(frozen=True)
class FeatureVector:
    """The 1414-value classifier input for one leg (14 channels x 101 points)."""

    values: np.ndarray
    source: tuple[str, Side]

    def __post_init__(self):
        object.__setattr__(
            self, "values", _frozen_array(self.values, FEATURE_LENGTH, "feature vector")
        )


def time_normalize(raw, n_out: int = CYCLE_POINTS) -> np.ndarray:
    """Resample one gait cycle to ``n_out`` points by linear interpolation.

    Sample ``i`` is taken at parameter position ``i / (n_out - 1)`` of the
    cycle; endpoints are preserved exactly.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 1 or raw.size < 2:
        raise InvalidInputError("time_normalize needs at least 2 samples")
    if not np.all(np.isfinite(raw)):
        raise InvalidInputError("time_normalize input contains non-finite samples")
    positions = np.linspace(0.0, raw.size - 1, n_out)
    return np.interp(positions, np.arange(raw.size), raw)


def average_trials(trials: list[GaitCycleSeries]) -> GaitCycleSeries:
    """Pointwise arithmetic mean of same-unit trial series."""
    if not trials:
        raise InvalidInputError("average_trials needs at least one trial")
    unit = trials[0].unit
    if any(t.unit is not unit for t in trials):
        raise InvalidInputError("average_trials: unit mismatch between trials")
    stacked = np.stack([t.values for t in trials])
    return GaitCycleSeries(stacked.mean(axis=0), unit)


def min_max_normalize(values) -> np.ndarray:
    """Scale a series to [0, 1] by its own extremes; constant series map to 0."""
    v = np.asarray(values, dtype=np.float64)
    lo, hi = v.min(), v.max()
    if hi - lo < FLAT_EXTENT:
        return np.zeros_like(v)
    return (v - lo) / (hi - lo)


def build_feature_vector(patient: PatientRecord, side: Side) -> FeatureVector:
    """Concatenate the min-max normalized model channels of one leg.

    Segment ``k`` holds the normalized averaged series of ``MODEL_CHANNELS[k]``
    at offsets ``101*k .. 101*k + 100``.
    """
    record = patient.side(side)
    segments = []
    for channel in MODEL_CHANNELS:
        series = record.averaged.get(channel)
        if series is None:
            raise MissingChannelError(channel)
        segments.append(min_max_normalize(series.values))
    return FeatureVector(np.concatenate(segments), (patient.id, side))
