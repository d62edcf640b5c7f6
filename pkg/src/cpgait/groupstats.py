"""Per-class cohort aggregates and the three overview scores.

The group band uses the population standard deviation (divide by n): it
describes exactly the cohort being displayed rather than estimating a
wider population.  Zero-variance points and zero-extent channels score 0
instead of propagating infinities, so overview heatmaps stay renderable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import CHANNEL_CATALOG, CYCLE_POINTS, ChannelId, GaitClass, Side
from .errors import InvalidInputError, MissingChannelError, MissingSideError
from .series import PatientRecord

#: Standard deviations / extents below this count as zero.
ZERO_GUARD = 1e-12


@dataclass(frozen=True)
class ChannelSideStats:
    mean: np.ndarray  # (101,)
    std: np.ndarray  # (101,)
    n: int


@dataclass(frozen=True)
class GroupStats:
    """Pointwise mean and population SD of one class's legs, per channel and side."""

    gait_class: GaitClass
    per_channel_side: dict[tuple[ChannelId, Side], ChannelSideStats]


def iter_legs(patients: list[PatientRecord]):
    """All (patient, side) pairs, in (id, side) order."""
    for patient in sorted(patients, key=lambda p: p.id):
        for side in (Side.LEFT, Side.RIGHT):
            if side in patient.sides:
                yield patient, side


def compute_group_stats(cohort: list[PatientRecord], gait_class: GaitClass,
                        confirmed: dict[tuple[str, Side], GaitClass] | None = None) -> GroupStats:
    """Aggregate the legs whose confirmed class equals ``gait_class``.

    ``confirmed`` optionally overrides the records' own confirmed maps
    (the service passes its override-adjusted view).  Only confirmed legs
    enter cohorts; predicted-only legs are excluded.
    """
    member_legs = []
    for patient, side in iter_legs(cohort):
        if confirmed is not None:
            label = confirmed.get((patient.id, side))
        else:
            label = patient.confirmed.get(side)
        if label is gait_class:
            member_legs.append((patient, side))
    if not member_legs:
        raise InvalidInputError(f"no confirmed legs for class {gait_class.label}")

    per_channel_side: dict[tuple[ChannelId, Side], ChannelSideStats] = {}
    for side in (Side.LEFT, Side.RIGHT):
        side_legs = [p for p, s in member_legs if s is side]
        if not side_legs:
            continue
        for channel in CHANNEL_CATALOG:
            rows = [
                p.sides[side].averaged[channel].values
                for p in side_legs
                if channel in p.sides[side].averaged
            ]
            if not rows:
                continue
            stacked = np.stack(rows)
            per_channel_side[(channel, side)] = ChannelSideStats(
                mean=stacked.mean(axis=0),
                std=stacked.std(axis=0),  # population SD (ddof=0)
                n=len(rows),
            )
    return GroupStats(gait_class=gait_class, per_channel_side=per_channel_side)


def zscore_overview(patient: PatientRecord, stats: GroupStats) -> dict[ChannelId, np.ndarray]:
    """Max over sides of |z| against the group band, per channel and time point.

    Points where the group SD vanishes contribute 0 for that side, as do
    sides missing from the group (single-sided cohorts).
    """
    overview = {}
    for channel in CHANNEL_CATALOG:
        if all((channel, side) not in stats.per_channel_side for side in Side):
            raise MissingChannelError(channel, f"group stats lack channel {channel.key}")
        score = np.zeros(CYCLE_POINTS)
        for side in (Side.LEFT, Side.RIGHT):
            record = patient.sides.get(side)
            channel_stats = stats.per_channel_side.get((channel, side))
            if record is None or channel_stats is None:
                continue
            series = record.averaged.get(channel)
            if series is None:
                raise MissingChannelError(channel, f"patient {patient.id} lacks {channel.key}")
            safe_std = np.where(channel_stats.std < ZERO_GUARD, 1.0, channel_stats.std)
            z = np.abs((series.values - channel_stats.mean) / safe_std)
            z[channel_stats.std < ZERO_GUARD] = 0.0
            score = np.maximum(score, z)
        overview[channel] = score
    return overview


def asymmetry_overview(patient: PatientRecord) -> dict[ChannelId, np.ndarray]:
    """|left - right| relative to the channel's total value extent.

    The extent is max - min over the union of both sides' series; a
    channel with extent below the zero guard scores 0 everywhere.
    """
    for side in (Side.LEFT, Side.RIGHT):
        if side not in patient.sides:
            raise MissingSideError(side, f"patient {patient.id} lacks side {side.value}")
    left = patient.sides[Side.LEFT].averaged
    right = patient.sides[Side.RIGHT].averaged
    overview = {}
    for channel in CHANNEL_CATALOG:
        if channel not in left or channel not in right:
            raise MissingChannelError(channel, f"patient {patient.id} lacks {channel.key}")
        lv, rv = left[channel].values, right[channel].values
        extent = max(lv.max(), rv.max()) - min(lv.min(), rv.min())
        if extent < ZERO_GUARD:
            overview[channel] = np.zeros(CYCLE_POINTS)
        else:
            overview[channel] = np.abs(lv - rv) / extent
    return overview
