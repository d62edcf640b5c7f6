"""Channel catalog, gait-class taxonomy, and body-side enumeration.

The catalog lists the 29 biomechanical time series used in clinical gait
reports, in the fixed row-major order of the report matrix: joint angles
(pelvis, hip, knee, ankle, then the two foot angles), joint moments,
joint powers, and ground reaction forces, each body part expanded over
the sagittal/frontal/transverse plane columns where applicable.

Conventions for plane-less quantities: joint powers and the foot-floor
angle are tagged sagittal, the foot progression angle transverse, and
ground reaction forces are tagged with the foot-floor body part.  The
tags exist purely so every catalog entry has a total (variable, body
part, plane) key.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class GaitClass(enum.IntEnum):
    """The four cerebral-palsy gait patterns; values are CNN output indices."""

    TRUE_EQUINUS = 0
    JUMP_GAIT = 1
    APPARENT_EQUINUS = 2
    CROUCH_GAIT = 3

    @property
    def label(self) -> str:
        return _CLASS_LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> "GaitClass":
        try:
            return _CLASS_BY_LABEL[label]
        except KeyError:
            raise ValueError(f"unknown gait class: {label!r}") from None


_CLASS_LABELS = {
    GaitClass.TRUE_EQUINUS: "true_equinus",
    GaitClass.JUMP_GAIT: "jump_gait",
    GaitClass.APPARENT_EQUINUS: "apparent_equinus",
    GaitClass.CROUCH_GAIT: "crouch_gait",
}
_CLASS_BY_LABEL = {v: k for k, v in _CLASS_LABELS.items()}


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    @classmethod
    def from_label(cls, label: str) -> "Side":
        try:
            return cls(label.lower())
        except ValueError:
            raise ValueError(f"unknown side: {label!r}") from None


class Variable(enum.Enum):
    ANGLE = "angle"
    MOMENT = "moment"
    POWER = "power"
    GRF = "grf"


class BodyPart(enum.Enum):
    PELVIS = "pelvis"
    HIP = "hip"
    KNEE = "knee"
    ANKLE = "ankle"
    FOOT_PROGRESSION = "foot_progression"
    FOOT_FLOOR = "foot_floor"


class Plane(enum.Enum):
    SAGITTAL = "sagittal"
    FRONTAL = "frontal"
    TRANSVERSE = "transverse"


class Unit(enum.Enum):
    DEGREES = "deg"
    NEWTON_METERS_PER_KG = "Nm/kg"
    WATTS_PER_KG = "W/kg"
    PERCENT_BODY_WEIGHT = "%BW"


UNIT_FOR_VARIABLE = {
    Variable.ANGLE: Unit.DEGREES,
    Variable.MOMENT: Unit.NEWTON_METERS_PER_KG,
    Variable.POWER: Unit.WATTS_PER_KG,
    Variable.GRF: Unit.PERCENT_BODY_WEIGHT,
}


@dataclass(frozen=True, order=False)
class ChannelId:
    """One side-agnostic biomechanical time series (variable x body part x plane)."""

    variable: Variable
    body_part: BodyPart
    plane: Plane

    @property
    def key(self) -> str:
        """Canonical string key, e.g. ``angle.knee.sagittal``."""
        return f"{self.variable.value}.{self.body_part.value}.{self.plane.value}"

    @property
    def unit(self) -> Unit:
        return UNIT_FOR_VARIABLE[self.variable]

    @property
    def label(self) -> str:
        """Human-readable label used by report rows and heatmap stripes."""
        part = self.body_part.value.replace("_", " ")
        if self.variable is Variable.GRF:
            return f"GRF ({self.plane.value})"
        if self.variable is Variable.POWER:
            return f"{part} power"
        if self.body_part in (BodyPart.FOOT_PROGRESSION, BodyPart.FOOT_FLOOR):
            return f"{part} angle"
        return f"{part} {self.variable.value} ({self.plane.value})"

    @classmethod
    def from_key(cls, key: str) -> "ChannelId":
        try:
            var, part, plane = key.split(".")
            channel = cls(Variable(var), BodyPart(part), Plane(plane))
        except ValueError:
            raise ValueError(f"malformed channel key: {key!r}") from None
        if channel not in _CATALOG_SET:
            raise ValueError(f"channel not in catalog: {key!r}")
        return channel

    def __repr__(self) -> str:
        return f"ChannelId({self.key})"


def _expand(variable: Variable, body_parts, planes) -> list[ChannelId]:
    return [ChannelId(variable, bp, pl) for bp in body_parts for pl in planes]


_JOINTS3 = (BodyPart.PELVIS, BodyPart.HIP, BodyPart.KNEE, BodyPart.ANKLE)
_ALL_PLANES = (Plane.SAGITTAL, Plane.FRONTAL, Plane.TRANSVERSE)

#: The 29 catalog channels in report row-major order.
CHANNEL_CATALOG: tuple[ChannelId, ...] = tuple(
    _expand(Variable.ANGLE, _JOINTS3, _ALL_PLANES)
    + [
        ChannelId(Variable.ANGLE, BodyPart.FOOT_PROGRESSION, Plane.TRANSVERSE),
        ChannelId(Variable.ANGLE, BodyPart.FOOT_FLOOR, Plane.SAGITTAL),
    ]
    + _expand(Variable.MOMENT, (BodyPart.HIP, BodyPart.KNEE, BodyPart.ANKLE), _ALL_PLANES)
    + _expand(Variable.POWER, (BodyPart.HIP, BodyPart.KNEE, BodyPart.ANKLE), (Plane.SAGITTAL,))
    + _expand(Variable.GRF, (BodyPart.FOOT_FLOOR,), _ALL_PLANES)
)

_CATALOG_SET = frozenset(CHANNEL_CATALOG)
CATALOG_INDEX: dict[ChannelId, int] = {c: i for i, c in enumerate(CHANNEL_CATALOG)}

#: Channel catalog version tag embedded in dataset files and API payloads.
CATALOG_VERSION = "v1-29ch"

#: The 14 channels fed to the classifier, in feature-vector segment order:
#: pelvis/hip/knee angles in all three planes, ankle angles in the sagittal
#: and transverse planes only, and the three GRF components.
MODEL_CHANNELS: tuple[ChannelId, ...] = tuple(
    _expand(Variable.ANGLE, (BodyPart.PELVIS, BodyPart.HIP, BodyPart.KNEE), _ALL_PLANES)
    + [
        ChannelId(Variable.ANGLE, BodyPart.ANKLE, Plane.SAGITTAL),
        ChannelId(Variable.ANGLE, BodyPart.ANKLE, Plane.TRANSVERSE),
    ]
    + _expand(Variable.GRF, (BodyPart.FOOT_FLOOR,), _ALL_PLANES)
)

MODEL_CHANNEL_INDEX: dict[ChannelId, int] = {c: i for i, c in enumerate(MODEL_CHANNELS)}

#: Samples per time-normalized gait cycle (0..100% inclusive).
CYCLE_POINTS = 101

#: Classifier input length: 14 model channels x 101 cycle points.
FEATURE_LENGTH = len(MODEL_CHANNELS) * CYCLE_POINTS

assert len(CHANNEL_CATALOG) == 29
assert len(MODEL_CHANNELS) == 14
assert FEATURE_LENGTH == 1414
