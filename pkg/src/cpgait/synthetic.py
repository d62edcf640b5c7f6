"""Synthetic gait cohort with planted class-discriminative motifs.

Every channel has a stylized base trajectory (a small sum of harmonics
and Gaussian bumps, see ``BASE_CURVES``); a class's trajectory is the
base plus that class's motif bumps from ``MOTIF_WINDOWS``.  Motifs are
half-sine bumps confined to a fixed (channel, percent-range) window;
their peak height is ``motif_strength`` times the window's largest
extent-preserving amplitude, which keeps every channel's min/max equal
across classes so the per-leg min-max normalization cannot leak the
class outside the window.  The window table is the ground truth for
explanation-localization experiments.

Each leg additionally gets a smooth random wiggle (three low harmonics at
5% of channel amplitude plus a 3% offset shift), each trial white noise
of ``noise_std * amplitude(channel)``, and the stored averaged series is
the pointwise mean of the trials.  Gait events sit at 10 / 50 / 60
percent with +-2% uniform jitter; walking speed is uniform in
0.7..1.3 m/s.  Everything is drawn from one seeded generator, so equal
seeds give identical datasets.

Legs are generated per class and paired into two-sided patients of the
same class; with an odd ``legs_per_class`` the four leftover legs are
paired across classes into two mixed patients.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass

import numpy as np

from .channels import (
    CATALOG_VERSION,
    CHANNEL_CATALOG,
    CYCLE_POINTS,
    ChannelId,
    GaitClass,
    Side,
)
from .dataset import Dataset
from .errors import InvalidInputError
from .series import GaitCycleSeries, GaitEvents, PatientRecord, SideRecord

_T = np.linspace(0.0, 1.0, CYCLE_POINTS)


@dataclass(frozen=True)
class BaseCurve:
    """Base trajectory: offset + harmonics + Gaussian bumps.

    ``harmonics`` entries are (amplitude, cycles per gait cycle, phase);
    ``bumps`` entries are (amplitude, center, width) in cycle fractions.
    ``amplitude`` is the documented channel scale used for motifs,
    per-leg variation, and trial noise.
    """

    offset: float
    harmonics: tuple[tuple[float, float, float], ...] = ()
    bumps: tuple[tuple[float, float, float], ...] = ()
    amplitude: float = 1.0

    def evaluate(self, t: np.ndarray = _T) -> np.ndarray:
        curve = np.full_like(t, self.offset)
        for amp, freq, phase in self.harmonics:
            curve += amp * np.cos(2.0 * np.pi * freq * t + phase)
        for amp, center, width in self.bumps:
            curve += amp * np.exp(-0.5 * ((t - center) / width) ** 2)
        return curve


#: Base trajectories for all 29 catalog channels, keyed by channel key.
BASE_CURVES: dict[str, BaseCurve] = {
    "angle.pelvis.sagittal": BaseCurve(12.0, ((2.0, 2.0, 0.3),), (), 5.0),
    "angle.pelvis.frontal": BaseCurve(0.0, ((4.0, 1.0, 1.2),), (), 8.0),
    "angle.pelvis.transverse": BaseCurve(0.0, ((5.0, 1.0, -0.5),), (), 10.0),
    "angle.hip.sagittal": BaseCurve(5.0, ((28.0, 1.0, 0.35),), (), 55.0),
    "angle.hip.frontal": BaseCurve(2.0, ((5.0, 1.0, 2.0), (2.0, 2.0, 0.5)), (), 12.0),
    "angle.hip.transverse": BaseCurve(-3.0, ((6.0, 1.0, -1.0),), (), 12.0),
    "angle.knee.sagittal": BaseCurve(8.0, (), ((12.0, 0.12, 0.06), (55.0, 0.72, 0.09)), 60.0),
    "angle.knee.frontal": BaseCurve(1.0, ((3.0, 1.0, 0.8), (2.0, 2.0, -0.3)), (), 8.0),
    "angle.knee.transverse": BaseCurve(-2.0, ((5.0, 1.0, 1.5),), (), 10.0),
    "angle.ankle.sagittal": BaseCurve(
        0.0, ((2.0, 2.0, 0.0),), ((10.0, 0.40, 0.15), (-22.0, 0.63, 0.06)), 30.0
    ),
    "angle.ankle.frontal": BaseCurve(0.0, ((3.0, 1.0, 0.6), (1.5, 2.0, -0.9)), (), 7.0),
    "angle.ankle.transverse": BaseCurve(-5.0, ((4.0, 1.0, 0.0),), (), 9.0),
    "angle.foot_progression.transverse": BaseCurve(-8.0, ((4.0, 1.0, 0.9),), (), 10.0),
    "angle.foot_floor.sagittal": BaseCurve(
        0.0, (), ((25.0, 0.05, 0.05), (60.0, 0.85, 0.08)), 60.0
    ),
    "moment.hip.sagittal": BaseCurve(0.0, ((0.8, 1.0, 0.2),), (), 1.8),
    "moment.hip.frontal": BaseCurve(0.3, (), ((0.5, 0.15, 0.08), (0.5, 0.45, 0.08)), 1.0),
    "moment.hip.transverse": BaseCurve(0.0, ((0.15, 1.0, 1.0), (0.08, 2.0, 0.2)), (), 0.4),
    "moment.knee.sagittal": BaseCurve(0.0, ((0.3, 1.0, -0.8), (0.25, 2.0, 0.7)), (), 1.0),
    "moment.knee.frontal": BaseCurve(0.1, (), ((0.3, 0.18, 0.07), (0.25, 0.45, 0.07)), 0.6),
    "moment.knee.transverse": BaseCurve(0.0, ((0.1, 1.0, 0.4), (0.05, 3.0, 0.0)), (), 0.25),
    "moment.ankle.sagittal": BaseCurve(0.0, ((0.1, 1.0, 0.0),), ((1.4, 0.45, 0.12),), 1.5),
    "moment.ankle.frontal": BaseCurve(0.0, ((0.12, 1.0, 2.2),), (), 0.3),
    "moment.ankle.transverse": BaseCurve(0.0, ((0.1, 1.0, -1.4),), (), 0.25),
    "power.hip.sagittal": BaseCurve(0.0, ((0.5, 1.0, 0.5), (0.4, 2.0, -0.8)), (), 1.5),
    "power.knee.sagittal": BaseCurve(-0.2, ((0.4, 2.0, 1.2),), ((-0.8, 0.60, 0.05),), 1.5),
    "power.ankle.sagittal": BaseCurve(0.0, (), ((3.5, 0.52, 0.04), (-0.6, 0.30, 0.10)), 4.0),
    "grf.foot_floor.sagittal": BaseCurve(0.0, (), ((-12.0, 0.10, 0.05), (15.0, 0.50, 0.05)), 28.0),
    "grf.foot_floor.frontal": BaseCurve(0.0, (), ((5.0, 0.15, 0.07), (5.0, 0.45, 0.08)), 8.0),
    "grf.foot_floor.transverse": BaseCurve(
        0.0, (), ((105.0, 0.14, 0.06), (100.0, 0.46, 0.06), (70.0, 0.30, 0.10)), 110.0
    ),
}


@dataclass(frozen=True)
class MotifWindow:
    """One planted discriminative window: channel, percent range, sign."""

    channel_key: str
    start_pct: float
    end_pct: float
    polarity: float

    @property
    def channel(self) -> ChannelId:
        return ChannelId.from_key(self.channel_key)

    def point_range(self) -> range:
        """Cycle-point indices covered by the window (inclusive bounds)."""
        return range(int(np.ceil(self.start_pct)), int(np.floor(self.end_pct)) + 1)

    def bump(self, t: np.ndarray = _T, shift_pct: float = 0.0) -> np.ndarray:
        """Triple-peak burst: zero at the (shifted) window edges, 1 at its
        center.

        A half-sine envelope carries a three-crest ripple, so the motif's
        local shape differs from the smooth hills of the base curves and
        convolutional features keyed to it stay quiet elsewhere.
        """
        lo = (self.start_pct + shift_pct) / 100.0
        hi = (self.end_pct + shift_pct) / 100.0
        inside = (t >= lo) & (t <= hi)
        bump = np.zeros_like(t)
        u = (t[inside] - lo) / (hi - lo)
        bump[inside] = np.sin(np.pi * u) * (0.6 + 0.4 * np.cos(6.0 * np.pi * u - np.pi))
        return bump

    def max_amplitude(self, jitter_pct: float = 0.0) -> float:
        """Largest extent-preserving bump amplitude for this window.

        The bump must keep the class trajectory inside the base curve's
        [min, max] for any window shift up to ``jitter_pct``: otherwise
        per-leg min-max normalization would rescale the whole channel and
        leak the class label outside the window.  Bound: 0.85 times the
        binding headroom/envelope ratio, where the envelope is the
        pointwise max of the bump over all allowed shifts.
        """
        base = BASE_CURVES[self.channel_key].evaluate()
        shifts = np.linspace(-jitter_pct, jitter_pct, 13) if jitter_pct else [0.0]
        envelope = np.max([self.bump(shift_pct=s) for s in shifts], axis=0)
        inside = envelope > 1e-9
        if self.polarity > 0:
            headroom = base.max() - base[inside]
        else:
            headroom = base[inside] - base.min()
        return 0.85 * float((headroom / envelope[inside]).min())


#: The per-class motif window: exactly one wide window per class, each on
#: a model channel, with disjoint interiors where two classes share a
#: channel.  Every motif is a positive bump rising out of a flat stretch
#: of its base curve: presence evidence that convolutional features can
#: fire on.  (Suppression-style motifs are invisible to the rectified
#: relevance maps and were rejected.)  One window per class keeps the
#: planted evidence unambiguous: it is the only input region that
#: separates the classes.
MOTIF_WINDOWS: dict[GaitClass, tuple[MotifWindow, ...]] = {
    GaitClass.TRUE_EQUINUS: (
        MotifWindow("angle.pelvis.transverse", 45.0, 75.0, +1.0),
    ),
    GaitClass.JUMP_GAIT: (
        MotifWindow("angle.pelvis.frontal", 18.0, 48.0, +1.0),
    ),
    GaitClass.APPARENT_EQUINUS: (
        MotifWindow("angle.ankle.transverse", 32.0, 68.0, +1.0),
    ),
    GaitClass.CROUCH_GAIT: (
        MotifWindow("angle.hip.transverse", 50.0, 85.0, +1.0),
    ),
}

#: Default event positions (percent of cycle) and their uniform jitter.
EVENT_DEFAULTS = {"opposite_toe_off": 10.0, "opposite_initial_contact": 50.0, "toe_off": 60.0}
EVENT_JITTER = 2.0

WALKING_SPEED_RANGE = (0.7, 1.3)

_LEG_WIGGLE_STD = 0.05  # of channel amplitude, per harmonic
_LEG_SHIFT_STD = 0.03  # of channel amplitude


@dataclass(frozen=True)
class SyntheticConfig:
    legs_per_class: int = 50
    trials_per_leg: int = 5
    noise_std: float = 0.05
    motif_strength: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.legs_per_class < 2:
            raise InvalidInputError("legs_per_class must be >= 2")
        if self.trials_per_leg < 1:
            raise InvalidInputError("trials_per_leg must be >= 1")
        if self.noise_std < 0:
            raise InvalidInputError("noise_std must be >= 0")


def class_trajectory(gait_class: GaitClass, channel: ChannelId,
                     motif_strength: float) -> np.ndarray:
    """The noise-free class trajectory: base curve plus class motifs.

    A motif's peak height is ``motif_strength * window.max_amplitude()``,
    so ``motif_strength`` in (0, 1] scales within the extent-preserving
    budget of each window.
    """
    base = BASE_CURVES[channel.key]
    curve = base.evaluate()
    for window in MOTIF_WINDOWS[gait_class]:
        if window.channel_key == channel.key:
            amp = motif_strength * window.max_amplitude()
            curve = curve + window.polarity * amp * window.bump()
    return curve


def motif_feature_positions(gait_class: GaitClass) -> np.ndarray:
    """Flattened feature-vector indices inside the class's motif windows."""
    from .channels import MODEL_CHANNEL_INDEX

    positions = []
    for window in MOTIF_WINDOWS[gait_class]:
        channel_idx = MODEL_CHANNEL_INDEX[window.channel]
        positions.extend(channel_idx * CYCLE_POINTS + p for p in window.point_range())
    return np.unique(np.array(positions, dtype=np.int64))


def _generate_leg(gait_class: GaitClass, cfg: SyntheticConfig, rng: np.random.Generator):
    """One leg: (per-channel trials, averaged arrays, events)."""
    trials: list[dict[ChannelId, GaitCycleSeries]] = [{} for _ in range(cfg.trials_per_leg)]
    averaged: dict[ChannelId, GaitCycleSeries] = {}
    for channel in CHANNEL_CATALOG:
        base = BASE_CURVES[channel.key]
        curve = class_trajectory(gait_class, channel, cfg.motif_strength)
        amps = rng.normal(0.0, _LEG_WIGGLE_STD * base.amplitude, 3)
        phases = rng.uniform(0.0, 2.0 * np.pi, 3)
        for h, (amp, phase) in enumerate(zip(amps, phases), start=1):
            curve = curve + amp * np.sin(2.0 * np.pi * h * _T + phase)
        curve = curve + rng.normal(0.0, _LEG_SHIFT_STD * base.amplitude)
        noise = rng.normal(0.0, cfg.noise_std * base.amplitude, (cfg.trials_per_leg, CYCLE_POINTS))
        trial_values = curve[None, :] + noise
        for j in range(cfg.trials_per_leg):
            trials[j][channel] = GaitCycleSeries(trial_values[j], channel.unit)
        averaged[channel] = GaitCycleSeries(trial_values.mean(axis=0), channel.unit)
    jitter = rng.uniform(-EVENT_JITTER, EVENT_JITTER, 3)
    events = GaitEvents(
        opposite_toe_off=EVENT_DEFAULTS["opposite_toe_off"] + jitter[0],
        opposite_initial_contact=EVENT_DEFAULTS["opposite_initial_contact"] + jitter[1],
        toe_off=EVENT_DEFAULTS["toe_off"] + jitter[2],
    )
    return SideRecord(events=events, averaged=averaged, trials=trials)


def generate_synthetic_dataset(cfg: SyntheticConfig) -> Dataset:
    """Deterministic synthetic cohort; see the module docstring for the recipe."""
    rng = np.random.default_rng(cfg.seed)
    classes = list(GaitClass)

    legs: list[tuple[GaitClass, SideRecord]] = []
    for gait_class in classes:
        for _ in range(cfg.legs_per_class):
            legs.append((gait_class, _generate_leg(gait_class, cfg, rng)))

    # Pair consecutive same-class legs into patients; odd leftovers (one
    # per class) are paired across classes.
    pairs: list[tuple[tuple[GaitClass, SideRecord], tuple[GaitClass, SideRecord]]] = []
    leftovers = []
    for c, gait_class in enumerate(classes):
        class_legs = legs[c * cfg.legs_per_class : (c + 1) * cfg.legs_per_class]
        for i in range(0, len(class_legs) - 1, 2):
            pairs.append((class_legs[i], class_legs[i + 1]))
        if len(class_legs) % 2:
            leftovers.append(class_legs[-1])
    for i in range(0, len(leftovers) - 1, 2):
        pairs.append((leftovers[i], leftovers[i + 1]))

    patients = []
    ground_truth: dict[tuple[str, Side], GaitClass] = {}
    base_date = datetime.date(2024, 1, 1)
    for idx, ((left_class, left_leg), (right_class, right_leg)) in enumerate(pairs):
        patient_id = f"{100001 + idx:06d}"
        speed = rng.uniform(*WALKING_SPEED_RANGE)
        patient = PatientRecord(
            id=patient_id,
            exam_date=base_date + datetime.timedelta(days=idx),
            walking_speed=float(speed),
            sides={Side.LEFT: left_leg, Side.RIGHT: right_leg},
            confirmed={Side.LEFT: left_class, Side.RIGHT: right_class},
        )
        patients.append(patient)
        ground_truth[(patient_id, Side.LEFT)] = left_class
        ground_truth[(patient_id, Side.RIGHT)] = right_class

    return Dataset(patients=patients, ground_truth=ground_truth, catalog_version=CATALOG_VERSION)
