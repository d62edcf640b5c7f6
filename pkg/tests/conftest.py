import numpy as np
import pytest

from cpgait.channels import CHANNEL_CATALOG, CYCLE_POINTS, GaitClass, Side
from cpgait.series import GaitCycleSeries, GaitEvents, PatientRecord, SideRecord


def make_events():
    return GaitEvents(opposite_toe_off=10.0, opposite_initial_contact=50.0, toe_off=60.0)


def make_patient(patient_id="100001", per_channel=None, rng=None, confirmed=None):
    """A patient with all 29 channels on both sides.

    ``per_channel(channel, side)`` returns the 101 values; defaults to
    seeded random values.
    """
    rng = rng or np.random.default_rng(0)
    if per_channel is None:
        per_channel = lambda ch, side: rng.normal(size=CYCLE_POINTS)
    sides = {}
    for side in (Side.LEFT, Side.RIGHT):
        averaged = {
            ch: GaitCycleSeries(per_channel(ch, side), ch.unit) for ch in CHANNEL_CATALOG
        }
        sides[side] = SideRecord(events=make_events(), averaged=averaged)
    return PatientRecord(
        id=patient_id,
        exam_date=__import__("datetime").date(2024, 1, 1),
        walking_speed=1.0,
        sides=sides,
        confirmed=confirmed or {},
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
