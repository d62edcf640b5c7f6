import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpgait.channels import CYCLE_POINTS, MODEL_CHANNELS, Unit
from cpgait.errors import InvalidInputError, MissingChannelError
from cpgait.series import (
    FeatureVector,
    GaitCycleSeries,
    GaitEvents,
    Prediction,
    average_trials,
    build_feature_vector,
    min_max_normalize,
    time_normalize,
)
from conftest import make_patient


class TestTimeNormalize:
    def test_constant_signal(self):
        out = time_normalize([5.0, 5.0, 5.0, 5.0])
        assert out.shape == (101,)
        assert np.all(out == 5.0)

    def test_two_point_ramp(self):
        out = time_normalize([0.0, 1.0])
        assert np.allclose(out, np.arange(101) / 100.0)
        assert out[0] == 0.0 and out[-1] == 1.0

    def test_sine_against_dense_resampling_oracle(self):
        # raw: one period sampled at 201 points; target positions are
        # grid-aligned, so the analytic resampling is exact.
        k = np.arange(201)
        raw = np.sin(2 * np.pi * k / 200)
        out = time_normalize(raw)
        oracle = np.sin(2 * np.pi * np.arange(101) / 100)
        assert np.max(np.abs(out - oracle)) < 1e-6

    def test_endpoints_preserved(self, rng):
        raw = rng.normal(size=57)
        out = time_normalize(raw)
        assert out[0] == raw[0] and out[-1] == raw[-1]

    def test_idempotent_on_101_samples(self, rng):
        raw = rng.normal(size=101)
        assert np.max(np.abs(time_normalize(raw) - raw)) < 1e-12

    def test_errors(self):
        with pytest.raises(InvalidInputError):
            time_normalize([1.0])
        with pytest.raises(InvalidInputError):
            time_normalize([1.0, np.nan, 2.0])


class TestAverageTrials:
    def test_single_trial_identity(self, rng):
        t = GaitCycleSeries(rng.normal(size=101), Unit.DEGREES)
        assert average_trials([t]) == t

    def test_symmetric_pair(self):
        zeros = GaitCycleSeries(np.zeros(101), Unit.DEGREES)
        twos = GaitCycleSeries(np.full(101, 2.0), Unit.DEGREES)
        assert np.all(average_trials([zeros, twos]).values == 1.0)

    def test_against_summation_oracle(self, rng):
        trials = [GaitCycleSeries(rng.normal(size=101), Unit.WATTS_PER_KG) for _ in range(5)]
        got = average_trials(trials).values
        oracle = np.zeros(101)
        for t in trials:
            oracle += t.values
        oracle /= len(trials)
        assert np.max(np.abs(got - oracle)) < 1e-12

    def test_errors(self, rng):
        with pytest.raises(InvalidInputError):
            average_trials([])
        a = GaitCycleSeries(rng.normal(size=101), Unit.DEGREES)
        b = GaitCycleSeries(rng.normal(size=101), Unit.WATTS_PER_KG)
        with pytest.raises(InvalidInputError):
            average_trials([a, b])


class TestMinMaxNormalize:
    def test_ramp(self):
        out = min_max_normalize(np.linspace(0, 10, 101))
        assert np.allclose(out, np.linspace(0, 1, 101))

    def test_constant_maps_to_zero(self):
        assert np.all(min_max_normalize(np.full(101, 3.7)) == 0.0)

    def test_direct_formula(self, rng):
        v = rng.normal(size=101) * 40
        out = min_max_normalize(v)
        assert np.allclose(out, (v - v.min()) / (v.max() - v.min()))
        assert out.min() == 0.0 and out.max() == 1.0

    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=101))
    def test_output_range_property(self, values):
        out = min_max_normalize(np.array(values))
        assert np.all(out >= 0.0) and np.all(out <= 1.0)


class TestBuildFeatureVector:
    def test_constant_channels_give_zeros(self):
        patient = make_patient(per_channel=lambda ch, side: np.full(101, 4.2))
        from cpgait.channels import Side

        fv = build_feature_vector(patient, Side.LEFT)
        assert fv.values.shape == (1414,)
        assert np.all(fv.values == 0.0)

    def test_segment_ordering_with_ramps(self):
        patient = make_patient(per_channel=lambda ch, side: np.linspace(0, 1 + hash(ch.key) % 7, 101))
        from cpgait.channels import Side

        fv = build_feature_vector(patient, Side.LEFT)
        ramp = np.linspace(0, 1, 101)
        for k in range(14):
            assert np.allclose(fv.values[101 * k : 101 * (k + 1)], ramp)

    def test_against_two_pass_oracle(self, rng):
        patient = make_patient(rng=rng)
        from cpgait.channels import Side

        fv = build_feature_vector(patient, Side.RIGHT)
        oracle = np.concatenate(
            [
                min_max_normalize(patient.sides[Side.RIGHT].averaged[ch].values)
                for ch in MODEL_CHANNELS
            ]
        )
        assert np.array_equal(fv.values, oracle)

    def test_missing_channel(self, rng):
        patient = make_patient(rng=rng)
        from cpgait.channels import Side

        del patient.sides[Side.LEFT].averaged[MODEL_CHANNELS[3]]
        with pytest.raises(MissingChannelError) as exc:
            build_feature_vector(patient, Side.LEFT)
        assert exc.value.channel == MODEL_CHANNELS[3]


class TestRecordValidation:
    def test_series_length_checked(self):
        with pytest.raises(InvalidInputError):
            GaitCycleSeries(np.zeros(100), Unit.DEGREES)

    def test_series_finite_checked(self):
        bad = np.zeros(101)
        bad[3] = np.inf
        with pytest.raises(InvalidInputError):
            GaitCycleSeries(bad, Unit.DEGREES)

    def test_event_ordering(self):
        with pytest.raises(InvalidInputError):
            GaitEvents(opposite_toe_off=55.0, opposite_initial_contact=50.0, toe_off=60.0)
        with pytest.raises(InvalidInputError):
            GaitEvents(opposite_toe_off=-1.0, opposite_initial_contact=50.0, toe_off=60.0)

    def test_probability_vector_checked(self):
        from cpgait.channels import GaitClass

        with pytest.raises(InvalidInputError):
            Prediction(GaitClass.JUMP_GAIT, np.array([0.5, 0.5, 0.5, -0.5]))
        with pytest.raises(InvalidInputError):
            Prediction(GaitClass.JUMP_GAIT, np.array([0.5, 0.4, 0.2, 0.1]))

    def test_patient_id_format(self, rng):
        with pytest.raises(InvalidInputError):
            make_patient(patient_id="12345", rng=rng)

    def test_feature_vector_immutable(self, rng):
        fv = FeatureVector(rng.random(1414), ("100001", __import__("cpgait.channels", fromlist=["Side"]).Side.LEFT))
        with pytest.raises(ValueError):
            fv.values[0] = 5.0
