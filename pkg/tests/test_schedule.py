import numpy as np
import pytest

from despeckle.common.errors import InvalidArgumentError, LevelUnreachableError, StepIndexError
from despeckle.schedule.noise_schedule import (NoiseSchedule, build_linear_schedule, build_sigma_range_schedule,
                                               eta, step_for_noise_level)


@pytest.fixture
def schedule():
    return build_linear_schedule(500, 0.0004)


class TestLinearSchedule:

    def test_anchor_values(self, schedule):
        assert schedule.steps == 500
        assert eta(schedule, 0) == 0.0
        assert eta(schedule, 100) == pytest.approx(0.04)
        assert eta(schedule, 125) == pytest.approx(0.05)
        assert eta(schedule, 200) == pytest.approx(0.08)
        assert eta(schedule, 500) == pytest.approx(0.2)
        assert schedule.max_level == pytest.approx(0.2)

    def test_increments_are_constant(self, schedule):
        np.testing.assert_allclose([schedule.increment(k) for k in (1, 250, 500)], 0.0004)

    def test_immutable(self, schedule):
        with pytest.raises(ValueError):
            schedule.eta[3] = 1.0

    @pytest.mark.parametrize("steps, per_step", [(0, 0.0004), (-3, 0.0004), (10, 0.0), (10, -1.0),
                                                 (10, float("nan"))])
    def test_rejects_bad_arguments(self, steps, per_step):
        with pytest.raises(InvalidArgumentError):
            build_linear_schedule(steps, per_step)

    def test_step_out_of_range(self, schedule):
        with pytest.raises(StepIndexError):
            eta(schedule, 501)
        with pytest.raises(StepIndexError):
            eta(schedule, -1)
        with pytest.raises(StepIndexError):
            schedule.increment(0)

    def test_summary(self, schedule):
        summary = schedule.summary()
        assert summary["steps"] == 500
        assert summary["eta_per_step"] == 0.0004


class TestScheduleValidation:

    def test_requires_zero_start(self):
        with pytest.raises(InvalidArgumentError):
            NoiseSchedule(eta=np.array([0.1, 0.2]))

    def test_requires_strict_increase(self):
        with pytest.raises(InvalidArgumentError):
            NoiseSchedule(eta=np.array([0.0, 0.1, 0.1]))

    def test_requires_two_entries(self):
        with pytest.raises(InvalidArgumentError):
            NoiseSchedule(eta=np.array([0.0]))

    def test_sigma_range_variant(self):
        s = build_sigma_range_schedule(10, 0.001, 0.01)
        assert s.steps == 10
        assert s.eta[0] == 0.0
        assert s.increment(1) == pytest.approx(0.001)
        assert s.increment(10) == pytest.approx(0.01)


class TestStepForNoiseLevel:

    def test_paper_levels(self, schedule):
        assert step_for_noise_level(schedule, 0.04) == 100
        assert step_for_noise_level(schedule, 0.08) == 200
        assert step_for_noise_level(schedule, 0.12) == 300

    def test_zero_and_between(self, schedule):
        assert step_for_noise_level(schedule, 0.0) == 0
        assert step_for_noise_level(schedule, 0.0399) == 100

    def test_smallest_step_reaching_level(self, schedule):
        for level in np.linspace(0.0, 0.2, 37):
            k = step_for_noise_level(schedule, level)
            assert schedule.eta[k] >= level
            assert k == 0 or schedule.eta[k - 1] < level

    def test_maximum_is_reachable(self, schedule):
        assert step_for_noise_level(schedule, schedule.max_level) == 500

    def test_unreachable(self, schedule):
        with pytest.raises(LevelUnreachableError):
            step_for_noise_level(schedule, 0.25)

    def test_negative_level(self, schedule):
        with pytest.raises(InvalidArgumentError):
            step_for_noise_level(schedule, -0.01)
