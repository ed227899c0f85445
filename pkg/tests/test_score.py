import numpy as np
import pytest

from despeckle.common.errors import DegenerateKernelError, ShapeError
from despeckle.forward.random_source import RandomSource
from despeckle.nn.score_net import ScoreNetConfig, build_score_network
from despeckle.score.analytic_score import (ConstantScoreModel, DeltaScoreModel, GaussianScoreModel,
                                            analytic_delta_score, analytic_gaussian_score)
from despeckle.schedule.noise_schedule import build_linear_schedule
from despeckle.score.network_score_model import NetworkScoreModel


@pytest.fixture
def schedule():
    return build_linear_schedule()


class TestDeltaScore:

    def test_zero_at_kernel_mode(self, schedule):
        y0 = np.array([[[0.2, -1.0]]])
        y = y0 - 0.5 * schedule.eta_at(150)
        np.testing.assert_allclose(analytic_delta_score(y, 150, y0, schedule), 0.0, atol=1e-12)

    def test_at_clean_value(self, schedule):
        y0 = np.zeros((1, 2, 2))
        np.testing.assert_allclose(analytic_delta_score(y0, 100, y0, schedule), -0.5)

    def test_one_standard_deviation(self, schedule):
        y0 = np.zeros(3)
        y = y0 - 0.02 + np.sqrt(0.04)
        np.testing.assert_allclose(analytic_delta_score(y, 100, y0, schedule), -5.0)

    def test_step_zero_is_degenerate(self, schedule):
        with pytest.raises(DegenerateKernelError):
            analytic_delta_score(np.zeros(2), 0, np.zeros(2), schedule)

    def test_shape_mismatch(self, schedule):
        with pytest.raises(ShapeError):
            analytic_delta_score(np.zeros(2), 10, np.zeros(3), schedule)

    def test_model_interface(self, schedule):
        model = DeltaScoreModel(np.zeros((1, 2, 2)), schedule)
        y = np.full((1, 2, 2), 0.3)
        np.testing.assert_array_equal(model(y, 20), analytic_delta_score(y, 20, np.zeros((1, 2, 2)), schedule))
        batch = model.score_batch(np.stack([y, y]), np.array([20, 40]))
        np.testing.assert_allclose(batch[1], analytic_delta_score(y, 40, np.zeros((1, 2, 2)), schedule))


class TestGaussianScore:

    def test_reduces_to_delta(self, schedule):
        y = np.linspace(-1.0, 1.0, 9)
        mu0 = np.full(9, 0.1)
        np.testing.assert_allclose(analytic_gaussian_score(y, 80, mu0, 0.0, schedule),
                                   analytic_delta_score(y, 80, mu0, schedule))

    def test_converges_to_delta(self, schedule):
        y = np.linspace(-1.0, 1.0, 9)
        np.testing.assert_allclose(analytic_gaussian_score(y, 80, 0.1, 1e-12, schedule),
                                   analytic_delta_score(y, 80, 0.1, schedule), rtol=1e-6)

    def test_direct_arithmetic(self, schedule):
        value = analytic_gaussian_score(np.zeros(1), 100, 0.0, 1.0, schedule)
        np.testing.assert_allclose(value, -0.02 / 1.04)
        assert value[0] == pytest.approx(-0.019231, abs=1e-6)

    def test_zero_at_marginal_mode(self, schedule):
        for var0 in (0.0, 0.5, 3.0):
            y = np.array([0.3 - 0.5 * schedule.eta_at(250)])
            np.testing.assert_allclose(analytic_gaussian_score(y, 250, 0.3, var0, schedule), 0.0, atol=1e-12)

    def test_negative_variance(self, schedule):
        with pytest.raises(DegenerateKernelError):
            analytic_gaussian_score(np.zeros(1), 10, 0.0, -1.0, schedule)

    def test_point_mass_at_step_zero(self, schedule):
        with pytest.raises(DegenerateKernelError):
            GaussianScoreModel(0.0, 0.0, schedule).evaluate(np.zeros(1), 0)

    def test_positive_prior_defined_at_step_zero(self, schedule):
        np.testing.assert_allclose(GaussianScoreModel(0.0, 2.0, schedule).evaluate(np.ones(1), 0), -0.5)


class TestConstantScore:

    def test_constant(self):
        np.testing.assert_array_equal(ConstantScoreModel(-1.0)(np.zeros((2, 3)), 5), -np.ones((2, 3)))


class TestNetworkScoreModel:

    @pytest.fixture
    def model(self, schedule):
        network = build_score_network(ScoreNetConfig(widths=[4, 8, 8], embedding_dim=8, seed=4), dtype=np.float64)
        out_conv = network.out_conv
        rng = RandomSource(5)
        out_conv.weight.data[...] = rng.uniform(-0.3, 0.3, size=out_conv.weight.shape)
        out_conv.bias.data[...] = rng.uniform(-0.3, 0.3, size=out_conv.bias.shape)
        return NetworkScoreModel(network, schedule)

    def test_odd_size_is_cropped_symmetric_padding(self, model):
        y = RandomSource(6).normal((2, 1, 30, 30))
        ks = np.array([40, 300])
        score = model.score_batch(y, ks)
        assert score.shape == (2, 1, 30, 30)
        padded = np.pad(y, ((0, 0), (0, 0), (0, 2), (0, 2)), mode="symmetric")
        np.testing.assert_allclose(score, model.score_batch(padded, ks)[:, :, :30, :30], rtol=1e-12)

    def test_aligned_size_untouched(self, model):
        y = RandomSource(7).normal((1, 1, 8, 8))
        score = model.score_batch(y, np.array([100]))
        assert score.shape == (1, 1, 8, 8)
        assert np.any(score != 0.0)

    def test_evaluate_single_image(self, model):
        y = RandomSource(8).normal((1, 13, 6))
        np.testing.assert_allclose(model.evaluate(y, 200), model.score_batch(y[None, ...], np.array([200]))[0])
