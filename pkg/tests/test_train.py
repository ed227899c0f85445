import os
import time

import numpy as np
import pytest

from despeckle.common.errors import ConfigError, InvalidArgumentError, NonFiniteLossError
from despeckle.forward.random_source import RandomSource
from despeckle.nn.score_net import ScoreNetConfig, build_score_network
from despeckle.schedule.noise_schedule import build_linear_schedule
from despeckle.score.analytic_score import ConstantScoreModel, DeltaScoreModel, analytic_gaussian_score
from despeckle.score.base_score_model import ScoreModel
from despeckle.score.network_score_model import NetworkScoreModel
from despeckle.train.checkpoint_codec import encode_checkpoint
from despeckle.train.loss import loss_batch
from despeckle.train.toy_dataset import GaussianToyDataset
from despeckle.train.train_models import TrainConfig
from despeckle.train.trainer import Trainer, restore_score_model, train

MLP = ScoreNetConfig(kind="mlp", hidden=32, embedding_dim=16)
TINY_UNET = ScoreNetConfig(kind="unet", channels=1, widths=[4, 8], embedding_dim=8)


class NoiseCancellingModel(ScoreModel):
    """返回 −n/√η(k)，n 为注入损失的同一份噪声。"""

    def __init__(self, noise: np.ndarray, schedule) -> None:
        self.noise = noise
        self.schedule = schedule

    def evaluate(self, y, k):
        raise NotImplementedError

    def score_batch(self, y_batch, ks):
        root = np.sqrt(self.schedule.eta[np.asarray(ks)]).reshape((-1,) + (1,) * (self.noise.ndim - 1))
        return -self.noise / root


class NaNDataset(GaussianToyDataset):

    def next_log_batch(self, batch_size):
        return np.full((batch_size, 1), np.nan)


class SlowToyDataset(GaussianToyDataset):
    """取批前先等待，让预取任务在一轮结束时仍未完成。"""

    def next_log_batch(self, batch_size):
        time.sleep(0.2)
        return super().next_log_batch(batch_size)


@pytest.fixture
def schedule():
    return build_linear_schedule()


class TestLossBatch:

    def test_zero_model_gives_noise_energy(self, schedule):
        y0 = np.zeros((1000, 100))
        loss = loss_batch(ConstantScoreModel(0.0), y0, np.full(1000, 200), schedule, RandomSource(0)).item()
        assert abs(loss - 1.0) < 5 * np.sqrt(2.0 / y0.size)

    def test_exact_cancellation(self, schedule):
        noise = RandomSource(1).normal((8, 1, 4, 4))
        ks = np.arange(1, 9) * 50
        model = NoiseCancellingModel(noise, schedule)
        loss = loss_batch(model, np.zeros((8, 1, 4, 4)), ks, schedule, RandomSource(2), noise=noise)
        assert loss.item() < 1e-20

    def test_delta_oracle_residual(self, schedule):
        y0 = np.full((1000, 100), -0.7)
        loss = loss_batch(DeltaScoreModel(-0.7, schedule), y0, np.full(1000, 200), schedule, RandomSource(3))
        assert loss.item() < 1e-3

    def test_rejects_step_zero(self, schedule):
        with pytest.raises(InvalidArgumentError):
            loss_batch(ConstantScoreModel(0.0), np.zeros((2, 3)), np.array([0, 5]), schedule, RandomSource(0))

    def test_gradient_reaches_network(self, schedule):
        network = build_score_network(TINY_UNET)
        model = NetworkScoreModel(network, schedule)
        loss = loss_batch(model, np.zeros((2, 1, 4, 4)), np.array([10, 300]), schedule, RandomSource(4))
        loss.backward()
        assert np.any(network.out_conv.weight.grad != 0.0)


class TestTrainConfig:

    def test_defaults_valid(self):
        TrainConfig().validate()

    @pytest.mark.parametrize("changes", [{"epochs": -1}, {"batch_size": 0}, {"learning_rate": 0.0},
                                         {"patch_size": 6}, {"lr_final": -1.0}])
    def test_rejects(self, changes):
        with pytest.raises(InvalidArgumentError):
            TrainConfig(**changes).validate()

    def test_patch_must_fit_network(self):
        config = TrainConfig(patch_size=4, network=ScoreNetConfig(widths=[4, 8, 8, 8]))
        with pytest.raises(InvalidArgumentError):
            config.validate()


class TestTrainer:

    def test_zero_epochs_returns_initial_parameters(self):
        config = TrainConfig(epochs=0, batch_size=4, seed=5, network=TINY_UNET)
        checkpoint = train(config, GaussianToyDataset(5, item_shape=(1, 4, 4), items_per_epoch=8))
        assert checkpoint.epoch == 0
        assert checkpoint.optimizer.step == 0
        fresh = build_score_network(ScoreNetConfig(kind="unet", channels=1, widths=[4, 8], embedding_dim=8, seed=5))
        for saved, param in zip(checkpoint.parameters, fresh.parameters()):
            np.testing.assert_array_equal(saved, param.data)

    def test_same_seed_same_checkpoint_bytes(self):
        def run():
            config = TrainConfig(epochs=2, batch_size=4, seed=11, network=TINY_UNET)
            return encode_checkpoint(train(config, GaussianToyDataset(11, item_shape=(1, 4, 4),
                                                                      items_per_epoch=12)))
        assert run() == run()

    def test_different_seed_differs(self):
        def run(seed):
            config = TrainConfig(epochs=1, batch_size=4, seed=seed, network=MLP)
            return encode_checkpoint(train(config, GaussianToyDataset(seed, items_per_epoch=8)))
        assert run(1) != run(2)

    def test_step_and_epoch_counts(self):
        config = TrainConfig(epochs=3, batch_size=4, network=MLP)
        trainer = Trainer(config, GaussianToyDataset(0, items_per_epoch=10))
        checkpoint = trainer.run()
        assert trainer.steps_per_epoch == 3
        assert checkpoint.epoch == 3
        assert checkpoint.optimizer.step == 9
        assert len(trainer.loss_history) == 9

    def test_training_reduces_loss(self, schedule):
        config = TrainConfig(epochs=2, batch_size=128, learning_rate=3e-3, seed=2, network=MLP)
        dataset = GaussianToyDataset(2, items_per_epoch=128 * 150)
        model = restore_score_model(train(config, dataset))
        y0 = RandomSource(9).normal((20000, 1))
        ks = RandomSource(10).integers(1, 500, size=20000)
        noise = RandomSource(11).normal((20000, 1))
        before = loss_batch(ConstantScoreModel(0.0), y0, ks, schedule, RandomSource(0), noise=noise).item()
        after = loss_batch(model, y0, ks, schedule, RandomSource(0), noise=noise).item()
        assert after < before

    def test_learning_rate_annealing(self):
        config = TrainConfig(epochs=2, batch_size=4, learning_rate=1e-2, lr_final=1e-3, network=MLP)
        trainer = Trainer(config, GaussianToyDataset(0, items_per_epoch=8))
        assert trainer.learning_rate(0) == pytest.approx(1e-2)
        assert trainer.learning_rate(trainer.total_steps - 1) == pytest.approx(1e-3)

    def test_interval_checkpoints(self, tmp_path):
        path = str(tmp_path / "model.gbmd")
        config = TrainConfig(epochs=3, batch_size=4, checkpoint_interval=1, checkpoint_path=path, network=MLP)
        train(config, GaussianToyDataset(0, items_per_epoch=4))
        assert os.path.isfile(f"{path}.epoch1")
        assert os.path.isfile(f"{path}.epoch2")
        assert not os.path.exists(f"{path}.epoch3")

    def test_interval_checkpoint_independent_of_data_latency(self, tmp_path):
        def run(name, dataset_type):
            path = str(tmp_path / name)
            config = TrainConfig(epochs=3, batch_size=4, seed=6, checkpoint_interval=1, checkpoint_path=path,
                                 network=MLP)
            final = encode_checkpoint(train(config, dataset_type(6, items_per_epoch=8)))
            with open(f"{path}.epoch1", "rb") as fp:
                first = fp.read()
            with open(f"{path}.epoch2", "rb") as fp:
                second = fp.read()
            return first, second, final

        assert run("fast.gbmd", GaussianToyDataset) == run("slow.gbmd", SlowToyDataset)

    def test_loss_history_decreases(self):
        config = TrainConfig(epochs=2, batch_size=128, learning_rate=3e-3, seed=3, network=MLP)
        trainer = Trainer(config, GaussianToyDataset(3, var=0.01, items_per_epoch=128 * 150))
        trainer.run()
        history = np.asarray(trainer.loss_history)
        tenth = history.size // 10
        assert history[-tenth:].mean() < history[:tenth].mean()

    def test_empty_dataset(self):
        with pytest.raises(ConfigError):
            Trainer(TrainConfig(network=MLP), GaussianToyDataset(0, items_per_epoch=0))

    def test_non_finite_loss_names_step(self):
        config = TrainConfig(epochs=1, batch_size=2, network=MLP)
        with pytest.raises(NonFiniteLossError, match="step 0"):
            train(config, NaNDataset(0, items_per_epoch=2))


@pytest.mark.slow
class TestToyLearning:

    def test_learns_gaussian_score(self, schedule):
        config = TrainConfig(epochs=50, batch_size=128, learning_rate=3e-3, lr_final=1e-4, seed=0,
                             network=ScoreNetConfig(kind="mlp", hidden=64, embedding_dim=32))
        checkpoint = train(config, GaussianToyDataset(0, mu=0.0, var=1.0, items_per_epoch=128 * 100))
        assert checkpoint.optimizer.step == 5000
        model = restore_score_model(checkpoint)
        grid = np.linspace(-3.0, 3.0, 61)
        for k in (100, 200, 300):
            learned = model.score_batch(grid[:, None], np.full(grid.size, k))[:, 0]
            exact = analytic_gaussian_score(grid, k, 0.0, 1.0, schedule)
            assert np.linalg.norm(learned - exact) / np.linalg.norm(exact) < 0.1
