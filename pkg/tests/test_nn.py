import numpy as np
import pytest

from despeckle.common.errors import ContractError, InvalidArgumentError, ShapeError
from despeckle.forward.random_source import RandomSource
from despeckle.nn import ops
from despeckle.nn.embedding import time_embedding
from despeckle.nn.gradcheck import check_gradients
from despeckle.nn.optimizer import AdamState, adam_step
from despeckle.nn.score_net import ScoreNetConfig, build_score_network, parameter_layout
from despeckle.nn.tensor import Tensor, backward, no_grad


def _leaf(values) -> Tensor:
    return Tensor(np.asarray(values, dtype=np.float64), requires_grad=True)


class TestPrimitives:

    def test_add_zero_is_identity(self):
        x = Tensor(np.arange(6.0).reshape(2, 3))
        np.testing.assert_array_equal(ops.add(x, 0.0).data, x.data)

    def test_identity_impulse_kernel(self):
        x = Tensor(np.arange(16.0).reshape(1, 1, 4, 4))
        kernel = np.zeros((1, 1, 3, 3))
        kernel[0, 0, 1, 1] = 1.0
        np.testing.assert_array_equal(ops.conv2d(x, Tensor(kernel)).data, x.data)

    def test_conv_shift_kernel_uses_zero_padding(self):
        x = Tensor(np.arange(1.0, 10.0).reshape(1, 1, 3, 3))
        kernel = np.zeros((1, 1, 3, 3))
        kernel[0, 0, 1, 2] = 1.0
        expected = np.array([[2.0, 3.0, 0.0], [5.0, 6.0, 0.0], [8.0, 9.0, 0.0]])
        np.testing.assert_array_equal(ops.conv2d(x, Tensor(kernel)).data[0, 0], expected)

    def test_mean_square(self):
        assert ops.mean(ops.square(Tensor([3.0, 4.0]))).item() == pytest.approx(12.5)

    def test_avgpool_and_upsample(self):
        x = Tensor(np.arange(16.0).reshape(1, 1, 4, 4))
        pooled = ops.avgpool2(x)
        np.testing.assert_allclose(pooled.data[0, 0], [[2.5, 4.5], [10.5, 12.5]])
        up = ops.upsample2(pooled)
        assert up.shape == (1, 1, 4, 4)
        np.testing.assert_array_equal(up.data[0, 0, :2, :2], 2.5)

    def test_channel_norm_statistics(self):
        x = Tensor(RandomSource(0).normal((2, 3, 4, 4)) * 5.0 + 2.0)
        y = ops.channel_norm(x).data
        np.testing.assert_allclose(y.mean(axis=(2, 3)), 0.0, atol=1e-10)
        np.testing.assert_allclose(y.var(axis=(2, 3)), 1.0, rtol=1e-3)

    def test_shape_errors_name_primitive(self):
        with pytest.raises(ShapeError, match="add"):
            ops.add(Tensor(np.zeros(3)), Tensor(np.zeros(4)))
        with pytest.raises(ShapeError, match="matmul"):
            ops.matmul(Tensor(np.zeros((2, 3))), Tensor(np.zeros((2, 3))))
        with pytest.raises(ShapeError, match="conv2d"):
            ops.conv2d(Tensor(np.zeros((1, 2, 4, 4))), Tensor(np.zeros((1, 1, 3, 3))))


class TestBackward:

    def test_sum_gives_ones(self):
        x = _leaf(np.arange(6.0).reshape(2, 3))
        backward(ops.reduce_sum(x))
        np.testing.assert_array_equal(x.grad, np.ones((2, 3)))

    def test_mean_square_gradient(self):
        x = _leaf([3.0, 4.0])
        backward(ops.mean(ops.square(x)))
        np.testing.assert_allclose(x.grad, [3.0, 4.0])

    def test_shared_subexpression_visited_once(self):
        x = _leaf([2.0])
        y = ops.mul(x, x)
        backward(ops.reduce_sum(ops.add(y, y)))
        np.testing.assert_allclose(x.grad, [8.0])

    def test_gradients_accumulate_across_calls(self):
        x = _leaf([1.0, 2.0])
        backward(ops.reduce_sum(x))
        backward(ops.reduce_sum(x))
        np.testing.assert_array_equal(x.grad, [2.0, 2.0])

    def test_broadcast_gradient_reduces(self):
        bias = _leaf([1.0, 2.0, 3.0])
        backward(ops.reduce_sum(ops.add(Tensor(np.zeros((4, 3))), bias)))
        np.testing.assert_array_equal(bias.grad, [4.0, 4.0, 4.0])

    def test_non_scalar_rejected(self):
        with pytest.raises(ContractError):
            backward(ops.add(_leaf([1.0, 2.0]), 1.0))

    def test_no_grad_records_nothing(self):
        x = _leaf([1.0])
        with no_grad():
            y = ops.mul(x, 3.0)
        assert y.node is None and not y.requires_grad

    def test_primitives_against_finite_differences(self):
        rng = RandomSource(1)
        x = _leaf(rng.normal((2, 2, 4, 4)))
        w = _leaf(rng.normal((3, 2, 3, 3)) * 0.3)
        b = _leaf(rng.normal((3,)))
        emb = _leaf(rng.normal((2, 3)))
        target = rng.normal((2, 3, 4, 4))

        def loss_fn():
            h = ops.conv2d(x, w, b)
            h = ops.add_channel_bias(ops.silu(ops.channel_norm(h)), emb)
            h = ops.upsample2(ops.avgpool2(h))
            return ops.mean(ops.square(ops.sub(h, target)))

        report = check_gradients(loss_fn, [x, w, b, emb])
        assert report.passed, report.worst

    @pytest.mark.parametrize("seed", [3, 17, 42, 101, 2024])
    def test_random_shapes_against_finite_differences(self, seed):
        rng = RandomSource(seed)
        batch, c_in, c_out = (int(v) for v in rng.integers(1, 3, size=3))
        height, width = (2 * int(v) for v in rng.integers(2, 3, size=2))
        x = _leaf(rng.normal((batch, c_in, height, width)))
        w = _leaf(rng.normal((c_out, c_in, 3, 3)) * 0.3)
        b = _leaf(rng.normal((c_out,)))
        emb = _leaf(rng.normal((batch, c_out)))
        target = rng.normal((batch, c_out, height, width))

        def loss_fn():
            h = ops.add_channel_bias(ops.silu(ops.channel_norm(ops.conv2d(x, w, b))), emb)
            h = ops.add(h, ops.upsample2(ops.avgpool2(h)))
            return ops.mean(ops.square(ops.sub(h, target)))

        report = check_gradients(loss_fn, [x, w, b, emb])
        assert report.passed, report.worst

    @pytest.mark.parametrize("seed", [5, 23])
    def test_score_network_against_finite_differences(self, seed):
        rng = RandomSource(seed)
        network = build_score_network(ScoreNetConfig(widths=[2, 4], embedding_dim=4, seed=seed), dtype=np.float64)
        network.out_conv.weight.data[...] = rng.uniform(-0.3, 0.3, size=network.out_conv.weight.shape)
        network.out_conv.bias.data[...] = rng.uniform(-0.3, 0.3, size=network.out_conv.bias.shape)
        size = 4 * int(rng.integers(2, 3))
        y = Tensor(rng.normal((2, 1, size, size)))
        target = rng.normal((2, 1, size, size))
        ks = rng.integers(1, 500, size=2)

        def loss_fn():
            return ops.mean(ops.square(ops.sub(network.forward(y, ks), target)))

        report = check_gradients(loss_fn, network.parameters(), rng=rng.child(0), max_entries=32)
        assert report.passed, report.worst

    def test_matmul_relu_gradients(self):
        rng = RandomSource(2)
        a = _leaf(rng.normal((3, 4)))
        b = _leaf(rng.normal((4, 2)))
        report = check_gradients(lambda: ops.mean(ops.relu(ops.matmul(a, b))), [a, b])
        assert report.passed, report.worst


class TestTimeEmbedding:

    def test_step_zero_alternates(self):
        np.testing.assert_array_equal(time_embedding(0, 8), [0.0, 1.0] * 4)

    def test_norm(self):
        for k in (0, 1, 250, 500):
            assert np.linalg.norm(time_embedding(k, 16)) == pytest.approx(np.sqrt(8.0))

    def test_batch_matches_single(self):
        batch = time_embedding(np.array([3, 40]), 6)
        np.testing.assert_allclose(batch[1], time_embedding(40, 6))

    @pytest.mark.parametrize("dim", [0, 3, -2])
    def test_bad_dim(self, dim):
        with pytest.raises(InvalidArgumentError):
            time_embedding(1, dim)


class TestScoreNetwork:

    def test_unet_output_shape_and_zero_init(self):
        config = ScoreNetConfig(kind="unet", channels=1, widths=[4, 8], embedding_dim=8, seed=3)
        network = build_score_network(config)
        out = network.forward(Tensor(RandomSource(0).normal((2, 1, 8, 8))), np.array([5, 100]))
        assert out.shape == (2, 1, 8, 8)
        np.testing.assert_array_equal(out.data, 0.0)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_output_shape_for_random_sizes(self, seed):
        rng = RandomSource(seed)
        height, width = (4 * int(v) for v in rng.integers(1, 5, size=2))
        batch = int(rng.integers(1, 3))
        network = build_score_network(ScoreNetConfig(widths=[4, 8, 8], embedding_dim=8, seed=seed))
        out = network.forward(Tensor(rng.normal((batch, 1, height, width))), rng.integers(0, 500, size=batch))
        assert out.shape == (batch, 1, height, width)

    def test_rejects_indivisible_input(self):
        network = build_score_network(ScoreNetConfig(widths=[4, 8, 8], embedding_dim=8))
        with pytest.raises(ShapeError):
            network.forward(Tensor(np.zeros((1, 1, 6, 6))), np.array([1]))

    def test_same_seed_same_parameters(self):
        config = ScoreNetConfig(widths=[4, 8], embedding_dim=8, seed=9)
        a, b = build_score_network(config), build_score_network(config)
        for pa, pb in zip(a.parameters(), b.parameters()):
            np.testing.assert_array_equal(pa.data, pb.data)
        assert parameter_layout(a) == parameter_layout(b)

    def test_layout_order_is_registration_order(self):
        network = build_score_network(ScoreNetConfig(widths=[4, 8], embedding_dim=8))
        names = [name for name, _ in parameter_layout(network)]
        assert names[0] == "in_conv.weight"
        assert names[-1] == "out_conv.bias"
        assert len(names) == len(set(names))

    def test_mlp_is_elementwise(self):
        config = ScoreNetConfig(kind="mlp", hidden=16, embedding_dim=8)
        network = build_score_network(config, dtype=np.float64)
        network.output.weight.data[...] = RandomSource(1).normal(network.output.weight.shape)
        y = RandomSource(2).normal((3, 1))
        batch = network.forward(Tensor(y), np.array([10, 20, 30])).data
        single = network.forward(Tensor(y[1:2]), np.array([20])).data
        np.testing.assert_allclose(batch[1], single[0])

    def test_unknown_kind(self):
        with pytest.raises(InvalidArgumentError):
            build_score_network(ScoreNetConfig(kind="transformer"))

    def test_config_round_trip(self):
        config = ScoreNetConfig(kind="unet", channels=3, widths=[8, 16], embedding_dim=4, hidden=5, seed=2)
        assert ScoreNetConfig.from_dict(config.to_dict()) == config


class TestAdam:

    def test_zero_gradient_leaves_parameters(self):
        p = Tensor(np.array([0.5, -1.0]), requires_grad=True)
        adam_step([p], [np.zeros(2)], AdamState(), lr=0.1)
        np.testing.assert_array_equal(p.data, [0.5, -1.0])

    def test_first_step_moves_by_learning_rate(self):
        p = Tensor(np.array([0.0]), requires_grad=True)
        state = AdamState()
        adam_step([p], [np.array([1.0])], state, lr=0.1)
        assert p.data[0] == pytest.approx(-0.1, rel=1e-6)
        assert state.step == 1

    def test_identical_parameters_stay_identical(self):
        a = Tensor(np.array([0.3]), requires_grad=True)
        b = Tensor(np.array([0.3]), requires_grad=True)
        state = AdamState.for_parameters([a, b])
        for i in range(100):
            grad = np.array([np.sin(i)])
            adam_step([a, b], [grad, grad.copy()], state, lr=0.01)
        np.testing.assert_array_equal(a.data, b.data)

    def test_preserves_dtype(self):
        p = Tensor(np.ones(3), requires_grad=True, dtype=np.float32)
        adam_step([p], [np.ones(3)], AdamState(), lr=0.01)
        assert p.data.dtype == np.float32

    def test_count_mismatch(self):
        p = Tensor(np.ones(2), requires_grad=True)
        with pytest.raises(ContractError):
            adam_step([p], [], AdamState(), lr=0.1)

    def test_shape_mismatch(self):
        p = Tensor(np.ones(2), requires_grad=True)
        with pytest.raises(ContractError):
            adam_step([p], [np.ones(3)], AdamState(), lr=0.1)
