import struct
from dataclasses import replace

import numpy as np
import pytest

from despeckle.common.errors import ConfigError, CorruptCheckpointError, UnsupportedVersionError
from despeckle.forward.random_source import RandomSource
from despeckle.nn.score_net import ScoreNetConfig
from despeckle.nn.tensor import Tensor, no_grad
from despeckle.train.checkpoint_codec import (decode_checkpoint, encode_checkpoint, inspect_checkpoint,
                                              load_checkpoint, save_checkpoint)
from despeckle.train.toy_dataset import GaussianToyDataset
from despeckle.train.train_models import TrainConfig
from despeckle.train.trainer import Trainer, restore_network


@pytest.fixture(scope="module")
def trained():
    config = TrainConfig(epochs=2, batch_size=2, seed=4,
                         network=ScoreNetConfig(kind="unet", channels=1, widths=[4, 8], embedding_dim=8))
    trainer = Trainer(config, GaussianToyDataset(4, item_shape=(1, 4, 4), items_per_epoch=4))
    checkpoint = trainer.run()
    return trainer, checkpoint


class TestCheckpointRoundTrip:

    def test_save_load_save_is_byte_identical(self, trained, tmp_path):
        _, checkpoint = trained
        first = tmp_path / "a.gbmd"
        second = tmp_path / "b.gbmd"
        save_checkpoint(checkpoint, str(first))
        save_checkpoint(load_checkpoint(str(first)), str(second))
        assert first.read_bytes() == second.read_bytes()

    def test_restored_network_matches(self, trained, tmp_path):
        trainer, checkpoint = trained
        path = str(tmp_path / "model.gbmd")
        save_checkpoint(checkpoint, path)
        restored = restore_network(load_checkpoint(path))
        sample = Tensor(RandomSource(0).normal((2, 1, 4, 4)))
        ks = np.array([3, 400])
        with no_grad():
            np.testing.assert_array_equal(restored.forward(sample, ks).data, trainer.network.forward(sample, ks).data)

    def test_fields_survive(self, trained):
        _, checkpoint = trained
        decoded = decode_checkpoint(encode_checkpoint(checkpoint))
        assert decoded.epoch == 2
        assert decoded.optimizer.step == checkpoint.optimizer.step
        assert decoded.arch == checkpoint.arch
        assert decoded.layout == checkpoint.layout
        assert decoded.train_config == checkpoint.train_config
        np.testing.assert_array_equal(decoded.schedule.eta, checkpoint.schedule.eta)
        for a, b in zip(decoded.optimizer.v, checkpoint.optimizer.v):
            np.testing.assert_array_equal(a, b)
        assert decoded.rng_state == checkpoint.rng_state

    def test_inspect_reads_header_only(self, trained, tmp_path):
        _, checkpoint = trained
        data = encode_checkpoint(checkpoint)
        path = tmp_path / "cut.gbmd"
        # 截掉参数块后头部仍可读取
        path.write_bytes(data[:-64])
        header = inspect_checkpoint(str(path))
        assert header.steps == 500
        assert header.eta_per_step == pytest.approx(0.0004)
        assert header.epoch == 2
        assert header.arch.widths == [4, 8]
        assert header.parameter_count == checkpoint.parameter_count
        with pytest.raises(CorruptCheckpointError):
            load_checkpoint(str(path))


class TestCheckpointErrors:

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.gbmd"
        path.write_bytes(b"")
        with pytest.raises(CorruptCheckpointError):
            load_checkpoint(str(path))

    def test_bad_magic(self, trained):
        data = bytearray(encode_checkpoint(trained[1]))
        data[0:4] = b"NOPE"
        with pytest.raises(CorruptCheckpointError) as info:
            decode_checkpoint(bytes(data))
        assert info.value.offset == 0

    def test_unsupported_version(self, trained):
        data = bytearray(encode_checkpoint(trained[1]))
        data[4:8] = struct.pack("<I", 2)
        with pytest.raises(UnsupportedVersionError):
            decode_checkpoint(bytes(data))

    def test_truncated_at_every_region(self, trained):
        data = encode_checkpoint(trained[1])
        for cut in (3, 10, 40, len(data) // 2, len(data) - 1):
            with pytest.raises(CorruptCheckpointError):
                decode_checkpoint(data[:cut])

    def test_trailing_bytes(self, trained):
        with pytest.raises(CorruptCheckpointError):
            decode_checkpoint(encode_checkpoint(trained[1]) + b"\x00")

    def test_layout_mismatch(self, trained):
        checkpoint = replace(trained[1], arch=replace(trained[1].arch, widths=[4, 4]))
        with pytest.raises(ConfigError):
            restore_network(checkpoint)
