import os

import numpy as np
import pytest

from despeckle.common.errors import ConfigError, ParseError, ShapeError, UnsupportedFormatError
from despeckle.imgio.dataset_loader import PatchStream, load_dataset, load_images
from despeckle.imgio.intensity_mapping import from_intensity, to_intensity
from despeckle.imgio.pnm_codec import decode_pnm, encode_pnm, read_pnm, write_pnm
from despeckle.model.raw_image import RawImage

P5_SAMPLE = b"P5\n2 2\n255\n" + bytes([0, 128, 255, 64])


def write_gray(path, samples: np.ndarray) -> None:
    height, width = samples.shape
    write_pnm(RawImage(width=width, height=height, channels=1, samples=samples.astype(np.uint8)), str(path))


class TestPnmCodec:
    def test_decode_p5(self):
        img = decode_pnm(P5_SAMPLE)
        assert (img.width, img.height, img.channels) == (2, 2, 1)
        np.testing.assert_array_equal(img.samples[:, :, 0], [[0, 128], [255, 64]])

    def test_header_comments(self):
        img = decode_pnm(b"P5 # a comment\n2 # width done\n2\n255\n" + bytes([1, 2, 3, 4]))
        np.testing.assert_array_equal(img.samples.ravel(), [1, 2, 3, 4])

    def test_decode_p6_layout(self):
        payload = bytes(range(12))
        img = decode_pnm(b"P6\n2 2\n255\n" + payload)
        assert img.samples.shape == (2, 2, 3)
        np.testing.assert_array_equal(img.samples[0, 1], [3, 4, 5])

    def test_write_read(self, tmp_path):
        path = tmp_path / "nested" / "img.pgm"
        original = decode_pnm(P5_SAMPLE)
        write_pnm(original, str(path))
        restored = read_pnm(str(path))
        np.testing.assert_array_equal(restored.samples, original.samples)
        assert encode_pnm(restored) == P5_SAMPLE

    def test_sixteen_bit_unsupported(self):
        with pytest.raises(UnsupportedFormatError):
            decode_pnm(b"P5\n2 2\n65535\n" + bytes(8))

    @pytest.mark.parametrize("maxval", [b"0", b"70000"])
    def test_bad_maxval(self, maxval):
        with pytest.raises(ParseError):
            decode_pnm(b"P5\n2 2\n" + maxval + b"\n" + bytes(8))

    def test_bad_magic_offset(self):
        with pytest.raises(ParseError) as info:
            decode_pnm(b"P2\n2 2\n255\n0 0 0 0")
        assert info.value.offset == 0

    def test_truncated_payload(self):
        with pytest.raises(ParseError) as info:
            decode_pnm(P5_SAMPLE[:-1])
        assert info.value.offset == len(P5_SAMPLE) - 1

    def test_missing_number(self):
        with pytest.raises(ParseError):
            decode_pnm(b"P5\n2 x\n255\n")

    def test_raw_image_sample_count(self):
        with pytest.raises(ShapeError):
            RawImage(width=2, height=2, channels=1, samples=np.zeros(3, dtype=np.uint8))


class TestIntensityMapping:
    def test_extremes(self):
        raw = decode_pnm(P5_SAMPLE)
        x = to_intensity(raw).data
        assert x.shape == (1, 2, 2)
        assert x[0, 0, 0] == 1.0 / 256.0
        assert x[0, 1, 0] == 1.0

    def test_every_value_round_trips(self):
        samples = np.arange(256, dtype=np.uint8).reshape(16, 16, 1)
        raw = RawImage(width=16, height=16, channels=1, samples=samples)
        np.testing.assert_array_equal(from_intensity(to_intensity(raw)).samples, samples)

    def test_out_of_range_is_clamped(self):
        x = np.array([[[1e-6, 0.5, 3.0]]])
        np.testing.assert_array_equal(from_intensity(x).samples.ravel(), [0, 127, 255])

    def test_color_layout(self):
        samples = np.arange(12, dtype=np.uint8).reshape(2, 2, 3)
        x = to_intensity(RawImage(width=2, height=2, channels=3, samples=samples)).data
        assert x.shape == (3, 2, 2)
        assert x[2, 0, 1] == (5 + 1) / 256.0


class TestPatchStream:
    @staticmethod
    def indexed_image(size: int) -> np.ndarray:
        values = np.arange(1, size * size + 1, dtype=np.float64) / (size * size)
        return values.reshape(1, size, size)

    def test_single_origin(self):
        image = self.indexed_image(32)
        stream = PatchStream([image], patch=32, seed=0)
        assert stream.items_per_epoch == 1
        np.testing.assert_array_equal(stream.next_patch().data, image)

    def test_epoch_covers_every_origin(self):
        image = self.indexed_image(64)
        stream = PatchStream([image], patch=32, seed=5)
        assert stream.items_per_epoch == 33 * 33
        corners = {stream.next_patch().data[0, 0, 0] for _ in range(stream.items_per_epoch)}
        expected = set(image[0, :33, :33].ravel())
        assert corners == expected

    def test_same_seed_same_order(self):
        image = self.indexed_image(40)
        a = PatchStream([image], patch=8, seed=11).next_batch(20)
        b = PatchStream([image], patch=8, seed=11).next_batch(20)
        c = PatchStream([image], patch=8, seed=12).next_batch(20)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_batch_shapes(self):
        stream = PatchStream([self.indexed_image(16), self.indexed_image(20)], patch=8, seed=0)
        assert stream.items_per_epoch == 9 * 9 + 13 * 13
        assert stream.next_batch(4).shape == (4, 1, 8, 8)
        assert stream.next_log_batch(2).shape == (2, 1, 8, 8)


class TestLoadImages:
    def test_sorted_and_skips(self, tmp_path):
        write_gray(tmp_path / "b.pgm", np.full((16, 16), 10))
        write_gray(tmp_path / "a.pgm", np.full((20, 16), 20))
        write_gray(tmp_path / "tiny.pgm", np.full((4, 4), 30))
        (tmp_path / "broken.pgm").write_bytes(b"not an image")
        (tmp_path / "notes.txt").write_text("ignored")
        images = load_images(str(tmp_path), min_size=8)
        assert list(images) == ["a.pgm", "b.pgm"]
        assert images["a.pgm"].shape == (1, 20, 16)

    def test_empty_directory(self, tmp_path):
        with pytest.raises(ConfigError):
            load_images(str(tmp_path))

    def test_missing_directory(self, tmp_path):
        with pytest.raises(ConfigError):
            load_images(os.path.join(str(tmp_path), "absent"))

    def test_everything_skipped(self, tmp_path):
        write_gray(tmp_path / "tiny.pgm", np.full((4, 4), 30))
        with pytest.raises(ConfigError):
            load_images(str(tmp_path), min_size=8)

    def test_load_dataset(self, tmp_path):
        write_gray(tmp_path / "img.pgm", np.arange(256).reshape(16, 16))
        stream = load_dataset(str(tmp_path), patch=8, seed=0)
        assert stream.channels == 1
        assert stream.items_per_epoch == 81
