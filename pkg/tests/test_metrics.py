import numpy as np
import pytest

from despeckle.common.errors import ContractError, InvalidArgumentError
from despeckle.metrics.evaluation_service import EvaluationService
from despeckle.metrics.quality_metrics import gaussian_window, mse, psnr, ssim
from despeckle.model.metric_report import ImageMetrics, MetricReport


def reference_ssim(x: np.ndarray, y: np.ndarray, size: int = 11) -> float:
    """逐窗口直接求和的 SSIM，只用于对照。"""
    w = gaussian_window(size)
    c1, c2 = 0.01 ** 2, 0.03 ** 2
    values = []
    for i in range(x.shape[0] - size + 1):
        for j in range(x.shape[1] - size + 1):
            px, py = x[i:i + size, j:j + size], y[i:i + size, j:j + size]
            mx, my = np.sum(w * px), np.sum(w * py)
            vx = np.sum(w * (px - mx) ** 2)
            vy = np.sum(w * (py - my) ** 2)
            cov = np.sum(w * (px - mx) * (py - my))
            values.append((2 * mx * my + c1) * (2 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2)))
    return float(np.mean(values))


class TestPsnr:
    def test_identical_images_hit_cap(self):
        a = np.full((1, 16, 16), 0.3)
        assert psnr(a, a) == 100.0

    def test_known_errors(self):
        a = np.full((1, 8, 8), 0.5)
        assert psnr(a, a + 0.1) == pytest.approx(20.0, abs=1e-9)
        assert psnr(a, a + 0.05) == pytest.approx(26.0206, abs=1e-4)

    def test_mse_accepts_2d(self):
        a = np.zeros((4, 4))
        assert mse(a, np.ones((4, 4))) == 1.0

    def test_shape_mismatch(self):
        with pytest.raises(ContractError):
            psnr(np.zeros((1, 4, 4)), np.zeros((1, 4, 5)))


class TestGaussianWindow:
    def test_normalised_and_symmetric(self):
        w = gaussian_window(11)
        assert w.shape == (11, 11)
        assert w.sum() == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(w, w.T)
        assert np.argmax(w) == 5 * 11 + 5


class TestSsim:
    def test_identical_is_one(self):
        rng = np.random.default_rng(0)
        a = rng.uniform(size=(1, 24, 24))
        assert ssim(a, a) == pytest.approx(1.0, abs=1e-12)

    def test_constant_images_match_direct_sum(self):
        a, b = np.full((16, 16), 0.5), np.full((16, 16), 0.6)
        expected = (2 * 0.5 * 0.6 + 1e-4) / (0.25 + 0.36 + 1e-4)
        assert ssim(a, b) == pytest.approx(expected, abs=1e-9)
        assert ssim(a, b) == pytest.approx(reference_ssim(a, b), abs=1e-9)

    def test_random_images_match_direct_sum(self):
        rng = np.random.default_rng(3)
        a = rng.uniform(size=(20, 18))
        b = np.clip(a + 0.1 * rng.standard_normal(a.shape), 0.0, 1.0)
        assert ssim(a, b) == pytest.approx(reference_ssim(a, b), abs=1e-9)

    def test_anti_correlated_is_negative(self):
        rng = np.random.default_rng(1)
        a = rng.uniform(size=(1, 16, 16))
        assert ssim(a, 1.0 - a) < 0.0

    def test_channels_are_averaged(self):
        rng = np.random.default_rng(2)
        a = rng.uniform(size=(3, 12, 12))
        b = np.clip(a + 0.05, 0.0, 1.0)
        per_channel = [ssim(a[c], b[c]) for c in range(3)]
        assert ssim(a, b) == pytest.approx(np.mean(per_channel), abs=1e-12)

    def test_too_small(self):
        with pytest.raises(InvalidArgumentError):
            ssim(np.zeros((1, 10, 20)), np.zeros((1, 10, 20)))

    def test_shape_mismatch(self):
        with pytest.raises(ContractError):
            ssim(np.zeros((1, 12, 12)), np.zeros((3, 12, 12)))


class TestMetricReport:
    def test_csv_rows(self):
        report = MetricReport(rows=[ImageMetrics("a.pgm", 0.01, 20.0, 0.5),
                                    ImageMetrics("b.pgm", 0.03, 30.0, 0.7)])
        rows = report.csv_rows()
        assert rows[0] == ["name", "mse", "psnr", "ssim"]
        assert [r[0] for r in rows[1:]] == ["a.pgm", "b.pgm", "mean"]
        assert rows[-1][2] == "25.000000"
        assert float(rows[-1][1]) == pytest.approx(0.02)
        assert float(rows[-1][3]) == pytest.approx(0.6)

    def test_empty_means(self):
        assert MetricReport().mean_psnr == 0.0


class TestEvaluationService:
    def test_pairs_by_name(self):
        a = np.full((1, 12, 12), 0.5)
        report = EvaluationService.evaluate_images({"y": a, "x": a}, {"x": a + 0.1, "y": a})
        assert [r.name for r in report.rows] == ["x", "y"]
        assert report.rows[0].psnr == pytest.approx(20.0, abs=1e-9)
        assert report.rows[1].psnr == 100.0

    def test_unmatched_names(self):
        a = np.full((1, 12, 12), 0.5)
        with pytest.raises(ContractError, match="z"):
            EvaluationService.evaluate_images({"x": a}, {"x": a, "z": a})

    def test_to_csv_writes_file(self, tmp_path):
        report = MetricReport(rows=[ImageMetrics("a.pgm", 0.0, 100.0, 1.0)])
        path = tmp_path / "out" / "metrics.csv"
        text = EvaluationService.to_csv(report, str(path))
        assert path.read_text(encoding="utf-8") == text
        assert text.splitlines()[0] == "name,mse,psnr,ssim"
