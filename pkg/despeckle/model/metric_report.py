from dataclasses import dataclass, field
from typing import List


@dataclass
class ImageMetrics:
    """
    用途：单张图像的质量指标。
    """
    name: str
    mse: float
    psnr: float
    ssim: float


@dataclass
class MetricReport:
    """
    用途：逐图像指标与其平均值。
    """
    rows: List[ImageMetrics] = field(default_factory=list)

    CSV_HEADER = ("name", "mse", "psnr", "ssim")

    @property
    def mean_mse(self) -> float:
        return sum(r.mse for r in self.rows) / len(self.rows) if self.rows else 0.0

    @property
    def mean_psnr(self) -> float:
        return sum(r.psnr for r in self.rows) / len(self.rows) if self.rows else 0.0

    @property
    def mean_ssim(self) -> float:
        return sum(r.ssim for r in self.rows) / len(self.rows) if self.rows else 0.0

    def csv_rows(self) -> List[List[str]]:
        """用途说明：表头、逐图像行与聚合行（name 为 mean）。"""
        rows = [list(self.CSV_HEADER)]
        for r in self.rows:
            rows.append([r.name, f"{r.mse:.10g}", f"{r.psnr:.6f}", f"{r.ssim:.8f}"])
        rows.append(["mean", f"{self.mean_mse:.10g}", f"{self.mean_psnr:.6f}", f"{self.mean_ssim:.8f}"])
        return rows
