import csv
import io
import os
from typing import Dict, List, Optional

import numpy as np

from despeckle.common.errors import ContractError
from despeckle.common.i18n_utils import t
from despeckle.common.log_utils import LogUtils
from despeckle.common.thread_pool import ThreadPoolManager
from despeckle.imgio.dataset_loader import load_images
from despeckle.metrics.quality_metrics import mse, psnr, ssim
from despeckle.model.metric_report import ImageMetrics, MetricReport


class EvaluationService:
    """
    用途：按文件名配对两个目录中的图像并逐张计算 MSE / PSNR / SSIM。
    """

    @staticmethod
    def compare(name: str, clean: np.ndarray, test: np.ndarray) -> ImageMetrics:
        return ImageMetrics(name=name, mse=mse(clean, test), psnr=psnr(clean, test), ssim=ssim(clean, test))

    @staticmethod
    def evaluate_images(clean: Dict[str, np.ndarray], test: Dict[str, np.ndarray]) -> MetricReport:
        """
        用途说明：两组图像名必须一一对应，否则抛出 contract 错误并列出未匹配的名字。
        入参说明：
            clean (Dict[str, np.ndarray]): 名字 -> 干净强度图。
            test (Dict[str, np.ndarray]): 名字 -> 待评估强度图。
        返回值说明：MetricReport: 按名字排序的逐图像指标。
        """
        unmatched = sorted(set(clean) ^ set(test))
        if unmatched:
            raise ContractError(t('eval_unmatched_names', names=",".join(unmatched)))
        names: List[str] = sorted(clean)
        rows = ThreadPoolManager.map_ordered(lambda name: EvaluationService.compare(name, clean[name], test[name]),
                                             names)
        return MetricReport(rows=rows)

    @staticmethod
    def evaluate_directories(clean_dir: str, test_dir: str) -> MetricReport:
        report = EvaluationService.evaluate_images(load_images(clean_dir), load_images(test_dir))
        LogUtils.info(t('eval_done', count=len(report.rows), psnr=report.mean_psnr, ssim=report.mean_ssim))
        return report

    @staticmethod
    def to_csv(report: MetricReport, path: Optional[str] = None) -> str:
        """
        用途说明：把报告编码为逗号分隔文本；给出 path 时同时写入文件。
        """
        buffer = io.StringIO()
        csv.writer(buffer, lineterminator="\n").writerows(report.csv_rows())
        text = buffer.getvalue()
        if path:
            os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(text)
        return text
