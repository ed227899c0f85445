"""
采样器对比实验：每张干净图像在每个噪声水平下加噪，再用每种采样方法去噪，汇总 PSNR / SSIM。
"""
import argparse
import csv
import io
import os
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from despeckle.common.cli_response import success_response
from despeckle.common.command_context import CommandContext, parse_float_list, parse_str_list
from despeckle.common.errors import InvalidArgumentError
from despeckle.common.i18n_utils import t
from despeckle.common.log_utils import LogUtils
from despeckle.common.thread_pool import ThreadPoolManager
from despeckle.forward.forward_process import corrupt_intensity
from despeckle.forward.random_source import RandomSource, StreamId
from despeckle.imgio.dataset_loader import load_images
from despeckle.metrics.quality_metrics import psnr, ssim
from despeckle.sampler.denoise_command import build_sampler_config
from despeckle.sampler.sampler_models import SAMPLER_METHODS
from despeckle.sampler.samplers import denoise
from despeckle.schedule.noise_schedule import NoiseSchedule, step_for_noise_level
from despeckle.score.base_score_model import ScoreModel
from despeckle.setting.setting_models import SamplerSettings
from despeckle.train.checkpoint_codec import load_checkpoint
from despeckle.train.trainer import restore_score_model

DEFAULT_LEVELS = "0.04,0.08,0.12"


@dataclass
class BenchmarkRow:
    level: float
    method: str
    psnr_noisy: float
    psnr: float
    ssim_noisy: float
    ssim: float


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("benchmark", help="compare samplers across noise levels")
    parser.add_argument("--clean", default=None, help="clean PNM directory")
    parser.add_argument("--ckpt", dest="checkpoint", default=None, help="checkpoint path")
    parser.add_argument("--levels", default=None, help=f"comma separated levels (default {DEFAULT_LEVELS})")
    parser.add_argument("--methods", default=None, help="comma separated methods (default all)")
    parser.add_argument("--out", dest="output", default=None, help="write the table to this CSV file")
    parser.add_argument("--seed", dest="runtime.seed", type=int, default=None)
    parser.add_argument("--zeta", dest="sampler.zeta_ratio", type=float, default=None)
    parser.add_argument("--stride", dest="sampler.stride", type=int, default=None)
    parser.set_defaults(_handler=cmd_benchmark)
    return parser


def run_benchmark(clean: Dict[str, np.ndarray], model: ScoreModel, schedule: NoiseSchedule,
                  levels: Sequence[float], methods: Sequence[str], sampler: SamplerSettings,
                  seed: int) -> List[BenchmarkRow]:
    """
    用途说明：对每个 (水平, 方法) 计算所有图像的平均指标。
    同一水平下各方法使用同一组加噪图像；图像 i 的加噪与采样随机流只依赖 (水平序号, i)。
    入参说明：
        clean (Dict[str, np.ndarray]): 名字 -> [C, H, W] 干净强度图。
        levels (Sequence[float]): 噪声方差。
        methods (Sequence[str]): 采样方法。
    返回值说明：List[BenchmarkRow]
    """
    names = sorted(clean)
    corrupt_root = RandomSource(seed, StreamId.BENCHMARK)
    sampler_root = RandomSource(seed, StreamId.SAMPLER)
    rows: List[BenchmarkRow] = []
    for level_index, level in enumerate(levels):
        k = step_for_noise_level(schedule, level)
        level_rng = corrupt_root.child(level_index)
        noisy = [corrupt_intensity(clean[name], k, schedule, level_rng.child(i))[0] for i, name in enumerate(names)]
        psnr_noisy = float(np.mean([psnr(clean[n], np.clip(x, 0.0, 1.0)) for n, x in zip(names, noisy)]))
        ssim_noisy = float(np.mean([ssim(clean[n], np.clip(x, 0.0, 1.0)) for n, x in zip(names, noisy)]))

        for method in methods:
            cfg = build_sampler_config(sampler, schedule, method)
            method_rng = sampler_root.child(level_index)
            outputs = ThreadPoolManager.map_ordered(
                lambda item: np.clip(denoise(item[1], model, schedule, cfg, method_rng.child(item[0]), k_start=k),
                                     0.0, 1.0),
                list(enumerate(noisy)))
            row = BenchmarkRow(level=level, method=method, psnr_noisy=psnr_noisy,
                               psnr=float(np.mean([psnr(clean[n], x) for n, x in zip(names, outputs)])),
                               ssim_noisy=ssim_noisy,
                               ssim=float(np.mean([ssim(clean[n], x) for n, x in zip(names, outputs)])))
            LogUtils.progress(t('benchmark_row', level=level, method=method, psnr=row.psnr, ssim=row.ssim))
            rows.append(row)
    return rows


def sampler_ordering(rows: Sequence[BenchmarkRow], level: float) -> str:
    """用途说明：某噪声水平下按 PSNR 从高到低的方法顺序，例如 ode>ddim>stochastic。"""
    ranked = sorted((r for r in rows if r.level == level), key=lambda r: -r.psnr)
    return ">".join(r.method for r in ranked)


def to_csv(rows: Sequence[BenchmarkRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["level", "method", "psnr_noisy", "psnr", "ssim_noisy", "ssim"])
    for r in rows:
        writer.writerow([repr(r.level), r.method, f"{r.psnr_noisy:.6f}", f"{r.psnr:.6f}",
                         f"{r.ssim_noisy:.8f}", f"{r.ssim:.8f}"])
    return buffer.getvalue()


def cmd_benchmark(ctx: CommandContext) -> int:
    config = ctx.config
    clean_dir = ctx.require("clean", "--clean")
    checkpoint_path = ctx.require("checkpoint", "--ckpt")
    levels = parse_float_list(ctx.get("levels", DEFAULT_LEVELS))
    methods = parse_str_list(ctx.get("methods", ",".join(SAMPLER_METHODS)))
    unknown = [m for m in methods if m not in SAMPLER_METHODS]
    if unknown or not methods or not levels:
        raise InvalidArgumentError(t('sampler_unknown_method', method=",".join(unknown),
                                     choices=",".join(SAMPLER_METHODS)))

    checkpoint = load_checkpoint(checkpoint_path)
    model = restore_score_model(checkpoint)
    clean = load_images(clean_dir)
    rows = run_benchmark(clean, model, checkpoint.schedule, levels, methods, config.sampler, config.runtime.seed)

    text = to_csv(rows)
    output = ctx.get("output")
    if output:
        os.makedirs(os.path.dirname(os.path.abspath(output)), exist_ok=True)
        with open(output, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        ctx.write_manifest(output, checkpoint.schedule, checkpoint_path)
    else:
        print(text, end="", flush=True)
    orderings = {f"order_{level}": sampler_ordering(rows, level) for level in levels}
    return success_response(t('benchmark_done', rows=len(rows)), data={"images": len(clean), **orderings})
