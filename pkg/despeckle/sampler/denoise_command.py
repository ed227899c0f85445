import argparse

import numpy as np

from despeckle.common.cli_response import success_response
from despeckle.common.command_context import CommandContext
from despeckle.common.errors import ConfigError
from despeckle.common.i18n_utils import t
from despeckle.common.log_utils import LogUtils
from despeckle.common.thread_pool import ThreadPoolManager
from despeckle.forward.corrupt_command import resolve_io_pairs
from despeckle.forward.random_source import RandomSource, StreamId
from despeckle.imgio.intensity_mapping import from_intensity, to_intensity
from despeckle.imgio.pnm_codec import read_pnm, write_pnm
from despeckle.sampler.sampler_models import SAMPLER_METHODS, SamplerConfig, zeta_from_ratio
from despeckle.sampler.samplers import denoise, resolve_start_step
from despeckle.schedule.noise_schedule import NoiseSchedule
from despeckle.score.base_score_model import ScoreModel
from despeckle.setting.setting_models import SamplerSettings
from despeckle.train.checkpoint_codec import load_checkpoint
from despeckle.train.trainer import restore_score_model


def add_sampler_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--method", dest="sampler.method", choices=SAMPLER_METHODS, default=None)
    parser.add_argument("--zeta", dest="sampler.zeta_ratio", type=float, default=None,
                        help="ddim noise ratio r in [0, 1]: zeta_k^2 = r * eta(k-1)")
    parser.add_argument("--stride", dest="sampler.stride", type=int, default=None, help="ddim step skipping")


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("denoise", help="remove multiplicative noise with a trained checkpoint")
    parser.add_argument("--in", dest="input", default=None, help="noisy PNM file or directory")
    parser.add_argument("--out", dest="output", default=None, help="output PNM file or directory")
    parser.add_argument("--ckpt", dest="checkpoint", default=None, help="checkpoint path")
    start = parser.add_mutually_exclusive_group()
    start.add_argument("--level", type=float, default=None, help="noise variance level")
    start.add_argument("--step", type=int, default=None, help="start step")
    parser.add_argument("--seed", dest="runtime.seed", type=int, default=None)
    add_sampler_flags(parser)
    parser.set_defaults(_handler=cmd_denoise)
    return parser


def build_sampler_config(settings: SamplerSettings, schedule: NoiseSchedule, method: str = None) -> SamplerConfig:
    method = method or settings.method
    zeta = zeta_from_ratio(schedule, settings.zeta_ratio, settings.stride) if method == "ddim" else None
    stride = settings.stride if method == "ddim" else 1
    return SamplerConfig(method=method, zeta=zeta, stride=stride)


def denoise_file(source: str, target: str, model: ScoreModel, schedule: NoiseSchedule, cfg: SamplerConfig,
                 k_start: int, rng: RandomSource) -> None:
    x_noisy = to_intensity(read_pnm(source))
    x_hat = denoise(x_noisy, model, schedule, cfg, rng, k_start=k_start)
    write_pnm(from_intensity(x_hat), target)


def cmd_denoise(ctx: CommandContext) -> int:
    config = ctx.config
    input_path = ctx.require("input", "--in")
    output_path = ctx.require("output", "--out")
    checkpoint_path = ctx.require("checkpoint", "--ckpt")
    if ctx.get("level") is None and ctx.get("step") is None:
        raise ConfigError(t('cli_missing_argument', flag="--level/--step", command=ctx.name))

    checkpoint = load_checkpoint(checkpoint_path)
    schedule = checkpoint.schedule
    k_start = resolve_start_step(schedule, ctx.get("level"), ctx.get("step"))
    cfg = build_sampler_config(config.sampler, schedule)
    model = restore_score_model(checkpoint)

    pairs = resolve_io_pairs(input_path, output_path)
    root = RandomSource(config.runtime.seed, StreamId.SAMPLER)
    LogUtils.info(t('denoise_start', count=len(pairs), method=cfg.method, k=k_start))
    ThreadPoolManager.map_ordered(lambda item: denoise_file(item[1][0], item[1][1], model, schedule, cfg,
                                                            k_start, root.child(item[0])),
                                  list(enumerate(pairs)))
    ctx.write_manifest(output_path, schedule, checkpoint_path)
    return success_response(t('denoise_done', count=len(pairs)),
                            data={"method": cfg.method, "step": k_start,
                                  "eta": float(np.asarray(schedule.eta[k_start])), "images": len(pairs),
                                  "out": output_path})
