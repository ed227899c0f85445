import argparse
import os
from typing import List, Tuple

from despeckle.common.cli_response import success_response
from despeckle.common.command_context import CommandContext
from despeckle.common.errors import ConfigError
from despeckle.common.i18n_utils import t
from despeckle.common.log_utils import LogUtils
from despeckle.common.thread_pool import ThreadPoolManager
from despeckle.common.utils import Utils
from despeckle.forward.forward_process import corrupt_intensity
from despeckle.forward.random_source import RandomSource, StreamId
from despeckle.imgio.intensity_mapping import from_intensity, to_intensity
from despeckle.imgio.pnm_codec import read_pnm, write_pnm
from despeckle.schedule.noise_schedule import NoiseSchedule, build_linear_schedule, step_for_noise_level


def add_schedule_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--steps", dest="schedule.steps", type=int, default=None, help="total diffusion steps K")
    parser.add_argument("--eta-per-step", dest="schedule.eta_per_step", type=float, default=None,
                        help="variance increment per step")


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("corrupt", help="apply multiplicative noise to PNM images")
    parser.add_argument("--in", dest="input", default=None, help="input PNM file or directory")
    parser.add_argument("--out", dest="output", default=None, help="output PNM file or directory")
    start = parser.add_mutually_exclusive_group()
    start.add_argument("--level", type=float, default=None, help="noise variance level")
    start.add_argument("--step", type=int, default=None, help="diffusion step index")
    parser.add_argument("--seed", dest="runtime.seed", type=int, default=None)
    add_schedule_flags(parser)
    parser.set_defaults(_handler=cmd_corrupt)
    return parser


def resolve_io_pairs(input_path: str, output_path: str) -> List[Tuple[str, str]]:
    """
    用途说明：单文件输入对应单文件输出；目录输入时按文件名字典序逐个写到输出目录，文件名不变。
    """
    if os.path.isdir(input_path):
        files = Utils.list_pnm_files(input_path)
        if not files:
            raise ConfigError(t('dataset_empty_dir', path=input_path))
        return [(path, os.path.join(output_path, os.path.basename(path))) for path in files]
    if not os.path.isfile(input_path):
        raise ConfigError(t('cli_input_not_found', path=input_path))
    return [(input_path, output_path)]


def corrupt_file(source: str, target: str, k: int, schedule: NoiseSchedule, rng: RandomSource, seed: int) -> None:
    """
    用途说明：加噪单个文件，并写出 <target>.txt 记录 (k, η(k), seed)。
    """
    x0 = to_intensity(read_pnm(source))
    x_k, _ = corrupt_intensity(x0, k, schedule, rng)
    write_pnm(from_intensity(x_k), target)
    Utils.write_key_values(f"{target}.txt", [("step", k), ("eta", repr(schedule.eta_at(k))), ("seed", seed)])


def cmd_corrupt(ctx: CommandContext) -> int:
    config = ctx.config
    input_path = ctx.require("input", "--in")
    output_path = ctx.require("output", "--out")
    schedule = build_linear_schedule(config.schedule.steps, config.schedule.eta_per_step)
    if ctx.get("step") is not None:
        k = int(ctx.get("step"))
        schedule.check_step(k)
    elif ctx.get("level") is not None:
        k = step_for_noise_level(schedule, float(ctx.get("level")))
    else:
        raise ConfigError(t('cli_missing_argument', flag="--level/--step", command=ctx.name))

    pairs = resolve_io_pairs(input_path, output_path)
    seed = config.runtime.seed
    root = RandomSource(seed, StreamId.CORRUPT)
    LogUtils.info(t('corrupt_start', count=len(pairs), k=k, eta=schedule.eta_at(k)))
    ThreadPoolManager.map_ordered(lambda item: corrupt_file(item[1][0], item[1][1], k, schedule,
                                                            root.child(item[0]), seed),
                                  list(enumerate(pairs)))
    ctx.write_manifest(output_path, schedule)
    return success_response(t('corrupt_done', count=len(pairs)),
                            data={"step": k, "eta": schedule.eta_at(k), "images": len(pairs), "out": output_path})
