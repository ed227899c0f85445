import argparse

from despeckle.common.cli_response import success_response
from despeckle.common.command_context import CommandContext
from despeckle.common.i18n_utils import t
from despeckle.common.utils import Utils
from despeckle.train.checkpoint_codec import inspect_checkpoint


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("inspect", help="print a checkpoint header without loading its parameters")
    parser.add_argument("--ckpt", dest="checkpoint", default=None, help="checkpoint path")
    parser.set_defaults(_handler=cmd_inspect)
    return parser


def cmd_inspect(ctx: CommandContext) -> int:
    path = ctx.require("checkpoint", "--ckpt")
    header = inspect_checkpoint(path)
    return success_response(t('inspect_done', path=path),
                            data={"version": header.version, "steps": header.steps,
                                  "eta_per_step": header.eta_per_step, "epoch": header.epoch,
                                  "network": header.arch.kind,
                                  "widths": ",".join(str(w) for w in header.arch.widths),
                                  "params": header.parameter_count,
                                  "optimizer_steps": header.optimizer_step,
                                  "md5": Utils.calculate_md5(path)},
                            log=False)
