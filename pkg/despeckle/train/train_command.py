import argparse

from despeckle.common.cli_response import success_response
from despeckle.common.command_context import CommandContext
from despeckle.common.i18n_utils import t
from despeckle.common.errors import ConfigError
from despeckle.forward.corrupt_command import add_schedule_flags
from despeckle.imgio.dataset_loader import load_dataset
from despeckle.nn.score_net import ScoreNetConfig
from despeckle.setting.setting_models import AppConfig
from despeckle.train.checkpoint_codec import save_checkpoint
from despeckle.train.train_models import TrainConfig
from despeckle.train.trainer import train


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("train", help="train a score network on a directory of PNM images")
    parser.add_argument("--data", dest="train.data_dir", default=None, help="training image directory")
    parser.add_argument("--epochs", dest="train.epochs", type=int, default=None)
    parser.add_argument("--batch", dest="train.batch_size", type=int, default=None)
    parser.add_argument("--lr", dest="train.learning_rate", type=float, default=None)
    parser.add_argument("--lr-final", dest="train.lr_final", type=float, default=None,
                        help="anneal the learning rate linearly to this value")
    parser.add_argument("--patch", dest="train.patch_size", type=int, default=None)
    parser.add_argument("--checkpoint-interval", dest="train.checkpoint_interval", type=int, default=None)
    parser.add_argument("--out", dest="train.checkpoint_path", default=None, help="checkpoint path")
    parser.add_argument("--network", dest="network.kind", choices=("unet", "mlp"), default=None)
    parser.add_argument("--widths", dest="network.widths", default=None, help="comma separated channel widths")
    parser.add_argument("--embedding-dim", dest="network.embedding_dim", type=int, default=None)
    parser.add_argument("--seed", dest="runtime.seed", type=int, default=None)
    add_schedule_flags(parser)
    parser.set_defaults(_handler=cmd_train)
    return parser


def build_train_config(config: AppConfig, channels: int = 1) -> TrainConfig:
    """
    用途说明：由全局配置构造训练配置，网络初始化种子取全局种子。
    """
    network = ScoreNetConfig(kind=config.network.kind, channels=channels, widths=list(config.network.widths),
                             embedding_dim=config.network.embedding_dim, hidden=config.network.hidden,
                             seed=config.runtime.seed)
    return TrainConfig(epochs=config.train.epochs, batch_size=config.train.batch_size,
                       learning_rate=config.train.learning_rate, lr_final=config.train.lr_final,
                       steps=config.schedule.steps, eta_per_step=config.schedule.eta_per_step,
                       seed=config.runtime.seed, patch_size=config.train.patch_size,
                       data_dir=config.train.data_dir, checkpoint_interval=config.train.checkpoint_interval,
                       checkpoint_path=config.train.checkpoint_path, network=network)


def cmd_train(ctx: CommandContext) -> int:
    config = ctx.config
    if not config.train.data_dir:
        raise ConfigError(t('cli_missing_argument', flag="--data", command=ctx.name))
    if not config.train.checkpoint_path:
        raise ConfigError(t('cli_missing_argument', flag="--out", command=ctx.name))

    # 先校验配置再读数据
    build_train_config(config).validate()
    dataset = load_dataset(config.train.data_dir, config.train.patch_size, config.runtime.seed)
    train_config = build_train_config(config, channels=dataset.channels)
    checkpoint = train(train_config, dataset)
    save_checkpoint(checkpoint, train_config.checkpoint_path)
    ctx.write_manifest(train_config.checkpoint_path, checkpoint.schedule, train_config.checkpoint_path)
    return success_response(t('train_done', path=train_config.checkpoint_path),
                            data={"epochs": checkpoint.epoch, "params": checkpoint.parameter_count,
                                  "optimizer_steps": checkpoint.optimizer.step,
                                  "out": train_config.checkpoint_path})
