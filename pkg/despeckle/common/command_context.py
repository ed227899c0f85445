import argparse
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from despeckle.common.errors import ConfigError
from despeckle.common.i18n_utils import t
from despeckle.common.log_utils import LogUtils
from despeckle.common.utils import Utils
from despeckle.model.run_manifest import RunManifest
from despeckle.schedule.noise_schedule import NoiseSchedule
from despeckle.setting.setting_models import AppConfig
from despeckle.setting.setting_service import SettingService


@dataclass
class CommandContext:
    """
    用途：子命令执行上下文：解析后的配置、命令自身参数与清单记录。
    入参说明：
        name (str): 子命令名。
        settings (SettingService): 已合并命令行参数的配置服务。
        command_args (Dict[str, Any]): 命令自身参数（不属于任何配置节），已用清单中的值补齐。
    """
    name: str
    settings: SettingService
    command_args: Dict[str, Any] = field(default_factory=dict)

    @property
    def config(self) -> AppConfig:
        return self.settings.get_config()

    def get(self, dest: str, default: Any = None) -> Any:
        value = self.command_args.get(dest)
        return default if value is None else value

    def require(self, dest: str, flag: str) -> Any:
        """用途说明：读取必需的命令参数，缺失时抛出 config 错误并写明参数名。"""
        value = self.command_args.get(dest)
        if value is None:
            raise ConfigError(t('cli_missing_argument', flag=flag, command=self.name))
        return value

    def write_manifest(self, output_path: str, schedule: Optional[NoiseSchedule] = None,
                       checkpoint_path: str = "") -> str:
        """
        用途说明：在输出旁写出 <output>.manifest。
        返回值说明：str: 清单路径。
        """
        manifest = RunManifest(
            subcommand=self.name,
            config_items=SettingService.to_key_values(self.config),
            command_args=dict(self.command_args),
            schedule_summary=schedule.summary() if schedule is not None else {},
            checkpoint_id=Utils.calculate_md5(checkpoint_path) if checkpoint_path else "",
        )
        path = f"{output_path.rstrip('/').rstrip(os.sep)}.manifest"
        manifest.write(path)
        LogUtils.debug(t('cli_manifest_written', path=path))
        return path


def split_namespace(args: argparse.Namespace) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    """
    用途说明：把 argparse 结果拆为配置覆盖项（dest 形如 section.field）与命令自身参数。
    以下划线开头的内部键与 config 路径不计入。
    """
    overrides: Dict[str, Any] = {}
    command_args: Dict[str, Any] = {}
    for key, value in vars(args).items():
        if key.startswith("_") or key in ("config", "command"):
            continue
        if "." in key:
            overrides[key] = value
        else:
            command_args[key] = value
    return overrides, command_args


def replay_command_args(command_args: Dict[str, Any], recorded: Dict[str, str],
                        types: Dict[str, Any]) -> Dict[str, Any]:
    """
    用途说明：用配置文件（清单）中的 command.* 值补齐未在命令行给出的参数，命令行优先。
    """
    merged = dict(command_args)
    for key, raw in recorded.items():
        if key not in merged or merged[key] is not None:
            continue
        converter = types.get(key) or str
        try:
            merged[key] = converter(raw)
        except (TypeError, ValueError):
            raise ConfigError(t('config_bad_value', key=f"command.{key}", value=raw)) from None
    return merged


def parse_float_list(text: str) -> List[float]:
    return [float(v) for v in str(text).split(",") if v.strip()]


def parse_str_list(text: str) -> List[str]:
    return [v.strip() for v in str(text).split(",") if v.strip()]
