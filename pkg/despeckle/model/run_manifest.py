from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Tuple

from config import GlobalConfig
from despeckle.common.utils import Utils


@dataclass
class RunManifest:
    """
    用途：一次命令运行的记录，写为 key=value 文本，可直接作为配置文件回放。
    入参说明：
        subcommand (str): 子命令名。
        config_items (List[Tuple[str, str]]): 解析后的全部配置项。
        command_args (Dict[str, Any]): 命令自身的参数（输入输出路径、噪声水平等），回放时作为参数默认值。
        schedule_summary (Dict[str, Any]): K、eta_per_step 等日程摘要。
        checkpoint_id (str): 使用或产出的检查点 MD5，无则为空。
    """
    subcommand: str
    config_items: List[Tuple[str, str]] = field(default_factory=list)
    command_args: Dict[str, Any] = field(default_factory=dict)
    schedule_summary: Dict[str, Any] = field(default_factory=dict)
    checkpoint_id: str = ""
    started: str = field(default_factory=lambda: datetime.now().isoformat(timespec="seconds"))
    finished: str = ""

    def items(self) -> List[Tuple[str, object]]:
        result: List[Tuple[str, object]] = [
            ("manifest.subcommand", self.subcommand),
            ("manifest.version", GlobalConfig.APP_VERSION),
            ("manifest.started", self.started),
            ("manifest.finished", self.finished),
            ("manifest.checkpoint_id", self.checkpoint_id),
        ]
        result.extend((f"manifest.schedule_{key}", value) for key, value in self.schedule_summary.items())
        result.extend((f"command.{key}", value) for key, value in self.command_args.items() if value is not None)
        result.extend(self.config_items)
        return result

    def write(self, path: str) -> None:
        """用途说明：记录结束时间并写出清单文件。"""
        self.finished = datetime.now().isoformat(timespec="seconds")
        Utils.write_key_values(path, self.items())
