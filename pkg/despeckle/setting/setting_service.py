import os
import typing
from dataclasses import fields
from typing import Any, Dict, List, Mapping, Optional, Tuple

from config import GlobalConfig
from despeckle.common.errors import ConfigError
from despeckle.common.i18n_utils import t
from despeckle.common.log_utils import LogUtils
from despeckle.common.utils import Utils
from despeckle.setting.setting_models import AppConfig

# 运行清单中记录命令参数的节名，作为配置文件回放时的参数默认值
COMMAND_SECTION: str = "command"


def _parse_value(raw: Any, field_type: Any, key: str) -> Any:
    """
    用途：按数据类字段类型转换配置值；列表用逗号分隔，Optional 接受空串/none。
    """
    origin = typing.get_origin(field_type)
    args = typing.get_args(field_type)
    if origin is typing.Union and type(None) in args:
        if raw is None or (isinstance(raw, str) and raw.strip().lower() in ("", "none", "null")):
            return None
        inner = next(a for a in args if a is not type(None))
        return _parse_value(raw, inner, key)
    try:
        if origin in (list, List):
            items = raw if isinstance(raw, (list, tuple)) else [v for v in str(raw).split(",") if v.strip()]
            return [_parse_value(v, args[0] if args else str, key) for v in items]
        if field_type is bool:
            if isinstance(raw, bool):
                return raw
            text = str(raw).strip().lower()
            if text not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return text in ("true", "1", "yes")
        if field_type is int:
            if isinstance(raw, float) and not raw.is_integer():
                raise ValueError(raw)
            return int(str(raw).strip()) if isinstance(raw, str) else int(raw)
        if field_type is float:
            return float(str(raw).strip()) if isinstance(raw, str) else float(raw)
        return str(raw).strip() if isinstance(raw, str) else str(raw)
    except (TypeError, ValueError):
        raise ConfigError(t('config_bad_value', key=key, value=raw)) from None


def _format_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


class SettingService:
    """
    用途：配置服务类，按优先级合并配置：命令行参数 > 环境变量 > 配置文件 > 内置默认值。
    入参说明：
        config_path (str, optional): 行式 section.field=value 配置文件（运行清单同样可用）。
        environ (Mapping[str, str], optional): 环境变量表，默认 os.environ；键形如 GBMD_RUNTIME__SEED。
    """

    def __init__(self, config_path: Optional[str] = None, environ: Optional[Mapping[str, str]] = None) -> None:
        self._config: AppConfig = AppConfig()
        self.config_path: Optional[str] = config_path
        self.environ: Mapping[str, str] = os.environ if environ is None else environ
        # 配置文件中 command.* 的原始值，供命令层回放参数
        self.command_values: Dict[str, str] = {}
        self._hints: Dict[str, Dict[str, Any]] = {
            f.name: typing.get_type_hints(type(getattr(self._config, f.name))) for f in fields(AppConfig)
        }

        if config_path:
            self._load_file(config_path)
        self._load_environ()

    def get_config(self) -> AppConfig:
        """
        用途：获取当前的配置对象。
        返回值：AppConfig 实例。
        """
        return self._config

    def set_value(self, key: str, raw: Any, source: str = "flag") -> bool:
        """
        用途：设置单个 section.field 配置项。
        入参：key: 点分键名；raw: 原始值；source: 来源，用于日志。
        返回值：键是否被识别。
        """
        section, _, name = key.partition(".")
        hints = self._hints.get(section)
        if hints is None or name not in hints:
            LogUtils.debug(t('config_unknown_key', key=key, source=source))
            return False
        setattr(getattr(self._config, section), name, _parse_value(raw, hints[name], key))
        return True

    def apply_overrides(self, overrides: Dict[str, Any]) -> AppConfig:
        """
        用途：应用命令行参数（值为 None 的项视为未给出）。
        """
        for key, value in overrides.items():
            if value is not None:
                self.set_value(key, value, source="flag")
        return self._config

    def _load_file(self, path: str) -> None:
        if not os.path.isfile(path):
            raise ConfigError(t('config_file_not_found', path=path))
        for key, value in Utils.read_key_values(path).items():
            if key.startswith(COMMAND_SECTION + "."):
                self.command_values[key[len(COMMAND_SECTION) + 1:]] = value
                continue
            self.set_value(key, value, source=path)
        LogUtils.debug(t('config_file_loaded', path=path))

    def _load_environ(self) -> None:
        prefix = GlobalConfig.ENV_PREFIX
        for env_key in sorted(self.environ):
            if not env_key.startswith(prefix):
                continue
            section, sep, name = env_key[len(prefix):].partition("__")
            if not sep:
                LogUtils.debug(t('config_unknown_key', key=env_key, source="env"))
                continue
            self.set_value(f"{section.lower()}.{name.lower()}", self.environ[env_key], source="env")

    @staticmethod
    def to_key_values(config: AppConfig) -> List[Tuple[str, str]]:
        """
        用途：把配置展平为有序的 section.field=value 列表，用于运行清单。
        """
        items: List[Tuple[str, str]] = []
        for section_field in fields(AppConfig):
            section = getattr(config, section_field.name)
            for f in fields(section):
                items.append((f"{section_field.name}.{f.name}", _format_value(getattr(section, f.name))))
        return items
