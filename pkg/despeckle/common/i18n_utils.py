import importlib
import string
from typing import Any, Dict, List, Tuple

from despeckle.common.errors import ConfigError

SUPPORTED_LANGUAGES: Tuple[str, ...] = ("en", "zh")
# 其他语言缺少某个键时回退到的语言
FALLBACK_LANGUAGE: str = "en"


class _KeepMissing(dict):
    """格式化时保留未提供的占位符原样。"""

    def __missing__(self, key: str) -> str:
        return "{" + key + "}"


def _load_table(language: str) -> Dict[str, str]:
    module: Any = importlib.import_module(f"despeckle.i18n.{language}")
    return dict(getattr(module, "TRANSLATIONS", {}))


class I18nUtils:
    """
    用途：日志与错误文案的多语言表。当前语言缺少的键先回退到英文，再回退到键名本身。
    """
    LANGUAGE: str = FALLBACK_LANGUAGE

    _translations: Dict[str, str] = {}
    _fallback: Dict[str, str] = {}
    _is_initialized: bool = False

    @classmethod
    def init(cls, language: str = None) -> None:
        """
        用途：加载指定语言的文案表，已加载且未指定新语言时不做任何事
        入参说明：
            - language: 'en' 或 'zh'，为 None 时沿用当前语言
        返回值说明：无
        """
        if language:
            language = language.strip().lower()
            if language not in SUPPORTED_LANGUAGES:
                raise ConfigError(f"Unsupported language '{language}', expected one of "
                                  f"{','.join(SUPPORTED_LANGUAGES)}")
            if language != cls.LANGUAGE:
                cls.LANGUAGE = language
                cls._is_initialized = False

        if cls._is_initialized:
            return
        cls._fallback = _load_table(FALLBACK_LANGUAGE)
        cls._translations = cls._fallback if cls.LANGUAGE == FALLBACK_LANGUAGE else _load_table(cls.LANGUAGE)
        cls._is_initialized = True

    @classmethod
    def reload(cls, language: str = None) -> None:
        """用途：强制重新加载文案表，可同时切换语言"""
        cls._is_initialized = False
        cls.init(language)

    @classmethod
    def get(cls, key: str, /, default: str = None, **kwargs) -> str:
        """
        用途：取文案并用 kwargs 填充占位符；缺少的占位符原样保留，格式说明符不匹配时返回未格式化的文案
        入参说明：
            - key: 文案键
            - default: 两张表都没有该键时的返回值，默认为键名
            - kwargs: 占位符取值
        返回值说明：str
        """
        if not cls._is_initialized:
            cls.init()

        text: str = cls._translations.get(key) or cls._fallback.get(key) or (default if default is not None else key)
        if not kwargs:
            return text
        try:
            return string.Formatter().vformat(text, (), _KeepMissing(kwargs))
        except (ValueError, TypeError, IndexError):
            return text

    @classmethod
    def missing_keys(cls, language: str) -> List[str]:
        """
        用途：列出英文表中存在、指定语言表中缺失的键，用于检查翻译是否齐全
        返回值说明：List[str]: 排序后的键名
        """
        return sorted(set(_load_table(FALLBACK_LANGUAGE)) - set(_load_table(language)))


def t(key: str, /, default: str = None, **kwargs) -> str:
    """用途：I18nUtils.get 的简写"""
    return I18nUtils.get(key, default, **kwargs)
