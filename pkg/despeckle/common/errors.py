from typing import Optional


class DespeckleError(Exception):
    """
    用途说明：项目统一异常基类，携带稳定的机器可读错误类别，命令行层据此输出单行错误。
    入参说明：
        message (str): 已翻译的错误描述。
        category (str): 错误类别，子类各自固定。
    """
    category: str = "internal"

    def __init__(self, message: str, category: Optional[str] = None) -> None:
        super().__init__(message)
        self.message: str = message
        if category:
            self.category = category


class InvalidArgumentError(DespeckleError, ValueError):
    category = "invalid-argument"


class StepIndexError(DespeckleError, IndexError):
    category = "index"


class LevelUnreachableError(DespeckleError, ValueError):
    category = "level-unreachable"


class DomainError(DespeckleError, ValueError):
    category = "domain"


class DegenerateKernelError(DespeckleError, ZeroDivisionError):
    category = "degenerate-kernel"


class ShapeError(DespeckleError, ValueError):
    category = "shape"


class ContractError(DespeckleError):
    category = "contract"


class ConfigError(DespeckleError):
    category = "config"


class NonFiniteLossError(DespeckleError, FloatingPointError):
    category = "non-finite-loss"


class UnsupportedVersionError(DespeckleError):
    category = "unsupported-version"


class UnsupportedFormatError(DespeckleError):
    category = "unsupported-format"


class PropertyFailureError(DespeckleError):
    category = "property-failure"


class CorruptCheckpointError(DespeckleError):
    """
    用途说明：检查点文件截断或结构损坏，offset 为出错时的字节偏移。
    """
    category = "corrupt-checkpoint"

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(message)
        self.offset: int = offset


class ParseError(DespeckleError):
    """
    用途说明：PNM 图像解析失败，offset 为出错时的字节偏移。
    """
    category = "parse"

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(message)
        self.offset: int = offset
