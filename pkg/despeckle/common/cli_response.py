import sys
from typing import Any, Dict, List, Optional

from despeckle.common.i18n_utils import t
from despeckle.common.log_utils import LogUtils


def _format_value(value: Any) -> str:
    """
    用途：将结果字段格式化为不含空白的单个 token，保证结果行可被机器按空格切分
    """
    text: str = str(value)
    return text.replace(" ", "_").replace("\n", "\\n")


def success_response(message: str = None, data: Optional[Dict[str, Any]] = None, log: bool = True) -> int:
    """
    用途：构建并输出成功的命令结果行
    入参说明：
        - message: str, 成功提示信息，默认为"操作成功"
        - data: Dict[str, Any], 附加的 key=value 结果字段，可选
        - log: bool, 是否打印日志，默认为 True
    返回值说明：int, 退出码 0
    """
    if message is None:
        message = t('operation_success')

    tokens: List[str] = ["status=success"]
    tokens.extend(f"{key}={_format_value(value)}" for key, value in (data or {}).items())
    tokens.append(f"message={_format_value(message)}")
    print(" ".join(tokens), file=sys.stdout, flush=True)

    if log:
        LogUtils.info(message)
    return 0


def error_response(category: str, message: str, code: int = 1, log: bool = True) -> int:
    """
    用途：构建并输出失败的命令结果行（单行，可被机器解析）
    入参说明：
        - category: str, 错误类别，如 level-unreachable
        - message: str, 错误提示信息
        - code: int, 退出码，默认为 1
        - log: bool, 是否打印日志，默认为 True
    返回值说明：int, 对应的退出码
    """
    line: str = f"status=error category={category} message={_format_value(message)}"
    print(line, file=sys.stderr, flush=True)

    if log:
        LogUtils.error(t('cli_command_failed', category=category, message=message))
    return code
