import argparse
import traceback
from typing import Any, Callable, Dict, List, Optional

from config import GlobalConfig
from despeckle.common.cli_response import error_response
from despeckle.common.command_context import CommandContext, replay_command_args, split_namespace
from despeckle.common.errors import DespeckleError
from despeckle.common.i18n_utils import I18nUtils, t
from despeckle.common.log_utils import LogUtils
from despeckle.common.thread_pool import ThreadPoolManager
from despeckle.forward import corrupt_command
from despeckle.metrics import eval_command
from despeckle.sampler import benchmark_command, denoise_command
from despeckle.setting.setting_service import SettingService
from despeckle.train import inspect_command, train_command
from despeckle.verify import verify_command

# 子命令注册顺序即帮助信息中的顺序
COMMAND_MODULES = (corrupt_command, train_command, denoise_command, eval_command, verify_command,
                   benchmark_command, inspect_command)


def build_parser() -> argparse.ArgumentParser:
    """
    用途说明：构建命令行解析器，每个子命令模块通过 register 挂载自己的参数与处理函数。
    返回值说明：argparse.ArgumentParser
    """
    parser = argparse.ArgumentParser(prog="despeckle",
                                     description="Score-based removal of multiplicative (speckle) noise.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {GlobalConfig.APP_VERSION}")
    parser.add_argument("--config", default=None,
                        help="section.field=value settings file; a run manifest replays that run")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for module in COMMAND_MODULES:
        sub = module.register(subparsers)
        sub.set_defaults(_parser=sub)
    return parser


def _argument_types(parser: argparse.ArgumentParser) -> Dict[str, Any]:
    return {action.dest: action.type for action in parser._actions if action.type is not None}


def _run(args: argparse.Namespace) -> int:
    settings = SettingService(args.config)
    overrides, command_args = split_namespace(args)
    settings.apply_overrides(overrides)
    command_args = replay_command_args(command_args, settings.command_values, _argument_types(args._parser))

    runtime = settings.get_config().runtime
    I18nUtils.reload(language=runtime.language)
    LogUtils.init(log_dir=runtime.log_dir)
    LogUtils.set_level(runtime.log_level)
    ThreadPoolManager.configure(runtime.workers)

    handler: Callable[[CommandContext], int] = args._handler
    LogUtils.debug(t('cli_command_start', command=args.command))
    return handler(CommandContext(name=args.command, settings=settings, command_args=command_args))


def main(argv: Optional[List[str]] = None) -> int:
    """
    用途说明：命令行主入口。模块错误输出单行 status=error 并返回 1；未知异常记录堆栈后按 internal 返回 1；
    参数用法错误由 argparse 处理，返回 2。
    入参说明：argv (List[str], optional): 命令行参数，默认读取 sys.argv。
    返回值说明：int: 进程退出码。
    """
    I18nUtils.init()
    LogUtils.init()
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        return _run(args)
    except DespeckleError as e:
        return error_response(e.category, e.message)
    except Exception as e:
        LogUtils.error(t('sys_unhandled_exception', command=args.command, stack=traceback.format_exc()))
        return error_response("internal", t('internal_error', error=str(e)))
    finally:
        ThreadPoolManager.shutdown()
