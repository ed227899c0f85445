import argparse

from despeckle.common.cli_response import success_response
from despeckle.common.command_context import CommandContext
from despeckle.common.errors import PropertyFailureError
from despeckle.common.i18n_utils import t
from despeckle.verify.verify_service import FAULTS, VerifyService


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("verify", help="run the built-in property checks")
    parser.add_argument("--seed", dest="runtime.seed", type=int, default=None)
    parser.add_argument("--samples", type=int, default=None, help="Monte Carlo sample count (default 100000)")
    # 负对照开关，不在帮助中显示
    parser.add_argument("--inject-fault", dest="inject_fault", choices=FAULTS, default=None,
                        help=argparse.SUPPRESS)
    parser.set_defaults(_handler=cmd_verify)
    return parser


def cmd_verify(ctx: CommandContext) -> int:
    """
    用途说明：全部属性通过时退出码为 0，否则以 property-failure 报告第一个失败项及其测量值。
    """
    service = VerifyService(seed=ctx.config.runtime.seed, samples=int(ctx.get("samples", 100_000)),
                            inject_fault=ctx.get("inject_fault"))
    results = service.run_all()
    failed = [r for r in results if not r.passed]
    if failed:
        first = failed[0]
        raise PropertyFailureError(t('verify_failed', name=first.name, measured=first.measured,
                                     threshold=first.threshold, count=len(failed)))
    return success_response(t('verify_passed', count=len(results)),
                            data={r.name: f"{r.measured:.3g}" for r in results})
