import argparse

from despeckle.common.cli_response import success_response
from despeckle.common.command_context import CommandContext
from despeckle.common.i18n_utils import t
from despeckle.metrics.evaluation_service import EvaluationService


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("eval", help="compute MSE / PSNR / SSIM between two image directories")
    parser.add_argument("--clean", default=None, help="reference PNM directory")
    parser.add_argument("--test", default=None, help="PNM directory to evaluate")
    parser.add_argument("--out", dest="output", default=None, help="write the CSV here instead of stdout")
    parser.set_defaults(_handler=cmd_eval)
    return parser


def cmd_eval(ctx: CommandContext) -> int:
    clean_dir = ctx.require("clean", "--clean")
    test_dir = ctx.require("test", "--test")
    report = EvaluationService.evaluate_directories(clean_dir, test_dir)
    output = ctx.get("output")
    text = EvaluationService.to_csv(report, output)
    if output:
        ctx.write_manifest(output)
    else:
        print(text, end="", flush=True)
    return success_response(t('eval_done', count=len(report.rows), psnr=report.mean_psnr, ssim=report.mean_ssim),
                            data={"images": len(report.rows), "mse": report.mean_mse,
                                  "psnr": report.mean_psnr, "ssim": report.mean_ssim},
                            log=False)
