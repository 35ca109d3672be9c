"""
命令行入口
Author: ICO
Date: 2024-04-02"""

import argparse
import sys

from loguru import logger

from defaultCONFIG import Ablation
from error import CalculationError, CheckpointError, ConfigError, DataFormatError, NumericalFailure, ShapeError

from .commands import cmd_evaluate, cmd_flops, cmd_forecast, cmd_generate_data, cmd_gradcheck, cmd_train

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
DEFAULT_LEVELS = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="obsforecast", description="observability time-series forecasting and evaluation")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default="INFO", choices=["TRACE", "DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--seed", type=int, default=None, help="overrides the config file and TOTOKIT_SEED")
    common.add_argument("--config", default=None, help="YAML run configuration")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-data", parents=[common], help="write a synthetic dataset")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_generate_data)

    p = sub.add_parser("train", parents=[common], help="train a model checkpoint")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ablation", default=Ablation.NONE.value, choices=[a.value for a in Ablation])
    p.add_argument("--steps", type=int, default=None, help="total steps, schedule phases keep their proportions")
    p.add_argument("--impute", action="store_true", help="fill missing values by metric type")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("forecast", parents=[common], help="sample forecasts from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--quantiles", default=DEFAULT_LEVELS)
    p.add_argument("--windows", default="tail", choices=["tail", "eval"])
    p.add_argument("--impute", action="store_true")
    p.set_defaults(handler=cmd_forecast)

    p = sub.add_parser("evaluate", parents=[common], help="run the benchmark protocol")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--checkpoint", action="append", help="may be given several times")
    p.add_argument("--forecasts", action="append", help="forecasts.csv, may be given several times")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--impute", action="store_true")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("gradcheck", parents=[common], help="finite-difference check of all gradients")
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.add_argument("--coords", type=int, default=4, help="coordinates checked per parameter")
    p.set_defaults(handler=cmd_gradcheck)

    p = sub.add_parser("flops", parents=[common], help="attention cost of factorized and full attention")
    p.add_argument("--variates", type=int, required=True)
    p.add_argument("--patches", type=int, required=True)
    p.add_argument("--embed-dim", type=int, default=32)
    p.add_argument("--heads", type=int, default=1)
    p.add_argument("--patch-size", type=int, default=1)
    p.add_argument("--ratio", type=int, default=1)
    p.add_argument("--layers", type=int, default=None, help="default: one segment")
    p.add_argument("--measure", action="store_true", help="also count multiply-adds of an instrumented forward pass")
    p.set_defaults(handler=cmd_flops)
    return parser


# end def
def configure_logging(level: str) -> None:
    logger.remove()
    logger.add(sys.stderr, level=level)


# end def
def main(argv: list[str] | None = None) -> int:
    """解析参数并执行子命令，返回进程退出码

    0 成功；2 输入或配置错误 (含用法错误)；3 数值错误或梯度检查不通过
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except NumericalFailure as exc:
        logger.error(str(exc))
        where = exc.last_checkpoint if exc.last_checkpoint is not None else "none"
        print(f"error: {exc}\nlast checkpoint: {where}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CalculationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, DataFormatError, CheckpointError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


# end def
if __name__ == "__main__":
    sys.exit(main())
# end main
