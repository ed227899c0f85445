import logging
import os
import sys
from datetime import datetime
from typing import Optional, Union

# 自定义等级：PROGRESS 设为 25，位于 INFO(20) 和 WARNING(30) 之间，专门记录训练/采样进度
LOG_LEVEL_PROGRESS: int = 25
logging.addLevelName(LOG_LEVEL_PROGRESS, "PROGRESS")


class LogUtils:
    """
    用途说明：统一日志工具类，提供 DEBUG, INFO, PROGRESS, ERROR 四种等级。
    不暴露 WARNING 等级；终端输出走 stderr，stdout 留给命令结果行。
    """
    _logger: Optional[logging.Logger] = None
    _log_dir: str = ""
    _current_log_date: str = ""
    _file_handler: Optional[logging.FileHandler] = None
    _formatter: logging.Formatter = logging.Formatter(
        fmt='%(asctime)s:%(msecs)03d - %(levelname)s - %(message)s',
        datefmt='%Y/%m/%d-%H:%M:%S'
    )

    @staticmethod
    def get_log_filename(date_str: str) -> str:
        """
        用途说明：根据日期字符串生成日志文件名。
        入参说明：date_str (str): %Y%m%d 格式的日期字符串。
        返回值说明：str: 生成的日志文件名（例如 "20231027.log"）。
        """
        return f"{date_str}.log"

    @classmethod
    def _close_file_handler(cls) -> None:
        if cls._file_handler and cls._logger:
            cls._logger.removeHandler(cls._file_handler)
            cls._file_handler.close()
        cls._file_handler = None
        cls._current_log_date = ""

    @classmethod
    def _setup_file_handler(cls) -> None:
        """
        用途说明：在配置了日志目录时生成按日期命名的 file_handler，并记录当前日期；目录为空时关闭文件输出。
        """
        cls._close_file_handler()
        if cls._logger is None or not cls._log_dir:
            return

        os.makedirs(cls._log_dir, exist_ok=True)
        now_date: str = datetime.now().strftime('%Y%m%d')
        log_path: str = os.path.join(cls._log_dir, cls.get_log_filename(now_date))

        cls._file_handler = logging.FileHandler(log_path, encoding='utf-8')
        cls._file_handler.setFormatter(cls._formatter)
        cls._logger.addHandler(cls._file_handler)
        cls._current_log_date = now_date

    @classmethod
    def _check_and_rotate(cls) -> None:
        """
        用途说明：检查当前日期，如果与记录的日期不符，则重新生成 file_handler。
        """
        if not cls._log_dir:
            return
        now_date: str = datetime.now().strftime('%Y%m%d')
        if now_date != cls._current_log_date:
            cls._setup_file_handler()

    @classmethod
    def init(cls, level: Union[int, str] = logging.INFO, log_dir: str = "") -> None:
        """
        用途说明：初始化日志配置，可重复调用以调整级别或日志目录。
        入参说明：
            level (int | str): 日志级别或级别名。
            log_dir (str): 日志文件目录，为空则只输出到终端。
        """
        if cls._logger is None:
            cls._logger = logging.getLogger("despeckle")
            cls._logger.propagate = False

            # 终端输出初始化
            console_handler: logging.StreamHandler = logging.StreamHandler(sys.stderr)
            console_handler.setFormatter(cls._formatter)
            cls._logger.addHandler(console_handler)

        cls.set_level(level)
        if log_dir != cls._log_dir:
            cls._log_dir = log_dir
            cls._setup_file_handler()

    @classmethod
    def set_level(cls, level: Union[int, str]) -> None:
        """
        用途说明：动态调整日志显示级别，可传数值或名称（DEBUG / INFO / PROGRESS / ERROR，大小写不敏感）。
        未知名称保持原级别。
        """
        if cls._logger is None:
            cls.init()
            if cls._logger is None:
                return
        if isinstance(level, str):
            level = logging.getLevelName(level.strip().upper())
        if isinstance(level, int):
            cls._logger.setLevel(level)

    @classmethod
    def info(cls, message: str) -> None:
        """用途说明：打印 INFO 级别日志。"""
        cls._check_and_rotate()
        if cls._logger: cls._logger.info(message)

    @classmethod
    def debug(cls, message: str) -> None:
        """用途说明：打印 DEBUG 级别日志。"""
        cls._check_and_rotate()
        if cls._logger: cls._logger.debug(message)

    @classmethod
    def progress(cls, message: str) -> None:
        """用途说明：打印 PROGRESS 级别日志（自定义等级 25）。"""
        cls._check_and_rotate()
        if cls._logger:
            cls._logger.log(LOG_LEVEL_PROGRESS, message)

    @classmethod
    def error(cls, message: str) -> None:
        """用途说明：打印 ERROR 级别日志。"""
        cls._check_and_rotate()
        if cls._logger: cls._logger.error(message)
