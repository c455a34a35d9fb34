"""
nmsim命令行入口
"""

import logging
import sys
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

from .config.settings import get_config


def setup_logging(level: Optional[str] = None) -> None:
    """
    按LoggingConfig配置根日志器：rich输出到stderr，可选文件输出

    Args:
        level: 覆盖配置中的日志级别
    """
    logging_config = get_config().logging
    level = (level or logging_config.level).upper()

    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    root.setLevel(level)

    console_handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=True)
    console_handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root.addHandler(console_handler)

    if logging_config.file_path:
        file_handler = logging.FileHandler(logging_config.file_path, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(logging_config.format))
        root.addHandler(file_handler)


def main() -> None:
    """控制台脚本入口"""
    from .cli.commands import cli

    sys.exit(cli.main(prog_name="nmsim", standalone_mode=True, obj={}))


if __name__ == "__main__":
    main()
