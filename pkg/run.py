import os
import sys

# 确保项目根目录在 sys.path 中
project_root = os.path.dirname(os.path.abspath(__file__))
if project_root not in sys.path:
    sys.path.append(project_root)

from despeckle.main import main

if __name__ == "__main__":
    """
    用途说明：项目统一命令行入口。
    入参说明：命令行参数，子命令见 despeckle/main.py。
    返回值说明：以子命令返回的退出码结束进程。
    """
    sys.exit(main(sys.argv[1:]))
