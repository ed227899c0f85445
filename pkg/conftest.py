import os
import sys

import pytest

# 确保项目根目录在 sys.path 中
project_root = os.path.dirname(os.path.abspath(__file__))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from despeckle.common.i18n_utils import I18nUtils
from despeckle.common.log_utils import LogUtils


def pytest_configure(config) -> None:
    config.addinivalue_line("markers", "slow: long-running learning or Monte Carlo test")


@pytest.fixture(autouse=True)
def _english_messages():
    I18nUtils.reload(language="en")
    LogUtils.init()
    yield
