import hashlib
import os
from typing import Dict, List, Sequence, Tuple

from despeckle.common.errors import ConfigError
from despeckle.common.i18n_utils import t
from despeckle.common.log_utils import LogUtils


class Utils:
    """
    用途：通用工具类
    """

    PNM_SUFFIXES: Tuple[str, ...] = ('.pgm', '.ppm', '.pnm')

    @staticmethod
    def calculate_md5(file_path: str) -> str:
        """
        用途说明：计算指定文件的完整 MD5 哈希值，用作检查点标识。
        入参说明：file_path (str) - 文件路径
        返回值说明：str - MD5 十六进制字符串；文件不存在时返回空字符串
        """
        if not os.path.exists(file_path):
            LogUtils.error(t('utils_file_not_found_md5', path=file_path))
            return ""

        hash_md5 = hashlib.md5()
        # 使用 64KB 的缓冲区提高大文件读取速度
        with open(file_path, "rb") as f:
            for chunk in iter(lambda: f.read(65536), b""):
                hash_md5.update(chunk)
        return hash_md5.hexdigest()

    @staticmethod
    def is_pnm_file(file_path: str) -> bool:
        """
        用途说明：根据文件后缀判断是否为 PGM/PPM 图像。
        入参说明：file_path (str): 文件路径。
        返回值说明：bool: 是 PNM 返回 True。
        """
        _, ext = os.path.splitext(file_path)
        return ext.lower() in Utils.PNM_SUFFIXES

    @staticmethod
    def list_pnm_files(directory: str) -> List[str]:
        """
        用途说明：列出目录下（不递归）所有 PNM 文件，按文件名字典序排序。
        入参说明：directory (str): 目录路径。
        返回值说明：List[str]: 排序后的完整路径列表。
        """
        if not os.path.isdir(directory):
            raise ConfigError(t('utils_dir_not_found', path=directory))
        names: List[str] = sorted(name for name in os.listdir(directory) if Utils.is_pnm_file(name))
        return [os.path.join(directory, name) for name in names]

    @staticmethod
    def read_key_values(file_path: str) -> Dict[str, str]:
        """
        用途说明：读取行式 key=value 文本（配置文件与运行清单共用），忽略空行与 # 注释。
        入参说明：file_path (str): 文件路径。
        返回值说明：Dict[str, str]: 保持出现顺序的键值对，后出现的同名键覆盖先前值。
        """
        result: Dict[str, str] = {}
        with open(file_path, 'r', encoding='utf-8') as f:
            for line_no, raw_line in enumerate(f, start=1):
                line: str = raw_line.strip()
                if not line or line.startswith('#'):
                    continue
                if '=' not in line:
                    raise ConfigError(t('config_line_malformed', path=file_path, line=line_no))
                key, value = line.split('=', 1)
                result[key.strip()] = value.strip()
        return result

    @staticmethod
    def write_key_values(file_path: str, items: Sequence[Tuple[str, object]]) -> None:
        """
        用途说明：按顺序写出 key=value 文本。
        入参说明：
            file_path (str): 目标路径。
            items (Sequence[Tuple[str, object]]): 有序键值对。
        返回值说明：无
        """
        directory: str = os.path.dirname(os.path.abspath(file_path))
        os.makedirs(directory, exist_ok=True)
        with open(file_path, 'w', encoding='utf-8') as f:
            for key, value in items:
                f.write(f"{key}={value}\n")
