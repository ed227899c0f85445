import os
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from typing import Any, Callable, Iterable, List, Optional


class ThreadPoolManager:
    """
    用途：全局共享的线程池管理类，采用单例模式实现。
    提供统一的后台任务执行入口（逐图并行去噪、训练数据预取），避免重复创建线程池。
    """

    _instance = None
    _lock = threading.Lock()
    _executor: Optional[ThreadPoolExecutor] = None
    _max_workers: int = 0

    def __new__(cls) -> 'ThreadPoolManager':
        """
        用途：实现单例模式，确保整个进程只存在一个线程池管理器。
        入参说明：无
        返回值说明：ThreadPoolManager - 单例实例
        """
        with cls._lock:
            if cls._instance is None:
                cls._instance = super(ThreadPoolManager, cls).__new__(cls)
            if cls._executor is None:
                # 计算密集型任务，线程数不超过核心数，且至少为 2 以便预取与主循环并行
                max_workers = cls._max_workers or max(2, min(8, os.cpu_count() or 2))
                cls._executor = ThreadPoolExecutor(max_workers=max_workers, thread_name_prefix="DespecklePool")
        return cls._instance

    @classmethod
    def configure(cls, max_workers: int) -> None:
        """
        用途：设置线程池大小，需在首次提交任务前调用；0 表示按 CPU 核心数自动选择。
        入参说明：max_workers (int): 工作线程数。
        返回值说明：无
        """
        with cls._lock:
            cls._max_workers = max(0, int(max_workers))

    @staticmethod
    def submit(fn: Callable[..., Any], *args: Any, **kwargs: Any) -> Future:
        """
        用途：向全局线程池提交一个异步任务。
        入参说明：
            fn (Callable): 要执行的函数。
            *args: 函数的位置参数。
            **kwargs: 函数的关键字参数。
        返回值说明：Future - 用于获取任务执行结果或状态。
        """
        manager = ThreadPoolManager()
        return manager._executor.submit(fn, *args, **kwargs)

    @staticmethod
    def map_ordered(fn: Callable[[Any], Any], items: Iterable[Any]) -> List[Any]:
        """
        用途：并行执行 fn 并按输入顺序返回结果；任一任务异常时在收集阶段原样抛出。
        入参说明：
            fn (Callable): 单参数处理函数。
            items (Iterable): 输入序列。
        返回值说明：List[Any] - 与输入顺序一致的结果列表。
        """
        futures: List[Future] = [ThreadPoolManager.submit(fn, item) for item in items]
        return [future.result() for future in futures]

    @staticmethod
    def shutdown(wait: bool = True) -> None:
        """
        用途：关闭全局线程池。通常在命令结束时调用。
        入参说明：
            wait (bool): 是否等待所有任务完成后再关闭。
        返回值说明：无
        """
        with ThreadPoolManager._lock:
            if ThreadPoolManager._executor:
                ThreadPoolManager._executor.shutdown(wait=wait)
                ThreadPoolManager._executor = None
