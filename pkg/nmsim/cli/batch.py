"""
批量执行模块
多张图像可并发模拟，结果始终按输入顺序返回
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from ..config.settings import get_config

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def run_batch(func: Callable[[T], R], items: Sequence[T], threads: Optional[int] = None) -> List[R]:
    """
    对每个输入调用func

    Args:
        func: 处理函数（每次调用需使用独立的执行器实例）
        items: 输入序列
        threads: 并行线程数，None时取NM_SIM_THREADS，0为串行

    Returns:
        与items顺序一致的结果列表；任一调用的异常会原样抛出
    """
    threads = get_config().threads if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    workers = min(threads, len(items))
    logger.debug(f"Running {len(items)} items on {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
