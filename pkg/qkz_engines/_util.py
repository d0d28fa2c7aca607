from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Tuple, TypeVar
import math

import numpy as np
from scipy.linalg import lu_factor

T = TypeVar('T')
R = TypeVar('R')


def map_tasks(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """Maps fn over items, in a process pool when workers > 1.

    fn must be a module-level function so it can be pickled.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def wrap_angle(angle: float) -> float:
    """Maps an angle into (-pi, pi]."""
    wrapped = math.remainder(angle, 2 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def log_det(matrix: np.ndarray, row_log_scales: np.ndarray = None) -> Tuple[float, float]:
    """(log|det|, arg det) from LU pivots; rows may carry extra log scales."""
    lu, piv = lu_factor(np.asarray(matrix, dtype=complex))
    diag = np.diag(lu)
    if np.any(diag == 0):
        return -math.inf, 0.0
    swaps = int(np.sum(piv != np.arange(len(piv))))
    log_abs = float(np.sum(np.log(np.abs(diag))))
    arg = float(np.sum(np.angle(diag))) + math.pi * swaps
    if row_log_scales is not None:
        log_abs += float(np.sum(row_log_scales))
    return log_abs, wrap_angle(arg)
