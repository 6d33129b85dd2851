import json
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Iterable, List, Optional, TypeVar

import numpy as np

from wnncheck.errors import DimensionMismatch, ZeroVector

_T = TypeVar("_T")
_R = TypeVar("_R")


def ensure_path(path: Any) -> Path:
    """Ensure string is converted to a Path.

    Args:
        path (Any): str or path. If string, it's converted to Path.
    Returns:
        Path: Pathlib Path object for the provided input
    """
    if not isinstance(path, (str, Path)):
        raise TypeError("type of positional argument 'path' must be a string or Path")
    return Path(path) if isinstance(path, str) else path


def as_vector(x: Any, dim: int, name: str = "vector") -> np.ndarray:
    """Convert input to a float vector of length dim.

    Raises:
        DimensionMismatch: If x does not have dim entries
    """
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.shape[0] != dim:
        raise DimensionMismatch(f"{name} has {arr.shape[0]} entries, expected {dim}")
    return arr


def g_norm(v: np.ndarray, gram: Optional[np.ndarray] = None) -> float:
    if gram is None:
        return float(np.sqrt(v @ v))
    return float(np.sqrt(max(v @ gram @ v, 0.0)))


def normalize(
    v: np.ndarray, gram: Optional[np.ndarray] = None, eps: float = 1e-14
) -> np.ndarray:
    """Scale v to unit norm under gram (Euclidean if gram is None).

    Raises:
        ZeroVector: If the norm of v is below eps
    """
    norm = g_norm(v, gram)
    if norm < eps:
        raise ZeroVector("Cannot normalize a zero vector")
    return v / norm


def sign_fix(v: np.ndarray) -> np.ndarray:
    """Flip v so that its largest-magnitude entry is positive."""
    if v.size == 0:
        return v
    idx = int(np.argmax(np.abs(v)))
    return -v if v[idx] < 0 else v


def freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def map_ordered(
    func: Callable[[_T], _R], items: Iterable[_T], n_workers: int = 1
) -> List[_R]:
    """Map func over items, keeping the input order in the output.
    Results are identical for any n_workers since the reduction
    happens on the ordered list.
    """
    items = list(items)
    if n_workers <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(func, items))


def json_dumps(data: Any, indent: int = 2, _level: int = 0) -> str:
    """Serialize JSON-compatible data with every float written to 17
    significant digits. Non-finite floats become null.

    Args:
        data (Any): dicts, lists, strings, numbers, booleans and None
        indent (int): Spaces per nesting level
    Returns:
        str: JSON text
    """
    pad = " " * indent * (_level + 1)
    close = " " * indent * _level
    if isinstance(data, dict):
        if not data:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(k), ensure_ascii=False)}: "
            f"{json_dumps(v, indent, _level + 1)}"
            for k, v in data.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(data, (list, tuple)):
        if not data:
            return "[]"
        items = [f"{pad}{json_dumps(v, indent, _level + 1)}" for v in data]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    if isinstance(data, float):
        return f"{data:.17g}" if math.isfinite(data) else "null"
    return json.dumps(data, ensure_ascii=False)
