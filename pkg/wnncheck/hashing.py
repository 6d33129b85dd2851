from typing import TYPE_CHECKING, Callable, Tuple

import numpy as np
import xxhash

if TYPE_CHECKING:
    from wnncheck.sample import SampleCloud
    from wnncheck.types import ScenarioConfig


def config_hash(config: "ScenarioConfig") -> int:
    """Hash of a ScenarioConfig

    Args:
        config (ScenarioConfig): Config to hash

    Returns:
        int: Config hash, stable across processes
    """
    return _hash((config.model_dump_json(),))


def array_hash(arr: np.ndarray) -> int:
    """Hash of the shape and raw float64 contents of an array

    Args:
        arr (np.ndarray): Array to hash

    Returns:
        int: Array hash
    """
    arr = np.ascontiguousarray(arr, dtype=float)
    return _hash((str(arr.shape), arr))


def cloud_hash(cloud: "SampleCloud") -> int:
    """Hash of a SampleCloud

    Args:
        cloud (SampleCloud): Sample cloud to hash

    Returns:
        int: Hash over seed and sampled vectors
    """
    return _hash((cloud.seed, array_hash(cloud.xs), array_hash(cloud.xis)))


def _hash(tpl: Tuple, hash_function: Callable = xxhash.xxh3_64) -> int:
    """Deterministic hash function. Python's builtin hash is salted
    per process, reports need a value that is identical across runs.

    Args:
        tpl (Tuple): Tuple of data to hash
        hash_function (Callable, xxhash.xxh3_64): Hash function

    Returns:
        int: Deterministic hash using tpl data
    """
    m = hash_function()
    for item in tpl:
        if isinstance(item, str):
            item_data = item.encode("utf-8")
        elif isinstance(item, (int, float)):
            item_data = repr(item).encode("utf-8")
        elif isinstance(item, np.ndarray):
            item_data = item.tobytes()
        else:
            item_data = bytes(item)
        m.update(item_data)
    return m.intdigest()
