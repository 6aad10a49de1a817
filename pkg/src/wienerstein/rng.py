"""Counter-based random numbers.

Variate ``i`` of stream ``k`` under master seed ``s`` is a pure function of
``(s, k, i)``: it is output ``i`` of a Philox-4x64 generator keyed by
``(s, k)``. Work is split into fixed blocks whose counters are set
explicitly, so the values do not depend on how blocks are scheduled.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.special import gammaincinv, ndtri

BLOCK = 1 << 16  # variates per block, a multiple of the 4 Philox lanes
_MASK64 = (1 << 64) - 1


def derive_seed(*words: int) -> int:
    """Mix integers into a 64-bit seed; used for replicate and side seeds."""
    ss = np.random.SeedSequence([int(w) & _MASK64 for w in words])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _raw_block(seed: int, stream: int, block: int, count: int) -> np.ndarray:
    counter = np.zeros(4, dtype=np.uint64)
    counter[0] = block * (BLOCK // 4)
    bg = np.random.Philox(counter=counter,
                          key=np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64))
    return bg.random_raw(count)


def _uniform_block(seed, stream, block, count):
    raw = _raw_block(seed, stream, block, count)
    # 53 high bits, offset by half a unit so 0 and 1 never occur
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


def _generate(seed, stream, n, transform, workers):
    nblocks = -(-n // BLOCK)
    sizes = [min(BLOCK, n - b * BLOCK) for b in range(nblocks)]

    def job(b):
        return transform(_uniform_block(seed, stream, b, sizes[b]))

    if workers <= 1 or nblocks <= 1:
        parts = [job(b) for b in range(nblocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(job, range(nblocks)))
    return np.concatenate(parts) if parts else np.zeros(0)


def uniforms(seed: int, stream: int, n: int, workers: int = 1) -> np.ndarray:
    return _generate(seed, stream, n, lambda u: u, workers)


def normals(seed: int, stream: int, n: int, workers: int = 1) -> np.ndarray:
    """Standard normals by inverse CDF."""
    return _generate(seed, stream, n, ndtri, workers)


def gammas(seed: int, stream: int, n: int, shape: float, rate: float = 1.0,
           workers: int = 1) -> np.ndarray:
    """Gamma(shape, rate) variates by inverse CDF."""
    return _generate(seed, stream, n, lambda u: gammaincinv(shape, u) / rate, workers)
