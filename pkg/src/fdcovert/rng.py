"""Reproducible random streams for parallel Monte-Carlo.

Every stream is a Philox counter-based generator keyed by ``(seed, stream)``
through :class:`numpy.random.SeedSequence`, so sub-streams are statistically
independent and the same key always yields the same sequence regardless of
how work is scheduled across threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar, Union

import numpy as np

T = TypeVar("T")

#: Number of Monte-Carlo trials handled by one sub-stream.
CHUNK_SIZE = 1 << 15

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RandomSource:
    """Immutable key for one random stream.

    Args:
        seed: 64-bit user seed.
        stream: replicate index, or a tuple of indices for nested streams.
    """

    seed: int = 0
    stream: Union[int, tuple[int, ...]] = ()

    def __post_init__(self):
        if not 0 <= int(self.seed) <= _MASK64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")
        stream = self.stream
        if isinstance(stream, (int, np.integer)):
            stream = (int(stream),)
        stream = tuple(int(s) for s in stream)
        if any(s < 0 for s in stream):
            raise ValueError("stream indices must be non-negative")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "stream", stream)

    def spawn(self, *index: int) -> "RandomSource":
        """Child stream, independent of this one and of its siblings."""
        return RandomSource(self.seed, self.stream + tuple(index))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.stream)
        return np.random.Generator(np.random.Philox(ss))


RNGLike = Union[RandomSource, np.random.Generator]


def as_generator(rng: RNGLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RandomSource):
        return rng.generator()
    raise TypeError(f"expected RandomSource or numpy Generator, got {type(rng).__name__}")


def chunk_sizes(total: int, chunk: int = CHUNK_SIZE) -> list[int]:
    full, rest = divmod(int(total), chunk)
    return [chunk] * full + ([rest] if rest else [])


def map_streams(
    fn: Callable[[int, np.random.Generator], T],
    total: int,
    source: RandomSource,
    workers: int = 1,
) -> list[T]:
    """Split ``total`` trials into fixed chunks, one sub-stream per chunk.

    ``fn(n, gen)`` is called for each chunk. The chunking depends only on
    ``total``, so the returned list (and any sum over it) is identical for
    every value of ``workers``.
    """
    sizes = chunk_sizes(total)
    jobs = [(n, source.spawn(i)) for i, n in enumerate(sizes)]

    def run(job):
        n, src = job
        return fn(n, src.generator())

    return parallel_map(run, jobs, workers)


def parallel_map(fn: Callable[..., T], items: Sequence, workers: int = 1) -> list[T]:
    """Order-preserving map, optionally on a thread pool."""
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
