"""Seeded random streams and replicate fan-out.

Every stochastic operation takes an explicit integer seed. Replicate loops
derive one child stream per replicate index, so results are identical for
any number of workers.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

from imfid.config import DEFAULT_THREADS
from imfid.errors import PreconditionError

logger = logging.getLogger(__name__)

T = TypeVar("T")

_SEED_MASK = (1 << 64) - 1


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if seed is None:
        raise PreconditionError("an explicit seed is required")
    return np.random.SeedSequence(int(seed) & _SEED_MASK)


def make_rng(seed) -> np.random.Generator:
    """Counter-based (Philox) generator for a 64-bit seed or a SeedSequence."""
    return np.random.Generator(np.random.Philox(_seed_sequence(seed)))


def replicate_seeds(seed, reps: int) -> list[np.random.SeedSequence]:
    """One independent child stream per replicate index."""
    return _seed_sequence(seed).spawn(reps)


def _run_chunk(fn: Callable[[np.random.Generator], T], seeds: list) -> list[T]:
    return [fn(make_rng(s)) for s in seeds]


def map_replicates(
    fn: Callable[[np.random.Generator], T],
    seed,
    reps: int,
    threads: int | None = None,
) -> list[T]:
    """Run fn(rng) for reps replicates, returning results in replicate order."""
    if reps < 1:
        raise PreconditionError(f"reps must be >= 1, got {reps}")
    threads = max(1, int(threads or DEFAULT_THREADS))
    seeds = replicate_seeds(seed, reps)

    if threads == 1:
        return _run_chunk(fn, seeds)

    bounds = np.linspace(0, reps, threads + 1).astype(int)
    chunks = [seeds[a:b] for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    logger.debug(f"🧵 {reps} replicates over {len(chunks)} workers")

    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda c: _run_chunk(fn, c), chunks))

    return [r for part in parts for r in part]
