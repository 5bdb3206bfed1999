"""Shared oracles and fixtures.

The naive oracle is deliberately primitive: a pure-Python bytearray sieve
plus dictionary index lookups, sharing no code with the segmented pipeline.
"""

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

import pytest

from twingaps.cli import RunConfig, run_scan
from twingaps.scanstats import Checkpoint


@lru_cache(maxsize=8)
def naive_prime_flags(n: int) -> bytes:
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    p = 2
    while p * p <= n:
        if flags[p]:
            flags[p * p :: p] = bytes(len(range(p * p, n + 1, p)))
        p += 1
    return bytes(flags)


def naive_primes(n: int) -> list[int]:
    flags = naive_prime_flags(n)
    return [i for i in range(n + 1) if flags[i]]


def trial_division_primes(lo: int, hi: int) -> list[int]:
    """Primes in [lo, hi) by trial division; for small ranges only."""
    out = []
    for c in range(max(lo, 2), hi):
        if all(c % d for d in range(2, int(c**0.5) + 1)):
            out.append(c)
    return out


@dataclass(frozen=True)
class NaiveTwinStats:
    """Direct-from-definitions recount of everything a Checkpoint holds."""

    n: int
    pi: int
    pi2: int
    gap_hist: dict
    sep_hist: dict
    head_primes: int
    tail_primes: int
    overlap: int
    d_max: int
    s_max: int


@lru_cache(maxsize=8)
def naive_twin_stats(n: int) -> NaiveTwinStats:
    primes = naive_primes(n)
    index = {p: i for i, p in enumerate(primes)}
    flags = naive_prime_flags(n)
    twins = [p for p in primes if p + 2 <= n and flags[p + 2]]
    gap = Counter()
    sep = Counter()
    overlap = 0
    for prev, cur in zip(twins, twins[1:]):
        gap[(cur + 2) - (prev + 2)] += 1
        s = index[cur] - index[prev + 2] - 1
        if s < 0:
            overlap += 1
        else:
            sep[s] += 1
    tail = len(primes) - (index[twins[-1] + 2] + 1) if twins else max(len(primes) - 1, 0)
    return NaiveTwinStats(
        n=n,
        pi=len(primes),
        pi2=len(twins),
        gap_hist=dict(gap),
        sep_hist=dict(sep),
        head_primes=1 if primes else 0,
        tail_primes=tail,
        overlap=overlap,
        d_max=max(gap) if gap else 0,
        s_max=max(sep) if sep else 0,
    )


@pytest.fixture(scope="session")
def scan26(tmp_path_factory) -> dict[int, Checkpoint]:
    """One scan to 2^26 with checkpoints at 2^20, 2^22, 2^24, 2^26."""
    out = tmp_path_factory.mktemp("scan26")
    written = run_scan(
        RunConfig(n_max=2**26, checkpoint_start=2**20, checkpoint_ratio=4, output_dir=out)
    )
    return {cp.n: cp for cp in written}
