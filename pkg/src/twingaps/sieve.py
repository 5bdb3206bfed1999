"""Segmented sieve of Eratosthenes producing primes and twin pairs in order.

Segments are plain boolean arrays over [lo, hi); the only wheel in use is
odd-skipping inside the marking loop.  Throughput is dominated by numpy's
strided stores, so cache-resident segments (the 2^20 default) win.
"""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

# 64-bit headroom for p+2 and base-prime squares; the CLI rejects anything above.
MAX_N = 2**44

DEFAULT_SEGMENT_BITS = 20


def base_primes(limit: int) -> np.ndarray:
    """All primes <= limit, ascending.  Dense sieve; empty array below 2."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


@dataclass(frozen=True)
class SieveSegment:
    """Primality flags for [lo, hi): bit i set <=> lo+i is prime."""

    lo: int
    hi: int
    flags: np.ndarray

    def primes(self) -> np.ndarray:
        """Prime values in [lo, hi), ascending."""
        return self.lo + np.flatnonzero(self.flags)

    def prime_count(self) -> int:
        return int(np.count_nonzero(self.flags))


def _prime_in_range(lo: int, hi: int) -> bool:
    """Trial-division check for any prime in [lo, hi]; ranges here are tiny."""
    for c in range(max(lo, 2), hi + 1):
        if all(c % d for d in range(2, math.isqrt(c) + 1)):
            return True
    return False


def sieve_segment(lo: int, hi: int, base: Sequence[int] | np.ndarray) -> SieveSegment:
    """Sieve [lo, hi) using precomputed base primes.

    `base` must be the full ascending prime list up to some limit covering
    isqrt(hi-1); raises ValueError when a needed prime is missing.
    """
    if lo < 2 or hi <= lo:
        raise ValueError(f"bad segment bounds [{lo}, {hi})")
    base = np.asarray(base, dtype=np.int64)
    need = math.isqrt(hi - 1)
    have = int(base[-1]) if base.size else 1
    if need >= 2 and have < need and _prime_in_range(have + 1, need):
        raise ValueError(f"base primes reach {have}, segment [{lo}, {hi}) needs {need}")

    flags = np.ones(hi - lo, dtype=bool)
    start = max(4, -(-lo // 2) * 2)
    if start < hi:
        flags[start - lo :: 2] = False
    # Odd primes mark odd multiples only; even ones are already gone.
    for p in base[(base > 2) & (base <= need)].tolist():
        m = max(p * p, -(-lo // p) * p)
        if m % 2 == 0:
            m += p
        if m < hi:
            flags[m - lo :: 2 * p] = False
    flags.setflags(write=False)
    return SieveSegment(lo, hi, flags)


def plan_segments(
    start: int, stop: int, segment_len: int, cuts: Iterable[int] = ()
) -> list[tuple[int, int]]:
    """Tile [start, stop) with windows of segment_len, breaking at every cut.

    Cuts let the consumer observe an exactly-consumed prefix (checkpoints).
    """
    if segment_len < 2:
        raise ValueError("segment_len must be >= 2")
    pending = sorted({c for c in cuts if start < c < stop})
    bounds = []
    lo = start
    while lo < stop:
        hi = min(lo + segment_len, stop)
        while pending and pending[0] <= lo:
            pending.pop(0)
        if pending and pending[0] < hi:
            hi = pending[0]
        bounds.append((lo, hi))
        lo = hi
    return bounds


def generate_segments(
    bounds: Sequence[tuple[int, int]],
    base: np.ndarray,
    threads: int = 1,
) -> Iterator[SieveSegment]:
    """Sieve the given windows, delivering strictly in the given order.

    With threads > 1 the windows are sieved on a pool with a bounded number
    in flight; ordering (and therefore every downstream statistic) is
    unchanged.
    """
    if threads <= 1:
        for lo, hi in bounds:
            yield sieve_segment(lo, hi, base)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        inflight: deque = deque()
        it = iter(bounds)
        for lo, hi in it:
            inflight.append(pool.submit(sieve_segment, lo, hi, base))
            if len(inflight) > threads + 2:
                yield inflight.popleft().result()
        while inflight:
            yield inflight.popleft().result()


def _segment_stream(n_max: int, segment_bits: int) -> Iterator[SieveSegment]:
    base = base_primes(math.isqrt(n_max))
    bounds = plan_segments(2, n_max + 1, 1 << segment_bits)
    return generate_segments(bounds, base)


def prime_count(n: int, segment_bits: int = DEFAULT_SEGMENT_BITS) -> int:
    """pi(n): number of primes <= n."""
    if n < 2:
        raise ValueError("prime_count requires n >= 2")
    return sum(seg.prime_count() for seg in _segment_stream(n, segment_bits))


@dataclass(frozen=True)
class TwinPair:
    """A twin pair (p, p+2); p >= 3 and, for p >= 5, p = 5 (mod 6)."""

    p: int

    @property
    def upper(self) -> int:
        return self.p + 2


def twin_stream(
    n_max: int, segment_bits: int = DEFAULT_SEGMENT_BITS
) -> Iterator[TwinPair]:
    """Twin pairs with both members <= n_max, ascending in p."""
    if n_max < 5:
        raise ValueError("twin_stream requires n_max >= 5")
    last_prime = None
    for seg in _segment_stream(n_max, segment_bits):
        values = seg.primes()
        if values.size == 0:
            continue
        ext = values if last_prime is None else np.concatenate(([last_prime], values))
        for lower in ext[np.flatnonzero(np.diff(ext) == 2)].tolist():
            yield TwinPair(lower)
        last_prime = int(values[-1])
