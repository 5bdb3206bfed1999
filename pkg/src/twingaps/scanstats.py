"""Streaming accumulation of twin-gap statistics over an ordered segment stream.

One sequential consumer walks the segments, completes twin pairs (including
pairs straddling segment boundaries) and records, for every pair of
consecutive twins,

  * the arithmetic gap d: difference of the upper members, and
  * the separation s: number of primes strictly between the two pairs.

The overlapping pair (3,5),(5,7) is the single anomaly: its gap is 2 (every
other gap is a multiple of 6) and its separation formula value is -1, so the
event is excluded from the separation histogram and tallied in `overlap`.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .errors import SchemaError, SequencingError
from .sieve import SieveSegment

RESUME_SCHEMA_VERSION = 1


class Histogram:
    """Sparse integer histogram; only nonzero bins are stored, never rebinned."""

    __slots__ = ("bins",)

    def __init__(self, bins: Iterable[tuple[int, int]] | dict | None = None):
        self.bins: dict[int, int] = dict(bins) if bins else {}

    def add(self, key: int, count: int = 1) -> None:
        self.bins[key] = self.bins.get(key, 0) + count

    def update_from_array(self, values: np.ndarray) -> None:
        keys, counts = np.unique(values, return_counts=True)
        for k, c in zip(keys.tolist(), counts.tolist()):
            self.bins[k] = self.bins.get(k, 0) + c

    def total(self) -> int:
        return sum(self.bins.values())

    def max_key(self) -> int:
        """Largest bin key, 0 when empty."""
        return max(self.bins) if self.bins else 0

    def champion(self) -> int:
        """Most frequent key; ties break to the smallest key."""
        if not self.bins:
            raise ValueError("champion of an empty histogram")
        return min(self.bins.items(), key=lambda kv: (-kv[1], kv[0]))[0]

    def extremes(self) -> tuple[int, int]:
        """(largest key, its multiplicity)."""
        if not self.bins:
            raise ValueError("extremes of an empty histogram")
        k = max(self.bins)
        return k, self.bins[k]

    def sorted_items(self) -> list[tuple[int, int]]:
        return sorted(self.bins.items())

    def copy(self) -> "Histogram":
        return Histogram(self.bins)

    def __eq__(self, other) -> bool:
        return isinstance(other, Histogram) and self.bins == other.bins

    def __len__(self) -> int:
        return len(self.bins)

    def __bool__(self) -> bool:
        return bool(self.bins)

    def __repr__(self) -> str:
        return f"Histogram({self.sorted_items()!r})"


# The two histograms share the representation; the names carry the contract.
GapHistogram = Histogram
SeparationHistogram = Histogram


def champion(hist: Histogram) -> int:
    return hist.champion()


def extremes(hist: Histogram) -> tuple[int, int]:
    return hist.extremes()


@dataclass(frozen=True)
class Checkpoint:
    """Immutable snapshot of the scan after consuming exactly [2, n].

    head_primes counts primes before the first twin (just 2), tail_primes the
    primes past the last twin's upper member, overlap the shared prime 5.
    Together with the twin members and the separation events these classify
    every prime <= n exactly once.
    """

    n: int
    pi: int
    pi2: int
    gap_hist: Histogram
    sep_hist: Histogram
    d_max: int
    s_max: int
    head_primes: int
    tail_primes: int
    overlap: int

    def to_json_obj(self) -> dict:
        return {
            "n": self.n,
            "pi": self.pi,
            "pi2": self.pi2,
            "d_max": self.d_max,
            "s_max": self.s_max,
            "head_primes": self.head_primes,
            "tail_primes": self.tail_primes,
            "overlap": self.overlap,
            "gap_hist": [[d, m] for d, m in self.gap_hist.sorted_items()],
            "sep_hist": [[s, mu] for s, mu in self.sep_hist.sorted_items()],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Checkpoint":
        try:
            return cls(
                n=int(obj["n"]),
                pi=int(obj["pi"]),
                pi2=int(obj["pi2"]),
                gap_hist=Histogram([(int(k), int(v)) for k, v in obj["gap_hist"]]),
                sep_hist=Histogram([(int(k), int(v)) for k, v in obj["sep_hist"]]),
                d_max=int(obj["d_max"]),
                s_max=int(obj["s_max"]),
                head_primes=int(obj["head_primes"]),
                tail_primes=int(obj["tail_primes"]),
                overlap=int(obj["overlap"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed checkpoint object: {exc}") from exc

    def write(self, path: str | Path) -> None:
        _atomic_write_text(Path(path), json.dumps(self.to_json_obj(), indent=2) + "\n")

    @classmethod
    def read(cls, path: str | Path) -> "Checkpoint":
        try:
            obj = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_json_obj(obj)


@dataclass
class ScanState:
    """Mutable accumulator; resumable from its serialized form.

    prev_upper_pos is the 0-based index of the previous twin's upper member
    in the full prime sequence, which turns separation counting into a
    difference of indices: s = pos(p_n) - pos(u_m) - 2 for uppers p_n+2.
    """

    next_lo: int = 2
    pi: int = 0
    pi2: int = 0
    last_prime: int | None = None
    prev_upper: int | None = None
    prev_upper_pos: int | None = None
    overlap: int = 0
    gap_hist: Histogram = field(default_factory=Histogram)
    sep_hist: Histogram = field(default_factory=Histogram)

    def consume_segment(self, seg: SieveSegment) -> "ScanState":
        if seg.lo != self.next_lo:
            raise SequencingError(
                f"segment [{seg.lo}, {seg.hi}) out of order; expected lo={self.next_lo}"
            )
        values = seg.primes()
        if values.size:
            if self.last_prime is None:
                ext = values
                pos0 = self.pi
            else:
                ext = np.concatenate(([self.last_prime], values))
                pos0 = self.pi - 1
            twin_idx = np.flatnonzero(np.diff(ext) == 2)
            upper_vals = ext[twin_idx + 1]
            upper_pos = pos0 + twin_idx + 1
            if self.prev_upper is not None:
                upper_vals = np.concatenate(([self.prev_upper], upper_vals))
                upper_pos = np.concatenate(([self.prev_upper_pos], upper_pos))
            if upper_vals.size >= 2:
                gaps = np.diff(upper_vals)
                seps = np.diff(upper_pos) - 2
                excluded = seps < 0
                self.overlap += int(np.count_nonzero(excluded))
                self.gap_hist.update_from_array(gaps)
                if not excluded.all():
                    self.sep_hist.update_from_array(seps[~excluded])
            if upper_vals.size:
                self.prev_upper = int(upper_vals[-1])
                self.prev_upper_pos = int(upper_pos[-1])
            self.pi += int(values.size)
            self.pi2 += int(twin_idx.size)
            self.last_prime = int(values[-1])
        self.next_lo = seg.hi
        return self

    def take_checkpoint(self, n: int) -> Checkpoint:
        if self.next_lo != n + 1:
            raise SequencingError(
                f"checkpoint at {n} requires the scan to have consumed exactly "
                f"[2, {n}]; consumed up to {self.next_lo - 1}"
            )
        if self.prev_upper_pos is not None:
            tail = self.pi - (self.prev_upper_pos + 1)
        else:
            tail = max(self.pi - 1, 0)
        return Checkpoint(
            n=n,
            pi=self.pi,
            pi2=self.pi2,
            gap_hist=self.gap_hist.copy(),
            sep_hist=self.sep_hist.copy(),
            d_max=self.gap_hist.max_key(),
            s_max=self.sep_hist.max_key(),
            head_primes=1 if self.pi else 0,
            tail_primes=tail,
            overlap=self.overlap,
        )

    def to_json_obj(self) -> dict:
        return {
            "schema_version": RESUME_SCHEMA_VERSION,
            "next_lo": self.next_lo,
            "pi": self.pi,
            "pi2": self.pi2,
            "last_prime": self.last_prime,
            "prev_upper": self.prev_upper,
            "prev_upper_pos": self.prev_upper_pos,
            "overlap": self.overlap,
            "gap_hist": [[d, m] for d, m in self.gap_hist.sorted_items()],
            "sep_hist": [[s, mu] for s, mu in self.sep_hist.sorted_items()],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ScanState":
        if not isinstance(obj, dict) or obj.get("schema_version") != RESUME_SCHEMA_VERSION:
            raise SchemaError(
                f"resume schema_version {obj.get('schema_version')!r} unsupported "
                f"(expected {RESUME_SCHEMA_VERSION})"
            )
        try:
            return cls(
                next_lo=int(obj["next_lo"]),
                pi=int(obj["pi"]),
                pi2=int(obj["pi2"]),
                last_prime=None if obj["last_prime"] is None else int(obj["last_prime"]),
                prev_upper=None if obj["prev_upper"] is None else int(obj["prev_upper"]),
                prev_upper_pos=(
                    None if obj["prev_upper_pos"] is None else int(obj["prev_upper_pos"])
                ),
                overlap=int(obj["overlap"]),
                gap_hist=Histogram([(int(k), int(v)) for k, v in obj["gap_hist"]]),
                sep_hist=Histogram([(int(k), int(v)) for k, v in obj["sep_hist"]]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed resume object: {exc}") from exc

    def save(self, path: str | Path) -> None:
        _atomic_write_text(Path(path), json.dumps(self.to_json_obj(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "ScanState":
        try:
            obj = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_json_obj(obj)


def consume_segment(state: ScanState, seg: SieveSegment) -> ScanState:
    return state.consume_segment(seg)


def take_checkpoint(state: ScanState, n: int) -> Checkpoint:
    return state.take_checkpoint(n)


def write_histogram_csv(hist: Histogram, header: str, out: IO[str]) -> None:
    """Two-column CSV, ascending keys, LF line endings."""
    out.write(header + "\n")
    for key, count in hist.sorted_items():
        out.write(f"{key},{count}\n")


def read_histogram_csv(text: str) -> Histogram:
    lines = [ln for ln in text.split("\n") if ln]
    hist = Histogram()
    for ln in lines[1:]:
        key, count = ln.split(",")
        hist.add(int(key), int(count))
    return hist


def checkpoint_filename(n: int) -> str:
    return f"checkpoint_{n}.json"


def _atomic_write_text(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
