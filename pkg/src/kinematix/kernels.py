"""Batch kernels for invariant masses and boosts, run through swappable backends.

A kernel body is written once against an index range ``[lo, hi)`` and the
coordinate-system classmethods, so it is generic over both representation and
precision.  A backend only decides how the range is cut up and who runs each
piece:

* :class:`Sequential` runs the whole range in the calling thread;
* :class:`Parallel` cuts it into ``chunk_size`` blocks, hands each worker one
  contiguous run of blocks (static scheduling) and waits for all of them.

Every output element depends on exactly one input index and numpy's
elementwise loops do not depend on slice length, so all backends produce
bit-identical output.
"""
from __future__ import annotations

import enum
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .coords import CoordinateSystem4D, PxPyPzE4D, Vec4, resolve_dtype
from .transforms import LorentzTransform, apply_to_components

DEFAULT_CHUNK_SIZE = 4096
# Kernels sweep their range in tiles this long so numpy temporaries stay in cache.
TILE = 16384


class DimensionError(ValueError):
    """Batch lengths (or systems/precisions) do not match."""


class ParticleBatch:
    """N Lorentz vectors in one coordinate system and precision.

    Storage is array-of-structures: a 1-D numpy structured array whose record
    holds the system's four fields contiguously.
    """

    __slots__ = ("_system", "_data")

    def __init__(self, system: type[CoordinateSystem4D], data: np.ndarray):
        if not (isinstance(system, type) and issubclass(system, CoordinateSystem4D)):
            raise TypeError("ParticleBatch needs a 4D coordinate system class")
        expected = self.record_dtype(system, data.dtype[0] if data.dtype.names else data.dtype)
        if data.ndim != 1 or data.dtype != expected:
            raise TypeError(f"data must be a 1-D array of {expected}, got {data.dtype} ndim={data.ndim}")
        self._system = system
        self._data = data

    @staticmethod
    def record_dtype(system, dtype) -> np.dtype:
        dt = resolve_dtype(dtype)
        return np.dtype([(name, dt) for name in system.fields])

    @classmethod
    def empty(cls, system, n: int, dtype=None) -> ParticleBatch:
        return cls(system, np.zeros(n, dtype=cls.record_dtype(system, dtype)))

    @classmethod
    def from_columns(cls, system, *columns, dtype=None) -> ParticleBatch:
        if len(columns) != len(system.fields):
            raise TypeError(f"{system.__name__} needs {len(system.fields)} columns")
        if dtype is None:
            dtype = np.asarray(columns[0]).dtype if np.asarray(columns[0]).dtype.kind == "f" else None
        cols = [np.asarray(c) for c in columns]
        n = len(cols[0])
        if any(len(c) != n for c in cols):
            raise DimensionError("columns have different lengths")
        out = cls.empty(system, n, dtype)
        for name, col in zip(system.fields, cols):
            out._data[name] = col
        return out

    @classmethod
    def from_vectors(cls, vectors: Sequence[Vec4], system=None, dtype=None) -> ParticleBatch:
        if not vectors:
            return cls.empty(system or PxPyPzE4D, 0, dtype)
        system = system or vectors[0].system
        dtype = resolve_dtype(dtype or vectors[0].dtype)
        rows = [v.convert(system).components() for v in vectors]
        data = np.array([tuple(r) for r in rows], dtype=cls.record_dtype(system, dtype))
        return cls(system, data)

    @property
    def system(self) -> type[CoordinateSystem4D]:
        return self._system

    @property
    def dtype(self) -> np.dtype:
        return self._data.dtype[0]

    @property
    def data(self) -> np.ndarray:
        return self._data

    def __len__(self) -> int:
        return len(self._data)

    def __getitem__(self, i: int) -> Vec4:
        rec = self._data[i]
        return Vec4(self._system._make(tuple(rec), self.dtype))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def columns(self, lo: int = 0, hi: int | None = None) -> tuple[np.ndarray, ...]:
        """Strided views of each field over ``[lo, hi)``."""
        sl = self._data[lo:hi]
        return tuple(sl[name] for name in self._system.fields)

    def copy(self) -> ParticleBatch:
        return ParticleBatch(self._system, self._data.copy())

    def convert(self, system) -> ParticleBatch:
        if system is self._system:
            return self
        vals = self._system.convert_components(system, *self.columns())
        return ParticleBatch.from_columns(system, *vals, dtype=self.dtype)

    def same_bits(self, other: ParticleBatch) -> bool:
        return (
            self._system is other._system
            and self._data.dtype == other._data.dtype
            and self._data.tobytes() == other._data.tobytes()
        )


# ---------------------------------------------------------------------------
# Backends


class Sequential:
    """Run the whole index range in the calling thread."""

    name = "seq"
    workers = 1

    def run(self, kernel: Callable[[int, int], None], n: int) -> None:
        kernel(0, n)

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __eq__(self, other):
        return isinstance(other, Sequential)

    def __hash__(self):
        return hash(Sequential)


class Parallel:
    """Static contiguous chunking of the index range over a thread pool.

    The pool is created on first use and reused until :meth:`close`, like a
    device queue that stays warm between launches.
    """

    name = "par"

    def __init__(self, workers: int = 4, chunk_size: int = DEFAULT_CHUNK_SIZE):
        if int(workers) < 1:
            raise ValueError(f"worker_count must be >= 1, got {workers}")
        if int(chunk_size) < 1:
            raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
        self.workers = int(workers)
        self.chunk_size = int(chunk_size)
        self._pool: ThreadPoolExecutor | None = None
        self._lock = threading.Lock()

    def partition(self, n: int) -> list[tuple[int, int]]:
        """Per-worker ``(lo, hi)`` ranges; boundaries fall on chunk multiples."""
        n_chunks = -(-n // self.chunk_size)
        ranges = []
        for w in range(self.workers):
            c0 = w * n_chunks // self.workers
            c1 = (w + 1) * n_chunks // self.workers
            lo, hi = c0 * self.chunk_size, min(c1 * self.chunk_size, n)
            if lo < hi:
                ranges.append((lo, hi))
        return ranges

    def _executor(self) -> ThreadPoolExecutor:
        with self._lock:
            if self._pool is None:
                self._pool = ThreadPoolExecutor(self.workers, thread_name_prefix="kinematix")
            return self._pool

    def run(self, kernel: Callable[[int, int], None], n: int) -> None:
        ranges = self.partition(n)
        if len(ranges) <= 1:
            for lo, hi in ranges:
                kernel(lo, hi)
            return
        futures = [self._executor().submit(kernel, lo, hi) for lo, hi in ranges]
        for f in futures:
            f.result()

    def close(self) -> None:
        with self._lock:
            if self._pool is not None:
                self._pool.shutdown(wait=True)
                self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __eq__(self, other):
        return (
            isinstance(other, Parallel)
            and other.workers == self.workers
            and other.chunk_size == self.chunk_size
        )

    def __hash__(self):
        return hash((Parallel, self.workers, self.chunk_size))


SEQUENTIAL = Sequential()


# ---------------------------------------------------------------------------
# Kernels


def _check_pair(v1: ParticleBatch, v2: ParticleBatch) -> None:
    if len(v1) != len(v2):
        raise DimensionError(f"batch lengths differ: {len(v1)} vs {len(v2)}")
    if v1.system is not v2.system or v1.dtype != v2.dtype:
        raise DimensionError(
            f"batches differ in system/precision: {v1.system.__name__}/{v1.dtype} "
            f"vs {v2.system.__name__}/{v2.dtype}"
        )


def _tiles(lo: int, hi: int):
    for start in range(lo, hi, TILE):
        yield start, min(start + TILE, hi)


def invariant_masses_kernel(v1: ParticleBatch, v2: ParticleBatch, out: np.ndarray, lo: int, hi: int) -> None:
    """out[i] = mass(v1[i] + v2[i]) for i in [lo, hi)."""
    system = v1.system
    for t0, t1 in _tiles(lo, hi):
        a = system.to_cartesian(*v1.columns(t0, t1))
        b = system.to_cartesian(*v2.columns(t0, t1))
        w = system.from_cartesian(*(x + y for x, y in zip(a, b)))
        out[t0:t1] = system.mass_of(*w)


def apply_boost_kernel(v: ParticleBatch, t: LorentzTransform, out: ParticleBatch, lo: int, hi: int) -> None:
    """out[i] = t(v[i]) for i in [lo, hi)."""
    for t0, t1 in _tiles(lo, hi):
        vals = apply_to_components(t, v.system, v.columns(t0, t1))
        sl = out.data[t0:t1]
        for name, col in zip(v.system.fields, vals):
            sl[name] = col


def invariant_masses(v1: ParticleBatch, v2: ParticleBatch, backend=SEQUENTIAL) -> np.ndarray:
    """Invariant mass of each pair ``v1[i] + v2[i]``."""
    _check_pair(v1, v2)
    out = np.empty(len(v1), dtype=v1.dtype)
    backend.run(lambda lo, hi: invariant_masses_kernel(v1, v2, out, lo, hi), len(v1))
    return out


def apply_boost(v: ParticleBatch, boost: LorentzTransform, backend=SEQUENTIAL) -> ParticleBatch:
    """Apply a Lorentz transformation to every vector of ``v``."""
    out = ParticleBatch.empty(v.system, len(v), v.dtype)
    backend.run(lambda lo, hi: apply_boost_kernel(v, boost, out, lo, hi), len(v))
    return out


# ---------------------------------------------------------------------------
# Host-side launch wrapper


class Problem(enum.Enum):
    INVARIANT_MASSES = "invariant-masses"
    BOOST = "boost"


_PROBLEMS = {
    Problem.INVARIANT_MASSES: invariant_masses,
    Problem.BOOST: apply_boost,
}


@dataclass(frozen=True)
class DispatchResult:
    output: np.ndarray | ParticleBatch
    duration_ns: int


def _copy_input(x):
    if isinstance(x, ParticleBatch):
        return x.copy()
    return x


def dispatch(problem: Problem | str, *inputs, backend=SEQUENTIAL, copying: bool = False) -> DispatchResult:
    """Run ``problem`` on ``inputs`` and time it with the monotonic clock.

    ``inputs`` are ``(v1, v2)`` for invariant masses and ``(v, boost)`` for
    boosts.  With ``copying`` the batches are duplicated inside the timed
    region first, standing in for host-to-device transfers.
    """
    fn = _PROBLEMS[Problem(problem)]
    t0 = time.perf_counter_ns()
    args = tuple(_copy_input(x) for x in inputs) if copying else inputs
    output = fn(*args, backend=backend)
    t1 = time.perf_counter_ns()
    return DispatchResult(output, t1 - t0)
