"""Weak-scaling benchmark harness.

For every input size the harness runs the single-worker Sequential baseline
and the target backend back to back in one warm process: one untimed warm-up
each, then ``repeats`` timed dispatches.  The best (minimum) duration of each
side gives ``speedup = baseline_best / best``.  Target outputs must match the
baseline bit for bit or the sweep aborts.

Example::

    kinematix-bench --problem invariant-masses --precision double \\
        --backend par --workers 4 --sizes 2^10..2^24 --out results/
"""
from __future__ import annotations

import argparse
import csv
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .coords import PtEtaPhiM4D, Vec4, precision_name, resolve_dtype, system_by_name
from .kernels import (
    DEFAULT_CHUNK_SIZE,
    SEQUENTIAL,
    Parallel,
    ParticleBatch,
    Problem,
    dispatch,
)
from .transforms import Boost

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CORRECTNESS = 3
EXIT_IO = 4

PT_RANGE = (1.0, 100.0)
ETA_RANGE = (-2.5, 2.5)
MASS_RANGE = (0.1, 10.0)
# Fixed velocity for the boost problem; the protocol does not prescribe one.
BENCH_BETA = (0.2, -0.3, 0.4)

DEFAULT_SIZES = tuple(2**k for k in range(10, 25))

CSV_COLUMNS = (
    "problem",
    "precision",
    "backend",
    "workers",
    "copying",
    "N",
    "durations_ns",
    "best_ns",
    "baseline_best_ns",
    "speedup",
)


class ConfigError(ValueError):
    pass


class CorrectnessError(RuntimeError):
    """Target backend output differs from the Sequential baseline."""


@dataclass(frozen=True)
class BenchConfig:
    problem: Problem = Problem.INVARIANT_MASSES
    precision: str = "double"
    backend: str = "seq"
    workers: int = 1
    copying: bool = False
    sizes: tuple[int, ...] = DEFAULT_SIZES
    repeats: int = 3
    seed: int = 0
    out: Path | None = None
    system: str = "PxPyPzE4D"
    chunk_size: int = DEFAULT_CHUNK_SIZE

    def __post_init__(self):
        try:
            object.__setattr__(self, "problem", Problem(self.problem))
            object.__setattr__(self, "precision", precision_name(self.precision))
            system_by_name(self.system)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.backend not in ("seq", "par"):
            raise ConfigError(f"backend must be 'seq' or 'par', got {self.backend!r}")
        if self.workers < 1 or self.chunk_size < 1:
            raise ConfigError("workers and chunk size must be >= 1")
        if self.backend == "seq" and self.workers != 1:
            raise ConfigError("the sequential backend has exactly one worker")
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")
        sizes = tuple(int(n) for n in self.sizes)
        if not sizes or any(n < 1 for n in sizes):
            raise ConfigError("sizes must be non-empty and each >= 1")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ConfigError(f"sizes must be strictly increasing: {sizes}")
        object.__setattr__(self, "sizes", sizes)

    def make_backend(self):
        if self.backend == "seq":
            return SEQUENTIAL
        return Parallel(self.workers, self.chunk_size)


@dataclass(frozen=True)
class TimingRecord:
    problem: str
    precision: str
    backend: str
    workers: int
    copying: bool
    n: int
    durations_ns: tuple[int, ...]
    best_ns: int
    baseline_best_ns: int
    speedup: float = field(init=False)

    def __post_init__(self):
        if self.best_ns != min(self.durations_ns):
            raise ValueError("best_ns must be the minimum of durations_ns")
        object.__setattr__(self, "speedup", self.baseline_best_ns / max(self.best_ns, 1))


# ---------------------------------------------------------------------------
# Inputs


def _draw(rng: np.random.Generator, n: int, dt: np.dtype):
    pt = rng.uniform(*PT_RANGE, n)
    eta = rng.uniform(*ETA_RANGE, n)
    phi = rng.uniform(-np.pi, np.pi, n)
    phi[phi == -np.pi] = np.pi
    m = rng.uniform(*MASS_RANGE, n)
    return [c.astype(dt) for c in (pt, eta, phi, m)]


def generate_batch(n: int, seed: int, precision="double", system=PtEtaPhiM4D) -> ParticleBatch:
    """Deterministic batch of ``n`` timelike particles.

    Drawn in (pt, eta, phi, m) with pt ~ U[1, 100], eta ~ U[-2.5, 2.5],
    phi ~ U(-pi, pi], m ~ U[0.1, 10], then converted to ``system``.  Rounding
    in the target precision can push a nearly lightlike particle to m^2 <= 0;
    such entries are redrawn so every element is strictly timelike.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if isinstance(system, str):
        system = system_by_name(system)
    dt = resolve_dtype(precision)
    rng = np.random.default_rng(seed)
    cols = _draw(rng, n, dt)
    while True:
        conv = PtEtaPhiM4D.convert_components(system, *cols)
        bad = np.flatnonzero(~(np.asarray(system.mass2_of(*conv)) > 0))
        if bad.size == 0:
            break
        fresh = _draw(rng, bad.size, dt)
        for c, f in zip(cols, fresh):
            c[bad] = f
    return ParticleBatch.from_columns(system, *conv, dtype=dt)


def make_inputs(config: BenchConfig, n: int) -> tuple:
    system = system_by_name(config.system)
    v1 = generate_batch(n, config.seed, config.precision, system)
    if config.problem is Problem.INVARIANT_MASSES:
        return v1, generate_batch(n, config.seed + 1, config.precision, system)
    return v1, Boost(*BENCH_BETA, dtype=config.precision)


def _same_output(a, b) -> bool:
    if isinstance(a, ParticleBatch):
        return a.same_bits(b)
    return a.dtype == b.dtype and a.tobytes() == b.tobytes()


# ---------------------------------------------------------------------------
# Sweep


def _time(problem, inputs, backend, copying, repeats, reference=None):
    """Warm-up plus ``repeats`` timed runs; returns (durations, output)."""
    warm = dispatch(problem, *inputs, backend=backend, copying=copying).output
    if reference is not None and not _same_output(warm, reference):
        raise CorrectnessError("warm-up output differs from baseline")
    reference = warm if reference is None else reference
    durations = []
    for _ in range(repeats):
        r = dispatch(problem, *inputs, backend=backend, copying=copying)
        if not _same_output(r.output, reference):
            raise CorrectnessError("timed output differs from baseline")
        durations.append(r.duration_ns)
    return tuple(durations), reference


def run_sweep(config: BenchConfig, progress: Callable[[TimingRecord], None] | None = None) -> list[TimingRecord]:
    records = []
    backend = config.make_backend()
    try:
        for n in config.sizes:
            inputs = make_inputs(config, n)
            base_durations, ref = _time(config.problem, inputs, SEQUENTIAL, config.copying, config.repeats)
            if config.backend == "seq":
                # The baseline run *is* the target run: speedup is exactly 1.
                durations = base_durations
            else:
                try:
                    durations, _ = _time(config.problem, inputs, backend, config.copying, config.repeats, ref)
                except CorrectnessError as exc:
                    raise CorrectnessError(
                        f"{config.backend} x{config.workers} at N={n}: {exc}"
                    ) from None
            rec = TimingRecord(
                problem=config.problem.value,
                precision=config.precision,
                backend=config.backend,
                workers=config.workers,
                copying=config.copying,
                n=n,
                durations_ns=durations,
                best_ns=min(durations),
                baseline_best_ns=min(base_durations),
            )
            records.append(rec)
            if progress is not None:
                progress(rec)
    finally:
        backend.close()
    return records


# ---------------------------------------------------------------------------
# Output


def _series_key(r: TimingRecord):
    return (r.problem, r.precision, r.backend, r.workers, r.copying)


def emit(records: Sequence[TimingRecord], out_dir: str | os.PathLike) -> tuple[Path, Path]:
    """Write ``results.csv`` and ``scaling.dat`` into ``out_dir``."""
    if not records:
        raise ValueError("no records to emit")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from exc
    csv_path = out / "results.csv"
    dat_path = out / "scaling.dat"

    rows = [
        [
            r.problem,
            r.precision,
            r.backend,
            str(r.workers),
            "1" if r.copying else "0",
            str(r.n),
            ";".join(str(d) for d in r.durations_ns),
            str(r.best_ns),
            str(r.baseline_best_ns),
            repr(r.speedup),
        ]
        for r in records
    ]
    series: dict[tuple, list[TimingRecord]] = {}
    for r in records:
        series.setdefault(_series_key(r), []).append(r)
    dat = ["# weak scaling against single-worker sequential execution", "# columns: N speedup"]
    for i, (key, recs) in enumerate(series.items()):
        problem, precision, backend, workers, copying = key
        if i:
            dat += ["", ""]
        dat.append(
            f"# series {i}: problem={problem} precision={precision} backend={backend} "
            f"workers={workers} copying={int(copying)}"
        )
        dat += [f"{r.n} {r.speedup!r}" for r in recs]

    for path, write in ((csv_path, lambda fh: csv.writer(fh, lineterminator="\n").writerows([CSV_COLUMNS, *rows])),
                        (dat_path, lambda fh: fh.write("\n".join(dat) + "\n"))):
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                write(fh)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return csv_path, dat_path


def read_results(path: str | os.PathLike) -> list[TimingRecord]:
    """Parse a ``results.csv`` written by :func:`emit`."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        records = []
        for row in reader:
            rec = TimingRecord(
                problem=row["problem"],
                precision=row["precision"],
                backend=row["backend"],
                workers=int(row["workers"]),
                copying=row["copying"] == "1",
                n=int(row["N"]),
                durations_ns=tuple(int(d) for d in row["durations_ns"].split(";")),
                best_ns=int(row["best_ns"]),
                baseline_best_ns=int(row["baseline_best_ns"]),
            )
            if rec.speedup != float(row["speedup"]):
                raise ValueError(f"{path}: speedup column inconsistent at N={rec.n}")
            records.append(rec)
    return records


def format_vector(v: Vec4) -> str:
    """Host-side debug rendering; the core vector types deliberately have none."""
    fields = ", ".join(f"{name}={float(x):.6g}" for name, x in zip(v.system.fields, v.components()))
    return f"{v.system.__name__}<{precision_name(v.dtype)}>({fields})"


# ---------------------------------------------------------------------------
# CLI

_POW2_RANGE = re.compile(r"^2\^(\d+)\.\.2\^(\d+)$")
_POW2 = re.compile(r"^2\^(\d+)$")


def parse_sizes(text: str) -> tuple[int, ...]:
    """``"1024,4096"``, ``"2^10,2^12"`` or ``"2^10..2^24"`` (inclusive power-of-two range)."""
    sizes: list[int] = []
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        if m := _POW2_RANGE.match(tok):
            lo, hi = int(m[1]), int(m[2])
            if hi < lo:
                raise ConfigError(f"empty size range {tok!r}")
            sizes += [2**k for k in range(lo, hi + 1)]
        elif m := _POW2.match(tok):
            sizes.append(2 ** int(m[1]))
        else:
            try:
                sizes.append(int(tok))
            except ValueError:
                raise ConfigError(f"bad size {tok!r}") from None
    return tuple(sizes)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kinematix-bench", description="Weak-scaling benchmark for the batch kernels.")
    p.add_argument("--problem", choices=[x.value for x in Problem], default=Problem.INVARIANT_MASSES.value)
    p.add_argument("--precision", choices=("single", "double"), default="double")
    p.add_argument("--backend", choices=("seq", "par"), default="seq")
    p.add_argument("--workers", type=int, default=None, help="worker threads for --backend par (default 4)")
    p.add_argument("--chunk-size", type=int, default=DEFAULT_CHUNK_SIZE)
    p.add_argument("--copying", action="store_true", help="copy inputs inside the timed region")
    p.add_argument("--sizes", default="2^10..2^24", help="comma list and/or 2^a..2^b range")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--system", default="PxPyPzE4D", help="coordinate system of the generated particles")
    p.add_argument("--out", default="bench-out", help="output directory")
    p.add_argument("--show-sample", type=int, default=0, metavar="K", help="print the first K input vectors")
    p.add_argument("-q", "--quiet", action="store_true")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        workers = args.workers if args.workers is not None else (4 if args.backend == "par" else 1)
        config = BenchConfig(
            problem=args.problem,
            precision=args.precision,
            backend=args.backend,
            workers=workers,
            copying=args.copying,
            sizes=parse_sizes(args.sizes),
            repeats=args.repeats,
            seed=args.seed,
            out=Path(args.out),
            system=args.system,
            chunk_size=args.chunk_size,
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        config.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"I/O error: cannot create output directory {config.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO

    if args.show_sample:
        sample = make_inputs(config, args.show_sample)[0]
        for v in sample:
            print(format_vector(v))

    def report(r: TimingRecord):
        if not args.quiet:
            print(
                f"N={r.n:>10}  best={r.best_ns / 1e6:10.3f} ms  "
                f"baseline={r.baseline_best_ns / 1e6:10.3f} ms  speedup={r.speedup:.3f}"
            )

    try:
        records = run_sweep(config, report)
    except CorrectnessError as exc:
        print(f"correctness failure: {exc}", file=sys.stderr)
        return EXIT_CORRECTNESS
    try:
        csv_path, dat_path = emit(records, config.out)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if not args.quiet:
        print(f"wrote {csv_path} and {dat_path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
