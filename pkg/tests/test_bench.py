import csv
import math

import numpy as np
import pytest

from kinematix import bench, kernels
from kinematix.bench import (
    CSV_COLUMNS,
    EXIT_CONFIG,
    EXIT_CORRECTNESS,
    EXIT_IO,
    EXIT_OK,
    BenchConfig,
    ConfigError,
    CorrectnessError,
    TimingRecord,
    emit,
    format_vector,
    generate_batch,
    main,
    make_inputs,
    parse_sizes,
    read_results,
    run_sweep,
)
from kinematix.coords import SYSTEMS_4D, PtEtaPhiM4D, PxPyPzE4D
from kinematix.kernels import Parallel, Problem


def record(**kw):
    base = dict(
        problem="boost", precision="double", backend="par", workers=2, copying=False, n=1024,
        durations_ns=(30, 10, 20), best_ns=10, baseline_best_ns=25,
    )
    base.update(kw)
    return TimingRecord(**base)


# -- generation ---------------------------------------------------------------


def test_empty_batch():
    b = generate_batch(0, 1)
    assert len(b) == 0 and b.system is PtEtaPhiM4D


@pytest.mark.parametrize("precision", ["single", "double"])
@pytest.mark.parametrize("system", SYSTEMS_4D)
def test_generation_is_deterministic(precision, system):
    a = generate_batch(5000, 42, precision, system)
    b = generate_batch(5000, 42, precision, system)
    assert a.same_bits(b)
    assert not a.same_bits(generate_batch(5000, 43, precision, system))


@pytest.mark.parametrize("precision", ["single", "double"])
def test_distribution_bounds(precision):
    b = generate_batch(10**5, 7, precision)
    pt, eta, phi, m = b.columns()
    assert b.dtype == np.dtype(np.float32 if precision == "single" else np.float64)
    assert pt.min() >= 1 and pt.max() <= 100
    assert eta.min() >= -2.5 and eta.max() <= 2.5
    assert phi.min() > -math.pi and phi.max() <= np.float32(math.pi)
    assert m.min() >= np.float32(0.1) and m.max() <= 10


@pytest.mark.parametrize("precision", ["single", "double"])
@pytest.mark.parametrize("system", SYSTEMS_4D)
def test_generated_vectors_are_timelike(precision, system):
    b = generate_batch(10**5, 3, precision, system)
    assert np.all(system.mass2_of(*b.columns()) > 0)


def test_generator_accepts_system_names():
    assert generate_batch(3, 0, system="PxPyPzE").system is PxPyPzE4D


def test_invariant_mass_inputs_use_distinct_streams():
    v1, v2 = make_inputs(BenchConfig(sizes=(10,)), 10)
    assert not v1.same_bits(v2)
    v, boost = make_inputs(BenchConfig(problem="boost", sizes=(10,)), 10)
    assert tuple(boost.beta) == bench.BENCH_BETA


# -- config -------------------------------------------------------------------


@pytest.mark.parametrize(
    "kw",
    [
        dict(sizes=()),
        dict(sizes=(4, 4)),
        dict(sizes=(8, 4)),
        dict(sizes=(0, 4)),
        dict(repeats=0),
        dict(backend="gpu"),
        dict(backend="seq", workers=4),
        dict(backend="par", workers=0),
        dict(precision="half"),
        dict(problem="sort"),
        dict(system="Nope4D"),
    ],
)
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        BenchConfig(**kw)


def test_parse_sizes():
    assert parse_sizes("1,2,3") == (1, 2, 3)
    assert parse_sizes("2^10..2^12") == (1024, 2048, 4096)
    assert parse_sizes("2^3, 100") == (8, 100)
    with pytest.raises(ConfigError):
        parse_sizes("ten")
    with pytest.raises(ConfigError):
        parse_sizes("2^5..2^3")


# -- records ------------------------------------------------------------------


def test_record_speedup_and_best():
    r = record()
    assert r.speedup == 2.5
    with pytest.raises(ValueError):
        record(best_ns=20)


# -- sweep --------------------------------------------------------------------


@pytest.mark.parametrize("problem", ["invariant-masses", "boost"])
def test_sequential_speedup_is_exactly_one(problem):
    recs = run_sweep(BenchConfig(problem=problem, sizes=(64, 1000, 4096), repeats=3))
    assert [r.n for r in recs] == [64, 1000, 4096]
    for r in recs:
        assert r.speedup == 1.0
        assert len(r.durations_ns) == 3
        assert r.best_ns == min(r.durations_ns)
        assert all(r.best_ns <= d for d in r.durations_ns)


def test_parallel_sweep(monkeypatch):
    seen = []
    recs = run_sweep(
        BenchConfig(backend="par", workers=3, chunk_size=100, sizes=(500, 5000), repeats=2, precision="single"),
        seen.append,
    )
    assert seen == recs
    assert all(r.speedup > 0 and r.workers == 3 and r.precision == "single" for r in recs)


def test_copying_sweep_runs():
    (r,) = run_sweep(BenchConfig(problem="boost", copying=True, sizes=(2000,), repeats=1))
    assert r.copying and r.speedup == 1.0


def test_correctness_gate(monkeypatch):
    real = kernels.invariant_masses

    def faulty(v1, v2, backend=kernels.SEQUENTIAL):
        out = real(v1, v2, backend)
        if isinstance(backend, Parallel):
            out[-1] = np.nextafter(out[-1], np.inf)
        return out

    monkeypatch.setitem(kernels._PROBLEMS, Problem.INVARIANT_MASSES, faulty)
    with pytest.raises(CorrectnessError, match="N=100"):
        run_sweep(BenchConfig(backend="par", workers=2, sizes=(100,)))


def test_cli_correctness_exit_code(monkeypatch, tmp_path, capsys):
    real = kernels.apply_boost

    def faulty(v, boost, backend=kernels.SEQUENTIAL):
        out = real(v, boost, backend)
        if isinstance(backend, Parallel):
            out.data[out.system.fields[0]][0] += 1
        return out

    monkeypatch.setitem(kernels._PROBLEMS, Problem.BOOST, faulty)
    code = main(["--problem", "boost", "--backend", "par", "--workers", "2", "--sizes", "64", "--out", str(tmp_path / "o")])
    assert code == EXIT_CORRECTNESS
    assert not (tmp_path / "o" / "results.csv").exists()
    assert "correctness" in capsys.readouterr().err


def test_more_repeats_never_raise_best():
    durations = (50, 40, 45, 30, 60)
    bests = [min(durations[:k]) for k in range(1, len(durations) + 1)]
    assert bests == sorted(bests, reverse=True)


# -- output -------------------------------------------------------------------


def test_emit_single_record(tmp_path):
    csv_path, dat_path = emit([record()], tmp_path)
    rows = list(csv.reader(csv_path.open()))
    assert rows[0] == list(CSV_COLUMNS)
    assert len(rows) == 2
    assert rows[1] == ["boost", "double", "par", "2", "0", "1024", "30;10;20", "10", "25", "2.5"]
    assert read_results(csv_path) == [record()]
    assert dat_path.read_text().splitlines()[-1] == "1024 2.5"


def test_emit_two_series(tmp_path):
    recs = [record(backend="seq", workers=1, n=n, baseline_best_ns=10) for n in (1, 2, 3)]
    recs += [record(n=n) for n in (1, 2, 3)]
    _, dat_path = emit(recs, tmp_path)
    text = dat_path.read_text()
    blocks = [b for b in text.split("\n\n\n")]
    assert len(blocks) == 2
    for b in blocks:
        points = [ln for ln in b.splitlines() if ln and not ln.startswith("#")]
        assert [p.split()[0] for p in points] == ["1", "2", "3"]
    assert "backend=seq" in blocks[0] and "backend=par" in blocks[1]


def test_emit_is_byte_stable(tmp_path):
    recs = [record(n=n) for n in (10, 20)]
    a = emit(recs, tmp_path / "a")
    b = emit(recs, tmp_path / "b")
    for x, y in zip(a, b):
        assert x.read_bytes() == y.read_bytes()


def test_emit_requires_records(tmp_path):
    with pytest.raises(ValueError):
        emit([], tmp_path)


def test_emit_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError, match="file"):
        emit([record()], blocker / "sub")


def test_read_results_rejects_inconsistent_speedup(tmp_path):
    csv_path, _ = emit([record()], tmp_path)
    csv_path.write_text(csv_path.read_text().replace("2.5", "3.0"))
    with pytest.raises(ValueError, match="speedup"):
        read_results(csv_path)


def test_sweep_round_trip(tmp_path):
    recs = run_sweep(BenchConfig(sizes=(16, 32), repeats=2))
    csv_path, _ = emit(recs, tmp_path)
    assert read_results(csv_path) == recs


# -- CLI ----------------------------------------------------------------------


def test_cli_success(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["--sizes", "2^4..2^6", "--repeats", "2", "--out", str(out), "--show-sample", "2"]) == EXIT_OK
    text = capsys.readouterr().out
    assert text.count("PxPyPzE4D<double>(") == 2
    recs = read_results(out / "results.csv")
    assert [r.n for r in recs] == [16, 32, 64]
    assert all(r.speedup == 1.0 for r in recs)


def test_cli_config_errors(tmp_path):
    assert main(["--sizes", "8,4", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["--repeats", "0", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["--backend", "seq", "--workers", "3", "--out", str(tmp_path)]) == EXIT_CONFIG
    with pytest.raises(SystemExit) as e:
        main(["--precision", "quad"])
    assert e.value.code == 2


def test_cli_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["--sizes", "8", "--out", str(blocker / "x")]) == EXIT_IO


def test_exit_codes_distinct():
    assert len({EXIT_OK, EXIT_CONFIG, EXIT_CORRECTNESS, EXIT_IO}) == 4


def test_format_vector():
    v = generate_batch(1, 0)[0]
    assert format_vector(v).startswith("PtEtaPhiM4D<double>(pt=")
