"""Acceptance criteria, one test per criterion (or per row of a tabular criterion).

Each criterion prints a PASS / FAIL / SKIP line in the "acceptance criteria"
section of the pytest summary.  Run just this file with::

    pytest tests/test_acceptance.py -v
"""
import itertools
import math
import os
import struct
from fractions import Fraction

import numpy as np
import pytest

from kinematix.bench import BenchConfig, emit, generate_batch, main as bench_main, read_results, run_sweep
from kinematix.coords import SYSTEMS_4D, PxPyPzE4D, Vec4
from kinematix.divergence import analyze, code_divergence, format_fraction, similarity_from_counts
from kinematix.kernels import SEQUENTIAL, Parallel, ParticleBatch, apply_boost, invariant_masses
from kinematix.transforms import Boost, apply, metric_defect

from _sampling import ACCESSORS, CARTESIAN, SYSTEMS, accessor_err, random_cartesian
from test_divergence import three_platforms, write_manifest, write_tree

criterion = pytest.mark.criterion


# -- code similarity against the published table --------------------------------

TABLE_ROWS = [
    pytest.param(10365, 10048, "0.9694", id="cuda-masses"),
    pytest.param(10276, 9983, "0.9715", id="sycl-masses"),
    pytest.param(
        10358, 10041, "0.9693", id="cuda-boost",
        marks=pytest.mark.xfail(
            strict=True,
            reason="10041/10358 = 0.96939564 rounds to 0.9694 at 4 d.p.; the published 0.9693 is "
            "truncation, which contradicts the 0.9715 row (9983/10276 = 0.97148696)",
        ),
    ),
    pytest.param(10335, 10042, "0.9716", id="sycl-boost"),
]


@criterion("similarity-vs-table")
@pytest.mark.parametrize("union, inter, published", TABLE_ROWS)
def test_similarity_matches_published_table(union, inter, published, record_property):
    s = similarity_from_counts(union, inter)
    shown = format_fraction(s)
    record_property("detail", f"{inter}/{union} -> {shown}, published {published}")
    assert s == Fraction(inter, union)
    assert shown == published


# -- divergence oracle --------------------------------------------------------


@criterion("divergence-oracle")
def test_divergence_oracle(tmp_path, record_property):
    # |A| = 100, B = first 90 of A, C = first 70 plus last 10 of A:
    # s_AB = 90/100, s_AC = 80/100, s_BC = 70/100, CD = (1/10 + 2/10 + 3/10) / 3 = 1/5.
    sets = three_platforms()
    hand = (Fraction(1, 10) + Fraction(2, 10) + Fraction(3, 10)) / 3
    assert code_divergence(list(sets)) == hand
    for s in sets:
        write_tree(tmp_path / s.platform, {"f.c": "\n".join(sorted(r.text + ";" for r in s.records))})
    report = analyze(write_manifest(tmp_path / "m.toml", {s.platform: {"root": s.platform, "files": ["f.c"]} for s in sets}))
    cd = report.divergence["invariant-masses"]
    record_property("detail", f"CD = {cd} (hand {hand})")
    assert cd == hand and isinstance(cd, Fraction)


# -- Lorentz invariance and metric --------------------------------------------


def random_betas(rng, n, max_norm=0.99):
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1)[:, None]
    return d * rng.uniform(0, max_norm, (n, 1))


@criterion("lorentz-invariance")
@pytest.mark.parametrize("precision, tol", [("double", 1e-9), ("single", 5e-3)])
def test_lorentz_invariance(precision, tol, record_property):
    rng = np.random.default_rng(2024)
    dt = np.float64 if precision == "double" else np.float32
    n_per_system = 2500  # 4 systems: 10^4 pairs
    worst = 0.0
    for k, system in enumerate(SYSTEMS_4D):
        cart = random_cartesian(4, 2 * n_per_system, rng, dt)
        cart = tuple(c[:n_per_system] for c in cart)
        comps = PxPyPzE4D.convert_components(system, *cart)
        betas = random_betas(rng, n_per_system)
        for i in range(n_per_system):
            v = Vec4(system(*(c[i] for c in comps), dtype=dt))
            w = apply(Boost(*betas[i], dtype=dt), v)
            m0, m1 = float(v.mass()), float(w.mass())
            worst = max(worst, abs(m1 - m0) / max(abs(m0), 1.0))
    record_property("detail", f"worst relative mass drift {worst:.3g} < {tol:g}")
    assert worst < tol


@criterion("metric-preservation")
def test_metric_preservation(record_property):
    rng = np.random.default_rng(99)
    worst = max(metric_defect(Boost(*b).matrix) for b in random_betas(rng, 1000))
    record_property("detail", f"worst |L^T g L - g| = {worst:.3g} < 1e-12")
    assert worst < 1e-12


# -- conversions --------------------------------------------------------------


@criterion("round-trip")
@pytest.mark.parametrize("precision, tol", [("double", 1e-12), ("single", 1e-5)])
def test_round_trip_conversions(precision, tol, record_property):
    dt = np.float64 if precision == "double" else np.float32
    rng = np.random.default_rng(31)
    worst, where, pairs = 0.0, "", 0
    for dim in (2, 3, 4):
        for a_sys, b_sys in itertools.permutations(SYSTEMS[dim], 2):
            cart = random_cartesian(dim, 20000, rng, dt)
            cart = tuple(c[:10000] for c in cart)
            assert len(cart[0]) == 10000
            a = CARTESIAN[dim].convert_components(a_sys, *cart)
            back = b_sys.convert_components(a_sys, *a_sys.convert_components(b_sys, *a))
            pairs += 1
            for acc in ACCESSORS[dim]:
                err = float(np.max(accessor_err(a_sys, acc, a, back)))
                if err > worst:
                    worst, where = err, f"{a_sys.__name__}->{b_sys.__name__}.{acc}"
    record_property("detail", f"{pairs} ordered pairs, worst {worst:.3g} at {where}, bound {tol:g}")
    assert worst < tol


# -- kernels ------------------------------------------------------------------


@pytest.fixture(scope="module")
def equivalence_inputs():
    return {n: (generate_batch(n, 5), generate_batch(n, 6)) for n in (0, 1, 1000, 2**20)}


@criterion("backend-equivalence")
@pytest.mark.parametrize("problem", ["invariant-masses", "boost"])
def test_backend_equivalence(problem, equivalence_inputs, record_property):
    boost = Boost(0.2, -0.3, 0.4)
    checked = 0
    for n, (v1, v2) in equivalence_inputs.items():
        if problem == "invariant-masses":
            ref = invariant_masses(v1, v2, SEQUENTIAL).tobytes()
        else:
            ref = apply_boost(v1, boost, SEQUENTIAL).data.tobytes()
        for workers, chunk in itertools.product((1, 2, 4, 8), (1, 64, 4096)):
            with Parallel(workers, chunk) as par:
                if problem == "invariant-masses":
                    got = invariant_masses(v1, v2, par).tobytes()
                else:
                    got = apply_boost(v1, boost, par).data.tobytes()
            assert got == ref, (n, workers, chunk)
            checked += 1
    record_property("detail", f"{checked} (N, workers, chunk) configurations bitwise equal")


def _bits(x: float) -> int:
    return struct.unpack("<q", struct.pack("<d", x))[0]


@criterion("brute-force-oracle")
def test_brute_force_oracle(record_property):
    v1 = generate_batch(256, 17, "double", PxPyPzE4D)
    v2 = generate_batch(256, 18, "double", PxPyPzE4D)
    out = invariant_masses(v1, v2)
    rows1, rows2 = v1.data.tolist(), v2.data.tolist()
    mismatches = 0
    for k in range(256):
        px1, py1, pz1, e1 = rows1[k]
        px2, py2, pz2, e2 = rows2[k]
        px, py, pz, e = px1 + px2, py1 + py2, pz1 + pz2, e1 + e2
        m2 = e * e - (px * px + py * py + pz * pz)
        m = math.copysign(math.sqrt(abs(m2)), m2)
        mismatches += _bits(m) != _bits(float(out[k]))
    record_property("detail", f"{256 - mismatches}/256 elements bit-identical")
    assert mismatches == 0


# -- benchmark protocol -------------------------------------------------------


def physical_cores() -> int:
    try:
        import psutil

        cores = psutil.cpu_count(logical=False) or 1
    except ImportError:
        cores = os.cpu_count() or 1
    if hasattr(os, "sched_getaffinity"):
        cores = min(cores, len(os.sched_getaffinity(0)))
    return cores


@criterion("weak-scaling-seq")
def test_sequential_speedup_is_one(tmp_path, record_property):
    out = tmp_path / "seq"
    assert bench_main(["--backend", "seq", "--sizes", "2^10..2^22", "--out", str(out), "-q"]) == 0
    recs = read_results(out / "results.csv")
    record_property("detail", f"{len(recs)} sizes, speedups {sorted({r.speedup for r in recs})}")
    assert [r.n for r in recs] == [2**k for k in range(10, 23)]
    assert all(r.speedup == 1.0 for r in recs)


@criterion("weak-scaling-par4")
def test_parallel_speedup(tmp_path, record_property):
    cores = physical_cores()
    if cores < 4:
        pytest.skip(f"host has {cores} physical core(s) available; criterion requires >= 4")
    out = tmp_path / "par"
    assert bench_main(["--backend", "par", "--workers", "4", "--sizes", "2^22", "--out", str(out), "-q"]) == 0
    (rec,) = read_results(out / "results.csv")
    record_property("detail", f"speedup {rec.speedup:.3f} at N=2^22 with 4 workers")
    assert rec.speedup >= 2.0


@criterion("csv-round-trip")
def test_csv_round_trip(tmp_path, record_property):
    sizes = (2**10, 2**12, 2**14)
    recs = run_sweep(BenchConfig(backend="seq", sizes=sizes))
    recs += run_sweep(BenchConfig(backend="par", workers=2, sizes=sizes))
    csv_path, dat_path = emit(recs, tmp_path)
    parsed = read_results(csv_path)
    series = dat_path.read_text().count("# series")
    record_property("detail", f"{len(parsed)} records re-parsed, {series} plot series")
    assert parsed == recs
    assert series == 2
