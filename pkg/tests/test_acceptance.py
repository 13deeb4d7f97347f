"""End-to-end acceptance gate.

Each test covers one release criterion (A1-A9) and prints a single
PASS line when it holds; any assertion failure fails the gate.
"""

import filecmp
import statistics
import time

import numpy as np
import pytest

from meshslice import (
    Mesh,
    PlaneSpec,
    SweepSpec,
    analyze,
    compute_curvature,
    decimate,
    default_snap_tolerance,
    generate,
    sampled_hausdorff,
    slice_axial,
    slice_mesh,
    topology_summary,
)
from meshslice import primitives
from conftest import merge_meshes
from test_slicing import (
    canonical_multiset,
    oracle_segments,
    random_hull,
    random_plane,
    random_soup,
)


def report(capsys, line):
    with capsys.disabled():
        print(line)


# ---------------------------------------------------------------------------
# shared large mesh: built and decimated once, reused by A6 and A7


@pytest.fixture(scope="module")
def big_pair():
    mesh = primitives.torus(1036, 516, major_radius=2.0, minor_radius=0.5)
    optimized = decimate(mesh, 0.5)
    return mesh, optimized


def test_a1_oblique_section_shape(capsys):
    t0 = time.perf_counter()
    radius = 12.25
    mesh = primitives.cylinder(
        radius=radius, height=60.0, segments=1024, rings=2, capped=True
    )

    perp = slice_axial(mesh, "z", 0.0)
    assert len(perp.loops) == 1
    m = perp.loops[0].metrics
    assert m.min_feret == pytest.approx(24.5, rel=0.005)
    assert m.max_feret == pytest.approx(24.5, rel=0.005)

    tilt = np.radians(30.0)
    plane = PlaneSpec.from_direction((0.0, np.sin(tilt), np.cos(tilt)), 0.0)
    oblique = slice_mesh(mesh, plane)
    assert len(oblique.loops) == 1
    m = oblique.loops[0].metrics
    assert m.max_feret == pytest.approx(24.5 / np.cos(tilt), rel=0.01)
    assert m.min_feret == pytest.approx(24.5, rel=0.01)

    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    report(
        capsys,
        f"A1 oblique-section shape: PASS "
        f"(perp {perp.loops[0].metrics.max_feret:.3f}, "
        f"tilted {m.max_feret:.3f}/{m.min_feret:.3f}, {elapsed:.2f}s)",
    )


def test_a2_brute_force_oracle(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    mismatches = 0
    for trial in range(100):
        mesh = (
            random_hull(rng, rng.integers(20, 120))
            if trial % 2
            else random_soup(rng, int(rng.integers(10, 167)))
        )
        assert mesh.face_count <= 500
        tol = default_snap_tolerance(mesh)
        for _ in range(10):
            plane = random_plane(rng, mesh)
            got = slice_mesh(mesh, plane)
            want = oracle_segments(mesh, plane, tol)
            want_arr = (
                np.array(want).reshape(-1, 2, 3)
                if want
                else np.empty((0, 2, 3))
            )
            if canonical_multiset(got.segments, tol) != canonical_multiset(
                want_arr, tol
            ):
                mismatches += 1
    elapsed = time.perf_counter() - t0
    assert mismatches == 0
    assert elapsed < 30.0
    report(
        capsys,
        f"A2 brute-force slicing oracle: PASS "
        f"(1000 plane/mesh pairs, 0 mismatches, {elapsed:.1f}s)",
    )


def test_a3_rotation_axial_equivalence(capsys):
    from scipy.spatial import cKDTree
    from meshslice import transform_mesh

    rng = np.random.default_rng(71)
    mesh = primitives.icosphere(3)
    tol = 1e-6 * mesh.bbox_diagonal
    failures = 0
    checked = 0
    while checked < 20:
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        offset = float(rng.uniform(-0.8, 0.8))  # always intersects the sphere
        plane = PlaneSpec(tuple(n), offset)
        direct = slice_mesh(mesh, plane)
        if not direct.loops:
            continue
        checked += 1

        y = np.array([0.0, 1.0, 0.0])
        v = np.cross(n, y)
        c = float(n @ y)
        if np.linalg.norm(v) < 1e-12:
            rot = np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
        else:
            k = np.array(
                [[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]]
            )
            rot = np.eye(3) + k + k @ k / (1 + c)
        axial = slice_axial(
            transform_mesh(mesh, rot, np.zeros(3)), "y", offset
        )
        a = np.vstack([lp.points for lp in direct.loops])
        b = np.vstack([lp.points for lp in axial.loops]) @ rot
        d1, _ = cKDTree(b).query(a)
        d2, _ = cKDTree(a).query(b)
        if max(d1.max(), d2.max()) > tol:
            failures += 1
    assert failures == 0
    report(
        capsys,
        f"A3 rotation-axial equivalence: PASS (20 planes, 0 failures)",
    )


def test_a4_watertight_closure(capsys):
    rng = np.random.default_rng(404)
    fixtures = {
        "cube": primitives.cube(),
        "icosphere": primitives.icosphere(3),
        "torus": primitives.torus(48, 24),
    }
    total_loops = 0
    for name, mesh in fixtures.items():
        tol = default_snap_tolerance(mesh)
        hits = 0
        while hits < 50:
            plane = random_plane(rng, mesh)
            # non-tangent: keep every vertex clear of the snap band
            d = mesh.vertices @ np.asarray(plane.normal) - plane.offset
            if np.abs(d).min() <= 10 * tol:
                continue
            result = slice_mesh(mesh, plane)
            if not result.loops:
                continue
            hits += 1
            assert not result.open_chains, name
            for lp in result.loops:
                assert len(lp.points) >= 3
                assert lp.metrics.area > 0
                assert lp.metrics.perimeter > 0
                on_plane = np.abs(
                    lp.points @ np.asarray(plane.normal) - plane.offset
                )
                assert on_plane.max() <= 1e-6 * mesh.bbox_diagonal
                total_loops += 1

    mid = slice_axial(fixtures["torus"], "z", 0.0)
    assert len(mid.loops) == 2
    assert not mid.open_chains
    report(
        capsys,
        f"A4 watertight closure: PASS "
        f"(150 planes, {total_loops} loops, torus mid-plane 2 loops)",
    )


def test_a5_gauss_bonnet(capsys):
    sphere = primitives.icosphere(4)
    c = compute_curvature(sphere)
    total = float((c.gaussian * c.mixed_area).sum())
    assert abs(total - 4 * np.pi) <= 1e-6 * 4 * np.pi
    assert np.abs(c.gaussian - 1.0).max() < 0.02

    torus = primitives.torus(64, 32)
    ct = compute_curvature(torus)
    total_t = float((ct.gaussian * ct.mixed_area).sum())
    assert abs(total_t) <= 1e-6 * 4 * np.pi
    report(
        capsys,
        f"A5 Gauss-Bonnet: PASS "
        f"(sphere {total / np.pi:.8f}pi, torus {total_t:.2e})",
    )


def test_a6_decimation_contract(capsys, big_pair):
    mesh, optimized = big_pair
    assert mesh.vertex_count >= 100_000

    half = mesh.vertex_count / 2
    assert abs(optimized.vertex_count - half) <= 0.01 * half
    assert (
        topology_summary(optimized).euler_characteristic
        == topology_summary(mesh).euler_characteristic
    )

    h = sampled_hausdorff(mesh, optimized, samples=4000)
    assert h <= 0.02 * mesh.bbox_diagonal

    def mid_deq(m):
        result = slice_axial(m, "z", 0.0)
        assert result.loops
        return max(lp.metrics.equivalent_diameter for lp in result.loops)

    d0, d1 = mid_deq(mesh), mid_deq(optimized)
    assert abs(d1 - d0) <= 0.01 * d0
    report(
        capsys,
        f"A6 decimation contract: PASS "
        f"(V {mesh.vertex_count}->{optimized.vertex_count}, "
        f"Hausdorff {h / mesh.bbox_diagonal:.4%} bbox, "
        f"deq drift {abs(d1 - d0) / d0:.4%})",
    )


def test_a7_throughput_bound(capsys, big_pair):
    mesh, optimized = big_pair
    assert abs(mesh.face_count - 1_070_000) < 10_000

    plane = PlaneSpec((0.0, 0.0, 1.0), 0.13)

    def median_time(m):
        times = []
        for _ in range(5):
            t0 = time.perf_counter()
            slice_mesh(m, plane)
            times.append(time.perf_counter() - t0)
        return statistics.median(times)

    t_full = median_time(mesh)
    t_opt = median_time(optimized)
    assert t_full <= 14.0
    assert t_opt <= 0.65 * t_full
    report(
        capsys,
        f"A7 throughput bound: PASS "
        f"({mesh.face_count} faces in {t_full:.3f}s, "
        f"optimized ratio {t_opt / t_full:.2f})",
    )


def test_a8_dataset_determinism(capsys, tmp_path):
    mesh = primitives.icosphere(3)
    spec = SweepSpec(
        axes=("x", "y", "z"),
        offsets=(-0.9, 0.9, 10),
        rotations=((0.0, 0.0, 0.0), (20.0, 35.0, 50.0)),
        resolution=128,
        seed=8,
    )
    d1 = tmp_path / "run1"
    d2 = tmp_path / "run2"
    m1 = generate(mesh, spec, d1)
    m2 = generate(mesh, spec, d2)
    assert len(m1.records) == 60
    assert len(list(d1.glob("*.png"))) == 60
    for rec in m1.records:
        assert filecmp.cmp(d1 / rec.filename, d2 / rec.filename, shallow=False)
    assert filecmp.cmp(d1 / "manifest.tsv", d2 / "manifest.tsv", shallow=False)
    report(capsys, "A8 dataset determinism: PASS (60 images, rerun identical)")


def test_a9_defect_detection(capsys):
    from test_analysis import (
        add_unreferenced_vertex,
        three_triangles_one_edge,
        two_cubes_one_vertex,
    )

    cube = primitives.cube()
    r = analyze(add_unreferenced_vertex(cube))
    assert set(r.error_vertices) == {8}

    r = analyze(three_triangles_one_edge())
    assert {0, 1} <= set(r.error_vertices)

    mesh, shared = two_cubes_one_vertex()
    r = analyze(mesh)
    assert shared in set(r.error_vertices)

    dirty = merge_meshes(
        primitives.icosphere(3), primitives.grid(2, 2, spacing=0.1)
    )
    r = analyze(dirty, component_size_threshold=50)
    assert len(r.isolated_components) == 1
    assert len(r.isolated_components[0][1]) == 8

    clean = analyze(primitives.icosphere(3))
    assert len(clean.risky_vertices) == 0
    assert len(clean.error_vertices) == 0
    assert len(clean.isolated_components) == 0
    report(capsys, "A9 defect detection: PASS (4 fixtures + clean sphere)")
