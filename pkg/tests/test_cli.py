import json

import numpy as np
import pytest

from meshslice import load_mesh, save_mesh, topology_summary
from meshslice import primitives
from meshslice.cli import main
from conftest import merge_meshes


@pytest.fixture
def cube_path(tmp_path):
    path = tmp_path / "cube.stl"
    save_mesh(primitives.cube(), path)
    return str(path)


@pytest.fixture
def sphere_path(tmp_path):
    path = tmp_path / "sphere.stl"
    save_mesh(primitives.icosphere(3), path)
    return str(path)


class TestInfo:
    def test_prints_summary(self, cube_path, capsys):
        assert main(["info", cube_path]) == 0
        out = capsys.readouterr().out
        assert "V=8" in out
        assert "F=12" in out
        assert "watertight=true" in out

    def test_unit_scaling(self, cube_path, capsys):
        assert main(["slice", cube_path, "--axis", "z", "--offset", "5",
                     "--units", "cm"]) == 0
        out = capsys.readouterr().out
        assert "area=100.0000" in out  # 1 cm^2 cross-section in mm^2

    def test_missing_file_is_error_exit(self, tmp_path, capsys):
        assert main(["info", str(tmp_path / "nope.stl")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_bad_usage_exit_code(self):
        assert main(["slice"]) == 2  # missing required args

    def test_unknown_command(self):
        assert main(["frobnicate"]) == 2


class TestSlice:
    def test_axial(self, cube_path, capsys):
        assert main(["slice", cube_path, "--axis", "z", "--offset", "0.5"]) == 0
        out = capsys.readouterr().out
        assert "loops=1" in out
        assert "area=1.0000" in out
        assert "perimeter=4.0000" in out

    def test_arbitrary_normal(self, sphere_path, capsys):
        code = main(
            ["slice", sphere_path, "--normal", "1,1,1", "--offset", "0"]
        )
        assert code == 0
        assert "loops=1" in capsys.readouterr().out

    def test_json_and_raster_outputs(self, cube_path, tmp_path, capsys):
        jpath = tmp_path / "out.json"
        rpath = tmp_path / "out.png"
        code = main(
            [
                "slice", cube_path, "--axis", "y", "--offset", "0.5",
                "--json", str(jpath), "--raster", str(rpath),
                "--resolution", "64",
            ]
        )
        assert code == 0
        data = json.loads(jpath.read_text())
        assert len(data["loops"]) == 1
        assert data["loops"][0]["metrics"]["area"] == pytest.approx(1.0)
        from PIL import Image

        assert np.asarray(Image.open(rpath)).shape == (64, 64)


class TestAnalyzeRepair:
    def test_analyze_stdout(self, sphere_path, capsys):
        assert main(["analyze", sphere_path]) == 0
        out = capsys.readouterr().out
        assert "error_vertices" in out

    def test_analyze_to_file(self, sphere_path, tmp_path):
        out = tmp_path / "report.txt"
        assert main(["analyze", sphere_path, "--out", str(out)]) == 0
        assert "risky_vertices" in out.read_text()

    def test_repair_removes_fragment(self, tmp_path, capsys):
        mesh = merge_meshes(
            primitives.icosphere(3), primitives.grid(2, 2, spacing=0.1)
        )
        src = tmp_path / "dirty.stl"
        dst = tmp_path / "clean.stl"
        save_mesh(mesh, src)
        code = main(
            [
                "repair", str(src), "--out", str(dst),
                "--all-isolated", "--component-threshold", "50",
            ]
        )
        assert code == 0
        cleaned = load_mesh(dst)
        assert topology_summary(cleaned).euler_characteristic == 2
        assert "repaired:" in capsys.readouterr().out


class TestOptimize:
    def test_decimates(self, sphere_path, tmp_path, capsys):
        dst = tmp_path / "small.stl"
        code = main(
            ["optimize", sphere_path, "--out", str(dst), "--fraction", "0.4"]
        )
        assert code == 0
        out = load_mesh(dst)
        original = load_mesh(sphere_path)
        assert out.vertex_count == round(0.4 * original.vertex_count)
        assert topology_summary(out).is_watertight

    def test_boundary_mesh_without_flag_fails(self, tmp_path, capsys):
        src = tmp_path / "open.stl"
        save_mesh(primitives.grid(4, 4), src)
        code = main(
            ["optimize", str(src), "--out", str(tmp_path / "x.stl"),
             "--fraction", "0.5"]
        )
        assert code == 1
        assert "boundary" in capsys.readouterr().err


class TestDataset:
    def test_sweep(self, sphere_path, tmp_path, capsys):
        out_dir = tmp_path / "ds"
        code = main(
            [
                "dataset", sphere_path, "--out", str(out_dir),
                "--axes", "y,z", "--offsets=-0.5:0.5:3",
                "--resolution", "32",
            ]
        )
        assert code == 0
        assert "wrote 6 images" in capsys.readouterr().out
        assert (out_dir / "manifest.tsv").exists()
        assert len(list(out_dir.glob("*.png"))) == 6


class TestBench:
    def test_reports_timing(self, sphere_path, tmp_path, capsys):
        jpath = tmp_path / "bench.json"
        code = main(
            [
                "bench", sphere_path, "--axis", "y", "--offset", "0.1",
                "--runs", "2", "--optimized", "0.5", "--json", str(jpath),
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "original" in out and "optimized" in out
        records = json.loads(jpath.read_text())
        assert len(records) == 2
        assert records[0]["face_count"] > records[1]["face_count"]
        assert all(r["wall_time"] >= 0 for r in records)


class TestVersion:
    def test_version_flag(self, capsys):
        assert main(["--version"]) == 0
        from meshslice import __version__

        assert __version__ in capsys.readouterr().out
