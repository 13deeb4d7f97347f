"""Batch generation of labeled slice-image training sets.

A sweep crosses plane offsets with mesh rotations (plus optional random
directions) and writes one binary mask image per plane together with a
line-oriented manifest, so the sweep geometry is fully reconstructible
downstream.  Output is deterministic for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .mesh import Mesh, transform_mesh
from .slicing import PlaneSpec, rasterize_slice, save_raster, slice_mesh

_AXIS_VECTORS = {
    "x": np.array([1.0, 0.0, 0.0]),
    "y": np.array([0.0, 1.0, 0.0]),
    "z": np.array([0.0, 0.0, 1.0]),
}


def euler_deg_to_matrix(angles) -> np.ndarray:
    """Intrinsic XYZ Euler angles in degrees to a rotation matrix."""
    ax, ay, az = np.radians(np.asarray(angles, dtype=np.float64))
    cx, sx = np.cos(ax), np.sin(ax)
    cy, sy = np.cos(ay), np.sin(ay)
    cz, sz = np.cos(az), np.sin(az)
    rx = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]])
    ry = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]])
    rz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]])
    return rx @ ry @ rz


@dataclass(frozen=True)
class SweepSpec:
    """Plane sweep description.

    ``axes`` entries are "x"/"y"/"z" or arbitrary unit 3-vectors.
    ``offsets`` is either an explicit list of floats (shared by all
    axes) or a (start, stop, count) triple.  ``rotations`` entries are
    3x3 orthonormal matrices or Euler-angle triples in degrees.
    """

    axes: tuple = ("y",)
    offsets: tuple = (0.0,)
    rotations: tuple = ((0.0, 0.0, 0.0),)
    resolution: int = 256
    label: str = ""
    seed: int = 0
    random_direction_count: int = 0

    def axis_normals(self) -> list[np.ndarray]:
        out = []
        for a in self.axes:
            if isinstance(a, str):
                if a not in _AXIS_VECTORS:
                    raise ValueError(f"unknown axis {a!r}")
                out.append(_AXIS_VECTORS[a].copy())
            else:
                v = np.asarray(a, dtype=np.float64).reshape(3)
                n = np.linalg.norm(v)
                if n == 0:
                    raise ValueError("zero axis vector")
                out.append(v / n)
        return out

    def offset_values(self) -> np.ndarray:
        off = self.offsets
        if (
            len(off) == 3
            and isinstance(off[2], int)
            and not isinstance(off[2], bool)
            and isinstance(off[0], float)
            and isinstance(off[1], float)
        ):
            return np.linspace(off[0], off[1], off[2])
        return np.asarray(off, dtype=np.float64)

    def rotation_matrices(self) -> list[np.ndarray]:
        out = []
        for r in self.rotations:
            arr = np.asarray(r, dtype=np.float64)
            if arr.shape == (3,):
                m = euler_deg_to_matrix(arr)
            elif arr.shape == (3, 3):
                m = arr
            else:
                raise ValueError("rotation must be Euler triple or 3x3 matrix")
            if np.abs(m.T @ m - np.eye(3)).max() > 1e-9:
                raise ValueError("rotation not orthonormal")
            out.append(m)
        return out

    def validate(self):
        if self.resolution < 16:
            raise ValueError("resolution must be >= 16")
        if len(self.offset_values()) < 1:
            raise ValueError("need at least one offset")
        if self.random_direction_count < 0:
            raise ValueError("random_direction_count must be >= 0")
        self.axis_normals()
        self.rotation_matrices()


@dataclass(frozen=True)
class DatasetRecord:
    filename: str
    normal: tuple[float, float, float]
    offset: float
    rotation: tuple  # 9 floats, row-major
    loop_count: int
    metrics_summary: str
    status: str  # "ok" | "empty"

    def to_line(self) -> str:
        return "\t".join(
            [
                self.filename,
                ",".join(f"{c:.12g}" for c in self.normal),
                f"{self.offset:.12g}",
                ",".join(f"{c:.12g}" for c in self.rotation),
                str(self.loop_count),
                self.metrics_summary,
                self.status,
            ]
        )


@dataclass(frozen=True)
class DatasetManifest:
    model_id: str
    label: str
    tool_version: str
    seed: int
    records: list[DatasetRecord] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [
            "\t".join(
                [self.model_id, self.label, self.tool_version, str(self.seed)]
            )
        ]
        lines += [r.to_line() for r in self.records]
        return "\n".join(lines) + "\n"


def _metrics_summary(result) -> str:
    if not result.loops:
        return "-"
    biggest = max(result.loops, key=lambda lp: lp.metrics.area)
    m = biggest.metrics
    return (
        f"area={m.area:.6g};perimeter={m.perimeter:.6g};"
        f"deq={m.equivalent_diameter:.6g}"
    )


def generate(
    mesh: Mesh, spec: SweepSpec, out_dir, model_id="model"
) -> DatasetManifest:
    """Run the sweep, write images + ``manifest.tsv`` into ``out_dir``."""
    spec.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    half = (mesh.bbox_diagonal or 1.0) / 2
    window = ((-half, -half), (half, half))

    normals = spec.axis_normals()
    offsets = spec.offset_values()
    rotations = spec.rotation_matrices()

    records: list[DatasetRecord] = []

    def emit(sliced_mesh, plane, rot_flat, tag):
        result = slice_mesh(sliced_mesh, plane)
        image = rasterize_slice(result, spec.resolution, window)
        filename = f"{model_id}_{tag}.png"
        save_raster(image, out_dir / filename)
        records.append(
            DatasetRecord(
                filename=filename,
                normal=tuple(float(c) for c in plane.normal),
                offset=plane.offset,
                rotation=rot_flat,
                loop_count=len(result.loops),
                metrics_summary=_metrics_summary(result),
                status="ok" if result.loops else "empty",
            )
        )

    for ri, rot in enumerate(rotations):
        rotated = transform_mesh(mesh, rot, (0.0, 0.0, 0.0))
        rot_flat = tuple(float(c) for c in rot.ravel())
        for ai, normal in enumerate(normals):
            for oi, offset in enumerate(offsets):
                plane = PlaneSpec.from_direction(normal, float(offset))
                emit(rotated, plane, rot_flat, f"r{ri}_a{ai}_o{oi}")

    if spec.random_direction_count:
        rng = np.random.default_rng(spec.seed)
        identity = tuple(float(c) for c in np.eye(3).ravel())
        for k in range(spec.random_direction_count):
            direction = rng.normal(size=3)
            while np.linalg.norm(direction) < 1e-12:
                direction = rng.normal(size=3)
            direction /= np.linalg.norm(direction)
            center = np.asarray(mesh.bounding_box).mean(axis=0)
            extent = half
            offset = float(direction @ center + rng.uniform(-extent, extent))
            plane = PlaneSpec.from_direction(direction, offset)
            emit(mesh, plane, identity, f"rand{k}")

    manifest = DatasetManifest(
        model_id=model_id,
        label=spec.label,
        tool_version=__version__,
        seed=spec.seed,
        records=records,
    )
    (out_dir / "manifest.tsv").write_text(manifest.to_text())
    return manifest
