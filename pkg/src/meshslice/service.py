"""HTTP slice service consumed by the browser viewer.

Meshes are loaded once from a directory, cached immutable, and shared
across requests; slice responses are computed by the same library calls
the CLI uses, so service output equals library output exactly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .analysis import analyze
from .mesh import Mesh, MeshError, load_mesh, topology_summary
from .slicing import PlaneSpec, slice_mesh

_MESH_SUFFIXES = (".stl", ".obj")


@dataclass(frozen=True)
class Annotation:
    id: int
    anchor: tuple[float, float, float]
    title: str
    text: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "anchor": list(self.anchor),
            "title": self.title,
            "text": self.text,
        }


def load_annotations(path: Path) -> list[Annotation]:
    """Parse a sidecar of tab-separated (id, x, y, z, title, text) records."""
    if not path.exists():
        return []
    out = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 6:
            raise ValueError(f"malformed annotation record: {line!r}")
        out.append(
            Annotation(
                id=int(parts[0]),
                anchor=(float(parts[1]), float(parts[2]), float(parts[3])),
                title=parts[4],
                text=parts[5],
            )
        )
    return out


def save_annotations(path: Path, annotations: list[Annotation]) -> None:
    lines = [
        "\t".join(
            [
                str(a.id),
                f"{a.anchor[0]:.12g}",
                f"{a.anchor[1]:.12g}",
                f"{a.anchor[2]:.12g}",
                a.title,
                a.text,
            ]
        )
        for a in annotations
    ]
    path.write_text("\n".join(lines) + "\n")


class SliceRequest(BaseModel):
    normal: list[float]
    offset: float


class ModelStore:
    """Lazy, immutable cache of the meshes in a directory."""

    def __init__(self, mesh_dir):
        self.mesh_dir = Path(mesh_dir)
        paths = sorted(
            p
            for p in self.mesh_dir.iterdir()
            if p.suffix.lower() in _MESH_SUFFIXES
        )
        if not paths:
            raise MeshError(f"no meshes found in {self.mesh_dir}")
        self.paths = {p.stem: p for p in paths}
        self._cache: dict[str, Mesh] = {}

    def ids(self) -> list[str]:
        return sorted(self.paths)

    def get(self, model_id: str) -> Mesh:
        if model_id not in self.paths:
            raise KeyError(model_id)
        if model_id not in self._cache:
            self._cache[model_id] = load_mesh(self.paths[model_id])
        return self._cache[model_id]

    def annotation_path(self, model_id: str) -> Path:
        return self.paths[model_id].with_suffix(".annotations.tsv")


def geometry_binary(mesh: Mesh) -> bytes:
    """Little-endian: uint32 vcount, uint32 fcount, float32 xyz*, uint32 abc*."""
    header = struct.pack("<II", mesh.vertex_count, mesh.face_count)
    return (
        header
        + mesh.vertices.astype("<f4").tobytes()
        + mesh.faces.astype("<u4").tobytes()
    )


def create_app(mesh_dir, static_dir=None) -> FastAPI:
    store = ModelStore(mesh_dir)
    app = FastAPI(title="meshslice service")

    def get_mesh(model_id: str) -> Mesh:
        try:
            return store.get(model_id)
        except KeyError:
            raise HTTPException(404, f"unknown model {model_id!r}")

    @app.get("/api/models")
    def list_models():
        return {"models": store.ids()}

    @app.get("/api/models/{model_id}/info")
    def model_info(model_id: str):
        mesh = get_mesh(model_id)
        lo, hi = mesh.bounding_box
        return {
            "id": model_id,
            "topology": topology_summary(mesh).to_dict(),
            "bbox": {"min": lo.tolist(), "max": hi.tolist()},
        }

    @app.get("/api/models/{model_id}/geometry")
    def model_geometry(model_id: str, format: str = "binary"):
        mesh = get_mesh(model_id)
        if format == "json":
            return {
                "vertices": mesh.vertices.tolist(),
                "faces": mesh.faces.tolist(),
            }
        if format != "binary":
            raise HTTPException(400, "format must be binary or json")
        return Response(
            content=geometry_binary(mesh),
            media_type="application/octet-stream",
        )

    @app.post("/api/models/{model_id}/slice")
    def model_slice(model_id: str, req: SliceRequest):
        mesh = get_mesh(model_id)
        if len(req.normal) != 3:
            raise HTTPException(400, "normal must be a 3-vector")
        if not all(np.isfinite(req.normal)) or not np.isfinite(req.offset):
            raise HTTPException(400, "plane values must be finite")
        if float(np.linalg.norm(req.normal)) == 0.0:
            raise HTTPException(400, "normal must be nonzero")
        plane = PlaneSpec.from_direction(req.normal, req.offset)
        return slice_mesh(mesh, plane).to_dict()

    @app.get("/api/models/{model_id}/annotations")
    def model_annotations(model_id: str):
        get_mesh(model_id)
        try:
            records = load_annotations(store.annotation_path(model_id))
        except ValueError as exc:
            raise HTTPException(500, str(exc))
        return {"annotations": [a.to_dict() for a in records]}

    @app.get("/api/models/{model_id}/report", response_class=PlainTextResponse)
    def model_report(model_id: str):
        mesh = get_mesh(model_id)
        return analyze(mesh).to_text()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount(
            "/", StaticFiles(directory=static_dir, html=True), name="viewer"
        )
    return app


def serve(mesh_dir, port=8765, host="127.0.0.1", static_dir=None):
    """Run the slice service until interrupted."""
    import uvicorn

    app = create_app(mesh_dir, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
