"""Indexed triangle mesh: file IO, vertex welding, adjacency, topology queries.

Everything downstream (analysis, slicing, optimization) consumes the Mesh
defined here.  A Mesh is immutable by convention: operations return new
meshes and never mutate vertex or face arrays in place.
"""

from __future__ import annotations

import io
import re
import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree


class MeshError(Exception):
    """Base class for mesh loading / construction failures."""


class MeshFormatError(MeshError):
    """File could not be parsed under the declared format."""


class EmptyMeshError(MeshError):
    """Parsed file contains zero faces."""


@dataclass(frozen=True)
class LoadReport:
    """Bookkeeping emitted by ``load_mesh``."""

    input_vertex_count: int
    welded_vertex_count: int
    dropped_face_count: int

    def to_dict(self) -> dict:
        return {
            "input_vertex_count": self.input_vertex_count,
            "welded_vertex_count": self.welded_vertex_count,
            "dropped_face_count": self.dropped_face_count,
        }


@dataclass(frozen=True)
class TopologySummary:
    vertex_count: int
    edge_count: int
    face_count: int
    euler_characteristic: int
    boundary_edge_count: int
    connected_component_count: int
    is_watertight: bool

    def to_dict(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "edge_count": self.edge_count,
            "face_count": self.face_count,
            "euler_characteristic": self.euler_characteristic,
            "boundary_edge_count": self.boundary_edge_count,
            "connected_component_count": self.connected_component_count,
            "is_watertight": self.is_watertight,
        }


class Mesh:
    """Indexed triangle set with lazily built adjacency.

    Parameters
    ----------
    vertices : (n, 3) float array
        Cartesian coordinates, model units (millimeters by convention).
    faces : (m, 3) int array
        Vertex index triples.  Indices must be in range and distinct
        within each face.
    """

    def __init__(self, vertices, faces):
        vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
        faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
        if faces.size:
            if faces.min() < 0 or faces.max() >= len(vertices):
                raise MeshError("face index out of range")
            degen = (
                (faces[:, 0] == faces[:, 1])
                | (faces[:, 1] == faces[:, 2])
                | (faces[:, 2] == faces[:, 0])
            )
            if degen.any():
                raise MeshError(
                    f"{int(degen.sum())} faces with repeated vertex indices"
                )
        self.vertices = vertices
        self.faces = faces
        self.vertices.setflags(write=False)
        self.faces.setflags(write=False)
        self.load_report: LoadReport | None = None

    # -- basic counts -------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    def __repr__(self):
        return f"Mesh(vertices={self.vertex_count}, faces={self.face_count})"

    # -- adjacency ----------------------------------------------------

    @cached_property
    def edges(self) -> np.ndarray:
        """(e, 2) sorted unique undirected edges."""
        return self._edge_data[0]

    @cached_property
    def edge_face_counts(self) -> np.ndarray:
        """Number of incident faces per edge, aligned with ``edges``."""
        return self._edge_data[1]

    @cached_property
    def face_edge_indices(self) -> np.ndarray:
        """(m, 3) index into ``edges`` for each face's three edges."""
        return self._edge_data[2]

    @cached_property
    def _edge_data(self):
        f = self.faces
        raw = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        raw = np.sort(raw, axis=1)
        edges, inverse, counts = np.unique(
            raw, axis=0, return_inverse=True, return_counts=True
        )
        face_edges = inverse.reshape(3, -1).T
        return edges, counts, face_edges

    @cached_property
    def boundary_edges(self) -> np.ndarray:
        return self.edges[self.edge_face_counts == 1]

    @cached_property
    def vertex_faces(self) -> list[np.ndarray]:
        """Per-vertex array of incident face indices."""
        out = [[] for _ in range(self.vertex_count)]
        for fi, (a, b, c) in enumerate(self.faces):
            out[a].append(fi)
            out[b].append(fi)
            out[c].append(fi)
        return [np.array(x, dtype=np.int64) for x in out]

    @cached_property
    def referenced(self) -> np.ndarray:
        """Boolean mask of vertices used by at least one face."""
        mask = np.zeros(self.vertex_count, dtype=bool)
        if self.faces.size:
            mask[self.faces.ravel()] = True
        return mask

    @cached_property
    def vertex_component_labels(self) -> np.ndarray:
        """Connected-component label per vertex (-1 for unreferenced)."""
        n = self.vertex_count
        labels = np.full(n, -1, dtype=np.int64)
        if not self.faces.size:
            return labels
        e = self.edges
        graph = coo_matrix(
            (np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n)
        )
        _, raw = connected_components(graph, directed=False)
        ref = self.referenced
        # relabel compactly over referenced vertices only
        used = np.unique(raw[ref])
        remap = {int(c): i for i, c in enumerate(used)}
        labels[ref] = [remap[int(c)] for c in raw[ref]]
        return labels

    @cached_property
    def face_component_labels(self) -> np.ndarray:
        """Connected-component label per face (faces connected iff they
        share a vertex)."""
        if not self.faces.size:
            return np.empty(0, dtype=np.int64)
        return self.vertex_component_labels[self.faces[:, 0]]

    @cached_property
    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if not len(self.vertices):
            z = np.zeros(3)
            return z, z
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    @cached_property
    def bbox_diagonal(self) -> float:
        lo, hi = self.bounding_box
        return float(np.linalg.norm(hi - lo))

    @cached_property
    def face_areas(self) -> np.ndarray:
        v = self.vertices
        f = self.faces
        cross = np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])
        return 0.5 * np.linalg.norm(cross, axis=1)

    @cached_property
    def surface_area(self) -> float:
        return float(self.face_areas.sum())


# ---------------------------------------------------------------------------
# welding


def weld_vertices(vertices, faces, tolerance):
    """Merge coincident vertices within ``tolerance`` (Euclidean).

    Returns ``(vertices, faces, welded_count, dropped_face_count)``.
    Representative positions are first occurrences, so bit-exact
    duplicates survive unchanged.  Faces that collapse to fewer than 3
    distinct indices are dropped.
    """
    vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    n_in = len(vertices)
    if n_in == 0:
        return vertices, faces, 0, 0

    # exact-duplicate pass first: cheap and catches most STL corner soup
    _, first, inverse = np.unique(
        vertices, axis=0, return_index=True, return_inverse=True
    )
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    remap = rank[inverse]
    uniq = vertices[np.sort(first)]

    if tolerance > 0 and len(uniq) > 1:
        tree = cKDTree(uniq)
        pairs = tree.query_pairs(tolerance, output_type="ndarray")
        if len(pairs):
            parent = np.arange(len(uniq))

            def find(i):
                while parent[i] != i:
                    parent[i] = parent[parent[i]]
                    i = parent[i]
                return i

            for a, b in pairs:
                ra, rb = find(a), find(b)
                if ra != rb:
                    # keep the smaller index as representative
                    if ra < rb:
                        parent[rb] = ra
                    else:
                        parent[ra] = rb
            roots = np.array([find(i) for i in range(len(uniq))])
            kept = np.flatnonzero(roots == np.arange(len(uniq)))
            rank2 = np.full(len(uniq), -1, dtype=np.int64)
            rank2[kept] = np.arange(len(kept))
            remap = rank2[roots][remap]
            uniq = uniq[kept]

    faces = remap[faces]
    degen = (
        (faces[:, 0] == faces[:, 1])
        | (faces[:, 1] == faces[:, 2])
        | (faces[:, 2] == faces[:, 0])
    )
    dropped = int(degen.sum())
    faces = faces[~degen]
    welded = n_in - len(uniq)
    return uniq, faces, welded, dropped


# ---------------------------------------------------------------------------
# file IO

def _parse_stl_binary(data: bytes):
    if len(data) < 84:
        raise MeshFormatError("binary STL shorter than 84-byte header")
    (count,) = struct.unpack_from("<I", data, 80)
    expected = 84 + 50 * count
    if len(data) < expected:
        raise MeshFormatError(
            f"binary STL truncated: {count} facets need {expected} bytes, "
            f"got {len(data)}"
        )
    if count == 0:
        raise EmptyMeshError("STL contains 0 facets")
    body = np.frombuffer(data, dtype=np.uint8, count=50 * count, offset=84)
    records = body.reshape(count, 50)
    tri = (
        records[:, 12:48]
        .copy()
        .view("<f4")
        .reshape(count, 3, 3)
        .astype(np.float64)
    )
    vertices = tri.reshape(-1, 3)
    faces = np.arange(3 * count, dtype=np.int64).reshape(-1, 3)
    return vertices, faces


_ASCII_VERTEX = re.compile(
    rb"vertex\s+([^\s]+)\s+([^\s]+)\s+([^\s]+)", re.IGNORECASE
)


def _parse_stl_ascii(data: bytes):
    coords = _ASCII_VERTEX.findall(data)
    if len(coords) == 0:
        raise EmptyMeshError("ASCII STL contains no vertex records")
    if len(coords) % 3:
        raise MeshFormatError("ASCII STL vertex count not a multiple of 3")
    try:
        vertices = np.array(coords, dtype=np.float64)
    except ValueError as exc:
        raise MeshFormatError(f"unparsable vertex coordinate: {exc}") from exc
    faces = np.arange(len(vertices), dtype=np.int64).reshape(-1, 3)
    return vertices, faces


def _parse_obj(data: bytes):
    vertices = []
    faces = []
    for ln, line in enumerate(data.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith(b"#"):
            continue
        parts = line.split()
        tag = parts[0]
        if tag == b"v":
            if len(parts) < 4:
                raise MeshFormatError(f"line {ln}: short vertex record")
            vertices.append([float(p) for p in parts[1:4]])
        elif tag == b"f":
            idx = []
            for p in parts[1:]:
                tok = p.split(b"/")[0]
                i = int(tok)
                idx.append(i - 1 if i > 0 else len(vertices) + i)
            if len(idx) < 3:
                raise MeshFormatError(f"line {ln}: face with < 3 vertices")
            # fan-triangulate polygons
            for k in range(1, len(idx) - 1):
                faces.append([idx[0], idx[k], idx[k + 1]])
    if not faces:
        raise EmptyMeshError("OBJ contains no faces")
    return np.array(vertices, dtype=np.float64), np.array(faces, dtype=np.int64)


def _sniff_format(path: Path, data: bytes) -> str:
    suffix = path.suffix.lower()
    if suffix == ".obj":
        return "obj"
    head = data[:512].lstrip()
    if head.startswith(b"solid") and b"facet" in data[:4096]:
        return "stl-ascii"
    return "stl-binary"


def load_mesh(path, format="auto", weld_tolerance=None) -> Mesh:
    """Load an STL or OBJ mesh, welding coincident vertices.

    Parameters
    ----------
    path : path-like
    format : {"auto", "stl-binary", "stl-ascii", "obj"}
    weld_tolerance : float or None
        Euclidean merge radius.  ``None`` selects 1e-6 times the
        bounding-box diagonal; 0 welds exact duplicates only.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise MeshError(f"cannot read {path}: {exc}") from exc
    if format == "auto":
        format = _sniff_format(path, data)
    if format == "stl-binary":
        vertices, faces = _parse_stl_binary(data)
    elif format == "stl-ascii":
        vertices, faces = _parse_stl_ascii(data)
    elif format == "obj":
        vertices, faces = _parse_obj(data)
    else:
        raise ValueError(f"unknown format {format!r}")

    if weld_tolerance is None:
        lo = vertices.min(axis=0)
        hi = vertices.max(axis=0)
        weld_tolerance = 1e-6 * float(np.linalg.norm(hi - lo))
    if weld_tolerance < 0:
        raise ValueError("weld_tolerance must be >= 0")

    n_in = len(vertices)
    vertices, faces, welded, dropped = weld_vertices(
        vertices, faces, weld_tolerance
    )
    if not len(faces):
        raise EmptyMeshError("mesh has 0 faces after welding")
    mesh = Mesh(vertices, faces)
    mesh.load_report = LoadReport(n_in, welded, dropped)
    return mesh


def save_mesh(mesh: Mesh, path, format="stl-binary") -> None:
    """Write ``mesh`` as binary STL or OBJ."""
    if mesh.face_count == 0:
        raise MeshError("refusing to save an empty mesh")
    path = Path(path)
    if format == "stl-binary":
        v = mesh.vertices.astype(np.float32)
        f = mesh.faces
        n = np.cross(
            v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]]
        ).astype(np.float64)
        lens = np.linalg.norm(n, axis=1)
        lens[lens == 0] = 1.0
        n = (n / lens[:, None]).astype(np.float32)
        buf = io.BytesIO()
        buf.write(b"\0" * 80)
        buf.write(struct.pack("<I", len(f)))
        records = np.zeros((len(f), 50), dtype=np.uint8)
        payload = np.concatenate(
            [n[:, None, :], v[f]], axis=1
        ).astype("<f4").reshape(len(f), 12)
        records[:, :48] = payload.view(np.uint8).reshape(len(f), 48)
        buf.write(records.tobytes())
        try:
            path.write_bytes(buf.getvalue())
        except OSError as exc:
            raise MeshError(f"cannot write {path}: {exc}") from exc
    elif format == "obj":
        lines = []
        for x, y, z in mesh.vertices:
            lines.append(f"v {x:.17g} {y:.17g} {z:.17g}")
        for a, b, c in mesh.faces:
            lines.append(f"f {a + 1} {b + 1} {c + 1}")
        try:
            path.write_text("\n".join(lines) + "\n")
        except OSError as exc:
            raise MeshError(f"cannot write {path}: {exc}") from exc
    else:
        raise ValueError(f"unknown format {format!r}")


# ---------------------------------------------------------------------------
# queries and transforms


def topology_summary(mesh: Mesh) -> TopologySummary:
    """Counts, Euler characteristic, watertightness, component count."""
    v = mesh.vertex_count
    e = len(mesh.edges)
    f = mesh.face_count
    boundary = int((mesh.edge_face_counts == 1).sum())
    labels = mesh.face_component_labels
    n_comp = int(labels.max()) + 1 if labels.size else 0
    watertight = (
        f > 0
        and boundary == 0
        and bool((mesh.edge_face_counts <= 2).all())
    )
    return TopologySummary(
        vertex_count=v,
        edge_count=e,
        face_count=f,
        euler_characteristic=v - e + f,
        boundary_edge_count=boundary,
        connected_component_count=n_comp,
        is_watertight=watertight,
    )


def transform_mesh(mesh: Mesh, rotation, translation) -> Mesh:
    """Apply the rigid map ``v -> R v + t`` to every vertex."""
    rotation = np.asarray(rotation, dtype=np.float64).reshape(3, 3)
    translation = np.asarray(translation, dtype=np.float64).reshape(3)
    err = np.abs(rotation.T @ rotation - np.eye(3)).max()
    if err > 1e-9:
        raise ValueError(f"rotation not orthonormal (deviation {err:.2e})")
    vertices = mesh.vertices @ rotation.T + translation
    return Mesh(vertices, mesh.faces)
