"""Per-vertex curvature, defect classification, and set-based repair.

Curvature uses the standard discrete estimators: angle-deficit Gaussian
curvature and cotangent-Laplacian mean curvature, both normalized by
Meyer-style mixed areas (Voronoi with the obtuse-safe fallback).  The
discrete Gauss-Bonnet identity gives the built-in correctness check:
total Gaussian curvature of a closed mesh is 2*pi*chi.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import Mesh


@dataclass(frozen=True)
class CurvatureField:
    """Per-vertex curvature arrays; NaN marks undefined entries."""

    gaussian: np.ndarray  # 1/length^2
    mean: np.ndarray      # 1/length
    mixed_area: np.ndarray  # length^2

    @property
    def undefined(self) -> np.ndarray:
        return np.flatnonzero(~np.isfinite(self.gaussian))


@dataclass(frozen=True)
class RiskReport:
    vertex_count: int
    error_vertices: np.ndarray
    boundary_vertices: np.ndarray
    flat_vertices: np.ndarray
    risky_vertices: np.ndarray
    isolated_components: list[tuple[np.ndarray, np.ndarray]] = field(
        default_factory=list
    )
    elongated_faces: np.ndarray = field(
        default_factory=lambda: np.empty(0, dtype=np.int64)
    )

    def to_text(self) -> str:
        """One section per set, sorted indices, space separated."""
        lines = [f"vertex_count: {self.vertex_count}"]
        for name in (
            "error_vertices",
            "boundary_vertices",
            "flat_vertices",
            "risky_vertices",
            "elongated_faces",
        ):
            idx = np.sort(getattr(self, name))
            lines.append(f"{name}: " + " ".join(str(int(i)) for i in idx))
        lines.append(f"isolated_component_count: {len(self.isolated_components)}")
        for k, (vs, fs) in enumerate(self.isolated_components):
            lines.append(
                f"isolated_component_{k}_vertices: "
                + " ".join(str(int(i)) for i in np.sort(vs))
            )
            lines.append(
                f"isolated_component_{k}_faces: "
                + " ".join(str(int(i)) for i in np.sort(fs))
            )
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "error_vertices": sorted(int(i) for i in self.error_vertices),
            "boundary_vertices": sorted(int(i) for i in self.boundary_vertices),
            "flat_vertices": sorted(int(i) for i in self.flat_vertices),
            "risky_vertices": sorted(int(i) for i in self.risky_vertices),
            "elongated_faces": sorted(int(i) for i in self.elongated_faces),
            "isolated_components": [
                {
                    "vertices": sorted(int(i) for i in vs),
                    "faces": sorted(int(i) for i in fs),
                }
                for vs, fs in self.isolated_components
            ],
        }


# ---------------------------------------------------------------------------
# curvature


def _corner_angles_cotans(mesh: Mesh):
    """Angles and cotangents at each face corner, plus face areas."""
    v = mesh.vertices
    f = mesh.faces
    p0, p1, p2 = v[f[:, 0]], v[f[:, 1]], v[f[:, 2]]
    # edge vectors opposite each corner
    e0 = p2 - p1
    e1 = p0 - p2
    e2 = p1 - p0
    cross = np.cross(e2, -e1)
    area2 = np.linalg.norm(cross, axis=1)  # 2 * face area

    def angle(u, w):
        c = np.einsum("ij,ij->i", u, w)
        s = np.linalg.norm(np.cross(u, w), axis=1)
        return np.arctan2(s, c)

    ang = np.stack(
        [angle(e2, -e1), angle(e0, -e2), angle(e1, -e0)], axis=1
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        cot = np.cos(ang) / np.sin(ang)
    cot[~np.isfinite(cot)] = 0.0
    return ang, cot, 0.5 * area2, cross


def _mixed_areas(mesh: Mesh, ang, cot, areas):
    """Meyer mixed-area partition of the surface."""
    v = mesh.vertices
    f = mesh.faces
    p = [v[f[:, k]] for k in range(3)]
    sq = [
        np.einsum("ij,ij->i", p[2] - p[1], p[2] - p[1]),  # |e opp corner 0|^2
        np.einsum("ij,ij->i", p[0] - p[2], p[0] - p[2]),
        np.einsum("ij,ij->i", p[1] - p[0], p[1] - p[0]),
    ]
    obtuse_corner = np.argmax(ang, axis=1)
    is_obtuse = ang[np.arange(len(f)), obtuse_corner] > np.pi / 2

    out = np.zeros(mesh.vertex_count)
    for corner in range(3):
        o1 = (corner + 1) % 3
        o2 = (corner + 2) % 3
        # Voronoi area of this corner (valid for non-obtuse triangles)
        voro = 0.125 * (sq[o1] * cot[:, o1] + sq[o2] * cot[:, o2])
        contrib = np.where(
            is_obtuse,
            np.where(obtuse_corner == corner, areas / 2, areas / 4),
            voro,
        )
        np.add.at(out, f[:, corner], contrib)
    return out


def compute_curvature(mesh: Mesh) -> CurvatureField:
    """Discrete Gaussian and signed mean curvature per vertex.

    Convention: positive mean curvature on convex outward-wound surfaces
    (unit sphere gives gaussian ~ 1 and mean ~ 1).  Vertices whose whole
    incident ring has zero area get NaN in both fields.
    """
    if mesh.face_count == 0:
        raise ValueError("mesh has no faces")
    f = mesh.faces
    v = mesh.vertices
    ang, cot, areas, cross = _corner_angles_cotans(mesh)
    mixed = _mixed_areas(mesh, ang, cot, areas)

    angle_sum = np.zeros(mesh.vertex_count)
    np.add.at(angle_sum, f.ravel(), ang.ravel())

    boundary = np.zeros(mesh.vertex_count, dtype=bool)
    be = mesh.boundary_edges
    if len(be):
        boundary[be.ravel()] = True

    deficit = np.where(boundary, np.pi, 2 * np.pi) - angle_sum

    # cotangent Laplacian: L(v_i) = 1/2 sum_j (cot a + cot b)(v_i - v_j)
    lap = np.zeros((mesh.vertex_count, 3))
    for corner in range(3):
        i = f[:, (corner + 1) % 3]
        j = f[:, (corner + 2) % 3]
        w = 0.5 * cot[:, corner]
        d = (v[i] - v[j]) * w[:, None]
        np.add.at(lap, i, d)
        np.add.at(lap, j, -d)

    # angle-weighted vertex normals for the mean-curvature sign
    nrm = np.zeros((mesh.vertex_count, 3))
    area2 = np.linalg.norm(cross, axis=1)
    safe = np.where(area2 > 0, area2, 1.0)
    unit = cross / safe[:, None]
    for corner in range(3):
        np.add.at(nrm, f[:, corner], unit * ang[:, corner][:, None])

    with np.errstate(divide="ignore", invalid="ignore"):
        gaussian = deficit / mixed
        mean_mag = np.linalg.norm(lap, axis=1) / (2 * mixed)
    sign = np.where(np.einsum("ij,ij->i", lap, nrm) >= 0, 1.0, -1.0)
    mean = sign * mean_mag

    defined = (mixed > 0) & mesh.referenced
    gaussian = np.where(defined, gaussian, np.nan)
    mean = np.where(defined, mean, np.nan)
    return CurvatureField(gaussian=gaussian, mean=mean, mixed_area=mixed)


# ---------------------------------------------------------------------------
# defect detection


def detect_boundary(mesh: Mesh) -> np.ndarray:
    """Vertices incident to at least one single-face edge."""
    be = mesh.boundary_edges
    if not len(be):
        return np.empty(0, dtype=np.int64)
    return np.unique(be.ravel())


def _nonmanifold_fan_vertices(mesh: Mesh) -> set[int]:
    """Vertices whose incident faces do not form a single fan/disk."""
    bad: set[int] = set()
    link_edges: dict[int, list[tuple[int, int]]] = {}
    for a, b, c in mesh.faces:
        link_edges.setdefault(int(a), []).append((int(b), int(c)))
        link_edges.setdefault(int(b), []).append((int(c), int(a)))
        link_edges.setdefault(int(c), []).append((int(a), int(b)))
    for v, edges in link_edges.items():
        deg: dict[int, int] = {}
        parent: dict[int, int] = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for a, b in edges:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
            parent.setdefault(a, a)
            parent.setdefault(b, b)
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        if any(d > 2 for d in deg.values()):
            ok = False
        roots = {find(x) for x in parent}
        if len(roots) > 1:
            ok = False
        odd = sum(1 for d in deg.values() if d == 1)
        if odd not in (0, 2):
            ok = False
        if not ok:
            bad.add(v)
    return bad


def detect_errors(mesh: Mesh) -> np.ndarray:
    """Topological error vertices: unreferenced, non-manifold (edge or
    fan), or curvature-undefined."""
    flagged = set(np.flatnonzero(~mesh.referenced).tolist())

    nm_edges = mesh.edges[mesh.edge_face_counts > 2]
    flagged.update(int(i) for i in nm_edges.ravel())

    flagged.update(_nonmanifold_fan_vertices(mesh))

    if mesh.face_count:
        curv = compute_curvature(mesh)
        flagged.update(int(i) for i in curv.undefined)

    return np.array(sorted(flagged), dtype=np.int64)


def default_flat_thresholds(mesh: Mesh) -> tuple[float, float]:
    """(eps_gaussian, eps_mean) scaled by the bounding-box diagonal."""
    d = mesh.bbox_diagonal or 1.0
    return 1e-4 / d**2, 1e-4 / d


def analyze(
    mesh: Mesh,
    eps_gaussian=None,
    eps_mean=None,
    component_size_threshold=None,
    aspect_ratio_threshold=10.0,
) -> RiskReport:
    """Assemble the full risk report for a mesh.

    ``component_size_threshold`` defaults to 1% of the face count;
    components with fewer faces are reported as isolated.
    """
    if eps_gaussian is None or eps_mean is None:
        dg, dm = default_flat_thresholds(mesh)
        eps_gaussian = dg if eps_gaussian is None else eps_gaussian
        eps_mean = dm if eps_mean is None else eps_mean
    if component_size_threshold is None:
        component_size_threshold = max(1, mesh.face_count // 100)
    if min(eps_gaussian, eps_mean, aspect_ratio_threshold) < 0:
        raise ValueError("thresholds must be >= 0")

    errors = detect_errors(mesh)
    boundary = detect_boundary(mesh)

    curv = compute_curvature(mesh)
    with np.errstate(invalid="ignore"):
        flat_mask = (np.abs(curv.gaussian) <= eps_gaussian) & (
            np.abs(curv.mean) <= eps_mean
        )
    flat = np.flatnonzero(flat_mask)

    risky = np.array(
        sorted(set(errors) | set(boundary) | set(flat)), dtype=np.int64
    )

    labels = mesh.face_component_labels
    components = []
    if labels.size:
        for c in range(int(labels.max()) + 1):
            fs = np.flatnonzero(labels == c)
            if len(fs) < component_size_threshold:
                vs = np.unique(mesh.faces[fs].ravel())
                components.append((vs, fs))

    # aspect ratio = longest edge / shortest altitude = longest^2 / (2A)
    v = mesh.vertices
    f = mesh.faces
    if len(f):
        el2 = np.stack(
            [
                np.einsum("ij,ij->i", v[f[:, 1]] - v[f[:, 0]], v[f[:, 1]] - v[f[:, 0]]),
                np.einsum("ij,ij->i", v[f[:, 2]] - v[f[:, 1]], v[f[:, 2]] - v[f[:, 1]]),
                np.einsum("ij,ij->i", v[f[:, 0]] - v[f[:, 2]], v[f[:, 0]] - v[f[:, 2]]),
            ],
            axis=1,
        ).max(axis=1)
        with np.errstate(divide="ignore"):
            aspect = np.where(
                mesh.face_areas > 0, el2 / (2 * mesh.face_areas), np.inf
            )
        elongated = np.flatnonzero(aspect > aspect_ratio_threshold)
    else:
        elongated = np.empty(0, dtype=np.int64)

    return RiskReport(
        vertex_count=mesh.vertex_count,
        error_vertices=errors,
        boundary_vertices=boundary,
        flat_vertices=flat,
        risky_vertices=risky,
        isolated_components=components,
        elongated_faces=elongated,
    )


# ---------------------------------------------------------------------------
# repair


def remove_risky(
    mesh: Mesh,
    report: RiskReport,
    remove_boundary=False,
    component_indices=(),
) -> Mesh:
    """Drop unreferenced vertices, selected isolated components, and
    (optionally) boundary vertices; reindex compactly.

    A vertex is never dropped while some retained face still uses it.
    """
    if report.vertex_count != mesh.vertex_count:
        raise ValueError(
            "stale report: vertex count mismatch "
            f"({report.vertex_count} != {mesh.vertex_count})"
        )
    drop_faces = np.zeros(mesh.face_count, dtype=bool)
    for k in component_indices:
        _, fs = report.isolated_components[k]
        drop_faces[fs] = True
    if remove_boundary and len(report.boundary_vertices):
        bset = np.zeros(mesh.vertex_count, dtype=bool)
        bset[report.boundary_vertices] = True
        drop_faces |= bset[mesh.faces].any(axis=1)

    kept_faces = mesh.faces[~drop_faces]
    keep_vertex = np.zeros(mesh.vertex_count, dtype=bool)
    if kept_faces.size:
        keep_vertex[kept_faces.ravel()] = True
    remap = np.cumsum(keep_vertex) - 1
    return Mesh(mesh.vertices[keep_vertex], remap[kept_faces])
