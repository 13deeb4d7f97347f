"""Mesh simplification and smoothing for real-time display.

Decimation is iterative edge collapse ordered by quadric error with
link-condition and normal-flip checks, so the topology (Euler
characteristic) of watertight inputs is preserved and the surface stays
close to the original.  Smoothing offers plain Laplacian and Taubin
lambda/mu (the latter avoids shrinkage).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix

from .mesh import Mesh


@dataclass(frozen=True)
class OptimizeParams:
    target_vertex_fraction: float = 0.5
    smoothing_iterations: int = 10
    smoothing_kind: str = "taubin"  # or "laplacian"
    taubin_lambda: float = 0.5
    taubin_mu: float = -0.53
    preserve_boundary: bool = False

    def __post_init__(self):
        if not (0 < self.target_vertex_fraction <= 1):
            raise ValueError("target_vertex_fraction must be in (0, 1]")
        if self.smoothing_iterations < 0:
            raise ValueError("smoothing_iterations must be >= 0")
        if self.smoothing_kind not in ("laplacian", "taubin"):
            raise ValueError("smoothing_kind must be laplacian or taubin")
        if self.smoothing_kind == "taubin":
            if not (self.taubin_lambda > 0 > self.taubin_mu):
                raise ValueError("taubin requires lambda > 0 > mu")
            if not (abs(self.taubin_mu) > self.taubin_lambda):
                raise ValueError("taubin requires |mu| > lambda")


class DecimationError(Exception):
    pass


# ---------------------------------------------------------------------------
# quadric helpers (flat 10-float symmetric 4x4, pure-python hot path)

def _tri_normal(tri):
    ax, ay, az = tri[0]
    bx, by, bz = tri[1]
    cx, cy, cz = tri[2]
    ux, uy, uz = bx - ax, by - ay, bz - az
    wx, wy, wz = cx - ax, cy - ay, cz - az
    return (uy * wz - uz * wy, uz * wx - ux * wz, ux * wy - uy * wx)


def _quadric_cost(q, x, y, z):
    # [x y z 1] Q [x y z 1]^T
    return (
        q[0] * x * x
        + q[4] * y * y
        + q[7] * z * z
        + 2 * (q[1] * x * y + q[2] * x * z + q[5] * y * z)
        + 2 * (q[3] * x + q[6] * y + q[8] * z)
        + q[9]
    )


def _optimal_point(q, fallback_pts):
    # minimize the quadric: solve the 3x3 system via cofactors
    a, b, c = q[0], q[1], q[2]
    d, e = q[4], q[5]
    f = q[7]
    det = a * (d * f - e * e) - b * (b * f - c * e) + c * (b * e - c * d)
    scale = max(abs(a), abs(d), abs(f), 1e-300)
    if abs(det) > 1e-10 * scale**3:
        rx, ry, rz = -q[3], -q[6], -q[8]
        inv = 1.0 / det
        x = (rx * (d * f - e * e) - b * (ry * f - rz * e) + c * (ry * e - rz * d)) * inv
        y = (a * (ry * f - rz * e) - rx * (b * f - c * e) + c * (b * rz - c * ry)) * inv
        z = (a * (d * rz - e * ry) - b * (b * rz - c * ry) + rx * (b * e - c * d)) * inv
        return x, y, z
    best = None
    best_cost = None
    for px, py, pz in fallback_pts:
        cost = _quadric_cost(q, px, py, pz)
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best = (px, py, pz)
    return best


def decimate(
    mesh: Mesh, target_vertex_fraction: float, preserve_boundary=False
) -> Mesh:
    """Collapse edges by increasing quadric error until the vertex count
    reaches ``round(fraction * n)``.

    Raises if the mesh has a boundary and ``preserve_boundary`` is off,
    or if the target would degenerate a closed surface (< 4 vertices).
    """
    if not (0 < target_vertex_fraction <= 1):
        raise ValueError("fraction must be in (0, 1]")
    if target_vertex_fraction == 1.0:
        return mesh
    has_boundary = bool(len(mesh.boundary_edges))
    if has_boundary and not preserve_boundary:
        raise DecimationError(
            "mesh has a boundary; enable preserve_boundary to decimate"
        )
    n = mesh.vertex_count
    target = int(round(target_vertex_fraction * n))
    if target < 4:
        raise DecimationError(f"target vertex count {target} too small")

    pos = [tuple(p) for p in mesh.vertices.tolist()]
    quadrics = [[0.0] * 10 for _ in range(n)]
    faces = [list(f) for f in mesh.faces.tolist()]
    vertex_faces: list[set] = [set() for _ in range(n)]
    alive_face = [True] * len(faces)
    adj: list[set] = [set() for _ in range(n)]

    for fi, (a, b, c) in enumerate(faces):
        pa, pb, pc = pos[a], pos[b], pos[c]
        ux, uy, uz = pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]
        vx, vy, vz = pc[0] - pa[0], pc[1] - pa[1], pc[2] - pa[2]
        nx = uy * vz - uz * vy
        ny = uz * vx - ux * vz
        nz = ux * vy - uy * vx
        norm = (nx * nx + ny * ny + nz * nz) ** 0.5
        if norm > 0:
            area = 0.5 * norm
            nx, ny, nz = nx / norm, ny / norm, nz / norm
            pd = -(nx * pa[0] + ny * pa[1] + nz * pa[2])
            w = area
            plane = (nx, ny, nz, pd)
            contrib = [
                w * plane[0] * plane[0], w * plane[0] * plane[1],
                w * plane[0] * plane[2], w * plane[0] * plane[3],
                w * plane[1] * plane[1], w * plane[1] * plane[2],
                w * plane[1] * plane[3], w * plane[2] * plane[2],
                w * plane[2] * plane[3], w * plane[3] * plane[3],
            ]
            for vtx in (a, b, c):
                q = quadrics[vtx]
                for k in range(10):
                    q[k] += contrib[k]
        for vtx in (a, b, c):
            vertex_faces[vtx].add(fi)
        adj[a].update((b, c))
        adj[b].update((a, c))
        adj[c].update((a, b))

    if has_boundary:
        # heavy perpendicular-plane quadrics pin the boundary
        bbox = mesh.bbox_diagonal or 1.0
        weight = 1e3 * bbox * bbox
        # point-anchor quadrics: boundary vertices resist any motion
        for a, b in mesh.boundary_edges.tolist():
            for vtx in (a, b):
                q = quadrics[vtx]
                px, py, pz = pos[vtx]
                # (x-p)^2 + (y-p)^2 + (z-p)^2 penalty
                q[0] += weight
                q[4] += weight
                q[7] += weight
                q[3] += -weight * px
                q[6] += -weight * py
                q[8] += -weight * pz
                q[9] += weight * (px * px + py * py + pz * pz)

    version = [0] * n
    alive = [False] * n
    for f in faces:
        for vtx in f:
            alive[vtx] = True
    alive_count = sum(alive)

    heap: list = []
    counter = 0

    def edge_entry(u, v):
        nonlocal counter
        if u > v:
            u, v = v, u
        q = [quadrics[u][k] + quadrics[v][k] for k in range(10)]
        p = _optimal_point(
            q,
            (
                pos[u],
                pos[v],
                tuple((pu + pv) / 2 for pu, pv in zip(pos[u], pos[v])),
            ),
        )
        cost = _quadric_cost(q, *p)
        counter += 1
        return (cost, counter, u, v, version[u], version[v], p)

    seen = set()
    for u in range(n):
        for v in adj[u]:
            if u < v:
                seen.add((u, v))
    for u, v in sorted(seen):
        heapq.heappush(heap, edge_entry(u, v))

    def collapse_ok(u, v, p):
        shared = adj[u] & adj[v]
        opposite = set()
        for fi in vertex_faces[u] & vertex_faces[v]:
            for vtx in faces[fi]:
                if vtx != u and vtx != v:
                    opposite.add(vtx)
        if shared != opposite or not (1 <= len(opposite) <= 2):
            return False
        # normal-flip check on surviving faces
        for vtx in (u, v):
            for fi in vertex_faces[vtx]:
                fa, fb, fc = faces[fi]
                if (fa in (u, v)) + (fb in (u, v)) + (fc in (u, v)) == 2:
                    continue  # face dies in the collapse
                old = [pos[fa], pos[fb], pos[fc]]
                new = [
                    p if x in (u, v) else pos[x] for x in (fa, fb, fc)
                ]
                n1 = _tri_normal(old)
                n2 = _tri_normal(new)
                if n1[0] * n2[0] + n1[1] * n2[1] + n1[2] * n2[2] <= 0:
                    return False
        return True

    while alive_count > target and heap:
        cost, _, u, v, vu, vv, p = heapq.heappop(heap)
        if not (alive[u] and alive[v]):
            continue
        if version[u] != vu or version[v] != vv:
            continue
        if v not in adj[u]:
            continue
        if not collapse_ok(u, v, p):
            continue

        # collapse v into u at position p
        pos[u] = p
        qu = quadrics[u]
        qv = quadrics[v]
        for k in range(10):
            qu[k] += qv[k]
        dead_faces = vertex_faces[u] & vertex_faces[v]
        for fi in dead_faces:
            alive_face[fi] = False
            for vtx in faces[fi]:
                vertex_faces[vtx].discard(fi)
        for fi in list(vertex_faces[v]):
            f = faces[fi]
            for k in range(3):
                if f[k] == v:
                    f[k] = u
            vertex_faces[v].discard(fi)
            vertex_faces[u].add(fi)
        adj[u].discard(v)
        for w in adj[v]:
            if w != u:
                adj[w].discard(v)
                adj[w].add(u)
                adj[u].add(w)
        adj[v].clear()
        alive[v] = False
        alive_count -= 1
        version[u] += 1
        version[v] += 1
        for w in sorted(adj[u]):
            heapq.heappush(heap, edge_entry(u, w))

    out_faces = [faces[fi] for fi in range(len(faces)) if alive_face[fi]]
    used = sorted({vtx for f in out_faces for vtx in f})
    remap = {old: new for new, old in enumerate(used)}
    new_vertices = np.array([pos[i] for i in used], dtype=np.float64)
    new_faces = np.array(
        [[remap[a], remap[b], remap[c]] for a, b, c in out_faces],
        dtype=np.int64,
    )
    return Mesh(new_vertices, new_faces)


# ---------------------------------------------------------------------------
# smoothing


def _uniform_adjacency(mesh: Mesh):
    e = mesh.edges
    n = mesh.vertex_count
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    data = np.ones(len(rows))
    adj = coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
    deg = np.asarray(adj.sum(axis=1)).ravel()
    return adj, deg


def smooth(mesh: Mesh, params: OptimizeParams) -> Mesh:
    """Vertex-position smoothing; connectivity is untouched."""
    if params.smoothing_iterations == 0:
        return mesh
    adj, deg = _uniform_adjacency(mesh)
    safe_deg = np.where(deg > 0, deg, 1.0)

    fixed = np.zeros(mesh.vertex_count, dtype=bool)
    if params.preserve_boundary and len(mesh.boundary_edges):
        fixed[mesh.boundary_edges.ravel()] = True

    v = mesh.vertices.copy()

    def step(factor):
        avg = adj @ v / safe_deg[:, None]
        delta = factor * (avg - v)
        delta[fixed] = 0.0
        delta[deg == 0] = 0.0
        return v + delta

    for _ in range(params.smoothing_iterations):
        if params.smoothing_kind == "laplacian":
            v = step(params.taubin_lambda)
        else:
            v = step(params.taubin_lambda)
            v = step(params.taubin_mu)
    return Mesh(v, mesh.faces)
