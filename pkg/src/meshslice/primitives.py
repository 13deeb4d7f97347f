"""Procedural test meshes: cube, icosphere, cylinder, torus, planar grid."""

from __future__ import annotations

import numpy as np

from .mesh import Mesh


def cube(size=1.0, origin=(0.0, 0.0, 0.0)) -> Mesh:
    """Axis-aligned closed cube, 8 vertices / 12 faces, outward winding."""
    o = np.asarray(origin, dtype=np.float64)
    s = float(size)
    corners = np.array(
        [
            [0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
            [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1],
        ],
        dtype=np.float64,
    )
    vertices = o + s * corners
    faces = np.array(
        [
            [0, 2, 1], [0, 3, 2],  # bottom (z=0)
            [4, 5, 6], [4, 6, 7],  # top (z=1)
            [0, 1, 5], [0, 5, 4],  # y=0
            [2, 3, 7], [2, 7, 6],  # y=1
            [1, 2, 6], [1, 6, 5],  # x=1
            [3, 0, 4], [3, 4, 7],  # x=0
        ],
        dtype=np.int64,
    )
    return Mesh(vertices, faces)


def icosphere(subdivisions=3, radius=1.0, center=(0.0, 0.0, 0.0)) -> Mesh:
    """Subdivided icosahedron projected onto a sphere.

    Face count is 20 * 4**subdivisions.
    """
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=np.float64,
    )
    faces = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ],
        dtype=np.int64,
    )
    for _ in range(subdivisions):
        edge_mid = {}
        verts_list = list(verts)

        def midpoint(a, b):
            key = (a, b) if a < b else (b, a)
            if key not in edge_mid:
                edge_mid[key] = len(verts_list)
                verts_list.append(0.5 * (verts_list[a] + verts_list[b]))
            return edge_mid[key]

        new_faces = []
        for a, b, c in faces:
            ab = midpoint(a, b)
            bc = midpoint(b, c)
            ca = midpoint(c, a)
            new_faces += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        verts = np.array(verts_list)
        faces = np.array(new_faces, dtype=np.int64)

    verts = verts / np.linalg.norm(verts, axis=1)[:, None]
    verts = radius * verts + np.asarray(center, dtype=np.float64)
    return Mesh(verts, faces)


def cylinder(
    radius=1.0,
    height=2.0,
    segments=64,
    rings=2,
    capped=True,
    axis="z",
) -> Mesh:
    """Cylinder centered on the origin along ``axis``.

    ``rings`` is the number of vertex rings along the height (>= 2).
    Open (uncapped) cylinders expose the two rim rings as boundary.
    """
    if rings < 2:
        raise ValueError("rings must be >= 2")
    theta = 2 * np.pi * np.arange(segments) / segments
    zs = np.linspace(-height / 2, height / 2, rings)
    ring_xy = np.stack(
        [radius * np.cos(theta), radius * np.sin(theta)], axis=1
    )
    verts = []
    for z in zs:
        verts.append(
            np.column_stack([ring_xy, np.full(segments, z)])
        )
    verts = np.concatenate(verts)
    faces = []
    for r in range(rings - 1):
        base = r * segments
        nxt = base + segments
        for i in range(segments):
            j = (i + 1) % segments
            faces.append([base + i, base + j, nxt + j])
            faces.append([base + i, nxt + j, nxt + i])
    if capped:
        bot = len(verts)
        verts = np.vstack([verts, [[0, 0, zs[0]], [0, 0, zs[-1]]]])
        top = bot + 1
        top_base = (rings - 1) * segments
        for i in range(segments):
            j = (i + 1) % segments
            faces.append([bot, j, i])
            faces.append([top, top_base + i, top_base + j])
    verts = np.asarray(verts)
    if axis == "x":
        verts = verts[:, [2, 0, 1]]
    elif axis == "y":
        verts = verts[:, [1, 2, 0]]
    elif axis != "z":
        raise ValueError("axis must be one of x, y, z")
    return Mesh(verts, np.array(faces, dtype=np.int64))


def torus(
    major_segments=48,
    minor_segments=24,
    major_radius=2.0,
    minor_radius=0.5,
) -> Mesh:
    """Closed torus in the xy-plane around the z axis (genus 1)."""
    u = 2 * np.pi * np.arange(major_segments) / major_segments
    v = 2 * np.pi * np.arange(minor_segments) / minor_segments
    uu, vv = np.meshgrid(u, v, indexing="ij")
    r = major_radius + minor_radius * np.cos(vv)
    verts = np.stack(
        [r * np.cos(uu), r * np.sin(uu), minor_radius * np.sin(vv)],
        axis=-1,
    ).reshape(-1, 3)
    faces = []
    for i in range(major_segments):
        i2 = (i + 1) % major_segments
        for j in range(minor_segments):
            j2 = (j + 1) % minor_segments
            a = i * minor_segments + j
            b = i2 * minor_segments + j
            c = i2 * minor_segments + j2
            d = i * minor_segments + j2
            faces.append([a, b, c])
            faces.append([a, c, d])
    return Mesh(verts, np.array(faces, dtype=np.int64))


def grid(nx=5, ny=5, spacing=1.0) -> Mesh:
    """Flat triangulated rectangle in the z=0 plane, (nx+1)*(ny+1) vertices."""
    xs = spacing * np.arange(nx + 1)
    ys = spacing * np.arange(ny + 1)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    verts = np.stack([xx, yy, np.zeros_like(xx)], axis=-1).reshape(-1, 3)
    faces = []
    for i in range(nx):
        for j in range(ny):
            a = i * (ny + 1) + j
            b = (i + 1) * (ny + 1) + j
            c = (i + 1) * (ny + 1) + j + 1
            d = i * (ny + 1) + j + 1
            faces.append([a, b, c])
            faces.append([a, c, d])
    return Mesh(verts, np.array(faces, dtype=np.int64))
