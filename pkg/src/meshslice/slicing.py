"""Plane-mesh intersection: segments, loop assembly, metrics, rasters.

A slice is computed per face: every triangle with vertices strictly on
both sides of the plane contributes exactly one segment.  Vertices
within the snap tolerance of the plane are treated as exactly on it, in
which case the on-plane vertex itself becomes a segment endpoint and the
face is not split further.  Segments are chained into closed loops by
endpoint matching on quantized coordinates; whatever fails to close
(open surface regions) is returned as open chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image
from shapely.geometry import Polygon as _ShapelyPolygon

from .mesh import Mesh, transform_mesh

_AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


@dataclass(frozen=True)
class PlaneSpec:
    """Plane {x : normal . x = offset} with unit normal."""

    normal: tuple[float, float, float]
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=np.float64)
        if n.shape != (3,):
            raise ValueError("normal must be a 3-vector")
        if abs(np.linalg.norm(n) - 1.0) > 1e-9:
            raise ValueError("normal must be unit length (within 1e-9)")
        object.__setattr__(self, "normal", tuple(float(c) for c in n))
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_direction(cls, direction, offset) -> "PlaneSpec":
        """Normalize an arbitrary nonzero direction into a PlaneSpec."""
        d = np.asarray(direction, dtype=np.float64)
        norm = np.linalg.norm(d)
        if norm == 0:
            raise ValueError("zero direction")
        return cls(tuple(d / norm), float(offset))

    @classmethod
    def axial(cls, axis: str, offset: float) -> "PlaneSpec":
        if axis not in _AXES:
            raise ValueError("axis must be one of x, y, z")
        return cls(_AXES[axis], offset)

    @property
    def normal_array(self) -> np.ndarray:
        return np.asarray(self.normal, dtype=np.float64)

    def basis(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Deterministic (origin, u, v) in-plane frame."""
        n = self.normal_array
        helper = np.zeros(3)
        helper[int(np.argmin(np.abs(n)))] = 1.0
        u = np.cross(n, helper)
        u /= np.linalg.norm(u)
        v = np.cross(n, u)
        return n * self.offset, u, v

    def to_dict(self) -> dict:
        return {"normal": list(self.normal), "offset": self.offset}


@dataclass(frozen=True)
class SliceMetrics:
    area: float
    perimeter: float
    equivalent_diameter: float
    max_feret: float
    min_feret: float
    centroid: tuple[float, float]
    self_intersecting: bool = False

    def to_dict(self) -> dict:
        return {
            "area": self.area,
            "perimeter": self.perimeter,
            "equivalent_diameter": self.equivalent_diameter,
            "max_feret": self.max_feret,
            "min_feret": self.min_feret,
            "centroid": list(self.centroid),
            "self_intersecting": self.self_intersecting,
        }


@dataclass(frozen=True)
class SliceLoop:
    points: np.ndarray      # (n, 3) ordered, implicitly closed
    points_2d: np.ndarray   # (n, 2) in the plane frame
    metrics: SliceMetrics
    ambiguous: bool = False  # assembled through a >2-segment junction

    def to_dict(self) -> dict:
        return {
            "points": self.points.tolist(),
            "points_2d": self.points_2d.tolist(),
            "metrics": self.metrics.to_dict(),
            "ambiguous": self.ambiguous,
        }


@dataclass(frozen=True)
class SliceResult:
    plane: PlaneSpec
    segments: np.ndarray  # (k, 2, 3)
    loops: list[SliceLoop]
    open_chains: list[np.ndarray]
    crossed_face_count: int
    coplanar_face_count: int = 0

    @property
    def frame(self):
        return self.plane.basis()

    def to_dict(self) -> dict:
        origin, u, v = self.frame
        return {
            "plane": self.plane.to_dict(),
            "frame": {
                "origin": origin.tolist(),
                "u": u.tolist(),
                "v": v.tolist(),
            },
            "crossed_face_count": self.crossed_face_count,
            "coplanar_face_count": self.coplanar_face_count,
            "loops": [lp.to_dict() for lp in self.loops],
            "open_chains": [c.tolist() for c in self.open_chains],
        }


# ---------------------------------------------------------------------------
# edge-plane intersection


def intersect_edge_plane(a, b, plane: PlaneSpec, tolerance=0.0):
    """Intersection point of segment ab with the plane, or None.

    An endpoint within ``tolerance`` of the plane is snapped and
    returned as-is; if both endpoints are within tolerance the edge is
    coplanar and None is returned (the caller owns that case).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = plane.normal_array
    da = float(n @ a - plane.offset)
    db = float(n @ b - plane.offset)
    on_a = abs(da) <= tolerance
    on_b = abs(db) <= tolerance
    if on_a and on_b:
        return None
    if on_a:
        return a.copy()
    if on_b:
        return b.copy()
    if da * db > 0:
        return None
    t = da / (da - db)
    return a + t * (b - a)


# ---------------------------------------------------------------------------
# segment extraction (vectorized)


def default_snap_tolerance(mesh: Mesh) -> float:
    return 1e-7 * (mesh.bbox_diagonal or 1.0)


def extract_segments(mesh: Mesh, plane: PlaneSpec, snap_tolerance=None):
    """Per-face intersection segments.

    Returns ``(segments, crossed_face_count, coplanar_face_count)``
    where segments is (k, 2, 3).  Faces with vertices strictly on both
    sides of the plane emit one segment each; a face with one edge on
    the plane and its third vertex strictly above emits that edge, so
    sections running exactly through vertices still close.
    """
    if snap_tolerance is None:
        snap_tolerance = default_snap_tolerance(mesh)
    n = plane.normal_array
    d = mesh.vertices @ n - plane.offset
    d = np.where(np.abs(d) <= snap_tolerance, 0.0, d)
    s = np.sign(d)

    fs = s[mesh.faces]  # (m, 3)
    npos = (fs > 0).sum(axis=1)
    nneg = (fs < 0).sum(axis=1)
    nzero = (fs == 0).sum(axis=1)
    crossed = (npos >= 1) & (nneg >= 1)
    coplanar_count = int((nzero == 3).sum())

    segs = []
    v = mesh.vertices

    # a whole edge on the plane, third vertex strictly above: emit the
    # edge itself (once; the below-side twin stays silent) so sections
    # that run exactly through vertices still close
    m0 = (nzero == 2) & (npos == 1)
    if m0.any():
        f0 = mesh.faces[m0]
        s0 = fs[m0]
        pi = np.argmax(s0 > 0, axis=1)
        rows = np.arange(len(f0))
        a = f0[rows, (pi + 1) % 3]
        b = f0[rows, (pi + 2) % 3]
        segs.append(np.stack([v[a], v[b]], axis=1))
    emitted_flat = int(m0.sum())

    # one on-plane vertex, other two split: on-plane vertex + one crossing
    m1 = crossed & (nzero == 1)
    if m1.any():
        f1 = mesh.faces[m1]
        s1 = fs[m1]
        zi = np.argmax(s1 == 0, axis=1)
        rows = np.arange(len(f1))
        zv = f1[rows, zi]
        p = f1[rows, (zi + 1) % 3]
        q = f1[rows, (zi + 2) % 3]
        dp, dq = d[p], d[q]
        t = dp / (dp - dq)
        cross = v[p] + t[:, None] * (v[q] - v[p])
        segs.append(np.stack([v[zv], cross], axis=1))

    # no on-plane vertex: lone vertex on one side, two crossings
    m2 = crossed & (nzero == 0)
    if m2.any():
        f2 = mesh.faces[m2]
        s2 = fs[m2]
        lone_sign = np.where(s2.sum(axis=1) > 0, -1.0, 1.0)  # minority sign
        li = np.argmax(s2 == lone_sign[:, None], axis=1)
        rows = np.arange(len(f2))
        a = f2[rows, li]
        b = f2[rows, (li + 1) % 3]
        c = f2[rows, (li + 2) % 3]
        dav, dbv, dcv = d[a], d[b], d[c]
        t_ab = dav / (dav - dbv)
        t_ac = dav / (dav - dcv)
        p_ab = v[a] + t_ab[:, None] * (v[b] - v[a])
        p_ac = v[a] + t_ac[:, None] * (v[c] - v[a])
        segs.append(np.stack([p_ab, p_ac], axis=1))

    if segs:
        segments = np.concatenate(segs)
    else:
        segments = np.empty((0, 2, 3))
    return segments, int(crossed.sum()) + emitted_flat, coplanar_count


# ---------------------------------------------------------------------------
# loop assembly


def _assemble(segments: np.ndarray, quantum: float):
    """Chain segments into closed loops and open chains.

    Endpoints are matched on coordinates quantized by ``quantum``.
    Junctions with more than two incident segments are resolved by the
    straightest (smallest turning angle) continuation and flagged.
    Returns (loops, open_chains, kept_segments) where each loop is
    (points, ambiguous_flag).
    """
    if not len(segments):
        return [], [], segments

    from scipy.spatial import cKDTree

    pts = segments.reshape(-1, 3)
    uniq, first, inverse = np.unique(
        pts, axis=0, return_index=True, return_inverse=True
    )
    # cluster unique endpoints within the quantum (grid rounding alone
    # splits coincident points that straddle a cell boundary)
    if len(uniq) > 1:
        pairs = cKDTree(uniq).query_pairs(quantum, output_type="ndarray")
        parent = np.arange(len(uniq))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for a, b in pairs:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        roots = np.array([find(i) for i in range(len(uniq))])
    else:
        roots = np.zeros(len(uniq), dtype=np.int64)
    kept = np.unique(roots)
    rank = np.full(len(uniq), -1, dtype=np.int64)
    rank[kept] = np.arange(len(kept))
    node_ids = rank[roots][inverse]
    positions = list(uniq[kept])
    ends = node_ids.reshape(-1, 2)

    good = ends[:, 0] != ends[:, 1]
    ends = ends[good]
    kept_segments = segments[good]

    # canonical processing order, independent of input segment order
    order = np.lexsort(
        (
            np.maximum(ends[:, 0], ends[:, 1]),
            np.minimum(ends[:, 0], ends[:, 1]),
        )
    )
    ends = ends[order]
    kept_segments = kept_segments[order]

    ends_list = [(int(u), int(w)) for u, w in ends]
    coords = [tuple(p) for p in positions]
    incident: dict[int, list[int]] = {}
    for ei, (u, w) in enumerate(ends_list):
        incident.setdefault(u, []).append(ei)
        incident.setdefault(w, []).append(ei)
    degree = {nid: len(eids) for nid, eids in incident.items()}
    used = [False] * len(ends_list)

    def other(ei, nid):
        u, w = ends_list[ei]
        return w if u == nid else u

    def pick_next(nid, prev_dir):
        cands = [ei for ei in incident[nid] if not used[ei]]
        if not cands:
            return None
        if len(cands) == 1 or prev_dir is None:
            return cands[0], len(cands) > 1
        px, py, pz = prev_dir
        hx, hy, hz = coords[nid]
        best, best_cos = None, -np.inf
        for ei in cands:
            ax, ay, az = coords[other(ei, nid)]
            dx, dy, dz = ax - hx, ay - hy, az - hz
            nn = (dx * dx + dy * dy + dz * dz) ** 0.5
            if nn == 0:
                continue
            c = (px * dx + py * dy + pz * dz) / nn
            if c > best_cos:
                best_cos, best = c, ei
        return (best, True) if best is not None else (cands[0], True)

    def walk(start_node, first_edge):
        chain = [start_node]
        ambiguous = False
        nid = start_node
        ei = first_edge
        prev_dir = None
        while True:
            used[ei] = True
            nxt = other(ei, nid)
            ax, ay, az = coords[nxt]
            bx, by, bz = coords[nid]
            dx, dy, dz = ax - bx, ay - by, az - bz
            nn = (dx * dx + dy * dy + dz * dz) ** 0.5
            prev_dir = (dx / nn, dy / nn, dz / nn) if nn else None
            chain.append(nxt)
            nid = nxt
            if nid == start_node:
                return chain, ambiguous, True
            res = pick_next(nid, prev_dir)
            if res is None:
                return chain, ambiguous, False
            ei, amb = res
            ambiguous = ambiguous or amb

    loops = []
    chains = []

    # open chains first: start at odd-degree nodes
    for nid in sorted(n for n, dg in degree.items() if dg % 2 == 1):
        while any(not used[ei] for ei in incident[nid]):
            ei = next(ei for ei in incident[nid] if not used[ei])
            chain, amb, closed = walk(nid, ei)
            pts = np.array([positions[c] for c in chain])
            if closed:
                loops.append((pts[:-1], amb))
            else:
                chains.append(pts)

    # remaining edges are cycles
    for ei in range(len(ends)):
        if used[ei]:
            continue
        start = int(ends[ei, 0])
        chain, amb, closed = walk(start, ei)
        pts = np.array([positions[c] for c in chain])
        if closed:
            if len(pts) - 1 >= 3:
                loops.append((pts[:-1], amb))
        else:
            chains.append(pts)

    return loops, chains, kept_segments


# ---------------------------------------------------------------------------
# metrics


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Andrew monotone chain, counter-clockwise, no duplicate endpoint."""
    pts = np.unique(points, axis=0)
    if len(pts) <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    seq = [tuple(p) for p in pts]

    def half(seq):
        out = []
        for px, py in seq:
            while len(out) >= 2:
                bx, by = out[-1]
                ax, ay = out[-2]
                if (bx - ax) * (py - ay) - (by - ay) * (px - ax) > 0:
                    break
                out.pop()
            out.append((px, py))
        return out

    lower = half(seq)
    upper = half(seq[::-1])
    return np.array(lower[:-1] + upper[:-1])


def _feret_diameters(hull: np.ndarray) -> tuple[float, float]:
    """(max, min) caliper widths of a convex polygon."""
    if len(hull) == 1:
        return 0.0, 0.0
    if len(hull) == 2:
        d = float(np.linalg.norm(hull[1] - hull[0]))
        return d, 0.0

    # rotating calipers: hull is strictly convex and counter-clockwise,
    # so the antipodal pointer advances monotonically (O(h) total)
    pts = [(float(x), float(y)) for x, y in hull]
    n = len(pts)

    max_d2 = 0.0
    min_w = np.inf
    j = 1
    for i in range(n):
        ax, ay = pts[i]
        bx, by = pts[(i + 1) % n]
        ex, ey = bx - ax, by - ay
        jx, jy = pts[j]
        height = ex * (jy - ay) - ey * (jx - ax)
        while True:
            kx, ky = pts[(j + 1) % n]
            nxt = ex * (ky - ay) - ey * (kx - ax)
            if nxt <= height:
                break
            j = (j + 1) % n
            jx, jy, height = kx, ky, nxt
        da = (jx - ax) ** 2 + (jy - ay) ** 2
        db = (jx - bx) ** 2 + (jy - by) ** 2
        if da > max_d2:
            max_d2 = da
        if db > max_d2:
            max_d2 = db
        edge_len = (ex * ex + ey * ey) ** 0.5
        if edge_len > 0:
            w = height / edge_len
            if w < min_w:
                min_w = w
    return float(max_d2**0.5), float(min_w)


def compute_metrics(loop_2d) -> SliceMetrics:
    """Area, perimeter, and diameters of a closed polyline (>= 3 points)."""
    pts = np.asarray(loop_2d, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 3:
        raise ValueError("loop needs at least 3 points")
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    signed_area = 0.5 * cross.sum()
    area = abs(signed_area)
    perimeter = float(
        np.sqrt((xn - x) ** 2 + (yn - y) ** 2).sum()
    )
    if signed_area != 0:
        cx = float(((x + xn) * cross).sum() / (6 * signed_area))
        cy = float(((y + yn) * cross).sum() / (6 * signed_area))
    else:
        cx, cy = float(x.mean()), float(y.mean())
    hull = _convex_hull(pts)
    max_feret, min_feret = _feret_diameters(hull)
    self_x = not _ShapelyPolygon(pts).is_valid
    return SliceMetrics(
        area=float(area),
        perimeter=perimeter,
        equivalent_diameter=float(2 * np.sqrt(area / np.pi)),
        max_feret=max_feret,
        min_feret=min_feret,
        centroid=(cx, cy),
        self_intersecting=self_x,
    )


# ---------------------------------------------------------------------------
# slicing entry points


def slice_mesh(mesh: Mesh, plane: PlaneSpec, snap_tolerance=None) -> SliceResult:
    """Intersect ``mesh`` with ``plane`` and assemble loops + metrics."""
    if mesh.face_count == 0:
        raise ValueError("mesh has no faces")
    if snap_tolerance is None:
        snap_tolerance = default_snap_tolerance(mesh)
    segments, crossed, coplanar = extract_segments(
        mesh, plane, snap_tolerance
    )
    raw_loops, chains, segments = _assemble(segments, snap_tolerance)

    origin, u, v = plane.basis()
    loops = []
    for pts, amb in raw_loops:
        rel = pts - origin
        pts2d = np.stack([rel @ u, rel @ v], axis=1)
        loops.append(
            SliceLoop(
                points=pts,
                points_2d=pts2d,
                metrics=compute_metrics(pts2d),
                ambiguous=amb,
            )
        )
    # deterministic loop order: by first 2-D point, then length
    loops.sort(
        key=lambda lp: (
            round(float(lp.metrics.area), 12),
            tuple(np.round(lp.points_2d[0], 9)),
        ),
        reverse=True,
    )
    return SliceResult(
        plane=plane,
        segments=segments,
        loops=loops,
        open_chains=chains,
        crossed_face_count=crossed,
        coplanar_face_count=coplanar,
    )


def slice_axial(mesh: Mesh, axis: str, offset: float, snap_tolerance=None) -> SliceResult:
    """Axis-aligned fast path; identical contract to ``slice_mesh``."""
    return slice_mesh(mesh, PlaneSpec.axial(axis, offset), snap_tolerance)


# ---------------------------------------------------------------------------
# face subdivision along the plane


def subdivide_crossed_faces(
    mesh: Mesh, plane: PlaneSpec, snap_tolerance=None
) -> Mesh:
    """Split every plane-crossing face so no face straddles the plane.

    Strictly crossed triangles become 3 (lone-vertex side triangle plus
    a quad split along its shorter diagonal); triangles with one
    on-plane vertex and a strict crossing opposite become 2.  Crossing
    points are welded across neighboring faces.  Total area is
    preserved.
    """
    if snap_tolerance is None:
        snap_tolerance = default_snap_tolerance(mesh)
    n = plane.normal_array
    d = mesh.vertices @ n - plane.offset
    d = np.where(np.abs(d) <= snap_tolerance, 0.0, d)
    s = np.sign(d)

    verts = list(mesh.vertices)
    new_point: dict[tuple, int] = {}

    def crossing(p, q):
        t = d[p] / (d[p] - d[q])
        pt = mesh.vertices[p] + t * (mesh.vertices[q] - mesh.vertices[p])
        key = tuple(np.round(pt / snap_tolerance).astype(np.int64))
        if key not in new_point:
            new_point[key] = len(verts)
            verts.append(pt)
        return new_point[key]

    faces = []
    for a, b, c in mesh.faces:
        sa, sb, sc = s[a], s[b], s[c]
        npos = (sa > 0) + (sb > 0) + (sc > 0)
        nneg = (sa < 0) + (sb < 0) + (sc < 0)
        if not (npos >= 1 and nneg >= 1):
            faces.append([a, b, c])
            continue
        tri = [a, b, c]
        signs = [sa, sb, sc]
        if 0.0 in signs:
            # one on-plane vertex, strict crossing on the opposite edge
            zi = signs.index(0.0)
            z, p, q = tri[zi], tri[(zi + 1) % 3], tri[(zi + 2) % 3]
            x = crossing(p, q)
            faces.append([z, p, x])
            faces.append([z, x, q])
        else:
            lone_sign = -1.0 if (sa + sb + sc) > 0 else 1.0
            li = signs.index(lone_sign)
            av, bv, cv = tri[li], tri[(li + 1) % 3], tri[(li + 2) % 3]
            p_ab = crossing(av, bv)
            p_ca = crossing(cv, av)
            faces.append([av, p_ab, p_ca])
            d1 = np.linalg.norm(verts[p_ab] - verts[cv])
            d2 = np.linalg.norm(verts[bv] - verts[p_ca])
            if d1 <= d2:
                faces.append([p_ab, bv, cv])
                faces.append([p_ab, cv, p_ca])
            else:
                faces.append([p_ab, bv, p_ca])
                faces.append([bv, cv, p_ca])
    out = [f for f in faces if len({f[0], f[1], f[2]}) == 3]
    return Mesh(np.asarray(verts, dtype=np.float64), np.asarray(out, dtype=np.int64))


# ---------------------------------------------------------------------------
# rasterization


def rasterize_slice(result: SliceResult, resolution: int, window=None) -> np.ndarray:
    """Even-odd fill of all loops into a square uint8 mask (0 / 255).

    ``window`` is ((xmin, ymin), (xmax, ymax)) in the plane frame; None
    auto-fits the loop bounding box padded by 5% and squared up.
    """
    if resolution < 16:
        raise ValueError("resolution must be >= 16")
    all_pts = (
        np.concatenate([lp.points_2d for lp in result.loops])
        if result.loops
        else np.zeros((0, 2))
    )
    if window is None:
        if not len(all_pts):
            window = ((0.0, 0.0), (1.0, 1.0))
        else:
            lo = all_pts.min(axis=0)
            hi = all_pts.max(axis=0)
            center = (lo + hi) / 2
            half = float((hi - lo).max()) / 2 or 0.5
            half *= 1.05
            window = (tuple(center - half), tuple(center + half))
    (x0, y0), (x1, y1) = window
    w = x1 - x0
    h = y1 - y0
    if w <= 0 or h <= 0:
        raise ValueError("window must have positive extent")

    # even-odd crossing-number scanline at one sample per pixel
    mask = np.zeros((resolution, resolution), dtype=bool)
    xs = x0 + np.arange(resolution) * w / resolution
    ys = y1 - np.arange(resolution) * h / resolution
    for lp in result.loops:
        p = lp.points_2d
        ax, ay = p[:, 0], p[:, 1]
        bx, by = np.roll(ax, -1), np.roll(ay, -1)
        for row, y in enumerate(ys):
            straddle = (ay > y) != (by > y)
            if not straddle.any():
                continue
            t = (y - ay[straddle]) / (by[straddle] - ay[straddle])
            xi = np.sort(ax[straddle] + t * (bx[straddle] - ax[straddle]))
            counts = np.searchsorted(xi, xs, side="left")
            mask[row] ^= (len(xi) - counts) % 2 == 1
    return mask.astype(np.uint8) * 255


def save_raster(image: np.ndarray, path) -> None:
    """Write a uint8 mask as an 8-bit single-channel PNG."""
    Image.fromarray(image, mode="L").save(path, format="PNG")
