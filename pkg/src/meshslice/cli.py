"""Command-line front end: inspection, repair, slicing, optimization,
dataset sweeps, a slicing benchmark harness, and the HTTP service."""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .analysis import analyze, remove_risky
from .dataset import SweepSpec, generate
from .mesh import Mesh, MeshError, load_mesh, save_mesh, topology_summary
from .optimize import DecimationError, OptimizeParams, decimate, smooth
from .slicing import (
    PlaneSpec,
    extract_segments,
    rasterize_slice,
    save_raster,
    slice_mesh,
)

_UNIT_SCALE = {"mm": 1.0, "cm": 10.0, "m": 1000.0}


@dataclass(frozen=True)
class BenchRecord:
    model_id: str
    variant: str  # "original" | "optimized"
    axis: str
    offset: float
    vertex_count: int
    face_count: int
    wall_time: float  # median over runs, seconds
    segment_time: float  # intersection phase only
    cv: float  # coefficient of variation of wall_time

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def _add_mesh_arg(p):
    p.add_argument("mesh", help="input mesh file (STL or OBJ)")
    p.add_argument(
        "--format",
        default="auto",
        choices=["auto", "stl-binary", "stl-ascii", "obj"],
    )
    p.add_argument(
        "--weld-tolerance",
        type=float,
        default=None,
        help="vertex merge radius; default 1e-6 x bbox diagonal",
    )
    p.add_argument(
        "--units",
        default="mm",
        choices=sorted(_UNIT_SCALE),
        help="model units; coordinates are scaled to mm for reporting",
    )


def _load(args) -> Mesh:
    mesh = load_mesh(
        args.mesh, format=args.format, weld_tolerance=args.weld_tolerance
    )
    scale = _UNIT_SCALE[args.units]
    if scale != 1.0:
        scaled = Mesh(mesh.vertices * scale, mesh.faces)
        scaled.load_report = mesh.load_report
        mesh = scaled
    return mesh


def _plane_from_args(args) -> PlaneSpec:
    if args.normal is not None:
        direction = [float(c) for c in args.normal.split(",")]
        return PlaneSpec.from_direction(direction, args.offset)
    return PlaneSpec.axial(args.axis, args.offset)


def _add_plane_args(p):
    p.add_argument("--axis", default="y", choices=["x", "y", "z"])
    p.add_argument(
        "--normal",
        default=None,
        help="arbitrary plane normal as 'x,y,z' (overrides --axis)",
    )
    p.add_argument("--offset", type=float, required=True)


# ---------------------------------------------------------------------------
# subcommands


def cmd_info(args) -> int:
    mesh = _load(args)
    s = topology_summary(mesh)
    print(
        f"V={s.vertex_count} E={s.edge_count} F={s.face_count} "
        f"chi={s.euler_characteristic} "
        f"watertight={'true' if s.is_watertight else 'false'} "
        f"boundary_edges={s.boundary_edge_count} "
        f"components={s.connected_component_count}"
    )
    if mesh.load_report:
        r = mesh.load_report
        print(
            f"load: input_vertices={r.input_vertex_count} "
            f"welded={r.welded_vertex_count} "
            f"dropped_faces={r.dropped_face_count}"
        )
    return 0


def cmd_analyze(args) -> int:
    mesh = _load(args)
    report = analyze(
        mesh,
        eps_gaussian=args.eps_gaussian,
        eps_mean=args.eps_mean,
        component_size_threshold=args.component_threshold,
        aspect_ratio_threshold=args.aspect_ratio,
    )
    text = report.to_text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_repair(args) -> int:
    mesh = _load(args)
    report = analyze(mesh, component_size_threshold=args.component_threshold)
    if args.all_isolated:
        components = range(len(report.isolated_components))
    elif args.components:
        components = [int(c) for c in args.components.split(",")]
    else:
        components = ()
    repaired = remove_risky(
        mesh,
        report,
        remove_boundary=args.remove_boundary,
        component_indices=components,
    )
    save_mesh(repaired, args.out, format=args.out_format)
    print(
        f"repaired: {mesh.vertex_count}->{repaired.vertex_count} vertices, "
        f"{mesh.face_count}->{repaired.face_count} faces"
    )
    return 0


def cmd_slice(args) -> int:
    mesh = _load(args)
    plane = _plane_from_args(args)
    result = slice_mesh(mesh, plane)
    print(
        f"crossed_faces={result.crossed_face_count} "
        f"loops={len(result.loops)} open_chains={len(result.open_chains)}"
    )
    for i, lp in enumerate(result.loops):
        m = lp.metrics
        print(
            f"loop {i}: area={m.area:.4f} perimeter={m.perimeter:.4f} "
            f"deq={m.equivalent_diameter:.4f} "
            f"feret_min={m.min_feret:.4f} feret_max={m.max_feret:.4f}"
        )
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(result.to_dict(), fh)
    if args.raster:
        save_raster(
            rasterize_slice(result, args.resolution), args.raster
        )
    return 0


def cmd_optimize(args) -> int:
    mesh = _load(args)
    params = OptimizeParams(
        target_vertex_fraction=args.fraction,
        smoothing_iterations=args.smooth_iterations,
        smoothing_kind=args.smoothing,
        preserve_boundary=args.preserve_boundary,
    )
    out = mesh
    if params.target_vertex_fraction < 1.0:
        out = decimate(
            out,
            params.target_vertex_fraction,
            preserve_boundary=params.preserve_boundary,
        )
    out = smooth(out, params)
    save_mesh(out, args.out, format=args.out_format)
    print(
        f"optimized: {mesh.vertex_count}->{out.vertex_count} vertices, "
        f"{mesh.face_count}->{out.face_count} faces"
    )
    return 0


def cmd_dataset(args) -> int:
    mesh = _load(args)
    if ":" in args.offsets:
        start, stop, count = args.offsets.split(":")
        offsets = tuple(np.linspace(float(start), float(stop), int(count)))
    else:
        offsets = tuple(float(o) for o in args.offsets.split(","))
    rotations = []
    for triple in args.rotations.split(";"):
        rotations.append(tuple(float(a) for a in triple.split(",")))
    spec = SweepSpec(
        axes=tuple(args.axes.split(",")),
        offsets=offsets,
        rotations=tuple(rotations),
        resolution=args.resolution,
        label=args.label,
        seed=args.seed,
        random_direction_count=args.random,
    )
    manifest = generate(mesh, spec, args.out, model_id=args.model_id)
    print(f"wrote {len(manifest.records)} images to {args.out}")
    return 0


def _bench_mesh(mesh: Mesh, model_id, variant, plane, axis, runs) -> BenchRecord:
    seg_times = []
    total_times = []
    for _ in range(runs):
        t0 = time.perf_counter()
        extract_segments(mesh, plane)
        seg_times.append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        slice_mesh(mesh, plane)
        total_times.append(time.perf_counter() - t0)
    med = statistics.median(total_times)
    cv = statistics.pstdev(total_times) / med if med > 0 else 0.0
    return BenchRecord(
        model_id=model_id,
        variant=variant,
        axis=axis,
        offset=plane.offset,
        vertex_count=mesh.vertex_count,
        face_count=mesh.face_count,
        wall_time=med,
        segment_time=statistics.median(seg_times),
        cv=cv,
    )


def cmd_bench(args) -> int:
    mesh = _load(args)
    plane = _plane_from_args(args)
    model_id = args.mesh
    records = [
        _bench_mesh(mesh, model_id, "original", plane, args.axis, args.runs)
    ]
    if args.optimized is not None:
        opt = decimate(mesh, args.optimized)
        records.append(
            _bench_mesh(opt, model_id, "optimized", plane, args.axis, args.runs)
        )
    for r in records:
        print(
            f"{r.model_id}\t{r.variant}\t{r.axis}={r.offset}\t"
            f"V={r.vertex_count}\tF={r.face_count}\t"
            f"T={r.wall_time:.4f}s\tTseg={r.segment_time:.4f}s\tcv={r.cv:.3f}"
        )
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([r.to_dict() for r in records], fh)
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(
        args.mesh_dir,
        port=args.port,
        host=args.host,
        static_dir=args.static,
    )
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meshslice",
        description="mesh repair, slicing, metrics, and dataset generation",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="topology summary")
    _add_mesh_arg(p)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("analyze", help="risk report")
    _add_mesh_arg(p)
    p.add_argument("--eps-gaussian", type=float, default=None)
    p.add_argument("--eps-mean", type=float, default=None)
    p.add_argument("--component-threshold", type=int, default=None)
    p.add_argument("--aspect-ratio", type=float, default=10.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("repair", help="remove risky structures")
    _add_mesh_arg(p)
    p.add_argument("--out", required=True)
    p.add_argument(
        "--out-format", default="stl-binary", choices=["stl-binary", "obj"]
    )
    p.add_argument("--remove-boundary", action="store_true")
    p.add_argument("--components", default=None, help="comma-separated indices")
    p.add_argument("--all-isolated", action="store_true")
    p.add_argument("--component-threshold", type=int, default=None)
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("slice", help="plane cross-section with metrics")
    _add_mesh_arg(p)
    _add_plane_args(p)
    p.add_argument("--json", default=None, help="write SliceResult record")
    p.add_argument("--raster", default=None, help="write binary mask PNG")
    p.add_argument("--resolution", type=int, default=256)
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("optimize", help="decimate and smooth")
    _add_mesh_arg(p)
    p.add_argument("--out", required=True)
    p.add_argument(
        "--out-format", default="stl-binary", choices=["stl-binary", "obj"]
    )
    p.add_argument("--fraction", type=float, default=0.5)
    p.add_argument("--smooth-iterations", type=int, default=0)
    p.add_argument(
        "--smoothing", default="taubin", choices=["laplacian", "taubin"]
    )
    p.add_argument("--preserve-boundary", action="store_true")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("dataset", help="labeled slice-image sweep")
    _add_mesh_arg(p)
    p.add_argument("--out", required=True)
    p.add_argument("--model-id", default="model")
    p.add_argument("--axes", default="y", help="comma list of x,y,z")
    p.add_argument(
        "--offsets",
        required=True,
        help="comma list, or start:stop:count",
    )
    p.add_argument(
        "--rotations",
        default="0,0,0",
        help="semicolon list of Euler-degree triples",
    )
    p.add_argument("--resolution", type=int, default=256)
    p.add_argument("--label", default="")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random", type=int, default=0)
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("bench", help="slicing benchmark")
    _add_mesh_arg(p)
    _add_plane_args(p)
    p.add_argument("--optimized", type=float, default=None)
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--json", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP slice service")
    p.add_argument("mesh_dir")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", default=None, help="viewer static files dir")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return args.func(args)
    except (MeshError, DecimationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
