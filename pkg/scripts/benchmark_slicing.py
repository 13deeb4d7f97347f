#!/usr/bin/env python3
"""Slicing throughput across mesh scales, original vs 50%-decimated.

Builds procedural tori at increasing resolutions, times the full slice
pipeline (segment extraction, loop assembly, metrics) on each, then
repeats on the quadric-decimated variant and reports the speedup.
"""

import argparse
import statistics
import time

from meshslice import PlaneSpec, decimate, primitives, slice_mesh


def median_slice_time(mesh, plane, runs):
    times = []
    for _ in range(runs):
        t0 = time.perf_counter()
        slice_mesh(mesh, plane)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), (
        statistics.pstdev(times) / statistics.median(times) if runs > 1 else 0.0
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=5)
    ap.add_argument(
        "--scales",
        default="128,256,512,1036",
        help="comma list of torus major-segment counts",
    )
    ap.add_argument("--offset", type=float, default=0.13)
    args = ap.parse_args()

    plane = PlaneSpec((0.0, 0.0, 1.0), args.offset)
    print("V\tF\tvariant\tmedian_s\tcv\tspeedup")
    for major in (int(s) for s in args.scales.split(",")):
        minor = major // 2
        mesh = primitives.torus(major, minor, major_radius=2.0, minor_radius=0.5)
        t_full, cv_full = median_slice_time(mesh, plane, args.runs)
        print(
            f"{mesh.vertex_count}\t{mesh.face_count}\toriginal"
            f"\t{t_full:.4f}\t{cv_full:.3f}\t-"
        )
        t0 = time.perf_counter()
        opt = decimate(mesh, 0.5)
        t_dec = time.perf_counter() - t0
        t_opt, cv_opt = median_slice_time(opt, plane, args.runs)
        print(
            f"{opt.vertex_count}\t{opt.face_count}\toptimized"
            f"\t{t_opt:.4f}\t{cv_opt:.3f}\t{t_full / t_opt:.2f}x"
            f"\t(decimation {t_dec:.1f}s)"
        )


if __name__ == "__main__":
    main()
