#!/usr/bin/env python3
"""Generate a small labeled slice-image dataset from a mesh file.

Writes binary mask PNGs plus a tab-separated manifest describing the
plane (normal, offset, mesh rotation) behind every image, so the sweep
is reproducible downstream.  Defaults to a built-in torus when no mesh
is given.
"""

import argparse

from meshslice import SweepSpec, generate, load_mesh, primitives


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir")
    ap.add_argument("--mesh", default=None, help="STL/OBJ input; default torus")
    ap.add_argument("--axes", default="x,y,z")
    ap.add_argument("--offsets", type=int, default=8, help="offsets per axis")
    ap.add_argument("--span", type=float, default=0.8, help="offset range as bbox fraction")
    ap.add_argument("--resolution", type=int, default=256)
    ap.add_argument("--random", type=int, default=0, help="extra random-direction planes")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if args.mesh:
        mesh = load_mesh(args.mesh)
        model_id = args.mesh.rsplit("/", 1)[-1].rsplit(".", 1)[0]
    else:
        mesh = primitives.torus(96, 48)
        model_id = "torus"

    half = args.span * mesh.bbox_diagonal / 2
    spec = SweepSpec(
        axes=tuple(args.axes.split(",")),
        offsets=(-half, half, args.offsets),
        resolution=args.resolution,
        random_direction_count=args.random,
        seed=args.seed,
        label=model_id,
    )
    manifest = generate(mesh, spec, args.out_dir, model_id=model_id)
    ok = sum(1 for r in manifest.records if r.status == "ok")
    print(
        f"wrote {len(manifest.records)} images ({ok} non-empty) "
        f"to {args.out_dir}"
    )


if __name__ == "__main__":
    main()
