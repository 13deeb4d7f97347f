"""Mesh repair, arbitrary-plane slicing, cross-section metrology,
display optimization, and slice-image dataset generation for
CT/MRI-derived surface meshes."""

__version__ = "0.1.0"

from .mesh import (  # noqa: F401
    EmptyMeshError,
    LoadReport,
    Mesh,
    MeshError,
    MeshFormatError,
    TopologySummary,
    load_mesh,
    save_mesh,
    topology_summary,
    transform_mesh,
    weld_vertices,
)
from .analysis import (  # noqa: F401
    CurvatureField,
    RiskReport,
    analyze,
    compute_curvature,
    detect_boundary,
    detect_errors,
    remove_risky,
)
from .slicing import (  # noqa: F401
    PlaneSpec,
    SliceLoop,
    SliceMetrics,
    SliceResult,
    compute_metrics,
    default_snap_tolerance,
    extract_segments,
    intersect_edge_plane,
    rasterize_slice,
    save_raster,
    slice_axial,
    slice_mesh,
    subdivide_crossed_faces,
)
from .optimize import (  # noqa: F401
    DecimationError,
    OptimizeParams,
    decimate,
    smooth,
)
from .distance import (  # noqa: F401
    point_mesh_distance,
    point_triangle_distances,
    sample_surface,
    sampled_hausdorff,
)
from .dataset import (  # noqa: F401
    DatasetManifest,
    DatasetRecord,
    SweepSpec,
    generate,
)
