export type Vec3 = [number, number, number];

export interface ModelInfo {
  id: string;
  topology: {
    vertex_count: number;
    edge_count: number;
    face_count: number;
    euler_characteristic: number;
    is_watertight: boolean;
    boundary_edge_count: number;
    connected_component_count: number;
  };
  bbox: { min: Vec3; max: Vec3 };
}

export interface SliceMetrics {
  area: number;
  perimeter: number;
  equivalent_diameter: number;
  max_feret: number;
  min_feret: number;
  centroid: [number, number];
  self_intersecting: boolean;
}

export interface SliceLoop {
  points: Vec3[];
  points_2d: [number, number][];
  metrics: SliceMetrics;
  ambiguous: boolean;
}

export interface SliceResult {
  plane: { normal: Vec3; offset: number };
  loops: SliceLoop[];
  open_chains: Vec3[][];
  crossed_face_count: number;
  coplanar_face_count: number;
}

export interface Annotation {
  id: number;
  anchor: Vec3;
  title: string;
  text: string;
}

export interface SliceRequest {
  model: string;
  normal: Vec3;
  offset: number;
}

export interface Geometry {
  positions: Float32Array;
  indices: Uint32Array;
  vertexCount: number;
  faceCount: number;
}
