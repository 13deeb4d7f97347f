import type { Geometry } from "./types";

/**
 * Parse the service's compact geometry layout:
 * uint32 vertexCount, uint32 faceCount, float32 xyz per vertex,
 * uint32 abc per face — all little-endian.
 */
export function parseGeometry(buffer: ArrayBuffer): Geometry {
  if (buffer.byteLength < 8) {
    throw new Error("geometry buffer truncated: missing header");
  }
  const header = new DataView(buffer, 0, 8);
  const vertexCount = header.getUint32(0, true);
  const faceCount = header.getUint32(4, true);
  const expected = 8 + vertexCount * 12 + faceCount * 12;
  if (buffer.byteLength !== expected) {
    throw new Error(
      `geometry buffer length ${buffer.byteLength}, expected ${expected}`
    );
  }
  const positions = new Float32Array(buffer, 8, vertexCount * 3);
  const indices = new Uint32Array(buffer, 8 + vertexCount * 12, faceCount * 3);
  return { positions, indices, vertexCount, faceCount };
}
