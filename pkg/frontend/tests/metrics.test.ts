import { describe, expect, it } from "vitest";
import { countLoops, rawMetricStrings, rawMetricsBlock } from "../src/metrics";

// shaped like a real service response, including float spellings that a
// parse-and-reformat cycle would destroy
const body =
  '{"plane":{"normal":[0.0,1.0,0.0],"offset":0.5},' +
  '"loops":[' +
  '{"points":[[0.0,0.5,0.0]],"points_2d":[[0.0,0.0]],' +
  '"metrics":{"area":1.0,"perimeter":4.0,"equivalent_diameter":1.1283791670955126,' +
  '"max_feret":1.4142135623730951,"min_feret":1.0,"centroid":[0.5,0.5],' +
  '"self_intersecting":false},"ambiguous":false},' +
  '{"points":[],"points_2d":[],' +
  '"metrics":{"area":2.5e-07,"perimeter":0.001,"equivalent_diameter":0.0005641895835477,' +
  '"max_feret":0.002,"min_feret":0.0001,"centroid":[-1.5,2.0],' +
  '"self_intersecting":true},"ambiguous":true}],' +
  '"open_chains":[],"crossed_face_count":8,"coplanar_face_count":0}';

describe("countLoops", () => {
  it("counts metrics blocks", () => {
    expect(countLoops(body)).toBe(2);
  });

  it("zero for an empty result", () => {
    expect(countLoops('{"loops":[],"open_chains":[]}')).toBe(0);
  });
});

describe("rawMetricsBlock", () => {
  it("extracts balanced objects per loop", () => {
    expect(rawMetricsBlock(body, 0)).toContain('"area":1.0');
    expect(rawMetricsBlock(body, 1)).toContain('"area":2.5e-07');
  });

  it("throws for an out-of-range loop", () => {
    expect(() => rawMetricsBlock(body, 5)).toThrow();
  });
});

describe("rawMetricStrings", () => {
  it("returns the exact serialized substrings", () => {
    const m = rawMetricStrings(body, 0);
    // byte-identical: full float spelling, no re-rounding
    expect(m.equivalent_diameter).toBe("1.1283791670955126");
    expect(m.max_feret).toBe("1.4142135623730951");
    expect(m.area).toBe("1.0");
    expect(m.min_feret).toBe("1.0");
    expect(m.centroid).toBe("[0.5,0.5]");
    expect(m.self_intersecting).toBe("false");
  });

  it("keeps scientific notation verbatim", () => {
    const m = rawMetricStrings(body, 1);
    expect(m.area).toBe("2.5e-07");
    expect(m.equivalent_diameter).toBe("0.0005641895835477");
  });

  it("substrings appear verbatim in the body", () => {
    for (const loop of [0, 1]) {
      const m = rawMetricStrings(body, loop);
      for (const v of Object.values(m)) {
        expect(body).toContain(v);
      }
    }
  });

  it("tolerates whitespace after colons", () => {
    const spaced = '{"loops":[{"metrics":{"area": 3.5, "min_feret": 1.25}}]}';
    const m = rawMetricStrings(spaced, 0);
    expect(m.area).toBe("3.5");
    expect(m.min_feret).toBe("1.25");
  });
});
