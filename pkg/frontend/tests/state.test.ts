import { describe, expect, it } from "vitest";
import {
  SliceGate,
  clampOffset,
  initialState,
  normalize,
  projectedExtent,
  scrollQuantum,
  setPlaneNormal,
  stepOffset,
} from "../src/state";
import type { SliceRequest, Vec3 } from "../src/types";

describe("projectedExtent", () => {
  it("axis-aligned normal gives the box side", () => {
    expect(projectedExtent([0, 0, 0], [1, 2, 3], [0, 1, 0])).toEqual([0, 2]);
  });

  it("negated normal flips the interval", () => {
    expect(projectedExtent([0, 0, 0], [1, 2, 3], [0, -1, 0])).toEqual([-2, 0]);
  });

  it("diagonal normal sums per-axis support", () => {
    const s = Math.SQRT1_2;
    const [lo, hi] = projectedExtent([-1, -1, 0], [1, 1, 0], [s, s, 0]);
    expect(lo).toBeCloseTo(-2 * s, 12);
    expect(hi).toBeCloseTo(2 * s, 12);
  });
});

describe("clampOffset / scrollQuantum", () => {
  it("clamps both ends", () => {
    expect(clampOffset(5, [-1, 1])).toBe(1);
    expect(clampOffset(-5, [-1, 1])).toBe(-1);
    expect(clampOffset(0.3, [-1, 1])).toBe(0.3);
  });

  it("quantum is extent/200", () => {
    expect(scrollQuantum([-10, 10])).toBeCloseTo(0.1, 12);
  });

  it("degenerate extent falls back to 1", () => {
    expect(scrollQuantum([3, 3])).toBe(1);
  });
});

describe("normalize", () => {
  it("unit length", () => {
    const n = normalize([3, 0, 4]);
    expect(n).toEqual([0.6, 0, 0.8]);
  });

  it("rejects zero vector", () => {
    expect(() => normalize([0, 0, 0])).toThrow();
  });
});

describe("state transitions", () => {
  it("setPlaneNormal re-derives extent, quantum, and clamps", () => {
    const st = initialState();
    st.offset = 100;
    setPlaneNormal(st, [0, 0, 2], [-1, -1, -5], [1, 1, 5]);
    expect(st.normal).toEqual([0, 0, 1]);
    expect(st.extent).toEqual([-5, 5]);
    expect(st.quantum).toBeCloseTo(0.05, 12);
    expect(st.offset).toBe(5); // clamped into the new extent
  });

  it("stepOffset moves by ticks and clamps at the boundary", () => {
    const st = initialState();
    setPlaneNormal(st, [0, 1, 0], [0, -1, 0], [0, 1, 0]);
    st.offset = 0;
    stepOffset(st, 3);
    expect(st.offset).toBeCloseTo(3 * st.quantum, 12);
    stepOffset(st, 1000);
    expect(st.offset).toBe(1); // scroll past extent clamps
  });
});

describe("SliceGate", () => {
  function deferredSender() {
    const resolvers: Array<(raw: string) => void> = [];
    const send = (_req: SliceRequest) =>
      new Promise<string>((resolve) => resolvers.push(resolve));
    return { send, resolvers };
  }

  const req = (offset: number): SliceRequest => ({
    model: "m",
    normal: [0, 1, 0] as Vec3,
    offset,
  });

  it("delivers a single response", async () => {
    const { send, resolvers } = deferredSender();
    const seen: string[] = [];
    const gate = new SliceGate(send, (raw) => seen.push(raw), () => {}, 0);
    gate.request(req(1));
    resolvers[0]("one");
    await new Promise((r) => setTimeout(r, 0));
    expect(seen).toEqual(["one"]);
  });

  it("discards stale responses that arrive after newer requests", async () => {
    const { send, resolvers } = deferredSender();
    const seen: string[] = [];
    const gate = new SliceGate(send, (raw) => seen.push(raw), () => {}, 0);
    gate.request(req(1));
    gate.request(req(2));
    // old response arrives late, after the newer request was issued
    resolvers[0]("stale");
    resolvers[1]("fresh");
    await new Promise((r) => setTimeout(r, 0));
    expect(seen).toEqual(["fresh"]);
  });

  it("discards out-of-order arrivals (newer first, older later)", async () => {
    const { send, resolvers } = deferredSender();
    const seen: string[] = [];
    const gate = new SliceGate(send, (raw) => seen.push(raw), () => {}, 0);
    gate.request(req(1));
    gate.request(req(2));
    resolvers[1]("fresh");
    await new Promise((r) => setTimeout(r, 0));
    resolvers[0]("stale");
    await new Promise((r) => setTimeout(r, 0));
    expect(seen).toEqual(["fresh"]);
  });

  it("debounce coalesces a scroll burst into one request", async () => {
    const issued: number[] = [];
    const gate = new SliceGate(
      async (r) => {
        issued.push(r.offset);
        return "ok";
      },
      () => {},
      () => {},
      5
    );
    for (let i = 1; i <= 10; i++) gate.request(req(i));
    await new Promise((r) => setTimeout(r, 25));
    expect(issued).toEqual([10]); // only the last offset fired
    expect(gate.issuedCount).toBe(1);
  });

  it("reports errors only for the latest request", async () => {
    const errors: unknown[] = [];
    let n = 0;
    const gate = new SliceGate(
      async () => {
        n++;
        throw new Error(`boom ${n}`);
      },
      () => {},
      (e) => errors.push(e),
      0
    );
    gate.request(req(1));
    await new Promise((r) => setTimeout(r, 0));
    expect(errors).toHaveLength(1);
  });
});
