import type { SliceRequest, SliceResult, Vec3 } from "./types";

/** Extent [lo, hi] of an axis-aligned box projected onto a direction. */
export function projectedExtent(
  bboxMin: Vec3,
  bboxMax: Vec3,
  normal: Vec3
): [number, number] {
  let lo = 0;
  let hi = 0;
  for (let k = 0; k < 3; k++) {
    const a = normal[k] * bboxMin[k];
    const b = normal[k] * bboxMax[k];
    lo += Math.min(a, b);
    hi += Math.max(a, b);
  }
  return [lo, hi];
}

export function clampOffset(offset: number, extent: [number, number]): number {
  return Math.min(Math.max(offset, extent[0]), extent[1]);
}

/** Default scroll step: 1/200 of the projected extent. */
export function scrollQuantum(extent: [number, number]): number {
  const span = extent[1] - extent[0];
  return span > 0 ? span / 200 : 1;
}

export function normalize(v: Vec3): Vec3 {
  const n = Math.hypot(v[0], v[1], v[2]);
  if (n === 0) throw new Error("zero normal");
  return [v[0] / n, v[1] / n, v[2] / n];
}

export interface ViewerState {
  modelId: string | null;
  normal: Vec3;
  offset: number;
  extent: [number, number];
  quantum: number;
  lastRawResponse: string | null;
  lastResult: SliceResult | null;
  annotationsVisible: boolean;
}

export function initialState(): ViewerState {
  return {
    modelId: null,
    normal: [0, 1, 0],
    offset: 0,
    extent: [-1, 1],
    quantum: 0.01,
    lastRawResponse: null,
    lastResult: null,
    annotationsVisible: true,
  };
}

export function setPlaneNormal(state: ViewerState, normal: Vec3, bboxMin: Vec3, bboxMax: Vec3): void {
  state.normal = normalize(normal);
  state.extent = projectedExtent(bboxMin, bboxMax, state.normal);
  state.quantum = scrollQuantum(state.extent);
  state.offset = clampOffset(state.offset, state.extent);
}

export function stepOffset(state: ViewerState, ticks: number): number {
  state.offset = clampOffset(
    state.offset + ticks * state.quantum,
    state.extent
  );
  return state.offset;
}

/**
 * Orders slice requests with monotonically increasing ids and drops
 * every response that is not the newest issued request, so the overlay
 * always matches the latest scroll position.  An optional debounce
 * coalesces scroll bursts.
 */
export class SliceGate {
  private nextId = 0;
  private displayedId = -1;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private pending: SliceRequest | null = null;

  constructor(
    private readonly send: (req: SliceRequest) => Promise<string>,
    private readonly onFresh: (raw: string, req: SliceRequest) => void,
    private readonly onError: (err: unknown) => void = () => {},
    private readonly debounceMs = 25
  ) {}

  /** Queue a request; bursts within the debounce window coalesce. */
  request(req: SliceRequest): void {
    this.pending = req;
    if (this.debounceMs <= 0) {
      this.flush();
      return;
    }
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => this.flush(), this.debounceMs);
  }

  /** Issue the pending request immediately. */
  flush(): Promise<void> | undefined {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    const req = this.pending;
    if (req === null) return undefined;
    this.pending = null;
    const id = this.nextId++;
    return this.send(req).then(
      (raw) => {
        if (id !== this.nextId - 1 || id <= this.displayedId) {
          return; // superseded while in flight: discard
        }
        this.displayedId = id;
        this.onFresh(raw, req);
      },
      (err) => {
        if (id === this.nextId - 1) this.onError(err);
      }
    );
  }

  get issuedCount(): number {
    return this.nextId;
  }
}
