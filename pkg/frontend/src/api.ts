import { parseGeometry } from "./geometry";
import type {
  Annotation,
  Geometry,
  ModelInfo,
  SliceRequest,
} from "./types";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string
  ) {
    super(message);
  }
}

async function checked(res: Response): Promise<Response> {
  if (!res.ok) {
    let detail = res.statusText;
    try {
      detail = (await res.json()).detail ?? detail;
    } catch {
      // non-JSON error body: keep the status text
    }
    throw new ApiError(res.status, detail);
  }
  return res;
}

export class ApiClient {
  constructor(
    private readonly base = "",
    private readonly fetchFn: typeof fetch = fetch
  ) {}

  async listModels(): Promise<string[]> {
    const res = await checked(await this.fetchFn(`${this.base}/api/models`));
    return (await res.json()).models;
  }

  async modelInfo(id: string): Promise<ModelInfo> {
    const res = await checked(
      await this.fetchFn(`${this.base}/api/models/${id}/info`)
    );
    return res.json();
  }

  async geometry(id: string): Promise<Geometry> {
    const res = await checked(
      await this.fetchFn(`${this.base}/api/models/${id}/geometry`)
    );
    return parseGeometry(await res.arrayBuffer());
  }

  /** Raw body text so the metrics panel can show it byte-identically. */
  async slice(req: SliceRequest): Promise<string> {
    const res = await checked(
      await this.fetchFn(`${this.base}/api/models/${req.model}/slice`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ normal: req.normal, offset: req.offset }),
      })
    );
    return res.text();
  }

  async annotations(id: string): Promise<Annotation[]> {
    const res = await checked(
      await this.fetchFn(`${this.base}/api/models/${id}/annotations`)
    );
    return (await res.json()).annotations;
  }
}
