import { describe, expect, it } from "vitest";
import { ApiClient, ApiError } from "../src/api";

function fakeFetch(
  routes: Record<string, { status?: number; body: string | ArrayBuffer }>
): typeof fetch {
  return (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const key = Object.keys(routes).find((k) => url.endsWith(k));
    if (!key) return new Response("not found", { status: 404 });
    const { status = 200, body } = routes[key];
    void init;
    return new Response(body, {
      status,
      headers: { "Content-Type": "application/json" },
    });
  }) as typeof fetch;
}

describe("ApiClient", () => {
  it("lists models", async () => {
    const api = new ApiClient(
      "",
      fakeFetch({ "/api/models": { body: '{"models":["cube","heart"]}' } })
    );
    expect(await api.listModels()).toEqual(["cube", "heart"]);
  });

  it("returns the raw slice body untouched", async () => {
    const raw =
      '{"plane":{"normal":[0.0,1.0,0.0],"offset":0.5},"loops":[],"open_chains":[],"crossed_face_count":0,"coplanar_face_count":0}';
    const api = new ApiClient(
      "",
      fakeFetch({ "/api/models/cube/slice": { body: raw } })
    );
    const got = await api.slice({ model: "cube", normal: [0, 1, 0], offset: 0.5 });
    expect(got).toBe(raw);
  });

  it("parses geometry buffers", async () => {
    const buf = new ArrayBuffer(8 + 3 * 12 + 12);
    const dv = new DataView(buf);
    dv.setUint32(0, 3, true);
    dv.setUint32(4, 1, true);
    const api = new ApiClient(
      "",
      fakeFetch({ "/api/models/cube/geometry": { body: buf } })
    );
    const geo = await api.geometry("cube");
    expect(geo.vertexCount).toBe(3);
    expect(geo.faceCount).toBe(1);
  });

  it("surfaces error details with status codes", async () => {
    const api = new ApiClient(
      "",
      fakeFetch({
        "/api/models/nope/info": {
          status: 404,
          body: '{"detail":"unknown model \'nope\'"}',
        },
      })
    );
    await expect(api.modelInfo("nope")).rejects.toThrowError(ApiError);
    await expect(api.modelInfo("nope")).rejects.toThrow(/unknown model/);
  });
});
