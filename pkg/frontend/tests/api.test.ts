import { afterEach, describe, expect, it, vi } from "vitest";

import { BusyError, SegmentationClient, ServiceError } from "../src/api.js";

function mockFetch(status: number, body: unknown) {
  return vi.fn(async () => ({
    ok: status >= 200 && status < 300,
    status,
    statusText: `HTTP ${status}`,
    json: async () => body,
  })) as unknown as typeof fetch;
}

afterEach(() => vi.unstubAllGlobals());

describe("SegmentationClient", () => {
  it("posts the image payload and returns session info", async () => {
    const fetchMock = mockFetch(200, { id: "abc", width: 10, height: 8 });
    vi.stubGlobal("fetch", fetchMock);
    const client = new SegmentationClient();
    const info = await client.createSession("AAAA");
    expect(info.id).toBe("abc");
    const [url, init] = (fetchMock as any).mock.calls[0];
    expect(url).toBe("/sessions");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body).image).toBe("AAAA");
  });

  it("replaces the stroke set atomically via PUT", async () => {
    const fetchMock = mockFetch(200, { accepted: true, labels: 2 });
    vi.stubGlobal("fetch", fetchMock);
    const client = new SegmentationClient("http://svc");
    const resp = await client.updateStrokes("abc", [
      { label: 1, points: [[1, 2]], width: 13 },
    ]);
    expect(resp.labels).toBe(2);
    const [url, init] = (fetchMock as any).mock.calls[0];
    expect(url).toBe("http://svc/sessions/abc/strokes");
    expect(init.method).toBe("PUT");
    expect(JSON.parse(init.body).strokes[0].width).toBe(13);
  });

  it("maps 409 to BusyError", async () => {
    vi.stubGlobal("fetch", mockFetch(409, { detail: "segmentation already running" }));
    const client = new SegmentationClient();
    await expect(client.segment("abc")).rejects.toBeInstanceOf(BusyError);
  });

  it("surfaces service detail messages", async () => {
    vi.stubGlobal("fetch", mockFetch(400, { detail: "need strokes for at least 2 labels" }));
    const client = new SegmentationClient();
    const err = await client.segment("abc").catch((e) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect(err.message).toContain("2 labels");
    expect(err.status).toBe(400);
  });

  it("fetches the debug scribble mask", async () => {
    const fetchMock = mockFetch(200, { mask_png: "QUJD" });
    vi.stubGlobal("fetch", fetchMock);
    const client = new SegmentationClient();
    const out = await client.scribbleMask("abc");
    expect(out.mask_png).toBe("QUJD");
    expect((fetchMock as any).mock.calls[0][0]).toBe("/sessions/abc/scribbles");
  });
});
