import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { capturedServiceFetch, fixture, type RecordedCall } from "./helpers.js";

describe("ApiClient", () => {
  it("fetches the 29-sector taxonomy", async () => {
    const api = new ApiClient("", capturedServiceFetch());
    const sectors = await api.getSectors();
    expect(sectors).toHaveLength(29);
    expect(sectors).toContainEqual({ name: "Consumer Electronics", code: 110 });
  });

  it("posts JSON bodies to the similar endpoint", async () => {
    const calls: RecordedCall[] = [];
    const api = new ApiClient("", capturedServiceFetch(calls));
    await api.similar({ case_id: "iphone-001", weight: 0.5, k: 5 });
    expect(calls).toHaveLength(1);
    expect(calls[0]!.method).toBe("POST");
    expect(calls[0]!.url).toBe("/v1/similar");
    expect(calls[0]!.body).toEqual({ case_id: "iphone-001", weight: 0.5, k: 5 });
  });

  it("surfaces machine-readable error codes", async () => {
    const api = new ApiClient("", capturedServiceFetch());
    const failure = api.similar({ overview: "x", sector: 300 });
    await expect(failure).rejects.toBeInstanceOf(ApiError);
    await expect(failure).rejects.toMatchObject({
      code: "unknown_sector_code",
      status: 422,
    });
  });

  it("maps judgment lookups onto the id path", async () => {
    const api = new ApiClient("", capturedServiceFetch());
    const judgment = await api.getJudgment("prec-warranty");
    expect(judgment.sector_code).toBe(110);
    await expect(api.getJudgment("missing")).rejects.toMatchObject({ code: "not_found" });
  });

  it("prefixes a configured base URL", async () => {
    const calls: RecordedCall[] = [];
    const api = new ApiClient("http://svc:8070", capturedServiceFetch(calls));
    await api.getSectors();
    expect(calls[0]!.url).toBe("http://svc:8070/v1/sectors");
  });

  it("returns the summary unchanged from the service body", async () => {
    const api = new ApiClient("", capturedServiceFetch());
    const response = await api.summarize({ case_id: "iphone-001" });
    expect(response).toEqual(fixture("summarize_iphone"));
  });
});
