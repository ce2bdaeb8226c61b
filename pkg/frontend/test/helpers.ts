// Test plumbing: captured-fixture loading and a scriptable fetch.
//
// Fixtures under test/fixtures/ are real responses recorded from the
// mock-backed service by scripts/capture_fixtures.py, so these tests assert
// against genuine service output.

import { readFileSync } from "node:fs";
import { join } from "node:path";

import type { FetchLike } from "../src/api.js";

export function fixture<T = any>(name: string): T {
  // vitest runs with the frontend directory as cwd; import.meta.url is not
  // a file URL under the jsdom environment
  const path = join(process.cwd(), "test", "fixtures", `${name}.json`);
  return JSON.parse(readFileSync(path, "utf-8")) as T;
}

export interface RecordedCall {
  url: string;
  method: string;
  body: any;
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** Replays captured service responses; records every call it serves. */
export function capturedServiceFetch(calls: RecordedCall[] = []): FetchLike {
  return async (url: string, init?: RequestInit) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    calls.push({ url, method, body });

    if (url.endsWith("/v1/sectors")) return jsonResponse(fixture("sectors"));
    if (url.includes("/v1/judgments/")) {
      const id = decodeURIComponent(url.split("/").pop()!);
      if (id === "prec-warranty") return jsonResponse(fixture("judgment_prec_warranty"));
      return jsonResponse(
        { error: { code: "not_found", message: `judgment '${id}' not found` } },
        404,
      );
    }
    if (url.endsWith("/v1/summarize")) return jsonResponse(fixture("summarize_iphone"));
    if (url.endsWith("/v1/evaluate")) return jsonResponse(fixture("report"));
    if (url.endsWith("/v1/similar")) {
      if (body?.sector === 300) return jsonResponse(fixture("similar_bad_sector"), 422);
      if (body?.sector === 999) return jsonResponse(fixture("similar_empty_sector"));
      if (body?.weight === 1) return jsonResponse(fixture("similar_lexical"));
      if (body?.weight === 0) return jsonResponse(fixture("similar_semantic"));
      return jsonResponse(fixture("similar_default"));
    }
    throw new Error(`unrouted request: ${method} ${url}`);
  };
}

export interface Deferred {
  url: string;
  body: any;
  resolve: (body: unknown, status?: number) => void;
}

/** A fetch whose responses the test completes by hand, in any order. */
export function deferredFetch(pending: Deferred[]): FetchLike {
  return (url: string, init?: RequestInit) =>
    new Promise<Response>((resolvePromise) => {
      pending.push({
        url,
        body: init?.body ? JSON.parse(String(init.body)) : null,
        resolve: (body, status = 200) => resolvePromise(jsonResponse(body, status)),
      });
    });
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export function mount(): HTMLElement {
  const root = document.createElement("div");
  document.body.appendChild(root);
  return root;
}
