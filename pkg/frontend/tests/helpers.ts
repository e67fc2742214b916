import { vi } from "vitest";

import { App } from "../src/app.js";
import { SearchClient } from "../src/api.js";
import type { MethodInfo, SearchResponse } from "../src/types.js";

import recordedJson from "./fixtures/recorded.json";

export interface Recorded {
  methods: { methods: MethodInfo[] };
  responses: SearchResponse[];
}

export const recorded = recordedJson as unknown as Recorded;

/** Route a /search request to the recorded response for (q, method). */
export function recordedResponder(params: URLSearchParams): { body: unknown } {
  const q = params.get("q") ?? "";
  const method = params.get("method") ?? "";
  const match = recorded.responses.find(
    (r) => r.query === q && r.method === method,
  );
  return { body: match ?? { query: q, method, hits: [] } };
}

export type Responder = (params: URLSearchParams) => {
  status?: number;
  body: unknown;
  defer?: boolean;
};

export interface MockServer {
  fetch: ReturnType<typeof vi.fn>;
  searchCalls: URLSearchParams[];
  /** Resolve the i-th deferred /search response (in request order). */
  release: (i: number) => void;
}

/** Replays recorded payloads; per-call deferral makes races scriptable. */
export function installMockServer(onSearch: Responder): MockServer {
  const searchCalls: URLSearchParams[] = [];
  const pending: Array<() => void> = [];

  const fetchMock = vi.fn(async (input: RequestInfo | URL) => {
    const url = new URL(String(input), "http://mock");
    if (url.pathname === "/methods") {
      return jsonResponse(200, recorded.methods);
    }
    if (url.pathname === "/search") {
      searchCalls.push(url.searchParams);
      const { status = 200, body, defer = false } = onSearch(url.searchParams);
      if (defer) {
        await new Promise<void>((resolve) => pending.push(resolve));
      }
      return jsonResponse(status, body);
    }
    return jsonResponse(404, { detail: "no such route" });
  });
  vi.stubGlobal("fetch", fetchMock);
  return {
    fetch: fetchMock,
    searchCalls,
    release: (i) => pending[i](),
  };
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export async function bootApp(search = ""): Promise<{ app: App; root: HTMLElement }> {
  window.history.replaceState(null, "", `/${search}`);
  const root = document.createElement("div");
  document.body.appendChild(root);
  const app = new App(root, new SearchClient(""), window);
  await app.start();
  return { app, root };
}

export function renderedRecordIds(root: HTMLElement): string[] {
  return Array.from(root.querySelectorAll<HTMLElement>(".hit")).map(
    (el) => el.dataset.recordId ?? "",
  );
}

export async function flush(): Promise<void> {
  // Response.json() schedules macrotasks, so yield to the event loop
  for (let i = 0; i < 4; i += 1) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}
