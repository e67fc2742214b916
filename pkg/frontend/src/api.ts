import type { MethodInfo, SearchResponse } from "./types.js";

/** Thin fetch wrapper around the search service. */
export class SearchClient {
  constructor(private baseUrl: string = "") {}

  async search(query: string, method: string, k: number): Promise<SearchResponse> {
    const params = new URLSearchParams({ q: query, method, k: String(k) });
    const res = await fetch(`${this.baseUrl}/search?${params}`);
    if (!res.ok) {
      throw new Error(await errorDetail(res));
    }
    return (await res.json()) as SearchResponse;
  }

  async methods(): Promise<MethodInfo[]> {
    const res = await fetch(`${this.baseUrl}/methods`);
    if (!res.ok) {
      throw new Error(await errorDetail(res));
    }
    const body = (await res.json()) as { methods: MethodInfo[] };
    return body.methods;
  }
}

async function errorDetail(res: Response): Promise<string> {
  try {
    const body = (await res.json()) as { detail?: string };
    if (body.detail) {
      return `${res.status}: ${body.detail}`;
    }
  } catch {
    // non-JSON error body; fall through
  }
  return `request failed with status ${res.status}`;
}
