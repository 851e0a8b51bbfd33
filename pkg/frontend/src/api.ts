/** Thin typed client for the search service HTTP API. */

import type { FacetFilter, ResultPageWire, UserGroup, UserLocation } from "./types.js";

export interface SearchRequest {
  query: string;
  location: UserLocation;
  group: UserGroup;
  filters: FacetFilter[];
  sessionId: string;
  page?: number;
  pageSize?: number;
}

export type FetchFn = typeof fetch;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchFn = (...args) => fetch(...args),
  ) {}

  async search(request: SearchRequest, signal?: AbortSignal): Promise<ResultPageWire> {
    const params = new URLSearchParams({
      q: request.query,
      location: request.location,
      group: request.group,
      session: request.sessionId,
    });
    if (request.page) params.set("page", String(request.page));
    if (request.pageSize) params.set("page_size", String(request.pageSize));
    for (const filter of request.filters) {
      params.append("facet", `${filter.dimension}:${filter.value}`);
    }
    const response = await this.fetchFn(
      `${this.baseUrl}/api/search?${params.toString()}`,
      { signal },
    );
    if (!response.ok) {
      throw new Error(`search failed: HTTP ${response.status}`);
    }
    return (await response.json()) as ResultPageWire;
  }

  /**
   * Fire-and-forget click report; the returned promise is for tests,
   * navigation must never await it.
   */
  reportClick(sessionId: string, recordId: string, position: number): Promise<void> {
    return this.fetchFn(`${this.baseUrl}/api/click`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        session_id: sessionId,
        record_id: recordId,
        position,
      }),
      keepalive: true,
    })
      .then(() => undefined)
      .catch(() => undefined);
  }
}
