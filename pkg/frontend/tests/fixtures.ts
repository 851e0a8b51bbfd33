/** Canned wire pages and a recording fetch mock for unit tests. */

import type { FetchFn } from "../src/api.js";
import type { ResultPageWire, WireCluster, WireDescription } from "../src/types.js";

export function cluster(
  id: string,
  position: number,
  overrides: Partial<WireCluster> & { title?: string; type?: string } = {},
): WireCluster {
  const { title, type, ...rest } = overrides;
  return {
    position,
    score: 1 - position * 0.1,
    representative: id,
    members: [
      {
        record_id: id,
        title: title ?? `Work ${id}`,
        subtitle: null,
        authors: ["Ann Torp"],
        publication_year: 2015,
        document_type: type ?? "monograph",
        language: "en",
        availability: "available_local",
      },
    ],
    ...rest,
  };
}

export function description(text: string, spans: [number, number][]): WireDescription {
  return { text, spans };
}

export function page(overrides: Partial<ResultPageWire> = {}): ResultPageWire {
  const clusters = overrides.clusters ?? [cluster("r1", 1), cluster("r2", 2)];
  return {
    query: "test query",
    intent: { kind: "informational", confidence: 0.5, evidence: "default" },
    zero_result: false,
    suggestions: [],
    page: 1,
    page_size: 10,
    total_results: clusters.length,
    total_clusters: clusters.length,
    clusters,
    descriptions: {},
    facets: {
      document_type: [
        ["monograph", 1],
        ["textbook", 1],
      ],
      subject_heading: [],
      publication_year: [["2015", 2]],
      language: [["en", 2]],
      availability: [["available_local", 2]],
    },
    ...overrides,
  };
}

export interface RecordedCall {
  url: string;
  init?: RequestInit;
}

export interface MockService {
  fetchFn: FetchFn;
  calls: RecordedCall[];
  searchCalls: () => RecordedCall[];
  clickCalls: () => RecordedCall[];
  /** Override the page served for the next searches. */
  respondWith: (p: ResultPageWire) => void;
}

export function mockService(initial: ResultPageWire = page()): MockService {
  const calls: RecordedCall[] = [];
  let current = initial;
  const fetchFn: FetchFn = async (input, init) => {
    const url = String(input);
    calls.push({ url, init: init ?? undefined });
    if (url.includes("/api/click")) {
      return new Response(JSON.stringify({ ok: true, logged: true }), {
        status: 200,
        headers: { "Content-Type": "application/json" },
      });
    }
    return new Response(JSON.stringify(current), {
      status: 200,
      headers: { "Content-Type": "application/json" },
    });
  };
  return {
    fetchFn,
    calls,
    searchCalls: () => calls.filter((c) => c.url.includes("/api/search")),
    clickCalls: () => calls.filter((c) => c.url.includes("/api/click")),
    respondWith: (p) => {
      current = p;
    },
  };
}
