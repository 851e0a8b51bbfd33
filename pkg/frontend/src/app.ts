/** Controller: view state, the single in-flight search, and click reporting.
 *
 * The exploratory loop: the user types a query, reads the highlighted
 * descriptions, narrows with facet clicks (each one re-queries, the counts
 * are a dynamic reaction to the current result set), and every result
 * click is reported back to become log-mining input.
 */

import { ApiClient, type FetchFn } from "./api.js";
import { clearError, renderError, renderFacets, renderResults } from "./render.js";
import { getSessionId } from "./session.js";
import type {
  FacetFilter,
  ResultPageWire,
  UserGroup,
  UserLocation,
} from "./types.js";

export interface ViewState {
  query: string;
  filters: FacetFilter[];
  page: ResultPageWire | null;
  location: UserLocation;
  group: UserGroup;
  sessionId: string;
}

export interface AppOptions {
  baseUrl?: string;
  fetchFn?: FetchFn;
  sessionId?: string;
  storage?: Storage;
}

const filterKey = (f: FacetFilter) => `${f.dimension}:${f.value}`;

export class App {
  readonly state: ViewState;
  readonly resultsContainer: HTMLElement;
  readonly facetsContainer: HTMLElement;
  private readonly api: ApiClient;
  private inFlight: AbortController | null = null;
  private prunedRetry = false;
  /** Last fire-and-forget click report; tests await it, the UI never does. */
  lastClickReport: Promise<void> = Promise.resolve();

  constructor(
    readonly root: HTMLElement,
    options: AppOptions = {},
  ) {
    this.api = new ApiClient(options.baseUrl ?? "", options.fetchFn);
    this.state = {
      query: "",
      filters: [],
      page: null,
      location: "home",
      group: "anonymous",
      sessionId: options.sessionId ?? getSessionId(options.storage),
    };
    this.resultsContainer = this.mount("results");
    this.facetsContainer = this.mount("facets");
  }

  private mount(id: string): HTMLElement {
    const doc = this.root.ownerDocument;
    let node = this.root.querySelector<HTMLElement>(`#${id}`);
    if (!node) {
      node = doc.createElement(id === "facets" ? "aside" : "section");
      node.id = id;
      this.root.appendChild(node);
    }
    return node;
  }

  setContext(location: UserLocation, group: UserGroup): void {
    this.state.location = location;
    this.state.group = group;
  }

  async submitQuery(text: string): Promise<void> {
    const query = text.trim();
    if (!query) return;
    if (query !== this.state.query) {
      this.state.filters = [];
    }
    this.state.query = query;
    await this.runSearch();
  }

  /** Toggle one facet value; stale values (absent from the current page's
   * facets) are dropped silently and the page refreshed. */
  async toggleFacet(dimension: string, value: string): Promise<void> {
    const key = `${dimension}:${value}`;
    const existing = this.state.filters.findIndex((f) => filterKey(f) === key);
    if (existing >= 0) {
      this.state.filters.splice(existing, 1);
    } else if (this.isLiveFacetValue(dimension, value)) {
      this.state.filters.push({ dimension, value });
    }
    await this.runSearch();
  }

  private isLiveFacetValue(dimension: string, value: string): boolean {
    const facets = this.state.page?.facets ?? {};
    return (facets[dimension] ?? []).some(([v]) => v === value);
  }

  private async runSearch(): Promise<void> {
    this.inFlight?.abort();
    const controller = new AbortController();
    this.inFlight = controller;
    try {
      const page = await this.api.search(
        {
          query: this.state.query,
          location: this.state.location,
          group: this.state.group,
          filters: this.state.filters,
          sessionId: this.state.sessionId,
        },
        controller.signal,
      );
      if (controller !== this.inFlight) return; // superseded
      this.applyResponse(page);
    } catch (error) {
      if (controller.signal.aborted) return;
      renderError(this.root, `Search service unreachable: ${String(error)}`);
    }
  }

  private async applyResponse(page: ResultPageWire): Promise<void> {
    // selected filters must stay a subset of the page's facet values;
    // anything stale is dropped and the search re-issued once
    const live = new Set<string>();
    for (const [dimension, values] of Object.entries(page.facets)) {
      for (const [value] of values) live.add(`${dimension}:${value}`);
    }
    const kept = this.state.filters.filter((f) => live.has(filterKey(f)));
    if (kept.length !== this.state.filters.length && !this.prunedRetry) {
      this.prunedRetry = true;
      this.state.filters = kept;
      await this.runSearch();
      return;
    }
    this.prunedRetry = false;
    this.state.page = page;
    this.render();
  }

  private render(): void {
    if (!this.state.page) return;
    clearError(this.root);
    const callbacks = {
      onResultClick: (recordId: string, position: number) =>
        this.reportClick(recordId, position),
      onFacetToggle: (dimension: string, value: string) => {
        void this.toggleFacet(dimension, value);
      },
      onSuggestion: (query: string) => {
        void this.submitQuery(query);
      },
    };
    renderResults(this.resultsContainer, this.state.page, callbacks);
    renderFacets(this.facetsContainer, this.state.page, this.state.filters, callbacks);
  }

  /** Fire-and-forget: navigation never waits on the click endpoint. */
  reportClick(recordId: string, position: number): void {
    this.lastClickReport = this.api.reportClick(
      this.state.sessionId,
      recordId,
      position,
    );
  }
}
